//! Growth-or-structure certificates for solvable subsets of the
//! upper-triangular Borel of `GL_r(F_p)`.
//!
//! [`run_dichotomy`] either measures `|A_3| >= C|A|` or produces subgroups
//! `U_R ⊴ S ⊴ <A>` with `S/U_R` nilpotent, `U_R ⊆ A_k`, and a recorded
//! exponent `e` with `|A_k ∩ S| >= C^-e |A|`. [`verify_certificate`] rederives
//! every clause from the certificate's generators and the input set alone.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descent::{capture_ur, CaptureReport, DescentConfig, DescentError, DescentInstance};
use crate::error::AlgebraError;
use crate::field::{FieldCtx, FieldSpec};
use crate::group::{is_solvable, Group, QuotientGroup};
use crate::matrix::{GroupElement, Matrix};
use crate::pivoting::{run_pivot, ActionCtx, Automorphism, Branch, PivotCase, PivotError};
use crate::set::{ElementSet, DEFAULT_CAP};
use crate::setcalc::{left_coset_count, product_set, SetCalcError, WordLengths};
use crate::torus_roots::{standard_form, weight_decompose, RootDatum, RootError};

/// Relative slack allowed in `|A_k ∩ S| · C^e >= |A|`, which is evaluated in floating point.
pub const EXPONENT_TOLERANCE: f64 = 1e-9;

/// Subgroups up to this order are serialized elementwise besides their generators.
pub const ELEMENT_LIST_LIMIT: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DichotomyError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    SetCalc(#[from] SetCalcError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Pivot(#[from] PivotError),
    #[error(transparent)]
    Descent(#[from] DescentError),
    #[error("input set is empty")]
    Empty,
    #[error("constant must be finite and at least 1, got {0}")]
    BadConstant(f64),
    #[error("element is not upper triangular")]
    NotTriangular,
    #[error("<A> is not solvable")]
    NotSolvable,
    #[error("only prime fields are supported")]
    ExtensionField,
    #[error("no splitting conjugator: {0}")]
    NoSplit(String),
    #[error("U is not abelian")]
    NonAbelian,
    #[error("<A> is not inside U·T")]
    NotInAmbient,
    #[error("normal upgrade exceeded {0} iterations")]
    IterationBound(usize),
    #[error("not a structure certificate")]
    NotStructure,
    #[error("bad certificate: {0}")]
    BadCertificate(String),
}

fn diag_part(g: &GroupElement) -> GroupElement {
    GroupElement::diagonal(g.ctx(), &g.diag()).expect("diagonal of an invertible triangular matrix")
}

fn unipotent_part(g: &GroupElement) -> GroupElement {
    g.mul_unchecked(&diag_part(g).inv())
}

fn is_unipotent(g: &GroupElement) -> bool {
    let n = g.matrix().sub(&Matrix::identity(g.ctx(), g.dim()));
    let mut acc = n.clone();
    for _ in 1..g.dim() {
        acc = acc.mul_unchecked(&n);
    }
    acc.is_zero()
}

fn check_constant(c: f64) -> Result<(), DichotomyError> {
    if c.is_finite() && c >= 1.0 {
        Ok(())
    } else {
        Err(DichotomyError::BadConstant(c))
    }
}

/// Returns `g` with `gHg^-1 = (gHg^-1 ∩ U) ⋊ (gHg^-1 ∩ T)`.
///
/// A complement `C` of `H ∩ U` is assembled from commuting `p'`-elements
/// lifting the diagonal parts of the generators. `C` is then diagonalized by
/// the eigenvector projections `P_j = |C|^-1 Σ_c χ_j(c)^-1 c` applied to `e_j`,
/// which are unitriangular because every `c` is upper triangular.
pub fn schur_zassenhaus_split(h: &Group) -> Result<GroupElement, DichotomyError> {
    let (ctx, r) = (h.ctx().clone(), h.dim());
    let p = ctx.p() as u64;
    if p as usize <= r {
        return Err(DichotomyError::NoSplit(format!("p = {p} must exceed r = {r}")));
    }
    if h.gens().iter().any(|g| !g.is_upper_triangular()) {
        return Err(DichotomyError::NotTriangular);
    }
    let mut comp = Group::trivial(&ctx, r);
    for x in h.gens() {
        let tau = x.diag();
        if comp.elements().iter().any(|c| c.diag() == tau) {
            continue;
        }
        let lift = h
            .elements()
            .iter()
            .find(|c| {
                c.diag() == tau
                    && c.order() % p != 0
                    && comp.gens().iter().all(|d| c.mul_unchecked(d) == d.mul_unchecked(c))
            })
            .cloned()
            .ok_or_else(|| DichotomyError::NoSplit("no commuting p'-lift".into()))?;
        comp.adjoin(lift, h.order())?;
    }
    let n_inv = ctx
        .inv(ctx.from_int(comp.order() as i64))
        .ok_or_else(|| DichotomyError::NoSplit("complement order divisible by p".into()))?;
    let mut m = Matrix::zero(&ctx, r);
    for j in 0..r {
        for c in comp.elements().iter() {
            let w = ctx.inv(c.get(j, j)).unwrap();
            for i in 0..=j {
                let v = ctx.add(m.get(i, j), ctx.mul(w, c.get(i, j)));
                m.set(i, j, v);
            }
        }
        for i in 0..=j {
            m.set(i, j, ctx.mul(m.get(i, j), n_inv));
        }
    }
    let basis = GroupElement::new(m)?;
    if !basis.is_unitriangular() {
        return Err(DichotomyError::NoSplit("projections are not unitriangular".into()));
    }
    let g = basis.inv();
    let conj = h.conjugate(&g);
    let u = conj.elements().iter().filter(|x| x.is_unitriangular()).count();
    let t = conj.elements().iter().filter(|x| x.is_diagonal()).count();
    if u * t != h.order() {
        return Err(DichotomyError::NoSplit(format!("|U part| {u} · |T part| {t} != {}", h.order())));
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch")]
pub enum TrichotomyBranch {
    /// `|A_k ∩ ker α(R)|` for the root with the largest count; `holds` is `count >= |A|/C`.
    KernelMass { root: usize, k: usize, count: usize, holds: bool },
    /// `|A_k|` after the pivot returned its growth branch; `holds` is `size >= C|A|`.
    Growth { k: usize, size: usize, holds: bool, pivot_case: PivotCase },
    /// A subgroup `H` of `U_R U^1/U^1` containing `[A, A]`, of the given order.
    /// `k` is the least `k` with `H ⊆ A_k U^1/U^1`, when `<A>` reaches all of `H`.
    Subgroup { order: usize, k: Option<usize>, quotient_abelian: bool, pivot_case: Option<PivotCase> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trichotomy {
    pub branch: TrichotomyBranch,
    /// `|A/U|`.
    pub torus_image: usize,
    /// Elements of `A/U` inside some root kernel.
    pub kernel_image: usize,
    /// `|U_R U^1/U^1|`.
    pub v_order: usize,
    /// `|[A, A_2]|` modulo `U^1`.
    pub w_size: usize,
}

/// Runs the kernel-mass test and then the pivot on `U_R U^1/U^1`, on a `U`
/// that must be abelian (so `U^1` is trivial).
pub fn abelian_trichotomy(
    a: &ElementSet,
    datum: &RootDatum,
    c: f64,
    cap: usize,
) -> Result<Trichotomy, DichotomyError> {
    check_constant(c)?;
    if !datum.unipotent.is_abelian() {
        return Err(DichotomyError::NonAbelian);
    }
    let words = WordLengths::new(a, cap)?;
    trichotomy_mod_u1(a, datum, c, &words)
}

/// The trichotomy on `G/U^1`. Coordinates of `U_R U^1/U^1` are the standard-form
/// coefficients at the height-one roots, embedded as `I + Σ s_i E_{i,m}` in
/// `GL_{m+1}`, where `T` acts by `diag(α_1(t), .., α_m(t), 1)`.
fn trichotomy_mod_u1(
    a: &ElementSet,
    datum: &RootDatum,
    c: f64,
    words: &WordLengths,
) -> Result<Trichotomy, DichotomyError> {
    let ctx = datum.ctx().clone();
    let in_ambient = |x: &GroupElement| {
        x.is_upper_triangular()
            && datum.torus.contains(&diag_part(x))
            && datum.unipotent.contains(&unipotent_part(x))
    };
    if !words.elements().iter().all(in_ambient) {
        return Err(DichotomyError::NotInAmbient);
    }
    let chars: Vec<_> = datum.roots.iter().map(|&l| &datum.weight_subgroups[l].character).collect();
    let taus = a.map(diag_part);
    let kernel_image = taus.iter().filter(|t| chars.iter().any(|ch| ch.eval(t) == 1)).count();

    if kernel_image as f64 * c > taus.len() as f64 {
        let a3 = words.ball(3);
        let (mut root, mut count) = (datum.roots[0], 0);
        for (&l, ch) in datum.roots.iter().zip(&chars) {
            let n = a3.iter().filter(|x| ch.eval(x) == 1).count();
            if n > count {
                (root, count) = (l, n);
            }
        }
        let holds = count as f64 * c >= a.len() as f64;
        return Ok(Trichotomy {
            branch: TrichotomyBranch::KernelMass { root, k: 3, count, holds },
            torus_image: taus.len(),
            kernel_image,
            v_order: 0,
            w_size: 0,
        });
    }

    let h1: Vec<usize> =
        datum.roots.iter().copied().filter(|&l| datum.weight_subgroups[l].height == 1).collect();
    let m = h1.len();
    let lambda1: Vec<usize> =
        datum.lambda.iter().copied().filter(|&l| datum.weight_subgroups[l].height == 1).collect();
    // Coordinates modulo U^1, or None outside U_R U^1.
    let project = |u: &GroupElement| -> Result<Option<Vec<u32>>, DichotomyError> {
        let sf = standard_form(u, datum)?;
        if !sf.torus_part.is_identity() || lambda1.iter().any(|&l| !sf.coeffs[l].is_zero()) {
            return Ok(None);
        }
        Ok(Some(h1.iter().map(|&l| sf.coeffs[l].value()).collect()))
    };
    let embed = |s: &[u32]| {
        let mut e = Matrix::identity(&ctx, m + 1);
        for (i, &v) in s.iter().enumerate() {
            e.set(i, m, v);
        }
        GroupElement::new(e).unwrap()
    };
    let mut commutators: HashMap<GroupElement, ()> = HashMap::new();
    for x in a.iter() {
        for y in a.iter() {
            commutators.insert(x.commutator(y), ());
        }
    }
    let mut quotient_pairs = Vec::new();
    for u in commutators.keys() {
        quotient_pairs.push(project(u)?);
    }

    if m == 0 {
        let quotient_abelian = quotient_pairs.iter().all(|s| s.is_some());
        return Ok(Trichotomy {
            branch: TrichotomyBranch::Subgroup { order: 1, k: Some(0), quotient_abelian, pivot_case: None },
            torus_image: taus.len(),
            kernel_image,
            v_order: 1,
            w_size: 1,
        });
    }

    let v_gens: Vec<GroupElement> =
        (0..m).map(|i| GroupElement::transvection(&ctx, m + 1, i, m, 1)).collect();
    let v = Group::generate(&ctx, m + 1, v_gens, DEFAULT_CAP)?;
    let mut alphas: Vec<Vec<u32>> = Vec::new();
    for t in taus.iter() {
        let mut d: Vec<u32> = h1.iter().map(|&l| datum.weight_subgroups[l].character.eval(t)).collect();
        d.push(1);
        if !alphas.contains(&d) {
            alphas.push(d);
        }
    }
    let autos = alphas
        .iter()
        .map(|d| Ok(Automorphism::Conjugation(GroupElement::diagonal(&ctx, d)?)))
        .collect::<Result<Vec<_>, AlgebraError>>()?;
    let a2 = words.ball(2);
    let mut w_raw: HashMap<GroupElement, ()> = HashMap::new();
    for x in a.iter() {
        for y in a2.iter() {
            w_raw.insert(x.commutator(y), ());
        }
    }
    let mut w = ElementSet::new(&ctx, m + 1);
    for u in w_raw.keys() {
        let s = project(u)?.ok_or(DichotomyError::NotInAmbient)?;
        w.insert(embed(&s));
    }
    let act = ActionCtx::new(v.clone(), autos)?;
    let xs: Vec<usize> = (0..act.len()).collect();
    let outcome = run_pivot(&act, &xs, &w)?;
    let branch = match outcome.branch {
        Branch::Growth => {
            let size = words.ball(49).len();
            TrichotomyBranch::Growth {
                k: 49,
                size,
                holds: size as f64 >= c * a.len() as f64,
                pivot_case: outcome.case,
            }
        }
        Branch::FullGroup => {
            let hsub = &outcome.measured;
            let mut best: HashMap<GroupElement, usize> = HashMap::new();
            for (x, d) in words.iter() {
                if !x.is_unitriangular() {
                    continue;
                }
                if let Some(s) = project(x)? {
                    let e = embed(&s);
                    if hsub.contains(&e) {
                        best.entry(e).or_insert(d);
                    }
                }
            }
            let k = (best.len() == hsub.len()).then(|| best.values().copied().max().unwrap_or(0));
            let quotient_abelian =
                quotient_pairs.iter().all(|s| s.as_ref().is_some_and(|s| hsub.contains(&embed(s))));
            TrichotomyBranch::Subgroup {
                order: hsub.len(),
                k,
                quotient_abelian,
                pivot_case: Some(outcome.case),
            }
        }
    };
    Ok(Trichotomy { branch, torus_image: taus.len(), kernel_image, v_order: v.order(), w_size: w.len() })
}

/// A subgroup recorded by generators (packed entries, row-major) and order;
/// small subgroups also list their sorted elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupRecord {
    pub order: usize,
    pub generators: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<Vec<u32>>>,
}

impl SubgroupRecord {
    pub fn from_group(g: &Group) -> Self {
        let generators = g.gens().iter().map(|x| x.entries().to_vec()).collect();
        let elements = (g.order() <= ELEMENT_LIST_LIMIT)
            .then(|| g.elements().sorted().iter().map(|x| x.entries().to_vec()).collect());
        SubgroupRecord { order: g.order(), generators, elements }
    }

    /// Regenerates the subgroup by closure and checks the recorded order and elements.
    pub fn to_group(&self, ctx: &FieldCtx, r: usize, cap: usize) -> Result<Group, DichotomyError> {
        let decode = |e: &Vec<u32>| -> Result<GroupElement, DichotomyError> {
            Ok(GroupElement::new(Matrix::from_entries(ctx, r, e.clone())?)?)
        };
        let gens = self.generators.iter().map(decode).collect::<Result<Vec<_>, _>>()?;
        let g = Group::generate(ctx, r, gens, cap)?;
        if g.order() != self.order {
            return Err(DichotomyError::BadCertificate(format!(
                "generators close to order {}, recorded {}",
                g.order(),
                self.order
            )));
        }
        if let Some(list) = &self.elements {
            for e in list {
                if !g.contains(&decode(e)?) {
                    return Err(DichotomyError::BadCertificate("listed element outside closure".into()));
                }
            }
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", content = "detail")]
pub enum Route {
    /// `p <= r`: `S = <A>` and `U_R = <A> ∩ U_r`, with `k` measured.
    SmallCharacteristic,
    /// No roots were left after kernel reduction, so `U_R` is trivial.
    Nilpotent,
    Descent,
    /// The descent could not certify; `U_R` falls back to the trivial group.
    DescentFailed(String),
    /// Built by [`structure_certificate`] from given subgroups.
    Supplied,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SSource {
    /// `S = <A>`.
    Generated,
    /// `S = <A> ∩ U_* T_*` for the group left by kernel reduction.
    KernelGroup,
    /// `S = U_N · C_{T_N}(U_N/U_R)` with `U_R` upgraded to be normal in `N = <A>`.
    Fitting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub root: usize,
    /// `|A_{*,2} ∩ ker α(R)|`.
    pub count: usize,
    pub set_size: usize,
    pub torus_before: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverTrace {
    pub route: Route,
    pub s_source: SSource,
    /// Splitting conjugator accumulated over all rounds, as packed entries.
    pub frame: Vec<u32>,
    /// `D = C^(1/δ)`.
    pub d: f64,
    pub reductions: Vec<Reduction>,
    /// Fewer than `r^3` reductions.
    pub iteration_bound_ok: bool,
    /// `2^j` after `j` reductions: every element of the reduced set is a word of at most this length.
    pub k_reduction: usize,
    /// Measured largest word length over the reduced set.
    pub k_star: usize,
    /// `k` of the descent times `k_reduction`.
    pub k_constructive: Option<usize>,
    pub trichotomy: Option<Trichotomy>,
    pub descent: Option<CaptureReport>,
    pub normal_upgrades: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthWitness {
    pub set_size: usize,
    /// `|A_3|`.
    pub triple_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureWitness {
    pub u_r: SubgroupRecord,
    pub s: SubgroupRecord,
    pub k: usize,
    /// Left cosets of `S` meeting `A`.
    pub coset_count: usize,
    pub set_size: usize,
    /// `|A_k ∩ S|`.
    pub ak_cap_s: usize,
    /// `e` with `|A_k ∩ S| >= C^-e |A|`.
    pub c_exponent: f64,
    pub u_r_normal: bool,
    pub trace: DriverTrace,
}

// One certificate per run; boxing the structure witness buys nothing.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CertificateKind {
    Growth(GrowthWitness),
    Structure(StructureWitness),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub field: FieldSpec,
    pub r: usize,
    pub c: f64,
    pub delta: f64,
    pub kind: CertificateKind,
}

impl Certificate {
    pub fn is_growth(&self) -> bool {
        matches!(self.kind, CertificateKind::Growth(_))
    }

    pub fn structure(&self) -> Option<&StructureWitness> {
        match &self.kind {
            CertificateKind::Structure(s) => Some(s),
            CertificateKind::Growth(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DichotomyConfig {
    /// `D = C^(1/δ)` is the threshold of the kernel-mass test.
    pub delta: f64,
    pub cap: usize,
    pub descent: DescentConfig,
}

impl Default for DichotomyConfig {
    fn default() -> Self {
        DichotomyConfig { delta: 1.0, cap: DEFAULT_CAP, descent: DescentConfig::default() }
    }
}

fn exponent(set_size: usize, count: usize, c: f64) -> f64 {
    if count >= set_size || c <= 1.0 {
        0.0
    } else {
        (set_size as f64 / count as f64).ln() / c.ln()
    }
}

/// Replaces `u_r` by `u_r · a u_r a^-1` until it is normalized by every `a` in `a_set`.
fn normal_upgrade(
    u_r: &Group,
    a_set: &ElementSet,
    bound: usize,
    cap: usize,
) -> Result<(Group, usize), DichotomyError> {
    let mut u = u_r.clone();
    let mut steps = 0;
    while let Some(x) = a_set.iter().find(|x| !u.gens().iter().all(|g| u.contains(&x.conj(g)))) {
        steps += 1;
        if steps > bound {
            return Err(DichotomyError::IterationBound(bound));
        }
        let conj = u.conjugate(x);
        let prod = u.product_set(&conj, cap)?;
        u = Group::from_set(&prod)
            .map_err(|_| DichotomyError::BadCertificate("U_R · U_R^a is not a subgroup".into()))?;
    }
    Ok((u, steps))
}

/// Runs the growth test, then kernel reduction, the trichotomy and the
/// descent, and returns a certificate in the input's coordinates.
///
/// Growth is certified only by a measured `|A_3| >= C|A|`. Every other
/// outcome, including a trichotomy growth branch, ends in a structure
/// certificate whose exponent `e` is measured.
pub fn run_dichotomy(a: &ElementSet, c: f64, cfg: &DichotomyConfig) -> Result<Certificate, DichotomyError> {
    check_constant(c)?;
    if !(cfg.delta.is_finite() && cfg.delta > 0.0) {
        return Err(DichotomyError::BadConstant(cfg.delta));
    }
    if a.is_empty() {
        return Err(DichotomyError::Empty);
    }
    let (ctx, r, cap) = (a.ctx().clone(), a.dim(), cfg.cap);
    if ctx.a() != 1 {
        return Err(DichotomyError::ExtensionField);
    }
    if a.iter().any(|g| !g.is_upper_triangular()) {
        return Err(DichotomyError::NotTriangular);
    }
    let gen = Group::generate(&ctx, r, a.to_vec(), cap)?;
    if !is_solvable(&gen, cap)? {
        return Err(DichotomyError::NotSolvable);
    }
    let certificate = |kind| Certificate { field: ctx.spec(), r, c, delta: cfg.delta, kind };

    let triple = product_set(a, 3, cap)?;
    if triple.len() as f64 >= c * a.len() as f64 {
        return Ok(certificate(CertificateKind::Growth(GrowthWitness {
            set_size: a.len(),
            triple_size: triple.len(),
        })));
    }

    let words_a = WordLengths::new(a, cap)?;
    let d = c.powf(1.0 / cfg.delta);
    let mut trace = DriverTrace {
        route: Route::SmallCharacteristic,
        s_source: SSource::Generated,
        frame: GroupElement::identity(&ctx, r).entries().to_vec(),
        d,
        reductions: Vec::new(),
        iteration_bound_ok: true,
        k_reduction: 1,
        k_star: 0,
        k_constructive: None,
        trichotomy: None,
        descent: None,
        normal_upgrades: 0,
    };

    let (u_r, s) = if ctx.p() as usize <= r {
        let u = Group::from_set(&gen.elements().filter(|g| g.is_unitriangular()))?;
        (u, gen.clone())
    } else {
        let mut frame = schur_zassenhaus_split(&gen)?;
        let mut cur = a.conjugate(&frame);
        let datum = loop {
            let mut h = Group::generate(&ctx, r, cur.to_vec(), cap)?;
            let g2 = schur_zassenhaus_split(&h)?;
            if !g2.is_identity() {
                frame = g2.mul_unchecked(&frame);
                cur = cur.conjugate(&g2);
                h = h.conjugate(&g2);
            }
            let u = Group::from_set(&h.elements().filter(|g| g.is_unitriangular()))?;
            let tgens: Vec<GroupElement> = cur.map(diag_part).to_vec();
            let datum = weight_decompose(&u, &tgens)?;
            if datum.roots.is_empty() {
                break datum;
            }
            let ball2 = WordLengths::new(&cur, cap)?.ball(2);
            let hit = datum.roots.iter().find_map(|&l| {
                let ch = &datum.weight_subgroups[l].character;
                let ker = ball2.filter(|x| ch.eval(x) == 1);
                (ker.len() as f64 * d >= cur.len() as f64).then_some((l, ker))
            });
            match hit {
                Some((root, ker)) => {
                    trace.reductions.push(Reduction {
                        root,
                        count: ker.len(),
                        set_size: cur.len(),
                        torus_before: datum.torus.order(),
                    });
                    trace.k_reduction *= 2;
                    cur = ker;
                }
                None => break datum,
            }
        };
        trace.iteration_bound_ok = trace.reductions.len() < r.pow(3);
        trace.frame = frame.entries().to_vec();
        let frame_inv = frame.inv();
        trace.k_star = cur
            .iter()
            .map(|x| words_a.len_of(&frame_inv.conj(x)).expect("reduced set lies in <A>"))
            .max()
            .unwrap_or(0);

        let mut u_r = Group::trivial(&ctx, r);
        if datum.roots.is_empty() {
            trace.route = Route::Nilpotent;
        } else {
            let cur_words = WordLengths::new(&cur, cap)?;
            trace.trichotomy = trichotomy_mod_u1(&cur, &datum, d, &cur_words).ok();
            let captured = DescentInstance::new(&cur, datum.clone(), cap)
                .and_then(|inst| capture_ur(&inst, d, &cfg.descent));
            match captured {
                Ok(cap_ur) => {
                    u_r = Group::from_set(&cap_ur.u_r)?;
                    trace.k_constructive = Some(cap_ur.k * trace.k_reduction);
                    trace.descent = Some(cap_ur.report);
                    trace.route = Route::Descent;
                }
                Err(e) => trace.route = Route::DescentFailed(e.to_string()),
            }
        }

        let n = gen.conjugate(&frame);
        let in_kernel_group = |x: &GroupElement| {
            datum.torus.contains(&diag_part(x)) && datum.unipotent.contains(&unipotent_part(x))
        };
        let s_kernel = Group::from_set(&n.elements().filter(in_kernel_group))?;
        let kernel_ok = s_kernel.is_normal_in(&n)
            && u_r.is_normal_in(&s_kernel)
            && QuotientGroup::new(&s_kernel, &u_r)?.is_nilpotent(cap)?;
        let (u_r, s) = if kernel_ok {
            trace.s_source = SSource::KernelGroup;
            (u_r, s_kernel)
        } else {
            let a_frame = a.conjugate(&frame);
            let (u_r, steps) =
                normal_upgrade(&u_r, &a_frame, r * r, cap).or_else(|_| -> Result<_, DichotomyError> {
                    let seeds = u_r.gens().to_vec();
                    Ok((crate::group::normal_closure(&seeds, &n, cap)?, 0))
                })?;
            trace.normal_upgrades = steps;
            trace.s_source = SSource::Fitting;
            let u_n = Group::from_set(&n.elements().filter(|g| g.is_unitriangular()))?;
            let centralizes = |x: &GroupElement| {
                let t = diag_part(x);
                u_n.gens().iter().all(|u| u_r.contains(&t.commutator(u)))
            };
            let s = Group::from_set(&n.elements().filter(centralizes))?;
            (u_r, s)
        };
        (u_r.conjugate(&frame_inv), s.conjugate(&frame_inv))
    };

    let k_ur = u_r.elements().iter().map(|u| words_a.len_of(u).expect("U_R lies in <A>")).max().unwrap_or(0);
    let k = k_ur.max(trace.k_star);
    let ak_cap_s = words_a.ball(k).iter().filter(|x| s.contains(x)).count();
    let u_r_normal = u_r.is_normal_in(&gen);
    Ok(certificate(CertificateKind::Structure(StructureWitness {
        u_r: SubgroupRecord::from_group(&u_r),
        s: SubgroupRecord::from_group(&s),
        k,
        coset_count: left_coset_count(a, &s),
        set_size: a.len(),
        ak_cap_s,
        c_exponent: exponent(a.len(), ak_cap_s, c),
        u_r_normal,
        trace,
    })))
}

/// A structure certificate for given `U_R` and `S`, with `k` the least value
/// such that `U_R ⊆ A_k` and the counts measured. Nothing else is checked;
/// run [`verify_certificate`] on the result.
pub fn structure_certificate(
    a: &ElementSet,
    u_r: &Group,
    s: &Group,
    c: f64,
    cap: usize,
) -> Result<Certificate, DichotomyError> {
    check_constant(c)?;
    let words = WordLengths::new(a, cap)?;
    let mut k = 0;
    for u in u_r.elements().iter() {
        let d =
            words.len_of(u).ok_or_else(|| DichotomyError::BadCertificate("U_R is not inside <A>".into()))?;
        k = k.max(d);
    }
    let ak_cap_s = words.ball(k).iter().filter(|x| s.contains(x)).count();
    let ctx = a.ctx();
    let trace = DriverTrace {
        route: Route::Supplied,
        s_source: SSource::Generated,
        frame: GroupElement::identity(ctx, a.dim()).entries().to_vec(),
        d: c,
        reductions: Vec::new(),
        iteration_bound_ok: true,
        k_reduction: 1,
        k_star: 0,
        k_constructive: None,
        trichotomy: None,
        descent: None,
        normal_upgrades: 0,
    };
    Ok(Certificate {
        field: ctx.spec(),
        r: a.dim(),
        c,
        delta: 1.0,
        kind: CertificateKind::Structure(StructureWitness {
            u_r: SubgroupRecord::from_group(u_r),
            s: SubgroupRecord::from_group(s),
            k,
            coset_count: left_coset_count(a, s),
            set_size: a.len(),
            ak_cap_s,
            c_exponent: exponent(a.len(), ak_cap_s, c),
            u_r_normal: u_r.is_normal_in(&Group::generate(ctx, a.dim(), a.to_vec(), cap)?),
            trace,
        }),
    })
}

/// Makes `U_R` normal in `<A>` by `U_R <- U_R · a U_R a^-1`, updating `k` to `2k + 2`
/// at each step, within `r^2` steps.
pub fn upgrade_normal_ur(
    cert: &Certificate,
    a: &ElementSet,
    cap: usize,
) -> Result<Certificate, DichotomyError> {
    let w = cert.structure().ok_or(DichotomyError::NotStructure)?;
    let ctx = FieldCtx::from_spec(&cert.field)?;
    let r = cert.r;
    let u_r = w.u_r.to_group(&ctx, r, cap)?;
    let s = w.s.to_group(&ctx, r, cap)?;
    let (u_new, steps) = normal_upgrade(&u_r, a, r * r, cap)?;
    if steps == 0 {
        let mut out = cert.clone();
        if let CertificateKind::Structure(sw) = &mut out.kind {
            sw.u_r_normal = true;
        }
        return Ok(out);
    }
    let mut k = w.k;
    for _ in 0..steps {
        k = 2 * k + 2;
    }
    let words = WordLengths::new(a, cap)?;
    let ak_cap_s = words.ball(k).iter().filter(|x| s.contains(x)).count();
    let mut trace = w.trace.clone();
    trace.normal_upgrades += steps;
    let mut out = cert.clone();
    out.kind = CertificateKind::Structure(StructureWitness {
        u_r: SubgroupRecord::from_group(&u_new),
        s: w.s.clone(),
        k,
        coset_count: w.coset_count,
        set_size: w.set_size,
        ak_cap_s,
        c_exponent: exponent(a.len(), ak_cap_s, cert.c),
        u_r_normal: true,
        trace,
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub clauses: Vec<Clause>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.clauses.iter().all(|c| c.holds)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.clauses.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }

    fn push(&mut self, name: &str, holds: bool, detail: String) {
        self.clauses.push(Clause { name: name.into(), holds, detail });
    }
}

/// Recomputes every clause of the certificate from `A` alone: closures of the
/// recorded generators, normality by conjugation, nilpotency of `S/U_R` by its
/// lower central series, `U_R ⊆ A_k` by product-set expansion, the count of
/// `A_k ∩ S` and the coset count. With `require_normal`, also `U_R ⊴ <A>`.
pub fn verify_certificate(
    cert: &Certificate,
    a: &ElementSet,
    require_normal: bool,
    cap: usize,
) -> Result<Verdict, DichotomyError> {
    let mut v = Verdict { clauses: Vec::new() };
    let field_ok = cert.field == a.ctx().spec() && cert.r == a.dim() && !a.is_empty();
    v.push("field", field_ok, format!("{:?} r={}", cert.field, cert.r));
    if !field_ok {
        return Ok(v);
    }
    let c = cert.c;
    match &cert.kind {
        CertificateKind::Growth(g) => {
            let a3 = product_set(a, 3, cap)?.len();
            let holds = a3 == g.triple_size && g.set_size == a.len() && a3 as f64 >= c * a.len() as f64;
            v.push("cardinality", holds, format!("|A_3| = {a3}, |A| = {}, C = {c}", a.len()));
        }
        CertificateKind::Structure(w) => {
            let ctx = a.ctx();
            let r = a.dim();
            let groups = w.u_r.to_group(ctx, r, cap).and_then(|u| Ok((u, w.s.to_group(ctx, r, cap)?)));
            let (u_r, s) = match groups {
                Ok(pair) => {
                    v.push("groups", true, format!("|U_R| = {}, |S| = {}", pair.0.order(), pair.1.order()));
                    pair
                }
                Err(e) => {
                    v.push("groups", false, e.to_string());
                    return Ok(v);
                }
            };
            let n = Group::generate(ctx, r, a.to_vec(), cap)?;
            v.push("subgroup", s.is_subgroup_of(&n), format!("|<A>| = {}", n.order()));
            let unip = u_r.elements().iter().all(is_unipotent);
            v.push("unipotent", unip, String::new());
            let u_in_s = u_r.is_normal_in(&s);
            v.push("u_r_normal_in_s", u_in_s, String::new());
            v.push("s_normal_in_generated", s.is_normal_in(&n), String::new());
            let nil = if u_in_s {
                let q = QuotientGroup::new(&s, &u_r)?;
                let orders = q.lower_central_orders(cap)?;
                (orders.last() == Some(&1) || q.order() == 1, format!("{orders:?}"))
            } else {
                (false, "U_R is not normal in S".into())
            };
            v.push("nilpotent_quotient", nil.0, nil.1);
            let ak = if w.k == 0 { ElementSet::identity(ctx, r) } else { product_set(a, w.k, cap)? };
            let missing = u_r.elements().iter().filter(|u| !ak.contains(u)).count();
            v.push(
                "membership",
                missing == 0,
                format!("k = {}, {missing} of {} outside A_k", w.k, u_r.order()),
            );
            let count = ak.iter().filter(|x| s.contains(x)).count();
            let bound = count as f64 * c.powf(w.c_exponent);
            let card = count == w.ak_cap_s
                && w.set_size == a.len()
                && w.c_exponent >= 0.0
                && bound >= a.len() as f64 * (1.0 - EXPONENT_TOLERANCE);
            v.push(
                "cardinality",
                card,
                format!("|A_k ∩ S| = {count}, recorded {}, e = {}", w.ak_cap_s, w.c_exponent),
            );
            let cosets = left_coset_count(a, &s);
            v.push("cosets", cosets == w.coset_count, format!("{cosets} left cosets"));
            if require_normal {
                v.push("u_r_normal_in_generated", u_r.is_normal_in(&n), String::new());
            }
        }
    }
    Ok(v)
}
