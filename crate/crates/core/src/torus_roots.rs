//! Weight decomposition of a unipotent group under a diagonal torus: weight
//! subgroups, roots, standard forms, `U_R`, `U_Λ`, Cartan subgroups and root
//! kernels.

use thiserror::Error;

use crate::error::AlgebraError;
use crate::field::{FieldCtx, FieldElement};
use crate::group::{centralizer, is_nilpotent, lower_central_series, Group};
use crate::matrix::GroupElement;
use crate::rng::SplitMix64;
use crate::set::DEFAULT_CAP;
use crate::unipotent::{
    algebra_from_group, exp, log, rref, upper_positions, LieError, NilpotentAlgebra, NilpotentElement,
};

/// Products `x_{R_1}(s_1)...x_{R_d}(s_d)` are enumerated exhaustively up to
/// this many; above it the factorization is checked on random samples.
pub const EXHAUSTIVE_FACTORIZATION_LIMIT: usize = 1 << 20;
const FACTORIZATION_SAMPLES: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("torus generator is not diagonal; trigonalize first (eigenvalues may need a larger field)")]
    NonDiagonalTorus,
    #[error("torus does not normalize the unipotent group")]
    NotNormalized,
    #[error("factorization check failed: {0}")]
    Factorization(String),
    #[error("element is not in U·T")]
    NotInGroup,
    #[error("root subset is empty")]
    EmptySubset,
    #[error("no weight subgroup with index {0}")]
    BadIndex(usize),
    #[error("centralizer of T in U has order {centralizer}, U_Λ has order {u_lambda}")]
    CartanMismatch { centralizer: usize, u_lambda: usize },
}

impl From<AlgebraError> for RootError {
    fn from(e: AlgebraError) -> Self {
        RootError::Lie(LieError::Algebra(e))
    }
}

/// `diag(t_1..t_r) -> prod t_i^{e_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Character {
    pub exponents: Vec<i64>,
}

impl Character {
    /// The character `t_i / t_j`.
    pub fn ratio(r: usize, i: usize, j: usize) -> Self {
        let mut exponents = vec![0; r];
        exponents[i] += 1;
        exponents[j] -= 1;
        Character { exponents }
    }

    /// Value on the diagonal of `t`; off-diagonal entries are ignored.
    pub fn eval(&self, t: &GroupElement) -> u32 {
        let ctx = t.ctx();
        let n = (ctx.order() - 1) as i64;
        let mut acc = 1;
        for (&d, &e) in t.diag().iter().zip(&self.exponents) {
            let e = e.rem_euclid(n) as u64;
            acc = ctx.mul(acc, ctx.pow(d, e));
        }
        acc
    }
}

/// A one-dimensional subgroup `{exp(s v)}` on which the torus acts by a character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSubgroup {
    pub direction: NilpotentElement,
    pub character: Character,
    pub height: usize,
}

impl WeightSubgroup {
    /// `x_R(s) = exp(s v)`.
    pub fn at(&self, s: u32) -> GroupElement {
        exp(&self.direction.scale(s)).expect("characteristic checked at construction")
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        let ctx = self.direction.ctx();
        let mut out: Vec<GroupElement> = (0..ctx.order()).map(|s| self.at(s)).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// The weight decomposition of `U` under `T`.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub unipotent: Group,
    pub torus: Group,
    pub algebra: NilpotentAlgebra,
    /// `R_1..R_d` in nondecreasing height.
    pub weight_subgroups: Vec<WeightSubgroup>,
    /// Indices of subgroups with nontrivial character on `T`.
    pub roots: Vec<usize>,
    /// Indices of subgroups centralized by `T`.
    pub lambda: Vec<usize>,
    pub u_r: Group,
    pub u_lambda: Group,
    /// Orders of the lower central series of `U`.
    pub series_orders: Vec<usize>,
    /// Whether the product map `R_1 x .. x R_d -> U` was checked on every tuple.
    pub factorization_exhaustive: bool,
}

impl RootDatum {
    pub fn ctx(&self) -> &FieldCtx {
        self.unipotent.ctx()
    }
    pub fn r(&self) -> usize {
        self.unipotent.dim()
    }
    pub fn d(&self) -> usize {
        self.weight_subgroups.len()
    }

    /// Generators of `G = U T`.
    pub fn ambient_gens(&self) -> Vec<GroupElement> {
        let mut gens = self.unipotent.gens().to_vec();
        gens.extend(self.torus.gens().iter().cloned());
        gens
    }

    pub fn ambient(&self, cap: usize) -> Result<Group, AlgebraError> {
        Group::generate(self.ctx(), self.r(), self.ambient_gens(), cap)
    }

    /// `x_{R_1}(s_1) ... x_{R_d}(s_d)`.
    pub fn product(&self, coeffs: &[u32]) -> GroupElement {
        let mut acc = GroupElement::identity(self.ctx(), self.r());
        for (w, &s) in self.weight_subgroups.iter().zip(coeffs) {
            acc = acc.mul_unchecked(&w.at(s));
        }
        acc
    }
}

fn check_torus(ctx: &FieldCtx, r: usize, gens: &[GroupElement]) -> Result<Group, RootError> {
    if gens.iter().any(|t| !t.is_diagonal()) {
        return Err(RootError::NonDiagonalTorus);
    }
    Ok(Group::generate(ctx, r, gens.to_vec(), DEFAULT_CAP)?)
}

/// Values of `t_i / t_j` on each torus generator, per coordinate `(i, j)`.
fn coordinate_weights(ctx: &FieldCtx, r: usize, torus_gens: &[GroupElement]) -> Vec<Vec<u32>> {
    upper_positions(r)
        .into_iter()
        .map(|(i, j)| {
            torus_gens.iter().map(|t| ctx.mul(t.get(i, i), ctx.inv(t.get(j, j)).unwrap())).collect()
        })
        .collect()
}

/// Projection of `alg` onto the coordinates selected by `mask`.
fn project(alg: &NilpotentAlgebra, mask: &[bool]) -> NilpotentAlgebra {
    let vecs: Vec<NilpotentElement> = alg
        .basis()
        .iter()
        .map(|x| {
            let c: Vec<u32> = x.coords().iter().zip(mask).map(|(&v, &m)| if m { v } else { 0 }).collect();
            NilpotentElement::from_coords(alg.ctx(), alg.r(), &c)
        })
        .collect();
    NilpotentAlgebra::span(alg.ctx(), alg.r(), &vecs)
}

/// Splits `U` into weight subgroups `R_1..R_d` for the torus generated by
/// `torus_gens`, compatible with the lower central series of `U`, and
/// certifies the normality chain and unique factorization.
pub fn weight_decompose(u: &Group, torus_gens: &[GroupElement]) -> Result<RootDatum, RootError> {
    let (ctx, r) = (u.ctx().clone(), u.dim());
    let torus = check_torus(&ctx, r, torus_gens)?;
    for t in torus_gens {
        if !u.gens().iter().all(|g| u.contains(&t.conj(g))) {
            return Err(RootError::NotNormalized);
        }
    }
    let algebra = algebra_from_group(u)?;
    let series = lower_central_series(u, DEFAULT_CAP)?;
    let mut levels: Vec<NilpotentAlgebra> =
        series.iter().map(algebra_from_group).collect::<Result<_, _>>()?;
    if !series.last().unwrap().is_trivial() {
        return Err(RootError::Lie(LieError::NotUnipotent));
    }
    levels.push(NilpotentAlgebra::zero(&ctx, r));

    let weights = coordinate_weights(&ctx, r, torus_gens);
    let mut classes: Vec<Vec<u32>> = Vec::new();
    for w in &weights {
        if !classes.contains(w) {
            classes.push(w.clone());
        }
    }
    let trivial = vec![1u32; torus_gens.len()];

    let mut subgroups = Vec::new();
    for (level, pair) in levels.windows(2).enumerate() {
        let (v, x) = (&pair[0], &pair[1]);
        let mut found: Vec<WeightSubgroup> = Vec::new();
        for class in &classes {
            let mask: Vec<bool> = weights.iter().map(|w| w == class).collect();
            let v_alpha = project(v, &mask);
            if !v_alpha.is_subspace_of(v) {
                return Err(RootError::NotNormalized);
            }
            let x_alpha = project(x, &mask);
            let mut spanned = x_alpha.basis();
            for cand in v_alpha.basis() {
                let mut trial = spanned.clone();
                trial.push(cand.clone());
                if NilpotentAlgebra::span(&ctx, r, &trial).dim() > spanned.len() {
                    spanned = trial;
                    let (i, j) = upper_positions(r)
                        .into_iter()
                        .zip(cand.coords())
                        .find(|&(_, c)| c != 0)
                        .map(|(pos, _)| pos)
                        .unwrap();
                    found.push(WeightSubgroup {
                        direction: cand,
                        character: Character::ratio(r, i, j),
                        height: level + 1,
                    });
                }
            }
        }
        found.sort_by(|a, b| a.direction.cmp(&b.direction));
        subgroups.extend(found);
    }

    for w in &subgroups {
        for t in torus_gens {
            let moved = log(&t.conj(&w.at(1)))?;
            if moved != w.direction.scale(w.character.eval(t)) {
                return Err(RootError::Factorization(format!("{:?} is not a weight vector", w.direction)));
            }
        }
    }
    let (roots, lambda): (Vec<usize>, Vec<usize>) = (0..subgroups.len()).partition(|&i| {
        torus_gens.iter().map(|t| subgroups[i].character.eval(t)).collect::<Vec<_>>() != trivial
    });
    let gens_of = |idx: &[usize]| -> Vec<GroupElement> { idx.iter().map(|&i| subgroups[i].at(1)).collect() };
    let u_r = Group::generate(&ctx, r, gens_of(&roots), DEFAULT_CAP)?;
    let u_lambda = Group::generate(&ctx, r, gens_of(&lambda), DEFAULT_CAP)?;

    let mut datum = RootDatum {
        unipotent: u.clone(),
        torus,
        algebra,
        weight_subgroups: subgroups,
        roots,
        lambda,
        u_r,
        u_lambda,
        series_orders: series.iter().map(Group::order).collect(),
        factorization_exhaustive: false,
    };
    certify_normal_chain(&datum, &series)?;
    datum.factorization_exhaustive = certify_factorization(&datum)?;
    Ok(datum)
}

/// Each `R_l...R_d` is a group normalized by `U T`, and the lower central
/// terms are among them.
fn certify_normal_chain(datum: &RootDatum, series: &[Group]) -> Result<(), RootError> {
    let p = datum.ctx().order() as usize;
    let d = datum.d();
    let ambient = datum.ambient_gens();
    let mut tails = Vec::with_capacity(d + 1);
    for l in 0..=d {
        let gens: Vec<GroupElement> = datum.weight_subgroups[l..].iter().map(|w| w.at(1)).collect();
        let tail = Group::generate(datum.ctx(), datum.r(), gens, DEFAULT_CAP)?;
        if tail.order() != p.pow((d - l) as u32) {
            return Err(RootError::Factorization(format!(
                "R_{}..R_d generates a group of order {}",
                l + 1,
                tail.order()
            )));
        }
        if !ambient.iter().all(|g| tail.gens().iter().all(|x| tail.contains(&g.conj(x)))) {
            return Err(RootError::Factorization(format!("R_{}..R_d is not normal", l + 1)));
        }
        tails.push(tail);
    }
    for term in series {
        if !tails.iter().any(|t| t == term) {
            return Err(RootError::Factorization(format!(
                "lower central term of order {} is not a tail product",
                term.order()
            )));
        }
    }
    Ok(())
}

/// Returns whether the check was exhaustive.
fn certify_factorization(datum: &RootDatum) -> Result<bool, RootError> {
    let q = datum.ctx().order() as usize;
    let d = datum.d();
    let u = &datum.unipotent;
    let total = q.checked_pow(d as u32).unwrap_or(usize::MAX);
    if total != u.order() {
        return Err(RootError::Factorization(format!("p^d = {total} but |U| = {}", u.order())));
    }
    if total <= EXHAUSTIVE_FACTORIZATION_LIMIT {
        let mut seen = crate::set::ElementSet::new(datum.ctx(), datum.r());
        let mut coeffs = vec![0u32; d];
        for _ in 0..total {
            let g = datum.product(&coeffs);
            if !u.contains(&g) || !seen.insert(g) {
                return Err(RootError::Factorization(format!("product at {coeffs:?} repeats")));
            }
            for c in coeffs.iter_mut() {
                *c += 1;
                if (*c as usize) < q {
                    break;
                }
                *c = 0;
            }
        }
        return Ok(true);
    }
    let mut rng = SplitMix64::new(0x5EED);
    for _ in 0..FACTORIZATION_SAMPLES {
        let coeffs: Vec<u32> = (0..d).map(|_| rng.below(q as u64) as u32).collect();
        let g = datum.product(&coeffs);
        let sf = standard_form(&g, datum)?;
        if sf.coeffs.iter().map(FieldElement::value).collect::<Vec<_>>() != coeffs {
            return Err(RootError::Factorization(format!("{coeffs:?} is not recovered")));
        }
    }
    Ok(false)
}

/// `g = x_{R_1}(s_1) ... x_{R_d}(s_d) t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardForm {
    pub coeffs: Vec<FieldElement>,
    pub torus_part: GroupElement,
}

impl StandardForm {
    pub fn recompose(&self, datum: &RootDatum) -> GroupElement {
        let s: Vec<u32> = self.coeffs.iter().map(FieldElement::value).collect();
        datum.product(&s).mul_unchecked(&self.torus_part)
    }
}

/// Coefficients of `target` in the (independent) vectors `basis`.
fn solve_in_basis(ctx: &FieldCtx, basis: &[Vec<u32>], target: &[u32]) -> Option<Vec<u32>> {
    let d = basis.len();
    let rows: Vec<Vec<u32>> =
        (0..target.len()).map(|k| basis.iter().map(|b| b[k]).chain([target[k]]).collect()).collect();
    let (rows, pivots) = rref(ctx, rows);
    if pivots.last() == Some(&d) {
        return None;
    }
    let mut sol = vec![0; d];
    for (row, &c) in rows.iter().zip(&pivots) {
        sol[c] = row[d];
    }
    Some(sol)
}

/// Recovers the standard form by peeling off one weight subgroup at a time:
/// modulo `R_{l+1}...R_d` the logarithm is a multiple of the `l`-th direction.
pub fn standard_form(g: &GroupElement, datum: &RootDatum) -> Result<StandardForm, RootError> {
    let ctx = datum.ctx();
    if g.ctx() != ctx || g.dim() != datum.r() || !g.is_upper_triangular() {
        return Err(RootError::NotInGroup);
    }
    let t = GroupElement::diagonal(ctx, &g.diag())?;
    if !datum.torus.contains(&t) {
        return Err(RootError::NotInGroup);
    }
    let mut u = g.mul_unchecked(&t.inv());
    if !datum.unipotent.contains(&u) {
        return Err(RootError::NotInGroup);
    }
    let basis: Vec<Vec<u32>> = datum.weight_subgroups.iter().map(|w| w.direction.coords()).collect();
    let mut coeffs = Vec::with_capacity(basis.len());
    for (l, w) in datum.weight_subgroups.iter().enumerate() {
        let sol = solve_in_basis(ctx, &basis[l..], &log(&u)?.coords()).ok_or(RootError::NotInGroup)?;
        let s = sol[0];
        u = w.at(s).inv().mul_unchecked(&u);
        coeffs.push(ctx.element(s));
    }
    let sf = StandardForm { coeffs, torus_part: t };
    if !u.is_identity() || sf.recompose(datum) != *g {
        return Err(RootError::Factorization("standard form does not recompose".into()));
    }
    Ok(sf)
}

/// `E = T x U_Λ`, checked against the brute-force centralizer of `T` in `U`.
pub fn compute_cartan(datum: &RootDatum) -> Result<Group, RootError> {
    let c = centralizer(&datum.unipotent, datum.torus.elements());
    if c != datum.u_lambda {
        return Err(RootError::CartanMismatch { centralizer: c.order(), u_lambda: datum.u_lambda.order() });
    }
    let mut gens = datum.torus.gens().to_vec();
    gens.extend(datum.u_lambda.gens().iter().cloned());
    let e = Group::generate(datum.ctx(), datum.r(), gens, DEFAULT_CAP)?;
    if e.order() != datum.torus.order() * datum.u_lambda.order() {
        return Err(RootError::CartanMismatch { centralizer: c.order(), u_lambda: datum.u_lambda.order() });
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct UrUlVerdict {
    pub g_order: usize,
    pub u_l_order: usize,
    pub u_r_order: usize,
    pub cartan_order: usize,
    pub u_r_times_e: usize,
    pub u_r_equals_u_l: bool,
    pub g_equals_u_r_e: bool,
}

impl UrUlVerdict {
    pub fn holds(&self) -> bool {
        self.u_r_equals_u_l && self.g_equals_u_r_e
    }
}

/// Compares `U_R` with the last lower-central term of `G = U T`, and checks
/// `G = U_R E`.
pub fn verify_ur_equals_ul(datum: &RootDatum, cap: usize) -> Result<UrUlVerdict, RootError> {
    let g = datum.ambient(cap)?;
    let series = lower_central_series(&g, cap)?;
    let u_l = series.last().unwrap();
    let e = compute_cartan(datum)?;
    let ure = datum.u_r.product_set(&e, cap)?;
    Ok(UrUlVerdict {
        g_order: g.order(),
        u_l_order: u_l.order(),
        u_r_order: datum.u_r.order(),
        cartan_order: e.order(),
        u_r_times_e: ure.len(),
        u_r_equals_u_l: *u_l == datum.u_r,
        g_equals_u_r_e: ure == *g.elements(),
    })
}

/// Number of cyclic factors of full order `q - 1` in a subgroup of the
/// diagonal torus; the finite stand-in for the dimension of the subtorus it
/// spans.
pub fn split_rank(t: &Group) -> usize {
    let n = (t.ctx().order() - 1) as u64;
    if n == 1 {
        return 0;
    }
    let mut primes = Vec::new();
    let mut m = n;
    let mut f = 2;
    while f * f <= m {
        if m.is_multiple_of(f) {
            primes.push(f);
            while m.is_multiple_of(f) {
                m /= f;
            }
        }
        f += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    primes
        .into_iter()
        .map(|l| {
            let mut img = crate::set::ElementSet::new(t.ctx(), t.dim());
            for x in t.elements() {
                img.insert(x.pow((n / l) as i64));
            }
            let mut k = 0;
            let mut size = img.len();
            while size > 1 {
                size /= l as usize;
                k += 1;
            }
            k
        })
        .min()
        .unwrap()
}

#[derive(Clone, Debug)]
pub struct RootKernel {
    pub torus: Group,
    pub group: Group,
    pub dim_before: usize,
    pub dim_after: usize,
    /// Set when the subset holds every root: whether `U T_m` is nilpotent.
    pub nilpotent: Option<bool>,
}

/// `T_m = ∩ ker_T(ξ_i)` over the chosen weight subgroups, and `G' = U T_m`.
pub fn root_kernel(datum: &RootDatum, subset: &[usize]) -> Result<RootKernel, RootError> {
    if subset.is_empty() {
        return Err(RootError::EmptySubset);
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= datum.d()) {
        return Err(RootError::BadIndex(bad));
    }
    let chars: Vec<&Character> = subset.iter().map(|&i| &datum.weight_subgroups[i].character).collect();
    let kept = datum.torus.elements().filter(|t| chars.iter().all(|c| c.eval(t) == 1));
    let torus = Group::from_set(&kept)?;
    let mut gens = datum.unipotent.gens().to_vec();
    gens.extend(torus.gens().iter().cloned());
    let group = Group::generate(datum.ctx(), datum.r(), gens, DEFAULT_CAP)?;
    let all_roots = datum.roots.iter().all(|i| subset.contains(i));
    let nilpotent = if all_roots { Some(is_nilpotent(&group, DEFAULT_CAP)?) } else { None };
    Ok(RootKernel {
        dim_before: split_rank(&datum.torus),
        dim_after: split_rank(&torus),
        torus,
        group,
        nilpotent,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PajamaVerdict {
    pub size: usize,
    pub bound: usize,
    pub tested: usize,
    pub beta_matches: bool,
}

impl PajamaVerdict {
    pub fn holds(&self) -> bool {
        self.size <= self.bound && self.beta_matches
    }
}

/// `|R(F_q)| <= q`, and `t x_R(s) t^-1 = x_R(α(t) s)` for every `t` in the torus.
pub fn pajama_check(w: &WeightSubgroup, torus: &Group) -> PajamaVerdict {
    let ctx = w.direction.ctx();
    let elems = w.elements();
    let beta_matches = torus.elements().iter().all(|t| {
        let a = w.character.eval(t);
        (0..ctx.order()).all(|s| t.conj(&w.at(s)) == w.at(ctx.mul(a, s)))
    });
    PajamaVerdict { size: elems.len(), bound: ctx.order() as usize, tested: torus.order(), beta_matches }
}

/// `u R u^-1` for `u` in `U_Λ`, checked to be a weight subgroup with the same character.
pub fn conjugate_weight_subgroup(
    datum: &RootDatum,
    index: usize,
    u: &GroupElement,
) -> Result<WeightSubgroup, RootError> {
    let w = datum.weight_subgroups.get(index).ok_or(RootError::BadIndex(index))?;
    let direction = log(&u.conj(&w.at(1)))?;
    let moved = WeightSubgroup { direction, character: w.character.clone(), height: w.height };
    for t in datum.torus.gens() {
        let lhs = log(&t.conj(&moved.at(1)))?;
        if lhs != moved.direction.scale(moved.character.eval(t)) {
            return Err(RootError::Factorization("conjugate is not a weight subgroup".into()));
        }
    }
    Ok(moved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{borel, diagonal_torus_gens, unitriangular};

    fn f(p: u32) -> FieldCtx {
        FieldCtx::prime(p).unwrap()
    }

    fn tts_gens(k: &FieldCtx) -> Vec<GroupElement> {
        let g = k.generator();
        vec![GroupElement::diagonal(k, &[g, g, 1]).unwrap(), GroupElement::diagonal(k, &[1, 1, g]).unwrap()]
    }

    #[test]
    fn full_torus_on_u3() {
        let k = f(7);
        let d = weight_decompose(&unitriangular(&k, 3), &diagonal_torus_gens(&k, 3)).unwrap();
        assert_eq!(d.d(), 3);
        assert!(d.lambda.is_empty());
        let chars: Vec<(Vec<i64>, usize)> =
            d.weight_subgroups.iter().map(|w| (w.character.exponents.clone(), w.height)).collect();
        assert!(chars.contains(&(vec![1, -1, 0], 1)));
        assert!(chars.contains(&(vec![0, 1, -1], 1)));
        assert_eq!(chars[2], (vec![1, 0, -1], 2));
        assert!(d.factorization_exhaustive);
    }

    #[test]
    fn tts_torus_splits_off_lambda() {
        let k = f(5);
        let d = weight_decompose(&unitriangular(&k, 3), &tts_gens(&k)).unwrap();
        assert_eq!(d.lambda.len(), 1);
        assert_eq!(d.weight_subgroups[d.lambda[0]].direction, NilpotentElement::unit(&k, 3, 0, 1));
        assert_eq!(d.roots.len(), 2);
        assert_eq!(d.u_r.order(), 25);
        for g in d.u_r.elements() {
            assert_eq!(g.get(0, 1), 0);
        }
    }

    #[test]
    fn abelian_unipotent_two_roots() {
        let k = f(5);
        let u = Group::generate_default(vec![
            GroupElement::transvection(&k, 3, 0, 1, 1),
            GroupElement::transvection(&k, 3, 0, 2, 1),
        ])
        .unwrap();
        let d = weight_decompose(&u, &diagonal_torus_gens(&k, 3)).unwrap();
        assert_eq!(d.roots.len(), 2);
        assert!(d.weight_subgroups.iter().all(|w| w.height == 1));
    }

    #[test]
    fn standard_forms() {
        let k = f(5);
        let u = unitriangular(&k, 2);
        let d = weight_decompose(&u, &diagonal_torus_gens(&k, 2)).unwrap();
        let g = GroupElement::from_ints(&k, &[&[2, 3], &[0, 1]]).unwrap();
        let sf = standard_form(&g, &d).unwrap();
        assert_eq!(sf.coeffs[0].value(), 3);
        assert_eq!(sf.torus_part, GroupElement::diagonal(&k, &[2, 1]).unwrap());
        let id = standard_form(&GroupElement::identity(&k, 2), &d).unwrap();
        assert!(id.coeffs.iter().all(FieldElement::is_zero) && id.torus_part.is_identity());

        let d = weight_decompose(&unitriangular(&k, 3), &tts_gens(&k)).unwrap();
        let g = d.ambient(DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), 125 * 16);
        for x in g.elements() {
            assert_eq!(standard_form(x, &d).unwrap().recompose(&d), *x);
        }
        let outside = GroupElement::diagonal(&k, &[2, 1, 1]).unwrap();
        assert_eq!(standard_form(&outside, &d), Err(RootError::NotInGroup));
    }

    #[test]
    fn cartan_subgroups() {
        let k = f(5);
        let d = weight_decompose(&unitriangular(&k, 3), &tts_gens(&k)).unwrap();
        let e = compute_cartan(&d).unwrap();
        assert_eq!(e.order(), 16 * 5);
        let d = weight_decompose(&unitriangular(&k, 3), &diagonal_torus_gens(&k, 3)).unwrap();
        assert_eq!(compute_cartan(&d).unwrap(), d.torus);
        let u = Group::generate_default(vec![
            GroupElement::transvection(&k, 3, 0, 1, 1),
            GroupElement::transvection(&k, 3, 0, 2, 1),
        ])
        .unwrap();
        let d = weight_decompose(&u, &[]).unwrap();
        assert_eq!(compute_cartan(&d).unwrap(), u);
    }

    #[test]
    fn ur_equals_ul() {
        let k = f(5);
        let d = weight_decompose(&unitriangular(&k, 2), &diagonal_torus_gens(&k, 2)).unwrap();
        let v = verify_ur_equals_ul(&d, DEFAULT_CAP).unwrap();
        assert!(v.holds());
        assert_eq!((v.u_l_order, v.g_order), (5, borel(&k, 2).order()));

        let d = weight_decompose(&unitriangular(&k, 3), &[GroupElement::diagonal(&k, &[2, 2, 2]).unwrap()])
            .unwrap();
        let v = verify_ur_equals_ul(&d, DEFAULT_CAP).unwrap();
        assert!(v.holds() && v.u_r_order == 1);

        let d = weight_decompose(&unitriangular(&k, 3), &tts_gens(&k)).unwrap();
        let v = verify_ur_equals_ul(&d, DEFAULT_CAP).unwrap();
        assert!(v.holds() && v.u_l_order == 25);
    }

    #[test]
    fn kernels_drop_dimension() {
        let k = f(5);
        let d = weight_decompose(&unitriangular(&k, 3), &tts_gens(&k)).unwrap();
        let r23 = d
            .roots
            .iter()
            .copied()
            .find(|&i| d.weight_subgroups[i].direction == NilpotentElement::unit(&k, 3, 1, 2))
            .unwrap();
        let ker = root_kernel(&d, &[r23]).unwrap();
        assert_eq!((ker.dim_before, ker.dim_after), (2, 1));
        assert!(ker.torus.elements().iter().all(|t| t.diag().windows(2).all(|w| w[0] == w[1])));
        assert_eq!(ker.torus.order(), 4);

        let d = weight_decompose(&unitriangular(&k, 3), &diagonal_torus_gens(&k, 3)).unwrap();
        let ker = root_kernel(&d, &d.roots.clone()).unwrap();
        assert_eq!((ker.dim_before, ker.dim_after), (3, 1));
        assert_eq!(ker.nilpotent, Some(true));
        assert_eq!(root_kernel(&d, &[]).unwrap_err(), RootError::EmptySubset);
    }

    #[test]
    fn pajama() {
        let k = f(5);
        let d = weight_decompose(&unitriangular(&k, 2), &diagonal_torus_gens(&k, 2)).unwrap();
        let v = pajama_check(&d.weight_subgroups[0], &d.torus);
        assert!(v.holds());
        assert_eq!((v.size, v.tested), (5, 16));
        let trivial = WeightSubgroup {
            direction: NilpotentElement::zero(&k, 2),
            character: Character::ratio(2, 0, 1),
            height: 1,
        };
        assert_eq!(pajama_check(&trivial, &d.torus).size, 1);
    }

    #[test]
    fn lambda_conjugation_keeps_character() {
        let k = f(5);
        let d = weight_decompose(&unitriangular(&k, 3), &tts_gens(&k)).unwrap();
        for u in d.u_lambda.elements() {
            for &i in &d.roots {
                conjugate_weight_subgroup(&d, i, u).unwrap();
            }
        }
    }

    #[test]
    fn rejects_bad_torus() {
        let k = f(5);
        let u = unitriangular(&k, 2);
        let swap = GroupElement::from_ints(&k, &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(weight_decompose(&u, &[swap]).unwrap_err(), RootError::NonDiagonalTorus);
        let h = Group::generate_default(vec![GroupElement::transvection(&k, 3, 0, 1, 1)]).unwrap();
        let t = GroupElement::diagonal(&k, &[1, 2, 1]).unwrap();
        assert!(weight_decompose(&h, std::slice::from_ref(&t)).is_ok());
        let h =
            Group::generate_default(vec![
                GroupElement::from_ints(&k, &[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]).unwrap()
            ])
            .unwrap();
        assert_eq!(weight_decompose(&h, &[t]).unwrap_err(), RootError::NotNormalized);
    }
}
