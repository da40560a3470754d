//! Capturing `U_R(K)` inside a bounded product set `A_k` over `K = F_p`.
//!
//! Every captured element carries an explicit word length in `A ∪ A^-1`, and
//! the lengths add up exactly as the constructions compose them: products add
//! lengths, `φ_g(x) = [g, x]` costs `2|g| + 2|x|`. The realized `k` is the
//! largest such length, and it is certified against a breadth-first word-length
//! table of `<A>`.
//!
//! Levels follow the lower central series `U = U^0 > U^1 > ... > U^s = 1`.
//! The weight subgroups of height `i` live in `U^{i-1}` and span it modulo
//! `U^i`; `P_i` denotes the product of the root subgroups of height `i`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::AlgebraError;
use crate::group::{lower_central_series, Group, QuotientGroup};
use crate::matrix::GroupElement;
use crate::set::ElementSet;
use crate::setcalc::{Ratio, SetCalcError, WordLengths};
use crate::torus_roots::{standard_form, weight_decompose, RootDatum, RootError};
use crate::unipotent::{algebra_from_group, LieError, NilpotentAlgebra};

/// Default bound on the realized product length.
pub const DEFAULT_K_MAX: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescentError {
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    SetCalc(#[from] SetCalcError),
    #[error("set is not inside U·T")]
    NotInAmbient,
    #[error("<A> does not contain U(K)")]
    MissingUnipotent,
    #[error("level {level}: {reason}")]
    Precondition { level: usize, reason: String },
    #[error("no element of A_{depth} lies outside every root kernel")]
    NoActor { depth: usize },
    #[error("level {level}: φ_g is not injective on P_i U^i / U^i")]
    NotInjective { level: usize },
    #[error("level {level}: the height-{level} root products are not reached")]
    NotCovered { level: usize },
    #[error("realized k = {k} exceeds K_max = {k_max}; A_K_max covers {covered:?} of U_R")]
    KMaxExceeded { k: usize, k_max: usize, covered: Ratio },
    #[error("certification failed: {0}")]
    Certification(String),
}

impl From<AlgebraError> for DescentError {
    fn from(e: AlgebraError) -> Self {
        DescentError::Root(e.into())
    }
}

impl From<LieError> for DescentError {
    fn from(e: LieError) -> Self {
        DescentError::Root(e.into())
    }
}

/// A group element with the length of a word in `A ∪ A^-1` that spells it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    pub elem: GroupElement,
    pub len: usize,
}

impl Word {
    fn mul(&self, other: &Word) -> Word {
        Word { elem: self.elem.mul_unchecked(&other.elem), len: self.len + other.len }
    }

    /// `φ_g(x) = [g, x]`.
    fn phi(g: &Word, x: &Word) -> Word {
        Word { elem: g.elem.commutator(&x.elem), len: 2 * g.len + 2 * x.len }
    }
}

fn max_len(words: &[Word]) -> usize {
    words.iter().map(|w| w.len).max().unwrap_or(0)
}

fn to_set(like: &Group, words: &[Word]) -> ElementSet {
    let mut s = ElementSet::new(like.ctx(), like.dim());
    for w in words {
        s.insert(w.elem.clone());
    }
    s
}

#[derive(Clone, Debug)]
pub struct DescentConfig {
    pub k_max: usize,
    /// Depth of the `A_k` sweep in [`check_hypotheses`].
    pub hypothesis_depth: usize,
    /// The actor `g` outside every root kernel is the shortest such word of
    /// length at most this.
    pub actor_depth: usize,
}

impl Default for DescentConfig {
    fn default() -> Self {
        DescentConfig { k_max: DEFAULT_K_MAX, hypothesis_depth: 3, actor_depth: usize::MAX }
    }
}

/// A set `A` inside `G = U T` with `U(K) ⊆ <A>`, and the subgroups the descent walks through.
#[derive(Clone, Debug)]
pub struct DescentInstance {
    pub datum: RootDatum,
    pub a: ElementSet,
    pub words: WordLengths,
    /// `U^0 = U, U^1, ..., U^s = 1`.
    pub series: Vec<Group>,
    /// `V^0 = U_R, V^1, ...` ending in the trivial group.
    pub v_series: Vec<Group>,
    /// `P_i U^i` for `i = 1..=s`, stored at index `i - 1`.
    heights: Vec<Group>,
    cap: usize,
}

impl DescentInstance {
    /// Takes `U = <A> ∩ U_r(K)` and the torus generated by the diagonal parts of `A`.
    pub fn from_set(a: &ElementSet, cap: usize) -> Result<Self, DescentError> {
        let h = Group::generate(a.ctx(), a.dim(), a.to_vec(), cap)?;
        if h.elements().iter().any(|g| !g.is_upper_triangular()) {
            return Err(DescentError::NotInAmbient);
        }
        let u = Group::from_set(&h.elements().filter(|g| g.is_unitriangular()))?;
        let mut torus = Group::trivial(a.ctx(), a.dim());
        for g in a.iter() {
            torus.adjoin(GroupElement::diagonal(a.ctx(), &g.diag())?, cap)?;
        }
        let datum = weight_decompose(&u, torus.gens())?;
        Self::new(a, datum, cap)
    }

    pub fn new(a: &ElementSet, datum: RootDatum, cap: usize) -> Result<Self, DescentError> {
        let ambient = datum.ambient(cap)?;
        let words = WordLengths::new(a, cap)?;
        if !words.elements().iter().all(|g| ambient.contains(g)) {
            return Err(DescentError::NotInAmbient);
        }
        if !datum.unipotent.elements().iter().all(|u| words.len_of(u).is_some()) {
            return Err(DescentError::MissingUnipotent);
        }
        let series = lower_central_series(&datum.unipotent, cap)?;
        let v_series = lower_central_series(&datum.u_r, cap)?;
        let mut heights = Vec::new();
        for (i, term) in series.iter().enumerate().skip(1) {
            let mut gens: Vec<GroupElement> = datum
                .roots
                .iter()
                .map(|&l| &datum.weight_subgroups[l])
                .filter(|w| w.height == i)
                .map(|w| w.at(1))
                .collect();
            gens.extend(term.gens().iter().cloned());
            heights.push(Group::generate(datum.ctx(), datum.r(), gens, cap)?);
        }
        Ok(DescentInstance { datum, a: a.clone(), words, series, v_series, heights, cap })
    }

    /// Number of nontrivial terms `s` of the lower central series of `U`.
    pub fn series_length(&self) -> usize {
        self.series.len() - 1
    }

    fn u(&self, i: usize) -> &Group {
        &self.series[i.min(self.series.len() - 1)]
    }

    fn join(&self, a: &Group, b: &Group) -> Result<Group, DescentError> {
        Ok(a.join(b, self.cap)?)
    }

    /// `U_R U^j`.
    fn ur_mod(&self, j: usize) -> Result<Group, DescentError> {
        self.join(&self.datum.u_r, self.u(j))
    }

    /// `H_j = E U^{j-1}` with `E = T U_Λ`.
    fn h_group(&self, j: usize) -> Result<Group, DescentError> {
        let mut gens = self.datum.torus.gens().to_vec();
        gens.extend(self.datum.u_lambda.gens().iter().cloned());
        gens.extend(self.u(j - 1).gens().iter().cloned());
        Ok(Group::generate(self.datum.ctx(), self.datum.r(), gens, self.cap)?)
    }

    fn outside_root_kernels(&self, g: &GroupElement) -> bool {
        self.datum.roots.iter().all(|&l| self.datum.weight_subgroups[l].character.eval(g) != 1)
    }
}

/// Keeps, for every coset of `q`, the shortest word landing in it.
fn best_per_coset(q: &QuotientGroup, words: impl IntoIterator<Item = Word>) -> Vec<Option<Word>> {
    let mut best: Vec<Option<Word>> = vec![None; q.order()];
    for w in words {
        if let Some(c) = q.coset_of(&w.elem) {
            if best[c].as_ref().is_none_or(|b| w.len < b.len) {
                best[c] = Some(w);
            }
        }
    }
    best
}

fn complete(best: Vec<Option<Word>>) -> Option<Vec<Word>> {
    best.into_iter().collect()
}

/// `{t f}` keyed modulo the kernel of `q`, shortest first.
fn extend(q: &QuotientGroup, base: &[Word], factors: &[Word]) -> Vec<Option<Word>> {
    best_per_coset(q, base.iter().flat_map(|t| factors.iter().map(move |f| t.mul(f))))
}

/// Checks `words ⊆ U_R U^j` and that `words` meets every coset of `U^i` in `P_i U^i`, `i <= j`.
fn check_captured(inst: &DescentInstance, words: &[Word], j: usize) -> Result<(), DescentError> {
    let urn = inst.ur_mod(j)?;
    if let Some(w) = words.iter().find(|w| !urn.contains(&w.elem)) {
        return Err(DescentError::Precondition {
            level: j,
            reason: format!("{:?} is outside U_R U^{j}", w.elem),
        });
    }
    for i in 1..=j.min(inst.series_length()) {
        let q = QuotientGroup::new(&inst.heights[i - 1], inst.u(i))?;
        if best_per_coset(&q, words.iter().cloned()).iter().any(Option::is_none) {
            return Err(DescentError::Precondition {
                level: i,
                reason: format!("P_{i} U^{i} / U^{i} is not covered"),
            });
        }
    }
    Ok(())
}

/// From words meeting every `P_i U^i / U^i`, `i <= j`, builds a transversal of
/// `U_R U^j / U^j`: first down the series of `U` modulo `V^1`, then down the
/// series of `U_R` through commutator bases of `V^{i-1} / V^i`.
fn ascend_words(inst: &DescentInstance, z: &[Word], j: usize) -> Result<Vec<Word>, DescentError> {
    check_captured(inst, z, j)?;
    let ctx = inst.datum.ctx();
    let r = inst.datum.r();
    if inst.datum.u_r.is_trivial() || j == 0 {
        return Ok(vec![Word { elem: GroupElement::identity(ctx, r), len: 0 }]);
    }
    let n = inst.u(j).clone();
    let urn = inst.ur_mod(j)?;
    let v1n = inst.join(&inst.v_series[1.min(inst.v_series.len() - 1)], &n)?;
    let not_covered =
        |level| DescentError::Precondition { level, reason: "transversal does not close up".into() };

    let mut t: Vec<Word> = Vec::new();
    for i in 1..=j {
        let m = inst.join(&v1n, inst.u(i))?;
        let q = QuotientGroup::new(&urn, &m)?;
        let best = if i == 1 {
            best_per_coset(&q, z.iter().cloned())
        } else {
            let factors: Vec<Word> = best_per_coset(&q, z.iter().cloned()).into_iter().flatten().collect();
            extend(&q, &t, &factors)
        };
        t = complete(best).ok_or_else(|| not_covered(i))?;
    }

    for i in 2..inst.v_series.len() {
        let m_old = inst.join(&inst.v_series[i - 1], &n)?;
        let m_new = inst.join(&inst.v_series[i], &n)?;
        if m_old.order() == m_new.order() {
            continue;
        }
        let q_old = QuotientGroup::new(&urn, &m_old)?;
        let q_new = QuotientGroup::new(&urn, &m_new)?;
        let rep: HashMap<usize, &Word> = t.iter().map(|w| (q_old.coset_of(&w.elem).unwrap(), w)).collect();
        let v_prev = inst.join(&inst.v_series[i - 2], &n)?;
        let b_side: Vec<&Word> = t.iter().filter(|w| v_prev.contains(&w.elem)).collect();
        let target = m_old.order() / m_new.order();
        let mut span = vec![q_new.coset_of(&GroupElement::identity(ctx, r)).unwrap()];
        let mut factor_sets: Vec<Vec<Word>> = Vec::new();
        'pairs: for a in &t {
            for b in &b_side {
                let c = a.elem.commutator(&b.elem);
                let kc = q_new.coset_of(&c).unwrap();
                if span.contains(&kc) {
                    continue;
                }
                let mut next = span.clone();
                let mut power = kc;
                while !span.contains(&power) {
                    next.extend(span.iter().map(|&s| q_new.mul(s, power)));
                    power = q_new.mul(power, kc);
                }
                next.sort_unstable();
                next.dedup();
                span = next;
                let p = ctx.p() as i64;
                let mut f = vec![Word { elem: GroupElement::identity(ctx, r), len: 0 }];
                for s in 1..p {
                    let a_s = rep[&q_old.coset_of(&a.elem.pow(s)).unwrap()];
                    f.push(Word::phi(a_s, b));
                }
                factor_sets.push(f);
                if span.len() == target {
                    break 'pairs;
                }
            }
        }
        if span.len() != target {
            return Err(not_covered(i));
        }
        for f in &factor_sets {
            t = extend(&q_new, &t, f).into_iter().flatten().collect();
        }
        if t.len() != q_new.order() {
            return Err(not_covered(i));
        }
    }
    Ok(t)
}

/// Given `A*` meeting every `P_i U^i / U^i` for `i <= j`, returns a subset of
/// `(A*)_k` mapping onto `U_R U^j / U^j`, with `k` counted in factors from `A*`.
pub fn ascend_products(
    inst: &DescentInstance,
    a_star: &ElementSet,
    j: usize,
) -> Result<(ElementSet, usize), DescentError> {
    let z: Vec<Word> = a_star.iter().map(|g| Word { elem: g.clone(), len: 1 }).collect();
    let t = ascend_words(inst, &z, j)?;
    Ok((to_set(&inst.datum.unipotent, &t), max_len(&t)))
}

/// Multiplies each `g` on the left by elements of `w` until every root
/// coordinate of height below `j` vanishes. `w` must meet every coset of
/// `U^{j-1}` in `U_R U^{j-1}`.
pub fn normalize_words(
    inst: &DescentInstance,
    targets: &[Word],
    w: &[Word],
    j: usize,
) -> Result<Vec<Word>, DescentError> {
    let datum = &inst.datum;
    let lookups: Vec<(QuotientGroup, Vec<Option<Word>>)> = (1..j)
        .map(|i| {
            let q = QuotientGroup::new(&inst.datum.unipotent, inst.u(i))?;
            let best = best_per_coset(&q, w.iter().cloned());
            Ok((q, best))
        })
        .collect::<Result<_, DescentError>>()?;
    let mut out = Vec::with_capacity(targets.len());
    for g in targets {
        let mut g = g.clone();
        for (i, (q, best)) in (1..j).zip(&lookups) {
            let sf = standard_form(&g.elem, datum)?;
            let mut y = GroupElement::identity(datum.ctx(), datum.r());
            for &l in &datum.roots {
                let ws = &datum.weight_subgroups[l];
                if ws.height == i {
                    y = y.mul_unchecked(&ws.at(datum.ctx().neg(sf.coeffs[l].value())));
                }
            }
            let h = q.coset_of(&y).and_then(|c| best[c].as_ref()).ok_or_else(|| {
                DescentError::Precondition { level: i, reason: "W does not cover U_R modulo U^i".into() }
            })?;
            g = h.mul(&g);
        }
        let sf = standard_form(&g.elem, datum)?;
        if datum.roots.iter().any(|&l| datum.weight_subgroups[l].height < j && !sf.coeffs[l].is_zero()) {
            return Err(DescentError::Certification("normalization left a root coordinate".into()));
        }
        out.push(g);
    }
    Ok(out)
}

/// `A†` for `A*`: same images in `G/U`, root coordinates of height `< j` zero.
/// `A*` must contain a set covering `U_R U^{j-1} / U^{j-1}`; the result lies in
/// `(A*)_k` with `k` returned.
pub fn normalize_element(
    inst: &DescentInstance,
    a_star: &ElementSet,
    j: usize,
) -> Result<(ElementSet, usize), DescentError> {
    if j <= 1 {
        return Ok((a_star.clone(), 1));
    }
    let z: Vec<Word> = a_star.iter().map(|g| Word { elem: g.clone(), len: 1 }).collect();
    let q = QuotientGroup::new(&inst.ur_mod(j - 1)?, inst.u(j - 1))?;
    let w = complete(best_per_coset(&q, z.iter().cloned()))
        .ok_or_else(|| DescentError::Precondition { level: j, reason: "A* does not contain W^j".into() })?;
    let out = normalize_words(inst, &z, &w, j)?;
    Ok((to_set(&inst.datum.unipotent, &out), max_len(&out)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum HypothesisFailure {
    /// `|A_k ∩ ker α(R)| > |A|/C`.
    KernelMass { k: usize, root: usize, count: usize },
    /// `|A_k| > C|A|`.
    Growth { k: usize, size: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisVerdict {
    pub set_size: usize,
    pub c: f64,
    /// `|A_k|` for `k = 1..=depth`.
    pub sizes: Vec<usize>,
    /// `|A_k ∩ ker α(R)|`, indexed by `k - 1` and then by root.
    pub kernel_counts: Vec<Vec<usize>>,
    pub failure: Option<HypothesisFailure>,
}

impl HypothesisVerdict {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Measures the small-kernel and no-growth hypotheses for `k = 1..=depth` and
/// reports the first one that fails.
pub fn check_hypotheses(
    inst: &DescentInstance,
    c: f64,
    depth: usize,
) -> Result<HypothesisVerdict, DescentError> {
    let n = inst.a.len() as f64;
    let levels: Vec<ElementSet> = (1..=depth.max(1)).map(|k| inst.words.ball(k)).collect();
    let mut failure = None;
    let mut kernel_counts = Vec::new();
    for (i, ak) in levels.iter().enumerate() {
        let k = i + 1;
        let counts: Vec<usize> = inst
            .datum
            .roots
            .iter()
            .map(|&l| {
                let ch = &inst.datum.weight_subgroups[l].character;
                ak.iter().filter(|g| ch.eval(g) == 1).count()
            })
            .collect();
        if failure.is_none() {
            if let Some((pos, &count)) = counts.iter().enumerate().find(|(_, &m)| m as f64 * c > n) {
                failure = Some(HypothesisFailure::KernelMass { k, root: inst.datum.roots[pos], count });
            } else if ak.len() as f64 > c * n {
                failure = Some(HypothesisFailure::Growth { k, size: ak.len() });
            }
        }
        kernel_counts.push(counts);
    }
    Ok(HypothesisVerdict {
        set_size: inst.a.len(),
        c,
        sizes: levels.iter().map(ElementSet::len).collect(),
        kernel_counts,
        failure,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub level: usize,
    /// Word length of the normalized actor `g`; zero at level 1.
    pub actor_len: usize,
    /// Number of cosets of `U^i` in `P_i U^i` on which `φ_g` was checked injective.
    pub injectivity_checked: usize,
    pub captured: usize,
    pub k: usize,
}

/// The captured set `A*` at some level, with `A* ⊆ A_{k_budget}`.
#[derive(Clone, Debug)]
pub struct DescentState {
    pub level: usize,
    pub captured: Vec<Word>,
    pub k_budget: usize,
    pub trace: Vec<LevelTrace>,
}

impl DescentState {
    pub fn captured_set(&self, inst: &DescentInstance) -> ElementSet {
        to_set(&inst.datum.unipotent, &self.captured)
    }
}

fn find_actor(inst: &DescentInstance, depth: usize) -> Result<Word, DescentError> {
    inst.words
        .iter()
        .take_while(|(_, d)| *d <= depth)
        .filter(|(g, _)| inst.outside_root_kernels(g))
        .min_by(|x, y| x.1.cmp(&y.1).then_with(|| x.0.cmp(y.0)))
        .map(|(g, len)| Word { elem: g.clone(), len })
        .ok_or(DescentError::NoActor { depth })
}

/// Checks that `φ_g` permutes the cosets of `U^i` in `P_i U^i`; returns the number checked.
fn check_injective(inst: &DescentInstance, g: &GroupElement, i: usize) -> Result<usize, DescentError> {
    let q = QuotientGroup::new(&inst.heights[i - 1], inst.u(i))?;
    let mut seen = vec![false; q.order()];
    for x in q.reps() {
        let c = q.coset_of(&g.commutator(x)).ok_or(DescentError::NotInjective { level: i })?;
        if std::mem::replace(&mut seen[c], true) {
            return Err(DescentError::NotInjective { level: i });
        }
    }
    Ok(q.order())
}

/// Builds `A* ⊆ A_k` with `A* ⊆ U_R U^j` meeting every coset of `U^i` in `P_i U^i`, `i <= j`.
///
/// Level 1 takes shortest words of `<A>` in `U_R U^1`. Each later level `l`
/// normalizes an actor `g` outside every root kernel into `E U^{l-1}`, takes
/// `φ_g^l` of the short words of `<A>` in `E U^{l-1}` for height `l`, and
/// `φ_g` of the previous capture for the lower heights.
pub fn capture_level(
    inst: &DescentInstance,
    j: usize,
    cfg: &DescentConfig,
) -> Result<DescentState, DescentError> {
    let ctx = inst.datum.ctx();
    let r = inst.datum.r();
    let j = j.min(inst.series_length());
    if inst.datum.u_r.is_trivial() || j == 0 {
        let id = Word { elem: GroupElement::identity(ctx, r), len: 0 };
        return Ok(DescentState { level: j, captured: vec![id], k_budget: 0, trace: Vec::new() });
    }
    let q1 = QuotientGroup::new(&inst.ur_mod(1)?, inst.u(1))?;
    let base = best_per_coset(&q1, inst.words.iter().map(|(g, len)| Word { elem: g.clone(), len }));
    let mut captured = complete(base)
        .ok_or(DescentError::Precondition { level: 1, reason: "<A> does not cover U_R U^1 / U^1".into() })?;
    check_captured(inst, &captured, 1)?;
    let mut trace = vec![LevelTrace {
        level: 1,
        actor_len: 0,
        injectivity_checked: 0,
        captured: captured.len(),
        k: max_len(&captured),
    }];

    for l in 2..=j {
        let w = ascend_words(inst, &captured, l - 1)?;
        let actor = find_actor(inst, cfg.actor_depth)?;
        let g = normalize_words(inst, &[actor], &w, l)?.pop().unwrap();
        let h = inst.h_group(l)?;
        if !h.contains(&g.elem) {
            return Err(DescentError::Certification(format!("actor is outside E U^{}", l - 1)));
        }
        let mut checked = 0;
        for i in 1..=l {
            checked += check_injective(inst, &g.elem, i)?;
        }

        let urn = inst.ur_mod(l)?;
        let ql = QuotientGroup::new(&inst.heights[l - 1], inst.u(l))?;
        let mut best: Vec<Option<Word>> = vec![None; ql.order()];
        let mut missing = ql.order();
        for (x, len) in inst.words.iter() {
            if missing == 0 {
                break;
            }
            if !h.contains(x) {
                continue;
            }
            let mut y = Word { elem: x.clone(), len };
            for _ in 0..l {
                y = Word::phi(&g, &y);
            }
            if !urn.contains(&y.elem) {
                continue;
            }
            if let Some(c) = ql.coset_of(&y.elem) {
                if best[c].is_none() {
                    best[c] = Some(y);
                    missing -= 1;
                }
            }
        }
        let top = complete(best).ok_or(DescentError::NotCovered { level: l })?;
        let mut next: Vec<Word> = captured.iter().map(|x| Word::phi(&g, x)).collect();
        next.extend(top);
        check_captured(inst, &next, l)?;
        captured = next;
        trace.push(LevelTrace {
            level: l,
            actor_len: g.len,
            injectivity_checked: checked,
            captured: captured.len(),
            k: max_len(&captured),
        });
    }
    let k_budget = max_len(&captured);
    Ok(DescentState { level: j, captured, k_budget, trace })
}

/// Whether the Lie algebra of each `V^{i+1}` is `[v^i, v^0]`.
pub fn v_series_compatible(inst: &DescentInstance) -> Result<bool, DescentError> {
    let ctx = inst.datum.ctx();
    let r = inst.datum.r();
    let algs: Vec<NilpotentAlgebra> =
        inst.v_series.iter().map(algebra_from_group).collect::<Result<_, _>>()?;
    for i in 0..algs.len().saturating_sub(1) {
        let brackets: Vec<_> = algs[i]
            .basis()
            .iter()
            .flat_map(|x| algs[0].basis().into_iter().map(move |y| x.bracket(&y)))
            .collect();
        let span = NilpotentAlgebra::span(ctx, r, &brackets);
        if !(span.is_subspace_of(&algs[i + 1]) && algs[i + 1].is_subspace_of(&span)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptureReport {
    pub u_r_order: usize,
    /// Realized product length of the construction.
    pub k: usize,
    /// Smallest `k` with `U_R ⊆ A_k`, measured.
    pub k_min: usize,
    pub series_length: usize,
    pub levels: Vec<LevelTrace>,
    pub hypotheses: HypothesisVerdict,
    pub v_series_compatible: bool,
}

#[derive(Clone, Debug)]
pub struct Capture {
    pub u_r: ElementSet,
    pub k: usize,
    pub words: Vec<Word>,
    pub report: CaptureReport,
}

/// Builds `U_R(K)` as explicit words of bounded length and certifies
/// `U_R(K) ⊆ A_k` elementwise.
///
/// The hypotheses are measured and reported with the given `c`; the
/// construction only needs its own witnesses, which are checked directly.
pub fn capture_ur(inst: &DescentInstance, c: f64, cfg: &DescentConfig) -> Result<Capture, DescentError> {
    let hypotheses = check_hypotheses(inst, c, cfg.hypothesis_depth)?;
    let s = inst.series_length();
    let state = capture_level(inst, s, cfg)?;
    let words = ascend_words(inst, &state.captured, s)?;
    let u_r = to_set(&inst.datum.unipotent, &words);
    if u_r != *inst.datum.u_r.elements() {
        return Err(DescentError::Certification("transversal is not U_R".into()));
    }
    let k = max_len(&words);
    let lens: Vec<usize> = u_r
        .iter()
        .map(|u| inst.words.len_of(u).ok_or(DescentError::MissingUnipotent))
        .collect::<Result<_, _>>()?;
    let k_min = lens.iter().copied().max().unwrap_or(0);
    if k > cfg.k_max {
        let covered = lens.iter().filter(|&&d| d <= cfg.k_max).count();
        return Err(DescentError::KMaxExceeded {
            k,
            k_max: cfg.k_max,
            covered: Ratio::new(covered as u64, u_r.len() as u64),
        });
    }
    if k_min > k {
        return Err(DescentError::Certification(format!("U_R is not inside A_{k}")));
    }
    let report = CaptureReport {
        u_r_order: u_r.len(),
        k,
        k_min,
        series_length: s,
        levels: state.trace,
        hypotheses,
        v_series_compatible: v_series_compatible(inst)?,
    };
    Ok(Capture { u_r, k, words, report })
}
