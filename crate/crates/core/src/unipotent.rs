//! Truncated exponential and logarithm between strictly upper-triangular
//! matrices and unitriangular groups, valid when `p > r`.

use thiserror::Error;

use crate::error::AlgebraError;
use crate::field::{FieldCtx, FieldElement};
use crate::group::{lower_central_series, Group};
use crate::matrix::{GroupElement, Matrix};
use crate::rng::SplitMix64;
use crate::set::{ElementSet, DEFAULT_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("characteristic {p} must exceed the matrix dimension {r}")]
    Characteristic { p: u32, r: usize },
    #[error("matrix is not strictly upper triangular")]
    NotNilpotent,
    #[error("matrix is not unitriangular")]
    NotUnipotent,
    #[error("Lie reconstruction needs a prime field, got extension degree {0}")]
    ExtensionField(usize),
    #[error("polycyclic chain construction failed: {0}")]
    Chain(String),
    #[error("span of logarithms is not closed under the bracket")]
    BracketNotClosed,
    #[error("exp of the algebra gives {got} group elements, expected {expected}")]
    ExpImage { expected: usize, got: usize },
    #[error("commutators do not commute with the ambient group")]
    NotCentral,
    #[error("commutator group is trivial")]
    TrivialCommutator,
    #[error("commutator set differs from {{1 + k[a,b]}}")]
    CommutatorShape,
    #[error("not an ideal: {0}")]
    NotIdeal(String),
    #[error("exp(v + u) != exp(v) exp(u') after adjustment")]
    BchMismatch,
}

/// Strictly upper-triangular positions `(i, j)`, `i < j`, row by row.
pub fn upper_positions(r: usize) -> Vec<(usize, usize)> {
    (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect()
}

/// A strictly upper-triangular matrix, an element of the Lie algebra of the
/// unitriangular group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NilpotentElement(Matrix);

impl NilpotentElement {
    pub fn new(m: Matrix) -> Result<Self, LieError> {
        if !m.is_strictly_upper() {
            return Err(LieError::NotNilpotent);
        }
        Ok(NilpotentElement(m))
    }

    pub fn zero(ctx: &FieldCtx, r: usize) -> Self {
        NilpotentElement(Matrix::zero(ctx, r))
    }

    /// `E_{ij}` for `i < j`.
    pub fn unit(ctx: &FieldCtx, r: usize, i: usize, j: usize) -> Self {
        assert!(i < j && j < r);
        NilpotentElement(Matrix::unit(ctx, r, i, j))
    }

    pub fn from_ints(ctx: &FieldCtx, rows: &[&[i64]]) -> Result<Self, LieError> {
        Self::new(Matrix::from_ints(ctx, rows)?)
    }

    /// Inverse of [`coords`](Self::coords).
    pub fn from_coords(ctx: &FieldCtx, r: usize, coords: &[u32]) -> Self {
        let mut m = Matrix::zero(ctx, r);
        for (&(i, j), &c) in upper_positions(r).iter().zip(coords) {
            m.set(i, j, c);
        }
        NilpotentElement(m)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
    pub fn ctx(&self) -> &FieldCtx {
        self.0.ctx()
    }
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Entries above the diagonal in [`upper_positions`] order.
    pub fn coords(&self) -> Vec<u32> {
        upper_positions(self.dim()).into_iter().map(|(i, j)| self.0.get(i, j)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        NilpotentElement(self.0.add(&other.0))
    }
    pub fn sub(&self, other: &Self) -> Self {
        NilpotentElement(self.0.sub(&other.0))
    }
    pub fn neg(&self) -> Self {
        NilpotentElement(self.0.neg())
    }
    pub fn scale(&self, c: u32) -> Self {
        NilpotentElement(self.0.scale(c))
    }
    pub fn bracket(&self, other: &Self) -> Self {
        NilpotentElement(self.0.bracket(&other.0))
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

fn check_char(ctx: &FieldCtx, r: usize) -> Result<(), LieError> {
    if (ctx.p() as usize) <= r {
        return Err(LieError::Characteristic { p: ctx.p(), r });
    }
    Ok(())
}

/// `1/i!` for `i < r`.
fn inv_factorials(ctx: &FieldCtx, r: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(r);
    let mut f = 1u32;
    for i in 0..r {
        if i > 0 {
            f = ctx.mul(f, ctx.from_int(i as i64));
        }
        out.push(ctx.inv(f).expect("p > r"));
    }
    out
}

/// `sum_{i<r} X^i / i!`.
pub fn exp(x: &NilpotentElement) -> Result<GroupElement, LieError> {
    let (ctx, r) = (x.ctx(), x.dim());
    check_char(ctx, r)?;
    let inv_fact = inv_factorials(ctx, r);
    let mut acc = Matrix::identity(ctx, r);
    let mut power = Matrix::identity(ctx, r);
    for c in inv_fact.iter().skip(1) {
        power = power.mul_unchecked(&x.0);
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power.scale(*c));
    }
    Ok(GroupElement::from_matrix_unchecked(acc))
}

/// `sum_{i>=1} (-1)^{i+1} (u-1)^i / i`, truncated at `r`.
pub fn log(u: &GroupElement) -> Result<NilpotentElement, LieError> {
    let (ctx, r) = (u.ctx(), u.dim());
    if !u.is_unitriangular() {
        return Err(LieError::NotUnipotent);
    }
    check_char(ctx, r)?;
    let n = u.matrix().sub(&Matrix::identity(ctx, r));
    let mut acc = Matrix::zero(ctx, r);
    let mut power = Matrix::identity(ctx, r);
    for i in 1..r {
        power = power.mul_unchecked(&n);
        if power.is_zero() {
            break;
        }
        let mut c = ctx.inv(ctx.from_int(i as i64)).expect("p > r");
        if i % 2 == 0 {
            c = ctx.neg(c);
        }
        acc = acc.add(&power.scale(c));
    }
    Ok(NilpotentElement(acc))
}

/// `exp(tX)`.
pub fn one_param(x: &NilpotentElement, t: &FieldElement) -> Result<GroupElement, LieError> {
    if t.ctx() != x.ctx() {
        return Err(AlgebraError::ContextMismatch.into());
    }
    exp(&x.scale(t.value()))
}

/// The one-parameter subgroup `{exp(tX) : t in F_q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneParamSubgroup {
    pub direction: NilpotentElement,
}

impl OneParamSubgroup {
    pub fn new(direction: NilpotentElement) -> Self {
        OneParamSubgroup { direction }
    }

    pub fn at(&self, t: u32) -> Result<GroupElement, LieError> {
        exp(&self.direction.scale(t))
    }

    pub fn elements(&self) -> Result<ElementSet, LieError> {
        let ctx = self.direction.ctx();
        let mut out = ElementSet::new(ctx, self.direction.dim());
        for t in 0..ctx.order() {
            out.insert(self.at(t)?);
        }
        Ok(out)
    }
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub(crate) fn rref(ctx: &FieldCtx, mut rows: Vec<Vec<u32>>) -> (Vec<Vec<u32>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(found) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, found);
        let inv = ctx.inv(rows[rank][col]).unwrap();
        for v in rows[rank].iter_mut() {
            *v = ctx.mul(*v, inv);
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let f = row[col];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v = ctx.sub(*v, ctx.mul(f, pv));
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// A subspace of strictly upper-triangular matrices, held as an echelonized basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentAlgebra {
    ctx: FieldCtx,
    r: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl NilpotentAlgebra {
    pub fn zero(ctx: &FieldCtx, r: usize) -> Self {
        NilpotentAlgebra { ctx: ctx.clone(), r, rows: Vec::new(), pivots: Vec::new() }
    }

    /// Linear span of `vectors`. Does not check bracket closure.
    pub fn span(ctx: &FieldCtx, r: usize, vectors: &[NilpotentElement]) -> Self {
        let rows: Vec<Vec<u32>> = vectors.iter().map(NilpotentElement::coords).collect();
        if rows.is_empty() {
            return Self::zero(ctx, r);
        }
        let (rows, pivots) = rref(ctx, rows);
        NilpotentAlgebra { ctx: ctx.clone(), r, rows, pivots }
    }

    /// All strictly upper-triangular matrices.
    pub fn full(ctx: &FieldCtx, r: usize) -> Self {
        let units: Vec<_> =
            upper_positions(r).into_iter().map(|(i, j)| NilpotentElement::unit(ctx, r, i, j)).collect();
        Self::span(ctx, r, &units)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> Vec<NilpotentElement> {
        self.rows.iter().map(|c| NilpotentElement::from_coords(&self.ctx, self.r, c)).collect()
    }

    /// Coefficients of `x` in [`basis`](Self::basis), if `x` lies in the span.
    pub fn coords(&self, x: &NilpotentElement) -> Option<Vec<u32>> {
        let mut rest = x.coords();
        let mut out = Vec::with_capacity(self.dim());
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = rest[piv];
            for (v, &rv) in rest.iter_mut().zip(row) {
                *v = self.ctx.sub(*v, self.ctx.mul(c, rv));
            }
            out.push(c);
        }
        rest.iter().all(|&v| v == 0).then_some(out)
    }

    pub fn contains(&self, x: &NilpotentElement) -> bool {
        self.coords(x).is_some()
    }

    pub fn combine(&self, coeffs: &[u32]) -> NilpotentElement {
        let ncols = upper_positions(self.r).len();
        let mut v = vec![0u32; ncols];
        for (row, &c) in self.rows.iter().zip(coeffs) {
            for (x, &rv) in v.iter_mut().zip(row) {
                *x = self.ctx.add(*x, self.ctx.mul(c, rv));
            }
        }
        NilpotentElement::from_coords(&self.ctx, self.r, &v)
    }

    /// Every element, `q^dim` of them.
    pub fn enumerate(&self) -> Vec<NilpotentElement> {
        let q = self.ctx.order();
        let total = (q as usize).pow(self.dim() as u32);
        let mut out = Vec::with_capacity(total);
        let mut coeffs = vec![0u32; self.dim()];
        for _ in 0..total {
            out.push(self.combine(&coeffs));
            for c in coeffs.iter_mut() {
                *c += 1;
                if *c < q {
                    break;
                }
                *c = 0;
            }
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.basis().iter().all(|x| other.contains(x))
    }

    pub fn is_bracket_closed(&self) -> bool {
        let b = self.basis();
        b.iter().enumerate().all(|(i, x)| b[i + 1..].iter().all(|y| self.contains(&x.bracket(y))))
    }

    pub fn is_abelian(&self) -> bool {
        let b = self.basis();
        b.iter().enumerate().all(|(i, x)| b[i + 1..].iter().all(|y| x.bracket(y).is_zero()))
    }

    /// `self ⊆ ambient` and `[ambient, self] ⊆ self`.
    pub fn is_ideal_in(&self, ambient: &Self) -> bool {
        let mine = self.basis();
        self.is_subspace_of(ambient)
            && ambient.basis().iter().all(|y| mine.iter().all(|x| self.contains(&y.bracket(x))))
    }

    /// `exp` of every element.
    pub fn exp_image(&self) -> Result<ElementSet, LieError> {
        let mut out = ElementSet::new(&self.ctx, self.r);
        for x in self.enumerate() {
            out.insert(exp(&x)?);
        }
        Ok(out)
    }
}

fn check_unipotent_prime(h: &Group) -> Result<(), LieError> {
    if h.ctx().a() != 1 {
        return Err(LieError::ExtensionField(h.ctx().a()));
    }
    check_char(h.ctx(), h.dim())?;
    if !h.elements().iter().all(|g| g.is_unitriangular()) {
        return Err(LieError::NotUnipotent);
    }
    Ok(())
}

/// Elements `g_1, .., g_c` of `H` with `|<g_1..g_e>| = p^e`, compatible with
/// the lower central series: every term of the series is generated by a
/// prefix of the chain. Candidates are taken in canonical order,
/// or uniformly at random when `rng` is given.
pub fn polycyclic_chain(h: &Group, mut rng: Option<&mut SplitMix64>) -> Result<Vec<GroupElement>, LieError> {
    check_unipotent_prime(h)?;
    let p = h.ctx().p() as usize;
    let series = lower_central_series(h, DEFAULT_CAP)?;
    let mut k = Group::trivial(h.ctx(), h.dim());
    let mut chain = Vec::new();
    for term in series.iter().rev() {
        while k.order() < term.order() {
            let outside: Vec<GroupElement> =
                term.elements().sorted().into_iter().filter(|g| !k.contains(g)).collect();
            let g = match rng.as_deref_mut() {
                Some(rng) => rng.pick(&outside).clone(),
                None => outside[0].clone(),
            };
            let before = k.order();
            k.adjoin(g.clone(), DEFAULT_CAP)?;
            if k.order() != before * p {
                return Err(LieError::Chain(format!("adjoining {g:?} took order {before} to {}", k.order())));
            }
            chain.push(g);
        }
    }
    Ok(chain)
}

/// The Lie algebra of a unitriangular `p`-group over `F_p`, as the span of
/// the logarithms of a polycyclic chain. Bracket closure and
/// `exp(algebra) = H` are checked exhaustively.
pub fn algebra_from_group(h: &Group) -> Result<NilpotentAlgebra, LieError> {
    algebra_from_chain(h, polycyclic_chain(h, None)?)
}

/// As [`algebra_from_group`], with the chain drawn at random.
pub fn algebra_from_group_with_rng(h: &Group, rng: &mut SplitMix64) -> Result<NilpotentAlgebra, LieError> {
    algebra_from_chain(h, polycyclic_chain(h, Some(rng))?)
}

fn algebra_from_chain(h: &Group, chain: Vec<GroupElement>) -> Result<NilpotentAlgebra, LieError> {
    let logs: Vec<NilpotentElement> = chain.iter().map(log).collect::<Result<_, _>>()?;
    let alg = NilpotentAlgebra::span(h.ctx(), h.dim(), &logs);
    if alg.dim() != chain.len() {
        return Err(LieError::Chain(format!(
            "{} chain elements have a {}-dimensional log span",
            chain.len(),
            alg.dim()
        )));
    }
    if !alg.is_bracket_closed() {
        return Err(LieError::BracketNotClosed);
    }
    let image = alg.exp_image()?;
    let inside = image.iter().filter(|g| h.contains(g)).count();
    if inside != h.order() || image.len() != h.order() {
        return Err(LieError::ExpImage { expected: h.order(), got: inside });
    }
    Ok(alg)
}

/// The commutator group of `exp(F_q a)` and `exp(F_q b)` when it is central
/// in `ambient`: certified to be the set of commutators and equal to
/// `{1 + k[a,b]}`.
pub fn comm_one_param(
    a: &NilpotentElement,
    b: &NilpotentElement,
    ambient: &Group,
) -> Result<OneParamSubgroup, LieError> {
    let ctx = a.ctx();
    if b.ctx() != ctx || ambient.ctx() != ctx {
        return Err(AlgebraError::ContextMismatch.into());
    }
    let q = ctx.order();
    let mut comms = ElementSet::new(ctx, a.dim());
    for s in 0..q {
        let x = exp(&a.scale(s))?;
        for t in 0..q {
            comms.insert(x.commutator(&exp(&b.scale(t))?));
        }
    }
    if comms.len() == 1 {
        return Err(LieError::TrivialCommutator);
    }
    let central =
        comms.iter().all(|c| ambient.gens().iter().all(|g| g.mul_unchecked(c) == c.mul_unchecked(g)));
    if !central {
        return Err(LieError::NotCentral);
    }
    let dir = a.bracket(b);
    let id = Matrix::identity(ctx, a.dim());
    let mut line = ElementSet::new(ctx, a.dim());
    for k in 0..q {
        line.insert(GroupElement::new(id.add(&dir.matrix().scale(k)))?);
    }
    if line != comms {
        return Err(LieError::CommutatorShape);
    }
    Ok(OneParamSubgroup::new(dir))
}

/// Given `u` in an ideal of the algebra spanned by the ideal and `v`, returns
/// `u'` in the ideal with `exp(v + u) = exp(v) exp(u')`.
pub fn bch_adjust(
    u: &NilpotentElement,
    v: &NilpotentElement,
    ideal: &NilpotentAlgebra,
) -> Result<NilpotentElement, LieError> {
    if !ideal.contains(u) {
        return Err(LieError::NotIdeal("u is not in the ideal".into()));
    }
    if !ideal.is_bracket_closed() {
        return Err(LieError::NotIdeal("ideal is not a subalgebra".into()));
    }
    if !ideal.basis().iter().all(|x| ideal.contains(&v.bracket(x))) {
        return Err(LieError::NotIdeal("[v, ideal] leaves the ideal".into()));
    }
    let target = exp(&v.add(u))?;
    let adjusted = log(&exp(&v.neg())?.mul_unchecked(&target))?;
    if !ideal.contains(&adjusted) || exp(v)?.mul_unchecked(&exp(&adjusted)?) != target {
        return Err(LieError::BchMismatch);
    }
    Ok(adjusted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::unitriangular;

    fn f(p: u32) -> FieldCtx {
        FieldCtx::prime(p).unwrap()
    }

    #[test]
    fn exp_and_log_examples() {
        let k = f(7);
        let x = NilpotentElement::from_ints(&k, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]).unwrap();
        let u = exp(&x).unwrap();
        assert_eq!(u, GroupElement::from_ints(&k, &[&[1, 1, 4], &[0, 1, 1], &[0, 0, 1]]).unwrap());
        assert_eq!(log(&u).unwrap(), x);
        let e12 = NilpotentElement::unit(&k, 3, 0, 1);
        assert_eq!(exp(&e12).unwrap(), GroupElement::transvection(&k, 3, 0, 1, 1));
        assert!(exp(&NilpotentElement::zero(&k, 3)).unwrap().is_identity());
        assert!(log(&GroupElement::identity(&k, 3)).unwrap().is_zero());
        let d = GroupElement::diagonal(&k, &[2, 1, 1]).unwrap();
        assert_eq!(log(&d), Err(LieError::NotUnipotent));
        let k3 = f(3);
        assert_eq!(exp(&NilpotentElement::unit(&k3, 3, 0, 1)), Err(LieError::Characteristic { p: 3, r: 3 }));
    }

    #[test]
    fn exp_log_bijection_on_u3_f5() {
        let k = f(5);
        let u = unitriangular(&k, 3);
        assert_eq!(u.order(), 125);
        for g in u.elements() {
            assert_eq!(&exp(&log(g).unwrap()).unwrap(), g);
        }
        let alg = NilpotentAlgebra::full(&k, 3);
        for x in alg.enumerate() {
            assert_eq!(log(&exp(&x).unwrap()).unwrap(), x);
            assert_eq!(exp(&x.neg()).unwrap(), exp(&x).unwrap().inv());
        }
    }

    #[test]
    fn one_param_is_additive() {
        let k = f(5);
        let x = NilpotentElement::from_ints(&k, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]).unwrap();
        for t1 in 0..5 {
            for t2 in 0..5 {
                let (a, b) = (k.element(t1), k.element(t2));
                let sum = one_param(&x, &a.add(&b).unwrap()).unwrap();
                let prod = one_param(&x, &a).unwrap().mul_unchecked(&one_param(&x, &b).unwrap());
                assert_eq!(sum, prod);
            }
        }
        assert!(one_param(&x, &k.element(0)).unwrap().is_identity());
        assert_eq!(one_param(&x, &k.element(1)).unwrap(), exp(&x).unwrap());
    }

    #[test]
    fn algebra_from_group_examples() {
        let k = f(5);
        let h = Group::generate_default(vec![GroupElement::transvection(&k, 2, 0, 1, 1)]).unwrap();
        let alg = algebra_from_group(&h).unwrap();
        assert_eq!(alg.dim(), 1);
        assert_eq!(alg.basis(), vec![NilpotentElement::unit(&k, 2, 0, 1)]);

        let u = unitriangular(&k, 3);
        let alg = algebra_from_group(&u).unwrap();
        assert_eq!(alg.dim(), 3);
        assert_eq!(alg.exp_image().unwrap(), *u.elements());

        let h = Group::generate_default(vec![
            GroupElement::transvection(&k, 3, 0, 1, 1),
            GroupElement::transvection(&k, 3, 0, 2, 1),
        ])
        .unwrap();
        let alg = algebra_from_group(&h).unwrap();
        assert_eq!(alg.dim(), 2);
        assert!(alg.is_abelian());
    }

    #[test]
    fn algebra_is_independent_of_chain() {
        let k = f(7);
        let u = unitriangular(&k, 3);
        let base = algebra_from_group(&u).unwrap();
        let mut rng = SplitMix64::new(11);
        for _ in 0..3 {
            assert_eq!(algebra_from_group_with_rng(&u, &mut rng).unwrap(), base);
        }
    }

    #[test]
    fn algebra_rejects_bad_inputs() {
        let k = f(5);
        let h = Group::generate_default(vec![GroupElement::diagonal(&k, &[2, 1]).unwrap()]).unwrap();
        assert_eq!(algebra_from_group(&h), Err(LieError::NotUnipotent));
        let k9 = FieldCtx::new(3, 2, None).unwrap();
        let h = Group::generate_default(vec![GroupElement::transvection(&k9, 2, 0, 1, 1)]).unwrap();
        assert_eq!(algebra_from_group(&h), Err(LieError::ExtensionField(2)));
    }

    #[test]
    fn commutator_of_root_lines() {
        let k = f(5);
        let u = unitriangular(&k, 3);
        let (e12, e23) = (NilpotentElement::unit(&k, 3, 0, 1), NilpotentElement::unit(&k, 3, 1, 2));
        let c = comm_one_param(&e12, &e23, &u).unwrap();
        assert_eq!(c.direction, NilpotentElement::unit(&k, 3, 0, 2));
        assert_eq!(c.elements().unwrap().len(), 5);
        let g = exp(&e12.scale(2)).unwrap().commutator(&exp(&e23.scale(3)).unwrap());
        assert_eq!(g, GroupElement::transvection(&k, 3, 0, 2, 1));
        let e13 = NilpotentElement::unit(&k, 3, 0, 2);
        assert_eq!(comm_one_param(&e12, &e13, &u), Err(LieError::TrivialCommutator));
    }

    #[test]
    fn commutator_needs_centrality() {
        let k = f(5);
        let u = unitriangular(&k, 4);
        let (e12, e23) = (NilpotentElement::unit(&k, 4, 0, 1), NilpotentElement::unit(&k, 4, 1, 2));
        assert_eq!(comm_one_param(&e12, &e23, &u), Err(LieError::NotCentral));
    }

    #[test]
    fn bch_examples() {
        let k = f(7);
        let v = NilpotentElement::unit(&k, 3, 0, 1);
        let u = NilpotentElement::unit(&k, 3, 1, 2);
        let e13 = NilpotentElement::unit(&k, 3, 0, 2);
        let ideal = NilpotentAlgebra::span(&k, 3, &[u.clone(), e13.clone()]);
        let adjusted = bch_adjust(&u, &v, &ideal).unwrap();
        assert_eq!(adjusted, u.sub(&e13.scale(4)));
        let zero = NilpotentElement::zero(&k, 3);
        assert_eq!(bch_adjust(&zero, &v, &ideal).unwrap(), zero);
        let ab = NilpotentAlgebra::span(&k, 3, std::slice::from_ref(&e13));
        assert_eq!(bch_adjust(&e13, &v, &ab).unwrap(), e13);
        let not_ideal = NilpotentAlgebra::span(&k, 3, std::slice::from_ref(&u));
        assert!(matches!(bch_adjust(&u, &v, &not_ideal), Err(LieError::NotIdeal(_))));
    }
}
