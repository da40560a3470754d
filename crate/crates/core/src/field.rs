//! Arithmetic in `F_{p^a}`.
//!
//! An element is stored as a packed index `c_0 + c_1 p + ... + c_{a-1} p^{a-1}`
//! over its polynomial coefficients. Multiplication and inversion go through
//! discrete-log tables built once per context.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// Largest field order for which log tables are built.
const MAX_ORDER: u64 = 1 << 22;

struct FieldTables {
    p: u32,
    a: usize,
    q: u32,
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for a fixed primitive element `g`, length `2(q-1)`.
    exp: Vec<u32>,
    /// `log[x]` for `x != 0`.
    log: Vec<u32>,
}

/// Shared description of a finite field `F_{p^a}`.
///
/// Cloning is cheap. Two contexts are equal when `p`, `a` and the modulus agree.
#[derive(Clone)]
pub struct FieldCtx {
    inner: Arc<FieldTables>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}
impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p(), self.a(), self.modulus())
    }
}

/// Serializable form of a field context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub a: usize,
    /// Coefficients of the monic modulus, constant term first (`a + 1` values).
    pub modulus: Vec<u32>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_rem(mut num: Vec<u32>, den: &[u32], p: u32) -> Vec<u32> {
    let dd = den.len() - 1;
    let lead_inv = mod_inv(den[dd], p);
    while num.len() > dd {
        let top = *num.last().unwrap();
        if top != 0 {
            let c = (top as u64 * lead_inv as u64 % p as u64) as u32;
            let shift = num.len() - 1 - dd;
            for (i, &d) in den.iter().enumerate() {
                let v = &mut num[shift + i];
                *v = ((*v as u64 + (p - c) as u64 * d as u64) % p as u64) as u32;
            }
        }
        num.pop();
    }
    num
}

fn mod_inv(x: u32, p: u32) -> u32 {
    mod_pow(x, p - 2, p)
}

fn mod_pow(b: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = b as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Deterministic irreducibility test for a monic polynomial over `F_p`
/// (coefficients constant term first) by trial division against every monic
/// polynomial of degree at most half the degree.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = match modulus.len() {
        0 | 1 => return false,
        n => n - 1,
    };
    if modulus[deg] != 1 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                divisor.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            divisor.push(1);
            if poly_rem(modulus.to_vec(), &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Default modulus for `F_{p^a}`: `x` when `a = 1`, otherwise the first monic
/// irreducible polynomial of degree `a` in the order of its packed coefficient
/// index (constant term least significant).
pub fn default_modulus(p: u32, a: usize) -> Result<Vec<u32>, AlgebraError> {
    if !is_prime(p) {
        return Err(AlgebraError::NotPrime(p));
    }
    if a == 0 || a > 4 {
        return Err(AlgebraError::UnsupportedDegree(a));
    }
    if a == 1 {
        return Ok(vec![0, 1]);
    }
    let count = (p as u64).pow(a as u32);
    for idx in 0..count {
        let mut m = Vec::with_capacity(a + 1);
        let mut rest = idx;
        for _ in 0..a {
            m.push((rest % p as u64) as u32);
            rest /= p as u64;
        }
        m.push(1);
        if is_irreducible(&m, p) {
            return Ok(m);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldCtx {
    /// Prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self, AlgebraError> {
        Self::new(p, 1, None)
    }

    /// Builds `F_{p^a}`. Without an explicit modulus the default table entry is used.
    pub fn new(p: u32, a: usize, modulus: Option<Vec<u32>>) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if a == 0 {
            return Err(AlgebraError::UnsupportedDegree(a));
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != a + 1 || m.iter().any(|&c| c >= p) {
                    return Err(AlgebraError::BadModulus(format!(
                        "expected {} coefficients in [0,{p})",
                        a + 1
                    )));
                }
                if a == 1 {
                    if m != [0, 1] {
                        return Err(AlgebraError::BadModulus("the prime-field modulus is x".into()));
                    }
                } else if !is_irreducible(&m, p) {
                    return Err(AlgebraError::BadModulus(format!("{m:?} is not irreducible")));
                }
                m
            }
            None => default_modulus(p, a)?,
        };
        let q64 = (p as u64).pow(a as u32);
        if q64 > MAX_ORDER {
            return Err(AlgebraError::UnsupportedDegree(a));
        }
        let q = q64 as u32;
        let mut t = FieldTables { p, a, q, modulus, exp: Vec::new(), log: Vec::new() };
        t.build_logs();
        Ok(FieldCtx { inner: Arc::new(t) })
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self, AlgebraError> {
        Self::new(spec.p, spec.a, Some(spec.modulus.clone()))
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p(), a: self.a(), modulus: self.modulus().to_vec() }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }
    #[inline]
    pub fn a(&self) -> usize {
        self.inner.a
    }
    /// Field order `p^a`.
    #[inline]
    pub fn order(&self) -> u32 {
        self.inner.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        let t = &*self.inner;
        if t.a == 1 {
            let s = x + y;
            if s >= t.p {
                s - t.p
            } else {
                s
            }
        } else {
            t.digitwise(x, y, |u, v| (u + v) % t.p)
        }
    }

    #[inline]
    pub fn neg(&self, x: u32) -> u32 {
        let t = &*self.inner;
        if t.a == 1 {
            if x == 0 {
                0
            } else {
                t.p - x
            }
        } else {
            t.digitwise(x, 0, |u, _| (t.p - u) % t.p)
        }
    }

    #[inline]
    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        let t = &*self.inner;
        if t.a == 1 {
            return ((x as u64 * y as u64) % t.p as u64) as u32;
        }
        if x == 0 || y == 0 {
            return 0;
        }
        t.exp[(t.log[x as usize] + t.log[y as usize]) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, x: u32) -> Option<u32> {
        let t = &*self.inner;
        if x == 0 {
            return None;
        }
        if t.q == 2 {
            return Some(1);
        }
        let l = t.log[x as usize];
        Some(t.exp[((t.q - 1 - l) % (t.q - 1)) as usize])
    }

    pub fn pow(&self, x: u32, e: u64) -> u32 {
        let t = &*self.inner;
        if e == 0 {
            return 1;
        }
        if x == 0 {
            return 0;
        }
        let l = t.log[x as usize] as u64;
        t.exp[((l * (e % (t.q as u64 - 1))) % (t.q as u64 - 1)) as usize]
    }

    /// Discrete log to the fixed primitive element.
    pub fn log(&self, x: u32) -> Option<u32> {
        (x != 0).then(|| self.inner.log[x as usize])
    }

    /// The fixed primitive element used for the log tables.
    pub fn generator(&self) -> u32 {
        self.inner.exp[1.min(self.inner.exp.len() - 1)]
    }

    /// Embeds an integer through `Z -> F_p -> F_{p^a}`.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p() as i64) as u32
    }

    /// Unpacks the polynomial coefficients of a packed element.
    pub fn coeffs(&self, x: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.a());
        let mut rest = x;
        for _ in 0..self.a() {
            out.push(rest % self.p());
            rest /= self.p();
        }
        out
    }

    /// Packs polynomial coefficients (constant term first).
    pub fn pack(&self, coeffs: &[u32]) -> Result<u32, AlgebraError> {
        if coeffs.len() != self.a() || coeffs.iter().any(|&c| c >= self.p()) {
            return Err(AlgebraError::Parse(format!(
                "field element needs {} digits below {}",
                self.a(),
                self.p()
            )));
        }
        Ok(coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.p() + c))
    }

    pub fn element(&self, value: u32) -> FieldElement {
        FieldElement { ctx: self.clone(), value: value % self.order() }
    }
}

impl FieldTables {
    fn digitwise(&self, x: u32, y: u32, f: impl Fn(u32, u32) -> u32) -> u32 {
        let (mut x, mut y) = (x, y);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.a {
            out += f(x % self.p, y % self.p) * place;
            x /= self.p;
            y /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    /// Schoolbook product reduced by the modulus.
    fn poly_mul(&self, x: u32, y: u32) -> u32 {
        let p = self.p as u64;
        let unpack = |mut v: u32| {
            let mut c = vec![0u32; self.a];
            for slot in c.iter_mut() {
                *slot = v % self.p;
                v /= self.p;
            }
            c
        };
        let (cx, cy) = (unpack(x), unpack(y));
        let mut prod = vec![0u32; 2 * self.a - 1];
        for (i, &u) in cx.iter().enumerate() {
            for (j, &v) in cy.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + u as u64 * v as u64) % p) as u32;
            }
        }
        let rem = poly_rem(prod, &self.modulus, self.p);
        rem.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)
    }

    fn build_logs(&mut self) {
        let q = self.q;
        let mul = |t: &Self, x: u32, y: u32| -> u32 {
            if t.a == 1 {
                ((x as u64 * y as u64) % t.p as u64) as u32
            } else {
                t.poly_mul(x, y)
            }
        };
        let order = q - 1;
        let mut factors = Vec::new();
        let mut n = order;
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                factors.push(d);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            factors.push(n);
        }
        let pow = |t: &Self, x: u32, mut e: u32| -> u32 {
            let mut acc = 1u32;
            let mut b = x;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul(t, acc, b);
                }
                b = mul(t, b, b);
                e >>= 1;
            }
            acc
        };
        let g = if q == 2 {
            1
        } else {
            (1..q)
                .find(|&c| c != 0 && factors.iter().all(|&f| pow(self, c, order / f) != 1))
                .expect("multiplicative group is cyclic")
        };
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for i in 0..order {
            exp[i as usize] = cur;
            exp[(i + order) as usize] = cur;
            log[cur as usize] = i;
            cur = mul(self, cur, g);
        }
        self.exp = exp;
        self.log = log;
    }
}

/// A single element of `F_{p^a}` carrying its context.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    ctx: FieldCtx,
    value: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.a() == 1 {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{:?}", self.coeffs())
        }
    }
}

impl FieldElement {
    pub fn from_coeffs(ctx: &FieldCtx, coeffs: &[u32]) -> Result<Self, AlgebraError> {
        Ok(FieldElement { ctx: ctx.clone(), value: ctx.pack(coeffs)? })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn value(&self) -> u32 {
        self.value
    }
    pub fn coeffs(&self) -> Vec<u32> {
        self.ctx.coeffs(self.value)
    }
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_ctx(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(AlgebraError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_ctx(other)?;
        Ok(self.ctx.element(self.ctx.add(self.value, other.value)))
    }
    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_ctx(other)?;
        Ok(self.ctx.element(self.ctx.sub(self.value, other.value)))
    }
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_ctx(other)?;
        Ok(self.ctx.element(self.ctx.mul(self.value, other.value)))
    }
    pub fn neg(&self) -> Self {
        self.ctx.element(self.ctx.neg(self.value))
    }
    pub fn inv(&self) -> Result<Self, AlgebraError> {
        self.ctx.inv(self.value).map(|v| self.ctx.element(v)).ok_or(AlgebraError::DivisionByZero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = FieldCtx::prime(7).unwrap();
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), Some(5));
        assert_eq!(f.inv(0), None);
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn f25_with_x2_plus_2() {
        let f = FieldCtx::new(5, 2, Some(vec![2, 0, 1])).unwrap();
        let x = FieldElement::from_coeffs(&f, &[0, 1]).unwrap();
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.coeffs(), vec![3, 0]);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 - 1 = (x - 1)(x + 1)
        assert!(FieldCtx::new(5, 2, Some(vec![4, 0, 1])).is_err());
        assert!(!is_irreducible(&[4, 0, 1], 5));
        assert!(is_irreducible(&[2, 0, 1], 5));
    }

    #[test]
    fn inverses_in_extension_fields() {
        for (p, a) in [(2, 3), (3, 2), (5, 2), (2, 4), (3, 3)] {
            let f = FieldCtx::new(p, a, None).unwrap();
            for x in 1..f.order() {
                let y = f.inv(x).unwrap();
                assert_eq!(f.mul(x, y), 1, "p={p} a={a} x={x}");
                assert_eq!(f.mul(x, y), f.inner.poly_mul(x, y));
            }
        }
    }

    #[test]
    fn mismatched_contexts() {
        let f5 = FieldCtx::prime(5).unwrap();
        let f7 = FieldCtx::prime(7).unwrap();
        assert!(matches!(f5.element(1).add(&f7.element(1)), Err(AlgebraError::ContextMismatch)));
        assert!(matches!(f5.element(0).inv(), Err(AlgebraError::DivisionByZero)));
    }
}
