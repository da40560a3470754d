//! Square matrices over `F_{p^a}`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Deref;

use crate::error::AlgebraError;
use crate::field::{FieldCtx, FieldElement};

/// A square matrix with packed field entries in row-major order.
///
/// Equality and hashing look only at the dimension and entries; collections
/// are expected to hold matrices over a single field.
#[derive(Clone)]
pub struct Matrix {
    ctx: FieldCtx,
    r: usize,
    e: Box<[u32]>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.e == other.e
    }
}
impl Eq for Matrix {}

impl Hash for Matrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.e.hash(state);
    }
}

impl PartialOrd for Matrix {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Order by canonical encoding: compares digit strings lexicographically.
impl Ord for Matrix {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self.ctx.a() == 1 {
            return self.e.cmp(&other.e);
        }
        self.canonical_digits().cmp(&other.canonical_digits())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.r {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(ctx: &FieldCtx, r: usize) -> Self {
        Matrix { ctx: ctx.clone(), r, e: vec![0; r * r].into_boxed_slice() }
    }

    pub fn identity(ctx: &FieldCtx, r: usize) -> Self {
        let mut m = Self::zero(ctx, r);
        for i in 0..r {
            m.e[i * r + i] = 1;
        }
        m
    }

    /// The matrix unit `E_{ij}` (zero-based indices).
    pub fn unit(ctx: &FieldCtx, r: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(ctx, r);
        m.e[i * r + j] = 1;
        m
    }

    /// Builds a matrix from packed entries in row-major order.
    pub fn from_entries(ctx: &FieldCtx, r: usize, entries: Vec<u32>) -> Result<Self, AlgebraError> {
        if entries.len() != r * r {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{} entries for a {r}x{r} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|&v| v >= ctx.order()) {
            return Err(AlgebraError::Parse("entry outside the field".into()));
        }
        Ok(Matrix { ctx: ctx.clone(), r, e: entries.into_boxed_slice() })
    }

    /// Builds a matrix from integer rows, reducing into the prime subfield.
    pub fn from_ints(ctx: &FieldCtx, rows: &[&[i64]]) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let mut entries = Vec::with_capacity(r * r);
        for row in rows {
            if row.len() != r {
                return Err(AlgebraError::DimensionMismatch("ragged rows".into()));
            }
            entries.extend(row.iter().map(|&v| ctx.from_int(v)));
        }
        Self::from_entries(ctx, r, entries)
    }

    pub fn diagonal(ctx: &FieldCtx, diag: &[u32]) -> Self {
        let r = diag.len();
        let mut m = Self::zero(ctx, r);
        for (i, &d) in diag.iter().enumerate() {
            m.e[i * r + i] = d;
        }
        m
    }

    #[inline]
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    #[inline]
    pub fn dim(&self) -> usize {
        self.r
    }
    #[inline]
    pub fn entries(&self) -> &[u32] {
        &self.e
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.e[i * self.r + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.e[i * self.r + j] = v;
    }
    pub fn row(&self, i: usize) -> &[u32] {
        &self.e[i * self.r..(i + 1) * self.r]
    }
    pub fn entry(&self, i: usize, j: usize) -> FieldElement {
        self.ctx.element(self.get(i, j))
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.ctx != other.ctx {
            return Err(AlgebraError::ContextMismatch);
        }
        if self.r != other.r {
            return Err(AlgebraError::DimensionMismatch(format!("{} vs {}", self.r, other.r)));
        }
        Ok(())
    }

    /// Product without context checks; callers guarantee compatibility.
    pub fn mul_unchecked(&self, other: &Self) -> Self {
        let r = self.r;
        let f = &self.ctx;
        let mut out = vec![0u32; r * r];
        if f.a() == 1 {
            let p = f.p() as u64;
            for i in 0..r {
                for k in 0..r {
                    let a = self.e[i * r + k] as u64;
                    if a == 0 {
                        continue;
                    }
                    for j in 0..r {
                        let slot = &mut out[i * r + j];
                        *slot = ((*slot as u64 + a * other.e[k * r + j] as u64) % p) as u32;
                    }
                }
            }
        } else {
            for i in 0..r {
                for k in 0..r {
                    let a = self.e[i * r + k];
                    if a == 0 {
                        continue;
                    }
                    for j in 0..r {
                        let prod = f.mul(a, other.e[k * r + j]);
                        out[i * r + j] = f.add(out[i * r + j], prod);
                    }
                }
            }
        }
        Matrix { ctx: self.ctx.clone(), r, e: out.into_boxed_slice() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn add(&self, other: &Self) -> Self {
        let e = self.e.iter().zip(other.e.iter()).map(|(&x, &y)| self.ctx.add(x, y)).collect();
        Matrix { ctx: self.ctx.clone(), r: self.r, e }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let e = self.e.iter().zip(other.e.iter()).map(|(&x, &y)| self.ctx.sub(x, y)).collect();
        Matrix { ctx: self.ctx.clone(), r: self.r, e }
    }

    pub fn scale(&self, c: u32) -> Self {
        let e = self.e.iter().map(|&x| self.ctx.mul(c, x)).collect();
        Matrix { ctx: self.ctx.clone(), r: self.r, e }
    }

    pub fn neg(&self) -> Self {
        let e = self.e.iter().map(|&x| self.ctx.neg(x)).collect();
        Matrix { ctx: self.ctx.clone(), r: self.r, e }
    }

    /// Lie bracket `XY - YX`.
    pub fn bracket(&self, other: &Self) -> Self {
        self.mul_unchecked(other).sub(&other.mul_unchecked(self))
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        (0..self.r).all(|i| (0..self.r).all(|j| self.get(i, j) == u32::from(i == j)))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.r).all(|i| (0..i).all(|j| self.get(i, j) == 0))
    }

    pub fn is_strictly_upper(&self) -> bool {
        (0..self.r).all(|i| (0..=i).all(|j| self.get(i, j) == 0))
    }

    pub fn is_unitriangular(&self) -> bool {
        self.is_upper_triangular() && (0..self.r).all(|i| self.get(i, i) == 1)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.r).all(|i| (0..self.r).all(|j| i == j || self.get(i, j) == 0))
    }

    pub fn diag(&self) -> Vec<u32> {
        (0..self.r).map(|i| self.get(i, i)).collect()
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let r = self.r;
        let f = &self.ctx;
        let mut a = self.e.to_vec();
        let mut b = Self::identity(f, r).e.to_vec();
        for col in 0..r {
            let piv = (col..r).find(|&i| a[i * r + col] != 0)?;
            if piv != col {
                for j in 0..r {
                    a.swap(piv * r + j, col * r + j);
                    b.swap(piv * r + j, col * r + j);
                }
            }
            let inv = f.inv(a[col * r + col])?;
            for j in 0..r {
                a[col * r + j] = f.mul(a[col * r + j], inv);
                b[col * r + j] = f.mul(b[col * r + j], inv);
            }
            for i in 0..r {
                let c = a[i * r + col];
                if i == col || c == 0 {
                    continue;
                }
                for j in 0..r {
                    a[i * r + j] = f.sub(a[i * r + j], f.mul(c, a[col * r + j]));
                    b[i * r + j] = f.sub(b[i * r + j], f.mul(c, b[col * r + j]));
                }
            }
        }
        Some(Matrix { ctx: self.ctx.clone(), r, e: b.into_boxed_slice() })
    }

    pub fn determinant(&self) -> u32 {
        let r = self.r;
        let f = &self.ctx;
        let mut a = self.e.to_vec();
        let mut det = 1u32;
        for col in 0..r {
            let Some(piv) = (col..r).find(|&i| a[i * r + col] != 0) else {
                return 0;
            };
            if piv != col {
                for j in 0..r {
                    a.swap(piv * r + j, col * r + j);
                }
                det = f.neg(det);
            }
            let d = a[col * r + col];
            det = f.mul(det, d);
            let inv = f.inv(d).expect("pivot is nonzero");
            for i in col + 1..r {
                let c = f.mul(a[i * r + col], inv);
                if c == 0 {
                    continue;
                }
                for j in col..r {
                    a[i * r + j] = f.sub(a[i * r + j], f.mul(c, a[col * r + j]));
                }
            }
        }
        det
    }

    /// Base-`p` digits of every entry, row-major, least significant digit first.
    pub fn canonical_digits(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.e.len() * self.ctx.a());
        for &v in self.e.iter() {
            out.extend(self.ctx.coeffs(v));
        }
        out
    }

    /// Canonical byte encoding: row-major entries, each as `a` base-`p` digits
    /// little-endian; every digit takes the fewest bytes that fit `p - 1`.
    pub fn encode(&self) -> Vec<u8> {
        let w = digit_width(self.ctx.p());
        let mut out = Vec::with_capacity(self.e.len() * self.ctx.a() * w);
        for d in self.canonical_digits() {
            out.extend_from_slice(&d.to_le_bytes()[..w]);
        }
        out
    }

    pub fn decode(ctx: &FieldCtx, r: usize, bytes: &[u8]) -> Result<Self, AlgebraError> {
        let w = digit_width(ctx.p());
        let a = ctx.a();
        if bytes.len() != r * r * a * w {
            return Err(AlgebraError::Parse("encoding has the wrong length".into()));
        }
        let mut entries = Vec::with_capacity(r * r);
        for chunk in bytes.chunks(a * w) {
            let mut digits = Vec::with_capacity(a);
            for d in chunk.chunks(w) {
                let mut buf = [0u8; 4];
                buf[..w].copy_from_slice(d);
                digits.push(u32::from_le_bytes(buf));
            }
            entries.push(ctx.pack(&digits)?);
        }
        Self::from_entries(ctx, r, entries)
    }
}

fn digit_width(p: u32) -> usize {
    match p - 1 {
        0..=0xff => 1,
        0x100..=0xffff => 2,
        _ => 4,
    }
}

/// An invertible matrix, an element of `GL_r(F_{p^a})`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Matrix);

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Deref for GroupElement {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl GroupElement {
    pub fn new(m: Matrix) -> Result<Self, AlgebraError> {
        if m.determinant() == 0 {
            return Err(AlgebraError::Singular);
        }
        Ok(GroupElement(m))
    }

    /// Wraps a matrix known to be invertible.
    pub(crate) fn from_matrix_unchecked(m: Matrix) -> Self {
        GroupElement(m)
    }

    pub fn identity(ctx: &FieldCtx, r: usize) -> Self {
        GroupElement(Matrix::identity(ctx, r))
    }

    pub fn from_ints(ctx: &FieldCtx, rows: &[&[i64]]) -> Result<Self, AlgebraError> {
        Self::new(Matrix::from_ints(ctx, rows)?)
    }

    pub fn diagonal(ctx: &FieldCtx, diag: &[u32]) -> Result<Self, AlgebraError> {
        Self::new(Matrix::diagonal(ctx, diag))
    }

    /// `I + c E_{ij}` for `i != j`.
    pub fn transvection(ctx: &FieldCtx, r: usize, i: usize, j: usize, c: u32) -> Self {
        let mut m = Matrix::identity(ctx, r);
        m.set(i, j, c);
        GroupElement(m)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(GroupElement(self.0.mul(&other.0)?))
    }

    #[inline]
    pub fn mul_unchecked(&self, other: &Self) -> Self {
        GroupElement(self.0.mul_unchecked(&other.0))
    }

    pub fn inv(&self) -> Self {
        GroupElement(self.0.inverse().expect("group elements are invertible"))
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = GroupElement::identity(self.ctx(), self.dim());
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_unchecked(&b);
            }
            b = b.mul_unchecked(&b);
            n >>= 1;
        }
        acc
    }

    /// `self * h * self^-1`.
    pub fn conj(&self, h: &Self) -> Self {
        self.mul_unchecked(h).mul_unchecked(&self.inv())
    }

    /// Commutator `[g,h] = g h g^-1 h^-1`.
    pub fn commutator(&self, h: &Self) -> Self {
        self.mul_unchecked(h).mul_unchecked(&self.inv()).mul_unchecked(&h.inv())
    }

    pub fn decode(ctx: &FieldCtx, r: usize, bytes: &[u8]) -> Result<Self, AlgebraError> {
        Self::new(Matrix::decode(ctx, r, bytes)?)
    }

    /// Element order by repeated multiplication.
    pub fn order(&self) -> u64 {
        let mut x = self.clone();
        let mut n = 1;
        while !x.is_identity() {
            x = x.mul_unchecked(self);
            n += 1;
        }
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> FieldCtx {
        FieldCtx::prime(p).unwrap()
    }

    #[test]
    fn identity_product() {
        let k = f(5);
        let i = GroupElement::identity(&k, 3);
        assert_eq!(i.mul(&i).unwrap(), i);
    }

    #[test]
    fn small_inverse_and_product() {
        let k = f(5);
        let u = GroupElement::from_ints(&k, &[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(u.inv(), GroupElement::from_ints(&k, &[&[1, 4], &[0, 1]]).unwrap());
        let t = GroupElement::from_ints(&k, &[&[2, 1], &[0, 1]]).unwrap();
        assert_eq!(t.mul(&u).unwrap(), GroupElement::from_ints(&k, &[&[2, 3], &[0, 1]]).unwrap());
    }

    #[test]
    fn singular_rejected() {
        let k = f(5);
        let m = Matrix::from_ints(&k, &[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(GroupElement::new(m.clone()).unwrap_err(), AlgebraError::Singular);
        assert!(m.inverse().is_none());
    }

    #[test]
    fn encoding_round_trip_extension_field() {
        let k = FieldCtx::new(3, 2, None).unwrap();
        let m = Matrix::from_entries(&k, 2, vec![1, 5, 0, 7]).unwrap();
        let g = GroupElement::new(m).unwrap();
        let bytes = g.encode();
        assert_eq!(bytes, vec![1, 0, 2, 1, 0, 0, 1, 2]);
        assert_eq!(GroupElement::decode(&k, 2, &bytes).unwrap(), g);
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = GroupElement::identity(&f(5), 2);
        let b = GroupElement::identity(&f(7), 2);
        assert_eq!(a.mul(&b).unwrap_err(), AlgebraError::ContextMismatch);
    }
}
