//! Plain-text matrix-set format.
//!
//! ```text
//! p a r
//! m_0 m_1 ... m_a
//! e_11 e_12 ... e_rr
//! ...
//! ```
//!
//! The second line holds the modulus coefficients, constant term first. Each
//! following line is one matrix in row-major order; an entry over `F_{p^a}`
//! with `a > 1` is written as `a` comma-joined digits, constant term first.
//! Lines starting with `#` are ignored.

use crate::error::AlgebraError;
use crate::field::FieldCtx;
use crate::matrix::{GroupElement, Matrix};
use crate::set::ElementSet;

pub fn parse_matrix_set(text: &str) -> Result<ElementSet, AlgebraError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| AlgebraError::Parse("missing header".into()))?;
    let nums: Vec<u64> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| AlgebraError::Parse(format!("bad header token {t:?}"))))
        .collect::<Result<_, _>>()?;
    let [p, a, r] = nums[..] else {
        return Err(AlgebraError::Parse("header must be `p a r`".into()));
    };
    let (p, a, r) = (p as u32, a as usize, r as usize);
    let modline = lines.next().ok_or_else(|| AlgebraError::Parse("missing modulus".into()))?;
    let modulus: Vec<u32> = modline
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| AlgebraError::Parse(format!("bad modulus token {t:?}"))))
        .collect::<Result<_, _>>()?;
    let ctx = FieldCtx::new(p, a, Some(modulus))?;
    let mut set = ElementSet::new(&ctx, r);
    for line in lines {
        let mut entries = Vec::with_capacity(r * r);
        for tok in line.split_whitespace() {
            let digits: Vec<u32> = tok
                .split(',')
                .map(|d| d.parse().map_err(|_| AlgebraError::Parse(format!("bad entry {tok:?}"))))
                .collect::<Result<_, _>>()?;
            entries.push(ctx.pack(&digits)?);
        }
        set.insert(GroupElement::new(Matrix::from_entries(&ctx, r, entries)?)?);
    }
    Ok(set)
}

pub fn format_matrix_set(set: &ElementSet) -> String {
    let ctx = set.ctx();
    let mut out = format!("{} {} {}\n", ctx.p(), ctx.a(), set.dim());
    let m: Vec<String> = ctx.modulus().iter().map(u32::to_string).collect();
    out.push_str(&m.join(" "));
    out.push('\n');
    for g in set.iter() {
        let toks: Vec<String> = g
            .entries()
            .iter()
            .map(|&v| ctx.coeffs(v).iter().map(u32::to_string).collect::<Vec<_>>().join(","))
            .collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_prime_and_extension() {
        let text = "5 1 2\n0 1\n1 1 0 1\n2 0 0 1\n";
        let s = parse_matrix_set(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(format_matrix_set(&s), text);
        let text = "3 2 2\n1 0 1\n1,0 2,1 0,0 1,2\n";
        let s = parse_matrix_set(text).unwrap();
        assert_eq!(format_matrix_set(&s), text);
    }

    #[test]
    fn singular_and_malformed_rejected() {
        assert!(parse_matrix_set("5 1 2\n0 1\n1 2 2 4\n").is_err());
        assert!(parse_matrix_set("5 1\n0 1\n").is_err());
        assert!(parse_matrix_set("5 1 2\n0 1\n1 1 0\n").is_err());
    }
}
