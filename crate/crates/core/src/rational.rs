//! Exact rational scalars and the `"p/q"` text form used by every file format.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational. The only scalar type in the crate.
pub type Q = BigRational;

/// `n/d` as a [`Q`]. Panics on a zero denominator.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` (optional leading sign), rejecting zero denominators.
pub fn parse_q(s: &str) -> Result<Q> {
    let bad = |msg: &str| Error::Parse {
        path: format!("{s:?}"),
        msg: msg.to_string(),
    };
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad("invalid rational numerator"))?;
    let d: BigInt = den.parse().map_err(|_| bad("invalid rational denominator"))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Q::new(n, d))
}

/// Lowest-terms text form with positive denominator; integers print without `/1`.
pub fn fmt_q(x: &Q) -> String {
    // Ratio keeps itself reduced with a positive denominator.
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn max_q(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn min_q(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// `|r|^p` for a positive rational exponent, exact or refused.
///
/// Integer exponents always succeed. For `p = a/b` in lowest terms the result
/// is returned only when `|r|` is a perfect `b`-th power of a rational.
pub fn abs_pow(r: &Q, p: &Q) -> Result<Q> {
    if !p.is_positive() {
        return Err(Error::Unsupported(format!(
            "exponent {} must be positive",
            fmt_q(p)
        )));
    }
    let base = r.abs();
    if base.is_zero() {
        return Ok(Q::zero());
    }
    let exp_num: u32 = p
        .numer()
        .try_into()
        .map_err(|_| Error::Unsupported(format!("exponent {} too large", fmt_q(p))))?;
    let exp_den: u32 = p
        .denom()
        .try_into()
        .map_err(|_| Error::Unsupported(format!("exponent {} too large", fmt_q(p))))?;
    let root = if exp_den == 1 {
        base
    } else {
        let n = exact_root(base.numer(), exp_den);
        let d = exact_root(base.denom(), exp_den);
        match (n, d) {
            (Some(n), Some(d)) => Q::new(n, d),
            _ => {
                return Err(Error::Unsupported(format!(
                    "{}^{} is irrational",
                    fmt_q(&r.abs()),
                    fmt_q(p)
                )))
            }
        }
    };
    Ok(Pow::pow(root, exp_num))
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    if Pow::pow(&r, k) == *n {
        Some(r)
    } else {
        None
    }
}

/// `serialize_with` helpers writing rationals in their `"p/q"` text form.
pub mod ser {
    use serde::ser::{SerializeSeq, Serializer};

    use super::{fmt_q, Q};

    pub fn q<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn qs<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&fmt_q(x))?;
        }
        seq.end()
    }
}

/// The default rational grid used for structural operator comparisons.
pub fn default_grid() -> Vec<Q> {
    vec![qi(-2), qi(-1), q(-1, 2), Q::zero(), q(1, 2), qi(1), qi(2)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_q("-4").unwrap(), qi(-4));
        assert_eq!(parse_q(" 2/-4 ").unwrap(), q(-1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(fmt_q(&q(4, 2)), "2");
        assert_eq!(fmt_q(&q(3, -6)), "-1/2");
        assert_eq!(fmt_q(&Q::zero()), "0");
    }

    #[test]
    fn rational_powers() {
        assert_eq!(abs_pow(&q(-3, 2), &qi(2)).unwrap(), q(9, 4));
        assert_eq!(abs_pow(&q(4, 9), &q(1, 2)).unwrap(), q(2, 3));
        assert_eq!(abs_pow(&qi(8), &q(2, 3)).unwrap(), qi(4));
        assert_eq!(abs_pow(&Q::zero(), &q(1, 3)).unwrap(), Q::zero());
        assert!(matches!(
            abs_pow(&qi(2), &q(1, 2)),
            Err(Error::Unsupported(_))
        ));
        assert!(abs_pow(&qi(2), &Q::zero()).is_err());
    }
}
