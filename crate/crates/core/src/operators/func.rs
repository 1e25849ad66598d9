use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{abs_pow, fmt_q, max_q, min_q, Q};

/// A scalar section `r ↦ φ(r)` of a Uryson kernel, always vanishing at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalarFunc {
    /// `Σ_k c_k r^k` with coefficients listed by degree; `c_0` must be 0.
    Poly(Vec<Q>),
    /// `c · |r|^p`.
    AbsPower { coeff: Q, p: Q },
    /// Linear interpolation through `(x, y)` nodes with linear extrapolation
    /// beyond the end nodes.
    PiecewiseLinear(Vec<(Q, Q)>),
    /// `n (|r| − 1)` for `|r| ≥ 1`, else 0.
    Threshold { scale: Q },
    /// `pos(r)` for `r > 0`, `neg(r)` for `r < 0`.
    SignSplit {
        pos: Box<ScalarFunc>,
        neg: Box<ScalarFunc>,
    },
    /// `value` for `r ≠ 0`.
    Indicator { value: Q },
    Abs(Box<ScalarFunc>),
    Min(Box<ScalarFunc>, Box<ScalarFunc>),
    Max(Box<ScalarFunc>, Box<ScalarFunc>),
    /// `Σ c_k f_k(r)`.
    Combo(Vec<(Q, ScalarFunc)>),
}

impl ScalarFunc {
    pub fn zero() -> Self {
        ScalarFunc::Poly(vec![])
    }

    /// `c · r`.
    pub fn linear(c: Q) -> Self {
        ScalarFunc::Poly(vec![Q::zero(), c])
    }

    pub fn abs_power(coeff: Q, p: Q) -> Self {
        ScalarFunc::AbsPower { coeff, p }
    }

    pub fn abs(self) -> Self {
        ScalarFunc::Abs(Box::new(self))
    }

    pub fn min(self, other: ScalarFunc) -> Self {
        ScalarFunc::Min(Box::new(self), Box::new(other))
    }

    pub fn max(self, other: ScalarFunc) -> Self {
        ScalarFunc::Max(Box::new(self), Box::new(other))
    }

    pub fn scaled(self, c: Q) -> Self {
        ScalarFunc::Combo(vec![(c, self)])
    }

    pub fn eval(&self, r: &Q) -> Result<Q> {
        if r.is_zero() {
            return Ok(Q::zero());
        }
        Ok(match self {
            ScalarFunc::Poly(cs) => {
                let mut acc = Q::zero();
                for c in cs.iter().rev() {
                    acc = acc * r + c;
                }
                acc
            }
            ScalarFunc::AbsPower { coeff, p } => {
                if coeff.is_zero() {
                    Q::zero()
                } else {
                    coeff * abs_pow(r, p)?
                }
            }
            ScalarFunc::PiecewiseLinear(nodes) => interpolate(nodes, r),
            ScalarFunc::Threshold { scale } => {
                let a = r.abs();
                if a >= Q::one() {
                    scale * (a - Q::one())
                } else {
                    Q::zero()
                }
            }
            ScalarFunc::SignSplit { pos, neg } => {
                if r.is_positive() {
                    pos.eval(r)?
                } else {
                    neg.eval(r)?
                }
            }
            ScalarFunc::Indicator { value } => value.clone(),
            ScalarFunc::Abs(f) => f.eval(r)?.abs(),
            ScalarFunc::Min(f, g) => min_q(&f.eval(r)?, &g.eval(r)?),
            ScalarFunc::Max(f, g) => max_q(&f.eval(r)?, &g.eval(r)?),
            ScalarFunc::Combo(terms) => {
                let mut acc = Q::zero();
                for (c, f) in terms {
                    if !c.is_zero() {
                        acc += c * f.eval(r)?;
                    }
                }
                acc
            }
        })
    }

    /// Checks the structural invariants, including `φ(0) = 0`.
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarFunc::Poly(cs) => {
                if cs.first().is_some_and(|c| !c.is_zero()) {
                    return Err(Error::contract(format!(
                        "polynomial has nonzero constant term {}",
                        fmt_q(&cs[0])
                    )));
                }
            }
            ScalarFunc::AbsPower { p, .. } => {
                if !p.is_positive() {
                    return Err(Error::contract(format!(
                        "abs_power exponent {} must be positive",
                        fmt_q(p)
                    )));
                }
            }
            ScalarFunc::PiecewiseLinear(nodes) => {
                if nodes.len() < 2 {
                    return Err(Error::contract("piecewise_linear needs at least two nodes"));
                }
                if nodes.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::contract(
                        "piecewise_linear breakpoints must be strictly increasing",
                    ));
                }
                let at_zero = interpolate(nodes, &Q::zero());
                if !at_zero.is_zero() {
                    return Err(Error::contract(format!(
                        "piecewise_linear takes value {} at 0",
                        fmt_q(&at_zero)
                    )));
                }
            }
            ScalarFunc::Threshold { .. } | ScalarFunc::Indicator { .. } => {}
            ScalarFunc::SignSplit { pos, neg } => {
                pos.validate()?;
                neg.validate()?;
            }
            ScalarFunc::Abs(f) => f.validate()?,
            ScalarFunc::Min(f, g) | ScalarFunc::Max(f, g) => {
                f.validate()?;
                g.validate()?;
            }
            ScalarFunc::Combo(terms) => {
                for (_, f) in terms {
                    f.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Sound structural test for `φ ≡ 0`: `true` only when the form itself
    /// forces every value to vanish. Never decided by sampling.
    pub fn is_identically_zero(&self) -> bool {
        match self {
            ScalarFunc::Poly(cs) => cs.iter().all(Zero::is_zero),
            ScalarFunc::AbsPower { coeff, .. } => coeff.is_zero(),
            ScalarFunc::PiecewiseLinear(nodes) => nodes.iter().all(|(_, y)| y.is_zero()),
            ScalarFunc::Threshold { scale } => scale.is_zero(),
            ScalarFunc::SignSplit { pos, neg } => {
                pos.is_identically_zero() && neg.is_identically_zero()
            }
            ScalarFunc::Indicator { value } => value.is_zero(),
            ScalarFunc::Abs(f) => f.is_identically_zero(),
            ScalarFunc::Min(f, g) | ScalarFunc::Max(f, g) => {
                f.is_identically_zero() && g.is_identically_zero()
            }
            ScalarFunc::Combo(terms) => terms
                .iter()
                .all(|(c, f)| c.is_zero() || f.is_identically_zero()),
        }
    }

    /// Sound structural test for `φ ≥ 0` everywhere.
    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative_on(true) && self.nonnegative_on(false)
    }

    /// Sound structural test for `φ(r) ≥ 0` on `r > 0` (or on `r < 0`).
    fn nonnegative_on(&self, positive_side: bool) -> bool {
        match self {
            ScalarFunc::Poly(cs) => cs.iter().enumerate().all(|(k, c)| {
                c.is_zero() || if positive_side || k % 2 == 0 { c.is_positive() } else { c.is_negative() }
            }),
            ScalarFunc::AbsPower { coeff, .. } => !coeff.is_negative(),
            ScalarFunc::PiecewiseLinear(nodes) => {
                let n = nodes.len();
                nodes.iter().all(|(_, y)| !y.is_negative())
                    && nodes[1].1 <= nodes[0].1
                    && nodes[n - 1].1 >= nodes[n - 2].1
            }
            ScalarFunc::Threshold { scale } => !scale.is_negative(),
            ScalarFunc::SignSplit { pos, neg } => {
                if positive_side {
                    pos.nonnegative_on(true)
                } else {
                    neg.nonnegative_on(false)
                }
            }
            ScalarFunc::Indicator { value } => !value.is_negative(),
            ScalarFunc::Abs(_) => true,
            ScalarFunc::Min(f, g) => f.nonnegative_on(positive_side) && g.nonnegative_on(positive_side),
            ScalarFunc::Max(f, g) => f.nonnegative_on(positive_side) || g.nonnegative_on(positive_side),
            ScalarFunc::Combo(terms) => terms
                .iter()
                .all(|(c, f)| c.is_zero() || (c.is_positive() && f.nonnegative_on(positive_side))),
        }
    }
}

fn interpolate(nodes: &[(Q, Q)], r: &Q) -> Q {
    let n = nodes.len();
    if n < 2 {
        // Rejected by validate; treat as the zero function.
        return Q::zero();
    }
    let seg = match nodes.iter().position(|(x, _)| x > r) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => n - 2,
    };
    let (x0, y0) = &nodes[seg];
    let (x1, y1) = &nodes[seg + 1];
    y0 + (y1 - y0) * (r - x0) / (x1 - x0)
}
