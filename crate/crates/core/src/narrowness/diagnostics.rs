use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{LatVec, RefinementChain};
use crate::operators::{KernelFamily, Operator, OrthAdd, ScalarFunc, UrysonMatrix};
use crate::rational::{ser, Q};

use super::min_discrepancy;

/// Operator families indexed by the levels of a refinement chain.
#[derive(Debug, Clone)]
pub enum OperatorFamily {
    /// `∥x∥_p^p` at each level.
    NormPower { p: Q },
    /// `|x|` into the same level, disjointness preserving.
    Identity,
    /// `ν(supp x)` with `ν` the level weights.
    SupportMeasure,
    /// Scalar `Σ_j (−1)^j x_j μ_j`.
    Alternating,
    /// Scalar `|x_0|`: a single nonzero column, disjointness preserving.
    FirstAtom,
    Kernel(Arc<KernelFamily>),
}

impl OperatorFamily {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorFamily::NormPower { .. } => "norm_power",
            OperatorFamily::Identity => "identity",
            OperatorFamily::SupportMeasure => "support_measure",
            OperatorFamily::Alternating => "alternating",
            OperatorFamily::FirstAtom => "first_atom",
            OperatorFamily::Kernel(_) => "kernel",
        }
    }

    /// The level-`n` operator on `chain`. Kernel families carry their own chain.
    pub fn at_level(&self, chain: &RefinementChain, level: usize) -> Result<Operator> {
        let space = chain.level(level)?;
        Ok(match self {
            OperatorFamily::NormPower { p } => Operator::norm_power(space, p.clone())?,
            OperatorFamily::Identity => Operator::identity(space),
            OperatorFamily::SupportMeasure => Operator::support_measure(space, space.weights().to_vec())?,
            OperatorFamily::Alternating => Operator::Matrix(UrysonMatrix::from_fn(
                space,
                &crate::lattice::MeasureSpace::scalar(),
                |_, j| {
                    let w = space.weight(j).clone();
                    ScalarFunc::linear(if j % 2 == 0 { w } else { -w })
                },
            )?),
            OperatorFamily::FirstAtom => Operator::Matrix(UrysonMatrix::from_fn(
                space,
                &crate::lattice::MeasureSpace::scalar(),
                |_, j| if j == 0 { ScalarFunc::linear(Q::from_integer(1.into())).abs() } else { ScalarFunc::zero() },
            )?),
            OperatorFamily::Kernel(k) => k.at_level(level)?,
        })
    }

    pub fn chain<'a>(&'a self, chain: &'a RefinementChain) -> &'a RefinementChain {
        match self {
            OperatorFamily::Kernel(k) => k.chain(),
            _ => chain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Decaying,
    Stalled,
}

/// Exact `δ_n = min ∥T_n(e₁) − T_n(e₂)∥₁` over the levels of a chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaCurve {
    pub family: String,
    pub levels: Vec<usize>,
    #[serde(serialize_with = "ser::qs")]
    pub delta: Vec<Q>,
    /// `decaying` when the last value is 0 or below half the first one. This
    /// is a reporting heuristic, not a narrowness test.
    pub trend: Trend,
    pub truncated: Option<String>,
}

impl DeltaCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,delta,num,den\n");
        for (n, d) in self.levels.iter().zip(&self.delta) {
            let _ = writeln!(out, "{n},{},{},{}", crate::rational::fmt_q(d), d.numer(), d.denom());
        }
        out
    }
}

fn classify(delta: &[Q]) -> Trend {
    match (delta.first(), delta.last()) {
        (Some(first), Some(last)) if last.is_zero() || last * Q::from_integer(2.into()) < *first => Trend::Decaying,
        _ => Trend::Stalled,
    }
}

fn curve_of(
    name: &str,
    levels: usize,
    cap: usize,
    mut op: impl FnMut(usize) -> Result<(Box<dyn OrthAdd>, LatVec)>,
) -> Result<DeltaCurve> {
    let mut delta = Vec::new();
    let mut truncated = None;
    for n in 0..=levels {
        let (t, e) = op(n)?;
        match min_discrepancy(t.as_ref(), &e, cap) {
            Ok(w) => delta.push(w.discrepancy),
            Err(err @ Error::CapExceeded { .. }) => {
                truncated = Some(format!("stopped before level {n}: {err}"));
                break;
            }
            Err(err) => return Err(err),
        }
    }
    Ok(DeltaCurve {
        family: name.to_string(),
        levels: (0..delta.len()).collect(),
        trend: classify(&delta),
        delta,
        truncated,
    })
}

/// `δ_n` for levels `0..=levels`, with `e` given at level 0 and embedded.
pub fn refinement_diagnostics(
    family: &OperatorFamily,
    chain: &RefinementChain,
    e: &LatVec,
    levels: usize,
    cap: usize,
) -> Result<DeltaCurve> {
    let chain = family.chain(chain);
    if levels > chain.finest() {
        return Err(Error::LevelOutOfRange {
            level: levels,
            levels: chain.num_levels(),
        });
    }
    curve_of(family.name(), levels, cap, |n| {
        let t = family.at_level(chain, n)?;
        Ok((Box::new(t), chain.embed_to(e, n)?))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominationReport {
    pub operator: DeltaCurve,
    pub modulus: DeltaCurve,
    /// Levels where exactly one of `δ_n(T)`, `δ_n(|T|)` vanishes.
    pub zero_mismatch: Vec<usize>,
}

/// `δ_n(T)` and `δ_n(|T|)` side by side; `|T|` uses the matrix closed form.
pub fn domination_diagnostic(
    family: &OperatorFamily,
    chain: &RefinementChain,
    e: &LatVec,
    levels: usize,
    cap: usize,
) -> Result<DominationReport> {
    let chain = family.chain(chain);
    if levels > chain.finest() {
        return Err(Error::LevelOutOfRange {
            level: levels,
            levels: chain.num_levels(),
        });
    }
    let matrix = |n: usize| -> Result<UrysonMatrix> {
        family.at_level(chain, n)?.as_matrix().ok_or_else(|| {
            Error::Unsupported(format!("family {} has no matrix form", family.name()))
        })
    };
    let operator = curve_of(family.name(), levels, cap, |n| {
        Ok((Box::new(matrix(n)?), chain.embed_to(e, n)?))
    })?;
    let modulus = curve_of(&format!("|{}|", family.name()), levels, cap, |n| {
        Ok((Box::new(matrix(n)?.modulus()), chain.embed_to(e, n)?))
    })?;
    let zero_mismatch = operator
        .delta
        .iter()
        .zip(&modulus.delta)
        .enumerate()
        .filter(|(_, (a, b))| a.is_zero() != b.is_zero())
        .map(|(n, _)| n)
        .collect();
    Ok(DominationReport {
        operator,
        modulus,
        zero_mismatch,
    })
}
