use num_traits::Signed;
use serde::Serialize;

use super::{calculus, OrthAdd, UrysonMatrix};
use crate::error::{Error, Result};
use crate::lattice::{Caps, LatVec, MeasureSpace};
use crate::random;
use crate::rational::{q, qi, Q};

/// Outcome of sampling disjoint pairs for orthogonal additivity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OaReport {
    pub trials: usize,
    pub zero_ok: bool,
    /// Disjoint pairs `(x, y)` with `T(x + y) ≠ T(x) + T(y)`.
    pub counterexamples: Vec<(LatVec, LatVec)>,
}

impl OaReport {
    pub fn passed(&self) -> bool {
        self.zero_ok && self.counterexamples.is_empty()
    }
}

pub fn check_orthogonal_additivity(t: &dyn OrthAdd, trials: usize, seed: u64) -> Result<OaReport> {
    let space = t.input_space();
    let zero_ok = t.apply(&LatVec::zero(&space))?.is_zero();
    let mut rng = random::rng(seed);
    let mut counterexamples = Vec::new();
    for _ in 0..trials {
        let (x, y) = random::disjoint_pair(&mut rng, &space);
        let lhs = t.apply(&x.add(&y)?)?;
        let rhs = t.apply(&x)?.add(&t.apply(&y)?)?;
        if lhs != rhs {
            counterexamples.push((x, y));
        }
    }
    Ok(OaReport {
        trials,
        zero_ok,
        counterexamples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpMode {
    /// Structural row-sparsity test on the matrix form.
    ExactMatrix,
    Sampled { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpReport {
    pub dp: bool,
    /// `(row, j1, j2)`: a row with two structurally nonzero columns.
    pub violation: Option<(usize, usize, usize)>,
    /// Disjoint `x, y` with `|T(x)| ∧ |T(y)| ≠ 0`, and that meet.
    pub witness: Option<(LatVec, LatVec, LatVec)>,
}

fn dp_witness(t: &dyn OrthAdd, x: LatVec, y: LatVec) -> Result<Option<(LatVec, LatVec, LatVec)>> {
    let meet = t.apply(&x)?.abs().meet(&t.apply(&y)?.abs())?;
    Ok((!meet.is_zero()).then_some((x, y, meet)))
}

pub fn is_disjointness_preserving(t: &dyn OrthAdd, mode: DpMode) -> Result<DpReport> {
    let space = t.input_space();
    match mode {
        DpMode::ExactMatrix => {
            let m = t.as_matrix().ok_or_else(|| {
                Error::Unsupported(format!("{} operator has no matrix form", t.family()))
            })?;
            let violation = m.dp_violation();
            let mut witness = None;
            if let Some((_, j1, j2)) = violation {
                // Unit coordinates first, then the rest of a small grid.
                let probes = [qi(1), qi(-1), qi(2), qi(-2), q(1, 2), q(-1, 2)];
                'search: for r in &probes {
                    for s in &probes {
                        let x = LatVec::unit(&space, j1, r.clone());
                        let y = LatVec::unit(&space, j2, s.clone());
                        if let Some(w) = dp_witness(t, x, y)? {
                            witness = Some(w);
                            break 'search;
                        }
                    }
                }
            }
            Ok(DpReport {
                dp: violation.is_none(),
                violation,
                witness,
            })
        }
        DpMode::Sampled { trials, seed } => {
            let mut rng = random::rng(seed);
            for _ in 0..trials {
                let (x, y) = random::disjoint_pair(&mut rng, &space);
                if let Some(w) = dp_witness(t, x, y)? {
                    return Ok(DpReport {
                        dp: false,
                        violation: None,
                        witness: Some(w),
                    });
                }
            }
            Ok(DpReport {
                dp: true,
                violation: None,
                witness: None,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominanceReport {
    pub samples: usize,
    /// `|S|(x) ≤ |T|(x)` on every sample.
    pub dominated: bool,
    pub t_dp: bool,
    pub s_dp: bool,
    /// `|S(x)| ≤ |S|(x)` and `|T(x)| ≤ |T|(x)` on every sample.
    pub modulus_bound: bool,
    /// Dominated by a DP operator implies DP.
    pub solid: bool,
}

fn modulus_value(t: &dyn OrthAdd, m: &Option<UrysonMatrix>, x: &LatVec) -> Result<LatVec> {
    match m {
        Some(m) => m.modulus_at(x),
        None => Ok(calculus::modulus(t, x, Caps::default())?.value),
    }
}

fn dp_of(t: &dyn OrthAdd, seed: u64) -> Result<bool> {
    let mode = if t.as_matrix().is_some() {
        DpMode::ExactMatrix
    } else {
        DpMode::Sampled { trials: 200, seed }
    };
    Ok(is_disjointness_preserving(t, mode)?.dp)
}

pub fn dominance_and_solidity_check(
    s: &dyn OrthAdd,
    t: &dyn OrthAdd,
    samples: usize,
    seed: u64,
) -> Result<DominanceReport> {
    MeasureSpace::check_same(&s.input_space(), &t.input_space())?;
    MeasureSpace::check_same(&s.output_space(), &t.output_space())?;
    let sm = s.as_matrix();
    let tm = t.as_matrix();
    let space = t.input_space();
    let mut rng = random::rng(seed);
    let mut dominated = true;
    let mut modulus_bound = true;
    for _ in 0..samples {
        let x = random::grid_vector(&mut rng, &space);
        let ms = modulus_value(s, &sm, &x)?;
        let mt = modulus_value(t, &tm, &x)?;
        dominated &= ms.le(&mt)?;
        modulus_bound &= s.apply(&x)?.abs().le(&ms)? && t.apply(&x)?.abs().le(&mt)?;
    }
    let t_dp = dp_of(t, seed)?;
    let s_dp = dp_of(s, seed)?;
    Ok(DominanceReport {
        samples,
        dominated,
        t_dp,
        s_dp,
        modulus_bound,
        solid: !(dominated && t_dp) || s_dp,
    })
}

/// `S ≤ T`: entrywise on the grid for operators with a matrix form, which is
/// the same as `T(x) − S(x) ≥ 0` for every grid-valued `x`.
pub fn operator_le(s: &dyn OrthAdd, t: &dyn OrthAdd, grid: &[Q]) -> Result<bool> {
    let (Some(sm), Some(tm)) = (s.as_matrix(), t.as_matrix()) else {
        return Err(Error::Unsupported(
            "operator order needs matrix forms on both sides".into(),
        ));
    };
    sm.le_on_grid(&tm, grid)
}

/// `T ≥ 0`: structurally, or else by every entry being nonnegative on the grid.
pub fn is_positive_operator(t: &dyn OrthAdd, grid: &[Q]) -> Result<bool> {
    let Some(m) = t.as_matrix() else {
        return Err(Error::Unsupported(format!(
            "{} operator has no matrix form",
            t.family()
        )));
    };
    if m.is_positive() {
        return Ok(true);
    }
    for f in m.rows().iter().flatten() {
        for r in grid {
            if f.eval(r)?.is_negative() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
