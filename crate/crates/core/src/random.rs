//! Seeded generators for property suites. Every draw goes through a
//! [`ChaCha8Rng`] so a seed fixes the whole instance stream.

use std::sync::Arc;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{AtomSet, LatVec, MeasureSpace};
use crate::operators::{ScalarFunc, UrysonMatrix};
use crate::rational::{default_grid, q, qi, Q};

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a/b` with `|a| ≤ 4`, `1 ≤ b ≤ 4`.
pub fn small_rational(rng: &mut SuiteRng) -> Q {
    q(rng.gen_range(-4..=4), rng.gen_range(1..=4))
}

pub fn small_positive(rng: &mut SuiteRng) -> Q {
    q(rng.gen_range(1..=4), rng.gen_range(1..=4))
}

pub fn grid_value(rng: &mut SuiteRng) -> Q {
    default_grid()
        .choose(rng)
        .cloned()
        .expect("grid is nonempty")
}

pub fn grid_vector(rng: &mut SuiteRng, space: &Arc<MeasureSpace>) -> LatVec {
    let coeffs = (0..space.len()).map(|_| grid_value(rng)).collect();
    LatVec::new(space.clone(), coeffs).expect("matching length")
}

pub fn rational_vector(rng: &mut SuiteRng, space: &Arc<MeasureSpace>) -> LatVec {
    let coeffs = (0..space.len()).map(|_| small_rational(rng)).collect();
    LatVec::new(space.clone(), coeffs).expect("matching length")
}

/// Coefficients in `[0, 4]`, each zero with probability 1/4.
pub fn positive_vector(rng: &mut SuiteRng, space: &Arc<MeasureSpace>) -> LatVec {
    let coeffs = (0..space.len())
        .map(|_| {
            if rng.gen_ratio(1, 4) {
                Q::zero()
            } else {
                small_positive(rng)
            }
        })
        .collect();
    LatVec::new(space.clone(), coeffs).expect("matching length")
}

/// A space with `n` atoms and weights `a/b`, `1 ≤ a, b ≤ 4`.
pub fn weighted_space(rng: &mut SuiteRng, n: usize) -> Arc<MeasureSpace> {
    MeasureSpace::new((0..n).map(|_| small_positive(rng)).collect()).expect("positive weights")
}

pub fn random_mask(rng: &mut SuiteRng, atoms: &[usize]) -> AtomSet {
    atoms.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}

/// A random vector split along a random mask into two disjoint parts.
pub fn disjoint_pair(rng: &mut SuiteRng, space: &Arc<MeasureSpace>) -> (LatVec, LatVec) {
    let x = rational_vector(rng, space);
    let all: Vec<usize> = (0..space.len()).collect();
    let mask = random_mask(rng, &all);
    let rest = x.support().difference(&mask);
    (x.restrict(&mask), x.restrict(&rest))
}

/// A random scalar section; nonnegative when `positive` is set.
pub fn random_func(rng: &mut SuiteRng, positive: bool) -> ScalarFunc {
    let c = if positive {
        small_positive(rng)
    } else {
        small_rational(rng)
    };
    match rng.gen_range(0..7) {
        0 => ScalarFunc::zero(),
        1 if positive => ScalarFunc::Poly(vec![qi(0), qi(0), c]),
        1 => ScalarFunc::Poly(vec![qi(0), small_rational(rng), c]),
        2 => ScalarFunc::abs_power(c, qi(rng.gen_range(1..=2))),
        3 => ScalarFunc::Threshold { scale: c },
        4 => ScalarFunc::Indicator { value: c },
        5 => {
            let (l, r) = if positive {
                (small_positive(rng), small_positive(rng))
            } else {
                (small_rational(rng), small_rational(rng))
            };
            ScalarFunc::PiecewiseLinear(vec![(qi(-1), l), (qi(0), qi(0)), (qi(1), r)])
        }
        _ => {
            let neg = random_func(rng, positive);
            ScalarFunc::SignSplit {
                pos: Box::new(ScalarFunc::linear(c)),
                neg: Box::new(neg),
            }
        }
    }
}

/// A random matrix operator; each entry is nonzero with probability `density`.
pub fn random_matrix(
    rng: &mut SuiteRng,
    input: &Arc<MeasureSpace>,
    output: &Arc<MeasureSpace>,
    positive: bool,
    density: f64,
) -> UrysonMatrix {
    let rows = (0..output.len())
        .map(|_| {
            (0..input.len())
                .map(|_| {
                    if rng.gen_bool(density) {
                        random_func(rng, positive)
                    } else {
                        ScalarFunc::zero()
                    }
                })
                .collect()
        })
        .collect();
    UrysonMatrix::new(input.clone(), output.clone(), rows).expect("valid random matrix")
}
