//! Certified coefficient rounding and the alternating-sum permutation bound.
//!
//! Both lemmas return witnesses whose bound is checked in exact arithmetic;
//! the permutation bound `√(2αK)` is compared on squares.

mod linalg;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use linalg::{kernel_vector, rref};

use crate::error::{Error, Result};
use crate::lattice::{LatVec, MeasureSpace};
use crate::rational::{fmt_q, ser, Q};

/// Largest `d · count` for which the exhaustive θ search is attempted.
pub const EXHAUSTIVE_ROUNDING_CAP: usize = 20;
/// Largest `2n` for the exhaustive permutation search.
pub const PERMUTATION_BRUTE_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundingWitness {
    pub theta: Vec<u8>,
    /// `∥Σ (λ_i − θ_i) x_i∥`.
    #[serde(serialize_with = "ser::q")]
    pub achieved: Q,
    /// `(d/2) · max_i ∥x_i∥`.
    #[serde(serialize_with = "ser::q")]
    pub bound: Q,
    /// Kernel-walk steps taken.
    pub steps: usize,
    /// Whether the exhaustive search replaced the walk.
    pub exhaustive: bool,
}

fn common_space(vectors: &[LatVec]) -> Result<Option<std::sync::Arc<MeasureSpace>>> {
    let Some(first) = vectors.first() else {
        return Ok(None);
    };
    for v in &vectors[1..] {
        first.check_same_space(v)?;
    }
    Ok(Some(first.space().clone()))
}

fn residual(vectors: &[LatVec], lambdas: &[Q], theta: &[u8]) -> Q {
    let space = vectors[0].space();
    let mut acc = LatVec::zero(space);
    for ((x, l), t) in vectors.iter().zip(lambdas).zip(theta) {
        let c = l - Q::from_integer((*t).into());
        if !c.is_zero() {
            acc = acc.add(&x.scale(&c)).expect("common space");
        }
    }
    acc.norm_l1()
}

/// Rounds `λ ∈ [0,1]^N` to `θ ∈ {0,1}^N` with
/// `∥Σ (λ_i − θ_i) x_i∥ ≤ (d/2) max ∥x_i∥`, where `d` is the dimension of the
/// space of the `x_i` and norms are weighted L1.
///
/// While more than `d` coordinates are fractional, λ moves along a kernel
/// vector of the fractional columns (first free variable set to 1) in the
/// direction that reaches `{0, 1}` with the smaller step, positive on ties.
/// The at most `d` remaining fractional coordinates round to the nearer end,
/// `1/2` going to 0.
pub fn round_coefficients(vectors: &[LatVec], lambdas: &[Q]) -> Result<RoundingWitness> {
    if vectors.len() != lambdas.len() {
        return Err(Error::contract(format!(
            "{} vectors but {} coefficients",
            vectors.len(),
            lambdas.len()
        )));
    }
    for l in lambdas {
        if l.is_negative() || *l > Q::one() {
            return Err(Error::contract(format!(
                "coefficient {} is outside [0, 1]",
                fmt_q(l)
            )));
        }
    }
    let Some(space) = common_space(vectors)? else {
        return Ok(RoundingWitness {
            theta: vec![],
            achieved: Q::zero(),
            bound: Q::zero(),
            steps: 0,
            exhaustive: false,
        });
    };
    let d = space.len();
    let max_norm = vectors
        .iter()
        .map(LatVec::norm_l1)
        .max()
        .expect("nonempty");
    let bound = Q::from_integer(d.into()) * max_norm / Q::from_integer(2.into());

    let is_frac = |l: &Q| l.is_positive() && *l < Q::one();
    let mut lam = lambdas.to_vec();
    let mut steps = 0;
    loop {
        let frac: Vec<usize> = (0..lam.len()).filter(|&i| is_frac(&lam[i])).collect();
        if frac.len() <= d {
            break;
        }
        let m: Vec<Vec<Q>> = (0..d)
            .map(|r| frac.iter().map(|&i| vectors[i].coeff(r).clone()).collect())
            .collect();
        let v = kernel_vector(&m, frac.len())
            .ok_or_else(|| Error::internal("more fractional columns than rows but no kernel"))?;
        let step = |dir: &Q| {
            frac.iter()
                .zip(&v)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&i, c)| {
                    let c = c * dir;
                    if c.is_positive() {
                        (Q::one() - &lam[i]) / c
                    } else {
                        -&lam[i] / c
                    }
                })
                .min()
                .expect("kernel vector is nonzero")
        };
        let up = step(&Q::one());
        let down = step(&-Q::one());
        let t = if down < up { -down } else { up };
        for (&i, c) in frac.iter().zip(&v) {
            lam[i] += &t * c;
        }
        steps += 1;
        if steps > lambdas.len() {
            return Err(Error::internal("kernel walk exceeded its step bound"));
        }
    }
    let half = Q::new(1.into(), 2.into());
    let theta: Vec<u8> = lam.iter().map(|l| u8::from(*l > half)).collect();
    let achieved = residual(vectors, lambdas, &theta);
    if achieved <= bound {
        return Ok(RoundingWitness {
            theta,
            achieved,
            bound,
            steps,
            exhaustive: false,
        });
    }
    exhaustive_rounding(vectors, lambdas, bound, steps)
}

fn exhaustive_rounding(vectors: &[LatVec], lambdas: &[Q], bound: Q, steps: usize) -> Result<RoundingWitness> {
    let d = vectors[0].dim();
    let n = vectors.len();
    if d * n > EXHAUSTIVE_ROUNDING_CAP {
        return Err(Error::internal(
            "rounding walk missed its bound and the instance is too large for exhaustive search",
        ));
    }
    let mut best: Option<(Q, Vec<u8>)> = None;
    for bits in 0u64..1 << n {
        let theta: Vec<u8> = (0..n).map(|i| (bits >> i & 1) as u8).collect();
        let r = residual(vectors, lambdas, &theta);
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, theta));
        }
    }
    let (achieved, theta) = best.expect("at least one θ");
    if achieved > bound {
        return Err(Error::internal("no rounding meets the bound"));
    }
    Ok(RoundingWitness {
        theta,
        achieved,
        bound,
        steps,
        exhaustive: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationMode {
    Brute,
    GreedyVerified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermutationWitness {
    /// 1-based permutation of `1..=2n`; the sum is `Σ (−1)^i z_{τ(i)}`.
    pub tau: Vec<usize>,
    #[serde(serialize_with = "ser::q")]
    pub achieved: Q,
    #[serde(serialize_with = "ser::q")]
    pub achieved_sq: Q,
    /// `α = ∥⋁ z_i∥`.
    #[serde(serialize_with = "ser::q")]
    pub alpha: Q,
    /// `K = Σ ∥z_i∥`.
    #[serde(serialize_with = "ser::q")]
    pub k: Q,
    /// `2αK`.
    #[serde(serialize_with = "ser::q")]
    pub bound_sq: Q,
    /// `"brute"` or `"greedy"`: the search that produced τ.
    pub found_by: &'static str,
}

impl PermutationWitness {
    pub fn certified(&self) -> bool {
        self.achieved_sq <= self.bound_sq
    }
}

// τ placing `minus` (ascending) at odd positions and `plus` at even ones.
fn interleave(minus: &[usize], plus: &[usize]) -> Vec<usize> {
    minus
        .iter()
        .zip(plus)
        .flat_map(|(&m, &p)| [m + 1, p + 1])
        .collect()
}

fn split_norm(z: &[LatVec], minus: &[usize], plus: &[usize]) -> Q {
    let mut acc = LatVec::zero(z[0].space());
    for &i in plus {
        acc = acc.add(&z[i]).expect("common space");
    }
    for &i in minus {
        acc = acc.sub(&z[i]).expect("common space");
    }
    acc.norm_l1()
}

/// Finds τ with `∥Σ_{i=1}^{2n} (−1)^i z_{τ(i)}∥ ≤ √(2αK)` for positive `z_i`.
///
/// Brute mode scans the minus sets in lexicographic order and keeps the
/// first minimum. Greedy mode places the `z_i` by descending norm on the side
/// with the smaller partial-sum norm and falls back to brute force when its
/// answer misses the bound and `2n ≤ brute_cap`.
pub fn signed_permutation(z: &[LatVec], mode: PermutationMode, brute_cap: usize) -> Result<PermutationWitness> {
    if !z.len().is_multiple_of(2) {
        return Err(Error::contract(format!(
            "signed permutation needs an even number of vectors, got {}",
            z.len()
        )));
    }
    for (i, v) in z.iter().enumerate() {
        if !v.is_positive() {
            return Err(Error::contract(format!("z_{} is not positive", i + 1)));
        }
    }
    let Some(space) = common_space(z)? else {
        return Ok(PermutationWitness {
            tau: vec![],
            achieved: Q::zero(),
            achieved_sq: Q::zero(),
            alpha: Q::zero(),
            k: Q::zero(),
            bound_sq: Q::zero(),
            found_by: "brute",
        });
    };
    let mut sup = LatVec::zero(&space);
    for v in z {
        sup = sup.join(v)?;
    }
    let alpha = sup.norm_l1();
    let k = z.iter().fold(Q::zero(), |acc, v| acc + v.norm_l1());
    let bound_sq = Q::from_integer(2.into()) * &alpha * &k;
    let witness = |minus: Vec<usize>, plus: Vec<usize>, found_by| {
        let achieved = split_norm(z, &minus, &plus);
        PermutationWitness {
            tau: interleave(&minus, &plus),
            achieved_sq: &achieved * &achieved,
            achieved,
            alpha: alpha.clone(),
            k: k.clone(),
            bound_sq: bound_sq.clone(),
            found_by,
        }
    };
    let brute = || -> Result<PermutationWitness> {
        if z.len() > brute_cap {
            return Err(Error::CapExceeded {
                what: "signed permutation brute-force length",
                size: z.len(),
                cap: brute_cap,
            });
        }
        let (minus, plus) = brute_split(z);
        let w = witness(minus, plus, "brute");
        if !w.certified() {
            return Err(Error::internal("exhaustive permutation search missed the bound"));
        }
        Ok(w)
    };
    match mode {
        PermutationMode::Brute => brute(),
        PermutationMode::GreedyVerified => {
            let (minus, plus) = greedy_split(z);
            let w = witness(minus, plus, "greedy");
            if w.certified() {
                return Ok(w);
            }
            if z.len() <= brute_cap {
                return brute();
            }
            Err(Error::Infeasible(format!(
                "greedy permutation reached {} against bound² {} and the instance exceeds the brute-force cap {brute_cap}",
                fmt_q(&w.achieved_sq),
                fmt_q(&w.bound_sq)
            )))
        }
    }
}

fn brute_split(z: &[LatVec]) -> (Vec<usize>, Vec<usize>) {
    let m = z.len();
    let n = m / 2;
    let mut best: Option<(Q, u64)> = None;
    // Size-n subsets in lexicographic order of their sorted element lists.
    let mut comb: Vec<usize> = (0..n).collect();
    loop {
        let bits = comb.iter().fold(0u64, |b, &i| b | 1 << i);
        let (minus, plus) = sides(m, bits);
        let v = split_norm(z, &minus, &plus);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, bits));
        }
        let Some(i) = (0..n).rev().find(|&i| comb[i] < m - n + i) else {
            break;
        };
        comb[i] += 1;
        for j in i + 1..n {
            comb[j] = comb[j - 1] + 1;
        }
    }
    sides(m, best.expect("at least one split").1)
}

fn sides(m: usize, minus_bits: u64) -> (Vec<usize>, Vec<usize>) {
    (0..m).partition(|&i| minus_bits >> i & 1 == 1)
}

fn greedy_split(z: &[LatVec]) -> (Vec<usize>, Vec<usize>) {
    let n = z.len() / 2;
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].norm_l1().cmp(&z[a].norm_l1()));
    let space = z[0].space();
    let (mut minus, mut plus) = (Vec::new(), Vec::new());
    let (mut sm, mut sp) = (LatVec::zero(space), LatVec::zero(space));
    for i in order {
        let to_minus = if minus.len() == n {
            false
        } else if plus.len() == n {
            true
        } else {
            sm.norm_l1() <= sp.norm_l1()
        };
        if to_minus {
            sm = sm.add(&z[i]).expect("common space");
            minus.push(i);
        } else {
            sp = sp.add(&z[i]).expect("common space");
            plus.push(i);
        }
    }
    minus.sort_unstable();
    plus.sort_unstable();
    (minus, plus)
}
