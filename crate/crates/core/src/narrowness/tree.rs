use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{AtomSet, LatVec};
use crate::operators::{FragmentTable, OrthAdd};
use crate::rational::{ser, Q};
use crate::rounding::round_coefficients;

use super::DecompositionWitness;

/// Halving check: `∥T(e_i) − 2^{−m} T(e)∥ ≤ D (1 − 2^{−m})` at every level,
/// where `D` is the largest realized split gap `∥T(left) − T(right)∥₁`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalvingCheck {
    #[serde(serialize_with = "ser::q")]
    pub max_split_gap: Q,
    #[serde(serialize_with = "ser::qs")]
    pub deviation: Vec<Q>,
    #[serde(serialize_with = "ser::qs")]
    pub bound: Vec<Q>,
    pub holds: bool,
}

/// Binary tree of fragments of `e`; node `n` (1-based) splits into `2n`, `2n+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisjointTree {
    pub base: LatVec,
    /// Masks of `e_1 .. e_{2^{depth+1}−1}`, stored from index 0.
    pub nodes: Vec<AtomSet>,
    pub depth: usize,
    /// `γ_m = max_{2^m ≤ i < 2^{m+1}} ∥T(e_i)∥₁`.
    #[serde(serialize_with = "ser::qs")]
    pub gamma: Vec<Q>,
    /// `|∥T(e_{2n})∥ − ∥T(e_{2n+1})∥|` for each internal node `n`.
    #[serde(serialize_with = "ser::qs")]
    pub norm_gaps: Vec<Q>,
    pub halving: HalvingCheck,
    pub truncated: Option<String>,
}

impl DisjointTree {
    /// The fragment `e_n`, 1-based.
    pub fn node(&self, n: usize) -> LatVec {
        self.base.restrict(&self.nodes[n - 1])
    }

    pub fn level(&self, m: usize) -> std::ops::Range<usize> {
        (1 << m)..(1 << (m + 1))
    }
}

// Split of a node minimizing the norm gap; the last atom stays right and the
// smallest left mask wins ties.
fn best_split(t: &dyn OrthAdd, x: &LatVec, cap: usize) -> Result<(AtomSet, AtomSet, Q)> {
    let table = FragmentTable::new(t, x, cap)?;
    let k = table.support().len();
    let full = table.full();
    let norms: Vec<Q> = table.values().iter().map(LatVec::norm_l1).collect();
    let mut best: Option<(u64, Q)> = None;
    for bits in 1..(1u64 << (k - 1)) {
        let gap = (&norms[bits as usize] - &norms[(full ^ bits) as usize]).abs();
        if best.as_ref().is_none_or(|(_, g)| gap < *g) {
            best = Some((bits, gap));
        }
    }
    let (bits, gap) = best.expect("at least two atoms");
    Ok((table.mask(bits), table.mask(full ^ bits), gap))
}

/// Builds a disjoint tree of depth `depth` under `e` by splitting every node
/// into the two fragments whose images have the closest norms.
///
/// Splitting stops at the first level holding a node with fewer than two
/// atoms; the tree is then returned at the reached depth with a notice.
pub fn balanced_tree(t: &dyn OrthAdd, e: &LatVec, depth: usize, cap: usize) -> Result<DisjointTree> {
    crate::lattice::MeasureSpace::check_same(&t.input_space(), e.space())?;
    if depth >= 63 {
        return Err(Error::CapExceeded {
            what: "disjoint tree depth",
            size: depth,
            cap: 62,
        });
    }
    let norm = |m: &AtomSet| -> Result<Q> { Ok(t.apply(&e.restrict(m))?.norm_l1()) };
    let mut nodes = vec![e.support()];
    let mut gamma = vec![norm(&nodes[0])?];
    let mut norm_gaps = Vec::new();
    let mut split_gaps = Vec::new();
    let mut truncated = None;
    let mut reached = 0;
    for m in 0..depth {
        let level = (1usize << m)..(1usize << (m + 1));
        if let Some(n) = level.clone().find(|&n| nodes[n - 1].len() < 2) {
            truncated = Some(format!(
                "node {n} at level {m} has {} atom(s) and cannot be split; tree stops at depth {m}",
                nodes[n - 1].len()
            ));
            break;
        }
        let mut next = Vec::with_capacity(2 * level.len());
        for n in level {
            let x = e.restrict(&nodes[n - 1]);
            let (l, r, gap) = best_split(t, &x, cap)?;
            split_gaps.push(t.apply(&e.restrict(&l))?.sub(&t.apply(&e.restrict(&r))?)?.norm_l1());
            norm_gaps.push(gap);
            next.push(l);
            next.push(r);
        }
        let mut g = Q::zero();
        for mask in &next {
            g = g.max(norm(mask)?);
        }
        gamma.push(g);
        nodes.extend(next);
        reached = m + 1;
    }

    let root = t.apply(e)?;
    let big_d = split_gaps.iter().cloned().fold(Q::zero(), Q::max);
    let mut deviation = Vec::with_capacity(reached + 1);
    let mut bound = Vec::with_capacity(reached + 1);
    let mut scale = Q::one();
    for m in 0..=reached {
        let target = root.scale(&scale);
        let mut dev = Q::zero();
        for n in (1usize << m)..(1usize << (m + 1)) {
            dev = dev.max(t.apply(&e.restrict(&nodes[n - 1]))?.sub(&target)?.norm_l1());
        }
        deviation.push(dev);
        bound.push(&big_d * (Q::one() - &scale));
        scale /= Q::from_integer(2.into());
    }
    let holds = deviation.iter().zip(&bound).all(|(d, b)| d <= b);
    if !holds {
        return Err(Error::internal("halving deviation exceeds the accumulated split gaps"));
    }
    Ok(DisjointTree {
        base: e.clone(),
        nodes,
        depth: reached,
        gamma,
        norm_gaps,
        halving: HalvingCheck {
            max_split_gap: big_d,
            deviation,
            bound,
            holds,
        },
        truncated,
    })
}

/// Decomposition of `e` from the level-`m` leaves of a balanced tree: the
/// coefficients `1/2` on the vectors `T(e_i)` are rounded to `θ ∈ {0,1}` and
/// `f₁`, `f₂` collect the leaves with `θ_i = 0` and `θ_i = 1`. The result
/// satisfies `∥T(f₁) − T(f₂)∥ ≤ dim(F) · γ_m`.
pub fn rounding_decomposition(t: &dyn OrthAdd, e: &LatVec, level: usize, cap: usize) -> Result<(DecompositionWitness, DisjointTree)> {
    let tree = balanced_tree(t, e, level, cap)?;
    if tree.depth < level {
        return Err(Error::contract(format!(
            "no balanced tree of depth {level}: {}",
            tree.truncated.as_deref().unwrap_or("truncated")
        )));
    }
    let leaves: Vec<usize> = tree.level(level).collect();
    let vectors = leaves
        .iter()
        .map(|&n| t.apply(&tree.node(n)))
        .collect::<Result<Vec<_>>>()?;
    let half = Q::new(1.into(), 2.into());
    let rounding = round_coefficients(&vectors, &vec![half; vectors.len()])?;
    let mut e1 = AtomSet::default();
    let mut e2 = AtomSet::default();
    for (&n, &th) in leaves.iter().zip(&rounding.theta) {
        let mask = &tree.nodes[n - 1];
        if th == 0 {
            e1 = e1.union(mask);
        } else {
            e2 = e2.union(mask);
        }
    }
    let w = DecompositionWitness::from_masks(t, e, e1, e2)?;
    let dim = Q::from_integer(t.output_space().len().into());
    if w.discrepancy > dim * &tree.gamma[level] {
        return Err(Error::internal("rounding decomposition exceeds dim(F)·γ_m"));
    }
    Ok((w, tree))
}
