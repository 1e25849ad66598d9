use super::{AtomSet, LatVec};
use crate::error::{Error, Result};

/// A finite disjoint decomposition of a vector: a set partition of its support.
///
/// Blocks are nonempty, pairwise disjoint, cover `supp(x)` and are kept in
/// canonical order (ascending smallest atom).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    base: LatVec,
    blocks: Vec<AtomSet>,
}

impl Partition {
    pub fn new(base: LatVec, mut blocks: Vec<AtomSet>) -> Result<Self> {
        let support = base.support();
        let mut seen = AtomSet::default();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::contract("partition blocks must be nonempty"));
            }
            if !b.is_disjoint(&seen) {
                return Err(Error::contract(format!(
                    "partition block {:?} overlaps an earlier block",
                    b.as_slice()
                )));
            }
            seen = seen.union(b);
        }
        if seen != support {
            return Err(Error::contract(format!(
                "partition blocks cover {:?}, support is {:?}",
                seen.as_slice(),
                support.as_slice()
            )));
        }
        blocks.sort_by_key(|b| b.as_slice()[0]);
        Ok(Partition { base, blocks })
    }

    /// Partition from block bit masks relative to `support`. Caller guarantees validity.
    pub(crate) fn from_bits(base: &LatVec, support: &[usize], blocks: &[u64]) -> Self {
        let mut blocks: Vec<AtomSet> = blocks
            .iter()
            .map(|&b| AtomSet::from_bits(support, b))
            .collect();
        blocks.sort_by_key(|b| b.as_slice()[0]);
        Partition {
            base: base.clone(),
            blocks,
        }
    }

    /// `{supp(x)}`, or no blocks at all when `x = 0`.
    pub fn coarsest(base: &LatVec) -> Self {
        let support = base.support();
        let blocks = if support.is_empty() { vec![] } else { vec![support] };
        Partition {
            base: base.clone(),
            blocks,
        }
    }

    /// All singletons.
    pub fn finest(base: &LatVec) -> Self {
        let blocks = base
            .support()
            .iter()
            .map(|&a| AtomSet::new(vec![a]))
            .collect();
        Partition {
            base: base.clone(),
            blocks,
        }
    }

    pub fn base(&self) -> &LatVec {
        &self.base
    }

    pub fn blocks(&self) -> &[AtomSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The fragments `x · 1_B` of the blocks, in block order.
    pub fn fragments(&self) -> Vec<LatVec> {
        self.blocks.iter().map(|b| self.base.restrict(b)).collect()
    }

    pub fn block_masks(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.as_slice().to_vec()).collect()
    }
}

/// Serializes as the list of blocks.
impl serde::Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(s)
    }
}

/// `coarse ≤ fine`: every block of `fine` lies inside a block of `coarse`.
pub fn partition_refines(coarse: &Partition, fine: &Partition) -> Result<bool> {
    same_base(coarse, fine)?;
    Ok(fine
        .blocks
        .iter()
        .all(|f| coarse.blocks.iter().any(|c| f.is_subset(c))))
}

/// `{x ∧ y : x ∈ p1, y ∈ p2}` with empty intersections dropped.
pub fn common_refinement(p1: &Partition, p2: &Partition) -> Result<Partition> {
    same_base(p1, p2)?;
    let blocks: Vec<AtomSet> = p1
        .blocks
        .iter()
        .flat_map(|a| p2.blocks.iter().map(move |b| a.intersection(b)))
        .filter(|b| !b.is_empty())
        .collect();
    Partition::new(p1.base.clone(), blocks)
}

fn same_base(p1: &Partition, p2: &Partition) -> Result<()> {
    if p1.base != p2.base {
        return Err(Error::SpaceMismatch(
            "partitions decompose different base vectors".into(),
        ));
    }
    Ok(())
}

/// Bell number `B(n)`, the number of set partitions of an `n`-set.
pub fn bell_number(n: usize) -> u128 {
    // Bell triangle.
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().expect("nonempty row")];
        for v in &row {
            let last = *next.last().expect("nonempty row");
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

/// Restricted growth strings of length `n` in lexicographic order, optionally
/// limited to at most `max_blocks` blocks. Yields block bit masks ordered by
/// their smallest element.
pub struct RgsIter {
    codes: Vec<usize>,
    max_blocks: usize,
    done: bool,
}

impl RgsIter {
    pub fn new(n: usize, max_blocks: Option<usize>) -> Self {
        let max_blocks = max_blocks.unwrap_or(n.max(1));
        RgsIter {
            codes: vec![0; n],
            max_blocks,
            done: max_blocks == 0 && n > 0,
        }
    }

    fn blocks(&self) -> Vec<u64> {
        let count = self.codes.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![0u64; count];
        for (i, &c) in self.codes.iter().enumerate() {
            blocks[c] |= 1 << i;
        }
        blocks
    }

    fn advance(&mut self) {
        let n = self.codes.len();
        let mut prefix_max = vec![0usize; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(self.codes[i - 1]);
        }
        for i in (1..n).rev() {
            let c = self.codes[i];
            if c <= prefix_max[i] && c + 1 < self.max_blocks {
                self.codes[i] = c + 1;
                for v in &mut self.codes[i + 1..] {
                    *v = 0;
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for RgsIter {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let out = self.blocks();
        self.advance();
        Some(out)
    }
}

/// All partitions of `supp(x)`, coarsest first and finest last.
pub fn enumerate_partitions(
    x: &LatVec,
    max_blocks: Option<usize>,
    cap: usize,
) -> Result<Partitions> {
    let support = x.support().as_slice().to_vec();
    if support.len() > cap.min(63) {
        return Err(Error::CapExceeded {
            what: "partition enumeration support",
            size: support.len(),
            cap,
        });
    }
    Ok(Partitions {
        base: x.clone(),
        rgs: RgsIter::new(support.len(), max_blocks),
        support,
    })
}

pub struct Partitions {
    base: LatVec,
    support: Vec<usize>,
    rgs: RgsIter,
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let blocks = self.rgs.next()?;
        Some(Partition::from_bits(&self.base, &self.support, &blocks))
    }
}
