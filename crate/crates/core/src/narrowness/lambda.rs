use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Caps, LatVec, Partition, RgsIter};
use crate::operators::{Certificate, Extremum, FragmentTable, OrthAdd};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaStrategy {
    Brute,
    BranchAndBound,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub pruned: u64,
}

/// `λ_T(x) = ⋀_{π ∈ Π_x} ⋁_{y ∈ π} |T(y)|` with its certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnfloStarbirdResult {
    pub value: LatVec,
    pub certificate: Certificate<Partition>,
    pub stats: SearchStats,
    /// `⋁_a T(x·1_{a})` when every fragment has `T(y) ≥ 0`; then it equals `value`.
    pub shortcut: Option<LatVec>,
}

fn sup_of(table: &[LatVec], blocks: &[u64], zero: &LatVec) -> LatVec {
    blocks.iter().fold(zero.clone(), |acc, &b| {
        acc.join(&table[b as usize]).expect("output space")
    })
}

/// Computes `λ_T(x)` exactly over all partitions of `supp(x)`.
///
/// Branch and bound builds partitions block by block, each new block holding
/// the smallest unassigned atom. A node's bound is the join of its closed
/// blocks with `⋁_a min_{S ∋ a} |T(S)|` over the unassigned atoms; it is cut
/// when the bound is at least the incumbent in every coordinate. Both
/// strategies return the same value; per-coordinate certificates may name
/// different partitions.
pub fn lambda_es(t: &dyn OrthAdd, x: &LatVec, strategy: LambdaStrategy, caps: Caps) -> Result<EnfloStarbirdResult> {
    let k = x.support().len();
    if k > caps.partitions {
        return Err(Error::CapExceeded {
            what: "lambda partition enumeration support",
            size: k,
            cap: caps.partitions,
        });
    }
    let table = FragmentTable::new(t, x, caps.fragments.max(k))?;
    let abs: Vec<LatVec> = table.values().iter().map(LatVec::abs).collect();
    let zero = LatVec::zero(&t.output_space());

    let (ext, stats) = match strategy {
        LambdaStrategy::Brute => {
            let ext = crate::operators::extremize(
                || RgsIter::new(k, None).map(|b| {
                    let v = sup_of(&abs, &b, &zero);
                    (b, v)
                }),
                false,
            );
            let nodes = RgsIter::new(k, None).count() as u64;
            (ext, SearchStats { nodes, pruned: 0 })
        }
        LambdaStrategy::BranchAndBound => branch_and_bound(&abs, k, &zero),
    };

    let positive = table.values().iter().all(LatVec::is_positive);
    let shortcut = if positive {
        let finest: Vec<u64> = (0..k).map(|i| 1u64 << i).collect();
        let s = sup_of(table.values(), &finest, &zero);
        if s != ext.value {
            return Err(Error::internal(
                "finest-partition shortcut differs from the infimum for a positive operator",
            ));
        }
        Some(s)
    } else {
        None
    };
    Ok(EnfloStarbirdResult {
        value: ext.value,
        certificate: ext.certificate.map(|b| table.partition(&b)),
        stats,
        shortcut,
    })
}

struct Bnb<'a> {
    abs: &'a [LatVec],
    lower: Vec<LatVec>,
    best: Option<LatVec>,
    who: Vec<Vec<u64>>,
    target: Option<&'a LatVec>,
    found: Option<Vec<u64>>,
    stats: SearchStats,
}

impl Bnb<'_> {
    fn bound(&self, closed: &LatVec, open: u64) -> LatVec {
        let mut b = closed.clone();
        let mut rest = open;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            b = b.join(&self.lower[a]).expect("output space");
        }
        b
    }

    fn cut(&self, bound: &LatVec) -> bool {
        if let Some(target) = self.target {
            return !bound.le(target).expect("output space");
        }
        match &self.best {
            Some(best) => best.le(bound).expect("output space"),
            None => false,
        }
    }

    fn search(&mut self, open: u64, closed: &LatVec, blocks: &mut Vec<u64>) {
        if self.found.is_some() {
            return;
        }
        self.stats.nodes += 1;
        if open == 0 {
            self.leaf(closed, blocks);
            return;
        }
        let low = open & open.wrapping_neg();
        let rest = open ^ low;
        // Subsets of `rest` in increasing numeric order.
        let mut sub = 0u64;
        loop {
            let block = sub | low;
            let value = closed.join(&self.abs[block as usize]).expect("output space");
            let left = open & !block;
            if self.cut(&self.bound(&value, left)) {
                self.stats.pruned += 1;
            } else {
                blocks.push(block);
                self.search(left, &value, blocks);
                blocks.pop();
            }
            if sub == rest || self.found.is_some() {
                break;
            }
            sub = (sub.wrapping_sub(rest)) & rest;
        }
    }

    fn leaf(&mut self, value: &LatVec, blocks: &[u64]) {
        if let Some(target) = self.target {
            if value == target {
                self.found = Some(blocks.to_vec());
            }
            return;
        }
        match &mut self.best {
            None => {
                self.best = Some(value.clone());
                self.who = vec![blocks.to_vec(); value.dim()];
            }
            Some(best) => {
                let mut coeffs = best.coeffs().to_vec();
                for (i, c) in value.coeffs().iter().enumerate() {
                    if *c < coeffs[i] {
                        coeffs[i] = c.clone();
                        self.who[i] = blocks.to_vec();
                    }
                }
                *best = LatVec::new(best.space().clone(), coeffs).expect("same space");
            }
        }
    }
}

fn branch_and_bound(abs: &[LatVec], k: usize, zero: &LatVec) -> (Extremum<Vec<u64>>, SearchStats) {
    let full = if k == 0 { 0 } else { (1u64 << k) - 1 };
    if k == 0 {
        let ext = Extremum {
            value: zero.clone(),
            certificate: Certificate::Uniform(vec![]),
        };
        return (ext, SearchStats { nodes: 1, pruned: 0 });
    }
    // lower[a]: coordinatewise min of |T(S)| over masks S containing atom a.
    let lower: Vec<LatVec> = (0..k)
        .map(|a| {
            (1..=full)
                .filter(|s| s >> a & 1 == 1)
                .map(|s| abs[s as usize].clone())
                .reduce(|m, v| m.meet(&v).expect("output space"))
                .expect("atom mask exists")
        })
        .collect();
    let mut bnb = Bnb {
        abs,
        lower,
        best: None,
        who: vec![],
        target: None,
        found: None,
        stats: SearchStats::default(),
    };
    bnb.search(full, zero, &mut Vec::new());
    let value = bnb.best.clone().expect("some partition reached");
    let stats = bnb.stats;
    let who = std::mem::take(&mut bnb.who);
    // Second pass: look for one partition attaining the value everywhere.
    bnb.target = Some(&value);
    bnb.search(full, zero, &mut Vec::new());
    let certificate = match bnb.found.take() {
        Some(b) => Certificate::Uniform(b),
        None => Certificate::PerCoordinate(who),
    };
    (
        Extremum {
            value: value.clone(),
            certificate,
        },
        stats,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinLawReport {
    /// `λ_T(x ⊔ y)`.
    pub lhs: LatVec,
    /// `λ_T(x) ∨ λ_T(y)`.
    pub rhs: LatVec,
    pub holds: bool,
}

/// Compares `λ_T(x ⊔ y)` with `λ_T(x) ∨ λ_T(y)` for disjoint `x, y`.
///
/// Equality holds whenever `T` is positive on the fragments involved; for
/// sign-mixing operators the infimum over coarse partitions can undercut the
/// join and the report records the failure.
pub fn lambda_join_law(t: &dyn OrthAdd, x: &LatVec, y: &LatVec, strategy: LambdaStrategy, caps: Caps) -> Result<JoinLawReport> {
    if !x.is_disjoint(y)? {
        return Err(Error::contract("lambda join law needs disjoint arguments"));
    }
    let lhs = lambda_es(t, &x.add(y)?, strategy, caps)?.value;
    let rhs = lambda_es(t, x, strategy, caps)?
        .value
        .join(&lambda_es(t, y, strategy, caps)?.value)?;
    Ok(JoinLawReport {
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}
