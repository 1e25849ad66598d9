use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::LatVec;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};

/// Finite weighted atom set, the model of a measure space `(A, Σ, μ)`.
///
/// Atoms are the indices `0..len()`. When the space is a level of a
/// [`RefinementChain`] it also records the parent atom of every atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureSpace {
    weights: Vec<Q>,
    parents: Option<Vec<usize>>,
}

impl MeasureSpace {
    pub fn new(weights: Vec<Q>) -> Result<Arc<Self>> {
        Self::validate(&weights)?;
        Ok(Arc::new(MeasureSpace {
            weights,
            parents: None,
        }))
    }

    fn validate(weights: &[Q]) -> Result<()> {
        if weights.is_empty() {
            return Err(Error::contract("a measure space needs at least one atom"));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_positive()) {
            return Err(Error::contract(format!(
                "weight of atom {i} is {}, weights must be strictly positive",
                fmt_q(w)
            )));
        }
        Ok(())
    }

    /// `n` atoms of weight `1/n`.
    pub fn uniform(n: usize) -> Arc<Self> {
        let w = Q::new(1.into(), (n as i64).into());
        Arc::new(MeasureSpace {
            weights: vec![w; n],
            parents: None,
        })
    }

    /// `n` atoms of weight 1 (counting measure).
    pub fn counting(n: usize) -> Arc<Self> {
        Arc::new(MeasureSpace {
            weights: vec![Q::from_integer(1.into()); n],
            parents: None,
        })
    }

    /// One atom of weight 1: the target of scalar-valued operators.
    pub fn scalar() -> Arc<Self> {
        Self::counting(1)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> &Q {
        &self.weights[atom]
    }

    pub fn parent(&self, atom: usize) -> Option<usize> {
        self.parents.as_ref().map(|p| p[atom])
    }

    pub fn total_mass(&self) -> Q {
        self.weights.iter().fold(Q::zero(), |acc, w| acc + w)
    }

    /// Same atoms with the same weights (parent links are ignored).
    pub fn same_measure(&self, other: &MeasureSpace) -> bool {
        self.weights == other.weights
    }

    pub(crate) fn check_same(a: &Arc<Self>, b: &Arc<Self>) -> Result<()> {
        if Arc::ptr_eq(a, b) || a.same_measure(b) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!(
                "spaces with {} and {} atoms differ",
                a.len(),
                b.len()
            )))
        }
    }
}

/// Levels `0..=N` of successively refined finite measure spaces.
///
/// Level `n + 1` splits every atom of level `n` into children whose weights
/// sum exactly to the parent weight. Simple functions on level `n` embed into
/// level `n + 1` by copying each parent coefficient to its children.
#[derive(Debug, Clone)]
pub struct RefinementChain {
    levels: Vec<Arc<MeasureSpace>>,
}

impl RefinementChain {
    /// `splits[l][a]` lists the child weights of atom `a` of level `l`.
    pub fn new(base: Vec<Q>, splits: Vec<Vec<Vec<Q>>>) -> Result<Self> {
        let mut levels = vec![MeasureSpace::new(base)?];
        for (l, level_splits) in splits.into_iter().enumerate() {
            let prev = levels.last().expect("chain is never empty");
            if level_splits.len() != prev.len() {
                return Err(Error::contract(format!(
                    "level {} split list has {} entries, level {l} has {} atoms",
                    l + 1,
                    level_splits.len(),
                    prev.len()
                )));
            }
            let mut weights = Vec::new();
            let mut parents = Vec::new();
            for (a, children) in level_splits.into_iter().enumerate() {
                if children.is_empty() {
                    return Err(Error::contract(format!(
                        "atom {a} of level {l} has no children"
                    )));
                }
                let sum = children.iter().fold(Q::zero(), |acc, w| acc + w);
                if &sum != prev.weight(a) {
                    return Err(Error::contract(format!(
                        "children of atom {a} at level {l} weigh {}, parent weighs {}",
                        fmt_q(&sum),
                        fmt_q(prev.weight(a))
                    )));
                }
                for w in children {
                    weights.push(w);
                    parents.push(a);
                }
            }
            MeasureSpace::validate(&weights)?;
            levels.push(Arc::new(MeasureSpace {
                weights,
                parents: Some(parents),
            }));
        }
        Ok(RefinementChain { levels })
    }

    /// Every atom split into two halves, `depth` times.
    pub fn dyadic(base: Vec<Q>, depth: usize) -> Result<Self> {
        let mut splits = Vec::with_capacity(depth);
        let mut current = base.clone();
        let two = Q::from_integer(2.into());
        for _ in 0..depth {
            let level: Vec<Vec<Q>> = current
                .iter()
                .map(|w| vec![w / &two, w / &two])
                .collect();
            current = level.iter().flatten().cloned().collect();
            splits.push(level);
        }
        Self::new(base, splits)
    }

    /// Uniform dyadic chain on a single atom of mass 1: level `n` has `2^n` atoms.
    pub fn uniform_dyadic(depth: usize) -> Self {
        Self::dyadic(vec![Q::from_integer(1.into())], depth).expect("valid dyadic chain")
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Index of the finest level.
    pub fn finest(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> Result<&Arc<MeasureSpace>> {
        self.levels.get(n).ok_or(Error::LevelOutOfRange {
            level: n,
            levels: self.levels.len(),
        })
    }

    pub fn levels(&self) -> &[Arc<MeasureSpace>] {
        &self.levels
    }

    /// Level on which `x` lives, matched by identity first and by measure second.
    pub fn level_of(&self, x: &LatVec) -> Option<usize> {
        self.levels
            .iter()
            .position(|s| Arc::ptr_eq(s, x.space()))
            .or_else(|| self.levels.iter().position(|s| s.same_measure(x.space())))
    }

    /// Children (at level `n + 1`) of atom `atom` of level `n`.
    pub fn children(&self, n: usize, atom: usize) -> Result<Vec<usize>> {
        let next = self.level(n + 1)?;
        Ok((0..next.len())
            .filter(|&c| next.parent(c) == Some(atom))
            .collect())
    }

    /// Embeds a level-`n` vector into level `n + 1`.
    pub fn embed(&self, x: &LatVec) -> Result<LatVec> {
        let n = self.level_of(x).ok_or_else(|| {
            Error::contract("vector does not live on any level of the refinement chain")
        })?;
        let next = self.level(n + 1)?;
        let coeffs = (0..next.len())
            .map(|c| x.coeff(next.parent(c).expect("refined level has parents")).clone())
            .collect();
        LatVec::new(next.clone(), coeffs)
    }

    /// Repeatedly embeds `x` until it lives on level `target`.
    pub fn embed_to(&self, x: &LatVec, target: usize) -> Result<LatVec> {
        let n = self.level_of(x).ok_or_else(|| {
            Error::contract("vector does not live on any level of the refinement chain")
        })?;
        if target < n || target >= self.levels.len() {
            return Err(Error::LevelOutOfRange {
                level: target,
                levels: self.levels.len(),
            });
        }
        let mut v = x.clone();
        for _ in n..target {
            v = self.embed(&v)?;
        }
        Ok(v)
    }
}
