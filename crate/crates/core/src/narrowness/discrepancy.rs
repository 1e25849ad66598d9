use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{AtomSet, LatVec, MeasureSpace};
use crate::operators::OrthAdd;
use crate::rational::{ser, Q};

/// Largest reachable-sum set per component in the beyond-cap search.
pub const DISCREPANCY_STATE_CAP: usize = 1 << 18;

/// `e = e₁ ⊔ e₂` with the discrepancy `∥T(e₁) − T(e₂)∥₁`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionWitness {
    pub base: LatVec,
    pub e1: AtomSet,
    pub e2: AtomSet,
    #[serde(serialize_with = "ser::q")]
    pub discrepancy: Q,
}

impl DecompositionWitness {
    pub fn part1(&self) -> LatVec {
        self.base.restrict(&self.e1)
    }

    pub fn part2(&self) -> LatVec {
        self.base.restrict(&self.e2)
    }

    /// Rebuilds a witness from masks, recomputing the discrepancy.
    pub fn from_masks(t: &dyn OrthAdd, base: &LatVec, e1: AtomSet, e2: AtomSet) -> Result<Self> {
        let support = base.support();
        if !e1.is_disjoint(&e2) || e1.union(&e2) != support {
            return Err(Error::contract("masks do not split the support of the base"));
        }
        let discrepancy = discrepancy(t, &base.restrict(&e1), &base.restrict(&e2))?;
        Ok(DecompositionWitness {
            base: base.clone(),
            e1,
            e2,
            discrepancy,
        })
    }
}

/// `∥T(x) − T(y)∥₁`, weighted on the output space.
pub fn discrepancy(t: &dyn OrthAdd, x: &LatVec, y: &LatVec) -> Result<Q> {
    Ok(t.apply(x)?.sub(&t.apply(y)?)?.norm_l1())
}

/// Exact minimum of `∥T(e₁) − T(e₂)∥₁` over mutually complemented fragments.
///
/// Pairs are unordered, so the last support atom is always placed in `e₂`.
/// Ties go to the `e₁` with the smallest bit mask over the support order
/// (bit `i` is the `i`-th support atom). Up to `cap` support atoms every pair
/// is evaluated directly; beyond it the search uses orthogonal additivity,
/// `T(e₁) − T(e₂) = Σ_j s_j T(e·1_{j})`, splits the atoms into components
/// that share no output coordinate and minimises each component exactly over
/// its reachable signed sums.
pub fn min_discrepancy(t: &dyn OrthAdd, e: &LatVec, cap: usize) -> Result<DecompositionWitness> {
    MeasureSpace::check_same(&t.input_space(), e.space())?;
    let support = e.support().as_slice().to_vec();
    let k = support.len();
    if k == 0 {
        return Ok(DecompositionWitness {
            base: e.clone(),
            e1: AtomSet::default(),
            e2: AtomSet::default(),
            discrepancy: Q::zero(),
        });
    }
    if k <= cap.min(63) {
        exhaustive(t, e, &support)
    } else {
        componentwise(t, e, &support)
    }
}

fn atom_images(t: &dyn OrthAdd, e: &LatVec, support: &[usize]) -> Result<Vec<LatVec>> {
    support
        .iter()
        .map(|&a| t.apply(&e.restrict(&AtomSet::new(vec![a]))))
        .collect()
}

// Gray-code scan of `T(e₁) − T(e₂) = Σ_{a ∈ e₁} T_a − Σ_{a ∈ e₂} T_a`.
fn exhaustive(t: &dyn OrthAdd, e: &LatVec, support: &[usize]) -> Result<DecompositionWitness> {
    let k = support.len();
    let full = (1u64 << k) - 1;
    let vs = atom_images(t, e, support)?;
    let two = Q::from_integer(2.into());
    let doubled: Vec<LatVec> = vs.iter().map(|v| v.scale(&two)).collect();
    let mut diff = LatVec::zero(&t.output_space());
    for v in &vs {
        diff = diff.sub(v)?;
    }
    let mut best = (diff.norm_l1(), 0u64);
    let mut bits = 0u64;
    for i in 1..1u64 << (k - 1) {
        let b = i.trailing_zeros() as usize;
        bits ^= 1 << b;
        diff = if bits >> b & 1 == 1 {
            diff.add(&doubled[b])?
        } else {
            diff.sub(&doubled[b])?
        };
        let d = diff.norm_l1();
        if d < best.0 || (d == best.0 && bits < best.1) {
            best = (d, bits);
        }
    }
    let w = DecompositionWitness::from_masks(
        t,
        e,
        AtomSet::from_bits(support, best.1),
        AtomSet::from_bits(support, full ^ best.1),
    )?;
    if w.discrepancy != best.0 {
        return Err(Error::internal("incremental discrepancy differs from direct evaluation"));
    }
    Ok(w)
}

fn componentwise(t: &dyn OrthAdd, e: &LatVec, support: &[usize]) -> Result<DecompositionWitness> {
    let k = support.len();
    let vs = atom_images(t, e, support)?;
    let weights = t.output_space().weights().to_vec();
    let m = weights.len();

    // Union-find over atom indices, joined through shared output coordinates.
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let n = p[j];
            p[j] = r;
            j = n;
        }
        r
    }
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for (j, v) in vs.iter().enumerate() {
        for (i, c) in v.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match owner[i] {
                None => owner[i] = Some(j),
                Some(o) => {
                    let (a, b) = (find(&mut parent, o), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; k];
    for j in 0..k {
        let r = find(&mut parent, j);
        if root_of[r] == usize::MAX {
            root_of[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[root_of[r]].push(j);
    }

    let mut in_e1 = vec![false; k];
    let mut total = Q::zero();
    for comp in &comps {
        let coords: Vec<usize> = (0..m)
            .filter(|&i| comp.iter().any(|&j| !vs[j].coeff(i).is_zero()))
            .collect();
        let local = |j: usize| -> Vec<Q> { coords.iter().map(|&i| vs[j].coeff(i).clone()).collect() };
        let norm = |s: &[Q]| -> Q {
            s.iter()
                .zip(&coords)
                .fold(Q::zero(), |acc, (x, &i)| acc + num_traits::Signed::abs(x) * &weights[i])
        };
        // The atom k-1 is fixed in e₂ when it belongs to this component.
        let forced = comp.contains(&(k - 1));
        let free: Vec<usize> = comp.iter().copied().filter(|&j| !(forced && j == k - 1)).collect();
        let start: Vec<Q> = if forced {
            local(k - 1).into_iter().map(|c| -c).collect()
        } else {
            vec![Q::zero(); coords.len()]
        };
        // reach[t]: signed sums over the lowest t free atoms.
        let mut reach: Vec<BTreeSet<Vec<Q>>> = vec![BTreeSet::from([vec![Q::zero(); coords.len()]])];
        for &j in &free {
            let v = local(j);
            let prev = reach.last().expect("nonempty");
            let mut next = BTreeSet::new();
            for r in prev {
                next.insert(r.iter().zip(&v).map(|(a, b)| a + b).collect::<Vec<Q>>());
                next.insert(r.iter().zip(&v).map(|(a, b)| a - b).collect::<Vec<Q>>());
            }
            if next.len() > DISCREPANCY_STATE_CAP {
                return Err(Error::CapExceeded {
                    what: "discrepancy search reachable sums",
                    size: next.len(),
                    cap: DISCREPANCY_STATE_CAP,
                });
            }
            reach.push(next);
        }
        let add = |a: &[Q], b: &[Q]| -> Vec<Q> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
        let best = reach
            .last()
            .expect("nonempty")
            .iter()
            .map(|r| norm(&add(&start, r)))
            .min()
            .expect("nonempty");
        // Decide free atoms from the highest down, preferring e₂ (bit 0).
        let mut acc = start;
        for (pos, &j) in free.iter().enumerate().rev() {
            let v = local(j);
            let minus: Vec<Q> = acc.iter().zip(&v).map(|(a, b)| a - b).collect();
            let feasible = reach[pos].iter().any(|r| norm(&add(&minus, r)) == best);
            if feasible {
                acc = minus;
            } else {
                acc = acc.iter().zip(&v).map(|(a, b)| a + b).collect();
                in_e1[j] = true;
            }
        }
        total += best;
    }
    let e1: AtomSet = (0..k).filter(|&j| in_e1[j]).map(|j| support[j]).collect();
    let e2 = e.support().difference(&e1);
    let w = DecompositionWitness::from_masks(t, e, e1, e2)?;
    if w.discrepancy != total {
        return Err(Error::internal(
            "componentwise discrepancy disagrees with direct evaluation; the operator is not orthogonally additive",
        ));
    }
    Ok(w)
}

/// Combines witnesses for `x⁺` and `−x⁻` into one for `x`:
/// `x = (e₁ + e′₁) ⊔ (e₂ + e′₂)`.
pub fn combine_signed(
    t: &dyn OrthAdd,
    x: &LatVec,
    w_plus: &DecompositionWitness,
    w_minus: &DecompositionWitness,
) -> Result<DecompositionWitness> {
    if w_plus.base != x.pos_part() || w_minus.base != x.neg_part().neg() {
        return Err(Error::contract("witnesses must decompose x⁺ and −x⁻"));
    }
    if !w_plus.base.support().is_disjoint(&w_minus.base.support()) {
        return Err(Error::contract("witness supports overlap"));
    }
    let w = DecompositionWitness::from_masks(
        t,
        x,
        w_plus.e1.union(&w_minus.e1),
        w_plus.e2.union(&w_minus.e2),
    )?;
    if w.discrepancy > &w_plus.discrepancy + &w_minus.discrepancy {
        return Err(Error::internal("combined discrepancy exceeds the sum of its parts"));
    }
    Ok(w)
}
