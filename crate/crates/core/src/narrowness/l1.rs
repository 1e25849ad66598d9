use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{AtomSet, Caps, LatVec, MeasureSpace};
use crate::operators::{modulus, OrthAdd};
use crate::rational::{ser, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct L1IdentityReport {
    /// `∥f − g∥`.
    #[serde(serialize_with = "ser::q")]
    pub lhs: Q,
    /// `∥|f| − |g|∥ + ∥f∥ + ∥g∥ − ∥f + g∥`.
    #[serde(serialize_with = "ser::q")]
    pub rhs: Q,
    pub ok: bool,
}

/// Checks `∥f − g∥ = ∥|f| − |g|∥ + ∥f∥ + ∥g∥ − ∥f + g∥` in weighted L1.
pub fn l1_identity_check(f: &LatVec, g: &LatVec) -> Result<L1IdentityReport> {
    let lhs = f.sub(g)?.norm_l1();
    let rhs = f.abs().sub(&g.abs())?.norm_l1() + f.norm_l1() + g.norm_l1() - f.add(g)?.norm_l1();
    Ok(L1IdentityReport {
        ok: lhs == rhs,
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionBoundReport {
    /// `∥|T|(x) − Σ |T(y_i)|∥`.
    #[serde(serialize_with = "ser::q")]
    pub lhs: Q,
    /// `Σ (∥|T|(u_i) − |T(u_i)|∥ + ∥|T|(v_i) − |T(v_i)|∥)`.
    #[serde(serialize_with = "ser::q")]
    pub rhs: Q,
    #[serde(serialize_with = "ser::q")]
    pub epsilon: Q,
    /// `lhs < ε`.
    pub hypothesis: bool,
    /// `rhs < ε`.
    pub conclusion: bool,
    /// `rhs ≤ lhs`, which gives the implication for every `ε`.
    pub ok: bool,
}

/// Verifies that `∥|T|(x) − Σ |T(y_i)|∥ < ε` forces
/// `Σ (∥|T|(u_i) − |T(u_i)|∥ + ∥|T|(v_i) − |T(v_i)|∥) < ε` for the blocks
/// `y_i = u_i ⊔ v_i` of a partition of `supp(x)`. `|T|` is the brute-force
/// modulus.
pub fn verify_l1_partition_bound(
    t: &dyn OrthAdd,
    x: &LatVec,
    splits: &[(AtomSet, AtomSet)],
    epsilon: &Q,
    caps: Caps,
) -> Result<PartitionBoundReport> {
    MeasureSpace::check_same(&t.input_space(), x.space())?;
    let mut covered = AtomSet::default();
    for (i, (u, v)) in splits.iter().enumerate() {
        if !u.is_disjoint(v) {
            return Err(Error::contract(format!("block {i}: u and v overlap")));
        }
        let y = u.union(v);
        if !y.is_disjoint(&covered) {
            return Err(Error::contract(format!("block {i} overlaps an earlier block")));
        }
        covered = covered.union(&y);
    }
    if covered != x.support() {
        return Err(Error::contract("blocks do not cover the support of x exactly"));
    }
    let modulus_at = |m: &AtomSet| -> Result<LatVec> { Ok(modulus(t, &x.restrict(m), caps)?.value) };
    let abs_t = |m: &AtomSet| -> Result<LatVec> { Ok(t.apply(&x.restrict(m))?.abs()) };

    let mut sum = LatVec::zero(&t.output_space());
    let mut rhs = Q::from_integer(0.into());
    for (u, v) in splits {
        sum = sum.add(&abs_t(&u.union(v))?)?;
        for part in [u, v] {
            rhs += modulus_at(part)?.sub(&abs_t(part)?)?.norm_l1();
        }
    }
    let lhs = modulus_at(&covered)?.sub(&sum)?.norm_l1();
    Ok(PartitionBoundReport {
        hypothesis: lhs < *epsilon,
        conclusion: rhs < *epsilon,
        ok: rhs <= lhs,
        epsilon: epsilon.clone(),
        lhs,
        rhs,
    })
}
