use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{AtomSet, LatVec, MeasureSpace};
use crate::operators::OrthAdd;
use crate::rational::{ser, Q};
use crate::rounding::{signed_permutation, PermutationMode, PermutationWitness};

use super::DecompositionWitness;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub witness: DecompositionWitness,
    /// Blocks `x_i` in permutation order; a padding block is empty.
    pub blocks: Vec<AtomSet>,
    pub padded: bool,
    /// `α = ∥⋁ T(x_i)∥`, which is `∥λ_T(x)∥` for positive `T`.
    #[serde(serialize_with = "ser::q")]
    pub alpha: Q,
    /// `K = Σ ∥T(x_i)∥ = ∥T(x)∥`.
    #[serde(serialize_with = "ser::q")]
    pub k: Q,
    #[serde(serialize_with = "ser::q")]
    pub bound_sq: Q,
    pub permutation: Option<PermutationWitness>,
    /// Whether `discrepancy ≤ target` when a target was given.
    pub meets_target: Option<bool>,
}

/// Splits `x` into `e₁ ⊔ e₂` with `∥T(e₁) − T(e₂)∥² ≤ 2αK` for positive `T`.
///
/// The blocks are the atoms of `supp(x)`, the finest partition, at which the
/// blockwise supremum of a positive operator attains `λ_T(x)`. An odd count
/// gets one empty block. With `z_i = T(x_i)` the signed permutation places
/// `z_{τ(1)}, z_{τ(3)}, …` in `e₁` and the rest in `e₂`.
pub fn lambda_to_narrow_pipeline(
    t: &dyn OrthAdd,
    x: &LatVec,
    target: Option<&Q>,
    mode: PermutationMode,
    brute_cap: usize,
) -> Result<PipelineReport> {
    MeasureSpace::check_same(&t.input_space(), x.space())?;
    let tx = t.apply(x)?;
    let support = x.support();
    let meets = |d: &Q| target.map(|b| d <= b);
    if tx.is_zero() {
        let witness = DecompositionWitness::from_masks(t, x, support.clone(), AtomSet::default())?;
        return Ok(PipelineReport {
            meets_target: meets(&witness.discrepancy),
            witness,
            blocks: vec![support],
            padded: false,
            alpha: Q::zero(),
            k: Q::zero(),
            bound_sq: Q::zero(),
            permutation: None,
        });
    }
    let mut blocks: Vec<AtomSet> = support.iter().map(|&a| AtomSet::new(vec![a])).collect();
    let padded = blocks.len() % 2 == 1;
    if padded {
        blocks.push(AtomSet::default());
    }
    let z = blocks
        .iter()
        .map(|b| t.apply(&x.restrict(b)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = z.iter().position(|v| !v.is_positive()) {
        return Err(Error::contract(format!(
            "operator is not positive: T(x·1_{{{}}}) has a negative coordinate",
            blocks[i].as_slice()[0]
        )));
    }
    let perm = signed_permutation(&z, mode, brute_cap)?;
    if perm.k != tx.norm_l1() {
        return Err(Error::internal("Σ∥T(x_i)∥ differs from ∥T(x)∥ for a positive operator"));
    }
    let mut e1 = AtomSet::default();
    let mut e2 = AtomSet::default();
    let ordered: Vec<AtomSet> = perm.tau.iter().map(|&i| blocks[i - 1].clone()).collect();
    for (pos, b) in ordered.iter().enumerate() {
        if pos % 2 == 0 {
            e1 = e1.union(b);
        } else {
            e2 = e2.union(b);
        }
    }
    let witness = DecompositionWitness::from_masks(t, x, e1, e2)?;
    if &witness.discrepancy * &witness.discrepancy > perm.bound_sq {
        return Err(Error::internal("pipeline discrepancy exceeds √(2αK)"));
    }
    Ok(PipelineReport {
        meets_target: meets(&witness.discrepancy),
        witness,
        blocks: ordered,
        padded,
        alpha: perm.alpha.clone(),
        k: perm.k.clone(),
        bound_sq: perm.bound_sq.clone(),
        permutation: Some(perm),
    })
}
