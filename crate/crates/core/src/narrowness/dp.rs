use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::boolean::{classify_map, monteiro_extend, BoolHom, BoolMap, FiniteBoolAlg, SubAlgebra};
use crate::error::{Error, Result};
use crate::lattice::{band_projection, one_f, AtomSet, Caps, LatVec, MeasureSpace};
use crate::operators::{op_meet, FragmentTable, ScalarFunc, UrysonMatrix};
use crate::rational::{default_grid, Q};
use crate::random::{grid_vector, rng};

use super::{lambda_es, LambdaStrategy};

/// Checks run on a constructed minorant `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpVerification {
    /// No output row of `S` has two nonzero columns.
    pub dp: bool,
    /// Number of sample vectors `x` with `0 ≤ S(x) ≤ T(x)` checked.
    pub samples: usize,
    pub between_zero_and_t: bool,
    /// `S(x) = ψ(x)` for every fragment `x ⊑ e`.
    pub agrees_on_fragments: bool,
    /// Closed-form `S₂` equals the grid supremum on every checked sample.
    pub s2_matches_grid: bool,
    /// `S = (T ∧ S₂) ∘ P_e` agrees with the brute-force meet and is its own
    /// fragment supremum on every checked sample.
    pub meet_oracle_ok: bool,
    pub s_e: LatVec,
    pub nonzero: bool,
}

impl DpVerification {
    pub fn passed(&self) -> bool {
        self.dp
            && self.between_zero_and_t
            && self.agrees_on_fragments
            && self.s2_matches_grid
            && self.meet_oracle_ok
    }
}

/// A disjointness-preserving minorant `0 ≤ S ≤ T` built from a Boolean
/// homomorphism `ψ: 𝔉_e → 𝔉_f`.
#[derive(Debug, Clone)]
pub struct DPWitness {
    pub e: LatVec,
    pub f: LatVec,
    /// `ψ` by atom images; bit `i` of an image is the `i`-th atom of `supp(f)`.
    pub psi: BoolHom,
    pub s: UrysonMatrix,
    /// `S` on the fragments of `e`, indexed by mask over `supp(e)`.
    pub fragment_values: Vec<LatVec>,
    pub report: DpVerification,
}

fn fragment_value(f: &LatVec, f_support: &[usize], bits: u64) -> LatVec {
    f.restrict(&AtomSet::from_bits(f_support, bits))
}

// S₂ column for atom `a` of supp(e): |r| / |e_a| · ψ(1_a), entrywise.
fn s2_matrix(t_in: &std::sync::Arc<MeasureSpace>, t_out: &std::sync::Arc<MeasureSpace>, e: &LatVec, f: &LatVec, psi: &BoolHom) -> Result<UrysonMatrix> {
    let e_support = e.support();
    let f_support = f.support();
    UrysonMatrix::from_fn(t_in, t_out, |i, j| {
        let Some(pos) = e_support.as_slice().iter().position(|&a| a == j) else {
            return ScalarFunc::zero();
        };
        let image = fragment_value(f, f_support.as_slice(), psi.images()[pos]);
        let c = image.coeff(i);
        if c.is_zero() {
            ScalarFunc::zero()
        } else {
            ScalarFunc::abs_power(c / e.coeff(j).abs(), Q::from_integer(1.into()))
        }
    })
}

fn sample_vectors(space: &std::sync::Arc<MeasureSpace>, samples: usize, seed: u64) -> Vec<LatVec> {
    let mut out = Vec::new();
    for j in 0..space.len() {
        for g in default_grid() {
            if !g.is_zero() {
                out.push(LatVec::unit(space, j, g));
            }
        }
    }
    let mut r = rng(seed);
    out.extend((0..samples).map(|_| grid_vector(&mut r, space)));
    out
}

// sup{S₁(y) : |y| ≤ |x|, supp y ⊆ supp e} over y_a ∈ {0, ±|x_a|/2, ±|x_a|}.
fn s2_grid_sup(e: &LatVec, f: &LatVec, psi: &BoolHom, x: &LatVec, out: &std::sync::Arc<MeasureSpace>) -> Result<LatVec> {
    let e_support = e.support().as_slice().to_vec();
    let f_support = f.support();
    let atoms: Vec<usize> = (0..e_support.len()).filter(|&p| !x.coeff(e_support[p]).is_zero()).collect();
    let half = Q::new(1.into(), 2.into());
    let mut best = LatVec::zero(out);
    let choices = 5usize;
    for code in 0..choices.pow(atoms.len() as u32) {
        let mut c = code;
        let mut s1 = LatVec::zero(out);
        for &p in &atoms {
            let a = e_support[p];
            let m = x.coeff(a).abs();
            let y = match c % choices {
                0 => Q::zero(),
                1 => &m * &half,
                2 => -(&m * &half),
                3 => m.clone(),
                _ => -m.clone(),
            };
            c /= choices;
            let image = fragment_value(f, f_support.as_slice(), psi.images()[p]);
            s1 = s1.add(&image.scale(&(y.abs() / e.coeff(a).abs())))?;
        }
        best = best.join(&s1)?;
    }
    Ok(best)
}

/// Largest `|supp(x) ∩ supp(e)|` for which `S₂` is compared with a grid search.
const S2_GRID_ATOMS: usize = 4;

/// Builds the disjointness-preserving minorant `S` of a positive matrix
/// operator `T` from a homomorphism `ψ: 𝔉_e → 𝔉_f` with `ψ ≤ T` on 𝔉_e.
///
/// In the finite model the chain collapses to closed forms:
/// `S₁(Σ λ_a e_a) = Σ |λ_a| ψ(e_a)` on the finest partition of `e`,
/// `S₂(x) = Σ_{a ∈ supp e} (|x_a| / e_a) ψ(e_a)`, `S₃ = T ∧ S₂` taken
/// entrywise, `S₄ = S₃` on `I_e` because `S₃ ≥ 0`, and `S = S₄ ∘ P_e`.
/// Each closed form is checked against its brute-force definition on
/// samples.
pub fn dp_minorant_from_homomorphism(
    t: &UrysonMatrix,
    e: &LatVec,
    f: &LatVec,
    psi: &BoolHom,
    caps: Caps,
    samples: usize,
    seed: u64,
) -> Result<DPWitness> {
    MeasureSpace::check_same(t.input(), e.space())?;
    MeasureSpace::check_same(t.output(), f.space())?;
    if !t.is_positive() {
        return Err(Error::contract("T must be a positive operator"));
    }
    if !f.is_positive() {
        return Err(Error::contract("f must be positive"));
    }
    let e_support = e.support().as_slice().to_vec();
    let f_support = f.support().as_slice().to_vec();
    if psi.domain().atoms() != e_support.len() || psi.codomain().atoms() != f_support.len() {
        return Err(Error::contract("ψ must map the fragments of e to the fragments of f"));
    }
    let table = FragmentTable::new(t, e, caps.fragments)?;
    for bits in 0..=table.full() {
        let image = fragment_value(f, &f_support, psi.apply(bits));
        if !image.le(table.get(bits))? {
            return Err(Error::contract(format!(
                "ψ exceeds T on the fragment with atoms {:?}",
                table.mask(bits).as_slice()
            )));
        }
    }

    let s2 = s2_matrix(t.input(), t.output(), e, f, psi)?;
    let s = UrysonMatrix::from_fn(t.input(), t.output(), |i, j| {
        let g = s2.entry(i, j);
        if g.is_identically_zero() {
            ScalarFunc::zero()
        } else {
            t.entry(i, j).clone().min(g.clone())
        }
    })?;

    let mut agrees = true;
    let mut fragment_values = Vec::with_capacity(table.values().len());
    for bits in 0..=table.full() {
        let v = s.apply(&e.restrict(&table.mask(bits)))?;
        agrees &= v == fragment_value(f, &f_support, psi.apply(bits));
        fragment_values.push(v);
    }

    let xs = sample_vectors(t.input(), samples, seed);
    let mut between = true;
    let mut s2_ok = true;
    let mut meet_ok = true;
    for x in &xs {
        let sx = s.apply(x)?;
        between &= sx.is_positive() && sx.le(&t.apply(x)?)?;
        let px = band_projection(e, x)?;
        if px.support().len() <= S2_GRID_ATOMS {
            s2_ok &= s2.apply(x)? == s2_grid_sup(e, f, psi, x, t.output())?;
        }
        if px.support().len() <= caps.fragments.min(8) {
            let meet = op_meet(t, &s2, &px, caps.fragments)?.value;
            let frag_sup = FragmentTable::new(&s, &px, caps.fragments)?
                .values()
                .iter()
                .try_fold(LatVec::zero(t.output()), |acc, v| acc.join(v))?;
            meet_ok &= meet == sx && frag_sup == sx;
        }
    }
    let s_e = s.apply(e)?;
    let report = DpVerification {
        dp: s.is_dp(),
        samples: xs.len(),
        between_zero_and_t: between,
        agrees_on_fragments: agrees,
        s2_matches_grid: s2_ok,
        meet_oracle_ok: meet_ok,
        nonzero: !s_e.is_zero(),
        s_e,
    };
    Ok(DPWitness {
        e: e.clone(),
        f: f.clone(),
        psi: psi.clone(),
        s,
        fragment_values,
        report,
    })
}

/// Extracts a disjointness-preserving minorant `S` of a positive matrix
/// operator with `S(e) = λ_T(e)`, or `None` when `λ_T(e) = 0`.
///
/// With `f = λ_T(e)`, the map `φ(x) = 𝟙_f(λ_T(x))` on 𝔉_e is join
/// preserving; the homomorphism `{0 ↦ 0, e ↦ f}` of the trivial subalgebra
/// lies below it and extends to `ψ ≤ φ ≤ T` on 𝔉_e, from which the minorant
/// is built. `e` must be positive.
pub fn dp_witness_extract(t: &UrysonMatrix, e: &LatVec, caps: Caps, samples: usize, seed: u64) -> Result<Option<DPWitness>> {
    MeasureSpace::check_same(t.input(), e.space())?;
    if !t.is_positive() {
        return Err(Error::contract("T must be a positive operator"));
    }
    if !e.is_positive() {
        return Err(Error::contract("e must be positive"));
    }
    let lambda = lambda_es(t, e, LambdaStrategy::BranchAndBound, caps)?;
    let f = lambda.value;
    if f.is_zero() {
        return Ok(None);
    }
    let f_support = f.support().as_slice().to_vec();
    let table = FragmentTable::new(t, e, caps.fragments)?;
    let k = table.support().len();
    // λ_T(x) = ⋁_{a ∈ x} T(x·1_a) for positive T.
    let atom_images: Vec<&LatVec> = (0..k).map(|i| table.get(1 << i)).collect();
    let domain = FiniteBoolAlg::new(k)?;
    let codomain = FiniteBoolAlg::new(f_support.len())?;
    let mut phi_table = Vec::with_capacity(1 << k);
    for bits in 0..1u64 << k {
        let lam = (0..k)
            .filter(|i| bits >> i & 1 == 1)
            .try_fold(LatVec::zero(t.output()), |acc, i| acc.join(atom_images[i]))?;
        let image = AtomSet::new(one_f(&f, &lam)?.support().as_slice().to_vec());
        phi_table.push(image.to_bits(&f_support).expect("𝟙_f lies below f"));
    }
    let phi = BoolMap::new(domain, codomain, phi_table)?;
    let class = classify_map(&phi)?;
    if !class.join_preserving {
        return Err(Error::internal(format!(
            "𝟙_f ∘ λ_T is not join preserving: {:?}",
            class.violations.first()
        )));
    }
    let psi = monteiro_extend(&phi, &SubAlgebra::trivial(domain), &[codomain.one()]).map_err(|err| {
        Error::internal(format!("homomorphism extension failed: {err}"))
    })?;
    let w = dp_minorant_from_homomorphism(t, e, &f, &psi, caps, samples, seed)?;
    if w.report.s_e != f || !w.report.nonzero {
        return Err(Error::internal("extracted minorant does not reach λ_T(e) at e"));
    }
    if !w.report.s_e.le(&f)? {
        return Err(Error::internal("λ_T(e) ≥ S(e) fails"));
    }
    if !w.report.passed() {
        return Err(Error::internal(format!("extracted minorant failed verification: {:?}", w.report)));
    }
    Ok(Some(w))
}
