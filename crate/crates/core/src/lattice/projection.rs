use super::LatVec;
use crate::error::{Error, Result};

/// Band projection `P_e x`: the restriction of `x` to `supp(e)`.
///
/// The band generated by `e` depends only on `|e|`, so a sign-mixed `e` is
/// accepted and projects onto the same band as `|e|`.
pub fn band_projection(e: &LatVec, x: &LatVec) -> Result<LatVec> {
    e.check_same_space(x)?;
    Ok(x.restrict(&e.support()))
}

/// `𝟙_f(y) = f − P_{(f−y)⁺} f`: the fragment of `f` on the atoms where `y ≥ f`.
pub fn one_f(f: &LatVec, y: &LatVec) -> Result<LatVec> {
    f.check_same_space(y)?;
    if !f.is_positive() || !y.is_positive() {
        return Err(Error::contract("one_f requires f ≥ 0 and y ≥ 0"));
    }
    let mask = f
        .support()
        .iter()
        .copied()
        .filter(|&a| y.coeff(a) >= f.coeff(a))
        .collect();
    Ok(f.restrict(&mask))
}
