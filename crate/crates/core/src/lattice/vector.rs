use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::{AtomSet, MeasureSpace};
use crate::error::{Error, Result};
use crate::rational::{fmt_q, max_q, min_q, Q};

/// An element of the model lattice: one exact rational coefficient per atom.
///
/// Order and lattice operations are coordinatewise. Two vectors are equal when
/// they live on the same measure and have identical coefficients.
#[derive(Clone)]
pub struct LatVec {
    space: Arc<MeasureSpace>,
    coeffs: Vec<Q>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryKind {
    Join,
    Meet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryKind {
    Abs,
    PosPart,
    NegPart,
}

pub fn lattice_binary(kind: BinaryKind, x: &LatVec, y: &LatVec) -> Result<LatVec> {
    match kind {
        BinaryKind::Join => x.join(y),
        BinaryKind::Meet => x.meet(y),
    }
}

pub fn lattice_unary(kind: UnaryKind, x: &LatVec) -> LatVec {
    match kind {
        UnaryKind::Abs => x.abs(),
        UnaryKind::PosPart => x.pos_part(),
        UnaryKind::NegPart => x.neg_part(),
    }
}

impl LatVec {
    pub fn new(space: Arc<MeasureSpace>, coeffs: Vec<Q>) -> Result<Self> {
        if coeffs.len() != space.len() {
            return Err(Error::SpaceMismatch(format!(
                "{} coefficients for a space with {} atoms",
                coeffs.len(),
                space.len()
            )));
        }
        Ok(LatVec { space, coeffs })
    }

    pub fn zero(space: &Arc<MeasureSpace>) -> Self {
        LatVec {
            coeffs: vec![Q::zero(); space.len()],
            space: space.clone(),
        }
    }

    pub fn constant(space: &Arc<MeasureSpace>, c: Q) -> Self {
        LatVec {
            coeffs: vec![c; space.len()],
            space: space.clone(),
        }
    }

    /// `c` at `atom`, zero elsewhere.
    pub fn unit(space: &Arc<MeasureSpace>, atom: usize, c: Q) -> Self {
        let mut v = Self::zero(space);
        v.coeffs[atom] = c;
        v
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, atom: usize) -> &Q {
        &self.coeffs[atom]
    }

    pub fn into_coeffs(self) -> Vec<Q> {
        self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn check_same_space(&self, other: &LatVec) -> Result<()> {
        MeasureSpace::check_same(&self.space, &other.space)
    }

    fn zip_with(&self, other: &LatVec, f: impl Fn(&Q, &Q) -> Q) -> Result<LatVec> {
        self.check_same_space(other)?;
        Ok(LatVec {
            space: self.space.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    fn map(&self, f: impl Fn(&Q) -> Q) -> LatVec {
        LatVec {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn join(&self, other: &LatVec) -> Result<LatVec> {
        self.zip_with(other, max_q)
    }

    pub fn meet(&self, other: &LatVec) -> Result<LatVec> {
        self.zip_with(other, min_q)
    }

    pub fn add(&self, other: &LatVec) -> Result<LatVec> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &LatVec) -> Result<LatVec> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> LatVec {
        self.map(|a| -a)
    }

    pub fn scale(&self, c: &Q) -> LatVec {
        self.map(|a| a * c)
    }

    pub fn abs(&self) -> LatVec {
        self.map(|a| a.abs())
    }

    pub fn pos_part(&self) -> LatVec {
        self.map(|a| if a.is_positive() { a.clone() } else { Q::zero() })
    }

    /// `x⁻ ≥ 0` with `x = x⁺ − x⁻`.
    pub fn neg_part(&self) -> LatVec {
        self.map(|a| if a.is_negative() { -a } else { Q::zero() })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `x ≥ 0`.
    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|a| !a.is_negative())
    }

    /// `x > 0`: positive and nonzero.
    pub fn is_strictly_positive(&self) -> bool {
        self.is_positive() && !self.is_zero()
    }

    /// Coordinatewise `self ≤ other`.
    pub fn le(&self, other: &LatVec) -> Result<bool> {
        self.check_same_space(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b))
    }

    pub fn support(&self) -> AtomSet {
        AtomSet::from_sorted(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, _)| i)
                .collect(),
        )
    }

    /// `|x| ∧ |y| = 0`.
    pub fn is_disjoint(&self, other: &LatVec) -> Result<bool> {
        Ok(self.abs().meet(&other.abs())?.is_zero())
    }

    /// `x · 1_S`.
    pub fn restrict(&self, mask: &AtomSet) -> LatVec {
        let mut out = LatVec::zero(&self.space);
        for &a in mask.iter() {
            out.coeffs[a] = self.coeffs[a].clone();
        }
        out
    }

    /// Weighted L1 norm `Σ μ(a) |x_a|`.
    pub fn norm_l1(&self) -> Q {
        self.coeffs
            .iter()
            .zip(self.space.weights())
            .fold(Q::zero(), |acc, (a, w)| acc + a.abs() * w)
    }

    /// Weighted sum `Σ μ(a) x_a` (the integral of the simple function).
    pub fn integral(&self) -> Q {
        self.coeffs
            .iter()
            .zip(self.space.weights())
            .fold(Q::zero(), |acc, (a, w)| acc + a * w)
    }
}

/// Serializes as the coefficient list in `"p/q"` form.
impl serde::Serialize for LatVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::rational::ser::qs(&self.coeffs, s)
    }
}

impl PartialEq for LatVec {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.space, &other.space) || self.space.same_measure(&other.space))
            && self.coeffs == other.coeffs
    }
}

impl Eq for LatVec {}

impl fmt::Debug for LatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(fmt_q).collect();
        write!(f, "({})", parts.join(", "))
    }
}
