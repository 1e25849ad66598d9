use std::sync::Arc;

use num_traits::{One, Zero};

use super::ScalarFunc;
use crate::error::{Error, Result};
use crate::lattice::{LatVec, MeasureSpace};
use crate::rational::Q;

/// `T(x)_i = Σ_j φ_ij(x_j)`: the general orthogonally additive operator
/// between finite coordinatewise spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrysonMatrix {
    input: Arc<MeasureSpace>,
    output: Arc<MeasureSpace>,
    rows: Vec<Vec<ScalarFunc>>,
}

impl UrysonMatrix {
    pub fn new(
        input: Arc<MeasureSpace>,
        output: Arc<MeasureSpace>,
        rows: Vec<Vec<ScalarFunc>>,
    ) -> Result<Self> {
        if rows.len() != output.len() {
            return Err(Error::SpaceMismatch(format!(
                "{} rows for an output space with {} atoms",
                rows.len(),
                output.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != input.len() {
                return Err(Error::SpaceMismatch(format!(
                    "row {i} has {} entries for an input space with {} atoms",
                    row.len(),
                    input.len()
                )));
            }
            for f in row {
                f.validate()?;
            }
        }
        Ok(UrysonMatrix {
            input,
            output,
            rows,
        })
    }

    /// Entries built from `f(i, j)`.
    pub fn from_fn(
        input: &Arc<MeasureSpace>,
        output: &Arc<MeasureSpace>,
        f: impl Fn(usize, usize) -> ScalarFunc,
    ) -> Result<Self> {
        let rows = (0..output.len())
            .map(|i| (0..input.len()).map(|j| f(i, j)).collect())
            .collect();
        Self::new(input.clone(), output.clone(), rows)
    }

    pub fn input(&self) -> &Arc<MeasureSpace> {
        &self.input
    }

    pub fn output(&self) -> &Arc<MeasureSpace> {
        &self.output
    }

    pub fn rows(&self) -> &[Vec<ScalarFunc>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarFunc {
        &self.rows[i][j]
    }

    pub fn apply(&self, x: &LatVec) -> Result<LatVec> {
        MeasureSpace::check_same(&self.input, x.space())?;
        let mut out = vec![Q::zero(); self.output.len()];
        for (j, r) in x.coeffs().iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            for (i, row) in self.rows.iter().enumerate() {
                out[i] += row[j].eval(r)?;
            }
        }
        LatVec::new(self.output.clone(), out)
    }

    fn map_entries(&self, f: impl Fn(&ScalarFunc) -> ScalarFunc) -> UrysonMatrix {
        UrysonMatrix {
            input: self.input.clone(),
            output: self.output.clone(),
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
        }
    }

    fn zip_entries(
        &self,
        other: &UrysonMatrix,
        f: impl Fn(&ScalarFunc, &ScalarFunc) -> ScalarFunc,
    ) -> Result<UrysonMatrix> {
        self.check_same_shape(other)?;
        Ok(UrysonMatrix {
            input: self.input.clone(),
            output: self.output.clone(),
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
                .collect(),
        })
    }

    pub fn check_same_shape(&self, other: &UrysonMatrix) -> Result<()> {
        MeasureSpace::check_same(&self.input, &other.input)?;
        MeasureSpace::check_same(&self.output, &other.output)
    }

    /// `|T|`, entries `|φ_ij|`.
    pub fn modulus(&self) -> UrysonMatrix {
        self.map_entries(|f| f.clone().abs())
    }

    /// `T⁺`, entries `φ_ij ∨ 0`.
    pub fn pos_part(&self) -> UrysonMatrix {
        self.map_entries(|f| f.clone().max(ScalarFunc::zero()))
    }

    /// `T⁻`, entries `(−φ_ij) ∨ 0`.
    pub fn neg_part(&self) -> UrysonMatrix {
        self.map_entries(|f| f.clone().scaled(-Q::one()).max(ScalarFunc::zero()))
    }

    /// `T ∨ S`, entries `φ_ij ∨ ψ_ij`.
    pub fn join(&self, other: &UrysonMatrix) -> Result<UrysonMatrix> {
        self.zip_entries(other, |a, b| a.clone().max(b.clone()))
    }

    /// `T ∧ S`, entries `φ_ij ∧ ψ_ij`.
    pub fn meet(&self, other: &UrysonMatrix) -> Result<UrysonMatrix> {
        self.zip_entries(other, |a, b| a.clone().min(b.clone()))
    }

    pub fn add(&self, other: &UrysonMatrix) -> Result<UrysonMatrix> {
        self.zip_entries(other, |a, b| {
            ScalarFunc::Combo(vec![(Q::one(), a.clone()), (Q::one(), b.clone())])
        })
    }

    pub fn scale(&self, c: &Q) -> UrysonMatrix {
        self.map_entries(|f| f.clone().scaled(c.clone()))
    }

    /// Closed form `|T|(x)_i = Σ_j |φ_ij(x_j)|`.
    pub fn modulus_at(&self, x: &LatVec) -> Result<LatVec> {
        self.modulus().apply(x)
    }

    /// First row with two structurally nonzero columns, as `(row, j1, j2)`.
    pub fn dp_violation(&self) -> Option<(usize, usize, usize)> {
        for (i, row) in self.rows.iter().enumerate() {
            let mut nonzero = row
                .iter()
                .enumerate()
                .filter(|(_, f)| !f.is_identically_zero())
                .map(|(j, _)| j);
            if let (Some(j1), Some(j2)) = (nonzero.next(), nonzero.next()) {
                return Some((i, j1, j2));
            }
        }
        None
    }

    /// Disjointness preserving: every row has at most one nonzero column.
    pub fn is_dp(&self) -> bool {
        self.dp_violation().is_none()
    }

    /// Structural positivity: every entry is nonnegative.
    pub fn is_positive(&self) -> bool {
        self.rows.iter().flatten().all(ScalarFunc::is_nonnegative)
    }

    /// `S ≤ T` checked entrywise on a rational grid. Entrywise comparison is
    /// exactly `S ≤ T` on all vectors with coefficients in the grid.
    pub fn le_on_grid(&self, other: &UrysonMatrix, grid: &[Q]) -> Result<bool> {
        self.check_same_shape(other)?;
        for (a, b) in self.rows.iter().flatten().zip(other.rows.iter().flatten()) {
            for r in grid {
                if a.eval(r)? > b.eval(r)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{default_grid, qi};

    fn diff_op() -> UrysonMatrix {
        let input = MeasureSpace::counting(2);
        UrysonMatrix::new(
            input,
            MeasureSpace::scalar(),
            vec![vec![ScalarFunc::linear(qi(1)), ScalarFunc::linear(qi(-1))]],
        )
        .unwrap()
    }

    #[test]
    fn apply_and_modulus() {
        let t = diff_op();
        let x = LatVec::new(t.input().clone(), vec![qi(1), qi(1)]).unwrap();
        assert_eq!(t.apply(&x).unwrap().coeffs(), &[qi(0)]);
        assert_eq!(t.modulus_at(&x).unwrap().coeffs(), &[qi(2)]);
        assert_eq!(t.pos_part().apply(&x).unwrap().coeffs(), &[qi(1)]);
        assert_eq!(t.neg_part().apply(&x).unwrap().coeffs(), &[qi(1)]);
    }

    #[test]
    fn shape_is_checked() {
        let s = MeasureSpace::counting(2);
        assert!(UrysonMatrix::new(s.clone(), s.clone(), vec![vec![ScalarFunc::zero()]]).is_err());
        let bad = ScalarFunc::Poly(vec![qi(1)]);
        assert!(UrysonMatrix::new(s.clone(), MeasureSpace::scalar(), vec![vec![bad, ScalarFunc::zero()]]).is_err());
    }

    #[test]
    fn disjointness_preservation() {
        let s = MeasureSpace::counting(2);
        let sq = ScalarFunc::Poly(vec![qi(0), qi(0), qi(1)]);
        let one_col = UrysonMatrix::new(s.clone(), MeasureSpace::scalar(), vec![vec![sq.clone(), ScalarFunc::zero()]]).unwrap();
        assert!(one_col.is_dp());
        assert!(one_col.modulus().is_dp());
        let two_col = UrysonMatrix::new(
            s,
            MeasureSpace::scalar(),
            vec![vec![sq, ScalarFunc::abs_power(qi(1), qi(1))]],
        )
        .unwrap();
        assert_eq!(two_col.dp_violation(), Some((0, 0, 1)));
    }

    #[test]
    fn grid_order() {
        let t = diff_op();
        let half = t.scale(&crate::rational::q(1, 2));
        assert!(half.modulus().le_on_grid(&t.modulus(), &default_grid()).unwrap());
        assert!(!t.modulus().le_on_grid(&half.modulus(), &default_grid()).unwrap());
        assert!(t.meet(&half).unwrap().le_on_grid(&t.join(&half).unwrap(), &default_grid()).unwrap());
    }
}
