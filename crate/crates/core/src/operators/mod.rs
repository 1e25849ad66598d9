//! Orthogonally additive operators and their brute-force lattice calculus.
//!
//! On a finite coordinatewise space every orthogonally additive map is a
//! [`UrysonMatrix`]; the concrete families in [`Operator`] evaluate directly
//! and also expose their matrix form, which the closed-form calculus uses.

mod calculus;
mod checks;
mod func;
mod matrix;

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

pub use calculus::{
    directed_net_trace, modulus, neg_part_op_calc, op_join, op_meet, pos_part_op, Certificate,
    Extremum, FragmentTable, NetKind, NetTrace,
};
pub(crate) use calculus::extremize;
pub use checks::{
    check_orthogonal_additivity, dominance_and_solidity_check, is_disjointness_preserving,
    is_positive_operator, operator_le, DominanceReport, DpMode, DpReport, OaReport,
};
pub use func::ScalarFunc;
pub use matrix::UrysonMatrix;

use crate::error::{Error, Result};
use crate::lattice::{LatVec, MeasureSpace, RefinementChain};
use crate::rational::{abs_pow, fmt_q, Q};

/// Evaluation interface `T: E → F` with `T(x ⊔ y) = T(x) + T(y)`.
pub trait OrthAdd {
    fn input_space(&self) -> Arc<MeasureSpace>;
    fn output_space(&self) -> Arc<MeasureSpace>;
    fn apply(&self, x: &LatVec) -> Result<LatVec>;
    /// Short tag naming the concrete family.
    fn family(&self) -> &'static str;

    /// Matrix form, when the operator knows its own scalar sections.
    fn as_matrix(&self) -> Option<UrysonMatrix> {
        None
    }
}

impl OrthAdd for UrysonMatrix {
    fn input_space(&self) -> Arc<MeasureSpace> {
        self.input().clone()
    }

    fn output_space(&self) -> Arc<MeasureSpace> {
        self.output().clone()
    }

    fn apply(&self, x: &LatVec) -> Result<LatVec> {
        UrysonMatrix::apply(self, x)
    }

    fn family(&self) -> &'static str {
        "uryson_matrix"
    }

    fn as_matrix(&self) -> Option<UrysonMatrix> {
        Some(self.clone())
    }
}

/// Discretized Uryson integral operator on a refinement chain.
///
/// The kernel is a table of scalar sections `K(s, t, ·)` over pairs of
/// finest-level atoms. The level-`n` operator embeds its argument into the
/// finest level and evaluates `T_n(f)(s) = Σ_t K(s, t, f(t)) μ(t)`, so
/// `T_{n+1} ∘ embed = T_n` holds by construction.
#[derive(Debug, Clone)]
pub struct KernelFamily {
    chain: RefinementChain,
    table: Vec<Vec<ScalarFunc>>,
    // ancestors[n][t]: the level-n atom containing finest atom t.
    ancestors: Vec<Vec<usize>>,
}

impl KernelFamily {
    pub fn new(chain: RefinementChain, table: Vec<Vec<ScalarFunc>>) -> Result<Self> {
        let finest = chain.level(chain.finest())?.clone();
        let n = finest.len();
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::SpaceMismatch(format!(
                "kernel table must be {n}×{n} over the finest level"
            )));
        }
        for f in table.iter().flatten() {
            f.validate()?;
        }
        let mut ancestors = vec![(0..n).collect::<Vec<usize>>()];
        for level in (0..chain.finest()).rev() {
            let below = chain.level(level + 1)?;
            let prev = ancestors.last().expect("nonempty");
            let up = prev
                .iter()
                .map(|&a| below.parent(a).expect("refined level has parents"))
                .collect();
            ancestors.push(up);
        }
        ancestors.reverse();
        Ok(KernelFamily {
            chain,
            table,
            ancestors,
        })
    }

    pub fn chain(&self) -> &RefinementChain {
        &self.chain
    }

    pub fn table(&self) -> &[Vec<ScalarFunc>] {
        &self.table
    }

    pub fn num_levels(&self) -> usize {
        self.chain.num_levels()
    }

    /// The level-`n` member of the family.
    pub fn at_level(self: &Arc<Self>, level: usize) -> Result<Operator> {
        self.chain.level(level)?;
        Ok(Operator::KernelLevel {
            family: self.clone(),
            level,
        })
    }

    fn finest_space(&self) -> Arc<MeasureSpace> {
        self.chain.levels()[self.chain.finest()].clone()
    }

    fn apply_at(&self, level: usize, x: &LatVec) -> Result<LatVec> {
        let space = self.chain.level(level)?;
        MeasureSpace::check_same(space, x.space())?;
        let finest = self.finest_space();
        let up = &self.ancestors[level];
        let mut out = vec![Q::zero(); finest.len()];
        for (t, &a) in up.iter().enumerate() {
            let r = x.coeff(a);
            if r.is_zero() {
                continue;
            }
            let mu = finest.weight(t);
            for (s, row) in self.table.iter().enumerate() {
                out[s] += row[t].eval(r)? * mu;
            }
        }
        LatVec::new(finest, out)
    }

    fn matrix_at(&self, level: usize) -> Result<UrysonMatrix> {
        let space = self.chain.level(level)?.clone();
        let finest = self.finest_space();
        let up = &self.ancestors[level];
        UrysonMatrix::from_fn(&space, &finest, |s, a| {
            let terms = up
                .iter()
                .enumerate()
                .filter(|&(_, &b)| b == a)
                .map(|(t, _)| (finest.weight(t).clone(), self.table[s][t].clone()))
                .collect();
            ScalarFunc::Combo(terms)
        })
    }
}

/// The concrete operator families.
#[derive(Debug, Clone)]
pub enum Operator {
    Matrix(UrysonMatrix),
    /// `T(x) = ν(supp x) = Σ_{a ∈ supp x} ν_a`, scalar valued.
    SupportMeasure {
        space: Arc<MeasureSpace>,
        nu: Vec<Q>,
    },
    /// `T(x) = ∥x∥_p^p = Σ μ(a) |x_a|^p`, scalar valued.
    NormPower { space: Arc<MeasureSpace>, p: Q },
    /// `T(x) = Σ_{n ∈ I_x} n (|x_n| − 1)` with `I_x = {n : |x_n| ≥ 1}`, atoms
    /// numbered from 1.
    ThresholdSum { space: Arc<MeasureSpace> },
    /// `T(x) = A|x|` for a positive matrix `A`.
    LiftedLinear {
        input: Arc<MeasureSpace>,
        output: Arc<MeasureSpace>,
        a: Vec<Vec<Q>>,
    },
    /// `T(x) = x⁻`.
    NegPart { space: Arc<MeasureSpace> },
    KernelLevel {
        family: Arc<KernelFamily>,
        level: usize,
    },
}

impl Operator {
    pub fn support_measure(space: &Arc<MeasureSpace>, nu: Vec<Q>) -> Result<Self> {
        if nu.len() != space.len() {
            return Err(Error::SpaceMismatch(format!(
                "{} measure values for {} atoms",
                nu.len(),
                space.len()
            )));
        }
        Ok(Operator::SupportMeasure {
            space: space.clone(),
            nu,
        })
    }

    pub fn norm_power(space: &Arc<MeasureSpace>, p: Q) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::contract(format!(
                "norm_power exponent {} must be positive",
                fmt_q(&p)
            )));
        }
        Ok(Operator::NormPower {
            space: space.clone(),
            p,
        })
    }

    pub fn threshold_sum(space: &Arc<MeasureSpace>) -> Self {
        Operator::ThresholdSum {
            space: space.clone(),
        }
    }

    pub fn lifted_linear(
        input: &Arc<MeasureSpace>,
        output: &Arc<MeasureSpace>,
        a: Vec<Vec<Q>>,
    ) -> Result<Self> {
        if a.len() != output.len() || a.iter().any(|row| row.len() != input.len()) {
            return Err(Error::SpaceMismatch(format!(
                "lifted_linear matrix must be {}×{}",
                output.len(),
                input.len()
            )));
        }
        if a.iter().flatten().any(Signed::is_negative) {
            return Err(Error::contract("lifted_linear matrix must be positive"));
        }
        Ok(Operator::LiftedLinear {
            input: input.clone(),
            output: output.clone(),
            a,
        })
    }

    /// `G(x) = |x|`, the lifted identity.
    pub fn identity(space: &Arc<MeasureSpace>) -> Self {
        let n = space.len();
        let a = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Q::one() } else { Q::zero() })
                    .collect()
            })
            .collect();
        Operator::LiftedLinear {
            input: space.clone(),
            output: space.clone(),
            a,
        }
    }

    pub fn neg_part(space: &Arc<MeasureSpace>) -> Self {
        Operator::NegPart {
            space: space.clone(),
        }
    }

    fn scalar(v: Q) -> Result<LatVec> {
        LatVec::new(MeasureSpace::scalar(), vec![v])
    }
}

impl OrthAdd for Operator {
    fn input_space(&self) -> Arc<MeasureSpace> {
        match self {
            Operator::Matrix(m) => m.input().clone(),
            Operator::SupportMeasure { space, .. }
            | Operator::NormPower { space, .. }
            | Operator::ThresholdSum { space }
            | Operator::NegPart { space } => space.clone(),
            Operator::LiftedLinear { input, .. } => input.clone(),
            Operator::KernelLevel { family, level } => family.chain.levels()[*level].clone(),
        }
    }

    fn output_space(&self) -> Arc<MeasureSpace> {
        match self {
            Operator::Matrix(m) => m.output().clone(),
            Operator::SupportMeasure { .. }
            | Operator::NormPower { .. }
            | Operator::ThresholdSum { .. } => MeasureSpace::scalar(),
            Operator::NegPart { space } => space.clone(),
            Operator::LiftedLinear { output, .. } => output.clone(),
            Operator::KernelLevel { family, .. } => family.finest_space(),
        }
    }

    fn apply(&self, x: &LatVec) -> Result<LatVec> {
        if let Operator::Matrix(m) = self {
            return m.apply(x);
        }
        if let Operator::KernelLevel { family, level } = self {
            return family.apply_at(*level, x);
        }
        MeasureSpace::check_same(&self.input_space(), x.space())?;
        match self {
            Operator::SupportMeasure { nu, .. } => Self::scalar(
                x.support()
                    .iter()
                    .fold(Q::zero(), |acc, &a| acc + &nu[a]),
            ),
            Operator::NormPower { p, .. } => {
                let mut acc = Q::zero();
                for (r, w) in x.coeffs().iter().zip(x.space().weights()) {
                    acc += abs_pow(r, p)? * w;
                }
                Self::scalar(acc)
            }
            Operator::ThresholdSum { .. } => Self::scalar(
                x.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.abs() >= Q::one())
                    .fold(Q::zero(), |acc, (n, r)| {
                        acc + Q::from_integer((n + 1).into()) * (r.abs() - Q::one())
                    }),
            ),
            Operator::LiftedLinear { output, a, .. } => {
                let ax = x.abs();
                let coeffs = a
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(ax.coeffs())
                            .fold(Q::zero(), |acc, (aij, r)| acc + aij * r)
                    })
                    .collect();
                LatVec::new(output.clone(), coeffs)
            }
            Operator::NegPart { .. } => Ok(x.neg_part()),
            Operator::Matrix(_) | Operator::KernelLevel { .. } => unreachable!(),
        }
    }

    fn family(&self) -> &'static str {
        match self {
            Operator::Matrix(_) => "uryson_matrix",
            Operator::SupportMeasure { .. } => "support_measure",
            Operator::NormPower { .. } => "norm_power",
            Operator::ThresholdSum { .. } => "threshold_sum",
            Operator::LiftedLinear { .. } => "lifted_linear",
            Operator::NegPart { .. } => "neg_part_op",
            Operator::KernelLevel { .. } => "kernel_level",
        }
    }

    fn as_matrix(&self) -> Option<UrysonMatrix> {
        let input = self.input_space();
        let output = self.output_space();
        let m = match self {
            Operator::Matrix(m) => return Some(m.clone()),
            Operator::SupportMeasure { nu, .. } => UrysonMatrix::from_fn(&input, &output, |_, j| {
                ScalarFunc::Indicator {
                    value: nu[j].clone(),
                }
            }),
            Operator::NormPower { p, .. } => UrysonMatrix::from_fn(&input, &output, |_, j| {
                ScalarFunc::abs_power(input.weight(j).clone(), p.clone())
            }),
            Operator::ThresholdSum { .. } => UrysonMatrix::from_fn(&input, &output, |_, j| {
                ScalarFunc::Threshold {
                    scale: Q::from_integer((j + 1).into()),
                }
            }),
            Operator::LiftedLinear { a, .. } => UrysonMatrix::from_fn(&input, &output, |i, j| {
                ScalarFunc::abs_power(a[i][j].clone(), Q::one())
            }),
            Operator::NegPart { .. } => UrysonMatrix::from_fn(&input, &output, |i, j| {
                if i == j {
                    ScalarFunc::SignSplit {
                        pos: Box::new(ScalarFunc::zero()),
                        neg: Box::new(ScalarFunc::linear(-Q::one())),
                    }
                } else {
                    ScalarFunc::zero()
                }
            }),
            Operator::KernelLevel { family, level } => family.matrix_at(*level),
        };
        m.ok()
    }
}

/// An arbitrary map wrapped as an operator. Orthogonal additivity is not
/// assumed; it is what [`check_orthogonal_additivity`] tests.
pub struct FnOperator<F> {
    input: Arc<MeasureSpace>,
    output: Arc<MeasureSpace>,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&LatVec) -> Result<LatVec>,
{
    pub fn new(input: &Arc<MeasureSpace>, output: &Arc<MeasureSpace>, f: F) -> Self {
        FnOperator {
            input: input.clone(),
            output: output.clone(),
            f,
        }
    }
}

impl<F> fmt::Debug for FnOperator<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnOperator({} → {})", self.input.len(), self.output.len())
    }
}

impl<F> OrthAdd for FnOperator<F>
where
    F: Fn(&LatVec) -> Result<LatVec>,
{
    fn input_space(&self) -> Arc<MeasureSpace> {
        self.input.clone()
    }

    fn output_space(&self) -> Arc<MeasureSpace> {
        self.output.clone()
    }

    fn apply(&self, x: &LatVec) -> Result<LatVec> {
        MeasureSpace::check_same(&self.input, x.space())?;
        (self.f)(x)
    }

    fn family(&self) -> &'static str {
        "function"
    }
}
