use serde::Serialize;

use super::OrthAdd;
use crate::error::{Error, Result};
use crate::lattice::{
    enumerate_fragments, partition_refines, AtomSet, Caps, LatVec, MeasureSpace, Partition,
    RgsIter,
};
use crate::rational::Q;

/// Which candidate attains a coordinatewise extremum.
///
/// Vector-valued suprema need not be attained by one candidate in every
/// coordinate at once; `PerCoordinate` then lists, for each output atom, the
/// first candidate (in enumeration order) that attains it there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate<C> {
    Uniform(C),
    PerCoordinate(Vec<C>),
}

impl<C> Certificate<C> {
    pub fn map<D>(self, mut f: impl FnMut(C) -> D) -> Certificate<D> {
        match self {
            Certificate::Uniform(c) => Certificate::Uniform(f(c)),
            Certificate::PerCoordinate(cs) => Certificate::PerCoordinate(cs.into_iter().map(f).collect()),
        }
    }

    pub fn uniform(&self) -> Option<&C> {
        match self {
            Certificate::Uniform(c) => Some(c),
            Certificate::PerCoordinate(_) => None,
        }
    }
}

/// An exact coordinatewise sup or inf with its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extremum<C> {
    pub value: LatVec,
    pub certificate: Certificate<C>,
}

/// `T(y)` for every fragment `y ⊑ x`, indexed by the fragment's bit mask over
/// `supp(x)`.
#[derive(Debug, Clone)]
pub struct FragmentTable {
    base: LatVec,
    support: Vec<usize>,
    values: Vec<LatVec>,
}

impl FragmentTable {
    pub fn new(t: &dyn OrthAdd, x: &LatVec, cap: usize) -> Result<Self> {
        MeasureSpace::check_same(&t.input_space(), x.space())?;
        let frags = enumerate_fragments(x, cap)?;
        let support = frags.support().to_vec();
        let values = frags
            .map(|f| t.apply(&f.value()))
            .collect::<Result<Vec<_>>>()?;
        Ok(FragmentTable {
            base: x.clone(),
            support,
            values,
        })
    }

    pub fn base(&self) -> &LatVec {
        &self.base
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Bit mask of the whole support.
    pub fn full(&self) -> u64 {
        (1u64 << self.support.len()) - 1
    }

    pub fn get(&self, bits: u64) -> &LatVec {
        &self.values[bits as usize]
    }

    pub fn values(&self) -> &[LatVec] {
        &self.values
    }

    pub fn mask(&self, bits: u64) -> AtomSet {
        AtomSet::from_bits(&self.support, bits)
    }

    pub fn partition(&self, blocks: &[u64]) -> Partition {
        Partition::from_bits(&self.base, &self.support, blocks)
    }
}

/// Coordinatewise extremum of a candidate stream, replayed once to look for a
/// single candidate attaining every coordinate.
pub(crate) fn extremize<C: Clone, I>(candidates: impl Fn() -> I, maximize: bool) -> Extremum<C>
where
    I: Iterator<Item = (C, LatVec)>,
{
    let better = |a: &Q, b: &Q| if maximize { a > b } else { a < b };
    let mut best: Option<(Vec<Q>, Vec<C>, LatVec)> = None;
    for (c, v) in candidates() {
        match &mut best {
            None => {
                let m = v.dim();
                best = Some((v.coeffs().to_vec(), vec![c; m], v));
            }
            Some((vals, who, _)) => {
                for (i, a) in v.coeffs().iter().enumerate() {
                    if better(a, &vals[i]) {
                        vals[i] = a.clone();
                        who[i] = c.clone();
                    }
                }
            }
        }
    }
    let (vals, who, sample) = best.expect("at least one candidate");
    let value = LatVec::new(sample.space().clone(), vals).expect("same dimension");
    let certificate = candidates()
        .find(|(_, v)| *v == value)
        .map_or(Certificate::PerCoordinate(who), |(c, _)| Certificate::Uniform(c));
    Extremum { value, certificate }
}

/// `|T|(x) = sup_{π ∈ Π_x} Σ_{y ∈ π} |T(y)|` by enumeration of all partitions.
pub fn modulus(t: &dyn OrthAdd, x: &LatVec, caps: Caps) -> Result<Extremum<Partition>> {
    let k = x.support().len();
    if k > caps.partitions {
        return Err(Error::CapExceeded {
            what: "modulus partition enumeration support",
            size: k,
            cap: caps.partitions,
        });
    }
    let table = FragmentTable::new(t, x, caps.fragments.max(k))?;
    let abs: Vec<LatVec> = table.values().iter().map(LatVec::abs).collect();
    let out = t.output_space();
    let ext = extremize(
        || {
            RgsIter::new(k, None).map(|blocks| {
                let mut acc = LatVec::zero(&out);
                for &b in &blocks {
                    acc = acc.add(&abs[b as usize]).expect("output space");
                }
                (blocks, acc)
            })
        },
        true,
    );
    Ok(Extremum {
        value: ext.value,
        certificate: ext.certificate.map(|b| table.partition(&b)),
    })
}

fn check_pair(t: &dyn OrthAdd, s: &dyn OrthAdd) -> Result<()> {
    MeasureSpace::check_same(&t.input_space(), &s.input_space())?;
    MeasureSpace::check_same(&t.output_space(), &s.output_space())
}

fn split_extremum(
    t: &dyn OrthAdd,
    s: &dyn OrthAdd,
    x: &LatVec,
    cap: usize,
    maximize: bool,
) -> Result<Extremum<AtomSet>> {
    check_pair(t, s)?;
    let tt = FragmentTable::new(t, x, cap)?;
    let st = FragmentTable::new(s, x, cap)?;
    let full = tt.full();
    let ext = extremize(
        || (0..=full).map(|b| (b, tt.get(b).add(st.get(full ^ b)).expect("output space"))),
        maximize,
    );
    Ok(Extremum {
        value: ext.value,
        certificate: ext.certificate.map(|b| tt.mask(b)),
    })
}

/// `(T ∨ S)(x) = sup{T(y) + S(z) : x = y ⊔ z}`; certificates are the masks of `y`.
pub fn op_join(t: &dyn OrthAdd, s: &dyn OrthAdd, x: &LatVec, cap: usize) -> Result<Extremum<AtomSet>> {
    split_extremum(t, s, x, cap, true)
}

/// `(T ∧ S)(x) = inf{T(y) + S(z) : x = y ⊔ z}`; certificates are the masks of `y`.
pub fn op_meet(t: &dyn OrthAdd, s: &dyn OrthAdd, x: &LatVec, cap: usize) -> Result<Extremum<AtomSet>> {
    split_extremum(t, s, x, cap, false)
}

/// `T⁺(x) = sup{T(y) : y ⊑ x}`.
pub fn pos_part_op(t: &dyn OrthAdd, x: &LatVec, cap: usize) -> Result<Extremum<AtomSet>> {
    let table = FragmentTable::new(t, x, cap)?;
    let ext = extremize(|| (0..=table.full()).map(|b| (b, table.get(b).clone())), true);
    Ok(Extremum {
        value: ext.value,
        certificate: ext.certificate.map(|b| table.mask(b)),
    })
}

/// `T⁻(x) = −inf{T(y) : y ⊑ x}`.
pub fn neg_part_op_calc(t: &dyn OrthAdd, x: &LatVec, cap: usize) -> Result<Extremum<AtomSet>> {
    let table = FragmentTable::new(t, x, cap)?;
    let ext = extremize(|| (0..=table.full()).map(|b| (b, table.get(b).clone())), false);
    Ok(Extremum {
        value: ext.value.neg(),
        certificate: ext.certificate.map(|b| table.mask(b)),
    })
}

/// Aggregate evaluated along a refining chain of partitions.
#[derive(Clone, Copy)]
pub enum NetKind<'a> {
    /// `Σ |T(y_i)|`, increasing to `|T|(x)`.
    AbsSum,
    /// `Σ T(y_i) ∨ S(y_i)`, increasing to `(T ∨ S)(x)`.
    JoinWith(&'a dyn OrthAdd),
    /// `Σ T(y_i) ∧ S(y_i)`, decreasing to `(T ∧ S)(x)`.
    MeetWith(&'a dyn OrthAdd),
    /// `⋁ |T(y_i)|`, decreasing for positive `T`.
    BlockwiseSup,
}

impl NetKind<'_> {
    /// Direction in which the trace is expected to move as partitions refine.
    pub fn increasing(&self) -> bool {
        matches!(self, NetKind::AbsSum | NetKind::JoinWith(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetTrace {
    pub values: Vec<LatVec>,
    pub increasing: bool,
    /// Whether `values` is monotone in the expected direction.
    pub monotone: bool,
}

pub fn directed_net_trace(
    t: &dyn OrthAdd,
    x: &LatVec,
    chain: &[Partition],
    kind: NetKind<'_>,
) -> Result<NetTrace> {
    if let NetKind::JoinWith(s) | NetKind::MeetWith(s) = kind {
        check_pair(t, s)?;
    }
    for p in chain {
        if p.base() != x {
            return Err(Error::contract("chain partition decomposes a different vector"));
        }
    }
    for (i, w) in chain.windows(2).enumerate() {
        if !partition_refines(&w[0], &w[1])? {
            return Err(Error::contract(format!(
                "partition {} does not refine partition {i}",
                i + 1
            )));
        }
    }
    let out = t.output_space();
    let mut values = Vec::with_capacity(chain.len());
    for p in chain {
        let mut acc: Option<LatVec> = None;
        for y in p.fragments() {
            let ty = t.apply(&y)?;
            let term = match kind {
                NetKind::AbsSum | NetKind::BlockwiseSup => ty.abs(),
                NetKind::JoinWith(s) => ty.join(&s.apply(&y)?)?,
                NetKind::MeetWith(s) => ty.meet(&s.apply(&y)?)?,
            };
            acc = Some(match (acc, kind) {
                (None, _) => term,
                (Some(a), NetKind::BlockwiseSup) => a.join(&term)?,
                (Some(a), _) => a.add(&term)?,
            });
        }
        values.push(acc.unwrap_or_else(|| LatVec::zero(&out)));
    }
    let increasing = kind.increasing();
    let monotone = values.windows(2).all(|w| {
        if increasing {
            w[0].le(&w[1]).unwrap_or(false)
        } else {
            w[1].le(&w[0]).unwrap_or(false)
        }
    });
    Ok(NetTrace {
        values,
        increasing,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{ScalarFunc, UrysonMatrix};
    use crate::rational::qi;

    fn one_row(fs: Vec<ScalarFunc>) -> UrysonMatrix {
        let n = fs.len();
        UrysonMatrix::new(MeasureSpace::counting(n), MeasureSpace::scalar(), vec![fs]).unwrap()
    }

    fn ones(t: &UrysonMatrix) -> LatVec {
        LatVec::constant(t.input(), qi(1))
    }

    fn sq() -> ScalarFunc {
        ScalarFunc::Poly(vec![qi(0), qi(0), qi(1)])
    }

    #[test]
    fn modulus_of_a_difference() {
        let t = one_row(vec![ScalarFunc::linear(qi(1)), ScalarFunc::linear(qi(-1))]);
        let x = ones(&t);
        let m = modulus(&t, &x, Caps::default()).unwrap();
        assert_eq!(m.value.coeffs(), &[qi(2)]);
        assert_eq!(m.certificate, Certificate::Uniform(Partition::finest(&x)));
        assert_eq!(t.apply(&x).unwrap().coeffs(), &[qi(0)]);
    }

    #[test]
    fn join_and_parts_on_one_atom() {
        let t = one_row(vec![sq()]);
        let s = one_row(vec![ScalarFunc::abs_power(qi(1), qi(1))]);
        let x = LatVec::constant(t.input(), qi(2));
        let j = op_join(&t, &s, &x, 20).unwrap();
        assert_eq!(j.value.coeffs(), &[qi(4)]);
        assert_eq!(j.certificate, Certificate::Uniform(AtomSet::new(vec![0])));
        let m = op_meet(&t, &s, &x, 20).unwrap();
        assert_eq!(m.value.coeffs(), &[qi(2)]);

        let neg = one_row(vec![ScalarFunc::linear(qi(-1))]);
        let x = ones(&neg);
        let p = pos_part_op(&neg, &x, 20).unwrap();
        assert_eq!(p.value.coeffs(), &[qi(0)]);
        assert_eq!(p.certificate, Certificate::Uniform(AtomSet::default()));
        assert_eq!(neg_part_op_calc(&neg, &x, 20).unwrap().value.coeffs(), &[qi(1)]);
    }

    #[test]
    fn split_certificates_can_be_per_coordinate() {
        // Row 0 prefers T on atom 0, row 1 prefers S on atom 0.
        let s2 = MeasureSpace::counting(2);
        let one = MeasureSpace::counting(1);
        let t = UrysonMatrix::new(one.clone(), s2.clone(), vec![vec![ScalarFunc::linear(qi(1))], vec![ScalarFunc::zero()]]).unwrap();
        let s = UrysonMatrix::new(one, s2, vec![vec![ScalarFunc::zero()], vec![ScalarFunc::linear(qi(1))]]).unwrap();
        let x = LatVec::constant(t.input(), qi(1));
        let j = op_join(&t, &s, &x, 20).unwrap();
        assert_eq!(j.value.coeffs(), &[qi(1), qi(1)]);
        assert_eq!(
            j.certificate,
            Certificate::PerCoordinate(vec![AtomSet::new(vec![0]), AtomSet::default()])
        );
    }

    #[test]
    fn net_traces() {
        let t = one_row(vec![ScalarFunc::linear(qi(1)), ScalarFunc::linear(qi(-1))]);
        let x = ones(&t);
        let chain = [Partition::coarsest(&x), Partition::finest(&x)];
        let tr = directed_net_trace(&t, &x, &chain, NetKind::AbsSum).unwrap();
        assert_eq!(tr.values.iter().map(|v| v.coeffs()[0].clone()).collect::<Vec<_>>(), vec![qi(0), qi(2)]);
        assert!(tr.monotone);
        let single = directed_net_trace(&t, &x, &chain[..1], NetKind::AbsSum).unwrap();
        assert_eq!(single.values, vec![t.apply(&x).unwrap().abs()]);
        let rev = [Partition::finest(&x), Partition::coarsest(&x)];
        assert!(directed_net_trace(&t, &x, &rev, NetKind::AbsSum).is_err());

        let pos = one_row(vec![sq(), sq()]);
        let tr = directed_net_trace(&pos, &x, &chain, NetKind::BlockwiseSup).unwrap();
        assert!(tr.monotone);
        assert_eq!(tr.values[1].coeffs(), &[qi(1)]);
    }

    #[test]
    fn caps_are_enforced() {
        let t = one_row(vec![ScalarFunc::linear(qi(1)); 4]);
        let x = ones(&t);
        let caps = Caps { fragments: 20, partitions: 3 };
        assert!(matches!(modulus(&t, &x, caps), Err(Error::CapExceeded { .. })));
        assert!(matches!(pos_part_op(&t, &x, 3), Err(Error::CapExceeded { .. })));
    }
}
