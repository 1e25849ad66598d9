//! JSON input specs and atomic report output.
//!
//! Rationals are strings `"p/q"` (integers may also be given as JSON
//! numbers). Operators are tagged by `"kind"`, scalar functions by `"fn"`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::de::{self, DeserializeOwned, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::lattice::{LatVec, MeasureSpace, RefinementChain};
use crate::operators::{KernelFamily, Operator, ScalarFunc, UrysonMatrix};
use crate::rational::{fmt_q, parse_q, Q};

/// A rational read from `"p/q"` or a JSON integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QStr(pub Q);

impl<'de> Deserialize<'de> for QStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = QStr;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<QStr, E> {
                parse_q(s).map(QStr).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, n: i64) -> std::result::Result<QStr, E> {
                Ok(QStr(Q::from_integer(n.into())))
            }
            fn visit_u64<E: de::Error>(self, n: u64) -> std::result::Result<QStr, E> {
                Ok(QStr(Q::from_integer(n.into())))
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for QStr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(&self.0))
    }
}

fn qs(xs: &[QStr]) -> Vec<Q> {
    xs.iter().map(|x| x.0.clone()).collect()
}

fn to_qs(xs: &[Q]) -> Vec<QStr> {
    xs.iter().cloned().map(QStr).collect()
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub weights: Vec<QStr>,
    /// `levels[l][a]`: child weights of atom `a` of level `l`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Vec<Vec<QStr>>>>,
    /// Dyadic refinement depth, an alternative to explicit `levels`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dyadic: Option<usize>,
}

impl SpaceSpec {
    pub fn from_space(space: &MeasureSpace) -> Self {
        SpaceSpec {
            weights: to_qs(space.weights()),
            levels: None,
            dyadic: None,
        }
    }

    pub fn chain(&self) -> Result<RefinementChain> {
        let base = qs(&self.weights);
        match (&self.levels, self.dyadic) {
            (Some(_), Some(_)) => Err(Error::contract("give either levels or dyadic, not both")),
            (Some(levels), None) => RefinementChain::new(
                base,
                levels
                    .iter()
                    .map(|l| l.iter().map(|c| qs(c)).collect())
                    .collect(),
            ),
            (None, Some(depth)) => RefinementChain::dyadic(base, depth),
            (None, None) => RefinementChain::new(base, vec![]),
        }
    }

    /// The finest level of the described chain.
    pub fn space(&self) -> Result<Arc<MeasureSpace>> {
        let chain = self.chain()?;
        Ok(chain.levels()[chain.finest()].clone())
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VecSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    pub coeffs: Vec<QStr>,
}

impl VecSpec {
    pub fn from_vec(x: &LatVec) -> Self {
        VecSpec {
            space: Some(SpaceSpec::from_space(x.space())),
            coeffs: to_qs(x.coeffs()),
        }
    }

    /// The vector on its own space, else on `fallback`, else on counting measure.
    pub fn build(&self, fallback: Option<&Arc<MeasureSpace>>) -> Result<LatVec> {
        let space = match (&self.space, fallback) {
            (Some(s), _) => s.space()?,
            (None, Some(s)) => s.clone(),
            (None, None) => MeasureSpace::counting(self.coeffs.len()),
        };
        LatVec::new(space, qs(&self.coeffs))
    }
}

/// Names the tag field of an internally tagged spec.
pub trait TagKey {
    const KEY: &'static str;
}

/// A spec written as `{"<KEY>": "<variant>", ...fields}`.
///
/// Parsing goes through the externally tagged form so that errors keep the
/// path of the offending field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(
    try_from = "Value",
    into = "Value",
    bound(serialize = "T: Serialize + Clone", deserialize = "T: DeserializeOwned")
)]
pub struct Tagged<T: TagKey>(pub T);

impl<T: TagKey + DeserializeOwned> TryFrom<Value> for Tagged<T> {
    type Error = String;

    fn try_from(v: Value) -> std::result::Result<Self, String> {
        let Value::Object(mut map) = v else {
            return Err(format!("expected an object with a \"{}\" field", T::KEY));
        };
        let tag = match map.remove(T::KEY) {
            Some(Value::String(tag)) => tag,
            Some(_) => return Err(format!("\"{}\" must be a string", T::KEY)),
            None => return Err(format!("missing \"{}\" field", T::KEY)),
        };
        let empty = map.is_empty();
        let mut outer = Map::new();
        outer.insert(tag.clone(), Value::Object(map));
        let mut result = serde_path_to_error::deserialize::<_, T>(Value::Object(outer));
        if empty && result.is_err() {
            // Unit variants take the bare tag.
            if let Ok(x) = serde_json::from_value(Value::String(tag.clone())) {
                result = Ok(x);
            }
        }
        match result {
            Ok(x) => Ok(Tagged(x)),
            Err(e) => {
                let path = e.path().to_string();
                let inner = path.strip_prefix(tag.as_str()).unwrap_or(&path).trim_start_matches('.');
                let msg = e.into_inner().to_string();
                Err(if inner.is_empty() { msg } else { format!("{inner}: {msg}") })
            }
        }
    }
}

impl<T: TagKey + Serialize> From<Tagged<T>> for Value {
    fn from(t: Tagged<T>) -> Value {
        let mut out = Map::new();
        match serde_json::to_value(&t.0).expect("specs serialize") {
            Value::String(tag) => {
                out.insert(T::KEY.into(), Value::String(tag));
            }
            Value::Object(map) => {
                let (tag, body) = map.into_iter().next().expect("one variant");
                out.insert(T::KEY.into(), Value::String(tag));
                if let Value::Object(fields) = body {
                    out.extend(fields);
                }
            }
            other => unreachable!("unexpected spec shape {other}"),
        }
        Value::Object(out)
    }
}

pub type Func = Tagged<FnSpec>;

impl TagKey for FnSpec {
    const KEY: &'static str = "fn";
}

impl TagKey for OpSpec {
    const KEY: &'static str = "kind";
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FnSpec {
    Zero,
    Linear { c: QStr },
    Poly { coeffs: Vec<QStr> },
    AbsPower { coeff: QStr, p: QStr },
    PiecewiseLinear { points: Vec<(QStr, QStr)> },
    Threshold { scale: QStr },
    SignSplit { pos: Box<Func>, neg: Box<Func> },
    Indicator { value: QStr },
    Abs { of: Box<Func> },
    Min { a: Box<Func>, b: Box<Func> },
    Max { a: Box<Func>, b: Box<Func> },
    Combo { terms: Vec<(QStr, Func)> },
}

impl FnSpec {
    pub fn build(&self) -> ScalarFunc {
        let b = |f: &Func| Box::new(f.0.build());
        match self {
            FnSpec::Zero => ScalarFunc::zero(),
            FnSpec::Linear { c } => ScalarFunc::linear(c.0.clone()),
            FnSpec::Poly { coeffs } => ScalarFunc::Poly(qs(coeffs)),
            FnSpec::AbsPower { coeff, p } => ScalarFunc::abs_power(coeff.0.clone(), p.0.clone()),
            FnSpec::PiecewiseLinear { points } => {
                ScalarFunc::PiecewiseLinear(points.iter().map(|(x, y)| (x.0.clone(), y.0.clone())).collect())
            }
            FnSpec::Threshold { scale } => ScalarFunc::Threshold { scale: scale.0.clone() },
            FnSpec::SignSplit { pos, neg } => ScalarFunc::SignSplit { pos: b(pos), neg: b(neg) },
            FnSpec::Indicator { value } => ScalarFunc::Indicator { value: value.0.clone() },
            FnSpec::Abs { of } => ScalarFunc::Abs(b(of)),
            FnSpec::Min { a, b: c } => ScalarFunc::Min(b(a), b(c)),
            FnSpec::Max { a, b: c } => ScalarFunc::Max(b(a), b(c)),
            FnSpec::Combo { terms } => {
                ScalarFunc::Combo(terms.iter().map(|(c, f)| (c.0.clone(), f.0.build())).collect())
            }
        }
    }

    pub fn from_func(f: &ScalarFunc) -> Self {
        let b = |g: &ScalarFunc| Box::new(Tagged(FnSpec::from_func(g)));
        let q = |x: &Q| QStr(x.clone());
        match f {
            ScalarFunc::Poly(c) if c.is_empty() => FnSpec::Zero,
            ScalarFunc::Poly(c) => FnSpec::Poly { coeffs: to_qs(c) },
            ScalarFunc::AbsPower { coeff, p } => FnSpec::AbsPower { coeff: q(coeff), p: q(p) },
            ScalarFunc::PiecewiseLinear(pts) => FnSpec::PiecewiseLinear {
                points: pts.iter().map(|(x, y)| (q(x), q(y))).collect(),
            },
            ScalarFunc::Threshold { scale } => FnSpec::Threshold { scale: q(scale) },
            ScalarFunc::SignSplit { pos, neg } => FnSpec::SignSplit { pos: b(pos), neg: b(neg) },
            ScalarFunc::Indicator { value } => FnSpec::Indicator { value: q(value) },
            ScalarFunc::Abs(g) => FnSpec::Abs { of: b(g) },
            ScalarFunc::Min(g, h) => FnSpec::Min { a: b(g), b: b(h) },
            ScalarFunc::Max(g, h) => FnSpec::Max { a: b(g), b: b(h) },
            ScalarFunc::Combo(terms) => FnSpec::Combo {
                terms: terms.iter().map(|(c, g)| (q(c), Tagged(FnSpec::from_func(g)))).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OpSpec {
    UrysonMatrix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        space: Option<SpaceSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        output: Option<SpaceSpec>,
        rows: Vec<Vec<Func>>,
    },
    NormPower {
        #[serde(default)]
        space: Option<SpaceSpec>,
        p: QStr,
    },
    SupportMeasure {
        #[serde(default)]
        space: Option<SpaceSpec>,
        nu: Vec<QStr>,
    },
    ThresholdSum {
        #[serde(default)]
        space: Option<SpaceSpec>,
    },
    LiftedLinear {
        #[serde(default)]
        space: Option<SpaceSpec>,
        #[serde(default)]
        output: Option<SpaceSpec>,
        a: Vec<Vec<QStr>>,
    },
    Identity {
        #[serde(default)]
        space: Option<SpaceSpec>,
    },
    NegPart {
        #[serde(default)]
        space: Option<SpaceSpec>,
    },
    /// A kernel on the finest level of `space`; `level` defaults to the finest.
    KernelFamily {
        space: SpaceSpec,
        table: Vec<Vec<Func>>,
        #[serde(default)]
        level: Option<usize>,
    },
}

fn resolve(spec: &Option<SpaceSpec>, fallback: Option<&Arc<MeasureSpace>>, n: Option<usize>, what: &str) -> Result<Arc<MeasureSpace>> {
    match (spec, fallback, n) {
        (Some(s), _, _) => s.space(),
        (None, Some(s), _) => Ok(s.clone()),
        (None, None, Some(n)) => Ok(MeasureSpace::counting(n)),
        (None, None, None) => Err(Error::contract(format!(
            "{what}: no space given; add \"space\" to the operator or pass --space or a vector"
        ))),
    }
}

impl OpSpec {
    pub fn from_matrix(m: &UrysonMatrix) -> Self {
        OpSpec::UrysonMatrix {
            space: Some(SpaceSpec::from_space(m.input())),
            output: Some(SpaceSpec::from_space(m.output())),
            rows: m
                .rows()
                .iter()
                .map(|r| r.iter().map(|f| Tagged(FnSpec::from_func(f))).collect())
                .collect(),
        }
    }

    /// The input space given inside the operator JSON, if any.
    pub fn own_space(&self) -> Result<Option<Arc<MeasureSpace>>> {
        match self {
            OpSpec::UrysonMatrix { space, .. }
            | OpSpec::NormPower { space, .. }
            | OpSpec::SupportMeasure { space, .. }
            | OpSpec::ThresholdSum { space }
            | OpSpec::LiftedLinear { space, .. }
            | OpSpec::Identity { space }
            | OpSpec::NegPart { space } => space.as_ref().map(SpaceSpec::space).transpose(),
            OpSpec::KernelFamily { .. } => Ok(None),
        }
    }

    pub fn kernel_family(&self) -> Result<Option<Arc<KernelFamily>>> {
        match self {
            OpSpec::KernelFamily { space, table, .. } => {
                let table = table.iter().map(|r| r.iter().map(|f| f.0.build()).collect()).collect();
                Ok(Some(Arc::new(KernelFamily::new(space.chain()?, table)?)))
            }
            _ => Ok(None),
        }
    }

    pub fn build(&self, fallback: Option<&Arc<MeasureSpace>>) -> Result<Operator> {
        Ok(match self {
            OpSpec::UrysonMatrix { space, output, rows } => {
                let cols = rows.first().map_or(0, Vec::len);
                let input = resolve(space, fallback, Some(cols), "uryson_matrix")?;
                let output = resolve(output, None, Some(rows.len()), "uryson_matrix output")?;
                let rows = rows.iter().map(|r| r.iter().map(|f| f.0.build()).collect()).collect();
                Operator::Matrix(UrysonMatrix::new(input, output, rows)?)
            }
            OpSpec::NormPower { space, p } => {
                Operator::norm_power(&resolve(space, fallback, None, "norm_power")?, p.0.clone())?
            }
            OpSpec::SupportMeasure { space, nu } => Operator::support_measure(
                &resolve(space, fallback, Some(nu.len()), "support_measure")?,
                qs(nu),
            )?,
            OpSpec::ThresholdSum { space } => {
                Operator::threshold_sum(&resolve(space, fallback, None, "threshold_sum")?)
            }
            OpSpec::LiftedLinear { space, output, a } => {
                let cols = a.first().map_or(0, Vec::len);
                Operator::lifted_linear(
                    &resolve(space, fallback, Some(cols), "lifted_linear")?,
                    &resolve(output, None, Some(a.len()), "lifted_linear output")?,
                    a.iter().map(|r| qs(r)).collect(),
                )?
            }
            OpSpec::Identity { space } => Operator::identity(&resolve(space, fallback, None, "identity")?),
            OpSpec::NegPart { space } => Operator::neg_part(&resolve(space, fallback, None, "neg_part")?),
            OpSpec::KernelFamily { level, .. } => {
                let family = self.kernel_family()?.expect("kernel spec");
                let level = level.unwrap_or(family.chain().finest());
                family.at_level(level)?
            }
        })
    }
}

/// Atom counts and value tables for the Boolean subcommand.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteiroSpec {
    pub domain_atoms: usize,
    pub codomain_atoms: usize,
    pub phi: MaskTable,
    /// Cells of the subalgebra; defaults to the trivial one.
    #[serde(default)]
    pub sub_cells: Option<Vec<u64>>,
    /// `ψ₀` image of each cell.
    pub psi0: Vec<u64>,
}

/// A map on masks, as an array indexed by mask or an object keyed by it.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MaskTable {
    Array(Vec<u64>),
    Keyed(BTreeMap<String, u64>),
}

impl MaskTable {
    pub fn to_vec(&self, size: u64) -> Result<Vec<u64>> {
        match self {
            MaskTable::Array(v) => Ok(v.clone()),
            MaskTable::Keyed(m) => {
                let mut out = vec![None; size as usize];
                for (k, v) in m {
                    let i: u64 = k
                        .parse()
                        .map_err(|_| Error::contract(format!("mask key {k:?} is not an integer")))?;
                    let slot = out
                        .get_mut(i as usize)
                        .ok_or_else(|| Error::contract(format!("mask key {i} out of range")))?;
                    *slot = Some(*v);
                }
                out.into_iter()
                    .enumerate()
                    .map(|(i, v)| v.ok_or_else(|| Error::contract(format!("no value for mask {i}"))))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundingSpec {
    #[serde(default)]
    pub space: Option<SpaceSpec>,
    pub vectors: Vec<Vec<QStr>>,
    pub lambdas: Vec<QStr>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermutationSpec {
    #[serde(default)]
    pub space: Option<SpaceSpec>,
    pub vectors: Vec<Vec<QStr>>,
}

/// Vectors over a common space: the given one or counting measure.
pub fn build_vectors(space: &Option<SpaceSpec>, vectors: &[Vec<QStr>]) -> Result<Vec<LatVec>> {
    let space = match space {
        Some(s) => s.space()?,
        None => MeasureSpace::counting(vectors.first().map_or(0, Vec::len)),
    };
    vectors.iter().map(|v| LatVec::new(space.clone(), qs(v))).collect()
}

pub fn parse_str<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse {
            path: if path == "." { origin.to_string() } else { format!("{origin}: {path}") },
            msg: e.into_inner().to_string(),
        }
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: origin.clone(),
        msg: format!("cannot read file: {e}"),
    })?;
    parse_str(&text, &origin)
}

/// Writes via a temporary file in the target directory and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::OrthAdd;
    use crate::rational::{q, qi};

    #[test]
    fn matrix_round_trip() {
        let text = r#"{"kind":"uryson_matrix","rows":[[{"fn":"linear","c":"1"},{"fn":"linear","c":-1}]]}"#;
        let spec = parse_str::<Tagged<OpSpec>>(text, "op").unwrap().0;
        let t = spec.build(None).unwrap();
        let m = t.as_matrix().unwrap();
        let again = parse_str::<Tagged<OpSpec>>(&serde_json::to_string(&Tagged(OpSpec::from_matrix(&m))).unwrap(), "op").unwrap().0;
        assert_eq!(again.build(None).unwrap().as_matrix().unwrap(), m);
        let x = LatVec::new(m.input().clone(), vec![qi(2), q(1, 2)]).unwrap();
        assert_eq!(t.apply(&x).unwrap().coeffs(), &[q(3, 2)]);
    }

    #[test]
    fn error_paths_name_the_field() {
        let text = r#"{"kind":"norm_power","p":"1/0"}"#;
        let err = parse_str::<Tagged<OpSpec>>(text, "op.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("op.json") && msg.contains('p'), "{msg}");
        let text = r#"{"coeffs":["1","x"]}"#;
        let msg = parse_str::<VecSpec>(text, "v.json").unwrap_err().to_string();
        assert!(msg.contains("coeffs[1]"), "{msg}");
    }

    #[test]
    fn spaces_and_vectors() {
        let v: VecSpec = parse_str(r#"{"space":{"weights":["1/2","1/2"],"dyadic":1},"coeffs":["1","0","0","3"]}"#, "v").unwrap();
        let x = v.build(None).unwrap();
        assert_eq!(x.space().weights(), &[q(1, 4), q(1, 4), q(1, 4), q(1, 4)]);
        assert!(parse_str::<VecSpec>(r#"{"coeffs":[],"extra":1}"#, "v").is_err());
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, b"{}").unwrap();
        write_atomic(&p, b"[1]").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "[1]");
    }

    #[test]
    fn keyed_tables() {
        let t: MaskTable = parse_str(r#"{"0":0,"1":2,"2":1,"3":3}"#, "t").unwrap();
        assert_eq!(t.to_vec(4).unwrap(), vec![0, 2, 1, 3]);
    }
}
