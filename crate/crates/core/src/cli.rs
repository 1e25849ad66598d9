//! Command-line front end: reads JSON specs, runs one computation and writes
//! a JSON (or CSV) report.
//!
//! Exit codes: 0 on success, 2 on contract, input and parse errors, 3 when an
//! enumeration cap refuses the input, 1 on internal invariant failures.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::boolean::{monteiro_extend, BoolMap, FiniteBoolAlg, SubAlgebra};
use crate::error::{Error, Result};
use crate::io::{self, MonteiroSpec, OpSpec, Tagged, PermutationSpec, RoundingSpec, SpaceSpec, VecSpec};
use crate::lattice::{Caps, LatVec, MeasureSpace, RefinementChain, FRAGMENT_CAP, PARTITION_CAP};
use crate::narrowness::{self, LambdaStrategy, OperatorFamily};
use crate::operators::{self, Certificate, DpMode, Operator, OrthAdd};
use crate::rational::{parse_q, Q};
use crate::rounding::{self, PermutationMode, PERMUTATION_BRUTE_CAP};
use crate::suite;

#[derive(Debug, Parser)]
#[command(name = "uryson", version, about = "Exact lattice calculus of orthogonally additive operators")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Fallback space spec for operators and vectors without their own.
    #[arg(long, global = true)]
    pub space: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = FRAGMENT_CAP, value_parser = fragment_cap)]
    pub cap_fragments: usize,
    #[arg(long, global = true, default_value_t = PARTITION_CAP, value_parser = partition_cap)]
    pub cap_partitions: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn parse_cap(s: &str, max: usize) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if (1..=max).contains(&n) => Ok(n),
        _ => Err(format!("expected an integer in 1..={max}")),
    }
}

fn fragment_cap(s: &str) -> std::result::Result<usize, String> {
    parse_cap(s, 63)
}

fn partition_cap(s: &str) -> std::result::Result<usize, String> {
    parse_cap(s, 63)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Brute,
    Bb,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(alias = "norm_power")]
    NormPower,
    Identity,
    #[value(alias = "support_measure")]
    SupportMeasure,
    Alternating,
    #[value(alias = "first_atom")]
    FirstAtom,
}

#[derive(Debug, Args)]
pub struct OpVec {
    #[arg(long)]
    pub op: PathBuf,
    #[arg(long)]
    pub vec: PathBuf,
}

#[derive(Debug, Args)]
pub struct Curves {
    /// Built-in family; ignored when --op names a kernel family.
    #[arg(long, value_enum, default_value_t = Family::NormPower)]
    pub family: Family,
    /// Exponent for the norm_power family.
    #[arg(long, default_value = "1")]
    pub p: String,
    /// A kernel_family operator spec.
    #[arg(long)]
    pub op: Option<PathBuf>,
    /// `e` at level 0; defaults to the constant 1.
    #[arg(long)]
    pub vec: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Samples orthogonal additivity and tests disjointness preservation.
    CheckOa {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// `|T|(x)` by partition enumeration.
    Modulus(OpVec),
    /// `(T ∨ S)(x)`.
    OpJoin {
        #[command(flatten)]
        io: OpVec,
        #[arg(long)]
        other: PathBuf,
    },
    /// `(T ∧ S)(x)`.
    OpMeet {
        #[command(flatten)]
        io: OpVec,
        #[arg(long)]
        other: PathBuf,
    },
    /// The Enflo-Starbird function `λ_T(x)`.
    Lambda {
        #[command(flatten)]
        io: OpVec,
        #[arg(long, value_enum, default_value_t = Mode::Bb)]
        mode: Mode,
    },
    /// Minimum discrepancy over mutually complemented fragments.
    NarrowSearch(OpVec),
    /// Balanced disjoint tree, optionally with the rounding decomposition at
    /// level --levels.
    Tree {
        #[command(flatten)]
        io: OpVec,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Alternating-block decomposition for a positive operator.
    Pipeline {
        #[command(flatten)]
        io: OpVec,
        #[arg(long, value_enum, default_value_t = Mode::Greedy)]
        mode: Mode,
        #[arg(long)]
        target: Option<String>,
    },
    /// Certified coefficient rounding of a JSON instance.
    Rounding {
        #[arg(long)]
        input: PathBuf,
    },
    /// Signed permutation bound of a JSON instance.
    Permutation {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Brute)]
        mode: Mode,
    },
    /// Minimum-discrepancy curve across refinement levels.
    Diagnose(Curves),
    /// Curves for `T` and `|T|` side by side.
    Domination(Curves),
    /// Disjointness-preserving minorant from `λ_T(e)`.
    ExtractDp {
        #[command(flatten)]
        io: OpVec,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Extends a Boolean homomorphism below a join-preserving map.
    Monteiro {
        #[arg(long)]
        input: PathBuf,
    },
    /// `∥f − g∥ = ∥|f| − |g|∥ + ∥f∥ + ∥g∥ − ∥f + g∥`.
    IdentityL1 {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Seeded property suite.
    Suite,
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed configuration and writes its report.
pub fn execute(config: &RunConfig) -> Result<()> {
    let common = &config.common;
    let report = report(&config.command, common)?;
    let text = match (report, common.format) {
        (Report::Json(v), Format::Json) => {
            let mut s = serde_json::to_string(&v).map_err(|e| Error::internal(e.to_string()))?;
            s.push('\n');
            s
        }
        (Report::Curve { csv, .. }, Format::Csv) => csv,
        (Report::Curve { json, .. }, Format::Json) => {
            let mut s = serde_json::to_string(&json).map_err(|e| Error::internal(e.to_string()))?;
            s.push('\n');
            s
        }
        (Report::Json(_), Format::Csv) => {
            return Err(Error::contract("csv output is only available for diagnose and domination"))
        }
    };
    match &common.out {
        Some(path) => io::write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

enum Report {
    Json(Value),
    Curve { json: Value, csv: String },
}

fn to_json<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::internal(e.to_string()))
}

fn caps(common: &Common) -> Caps {
    Caps {
        fragments: common.cap_fragments,
        partitions: common.cap_partitions,
    }
}

fn fallback_space(common: &Common) -> Result<Option<Arc<MeasureSpace>>> {
    common
        .space
        .as_deref()
        .map(|p| io::read_json::<SpaceSpec>(p)?.space())
        .transpose()
}

struct Loaded {
    op: Operator,
    x: LatVec,
}

// Input space: the operator's own, else the vector's, else --space, else
// counting measure on the vector's length.
fn load_op(path: &Path, space: Option<&Arc<MeasureSpace>>) -> Result<Operator> {
    io::read_json::<Tagged<OpSpec>>(path)?.0.build(space)
}

fn load(io_args: &OpVec, common: &Common) -> Result<Loaded> {
    let op_spec = io::read_json::<Tagged<OpSpec>>(&io_args.op)?.0;
    let vec_spec: VecSpec = io::read_json(&io_args.vec)?;
    let fallback = fallback_space(common)?;
    let space = match (op_spec.own_space()?, &vec_spec.space, fallback) {
        (Some(s), _, _) => Some(s),
        (None, Some(s), _) => Some(s.space()?),
        (None, None, Some(s)) => Some(s),
        (None, None, None) => None,
    };
    let x = vec_spec.build(space.as_ref())?;
    let op = op_spec.build(Some(x.space()))?;
    Ok(Loaded { op, x })
}

fn certificate_json(c: &Certificate<crate::lattice::Partition>, key: &str) -> Result<(String, Value)> {
    Ok(match c {
        Certificate::Uniform(p) => (key.to_string(), to_json(p)?),
        Certificate::PerCoordinate(ps) => (format!("{key}_per_coordinate"), to_json(ps)?),
    })
}

fn lattice_report(e: &operators::Extremum<crate::lattice::AtomSet>) -> Result<Value> {
    Ok(json!({ "value": e.value, "certificate": e.certificate }))
}

fn parse_mode_lambda(mode: Mode) -> Result<LambdaStrategy> {
    match mode {
        Mode::Brute => Ok(LambdaStrategy::Brute),
        Mode::Bb => Ok(LambdaStrategy::BranchAndBound),
        Mode::Greedy => Err(Error::contract("lambda supports --mode brute or bb")),
    }
}

fn parse_mode_perm(mode: Mode) -> Result<PermutationMode> {
    match mode {
        Mode::Brute => Ok(PermutationMode::Brute),
        Mode::Greedy => Ok(PermutationMode::GreedyVerified),
        Mode::Bb => Err(Error::contract("this command supports --mode brute or greedy")),
    }
}

fn curve_setup(c: &Curves, common: &Common) -> Result<(OperatorFamily, RefinementChain, LatVec)> {
    let (family, chain) = match &c.op {
        Some(path) => {
            let spec = io::read_json::<Tagged<OpSpec>>(path)?.0;
            let family = spec
                .kernel_family()?
                .ok_or_else(|| Error::contract("--op for curves must be a kernel_family"))?;
            let chain = family.chain().clone();
            (OperatorFamily::Kernel(family), chain)
        }
        None => {
            let chain = match &common.space {
                Some(p) => io::read_json::<SpaceSpec>(p)?.chain()?,
                None => RefinementChain::uniform_dyadic(c.levels),
            };
            let family = match c.family {
                Family::NormPower => OperatorFamily::NormPower { p: parse_q(&c.p)? },
                Family::Identity => OperatorFamily::Identity,
                Family::SupportMeasure => OperatorFamily::SupportMeasure,
                Family::Alternating => OperatorFamily::Alternating,
                Family::FirstAtom => OperatorFamily::FirstAtom,
            };
            (family, chain)
        }
    };
    let base = chain.level(0)?.clone();
    let e = match &c.vec {
        Some(p) => io::read_json::<VecSpec>(p)?.build(Some(&base))?,
        None => LatVec::constant(&base, Q::from_integer(1.into())),
    };
    Ok((family, chain, e))
}

fn report(command: &Command, common: &Common) -> Result<Report> {
    let caps = caps(common);
    let json = |v: Value| Ok(Report::Json(v));
    match command {
        Command::CheckOa { op, trials } => {
            let t = load_op(op, fallback_space(common)?.as_ref())?;
            let oa = operators::check_orthogonal_additivity(&t, *trials, common.seed)?;
            let mode = match t.as_matrix() {
                Some(_) => DpMode::ExactMatrix,
                None => DpMode::Sampled {
                    trials: *trials,
                    seed: common.seed,
                },
            };
            let dp = operators::is_disjointness_preserving(&t, mode)?;
            json(json!({ "family": t.family(), "orthogonally_additive": oa.passed(), "oa": oa, "dp": dp }))
        }
        Command::Modulus(io_args) => {
            let l = load(io_args, common)?;
            let m = operators::modulus(&l.op, &l.x, caps)?;
            let (key, cert) = certificate_json(&m.certificate, "argmin_partition")?;
            let mut v = serde_json::Map::new();
            v.insert("value".into(), to_json(&m.value)?);
            v.insert(key, cert);
            json(Value::Object(v))
        }
        Command::OpJoin { io: io_args, other } | Command::OpMeet { io: io_args, other } => {
            let l = load(io_args, common)?;
            let s = load_op(other, Some(l.x.space()))?;
            let e = if matches!(command, Command::OpJoin { .. }) {
                operators::op_join(&l.op, &s, &l.x, caps.fragments)?
            } else {
                operators::op_meet(&l.op, &s, &l.x, caps.fragments)?
            };
            json(lattice_report(&e)?)
        }
        Command::Lambda { io: io_args, mode } => {
            let l = load(io_args, common)?;
            let r = narrowness::lambda_es(&l.op, &l.x, parse_mode_lambda(*mode)?, caps)?;
            json(to_json(&r)?)
        }
        Command::NarrowSearch(io_args) => {
            let l = load(io_args, common)?;
            json(to_json(&narrowness::min_discrepancy(&l.op, &l.x, caps.fragments)?)?)
        }
        Command::Tree { io: io_args, depth, levels } => {
            let l = load(io_args, common)?;
            match levels {
                Some(m) => {
                    let (w, tree) = narrowness::rounding_decomposition(&l.op, &l.x, *m, caps.fragments)?;
                    json(json!({ "tree": tree, "rounding": w }))
                }
                None => json(to_json(&narrowness::balanced_tree(&l.op, &l.x, *depth, caps.fragments)?)?),
            }
        }
        Command::Pipeline { io: io_args, mode, target } => {
            let l = load(io_args, common)?;
            let target = target.as_deref().map(parse_q).transpose()?;
            let r = narrowness::lambda_to_narrow_pipeline(
                &l.op,
                &l.x,
                target.as_ref(),
                parse_mode_perm(*mode)?,
                2 * PERMUTATION_BRUTE_CAP,
            )?;
            json(to_json(&r)?)
        }
        Command::Rounding { input } => {
            let spec: RoundingSpec = io::read_json(input)?;
            let xs = io::build_vectors(&spec.space, &spec.vectors)?;
            let lambdas: Vec<Q> = spec.lambdas.iter().map(|l| l.0.clone()).collect();
            json(to_json(&rounding::round_coefficients(&xs, &lambdas)?)?)
        }
        Command::Permutation { input, mode } => {
            let spec: PermutationSpec = io::read_json(input)?;
            let z = io::build_vectors(&spec.space, &spec.vectors)?;
            let w = rounding::signed_permutation(&z, parse_mode_perm(*mode)?, PERMUTATION_BRUTE_CAP)?;
            json(json!({ "witness": w, "certified": w.certified() }))
        }
        Command::Diagnose(c) => {
            let (family, chain, e) = curve_setup(c, common)?;
            let curve = narrowness::refinement_diagnostics(&family, &chain, &e, c.levels, caps.fragments)?;
            Ok(Report::Curve {
                json: to_json(&curve)?,
                csv: curve.to_csv(),
            })
        }
        Command::Domination(c) => {
            let (family, chain, e) = curve_setup(c, common)?;
            let r = narrowness::domination_diagnostic(&family, &chain, &e, c.levels, caps.fragments)?;
            let mut csv = String::from("level,delta_t,delta_t_num,delta_t_den,delta_abs_t,delta_abs_t_num,delta_abs_t_den\n");
            for (n, (a, b)) in r.operator.delta.iter().zip(&r.modulus.delta).enumerate() {
                csv.push_str(&format!(
                    "{n},{},{},{},{},{},{}\n",
                    crate::rational::fmt_q(a),
                    a.numer(),
                    a.denom(),
                    crate::rational::fmt_q(b),
                    b.numer(),
                    b.denom()
                ));
            }
            Ok(Report::Curve { json: to_json(&r)?, csv })
        }
        Command::ExtractDp { io: io_args, samples } => {
            let l = load(io_args, common)?;
            let t = l
                .op
                .as_matrix()
                .ok_or_else(|| Error::Unsupported("extract-dp needs a matrix operator".into()))?;
            match narrowness::dp_witness_extract(&t, &l.x, caps, *samples, common.seed)? {
                None => json(json!({ "witness": null })),
                Some(w) => json(json!({
                    "witness": {
                        "e": w.e,
                        "f": w.f,
                        "psi_atom_images": w.psi.images(),
                        "s": Tagged(OpSpec::from_matrix(&w.s)),
                        "fragment_values": w.fragment_values,
                        "report": w.report,
                    }
                })),
            }
        }
        Command::Monteiro { input } => {
            let spec: MonteiroSpec = io::read_json(input)?;
            let a = FiniteBoolAlg::new(spec.domain_atoms)?;
            let b = FiniteBoolAlg::new(spec.codomain_atoms)?;
            let phi = BoolMap::new(a, b, spec.phi.to_vec(a.size())?)?;
            let sub = match spec.sub_cells {
                Some(cells) => SubAlgebra::new(a, cells)?,
                None => SubAlgebra::trivial(a),
            };
            let psi = monteiro_extend(&phi, &sub, &spec.psi0)?;
            json(json!({ "atom_images": psi.images(), "table": psi.to_map().table() }))
        }
        Command::IdentityL1 { f, g } => {
            let fallback = fallback_space(common)?;
            let f: VecSpec = io::read_json(f)?;
            let g: VecSpec = io::read_json(g)?;
            let f = f.build(fallback.as_ref())?;
            let g = g.build(fallback.as_ref().or(Some(f.space())))?;
            json(to_json(&narrowness::l1_identity_check(&f, &g)?)?)
        }
        Command::Suite => json(to_json(&suite::run(common.seed))?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_subcommand() {
        for args in [
            vec!["uryson", "suite", "--seed", "7"],
            vec!["uryson", "modulus", "--op", "a", "--vec", "b"],
            vec!["uryson", "lambda", "--op", "a", "--vec", "b", "--mode", "brute"],
            vec!["uryson", "diagnose", "--family", "identity", "--levels", "3", "--format", "csv"],
            vec!["uryson", "tree", "--op", "a", "--vec", "b", "--depth", "3", "--cap-fragments", "10"],
        ] {
            assert!(RunConfig::try_parse_from(args).is_ok());
        }
        assert!(RunConfig::try_parse_from(["uryson", "modulus", "--cap-fragments", "0", "--op", "a", "--vec", "b"]).is_err());
        assert!(RunConfig::try_parse_from(["uryson", "frobnicate"]).is_err());
    }

    #[test]
    fn missing_file_is_a_contract_exit() {
        assert_eq!(run(["uryson", "modulus", "--op", "/nonexistent/op.json", "--vec", "x"]), 2);
        assert_eq!(run(["uryson", "bogus"]), 2);
    }
}
