//! Seeded property suite behind the `suite` subcommand.
//!
//! Every check draws its instances from a generator seeded by the suite seed
//! and the check number, so a report depends on nothing but the seed.

use rand::Rng;
use serde::Serialize;

use crate::boolean::{
    classify_map, monteiro_extend, BoolMap, FiniteBoolAlg, MapClass, SubAlgebra,
};
use crate::error::Result;
use crate::lattice::{one_f, Caps, LatVec, RefinementChain, FRAGMENT_CAP};
use crate::narrowness::{
    dp_witness_extract, l1_identity_check, lambda_es, lambda_join_law, lambda_to_narrow_pipeline,
    min_discrepancy, refinement_diagnostics, verify_l1_partition_bound, LambdaStrategy,
    OperatorFamily, Trend,
};
use crate::operators::{modulus, op_join, op_meet, neg_part_op_calc, pos_part_op};
use crate::random::{
    disjoint_pair, positive_vector, random_mask, random_matrix, rational_vector, rng,
    small_positive, weighted_space, SuiteRng,
};
use crate::rational::{fmt_q, Q};
use crate::rounding::{
    round_coefficients, signed_permutation, PermutationMode, PERMUTATION_BRUTE_CAP,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.instances > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

struct Tally {
    id: u8,
    name: &'static str,
    instances: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new(id: u8, name: &'static str) -> Self {
        Tally {
            id,
            name,
            instances: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            self.first_failure.get_or_insert_with(what);
        }
    }

    fn record_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, what),
            Err(e) => self.record(false, || format!("{}: {e}", what())),
        }
    }

    fn done(self) -> CheckResult {
        CheckResult {
            id: self.id,
            name: self.name,
            instances: self.instances,
            failures: self.failures,
            first_failure: self.first_failure,
        }
    }
}

fn sub_rng(seed: u64, id: u8) -> SuiteRng {
    rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(id.into()))
}

fn instance(rng: &mut SuiteRng, max_in: usize, max_out: usize, positive: bool) -> (crate::UrysonMatrix, LatVec) {
    let n = rng.gen_range(1..=max_in);
    let m = rng.gen_range(1..=max_out);
    let input = weighted_space(rng, n);
    let output = weighted_space(rng, m);
    let t = random_matrix(rng, &input, &output, positive, 0.7);
    let x = if positive {
        positive_vector(rng, &input)
    } else {
        rational_vector(rng, &input)
    };
    (t, x)
}

fn modulus_check(seed: u64, count: usize) -> CheckResult {
    let mut r = sub_rng(seed, 1);
    let mut tally = Tally::new(1, "modulus brute force equals closed form");
    for i in 0..count {
        let (t, x) = instance(&mut r, 5, 2, false);
        tally.record_result(
            (|| Ok(modulus(&t, &x, Caps::default())?.value == t.modulus().apply(&x)?))(),
            || format!("instance {i}"),
        );
    }
    tally.done()
}

fn lattice_formula_check(seed: u64, count: usize) -> CheckResult {
    let mut r = sub_rng(seed, 2);
    let mut tally = Tally::new(2, "operator lattice identities");
    for i in 0..count {
        let (t, x) = instance(&mut r, 5, 2, false);
        let s = random_matrix(&mut r, t.input(), t.output(), false, 0.7);
        let check = || -> Result<bool> {
            let join = op_join(&t, &s, &x, FRAGMENT_CAP)?.value;
            let meet = op_meet(&t, &s, &x, FRAGMENT_CAP)?.value;
            let sum = t.apply(&x)?.add(&s.apply(&x)?)?;
            let pos = pos_part_op(&t, &x, FRAGMENT_CAP)?.value;
            let neg = neg_part_op_calc(&t, &x, FRAGMENT_CAP)?.value;
            let m = modulus(&t, &x, Caps::default())?.value;
            Ok(join.add(&meet)? == sum
                && pos.sub(&neg)? == t.apply(&x)?
                && t.apply(&x)?.abs().le(&m)?)
        };
        tally.record_result(check(), || format!("instance {i}"));
    }
    tally.done()
}

fn rounding_check(seed: u64, count: usize) -> CheckResult {
    let mut r = sub_rng(seed, 3);
    let mut tally = Tally::new(3, "coefficient rounding bound");
    for i in 0..count {
        let d = r.gen_range(1..=4);
        let n = r.gen_range(1..=10);
        let space = weighted_space(&mut r, d);
        let xs: Vec<LatVec> = (0..n).map(|_| rational_vector(&mut r, &space)).collect();
        let lambdas: Vec<Q> = (0..n)
            .map(|_| Q::new(r.gen_range(0..=6).into(), 6.into()))
            .collect();
        let check = || -> Result<bool> {
            let w = round_coefficients(&xs, &lambdas)?;
            Ok(w.achieved <= w.bound && w.steps <= n)
        };
        tally.record_result(check(), || format!("instance {i}"));
    }
    tally.done()
}

fn permutation_check(seed: u64, count: usize) -> CheckResult {
    let mut r = sub_rng(seed, 4);
    let mut tally = Tally::new(4, "signed permutation bound");
    for i in 0..count {
        let n = r.gen_range(1..=PERMUTATION_BRUTE_CAP / 2);
        let dim = r.gen_range(1..=3);
        let space = weighted_space(&mut r, dim);
        let z: Vec<LatVec> = (0..2 * n).map(|_| positive_vector(&mut r, &space)).collect();
        let check = || -> Result<bool> {
            Ok(signed_permutation(&z, PermutationMode::Brute, PERMUTATION_BRUTE_CAP)?.certified()
                && signed_permutation(&z, PermutationMode::GreedyVerified, PERMUTATION_BRUTE_CAP)?.certified())
        };
        tally.record_result(check(), || format!("instance {i}"));
    }
    tally.done()
}

fn lambda_check(seed: u64, count: usize) -> CheckResult {
    let mut r = sub_rng(seed, 5);
    let mut tally = Tally::new(5, "Enflo-Starbird function laws");
    let caps = Caps::default();
    for i in 0..count {
        let (t, _) = instance(&mut r, 5, 2, true);
        let (x, y) = disjoint_pair(&mut r, t.input());
        let (sx, _) = instance(&mut r, 5, 2, false);
        let signed = random_matrix(&mut r, sx.input(), sx.output(), false, 0.7);
        let v = rational_vector(&mut r, signed.input());
        let check = || -> Result<bool> {
            let law = lambda_join_law(&t, &x, &y, LambdaStrategy::BranchAndBound, caps)?.holds;
            let xy = x.add(&y)?;
            let brute = lambda_es(&t, &xy, LambdaStrategy::Brute, caps)?;
            let shortcut = brute.shortcut.as_ref() == Some(&brute.value);
            let b1 = lambda_es(&signed, &v, LambdaStrategy::Brute, caps)?.value;
            let b2 = lambda_es(&signed, &v, LambdaStrategy::BranchAndBound, caps)?.value;
            let below = b1.le(&lambda_es(&signed.modulus(), &v, LambdaStrategy::Brute, caps)?.value)?;
            Ok(law && shortcut && b1 == b2 && below)
        };
        tally.record_result(check(), || format!("instance {i}"));
    }
    tally.done()
}

fn pipeline_check(seed: u64, count: usize) -> CheckResult {
    let mut r = sub_rng(seed, 6);
    let mut tally = Tally::new(6, "lambda to narrow pipeline");
    for i in 0..count {
        let (t, x) = instance(&mut r, 6, 2, true);
        let check = || -> Result<bool> {
            let p = lambda_to_narrow_pipeline(&t, &x, None, PermutationMode::GreedyVerified, PERMUTATION_BRUTE_CAP)?;
            let d = &p.witness.discrepancy;
            let best = min_discrepancy(&t, &x, FRAGMENT_CAP)?.discrepancy;
            Ok(d * d <= p.bound_sq && *d >= best)
        };
        tally.record_result(check(), || format!("instance {i}"));
    }
    tally.done()
}

fn curve_check(levels: usize) -> CheckResult {
    let mut tally = Tally::new(7, "refinement curves");
    let chain = RefinementChain::uniform_dyadic(levels);
    let e = LatVec::constant(chain.level(0).expect("level 0"), Q::from_integer(1.into()));
    let norm = refinement_diagnostics(&OperatorFamily::NormPower { p: Q::from_integer(1.into()) }, &chain, &e, levels, FRAGMENT_CAP);
    tally.record_result(
        norm.map(|c| c.delta[1..].iter().all(|d| *d == Q::from_integer(0.into())) && c.trend == Trend::Decaying),
        || "norm_power curve".into(),
    );
    let id = refinement_diagnostics(&OperatorFamily::Identity, &chain, &e, levels, FRAGMENT_CAP);
    tally.record_result(
        id.map(|c| c.delta.iter().all(|d| *d == Q::from_integer(1.into())) && c.trend == Trend::Stalled),
        || "identity curve".into(),
    );
    tally.done()
}

fn dp_check(seed: u64, count: usize) -> CheckResult {
    let mut r = sub_rng(seed, 8);
    let mut tally = Tally::new(8, "DP minorant extraction");
    let mut attempts = 0;
    while tally.instances < count && attempts < 20 * count {
        attempts += 1;
        let (t, e) = instance(&mut r, 4, 3, true);
        let lam = match lambda_es(&t, &e, LambdaStrategy::BranchAndBound, Caps::default()) {
            Ok(l) => l.value,
            Err(err) => {
                tally.record(false, || format!("lambda: {err}"));
                continue;
            }
        };
        if lam.is_zero() {
            continue;
        }
        let check = || -> Result<bool> {
            let Some(w) = dp_witness_extract(&t, &e, Caps::default(), 8, seed)? else {
                return Ok(false);
            };
            Ok(w.report.passed() && w.report.nonzero && w.report.s_e == lam && w.report.s_e.le(&lam)?)
        };
        tally.record_result(check(), || format!("attempt {attempts}"));
    }
    tally.done()
}

fn boolean_check(seed: u64, count: usize) -> CheckResult {
    let mut r = sub_rng(seed, 9);
    let mut tally = Tally::new(9, "indicator homomorphism and extension");
    for i in 0..count {
        let n = r.gen_range(1..=5);
        let space = weighted_space(&mut r, n);
        let f = positive_vector(&mut r, &space);
        let y = positive_vector(&mut r, &space);
        let z = positive_vector(&mut r, &space);
        let check = || -> Result<bool> {
            let join = one_f(&f, &y.join(&z)?)? == one_f(&f, &y)?.join(&one_f(&f, &z)?)?;
            let meet = one_f(&f, &y.meet(&z)?)? == one_f(&f, &y)?.meet(&one_f(&f, &z)?)?;
            Ok(join && meet && one_f(&f, &f)? == f && one_f(&f, &LatVec::zero(&space))?.is_zero())
        };
        tally.record_result(check(), || format!("indicator pair {i}"));

        let (ok, what) = monteiro_instance(&mut r);
        tally.record(ok, || format!("extension instance {i}: {what}"));
    }
    tally.done()
}

/// A random join-preserving `φ`, subalgebra and `ψ₀`; returns whether the
/// extension agrees with an exhaustive search over all homomorphisms.
pub fn monteiro_instance(r: &mut SuiteRng) -> (bool, String) {
    let na = r.gen_range(1..=4usize);
    let nb = r.gen_range(1..=4usize);
    let a = FiniteBoolAlg::new(na).expect("small");
    let b = FiniteBoolAlg::new(nb).expect("small");
    let atom_images: Vec<u64> = (0..na).map(|_| r.gen_range(0..1u64 << nb)).collect();
    let phi = BoolMap::from_fn(a, b, |x| {
        (0..na).filter(|i| x >> i & 1 == 1).fold(0, |acc, i| acc | atom_images[i])
    })
    .expect("images in range");
    // Random cells: each atom joins a cell labelled below its index.
    let mut label: Vec<usize> = Vec::with_capacity(na);
    for i in 0..na {
        let l = r.gen_range(0..=i);
        label.push(if l == i { i } else { label[l] });
    }
    let mut cells: Vec<u64> = Vec::new();
    for i in 0..na {
        if label[i] == i {
            cells.push((0..na).filter(|&j| label[j] == i).fold(0, |acc, j| acc | 1 << j));
        }
    }
    let sub = SubAlgebra::new(a, cells).expect("cells partition the atoms");
    let mut psi0 = vec![0u64; sub.cells().len()];
    for bit in 0..nb {
        let c = r.gen_range(0..psi0.len());
        psi0[c] |= 1 << bit;
    }
    // Exhaustive oracle: assign every codomain atom to a domain atom.
    let mut feasible = false;
    for code in 0..na.pow(nb as u32) {
        let mut images = vec![0u64; na];
        let mut c = code;
        for bit in 0..nb {
            images[c % na] |= 1 << bit;
            c /= na;
        }
        let hom = |x: u64| (0..na).filter(|i| x >> i & 1 == 1).fold(0, |acc, i| acc | images[i]);
        let below = (0..1u64 << na).all(|x| hom(x) & !phi.apply(x) == 0);
        let extends = sub.cells().iter().zip(&psi0).all(|(&cell, &im)| hom(cell) == im);
        if below && extends {
            feasible = true;
            break;
        }
    }
    match monteiro_extend(&phi, &sub, &psi0) {
        Ok(psi) => {
            let map = psi.to_map();
            let verified = classify_map(&map).map(|c| c.class == MapClass::Homomorphism).unwrap_or(false)
                && map.le(&phi)
                && sub.cells().iter().zip(&psi0).all(|(&c, &im)| psi.apply(c) == im);
            (feasible && verified, format!("extension found, feasible={feasible}, verified={verified}"))
        }
        Err(e) => (!feasible, format!("no extension ({e}), feasible={feasible}")),
    }
}

fn l1_check(seed: u64, pairs: usize, partitions: usize) -> CheckResult {
    let mut r = sub_rng(seed, 10);
    let mut tally = Tally::new(10, "L1 identity and partition bound");
    for i in 0..pairs {
        let n = r.gen_range(1..=5);
        let space = weighted_space(&mut r, n);
        let f = rational_vector(&mut r, &space);
        let g = rational_vector(&mut r, &space);
        tally.record_result(l1_identity_check(&f, &g).map(|rep| rep.ok), || format!("pair {i}"));
    }
    for i in 0..partitions {
        let (t, x) = instance(&mut r, 5, 2, false);
        let support = x.support().as_slice().to_vec();
        // Random blocks, each split at random.
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &a in &support {
            let k = r.gen_range(0..=blocks.len());
            if k == blocks.len() {
                blocks.push(vec![a]);
            } else {
                blocks[k].push(a);
            }
        }
        let splits: Vec<_> = blocks
            .iter()
            .map(|b| {
                let u = random_mask(&mut r, b);
                let v = crate::lattice::AtomSet::new(b.clone()).difference(&u);
                (u, v)
            })
            .collect();
        let eps = small_positive(&mut r);
        tally.record_result(
            verify_l1_partition_bound(&t, &x, &splits, &eps, Caps::default())
                .map(|rep| rep.ok && (!rep.hypothesis || rep.conclusion)),
            || format!("partition instance {i} (ε = {})", fmt_q(&eps)),
        );
    }
    tally.done()
}

/// Runs every check at suite scale; the report is a pure function of `seed`.
pub fn run(seed: u64) -> SuiteReport {
    let checks = vec![
        modulus_check(seed, 40),
        lattice_formula_check(seed, 30),
        rounding_check(seed, 30),
        permutation_check(seed, 30),
        lambda_check(seed, 15),
        pipeline_check(seed, 15),
        curve_check(4),
        dp_check(seed, 8),
        boolean_check(seed, 40),
        l1_check(seed, 60, 20),
    ];
    SuiteReport {
        seed,
        passed: checks.iter().all(CheckResult::passed),
        checks,
    }
}
