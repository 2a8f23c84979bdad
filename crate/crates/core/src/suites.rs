//! Property suites shared by the `check` command and the test harnesses.
//! Every case is driven by its own seed so a failure can be replayed with
//! `trials = 1`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::library::{eq, imp};
use crate::algebra::num::{pow2, ratio};
use crate::algebra::{Instance, Signature, VarSet, Weight};
use crate::classify::{
    find_minimal_independent_pair, find_minimal_pinning, has_independent_pair_shape, has_nondegenerate_shape,
    has_nonjoin_shape, has_nonlsm_shape, is_basically_binary, is_delta_matroid, is_im_conj, is_terraced, Target,
};
use crate::error::{Error, Result};
use crate::eval::{brute_force_z, eval_basically_binary_deg2, eval_weighted_neq_conj};
use crate::gen::{self, GenRng};
use crate::mcmc::stationarity_error;
use crate::reduce::{
    compose_im_formula, compose_im_gadget, encode_pow2_weights, extract_r4, flip_gadget, holant_transform, signatures_to_weights,
    simulate_hmax, simulate_pins, three_simulate_equality, transform_signature, two_simulate_equality,
    weights_to_signatures, HolantGadget, ReductionCertificate, Relation,
};

pub const SUITES: [&str; 6] = [
    "dmterr",
    "imdeltabb",
    "minimal-pinning-shapes",
    "reduction-certificates",
    "evaluator-oracle",
    "mcmc-stationarity",
];

pub const REDUCTIONS: [&str; 10] = [
    "two-sim-eq",
    "three-sim-eq",
    "simulate-pins",
    "weights-to-signatures",
    "signatures-to-weights",
    "encode-pow2",
    "holant",
    "flip-gadget",
    "compose-im",
    "hmax",
];

/// Largest instance the reduction cases draw.
pub const CASE_VARS: usize = 8;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub arity_max: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseFailure {
    pub label: String,
    /// Rerun with this seed and one trial to reproduce.
    pub seed: u64,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<CaseFailure>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, label: impl Into<String>, seed: u64, outcome: Result<bool>) {
        self.cases += 1;
        let detail = match outcome {
            Ok(true) => return,
            Ok(false) => "property violated".to_string(),
            Err(e) => e.to_string(),
        };
        self.failures.push(CaseFailure {
            label: label.into(),
            seed,
            detail,
        });
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match name {
        "dmterr" | "dmterr-equivalence" => Ok(relation_suite("dmterr", cfg, dmterr_holds)),
        "imdeltabb" => Ok(relation_suite("imdeltabb", cfg, imdeltabb_holds)),
        "minimal-pinning-shapes" => Ok(minimal_pinning_suite(cfg)),
        "reduction-certificates" => Ok(reduction_suite(cfg, &REDUCTIONS)),
        "evaluator-oracle" => Ok(evaluator_suite(cfg)),
        "mcmc-stationarity" => Ok(stationarity_suite(cfg)),
        other => Err(Error::Precondition(format!(
            "unknown suite `{other}`; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

fn case_seed(cfg: &SuiteConfig, i: usize) -> u64 {
    cfg.seed.wrapping_add(i as u64)
}

pub fn dmterr_holds(r: &Signature) -> Result<bool> {
    Ok(is_delta_matroid(r)?.member == is_terraced(r).member)
}

/// A delta matroid that is IM-conj is basically binary.
pub fn imdeltabb_holds(r: &Signature) -> Result<bool> {
    let premise = is_delta_matroid(r)?.member && is_im_conj(r)?.member;
    Ok(!premise || is_basically_binary(r).member)
}

/// All relations of arity at most 3 exhaustively, then `trials` random
/// relations for each arity from 4 to `arity_max`.
fn relation_suite(name: &str, cfg: &SuiteConfig, prop: fn(&Signature) -> Result<bool>) -> SuiteReport {
    let mut report = SuiteReport::new(name);
    for k in 0..=cfg.arity_max.min(3) {
        for support in 0..1u64 << (1 << k) {
            let r = Signature::relation(VarSet::numbered(k), (0..1u64 << k).filter(|x| support >> x & 1 == 1))
                .expect("small arity");
            report.record(format!("arity {k} relation #{support}"), cfg.seed, prop(&r));
        }
    }
    for k in 4..=cfg.arity_max {
        for i in 0..cfg.trials {
            let seed = case_seed(cfg, i);
            let mut rng = gen::rng(seed);
            let density = rng.gen_range(0.1..0.9);
            let r = gen::random_relation(&mut rng, k, density);
            report.record(format!("arity {k} random relation"), seed, prop(&r));
        }
    }
    report
}

/// The minimal-pinning shape checks, one witness family each.
pub const SHAPE_TARGETS: [&str; 4] = ["linear-independence", "non-logsupermodular", "non-join-closed", "non-degenerate"];

/// Draws a witness for `shape` and checks the shape of its minimal pinning.
pub fn minimal_pinning_case(shape: &str, arity_max: usize, seed: u64) -> Result<bool> {
    let mut rng = gen::rng(seed);
    let top = arity_max.clamp(2, 5);
    loop {
        let k = rng.gen_range(2..=top);
        match shape {
            "linear-independence" => {
                let f = gen::random_signature(&mut rng, k, 0.4);
                let g = gen::random_signature(&mut rng, k, 0.4);
                if crate::algebra::linearly_dependent(f.table(), g.table()) {
                    continue;
                }
                let (_, fp, gp) = find_minimal_independent_pair(&f, &g)?;
                return Ok(has_independent_pair_shape(&fp, &gp));
            }
            "non-logsupermodular" | "non-degenerate" => {
                let f = gen::random_signature(&mut rng, k, 0.5);
                let target = if shape == "non-degenerate" {
                    Target::NonDegenerate
                } else {
                    Target::NonLogsupermodular
                };
                if !target.holds(&f) {
                    continue;
                }
                let (_, g) = find_minimal_pinning(&f, target)?;
                return Ok(if target == Target::NonDegenerate {
                    has_nondegenerate_shape(&g)
                } else {
                    has_nonlsm_shape(&g)
                });
            }
            "non-join-closed" => {
                let density = rng.gen_range(0.2..0.8);
                let r = gen::random_relation(&mut rng, k, density);
                if !Target::NonJoinClosed.holds(&r) {
                    continue;
                }
                let (_, g) = find_minimal_pinning(&r, Target::NonJoinClosed)?;
                return Ok(has_nonjoin_shape(&g));
            }
            other => return Err(Error::Precondition(format!("unknown shape `{other}`"))),
        }
    }
}

fn minimal_pinning_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("minimal-pinning-shapes");
    for shape in SHAPE_TARGETS {
        for i in 0..cfg.trials {
            let seed = case_seed(cfg, i);
            report.record(shape, seed, minimal_pinning_case(shape, cfg.arity_max, seed));
        }
    }
    report
}

fn random_family(rng: &mut GenRng, size: usize, max_arity: usize, zero_prob: f64) -> Vec<Signature> {
    (0..size)
        .map(|_| {
            let k = rng.gen_range(1..=max_arity);
            gen::random_signature(rng, k, zero_prob)
        })
        .collect()
}

fn non_delta_matroid(rng: &mut GenRng) -> Signature {
    loop {
        let k = rng.gen_range(3..=4);
        let r = gen::random_relation(rng, k, 0.5);
        if !is_delta_matroid(&r).expect("relation").member {
            return r;
        }
    }
}

fn equal(output: Instance) -> ReductionCertificate {
    ReductionCertificate::new(output, Relation::Equal)
}

/// An instance that uses `sig_name` for `sig` on random scopes, alongside
/// a random background family.
fn instance_using(rng: &mut GenRng, sig_name: &str, sig: &Signature, n_vars: usize) -> Instance {
    let background = random_family(rng, 2, 2, 0.3);
    let n_atoms = rng.gen_range(1..=4);
    let base = gen::random_instance(rng, &background, n_vars, n_atoms, 6);
    let mut b = Instance::builder();
    for (name, f) in base.signatures() {
        b.signature(name.clone(), f.clone());
    }
    b.signature(sig_name, sig.clone());
    for (v, w) in base.weights().iter().enumerate() {
        b.var(base.vars().name(v), w.clone());
    }
    for atom in base.atoms() {
        b.atom_idx(&atom.sig, atom.scope.clone());
    }
    for _ in 0..rng.gen_range(1..=2) {
        let scope = (0..sig.arity()).map(|_| rng.gen_range(0..n_vars)).collect();
        b.atom_idx(sig_name, scope);
    }
    b.build().expect("generated instance is valid")
}

/// Draws a random input for `transform` and applies it.
pub fn reduction_case(transform: &str, seed: u64) -> Result<(Instance, ReductionCertificate)> {
    let mut rng = gen::rng(seed);
    let n_vars = rng.gen_range(2..=CASE_VARS);
    match transform {
        "two-sim-eq" => {
            let family = random_family(&mut rng, 2, 3, 0.3);
            let n_atoms = rng.gen_range(2..=6);
            let inst = gen::random_instance(&mut rng, &family, n_vars, n_atoms, 6);
            let (r4, _) = extract_r4(&non_delta_matroid(&mut rng))?;
            let cert = two_simulate_equality(&inst, &r4)?;
            Ok((inst, cert))
        }
        "three-sim-eq" => {
            let family = random_family(&mut rng, 2, 3, 0.3);
            let n_atoms = rng.gen_range(2..=6);
            let inst = gen::random_instance(&mut rng, &family, n_vars, n_atoms, 6);
            let r = if rng.gen_bool(0.5) { eq(2) } else { imp() };
            let cert = three_simulate_equality(&inst, &r)?;
            Ok((inst, cert))
        }
        "simulate-pins" => {
            let family_sigs: Vec<Signature> = loop {
                let fam = random_family(&mut rng, 2, 3, 0.3);
                if fam.iter().any(|f| f.arity() >= 2 && f.support_size() >= 2) {
                    break fam;
                }
            };
            let family: BTreeMap<String, Signature> =
                family_sigs.iter().enumerate().map(|(i, f)| (format!("F{i}"), f.clone())).collect();
            let mut pool = family_sigs.clone();
            pool.push(crate::algebra::library::pin0());
            pool.push(crate::algebra::library::pin1());
            let n_atoms = rng.gen_range(2..=5);
            let inst = gen::random_instance(&mut rng, &pool, n_vars.min(5), n_atoms, 6);
            let d = rng.gen_range(1..=3);
            let cert = simulate_pins(&inst, &family, Some(d))?;
            Ok((inst, cert))
        }
        "weights-to-signatures" => {
            let family = random_family(&mut rng, 2, 3, 0.3);
            let n_atoms = rng.gen_range(0..=5);
            let inst = gen::random_instance(&mut rng, &family, n_vars, n_atoms, 6);
            let (cert, _) = weights_to_signatures(&inst)?;
            Ok((inst, cert))
        }
        "signatures-to-weights" => {
            let family = random_family(&mut rng, 2, 3, 0.3);
            let n_atoms = rng.gen_range(1..=5);
            let base = gen::random_instance(&mut rng, &family, n_vars, n_atoms, 6);
            let (forward, registry) = weights_to_signatures(&base)?;
            let inst = forward.output;
            let cert = signatures_to_weights(&inst, &registry)?;
            Ok((inst, cert))
        }
        "encode-pow2" => {
            let family = random_family(&mut rng, 2, 3, 0.3);
            let n_atoms = rng.gen_range(1..=4);
            let base = gen::random_eq2_instance(&mut rng, &family, n_atoms, 0);
            let weights = (0..base.num_vars())
                .map(|_| Weight::new(pow2(rng.gen_range(-2..=3)), pow2(rng.gen_range(-2..=3))))
                .collect();
            let inst = base.with_weights(weights)?;
            let cert = encode_pow2_weights(&inst)?;
            Ok((inst, cert))
        }
        "holant" => {
            let b = rng.gen_range(1..=2u32);
            let t = gen::random_signature(&mut rng, 2, 0.2);
            let bases_list = random_family(&mut rng, 2, 3, 0.3);
            let transformed: Vec<Signature> = bases_list
                .iter()
                .map(|f| transform_signature(&t, f, b))
                .collect::<Result<_>>()?;
            let n_atoms = rng.gen_range(1..=4);
            let inst = gen::drop_isolated(&gen::random_instance(&mut rng, &transformed, n_vars.min(5), n_atoms, 0));
            let bases: BTreeMap<String, Signature> =
                bases_list.iter().enumerate().map(|(i, f)| (format!("F{i}"), f.clone())).collect();
            let gadget = HolantGadget::default_for(b, t)?;
            let cert = holant_transform(&inst, &bases, &gadget)?;
            Ok((inst, cert))
        }
        "flip-gadget" => {
            let k = rng.gen_range(1..=3);
            let g = gen::random_signature(&mut rng, k, 0.3);
            let u = rng.gen_range(0..1u64 << k);
            let psi = flip_gadget(&g, u)?;
            let inst = instance_using(&mut rng, "H", &g.flip_mask(u), n_vars);
            let output = inst.substitute("H", &psi)?;
            Ok((inst, equal(output).with_note(format!("flip set {u:b}"))))
        }
        "compose-im" => {
            let k = rng.gen_range(1..=3);
            let f = gen::random_signature(&mut rng, k, 0.3);
            let g = gen::random_signature(&mut rng, 2, 0.3);
            let h = compose_im_gadget(&g, &f)?;
            let inst = instance_using(&mut rng, "H", &h, n_vars);
            let output = inst.substitute("H", &compose_im_formula(&g, &f)?)?;
            Ok((inst, equal(output)))
        }
        "hmax" => {
            let k = rng.gen_range(1..=3);
            let g = gen::random_signature(&mut rng, k, 0.3);
            let h: Vec<i64> = (0..k).map(|_| rng.gen_range(-1..=1)).collect();
            let inst = instance_using(&mut rng, "GH", &g.h_maximize(&h)?, n_vars.min(6));
            let cert = simulate_hmax(&inst, "GH", &g, &h, &ratio(1, 10))?;
            Ok((inst, cert))
        }
        other => Err(Error::Precondition(format!(
            "unknown transform `{other}`; expected one of {}",
            REDUCTIONS.join(", ")
        ))),
    }
}

/// Runs `trials` cases of each listed transform.
pub fn reduction_suite(cfg: &SuiteConfig, transforms: &[&str]) -> SuiteReport {
    let mut report = SuiteReport::new("reduction-certificates");
    for transform in transforms {
        for i in 0..cfg.trials {
            let seed = case_seed(cfg, i);
            let outcome = reduction_case(transform, seed).and_then(|(inst, cert)| cert.verify(&inst));
            report.record(*transform, seed, outcome);
        }
    }
    report
}

/// A random instance over Weighted-NEQ-conj signatures, `|V| ≤ 12`.
pub fn wnc_instance(seed: u64) -> Instance {
    let mut rng = gen::rng(seed);
    let family: Vec<Signature> = (0..3)
        .map(|_| {
            let k = rng.gen_range(1..=4);
            gen::random_wnc_signature(&mut rng, k)
        })
        .collect();
    let n = rng.gen_range(1..=12);
    let n_atoms = rng.gen_range(1..=10);
    gen::random_instance(&mut rng, &family, n, n_atoms, 6)
}

/// A random degree-≤2 instance over basically binary signatures, `|V| ≤ 12`.
pub fn bb_deg2_instance(seed: u64) -> Instance {
    let mut rng = gen::rng(seed);
    let family: Vec<Signature> = (0..3)
        .map(|_| {
            let k = rng.gen_range(1..=4);
            gen::random_bb_signature(&mut rng, k)
        })
        .collect();
    let n = rng.gen_range(1..=12);
    let n_atoms = rng.gen_range(1..=10);
    gen::random_degree_bounded_instance(&mut rng, &family, n, n_atoms, 2, 6)
}

fn evaluator_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("evaluator-oracle");
    for i in 0..cfg.trials {
        let seed = case_seed(cfg, i);
        let inst = wnc_instance(seed);
        let outcome = eval_weighted_neq_conj(&inst).and_then(|z| Ok(z == brute_force_z(&inst)?));
        report.record("weighted-neq-conj", seed, outcome);
        let inst = bb_deg2_instance(seed);
        let outcome = eval_basically_binary_deg2(&inst).and_then(|z| Ok(z == brute_force_z(&inst)?));
        report.record("basically-binary-deg2", seed, outcome);
    }
    report
}

pub const STATIONARITY_TOLERANCE: f64 = 1e-12;

/// A random instance with at most three variables, positive atom values
/// and occasional forced variables.
pub fn stationarity_instance(seed: u64) -> Instance {
    let mut rng = gen::rng(seed);
    let family: Vec<Signature> = (1..=3)
        .map(|k| {
            Signature::numbered((0..1usize << k).map(|_| ratio(rng.gen_range(10..=30), 10)).collect())
                .expect("small arity")
        })
        .collect();
    let n = rng.gen_range(1..=3);
    let mut family_pick = family.clone();
    family_pick.shuffle(&mut rng);
    let n_atoms = rng.gen_range(0..=4);
    gen::random_instance(&mut rng, &family_pick[..2], n, n_atoms, 4)
}

fn stationarity_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("mcmc-stationarity");
    for i in 0..cfg.trials {
        let seed = case_seed(cfg, i);
        let inst = stationarity_instance(seed);
        let outcome = stationarity_error(&inst).map(|e| e <= STATIONARITY_TOLERANCE);
        report.record("stationarity", seed, outcome);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(arity_max: usize, trials: usize) -> SuiteConfig {
        SuiteConfig {
            arity_max,
            trials,
            seed: 1,
        }
    }

    #[test]
    fn every_suite_runs() {
        for name in SUITES {
            let report = run_suite(name, &cfg(3, 3)).unwrap();
            assert!(report.passed(), "{name}: {:?}", report.failures);
            assert!(report.cases > 0);
        }
        assert!(run_suite("unknown", &cfg(3, 1)).is_err());
    }

    #[test]
    fn every_transform_produces_a_case() {
        for t in REDUCTIONS {
            for seed in 0..3 {
                let (inst, cert) = reduction_case(t, seed).unwrap();
                assert!(cert.verify(&inst).unwrap(), "{t} seed {seed}");
            }
        }
    }

    #[test]
    fn dmterr_exhaustive_count() {
        let report = run_suite("dmterr", &cfg(3, 0)).unwrap();
        assert_eq!(report.cases, 2 + 4 + 16 + 256);
    }
}
