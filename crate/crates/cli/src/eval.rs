use std::path::Path;

use cspdich::eval::{brute_force_z, eval_auto, eval_basically_binary_deg2, eval_weighted_neq_conj};
use cspdich::mcmc::{fpras, Estimate};
use serde_json::json;

use crate::error::CliResult;
use crate::file::load_instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exact {
    Auto,
    Bb2,
    Wnc,
    Brute,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact(Exact),
    Approx { epsilon: f64, seed: u64 },
}

fn finish(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
    s.push('\n');
    s
}

pub fn run(path: &Path, mode: Mode, as_json: bool) -> CliResult<String> {
    let (_, inst) = load_instance(path)?;
    match mode {
        Mode::Exact(which) => {
            let (z, method) = match which {
                Exact::Auto => {
                    let (z, m) = eval_auto(&inst)?;
                    (z, m.name())
                }
                Exact::Bb2 => (eval_basically_binary_deg2(&inst)?, "basically-binary-deg2"),
                Exact::Wnc => (eval_weighted_neq_conj(&inst)?, "weighted-neq-conj"),
                Exact::Brute => (brute_force_z(&inst)?, "brute-force"),
            };
            Ok(if as_json {
                finish(json!({ "value": z.to_string(), "method": method }))
            } else {
                format!("{z}\n")
            })
        }
        Mode::Approx { epsilon, seed } => {
            let est = fpras(&inst, epsilon, seed)?;
            Ok(if as_json { finish(estimate_json(&est)) } else { estimate_human(&est) })
        }
    }
}

pub fn estimate_json(est: &Estimate) -> serde_json::Value {
    let p = &est.params;
    json!({
        "value": est.value,
        "ln_value": est.ln_value,
        "epsilon": p.epsilon,
        "seed": p.seed,
        "d": p.d,
        "k": p.k,
        "max_value": p.m,
        "bound": p.bound.as_ref().map(|b| b.to_string()),
        "c": p.c,
        "beta": p.beta,
        "t": p.t,
        "ratios": est.ratios,
        "samples_per_ratio": est.samples_per_ratio,
        "burn_in": est.burn_in,
        "total_steps": est.total_steps,
    })
}

pub fn estimate_human(est: &Estimate) -> String {
    let p = &est.params;
    let bound = p.bound.as_ref().map_or("none".to_string(), |b| b.to_string());
    format!(
        "{}\n  ln Z = {}\n  epsilon = {}, seed = {}\n  d = {}, k = {}, max value = {}, bound = {bound}\n  \
         c = {}, beta = {}, T = {}\n  ratios = {}, samples per ratio = {}, burn-in = {}, total steps = {}\n",
        est.value,
        est.ln_value,
        p.epsilon,
        p.seed,
        p.d,
        p.k,
        p.m,
        p.c,
        p.beta,
        p.t,
        est.ratios,
        est.samples_per_ratio,
        est.burn_in,
        est.total_steps
    )
}
