use std::fmt::Write as _;

use cspdich::suites::{run_suite, SuiteConfig, SUITES};

use crate::error::{CliError, CliResult};

pub fn run(suite: &str, cfg: &SuiteConfig) -> CliResult<String> {
    if !SUITES.contains(&suite) && suite != "dmterr-equivalence" {
        return Err(CliError::input(format!(
            "unknown suite `{suite}`; expected one of {}",
            SUITES.join(", ")
        )));
    }
    let report = run_suite(suite, cfg)?;
    let mut out = String::new();
    for f in &report.failures {
        writeln!(
            out,
            "FAIL {} seed {}: {}\n  reproduce: cspdich check --suite {suite} --arity-max {} --trials 1 --seed {}",
            f.label, f.seed, f.detail, cfg.arity_max, f.seed
        )
        .unwrap();
    }
    let status = if report.passed() { "PASS" } else { "FAIL" };
    writeln!(
        out,
        "{status} {}: {} cases, {} failures (arity-max {}, trials {}, seed {})",
        report.suite,
        report.cases,
        report.failures.len(),
        cfg.arity_max,
        cfg.trials,
        cfg.seed
    )
    .unwrap();
    if report.passed() {
        Ok(out)
    } else {
        Err(CliError::Violation(out.trim_end().to_string()))
    }
}
