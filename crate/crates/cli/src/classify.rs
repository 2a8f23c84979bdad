use std::fmt::Write as _;
use std::path::Path;

use cspdich::algebra::Signature;
use cspdich::classify::{classify, classify_relations, classify_signatures, ClassificationReport};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::file::InstanceFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Relation table if every signature is 0/1-valued.
    Auto,
    Relations,
    Signatures,
}

pub fn run(path: &Path, mode: Mode, as_json: bool) -> CliResult<String> {
    let file = InstanceFile::read(path)?;
    let named = file
        .resolved_signatures()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if named.is_empty() {
        return Err(CliError::input(format!("{}: no signatures to classify", path.display())));
    }
    let sigs: Vec<Signature> = named.iter().map(|(_, s)| s.clone()).collect();
    let report = match mode {
        Mode::Auto => classify(&sigs),
        Mode::Relations => classify_relations(&sigs)?,
        Mode::Signatures => classify_signatures(&sigs),
    };
    let names: Vec<&str> = named.iter().map(|(n, _)| n.as_str()).collect();
    Ok(if as_json {
        let mut s = serde_json::to_string_pretty(&to_json(&names, &report)).expect("reports serialize");
        s.push('\n');
        s
    } else {
        human(&names, &report)
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn human(names: &[&str], report: &ClassificationReport) -> String {
    let mut out = String::new();
    for (name, sig) in names.iter().zip(&report.signatures) {
        writeln!(out, "{name} (arity {})", sig.arity).unwrap();
        for m in &sig.memberships {
            write!(out, "  {:<32} {}", m.class.name(), yes_no(m.member)).unwrap();
            if let Some(w) = &m.witness {
                write!(out, "  [{}]", w.describe(sig.arity)).unwrap();
            }
            out.push('\n');
        }
    }
    writeln!(out, "verdict: {}", report.verdict.label()).unwrap();
    writeln!(out, "decided by: {}", report.table.description()).unwrap();
    writeln!(out, "nondegenerate support: {}", yes_no(report.nondegenerate_support)).unwrap();
    if let Some(fw) = &report.finite_weights {
        writeln!(out, "finite weights:").unwrap();
        writeln!(out, "  premise                          {}", yes_no(fw.premise)).unwrap();
        writeln!(out, "  all IM-terraced                  {}", yes_no(fw.all_im_terraced)).unwrap();
        writeln!(out, "  supports meet- or join-closed    {}", yes_no(fw.lattice_closed)).unwrap();
        writeln!(out, "  no EQ_2 pinning                  {}", yes_no(fw.no_eq2_pinning)).unwrap();
        let status = match fw.finite_weights_suffice() {
            None => "not applicable",
            Some(true) => "weights {(1,1),(1,2),(2,1)} already give hardness",
            Some(false) => "unsettled",
        };
        writeln!(out, "  status: {status}").unwrap();
    }
    out
}

pub fn to_json(names: &[&str], report: &ClassificationReport) -> Value {
    let signatures: Vec<Value> = names
        .iter()
        .zip(&report.signatures)
        .map(|(name, sig)| {
            let memberships: serde_json::Map<String, Value> = sig
                .memberships
                .iter()
                .map(|m| {
                    let mut entry = json!({ "member": m.member });
                    if let Some(w) = &m.witness {
                        entry["witness"] = json!(w.describe(sig.arity));
                    }
                    (m.class.name().to_string(), entry)
                })
                .collect();
            json!({ "name": name, "arity": sig.arity, "memberships": memberships })
        })
        .collect();
    let mut v = json!({
        "signatures": signatures,
        "verdict": report.verdict.label(),
        "decided_by": report.table.description(),
        "nondegenerate_support": report.nondegenerate_support,
    });
    if let Some(fw) = &report.finite_weights {
        v["finite_weights"] = json!({
            "premise": fw.premise,
            "all_im_terraced": fw.all_im_terraced,
            "lattice_closed": fw.lattice_closed,
            "no_eq2_pinning": fw.no_eq2_pinning,
            "suffice": fw.finite_weights_suffice(),
        });
    }
    v
}
