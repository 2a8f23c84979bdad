//! The JSON instance format.
//!
//! ```json
//! {
//!   "signatures": { "F": { "arity": 2, "table": { "00": "1", "01": "1/2", "10": "1/2" } },
//!                   "N": { "builtin": "NAND" } },
//!   "variables": { "x": { "w0": "1", "w1": "2" }, "y": {} },
//!   "atoms": [ { "sig": "F", "scope": ["x", "y"] } ],
//!   "degree_policy": { "le": 2 }
//! }
//! ```
//!
//! Table keys are bitstrings whose leftmost character is the first scope
//! position. Missing keys are zero. Weights default to `1`. Atoms may name a
//! library signature (`NAND`, `EQ_3`, ...) without declaring it.

use std::path::Path;

use cspdich::algebra::library;
use cspdich::algebra::num::{parse_rational, zero};
use cspdich::algebra::varset::{bitstring, parse_bitstring};
use cspdich::algebra::{DegreePolicy, Instance, Rational, Signature, Weight};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default)]
    pub signatures: IndexMap<String, SignatureSpec>,
    #[serde(default)]
    pub variables: IndexMap<String, WeightSpec>,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub degree_policy: PolicySpec,
}

/// Either a library name or an explicit table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<IndexMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    #[serde(default = "one")]
    pub w0: String,
    #[serde(default = "one")]
    pub w1: String,
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec { w0: one(), w1: one() }
    }
}

fn one() -> String {
    "1".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub sig: String,
    pub scope: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicySpec {
    #[default]
    Unbounded,
    Le(usize),
    Eq(usize),
}

impl From<PolicySpec> for DegreePolicy {
    fn from(p: PolicySpec) -> Self {
        match p {
            PolicySpec::Unbounded => DegreePolicy::Unbounded,
            PolicySpec::Le(d) => DegreePolicy::AtMost(d),
            PolicySpec::Eq(d) => DegreePolicy::Exactly(d),
        }
    }
}

impl From<DegreePolicy> for PolicySpec {
    fn from(p: DegreePolicy) -> Self {
        match p {
            DegreePolicy::Unbounded => PolicySpec::Unbounded,
            DegreePolicy::AtMost(d) => PolicySpec::Le(d),
            DegreePolicy::Exactly(d) => PolicySpec::Eq(d),
        }
    }
}

fn field_error(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::input(format!("{path}: {msg}"))
}

pub fn parse_value(path: &str, s: &str) -> CliResult<Rational> {
    parse_rational(s).ok_or_else(|| field_error(path, format!("`{s}` is not a rational")))
}

impl SignatureSpec {
    /// The signature written out in full.
    pub fn table_of(sig: &Signature) -> Self {
        let k = sig.arity();
        let mut entries: Vec<(String, String)> = sig
            .support()
            .into_iter()
            .map(|x| (bitstring(x, k), sig.value(x).to_string()))
            .collect();
        entries.sort();
        SignatureSpec {
            builtin: None,
            arity: Some(k),
            table: Some(entries.into_iter().collect()),
        }
    }

    /// The library name when `sig` is exactly that library signature.
    pub fn canonical(name: &str, sig: &Signature) -> Self {
        match library::by_name(name) {
            Some(lib) if lib.same_table(sig) => SignatureSpec {
                builtin: Some(name.to_string()),
                ..Default::default()
            },
            _ => Self::table_of(sig),
        }
    }

    /// `path` locates the spec in the file for diagnostics.
    pub fn resolve(&self, path: &str) -> CliResult<Signature> {
        match (&self.builtin, self.arity, &self.table) {
            (Some(name), None, None) => library::by_name(name)
                .ok_or_else(|| field_error(&format!("{path}.builtin"), format!("unknown library signature `{name}`"))),
            (None, Some(k), Some(table)) => {
                if k > cspdich::algebra::arity_cap() {
                    return Err(field_error(
                        &format!("{path}.arity"),
                        format!("arity {k} exceeds the arity cap {}", cspdich::algebra::arity_cap()),
                    ));
                }
                let mut values = vec![zero(); 1usize << k];
                for (key, value) in table {
                    let at = format!("{path}.table.{key}");
                    let x = parse_bitstring(key)
                        .filter(|_| key.len() == k)
                        .ok_or_else(|| field_error(&at, format!("expected a bitstring of length {k}")))?;
                    values[x as usize] = parse_value(&at, value)?;
                }
                Signature::numbered(values).map_err(|e| field_error(path, e))
            }
            (None, None, None) => Err(field_error(path, "expected `builtin` or `arity` with `table`")),
            _ => Err(field_error(path, "`builtin` excludes `arity` and `table`, which go together")),
        }
    }
}

impl WeightSpec {
    pub fn of(w: &Weight) -> Self {
        WeightSpec {
            w0: w.w0.to_string(),
            w1: w.w1.to_string(),
        }
    }

    pub fn resolve(&self, path: &str) -> CliResult<Weight> {
        Ok(Weight::new(
            parse_value(&format!("{path}.w0"), &self.w0)?,
            parse_value(&format!("{path}.w1"), &self.w1)?,
        ))
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                CliError::input(inner.to_string())
            } else {
                CliError::input(format!("{path}: {inner}"))
            }
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance files serialize");
        s.push('\n');
        s
    }

    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            signatures: inst
                .signatures()
                .iter()
                .map(|(name, sig)| (name.clone(), SignatureSpec::canonical(name, sig)))
                .collect(),
            variables: inst
                .vars()
                .names()
                .iter()
                .zip(inst.weights())
                .map(|(name, w)| (name.clone(), WeightSpec::of(w)))
                .collect(),
            atoms: inst
                .atoms()
                .iter()
                .map(|a| AtomSpec {
                    sig: a.sig.clone(),
                    scope: a.scope.iter().map(|&v| inst.vars().names()[v].clone()).collect(),
                })
                .collect(),
            degree_policy: inst.policy().into(),
        }
    }

    /// Declared signatures in file order, followed by library signatures
    /// that atoms use without declaring.
    pub fn resolved_signatures(&self) -> CliResult<Vec<(String, Signature)>> {
        let mut out: Vec<(String, Signature)> = Vec::new();
        for (name, spec) in &self.signatures {
            out.push((name.clone(), spec.resolve(&format!("signatures.{name}"))?));
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if out.iter().any(|(n, _)| *n == atom.sig) {
                continue;
            }
            let sig = library::by_name(&atom.sig).ok_or_else(|| {
                field_error(&format!("atoms[{i}].sig"), format!("unknown signature `{}`", atom.sig))
            })?;
            out.push((atom.sig.clone(), sig));
        }
        Ok(out)
    }

    /// Looks a signature up by name among the declared ones, then the library.
    pub fn signature(&self, name: &str) -> CliResult<Signature> {
        match self.signatures.get(name) {
            Some(spec) => spec.resolve(&format!("signatures.{name}")),
            None => library::by_name(name).ok_or_else(|| CliError::input(format!("unknown signature `{name}`"))),
        }
    }

    pub fn to_instance(&self) -> CliResult<Instance> {
        let mut b = Instance::builder();
        for (name, sig) in self.resolved_signatures()? {
            b.signature(name, sig);
        }
        for (name, w) in &self.variables {
            b.var(name.clone(), w.resolve(&format!("variables.{name}"))?);
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            for (j, v) in atom.scope.iter().enumerate() {
                if !self.variables.contains_key(v) {
                    return Err(field_error(&format!("atoms[{i}].scope[{j}]"), format!("undeclared variable `{v}`")));
                }
            }
            b.atom(&atom.sig, &atom.scope)
                .map_err(|e| field_error(&format!("atoms[{i}]"), e))?;
        }
        b.policy(self.degree_policy.into());
        Ok(b.build()?)
    }
}

/// Reads and validates an instance file.
pub fn load_instance(path: &Path) -> CliResult<(InstanceFile, Instance)> {
    let file = InstanceFile::read(path)?;
    let inst = file
        .to_instance()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok((file, inst))
}
