use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cspdich::algebra::library::{pin0, pin1};
use cspdich::algebra::varset::parse_bitstring;
use cspdich::algebra::{Instance, Rational, Signature};
use cspdich::eval::{matching_brute_force, WeightedGraph};
use cspdich::reduce::{
    compose_im_formula, compose_im_gadget, encode_pow2_weights, extract_r4, flip_gadget, holant_transform,
    oracle_z, signatures_to_weights, simulate_hmax, simulate_pins, three_simulate_equality, to_monomer_dimer,
    two_simulate_equality, weights_to_signatures, HolantGadget, ReductionCertificate, Relation, SimpleWeighting,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::file::{load_instance, parse_value, InstanceFile, SignatureSpec, WeightSpec};

pub const TRANSFORMS: [&str; 11] = [
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
    "monomer-dimer",
];

/// `--verify` recomputes partition functions only for inputs this small.
pub const VERIFY_VARS: usize = 10;

#[derive(Clone, Debug, Default, clap::Args)]
pub struct Options {
    /// Relation used to simulate equality (two-sim-eq, three-sim-eq).
    #[arg(long)]
    pub relation: Option<String>,
    /// Signatures the pin gadget may use (simulate-pins).
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    /// Number of copies `d` (simulate-pins).
    #[arg(long)]
    pub copies: Option<usize>,
    /// Certificate written by weights-to-signatures (signatures-to-weights).
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Binary signature `T` of the holographic transformation (holant).
    #[arg(long)]
    pub t: Option<String>,
    /// Power `B` (holant).
    #[arg(long, default_value_t = 1)]
    pub b: u32,
    /// `NAME=BASE` pairs: atoms of NAME are `T^{⊗}` applied to BASE (holant).
    #[arg(long, value_delimiter = ',')]
    pub bases: Vec<String>,
    /// Signature whose atoms are replaced (flip-gadget, compose-im, hmax).
    #[arg(long)]
    pub sig: Option<String>,
    /// Flip set as a bitstring over the positions of `--sig` (flip-gadget).
    #[arg(long)]
    pub flip: Option<String>,
    /// Binary signature `G` (compose-im).
    #[arg(long)]
    pub g: Option<String>,
    /// Signature `F` (compose-im).
    #[arg(long)]
    pub f: Option<String>,
    /// Signature `G` whose h-maximisation is `--sig` (hmax).
    #[arg(long)]
    pub base: Option<String>,
    /// Comma-separated integer vector `h` (hmax).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h: Vec<i64>,
    /// Accuracy of the simulation (hmax).
    #[arg(long, default_value = "1/10")]
    pub eps: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryEntry {
    pub name: String,
    pub base_name: String,
    pub base: SignatureSpec,
    pub unaries: Vec<WeightSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RelationSpec {
    Equal,
    Scaled {
        scale: String,
    },
    ScaledPower {
        scale: String,
        power: u32,
    },
    ApproximateWithThreshold {
        scale: String,
        threshold: String,
        n: u64,
        epsilon: String,
    },
}

impl From<&Relation> for RelationSpec {
    fn from(r: &Relation) -> Self {
        match r {
            Relation::Equal => RelationSpec::Equal,
            Relation::Scaled { scale } => RelationSpec::Scaled { scale: scale.to_string() },
            Relation::ScaledPower { scale, power } => RelationSpec::ScaledPower {
                scale: scale.to_string(),
                power: *power,
            },
            Relation::Approximate {
                scale,
                threshold,
                n,
                epsilon,
            } => RelationSpec::ApproximateWithThreshold {
                scale: scale.to_string(),
                threshold: threshold.to_string(),
                n: *n,
                epsilon: epsilon.to_string(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Size {
    pub variables: usize,
    pub atoms: usize,
}

impl Size {
    fn of(inst: &Instance) -> Self {
        Size {
            variables: inst.num_vars(),
            atoms: inst.atoms().len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verification {
    pub z_in: String,
    pub z_out: String,
    pub holds: bool,
}

/// What `reduce` writes next to the output instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub transform: String,
    pub input: Size,
    pub output: Size,
    pub relation: RelationSpec,
    pub statement: String,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<Vec<RegistryEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub u: usize,
    pub v: usize,
    pub weight: String,
}

/// Output of `monomer-dimer`: `Z(in) = scale · Z_MD(graph)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<EdgeSpec>,
    pub scale: String,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialize");
    s.push('\n');
    s
}

fn required<'a, T>(opt: &'a Option<T>, flag: &str, transform: &str) -> CliResult<&'a T> {
    opt.as_ref()
        .ok_or_else(|| CliError::input(format!("{transform} needs --{flag}")))
}

fn read_registry(path: &Path) -> CliResult<Vec<SimpleWeighting>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let cert: CertificateFile = serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::input(format!("{}: {}: {}", path.display(), e.path(), e.inner())))?;
    let entries = cert
        .registry
        .ok_or_else(|| CliError::input(format!("{}: certificate has no registry", path.display())))?;
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let at = format!("registry[{i}]");
            Ok(SimpleWeighting {
                name: e.name.clone(),
                base_name: e.base_name.clone(),
                base: e.base.resolve(&format!("{at}.base"))?,
                unaries: e
                    .unaries
                    .iter()
                    .enumerate()
                    .map(|(j, u)| u.resolve(&format!("{at}.unaries[{j}]")))
                    .collect::<CliResult<_>>()?,
            })
        })
        .collect()
}

fn registry_entries(registry: &[SimpleWeighting]) -> Vec<RegistryEntry> {
    registry
        .iter()
        .map(|w| RegistryEntry {
            name: w.name.clone(),
            base_name: w.base_name.clone(),
            base: SignatureSpec::table_of(&w.base),
            unaries: w.unaries.iter().map(WeightSpec::of).collect(),
        })
        .collect()
}

fn is_r4(r: &Signature) -> bool {
    let s = r.support();
    r.is_relation() && r.arity() == 3 && s.len() == 2 && s[0] ^ s[1] == 0b111
}

fn substitute(inst: &Instance, name: &str, psi: &cspdich::algebra::KFormula) -> CliResult<ReductionCertificate> {
    if inst.signature(name).is_none() {
        return Err(CliError::input(format!("the instance has no signature `{name}`")));
    }
    Ok(ReductionCertificate::new(inst.substitute(name, psi)?, Relation::Equal))
}

enum Product {
    Instance(ReductionCertificate, Option<Vec<SimpleWeighting>>),
    Graph(GraphFile, WeightedGraph, Relation),
}

fn apply(file: &InstanceFile, inst: &Instance, transform: &str, opts: &Options) -> CliResult<Product> {
    let cert = |c: ReductionCertificate| Ok(Product::Instance(c, None));
    match transform {
        "two-sim-eq" => {
            let r = file.signature(required(&opts.relation, "relation", transform)?)?;
            let r4 = if is_r4(&r) { r } else { extract_r4(&r)?.0 };
            cert(two_simulate_equality(inst, &r4)?)
        }
        "three-sim-eq" => {
            let name = opts.relation.as_deref().unwrap_or("EQ_2");
            cert(three_simulate_equality(inst, &file.signature(name)?)?)
        }
        "simulate-pins" => {
            let names: Vec<String> = if opts.family.is_empty() {
                inst.signatures()
                    .iter()
                    .filter(|(_, s)| !s.same_table(&pin0()) && !s.same_table(&pin1()))
                    .map(|(n, _)| n.clone())
                    .collect()
            } else {
                opts.family.clone()
            };
            let family: BTreeMap<String, Signature> = names
                .iter()
                .map(|n| Ok((n.clone(), file.signature(n)?)))
                .collect::<CliResult<_>>()?;
            cert(simulate_pins(inst, &family, opts.copies)?)
        }
        "weights-to-signatures" => {
            let (c, registry) = weights_to_signatures(inst)?;
            Ok(Product::Instance(c, Some(registry)))
        }
        "signatures-to-weights" => {
            let registry = read_registry(required(&opts.registry, "registry", transform)?)?;
            cert(signatures_to_weights(inst, &registry)?)
        }
        "encode-pow2" => cert(encode_pow2_weights(inst)?),
        "holant" => {
            let t = file.signature(required(&opts.t, "t", transform)?)?;
            if opts.bases.is_empty() {
                return Err(CliError::input("holant needs --bases NAME=BASE,..."));
            }
            let bases: BTreeMap<String, Signature> = opts
                .bases
                .iter()
                .map(|pair| {
                    let (name, base) = pair
                        .split_once('=')
                        .ok_or_else(|| CliError::input(format!("--bases entry `{pair}` is not NAME=BASE")))?;
                    Ok((name.to_string(), file.signature(base)?))
                })
                .collect::<CliResult<_>>()?;
            cert(holant_transform(inst, &bases, &HolantGadget::default_for(opts.b, t)?)?)
        }
        "flip-gadget" => {
            let name = required(&opts.sig, "sig", transform)?;
            let h = file.signature(name)?;
            let bits = required(&opts.flip, "flip", transform)?;
            let u = parse_bitstring(bits)
                .filter(|_| bits.len() == h.arity())
                .ok_or_else(|| CliError::input(format!("--flip `{bits}` is not a bitstring of length {}", h.arity())))?;
            let psi = flip_gadget(&h.flip_mask(u), u)?;
            Ok(Product::Instance(
                substitute(inst, name, &psi)?.with_note(format!("flip set {bits}")),
                None,
            ))
        }
        "compose-im" => {
            let name = required(&opts.sig, "sig", transform)?;
            let g = file.signature(required(&opts.g, "g", transform)?)?;
            let f = file.signature(required(&opts.f, "f", transform)?)?;
            if !compose_im_gadget(&g, &f)?.same_table(&file.signature(name)?) {
                return Err(CliError::input(format!("`{name}` is not the composition of --g with --f")));
            }
            cert(substitute(inst, name, &compose_im_formula(&g, &f)?)?)
        }
        "hmax" => {
            let name = required(&opts.sig, "sig", transform)?;
            let g = file.signature(required(&opts.base, "base", transform)?)?;
            let eps = parse_value("--eps", &opts.eps)?;
            cert(simulate_hmax(inst, name, &g, &opts.h, &eps)?)
        }
        "monomer-dimer" => {
            let md = to_monomer_dimer(inst)?;
            let graph = GraphFile {
                vertices: md.graph.vertices,
                edges: md
                    .graph
                    .edges
                    .iter()
                    .map(|(u, v, w)| EdgeSpec {
                        u: *u,
                        v: *v,
                        weight: w.to_string(),
                    })
                    .collect(),
                scale: md.scale.to_string(),
            };
            let relation = Relation::Scaled {
                scale: Rational::from_integer(1.into()) / &md.scale,
            };
            Ok(Product::Graph(graph, md.graph, relation))
        }
        other => Err(CliError::input(format!(
            "unknown transform `{other}`; expected one of {}",
            TRANSFORMS.join(", ")
        ))),
    }
}

pub fn run(
    path: &Path,
    transform: &str,
    opts: &Options,
    out: &Path,
    certificate: Option<&Path>,
    verify: bool,
) -> CliResult<String> {
    let (file, inst) = load_instance(path)?;
    let product = apply(&file, &inst, transform, opts)?;
    let (relation, notes, registry, out_size, out_text) = match &product {
        Product::Instance(c, registry) => (
            c.relation.clone(),
            c.notes.clone(),
            registry.as_deref().map(registry_entries),
            Size::of(&c.output),
            InstanceFile::from_instance(&c.output).to_json(),
        ),
        Product::Graph(g, _, relation) => (
            relation.clone(),
            Vec::new(),
            None,
            Size {
                variables: g.edges.len(),
                atoms: g.vertices,
            },
            to_json(g),
        ),
    };
    let mut report = String::new();
    let verification = if !verify {
        None
    } else if inst.num_vars() > VERIFY_VARS {
        eprintln!(
            "warning: skipping verification, the input has {} variables (limit {VERIFY_VARS})",
            inst.num_vars()
        );
        None
    } else {
        let z_in = oracle_z(&inst)?;
        let z_out = match &product {
            Product::Instance(c, _) => oracle_z(&c.output)?,
            Product::Graph(_, g, _) => matching_brute_force(g)?,
        };
        Some(Verification {
            holds: relation.holds(&z_in, &z_out),
            z_in: z_in.to_string(),
            z_out: z_out.to_string(),
        })
    };
    let cert = CertificateFile {
        transform: transform.to_string(),
        input: Size::of(&inst),
        output: out_size,
        relation: (&relation).into(),
        statement: relation.to_string(),
        notes,
        registry,
        verification,
    };
    let cert_path = certificate.map_or_else(|| default_certificate_path(out), Path::to_path_buf);
    std::fs::write(out, out_text).map_err(|e| CliError::input(format!("{}: {e}", out.display())))?;
    std::fs::write(&cert_path, to_json(&cert)).map_err(|e| CliError::input(format!("{}: {e}", cert_path.display())))?;
    writeln!(report, "wrote {} and {}", out.display(), cert_path.display()).unwrap();
    writeln!(report, "relation: {}", cert.statement).unwrap();
    for note in &cert.notes {
        writeln!(report, "note: {note}").unwrap();
    }
    if let Some(v) = &cert.verification {
        writeln!(report, "verified: Z(in) = {}, Z(out) = {}", v.z_in, v.z_out).unwrap();
        if !v.holds {
            return Err(CliError::Violation(format!(
                "{report}certificate violated: Z(in) = {}, Z(out) = {} do not satisfy {}",
                v.z_in, v.z_out, cert.statement
            )));
        }
    }
    Ok(report)
}

/// `out.json` gets `out.cert.json`.
pub fn default_certificate_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.cert.json"))
}
