use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::library::eq;
use crate::algebra::num::{log2_exact, pow2};
use crate::algebra::{DegreePolicy, Instance, Rational, Signature, Weight};
use crate::error::{Error, Result};

use super::{unused_name, uses, Relation, ReductionCertificate};

/// `name` is the signature `base · Π_j unaries[j](x_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleWeighting {
    pub name: String,
    pub base_name: String,
    pub base: Signature,
    pub unaries: Vec<Weight>,
}

impl SimpleWeighting {
    pub fn signature(&self) -> Signature {
        let mut s = self.base.clone();
        for (j, u) in self.unaries.iter().enumerate() {
            s = s.weight_position(j, (&u.w0, &u.w1));
        }
        s
    }
}

/// Moves every variable weight into the signature of the first atom using
/// that variable. Isolated variables are dropped and their total weight
/// `C = Π (w0 + w1)` recorded, giving `Z(out) = Z(in) / C`. When `C = 0`
/// a constant zero atom is added instead and the scale is 1.
pub fn weights_to_signatures(inst: &Instance) -> Result<(ReductionCertificate, Vec<SimpleWeighting>)> {
    let uses = uses(inst);
    let mut absorbed: Vec<Vec<Option<usize>>> = inst.atoms().iter().map(|a| vec![None; a.scope.len()]).collect();
    for (v, u) in uses.iter().enumerate() {
        if let Some(&(a, p)) = u.first() {
            absorbed[a][p] = Some(v);
        }
    }
    let mut taken: BTreeMap<String, ()> = inst.signatures().keys().map(|k| (k.clone(), ())).collect();
    let mut b = Instance::builder();
    let mut registry = Vec::new();
    let mut c = Rational::one();
    let mut index = vec![usize::MAX; inst.num_vars()];
    for (v, name) in inst.vars().names().iter().enumerate() {
        if uses[v].is_empty() {
            let w = inst.weight(v);
            c *= &w.w0 + &w.w1;
        } else {
            index[v] = b.unit_var(name.clone());
        }
    }
    for (a, atom) in inst.atoms().iter().enumerate() {
        let base = inst.atom_signature(atom);
        let scope: Vec<usize> = atom.scope.iter().map(|&v| index[v]).collect();
        if absorbed[a].iter().all(Option::is_none) {
            b.signature(atom.sig.clone(), base.clone());
            b.atom_idx(&atom.sig, scope);
            continue;
        }
        let unaries: Vec<Weight> = absorbed[a]
            .iter()
            .map(|o| o.map_or_else(Weight::unit, |v| inst.weight(v).clone()))
            .collect();
        let name = unused_name(&taken, &format!("{}@w{}", atom.sig, a + 1));
        taken.insert(name.clone(), ());
        let sw = SimpleWeighting {
            name: name.clone(),
            base_name: atom.sig.clone(),
            base: base.clone(),
            unaries,
        };
        b.signature(name.clone(), sw.signature());
        b.atom_idx(&name, scope);
        registry.push(sw);
    }
    let relation = if c.is_zero() {
        let zero = unused_name(&taken, "ZERO");
        b.signature(zero.clone(), Signature::scalar(Rational::zero()));
        b.atom_idx(&zero, Vec::new());
        Relation::Scaled { scale: Rational::one() }
    } else {
        Relation::Scaled {
            scale: Rational::one() / &c,
        }
    };
    b.policy(inst.policy());
    let out = b.build()?;
    let cert = ReductionCertificate::new(out, relation)
        .with_note(format!("isolated-variable factor C = {c}; {} weighted signatures", registry.len()));
    Ok((cert, registry))
}

/// Splits every registered simple weighting back into its base signature
/// plus per-variable weights. `Z` is unchanged.
pub fn signatures_to_weights(inst: &Instance, registry: &[SimpleWeighting]) -> Result<ReductionCertificate> {
    let by_name: BTreeMap<&str, &SimpleWeighting> = registry.iter().map(|s| (s.name.as_str(), s)).collect();
    let mut weights: Vec<Weight> = inst.weights().to_vec();
    let mut sigs: BTreeMap<String, Signature> = BTreeMap::new();
    let mut insert = |name: &str, sig: &Signature| -> Result<()> {
        match sigs.get(name) {
            Some(s) if s != sig => Err(Error::NameCollision(name.to_string())),
            _ => {
                sigs.insert(name.to_string(), sig.clone());
                Ok(())
            }
        }
    };
    let mut atoms = Vec::new();
    for atom in inst.atoms() {
        let sig = inst.atom_signature(atom);
        match by_name.get(atom.sig.as_str()) {
            Some(sw) => {
                if sw.unaries.len() != sig.arity() || sw.signature().table() != sig.table() {
                    return Err(Error::Precondition(format!(
                        "{} does not factor as registered",
                        atom.sig
                    )));
                }
                insert(&sw.base_name, &sw.base)?;
                for (&v, u) in atom.scope.iter().zip(&sw.unaries) {
                    weights[v].w0 *= &u.w0;
                    weights[v].w1 *= &u.w1;
                }
                atoms.push((sw.base_name.clone(), atom.scope.clone()));
            }
            None => {
                insert(&atom.sig, sig)?;
                atoms.push((atom.sig.clone(), atom.scope.clone()));
            }
        }
    }
    let mut b = Instance::builder();
    for (n, s) in sigs {
        b.signature(n, s);
    }
    for (v, name) in inst.vars().names().iter().enumerate() {
        b.var(name.clone(), weights[v].clone());
    }
    for (sig, scope) in atoms {
        b.atom_idx(&sig, scope);
    }
    b.policy(inst.policy());
    Ok(ReductionCertificate::new(b.build()?, Relation::Equal))
}

/// For a degree-exactly-2 instance whose weights are powers of two, replaces
/// each weight `(2^{e0}, 2^{e1})` by a chain of `|e1 - e0|` variables of
/// weight `(1,2)` or `(2,1)` linked by `EQ_2`. `Z(out) = Z(in) / C` with
/// `C = Π 2^{min(e0, e1)}`.
pub fn encode_pow2_weights(inst: &Instance) -> Result<ReductionCertificate> {
    if inst.policy() != DegreePolicy::Exactly(2) {
        return Err(Error::Precondition(format!(
            "degree policy must be = 2, found {}",
            inst.policy()
        )));
    }
    let exps: Vec<(i64, i64)> = inst
        .weights()
        .iter()
        .enumerate()
        .map(|(v, w)| match (log2_exact(&w.w0), log2_exact(&w.w1)) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Precondition(format!(
                "weight ({}, {}) of {} is not a pair of powers of two",
                w.w0,
                w.w1,
                inst.vars().name(v)
            ))),
        })
        .collect::<Result<_>>()?;
    let uses = uses(inst);
    let mut sigs: BTreeMap<String, Signature> = inst.signatures().clone();
    let eq_name = match sigs.get("EQ_2") {
        Some(s) if s.table() == eq(2).table() => "EQ_2".to_string(),
        _ => unused_name(&sigs, "EQ_2"),
    };
    sigs.insert(eq_name.clone(), eq(2));

    let mut b = Instance::builder();
    for atom in inst.atoms() {
        b.signature(atom.sig.clone(), inst.atom_signature(atom).clone());
    }
    let names = inst.vars().names();
    let mut slot: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut log_c = 0i64;
    let mut chains = Vec::new();
    for (v, &(e0, e1)) in exps.iter().enumerate() {
        log_c += e0.min(e1);
        let idx = b.unit_var(names[v].clone());
        for &p in &uses[v] {
            slot.insert(p, idx);
        }
        if e0 != e1 {
            chains.push((v, idx, e1 - e0));
        }
    }
    for &(v, head, p) in &chains {
        let cell = if p > 0 {
            Weight::new(Rational::one(), Rational::from_integer(2.into()))
        } else {
            Weight::new(Rational::from_integer(2.into()), Rational::one())
        };
        let mut prev = head;
        for k in 1..=p.unsigned_abs() {
            let next = b.fresh_var(&format!("{}#{k}", names[v]), cell.clone());
            b.signature(eq_name.clone(), eq(2));
            b.atom_idx(&eq_name, vec![prev, next]);
            prev = next;
        }
        slot.insert(uses[v][1], prev);
    }
    for (a, atom) in inst.atoms().iter().enumerate() {
        b.atom_idx(&atom.sig, (0..atom.scope.len()).map(|p| slot[&(a, p)]).collect());
    }
    b.policy(DegreePolicy::Exactly(2));
    let out = b.build()?;
    Ok(ReductionCertificate::new(
        out,
        Relation::Scaled {
            scale: pow2(-log_c),
        },
    )
    .with_note(format!("C = 2^{log_c}; {} chains", chains.len())))
}
