use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::library::{pin0, pin1};
use crate::algebra::varset::positions;
use crate::algebra::{Instance, Rational, Signature, Weight};
use crate::error::{Error, Result};

use super::{unused_name, Relation, ReductionCertificate};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Family,
    Pin(bool),
    Other,
}

fn role(name: &str, sig: &Signature, family: &BTreeMap<String, Signature>) -> Role {
    if family.get(name).is_some_and(|f| f.table() == sig.table()) {
        Role::Family
    } else if sig.table() == pin0().table() {
        Role::Pin(false)
    } else if sig.table() == pin1().table() {
        Role::Pin(true)
    } else {
        Role::Other
    }
}

/// Finds a family signature and a pinning of it whose table is `target`.
fn find_pinning<'a>(
    target: &Signature,
    family: &'a BTreeMap<String, Signature>,
) -> Option<(&'a str, &'a Signature, u64, u64)> {
    for (name, f) in family {
        if f.arity() < target.arity() {
            continue;
        }
        for (domain, bits) in crate::classify::pinnings_by_descending_domain(f.arity()) {
            if f.arity() - domain.count_ones() as usize != target.arity() {
                continue;
            }
            if f.pin_mask(domain, bits).table() == target.table() {
                return Some((name, f, domain, bits));
            }
        }
    }
    None
}

/// Rewrites every atom whose signature is a pinning of a family signature
/// as an atom of that signature, with each pinned position on a fresh
/// variable carrying a `PIN_0` or `PIN_1` atom. `Z` is unchanged.
pub fn rewrite_pinnings(inst: &Instance, family: &BTreeMap<String, Signature>) -> Result<Instance> {
    let mut b = Instance::builder();
    for (v, name) in inst.vars().names().iter().enumerate() {
        b.var(name.clone(), inst.weight(v).clone());
    }
    let mut sigs: BTreeMap<String, Signature> = BTreeMap::new();
    let mut atoms: Vec<(String, Vec<usize>)> = Vec::new();
    let mut pins: Vec<(bool, usize)> = Vec::new();
    for (ai, atom) in inst.atoms().iter().enumerate() {
        let sig = inst.atom_signature(atom);
        match role(&atom.sig, sig, family) {
            Role::Family | Role::Pin(_) => {
                sigs.insert(atom.sig.clone(), sig.clone());
                atoms.push((atom.sig.clone(), atom.scope.clone()));
            }
            Role::Other => {
                let (name, f, domain, bits) = find_pinning(sig, family).ok_or_else(|| Error::NotInClass {
                    atom: ai,
                    sig: atom.sig.clone(),
                    class: "pinnings of the family".into(),
                })?;
                sigs.insert(name.to_string(), f.clone());
                let mut free = atom.scope.iter();
                let mut scope = Vec::with_capacity(f.arity());
                for p in 0..f.arity() {
                    if domain >> p & 1 == 1 {
                        let y = b.fresh_var(&format!("pin{ai}.y{}", p + 1), Weight::unit());
                        pins.push((bits >> p & 1 == 1, y));
                        scope.push(y);
                    } else {
                        scope.push(*free.next().expect("arity checked"));
                    }
                }
                atoms.push((name.to_string(), scope));
            }
        }
    }
    let pin_names = [unused_name(family, "PIN_0"), unused_name(family, "PIN_1")];
    if !pins.is_empty() {
        sigs.insert(pin_names[0].clone(), pin0());
        sigs.insert(pin_names[1].clone(), pin1());
    }
    for (n, s) in sigs {
        b.signature(n, s);
    }
    for (sig, scope) in atoms {
        b.atom_idx(&sig, scope);
    }
    for (value, y) in pins {
        b.atom_idx(&pin_names[value as usize], vec![y]);
    }
    b.policy(inst.policy());
    b.build()
}

/// A family signature usable to express `PIN_b`, with the position carrying
/// the pinned value.
struct PinGadget<'a> {
    name: &'a str,
    sig: &'a Signature,
    position: usize,
}

fn pin_gadget(family: &BTreeMap<String, Signature>, value: bool) -> Option<PinGadget<'_>> {
    family.iter().find_map(|(name, sig)| {
        let full = sig.vars().full_mask();
        let support = sig.support();
        let z = if value {
            support.iter().copied().filter(|&x| x != 0).max()
        } else {
            support.iter().copied().filter(|&x| x != full).min()
        }?;
        let bits = if value { z } else { !z & full };
        let position = *positions(bits).first()?;
        Some(PinGadget { name, sig, position })
    })
}

/// `Z_ψ(b, …, b)` for the `d`-fold product of `g` sharing all positions
/// except the pinned one.
fn psi_value(g: &PinGadget<'_>, value: bool, d: usize) -> Rational {
    g.sig
        .table()
        .iter()
        .enumerate()
        .filter(|(x, _)| (x >> g.position & 1 == 1) == value)
        .map(|(_, v)| num_traits::pow(v.clone(), d))
        .sum()
}

/// Removes `PIN_0`/`PIN_1` atoms (and pinnings of family signatures) by
/// taking `d` copies of the instance and joining the copies of each pinned
/// variable through a product of `d` family atoms that share their other
/// variables. `Z(out) = scale · Z(in)^d`.
pub fn simulate_pins(
    inst: &Instance,
    family: &BTreeMap<String, Signature>,
    d: Option<usize>,
) -> Result<ReductionCertificate> {
    let policy = inst.policy();
    let d = d.unwrap_or_else(|| policy.smallest());
    if d == 0 || !policy.allows(d) {
        return Err(Error::DegreePolicy {
            var: "<pin gadget>".into(),
            degree: d,
            policy: policy.to_string(),
        });
    }
    let inst = &rewrite_pinnings(inst, family)?;
    let n = inst.num_vars();
    let mut forced: Vec<[bool; 2]> = vec![[false; 2]; n];
    let mut family_atoms = Vec::new();
    let mut pin_atoms = Vec::new();
    for atom in inst.atoms() {
        match role(&atom.sig, inst.atom_signature(atom), family) {
            Role::Family => family_atoms.push(atom),
            Role::Pin(b) => {
                forced[atom.scope[0]][b as usize] = true;
                pin_atoms.push((b, atom.scope[0]));
            }
            Role::Other => unreachable!("pinnings were rewritten"),
        }
    }
    let gadgets = [pin_gadget(family, false), pin_gadget(family, true)];
    for (b, _) in &pin_atoms {
        if gadgets[*b as usize].is_none() {
            return Err(Error::NoPinGadget(*b as u8));
        }
    }

    let mut weights = Vec::with_capacity(n);
    let mut rescale = Rational::one();
    for v in 0..n {
        let w = inst.weight(v);
        let new = match forced[v] {
            [false, false] => w.clone(),
            [true, true] => Weight::new(Rational::zero(), Rational::zero()),
            [f0, _] => {
                let b = !f0;
                let c = w.get(b).clone();
                if c.is_zero() {
                    Weight::new(Rational::zero(), Rational::zero())
                } else {
                    rescale *= &c;
                    if b {
                        Weight::new(Rational::zero(), Rational::one())
                    } else {
                        Weight::new(Rational::one(), Rational::zero())
                    }
                }
            }
        };
        weights.push(new);
    }

    let mut b = Instance::builder();
    for atom in &family_atoms {
        b.signature(atom.sig.clone(), inst.atom_signature(atom).clone());
    }
    for (value, _) in &pin_atoms {
        let g = gadgets[*value as usize].as_ref().unwrap();
        b.signature(g.name.to_string(), g.sig.clone());
    }
    let names = inst.vars().names();
    let copies: Vec<Vec<usize>> = (0..d)
        .map(|c| {
            (0..n)
                .map(|v| b.fresh_var(&format!("{}#{}", names[v], c + 1), weights[v].clone()))
                .collect()
        })
        .collect();
    for copy in &copies {
        for atom in &family_atoms {
            b.atom_idx(&atom.sig, atom.scope.iter().map(|&v| copy[v]).collect());
        }
    }
    let mut scale = Rational::one();
    for (k, &(value, v)) in pin_atoms.iter().enumerate() {
        let g = gadgets[value as usize].as_ref().unwrap();
        let shared: Vec<usize> = (0..g.sig.arity())
            .map(|p| {
                if p == g.position {
                    usize::MAX
                } else {
                    b.fresh_var(&format!("pin{}.y{}", k + 1, p + 1), Weight::unit())
                }
            })
            .collect();
        for copy in &copies {
            let scope = shared.iter().map(|&y| if y == usize::MAX { copy[v] } else { y }).collect();
            b.atom_idx(g.name, scope);
        }
        scale *= psi_value(g, value, d);
    }
    b.policy(policy);
    let out = b.build()?;
    scale /= num_traits::pow(rescale.clone(), d);
    let relation = Relation::ScaledPower {
        scale,
        power: d as u32,
    };
    Ok(ReductionCertificate::new(out, relation).with_note(format!(
        "d = {d}, {} pin atoms, weight rescaling {rescale}",
        pin_atoms.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::library;
    use crate::algebra::num::int;
    use crate::algebra::DegreePolicy;
    use crate::eval::brute_force_z;

    fn imp_family() -> BTreeMap<String, Signature> {
        BTreeMap::from([("IMP".to_string(), library::imp())])
    }

    #[test]
    fn single_pinned_variable() {
        let mut b = Instance::builder();
        b.signature("PIN_0", library::pin0());
        b.var("x", Weight::new(int(1), int(0)));
        b.atom("PIN_0", &["x"]).unwrap();
        let inst = b.build().unwrap();
        let cert = simulate_pins(&inst, &imp_family(), Some(2)).unwrap();
        // IMP with the pinned value at x1 = 0: x2 free, so Z_ψ(0) = 2.
        assert_eq!(brute_force_z(&cert.output).unwrap(), int(2));
        assert!(cert.verify(&inst).unwrap());
    }

    #[test]
    fn no_pins_gives_power() {
        let mut b = Instance::builder();
        b.signature("IMP", library::imp());
        b.var("a", Weight::new(int(1), int(2)));
        b.unit_var("b");
        b.atom("IMP", &["a", "b"]).unwrap();
        let inst = b.build().unwrap();
        let cert = simulate_pins(&inst, &imp_family(), Some(3)).unwrap();
        assert_eq!(
            cert.relation,
            Relation::ScaledPower {
                scale: int(1),
                power: 3
            }
        );
        assert!(cert.verify(&inst).unwrap());
    }

    #[test]
    fn mixed_pins_and_zero_weights() {
        let mut b = Instance::builder();
        b.signature("IMP", library::imp())
            .signature("PIN_0", library::pin0())
            .signature("PIN_1", library::pin1());
        b.var("a", Weight::new(int(3), int(2)));
        b.var("b", Weight::new(int(0), int(5)));
        b.var("c", Weight::new(int(2), int(7)));
        b.atom("IMP", &["a", "b"]).unwrap();
        b.atom("IMP", &["b", "c"]).unwrap();
        b.atom("PIN_1", &["b"]).unwrap();
        b.atom("PIN_0", &["a"]).unwrap();
        let inst = b.build().unwrap();
        for d in 1..=3 {
            assert!(simulate_pins(&inst, &imp_family(), Some(d)).unwrap().verify(&inst).unwrap());
        }
        b.atom("PIN_0", &["b"]).unwrap();
        let conflicted = b.build().unwrap();
        assert!(simulate_pins(&conflicted, &imp_family(), Some(2)).unwrap().verify(&conflicted).unwrap());
    }

    #[test]
    fn pinned_family_signature_rewritten() {
        let family = BTreeMap::from([("NAND3".to_string(), Signature::numbered((0..8).map(|x| int((x != 7) as i64)).collect()).unwrap())]);
        let mut b = Instance::builder();
        b.signature("NANDp", library::nand());
        b.unit_var("a");
        b.unit_var("b");
        b.atom("NANDp", &["a", "b"]).unwrap();
        let inst = b.build().unwrap();
        let rewritten = rewrite_pinnings(&inst, &family).unwrap();
        assert_eq!(brute_force_z(&rewritten).unwrap(), int(3));
        let cert = simulate_pins(&inst, &family, Some(2)).unwrap();
        assert!(cert.verify(&inst).unwrap());
    }

    #[test]
    fn missing_gadget_and_policy() {
        let family = BTreeMap::from([("P1".to_string(), library::pin1())]);
        let mut b = Instance::builder();
        b.signature("PIN_0", library::pin0());
        b.unit_var("x");
        b.atom("PIN_0", &["x"]).unwrap();
        let inst = b.build().unwrap();
        assert_eq!(simulate_pins(&inst, &family, None), Err(Error::NoPinGadget(0)));
        let bounded = inst.with_policy(DegreePolicy::AtMost(1)).unwrap();
        assert!(simulate_pins(&bounded, &imp_family(), Some(2)).is_err());
    }
}
