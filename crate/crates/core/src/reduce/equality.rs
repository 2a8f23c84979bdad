use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::{DegreePolicy, Instance, PartialConfiguration, Signature, VarSet, Weight};
use crate::classify::{find_minimal_pinning, is_delta_matroid, is_terraced, Target, Witness};
use crate::error::{Error, Result};

use super::{unused_name, uses, Relation, ReductionCertificate};

/// The steps taken by [`extract_r4`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R4Trace {
    /// Minimal non-terraced pinning of the input.
    pub pinning: PartialConfiguration,
    /// Positions of the pinned relation, reordered so the two witness
    /// coordinates come first.
    pub order: Vec<usize>,
    pub h1: Vec<i64>,
    /// Number of coordinates summed out after the first h-maximisation.
    pub summed_out: usize,
    /// h-vector of the second maximisation on `(x1, x2, y3)`.
    pub h2: [i64; 3],
}

fn complementary_pair(r: &Signature) -> Option<u64> {
    let s = r.support();
    let full = r.vars().full_mask();
    (r.is_relation() && s.len() == 2 && s[0] ^ s[1] == full).then_some(s[0])
}

/// Turns a relation that is not a delta matroid into an arity 3 relation
/// whose support is a pair of complementary configurations.
pub fn extract_r4(r: &Signature) -> Result<(Signature, R4Trace)> {
    if is_delta_matroid(r)?.member {
        return Err(Error::Precondition("relation is a delta matroid".into()));
    }
    let (pinning, r1) = find_minimal_pinning(r, Target::NonTerraced)?;
    let Some(Witness::Terrace { bits, i, j, .. }) = is_terraced(&r1).witness else {
        return Err(Error::Gadget("minimal pinning has no terrace witness".into()));
    };
    let k = r1.arity();
    if k < 3 {
        return Err(Error::Gadget("minimal non-terraced pinning has arity below 3".into()));
    }
    let mut order = vec![i, j];
    order.extend((0..k).filter(|&q| q != i && q != j));
    let r1 = r1.permute(&order)?;
    let (p1, p2) = ((bits >> i & 1) as i64, (bits >> j & 1) as i64);
    let mut h1 = vec![0i64; k];
    h1[0] = 2 * p1 - 1;
    h1[1] = 2 * p2 - 1;
    let r2 = r1.h_maximize(&h1)?;
    let rest_mask = r2.vars().full_mask() & !0b111;
    let r3 = r2.sum_out(rest_mask).support_relation().rename(VarSet::numbered(3).names().to_vec())?;

    // On the flipped pinnings x2 is a function of x1.
    let partner = |x1: i64| if x1 == p1 { 1 - p2 } else { p2 };
    let t = |y: i64, x: i64| -> bool {
        let bits = x | partner(x) << 1 | y << 2;
        !r3.value(bits as u64).is_zero()
    };
    let (c, d) = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .find(|&(c, d)| !t(c, d))
        .ok_or_else(|| Error::Gadget("summed relation has no zero to remove".into()))?;
    let h2 = [2 * d - 1, 0, 2 * c - 1];
    let r4 = r3.h_maximize(&h2)?;
    if complementary_pair(&r4).is_none() {
        return Err(Error::Gadget(format!("extracted relation {r4} is not a complementary pair")));
    }
    Ok((
        r4,
        R4Trace {
            pinning,
            order,
            h1,
            summed_out: k - 3,
            h2,
        },
    ))
}

fn used_signatures(inst: &Instance) -> BTreeMap<String, Signature> {
    inst.atoms()
        .iter()
        .map(|a| (a.sig.clone(), inst.atom_signature(a).clone()))
        .collect()
}

/// Replaces every variable of degree above 2 by one copy per use, tied
/// together by a cycle of `R4` atoms through fresh backbone variables.
pub fn two_simulate_equality(inst: &Instance, r4: &Signature) -> Result<ReductionCertificate> {
    if r4.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: r4.arity(),
        });
    }
    let a = complementary_pair(r4)
        .ok_or_else(|| Error::Precondition("R4 support is not a complementary pair".into()))?;
    let bit = |q: usize| a >> q & 1;
    let (s, t) = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .find(|&(s, t)| bit(s) == bit(t))
        .expect("three bits contain an equal pair");
    let r = 3 - s - t;

    let sigs = used_signatures(inst);
    let r4_name = unused_name(&sigs, "R4");
    let mut b = Instance::builder();
    for (name, sig) in &sigs {
        b.signature(name.clone(), sig.clone());
    }
    b.signature(r4_name.clone(), r4.clone());

    let uses = uses(inst);
    let names = inst.vars().names();
    let mut slot: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (v, u) in uses.iter().enumerate() {
        if u.len() <= 2 {
            let idx = b.var(names[v].clone(), inst.weight(v).clone());
            for &p in u {
                slot.insert(p, idx);
            }
        }
    }
    let mut cycles = Vec::new();
    for (v, u) in uses.iter().enumerate() {
        if u.len() <= 2 {
            continue;
        }
        let copies: Vec<usize> = (0..u.len())
            .map(|c| {
                let w = if c == 0 { inst.weight(v).clone() } else { Weight::unit() };
                b.fresh_var(&format!("{}#{}", names[v], c + 1), w)
            })
            .collect();
        let backbone: Vec<usize> = (0..u.len())
            .map(|c| b.fresh_var(&format!("{}.u{}", names[v], c + 1), Weight::unit()))
            .collect();
        for (c, &p) in u.iter().enumerate() {
            slot.insert(p, copies[c]);
        }
        cycles.push((copies, backbone));
    }
    for (ai, atom) in inst.atoms().iter().enumerate() {
        let scope = (0..atom.scope.len()).map(|p| slot[&(ai, p)]).collect();
        b.atom_idx(&atom.sig, scope);
    }
    for (copies, backbone) in &cycles {
        let d = copies.len();
        for c in 0..d {
            let mut scope = vec![0; 3];
            scope[s] = backbone[c];
            scope[t] = backbone[(c + 1) % d];
            scope[r] = copies[c];
            b.atom_idx(&r4_name, scope);
        }
    }
    b.policy(DegreePolicy::AtMost(2));
    let out = b.build()?;
    Ok(ReductionCertificate::new(out, Relation::Equal).with_note(format!(
        "{} variables split; R4 pattern {}{}{}",
        cycles.len(),
        bit(0),
        bit(1),
        bit(2)
    )))
}

/// Whether `r` is `EQ_2` or an implication in either direction.
fn is_equality_like(r: &Signature) -> bool {
    r.arity() == 2 && r.is_relation() && matches!(r.support().as_slice(), [0, 3] | [0, 1, 3] | [0, 2, 3])
}

/// Absorbs unary atoms into variable weights, then replaces each variable
/// used at least twice by a cycle of copies joined by `R`.
pub fn three_simulate_equality(inst: &Instance, r: &Signature) -> Result<ReductionCertificate> {
    if !is_equality_like(r) {
        return Err(Error::Precondition(format!("{r} is neither EQ_2 nor IMP")));
    }
    let mut weights: Vec<Weight> = inst.weights().to_vec();
    let mut kept = Vec::new();
    for atom in inst.atoms() {
        if atom.scope.len() == 1 {
            let f = inst.atom_signature(atom).table();
            let w = &mut weights[atom.scope[0]];
            w.w0 *= &f[0];
            w.w1 *= &f[1];
        } else {
            kept.push(atom.clone());
        }
    }
    let mut sigs = BTreeMap::new();
    for atom in &kept {
        sigs.insert(atom.sig.clone(), inst.atom_signature(atom).clone());
    }
    let r_name = unused_name(&sigs, "R");
    let mut b = Instance::builder();
    for (name, sig) in &sigs {
        b.signature(name.clone(), sig.clone());
    }
    b.signature(r_name.clone(), r.clone());

    let mut uses = vec![Vec::new(); inst.num_vars()];
    for (a, atom) in kept.iter().enumerate() {
        for (p, &v) in atom.scope.iter().enumerate() {
            uses[v].push((a, p));
        }
    }
    let names = inst.vars().names();
    let mut slot: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (v, u) in uses.iter().enumerate() {
        if u.len() <= 1 {
            let idx = b.var(names[v].clone(), weights[v].clone());
            for &p in u {
                slot.insert(p, idx);
            }
        }
    }
    let mut cycles = Vec::new();
    for (v, u) in uses.iter().enumerate() {
        if u.len() <= 1 {
            continue;
        }
        let copies: Vec<usize> = (0..u.len())
            .map(|c| {
                let w = if c == 0 { weights[v].clone() } else { Weight::unit() };
                b.fresh_var(&format!("{}#{}", names[v], c + 1), w)
            })
            .collect();
        for (c, &p) in u.iter().enumerate() {
            slot.insert(p, copies[c]);
        }
        cycles.push(copies);
    }
    for (ai, atom) in kept.iter().enumerate() {
        let scope = (0..atom.scope.len()).map(|p| slot[&(ai, p)]).collect();
        b.atom_idx(&atom.sig, scope);
    }
    for copies in &cycles {
        let d = copies.len();
        for c in 0..d {
            b.atom_idx(&r_name, vec![copies[c], copies[(c + 1) % d]]);
        }
    }
    b.policy(DegreePolicy::AtMost(3));
    let out = b.build()?;
    Ok(ReductionCertificate::new(out, Relation::Equal)
        .with_note(format!("{} variables replaced by cycles", cycles.len())))
}
