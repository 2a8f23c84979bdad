//! Class membership with witnesses, minimal pinnings, and dichotomy verdicts.

mod decompose;
mod minimal;
mod report;

use std::fmt;

use num_traits::Zero;

use crate::algebra::varset::{bitstring, positions, scatter};
use crate::algebra::{linearly_dependent, Rational, Signature};
use crate::error::Result;

pub use decompose::{decompose, Decomposition};
pub use minimal::{
    find_minimal_independent_pair, find_minimal_pinning, has_independent_pair_shape,
    has_nondegenerate_shape, has_nonjoin_shape, has_nonlsm_shape, pinnings_by_descending_domain,
    Target,
};
pub use report::{
    classify, classify_relations, classify_signatures, decide_relations, decide_signatures,
    ClassificationReport, DecisionTable, FiniteWeightConditions, SignatureReport, Verdict,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    DeltaMatroid,
    Terraced,
    ImTerraced,
    NeqConj,
    WeightedNeqConj,
    ImConj,
    MeetClosed,
    JoinClosed,
    Logsupermodular,
    Degenerate,
    BasicallyBinary,
    BasicallyBinarySupport,
    NoEq2Pinning,
}

impl Class {
    pub fn name(&self) -> &'static str {
        match self {
            Class::DeltaMatroid => "delta matroid",
            Class::Terraced => "terraced",
            Class::ImTerraced => "IM-terraced",
            Class::NeqConj => "NEQ-conj",
            Class::WeightedNeqConj => "Weighted-NEQ-conj",
            Class::ImConj => "IM-conj",
            Class::MeetClosed => "meet-closed support",
            Class::JoinClosed => "join-closed support",
            Class::Logsupermodular => "logsupermodular",
            Class::Degenerate => "degenerate",
            Class::BasicallyBinary => "basically binary",
            Class::BasicallyBinarySupport => "basically binary support",
            Class::NoEq2Pinning => "free of EQ_2 support pinnings",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A counterexample to class membership. Configurations are bitmasks over
/// the signature's positions; positions are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `x, y ∈ R` and `i ∈ x△y` with no `j ∈ x△y` such that `x^{i,j} ∈ R`.
    Exchange { x: u64, y: u64, i: usize },
    /// `F_p ≡ 0` while `F_{p^i}` and `F_{p^j}` are linearly independent.
    Terrace {
        domain: u64,
        bits: u64,
        i: usize,
        j: usize,
    },
    /// `F(x∧y) F(x∨y) < F(x) F(y)`.
    Lattice { x: u64, y: u64 },
    /// `x, y` in the support but their meet (or join) is not.
    Closure { x: u64, y: u64 },
    /// An indecomposable factor that is too large for the class.
    Block {
        positions: Vec<usize>,
        support_size: usize,
    },
    /// A pinning of the support equal to `{00, 11}`.
    Eq2Pinning { domain: u64, bits: u64 },
}

impl Witness {
    /// Re-checks the witness against the class definition.
    pub fn verify(&self, class: Class, f: &Signature) -> bool {
        let t = f.table();
        let s = |x: u64| !t[x as usize].is_zero();
        match (self, class) {
            (&Witness::Exchange { x, y, i }, Class::DeltaMatroid) => {
                let diff = x ^ y;
                s(x) && s(y)
                    && diff >> i & 1 == 1
                    && positions(diff).into_iter().all(|j| !s(x ^ 1 << i ^ if j == i { 0 } else { 1 << j }))
            }
            (&Witness::Terrace { domain, bits, i, j }, Class::Terraced | Class::ImTerraced) => {
                if class == Class::ImTerraced && (bits >> i & 1) == (bits >> j & 1) {
                    return false;
                }
                let p = f.pin_mask(domain, bits);
                let a = f.pin_mask(domain, bits ^ 1 << i);
                let b = f.pin_mask(domain, bits ^ 1 << j);
                i != j
                    && domain >> i & domain >> j & 1 == 1
                    && p.is_zero()
                    && !linearly_dependent(a.table(), b.table())
            }
            (&Witness::Lattice { x, y }, Class::Logsupermodular) => {
                &t[(x & y) as usize] * &t[(x | y) as usize] < &t[x as usize] * &t[y as usize]
            }
            (&Witness::Closure { x, y }, Class::MeetClosed) => s(x) && s(y) && !s(x & y),
            (&Witness::Closure { x, y }, Class::JoinClosed) => s(x) && s(y) && !s(x | y),
            (&Witness::Closure { x, y }, Class::ImConj) => {
                f.is_relation() && s(x) && s(y) && (!s(x & y) || !s(x | y))
            }
            (Witness::Block { positions, support_size }, _) => {
                let limit = match class {
                    Class::Degenerate => 1,
                    Class::BasicallyBinary => 2,
                    Class::NeqConj | Class::WeightedNeqConj => {
                        let Ok(d) = decompose(f) else { return false };
                        return d.blocks.iter().zip(&d.factors).any(|(b, g)| {
                            b == positions && g.support_size() == *support_size && *support_size > 2
                        });
                    }
                    Class::BasicallyBinarySupport => {
                        let Ok(d) = decompose(&f.support_relation()) else { return false };
                        return d.blocks.iter().any(|b| b == positions && b.len() > 2);
                    }
                    _ => return false,
                };
                let Ok(d) = decompose(f) else { return false };
                d.blocks.iter().any(|b| b == positions && b.len() > limit)
            }
            (&Witness::Eq2Pinning { domain, bits }, Class::NoEq2Pinning) => {
                let p = f.support_relation().pin_mask(domain, bits);
                p.arity() == 2 && p.support() == vec![0b00, 0b11]
            }
            _ => false,
        }
    }

    /// Human-readable rendering for a signature of arity `k`.
    pub fn describe(&self, k: usize) -> String {
        let partial = |domain: u64, bits: u64| -> String {
            (0..k)
                .map(|i| match (domain >> i & 1, bits >> i & 1) {
                    (0, _) => '*',
                    (_, 1) => '1',
                    _ => '0',
                })
                .collect()
        };
        match self {
            Witness::Exchange { x, y, i } => format!(
                "x={} y={} i={}",
                bitstring(*x, k),
                bitstring(*y, k),
                i + 1
            ),
            Witness::Terrace { domain, bits, i, j } => {
                format!("p={} i={} j={}", partial(*domain, *bits), i + 1, j + 1)
            }
            Witness::Lattice { x, y } | Witness::Closure { x, y } => {
                format!("x={} y={}", bitstring(*x, k), bitstring(*y, k))
            }
            Witness::Block {
                positions,
                support_size,
            } => format!(
                "block {{{}}} with support size {support_size}",
                positions
                    .iter()
                    .map(|p| (p + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Witness::Eq2Pinning { domain, bits } => format!("p={}", partial(*domain, *bits)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub class: Class,
    pub member: bool,
    pub witness: Option<Witness>,
}

impl Membership {
    fn from_witness(class: Class, witness: Option<Witness>) -> Self {
        Membership {
            class,
            member: witness.is_none(),
            witness,
        }
    }
}

pub fn is_delta_matroid(r: &Signature) -> Result<Membership> {
    r.require_relation()?;
    let t = r.table();
    let s = |x: u64| !t[x as usize].is_zero();
    let supp = r.support();
    let witness = supp.iter().find_map(|&x| {
        supp.iter().find_map(|&y| {
            let diff = x ^ y;
            positions(diff).into_iter().find_map(|i| {
                let ok = positions(diff)
                    .into_iter()
                    .any(|j| s(x ^ 1 << i ^ if j == i { 0 } else { 1 << j }));
                (!ok).then_some(Witness::Exchange { x, y, i })
            })
        })
    });
    Ok(Membership::from_witness(Class::DeltaMatroid, witness))
}

pub fn is_terraced(f: &Signature) -> Membership {
    Membership::from_witness(Class::Terraced, terrace_witness(f, false))
}

pub fn is_im_terraced(f: &Signature) -> Membership {
    Membership::from_witness(Class::ImTerraced, terrace_witness(f, true))
}

fn terrace_witness(f: &Signature, im: bool) -> Option<Witness> {
    let k = f.arity();
    let t = f.table();
    let relation = f.is_relation();
    let full = f.vars().full_mask();
    for domain in (0..1u64 << k).filter(|d| d.count_ones() >= 2) {
        let free_pos = positions(!domain & full);
        let free: Vec<u64> = (0..1u64 << free_pos.len()).map(|z| scatter(z, &free_pos)).collect();
        let dom_pos = positions(domain);
        for compact in 0..1u64 << dom_pos.len() {
            let bits = scatter(compact, &dom_pos);
            if !free.iter().all(|z| t[(z | bits) as usize].is_zero()) {
                continue;
            }
            for (a, &i) in dom_pos.iter().enumerate() {
                for &j in &dom_pos[a + 1..] {
                    if im && (bits >> i & 1) == (bits >> j & 1) {
                        continue;
                    }
                    let (bi, bj) = (bits ^ 1 << i, bits ^ 1 << j);
                    let dependent = if relation {
                        let si: Vec<bool> = free.iter().map(|z| !t[(z | bi) as usize].is_zero()).collect();
                        let sj: Vec<bool> = free.iter().map(|z| !t[(z | bj) as usize].is_zero()).collect();
                        si == sj || !si.contains(&true) || !sj.contains(&true)
                    } else {
                        let vi: Vec<Rational> = free.iter().map(|z| t[(z | bi) as usize].clone()).collect();
                        let vj: Vec<Rational> = free.iter().map(|z| t[(z | bj) as usize].clone()).collect();
                        linearly_dependent(&vi, &vj)
                    };
                    if !dependent {
                        return Some(Witness::Terrace { domain, bits, i, j });
                    }
                }
            }
        }
    }
    None
}

fn block_witness(f: &Signature, too_big: impl Fn(&[usize], &Signature) -> bool) -> Option<Witness> {
    let d = decompose(f).ok()?;
    d.blocks
        .iter()
        .zip(&d.factors)
        .find(|(b, g)| too_big(b, g))
        .map(|(b, g)| Witness::Block {
            positions: b.clone(),
            support_size: g.support_size(),
        })
}

/// Every indecomposable factor has support of size at most 2. The zero
/// signature is treated as a member of every product-defined class.
pub fn is_weighted_neq_conj(f: &Signature) -> Membership {
    Membership::from_witness(
        Class::WeightedNeqConj,
        block_witness(f, |_, g| g.support_size() > 2),
    )
}

pub fn is_neq_conj(r: &Signature) -> Result<Membership> {
    r.require_relation()?;
    Ok(Membership::from_witness(
        Class::NeqConj,
        block_witness(r, |_, g| g.support_size() > 2),
    ))
}

pub fn is_degenerate(f: &Signature) -> Membership {
    Membership::from_witness(Class::Degenerate, block_witness(f, |b, _| b.len() > 1))
}

pub fn is_basically_binary(f: &Signature) -> Membership {
    Membership::from_witness(Class::BasicallyBinary, block_witness(f, |b, _| b.len() > 2))
}

pub fn has_basically_binary_support(f: &Signature) -> Membership {
    Membership::from_witness(
        Class::BasicallyBinarySupport,
        block_witness(&f.support_relation(), |b, _| b.len() > 2),
    )
}

fn closure_witness(f: &Signature, meet: bool, join: bool) -> Option<Witness> {
    let supp = f.support();
    let s = |x: u64| f.in_support(x);
    supp.iter().enumerate().find_map(|(a, &x)| {
        supp[a + 1..].iter().find_map(|&y| {
            ((meet && !s(x & y)) || (join && !s(x | y))).then_some(Witness::Closure { x, y })
        })
    })
}

pub fn is_meet_closed(f: &Signature) -> Membership {
    Membership::from_witness(Class::MeetClosed, closure_witness(f, true, false))
}

pub fn is_join_closed(f: &Signature) -> Membership {
    Membership::from_witness(Class::JoinClosed, closure_witness(f, false, true))
}

pub fn is_im_conj(r: &Signature) -> Result<Membership> {
    r.require_relation()?;
    Ok(Membership::from_witness(Class::ImConj, closure_witness(r, true, true)))
}

pub fn is_logsupermodular(f: &Signature) -> Membership {
    let t = f.table();
    let n = t.len() as u64;
    let witness = (0..n).find_map(|x| {
        if t[x as usize].is_zero() {
            return None;
        }
        (x + 1..n).find_map(|y| {
            if x & y == x || x & y == y || t[y as usize].is_zero() {
                return None;
            }
            (&t[(x & y) as usize] * &t[(x | y) as usize] < &t[x as usize] * &t[y as usize])
                .then_some(Witness::Lattice { x, y })
        })
    });
    Membership::from_witness(Class::Logsupermodular, witness)
}

/// No pinning of the support is (a renaming of) `EQ_2`.
pub fn has_no_eq2_pinning(f: &Signature) -> Membership {
    let r = f.support_relation();
    let k = r.arity();
    let witness = (0..1u64 << k)
        .filter(|d| d.count_ones() as usize + 2 == k)
        .find_map(|domain| {
            let dom_pos = positions(domain);
            (0..1u64 << dom_pos.len()).find_map(|c| {
                let bits = scatter(c, &dom_pos);
                (r.pin_mask(domain, bits).support() == vec![0b00, 0b11])
                    .then_some(Witness::Eq2Pinning { domain, bits })
            })
        });
    Membership::from_witness(Class::NoEq2Pinning, witness)
}

/// Dispatches on the class; relation-only classes fail on non-relations.
pub fn membership(class: Class, f: &Signature) -> Result<Membership> {
    Ok(match class {
        Class::DeltaMatroid => is_delta_matroid(f)?,
        Class::Terraced => is_terraced(f),
        Class::ImTerraced => is_im_terraced(f),
        Class::NeqConj => is_neq_conj(f)?,
        Class::WeightedNeqConj => is_weighted_neq_conj(f),
        Class::ImConj => is_im_conj(f)?,
        Class::MeetClosed => is_meet_closed(f),
        Class::JoinClosed => is_join_closed(f),
        Class::Logsupermodular => is_logsupermodular(f),
        Class::Degenerate => is_degenerate(f),
        Class::BasicallyBinary => is_basically_binary(f),
        Class::BasicallyBinarySupport => has_basically_binary_support(f),
        Class::NoEq2Pinning => has_no_eq2_pinning(f),
    })
}
