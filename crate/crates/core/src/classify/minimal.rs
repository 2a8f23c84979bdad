use crate::algebra::varset::{positions, scatter};
use crate::algebra::{linearly_dependent, PartialConfiguration, Signature};
use crate::error::{Error, Result};

use super::{decompose, is_im_terraced, is_join_closed, is_logsupermodular, is_terraced};

/// Properties for which a pinning-minimal failing pinning can be requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    NonTerraced,
    NonImTerraced,
    NonLogsupermodular,
    NonJoinClosed,
    NonDegenerate,
    NonBasicallyBinary,
}

impl Target {
    pub fn holds(&self, f: &Signature) -> bool {
        let max_block = |f: &Signature| decompose(f).map_or(0, |d| d.max_block_arity());
        match self {
            Target::NonTerraced => !is_terraced(f).member,
            Target::NonImTerraced => !is_im_terraced(f).member,
            Target::NonLogsupermodular => !is_logsupermodular(f).member,
            Target::NonJoinClosed => !is_join_closed(f).member,
            Target::NonDegenerate => max_block(f) > 1,
            Target::NonBasicallyBinary => max_block(f) > 2,
        }
    }
}

/// All `(domain, bits)` pinnings of a `k`-ary signature, largest domain
/// first, then by domain mask and bits.
pub fn pinnings_by_descending_domain(k: usize) -> impl Iterator<Item = (u64, u64)> {
    (0..=k).rev().flat_map(move |size| {
        (0..1u64 << k)
            .filter(move |d| d.count_ones() as usize == size)
            .flat_map(|domain| {
                let pos = positions(domain);
                (0..1u64 << pos.len()).map(move |c| (domain, scatter(c, &pos)))
            })
    })
}

/// A pinning `F_p` that still has the target property while every proper
/// further pinning loses it.
pub fn find_minimal_pinning(f: &Signature, target: Target) -> Result<(PartialConfiguration, Signature)> {
    if !target.holds(f) {
        return Err(Error::AlreadySatisfies(format!("{target:?}")));
    }
    pinnings_by_descending_domain(f.arity())
        .find_map(|(domain, bits)| {
            let g = f.pin_mask(domain, bits);
            target
                .holds(&g)
                .then(|| (PartialConfiguration::from_masks(f.vars().clone(), domain, bits), g))
        })
        .ok_or_else(|| Error::AlreadySatisfies(format!("{target:?}")))
}

/// A common pinning keeping `F` and `G` linearly independent, minimal.
pub fn find_minimal_independent_pair(
    f: &Signature,
    g: &Signature,
) -> Result<(PartialConfiguration, Signature, Signature)> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            found: g.arity(),
        });
    }
    pinnings_by_descending_domain(f.arity())
        .find_map(|(domain, bits)| {
            let (a, b) = (f.pin_mask(domain, bits), g.pin_mask(domain, bits));
            (!linearly_dependent(a.table(), b.table())).then(|| {
                (PartialConfiguration::from_masks(f.vars().clone(), domain, bits), a, b)
            })
        })
        .ok_or_else(|| Error::AlreadySatisfies("linear dependence".into()))
}

fn complementary(f: &Signature, x: u64, y: u64) -> bool {
    x ^ y == f.vars().full_mask()
}

/// `supp F ⊆ {0, x, x̄, 1}` for some `x`.
pub fn has_nonlsm_shape(f: &Signature) -> bool {
    let ones = f.vars().full_mask();
    let middle: Vec<u64> = f.support().into_iter().filter(|&x| x != 0 && x != ones).collect();
    match middle[..] {
        [] | [_] => true,
        [x, y] => complementary(f, x, y),
        _ => false,
    }
}

/// `supp F` is `{0, x, x̄}` or `{x, x̄}` with `x ∉ {0, 1}`.
pub fn has_nonjoin_shape(f: &Signature) -> bool {
    let rest: Vec<u64> = f.support().into_iter().filter(|&x| x != 0).collect();
    match rest[..] {
        [x, y] => complementary(f, x, y) && x != f.vars().full_mask() && y != f.vars().full_mask(),
        _ => false,
    }
}

/// Arity 2, or support `{x, x̄}`.
pub fn has_nondegenerate_shape(f: &Signature) -> bool {
    if f.arity() == 2 {
        return true;
    }
    matches!(f.support()[..], [x, y] if complementary(f, x, y))
}

/// `supp F ∪ supp G = {x, x̄}`.
pub fn has_independent_pair_shape(f: &Signature, g: &Signature) -> bool {
    let mut union: Vec<u64> = f.support();
    union.extend(g.support());
    union.sort_unstable();
    union.dedup();
    matches!(union[..], [x, y] if complementary(f, x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::library;

    #[test]
    fn enumeration_order() {
        let all: Vec<_> = pinnings_by_descending_domain(2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], (0b11, 0b00));
        assert_eq!(all.last(), Some(&(0, 0)));
    }

    #[test]
    fn pm3_minimal_non_bb_is_itself() {
        let (p, g) = find_minimal_pinning(&library::pm(3), Target::NonBasicallyBinary).unwrap();
        assert_eq!(p.domain_size(), 0);
        assert_eq!(g, library::pm(3));
    }

    #[test]
    fn nand_minimal_non_join() {
        let (_, g) = find_minimal_pinning(&library::nand(), Target::NonJoinClosed).unwrap();
        assert!(has_nonjoin_shape(&g));
        assert!(find_minimal_pinning(&library::imp(), Target::NonJoinClosed).is_err());
    }
}
