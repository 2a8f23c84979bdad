use num_traits::{One, Zero};

use crate::algebra::varset::{low_mask, positions, scatter};
use crate::algebra::{Rational, Signature, VarSet};
use crate::error::{Error, Result};

/// Finest tensor factorization `F = scalar · ⊗ factors`, blocks listed by
/// their least position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub blocks: Vec<Vec<usize>>,
    pub factors: Vec<Signature>,
    pub scalar: Rational,
}

impl Decomposition {
    pub fn max_block_arity(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.max_block_arity() <= 1
    }

    pub fn is_basically_binary(&self) -> bool {
        self.max_block_arity() <= 2
    }

    pub fn is_indecomposable(&self) -> bool {
        self.blocks.len() <= 1
    }

    /// Rebuilds the original table from the factors.
    pub fn reconstruct(&self, vars: &VarSet) -> Result<Signature> {
        Signature::from_fn(vars.clone(), |x| {
            self.blocks
                .iter()
                .zip(&self.factors)
                .fold(self.scalar.clone(), |acc, (block, f)| {
                    let local = block
                        .iter()
                        .enumerate()
                        .fold(0u64, |a, (j, &p)| a | (x >> p & 1) << j);
                    acc * f.value(local)
                })
        })
    }
}

/// Does the value matrix of `table` across `(rows, cols)` have rank ≤ 1?
/// Returns the split `(A, B)` with `table = A ⊗ B` when it does.
fn rank_one_split(
    table: &[Rational],
    rows: &[usize],
    cols: &[usize],
) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let row_idx: Vec<u64> = (0..1u64 << rows.len()).map(|u| scatter(u, rows)).collect();
    let col_idx: Vec<u64> = (0..1u64 << cols.len()).map(|w| scatter(w, cols)).collect();
    let at = |u: usize, w: usize| &table[(row_idx[u] | col_idx[w]) as usize];
    let (u0, w0) = (0..row_idx.len())
        .flat_map(|u| (0..col_idx.len()).map(move |w| (u, w)))
        .find(|&(u, w)| !at(u, w).is_zero())?;
    let pivot = at(u0, w0);
    for u in 0..row_idx.len() {
        let left = at(u, w0);
        for w in 0..col_idx.len() {
            if at(u, w) * pivot != left * at(u0, w) {
                return None;
            }
        }
    }
    let a = (0..row_idx.len()).map(|u| at(u, w0).clone()).collect();
    let b = (0..col_idx.len()).map(|w| at(u0, w) / pivot).collect();
    Some((a, b))
}

/// Finest decomposition by rank-1 splits. For each remaining set the least
/// block containing its first position is found by increasing size, so every
/// returned factor is indecomposable.
pub fn decompose(f: &Signature) -> Result<Decomposition> {
    if f.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    let mut blocks = Vec::new();
    let mut factors = Vec::new();
    let mut remaining: Vec<usize> = (0..f.arity()).collect();
    let mut table: Vec<Rational> = f.table().to_vec();
    while !remaining.is_empty() {
        let n = remaining.len();
        let mut masks: Vec<u64> = (0..1u64 << (n - 1)).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        let (rows, a, b) = masks
            .into_iter()
            .find_map(|m| {
                let rows_local: Vec<usize> = std::iter::once(0)
                    .chain(positions(m).into_iter().map(|p| p + 1))
                    .collect();
                let row_mask = rows_local.iter().fold(0u64, |acc, &p| acc | 1 << p);
                let cols_local = positions(!row_mask & low_mask(n));
                rank_one_split(&table, &rows_local, &cols_local).map(|(a, b)| (rows_local, a, b))
            })
            .expect("the full block always splits");
        let block: Vec<usize> = rows.iter().map(|&p| remaining[p]).collect();
        let names: Vec<String> = block.iter().map(|&p| f.vars().name(p).to_string()).collect();
        factors.push(Signature::new(VarSet::new(names)?, a)?);
        blocks.push(block);
        remaining = remaining
            .iter()
            .enumerate()
            .filter(|(i, _)| !rows.contains(i))
            .map(|(_, &p)| p)
            .collect();
        table = b;
    }
    let scalar = if blocks.is_empty() {
        f.value(0).clone()
    } else {
        debug_assert!(table.len() == 1 && table[0].is_one());
        Rational::one()
    };
    Ok(Decomposition {
        blocks,
        factors,
        scalar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::library;
    use crate::algebra::num::int;

    #[test]
    fn pin_tensor_neq() {
        let f = library::pin0()
            .rename(["a"])
            .unwrap()
            .tensor(&library::neq().rename(["b", "c"]).unwrap())
            .unwrap();
        let d = decompose(&f).unwrap();
        assert_eq!(d.blocks, vec![vec![0], vec![1, 2]]);
        assert_eq!(d.reconstruct(f.vars()).unwrap(), f);
    }

    #[test]
    fn pm3_indecomposable() {
        let d = decompose(&library::pm(3)).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert!(!d.is_basically_binary());
    }

    #[test]
    fn two_binary_blocks() {
        // x1 x2 = 1 and x3 ≤ x4
        let r = Signature::relation(
            VarSet::numbered(4),
            (0..16u64).filter(|x| x & 3 == 3 && !(x >> 2 & 1 == 1 && x >> 3 & 1 == 0)),
        )
        .unwrap();
        let d = decompose(&r).unwrap();
        assert_eq!(d.blocks, vec![vec![0], vec![1], vec![2, 3]]);
        assert!(d.is_basically_binary());
    }

    #[test]
    fn weighted_products() {
        // (1,2) ⊗ (1,3) ⊗ (2,5)
        let f = Signature::numbered([2, 4, 6, 12, 5, 10, 15, 30].map(int).to_vec()).unwrap();
        let d = decompose(&f).unwrap();
        assert!(d.is_degenerate());
        assert_eq!(d.blocks.len(), 3);
        assert_eq!(d.reconstruct(f.vars()).unwrap(), f);
        // 2·5 ≠ 3·3 across every bipartition
        let g = Signature::numbered([2, 3, 3, 5, 3, 5, 5, 9].map(int).to_vec()).unwrap();
        assert!(decompose(&g).unwrap().is_indecomposable());
    }

    #[test]
    fn zero_and_scalar() {
        let z = Signature::relation(VarSet::numbered(2), []).unwrap();
        assert_eq!(decompose(&z), Err(Error::IdenticallyZero));
        let s = Signature::scalar(int(7));
        let d = decompose(&s).unwrap();
        assert!(d.blocks.is_empty());
        assert_eq!(d.scalar, int(7));
    }
}
