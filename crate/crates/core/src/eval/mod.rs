//! Exact partition functions: brute force, variable elimination, and the
//! polynomial-time evaluators for the tractable classes.

mod matching;
mod tractable;

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::algebra::{Instance, Rational};
use crate::error::{Error, Result};

pub use matching::{matching_brute_force, WeightedGraph, MATCHING_EDGE_CAP};
pub use tractable::{
    eval_basically_binary_deg2, eval_weighted_neq_conj, parity_components, ParityComponent, PinStatus,
};

pub const BRUTE_FORCE_CAP: usize = 24;
/// Largest intermediate factor arity allowed during variable elimination.
pub const ELIMINATION_WIDTH_CAP: usize = 20;

pub fn brute_force_z(inst: &Instance) -> Result<Rational> {
    brute_force_z_capped(inst, BRUTE_FORCE_CAP)
}

/// `Σ_x wt(x)` over all `2^|V|` configurations.
pub fn brute_force_z_capped(inst: &Instance, cap: usize) -> Result<Rational> {
    let n = inst.num_vars();
    let cap = cap.min(40);
    if n > cap {
        return Err(Error::SizeCap {
            what: "variables",
            size: n,
            cap,
        });
    }
    let atoms: Vec<(&[Rational], &[usize])> = inst
        .atoms()
        .iter()
        .map(|a| (inst.atom_signature(a).table(), a.scope.as_slice()))
        .collect();
    let mut total = Rational::zero();
    'configs: for x in 0..1u64 << n {
        let mut prod = Rational::one();
        for (table, scope) in &atoms {
            let idx = scope
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &v)| acc | ((x >> v & 1) as usize) << j);
            let val = &table[idx];
            if val.is_zero() {
                continue 'configs;
            }
            if !val.is_one() {
                prod *= val;
            }
        }
        for (v, w) in inst.weights().iter().enumerate() {
            let val = w.get(x >> v & 1 == 1);
            if val.is_zero() {
                continue 'configs;
            }
            if !val.is_one() {
                prod *= val;
            }
        }
        total += prod;
    }
    Ok(total)
}

#[derive(Clone, Debug)]
struct Factor {
    vars: Vec<usize>,
    table: Vec<Rational>,
}

impl Factor {
    fn value(&self, assignment: impl Fn(usize) -> bool) -> &Rational {
        let idx = self
            .vars
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &v)| acc | (assignment(v) as usize) << j);
        &self.table[idx]
    }
}

/// Exact `Z` by sum-product variable elimination with a greedy
/// smallest-neighbourhood order. Independent of [`brute_force_z`] and usable
/// on large instances of small treewidth.
pub fn exact_z(inst: &Instance) -> Result<Rational> {
    let n = inst.num_vars();
    let mut factors: Vec<Option<Factor>> = Vec::new();
    for atom in inst.atoms() {
        let sig = inst.atom_signature(atom);
        let vars: Vec<usize> = atom.scope.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let table = (0..1u64 << vars.len())
            .map(|y| {
                let at = |v: usize| y >> vars.iter().position(|&u| u == v).unwrap() & 1 == 1;
                let idx = atom
                    .scope
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, &v)| acc | (at(v) as u64) << j);
                sig.value(idx).clone()
            })
            .collect();
        factors.push(Some(Factor { vars, table }));
    }
    for (v, w) in inst.weights().iter().enumerate() {
        if !w.is_unit() {
            factors.push(Some(Factor {
                vars: vec![v],
                table: vec![w.w0.clone(), w.w1.clone()],
            }));
        }
    }
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, f) in factors.iter().enumerate() {
        for &v in &f.as_ref().unwrap().vars {
            touching[v].push(i);
        }
    }
    let mut scalar = Rational::one();
    let mut alive = vec![true; n];
    for _ in 0..n {
        let neighbourhood = |v: usize, factors: &[Option<Factor>]| -> BTreeSet<usize> {
            touching[v]
                .iter()
                .filter_map(|&i| factors[i].as_ref())
                .flat_map(|f| f.vars.iter().copied())
                .filter(|&u| u != v)
                .collect()
        };
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (neighbourhood(v, &factors).len(), v))
            .expect("a live variable remains");
        alive[v] = false;
        let rest: Vec<usize> = neighbourhood(v, &factors).into_iter().collect();
        if rest.len() > ELIMINATION_WIDTH_CAP {
            return Err(Error::SizeCap {
                what: "elimination width",
                size: rest.len(),
                cap: ELIMINATION_WIDTH_CAP,
            });
        }
        let bucket: Vec<Factor> = touching[v]
            .iter()
            .filter_map(|&i| factors[i].take())
            .collect();
        if bucket.is_empty() {
            scalar *= Rational::from_integer(2.into());
            continue;
        }
        let table: Vec<Rational> = (0..1u64 << rest.len())
            .map(|y| {
                let mut sum = Rational::zero();
                for xv in [false, true] {
                    let at = |u: usize| {
                        if u == v {
                            xv
                        } else {
                            y >> rest.iter().position(|&r| r == u).unwrap() & 1 == 1
                        }
                    };
                    let mut prod = Rational::one();
                    for f in &bucket {
                        let val = f.value(at);
                        if val.is_zero() {
                            prod = Rational::zero();
                            break;
                        }
                        prod *= val;
                    }
                    sum += prod;
                }
                sum
            })
            .collect();
        if rest.is_empty() {
            scalar *= &table[0];
            continue;
        }
        let id = factors.len();
        for &u in &rest {
            touching[u].push(id);
        }
        factors.push(Some(Factor { vars: rest, table }));
    }
    for f in factors.into_iter().flatten() {
        debug_assert!(f.vars.is_empty());
        scalar *= &f.table[0];
    }
    Ok(scalar)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    WeightedNeqConj,
    BasicallyBinaryDeg2,
    BruteForce,
    Elimination,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::WeightedNeqConj => "weighted-neq-conj",
            Method::BasicallyBinaryDeg2 => "basically-binary-deg2",
            Method::BruteForce => "brute-force",
            Method::Elimination => "variable-elimination",
        }
    }
}

/// The fastest applicable exact evaluator.
pub fn eval_auto(inst: &Instance) -> Result<(Rational, Method)> {
    if let Ok(z) = eval_weighted_neq_conj(inst) {
        return Ok((z, Method::WeightedNeqConj));
    }
    if let Ok(z) = eval_basically_binary_deg2(inst) {
        return Ok((z, Method::BasicallyBinaryDeg2));
    }
    if inst.num_vars() <= 16 {
        return Ok((brute_force_z(inst)?, Method::BruteForce));
    }
    Ok((exact_z(inst)?, Method::Elimination))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::int;
    use crate::algebra::{library, Weight};

    fn nand_triangle() -> Instance {
        let mut b = Instance::builder();
        b.signature("NAND", library::nand());
        for v in ["a", "b", "c"] {
            b.unit_var(v);
        }
        for (x, y) in [("a", "b"), ("b", "c"), ("c", "a")] {
            b.atom("NAND", &[x, y]).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(brute_force_z(&Instance::builder().build().unwrap()).unwrap(), int(1));
        let mut b = Instance::builder();
        b.var("v", Weight::new(int(1), int(2)));
        assert_eq!(brute_force_z(&b.build().unwrap()).unwrap(), int(3));
        assert_eq!(brute_force_z(&nand_triangle()).unwrap(), int(4));
        assert_eq!(exact_z(&nand_triangle()).unwrap(), int(4));
    }

    #[test]
    fn auto_routes() {
        let (z, m) = eval_auto(&nand_triangle()).unwrap();
        assert_eq!(z, int(4));
        assert_eq!(m, Method::BasicallyBinaryDeg2);
    }
}
