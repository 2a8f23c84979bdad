//! Seeded random relations, signatures and instances for property tests,
//! the check suites and the acceptance run.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::library::at_most_one;
use crate::algebra::num::{int, ratio};
use crate::algebra::varset::gather;
use crate::algebra::{DegreePolicy, Instance, Rational, Signature, VarSet, Weight};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A relation containing each configuration with probability `density`.
pub fn random_relation<R: Rng>(rng: &mut R, k: usize, density: f64) -> Signature {
    let support: Vec<u64> = (0..1u64 << k).filter(|_| rng.gen_bool(density)).collect();
    Signature::relation(VarSet::numbered(k), support).expect("arity within cap")
}

/// `p/q` with `p ∈ 0..=max_num`, `q ∈ 1..=4`.
pub fn random_rational<R: Rng>(rng: &mut R, max_num: i64) -> Rational {
    ratio(rng.gen_range(0..=max_num), rng.gen_range(1..=4))
}

pub fn random_positive_rational<R: Rng>(rng: &mut R, max_num: i64) -> Rational {
    ratio(rng.gen_range(1..=max_num), rng.gen_range(1..=4))
}

/// Each entry is zero with probability `zero_prob`, otherwise a small
/// positive rational. Never identically zero.
pub fn random_signature<R: Rng>(rng: &mut R, k: usize, zero_prob: f64) -> Signature {
    loop {
        let table: Vec<Rational> = (0..1usize << k)
            .map(|_| {
                if rng.gen_bool(zero_prob) {
                    int(0)
                } else {
                    random_positive_rational(rng, 6)
                }
            })
            .collect();
        let f = Signature::numbered(table).expect("arity within cap");
        if !f.is_zero() {
            return f;
        }
    }
}

/// Mostly positive weights, with a zero component one time in `zero_one_in`.
pub fn random_weight<R: Rng>(rng: &mut R, zero_one_in: u32) -> Weight {
    let mut w = Weight::new(random_positive_rational(rng, 4), random_positive_rational(rng, 4));
    if zero_one_in > 0 && rng.gen_ratio(1, zero_one_in) {
        if rng.gen_bool(0.5) {
            w.w0 = int(0);
        } else {
            w.w1 = int(0);
        }
    }
    w
}

/// Partitions `0..k` into random blocks of size at most `max_block`.
fn random_blocks<R: Rng>(rng: &mut R, k: usize, max_block: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let mut blocks = Vec::new();
    let mut rest = &order[..];
    while !rest.is_empty() {
        let size = rng.gen_range(1..=max_block.min(rest.len()));
        let mut block = rest[..size].to_vec();
        block.sort_unstable();
        blocks.push(block);
        rest = &rest[size..];
    }
    blocks
}

fn product_of_blocks(k: usize, blocks: &[(Vec<usize>, Vec<Rational>)]) -> Signature {
    Signature::from_fn(VarSet::numbered(k), |x| {
        blocks
            .iter()
            .map(|(pos, table)| table[gather(x, pos) as usize].clone())
            .product()
    })
    .expect("arity within cap")
}

/// A product of blocks each supported on a single configuration or a
/// complementary pair.
pub fn random_wnc_signature<R: Rng>(rng: &mut R, k: usize) -> Signature {
    let blocks: Vec<(Vec<usize>, Vec<Rational>)> = random_blocks(rng, k, 3)
        .into_iter()
        .map(|pos| {
            let s = pos.len();
            let full = (1u64 << s) - 1;
            let z = rng.gen_range(0..=full);
            let mut table = vec![int(0); 1 << s];
            table[z as usize] = random_positive_rational(rng, 5);
            if rng.gen_bool(0.7) {
                table[(z ^ full) as usize] = random_positive_rational(rng, 5);
            }
            (pos, table)
        })
        .collect();
    product_of_blocks(k, &blocks)
}

/// A product of arbitrary unary and binary blocks.
pub fn random_bb_signature<R: Rng>(rng: &mut R, k: usize) -> Signature {
    let blocks: Vec<(Vec<usize>, Vec<Rational>)> = random_blocks(rng, k, 2)
        .into_iter()
        .map(|pos| {
            let f = random_signature(rng, pos.len(), 0.3);
            (pos, f.table().to_vec())
        })
        .collect();
    product_of_blocks(k, &blocks)
}

fn name_family(family: &[Signature]) -> Vec<(String, &Signature)> {
    family.iter().enumerate().map(|(i, f)| (format!("F{i}"), f)).collect()
}

/// `n_atoms` atoms drawn from `family` with uniformly random scopes over
/// `n_vars` variables (repetitions allowed).
pub fn random_instance<R: Rng>(
    rng: &mut R,
    family: &[Signature],
    n_vars: usize,
    n_atoms: usize,
    zero_weight_one_in: u32,
) -> Instance {
    let named = name_family(family);
    let mut b = Instance::builder();
    for (name, f) in &named {
        b.signature(name.clone(), (*f).clone());
    }
    for v in 0..n_vars {
        b.var(format!("v{v}"), random_weight(rng, zero_weight_one_in));
    }
    if n_vars > 0 {
        for _ in 0..n_atoms {
            let (name, f) = named.choose(rng).expect("nonempty family");
            let scope = (0..f.arity()).map(|_| rng.gen_range(0..n_vars)).collect();
            b.atom_idx(name, scope);
        }
    }
    b.build().expect("generated instance is valid")
}

/// Like [`random_instance`] but no variable is used more than `max_degree`
/// times; atoms that cannot be placed are skipped. The policy is
/// `AtMost(max_degree)`.
pub fn random_degree_bounded_instance<R: Rng>(
    rng: &mut R,
    family: &[Signature],
    n_vars: usize,
    n_atoms: usize,
    max_degree: usize,
    zero_weight_one_in: u32,
) -> Instance {
    let named = name_family(family);
    let mut b = Instance::builder();
    for (name, f) in &named {
        b.signature(name.clone(), (*f).clone());
    }
    for v in 0..n_vars {
        b.var(format!("v{v}"), random_weight(rng, zero_weight_one_in));
    }
    let mut degree = vec![0usize; n_vars];
    for _ in 0..n_atoms {
        let (name, f) = named.choose(rng).expect("nonempty family");
        let mut open: Vec<usize> = (0..n_vars).flat_map(|v| std::iter::repeat_n(v, max_degree - degree[v])).collect();
        if open.len() < f.arity() {
            continue;
        }
        open.shuffle(rng);
        let scope: Vec<usize> = open[..f.arity()].to_vec();
        for &v in &scope {
            degree[v] += 1;
        }
        b.atom_idx(name, scope);
    }
    b.policy(DegreePolicy::AtMost(max_degree));
    b.build().expect("generated instance is valid")
}

/// Every variable occurs exactly twice: atom slots are paired at random.
/// An atom is dropped when the slot count would be odd.
pub fn random_eq2_instance<R: Rng>(rng: &mut R, family: &[Signature], n_atoms: usize, zero_weight_one_in: u32) -> Instance {
    let named = name_family(family);
    let mut chosen: Vec<usize> = (0..n_atoms).map(|_| rng.gen_range(0..named.len())).collect();
    while chosen.iter().map(|&i| named[i].1.arity()).sum::<usize>() % 2 == 1 {
        chosen.pop();
    }
    let mut slots: Vec<(usize, usize)> = chosen
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| (0..named[i].1.arity()).map(move |p| (a, p)))
        .collect();
    slots.shuffle(rng);
    let mut b = Instance::builder();
    for (name, f) in &named {
        b.signature(name.clone(), (*f).clone());
    }
    let mut scopes: Vec<Vec<usize>> = chosen.iter().map(|&i| vec![0; named[i].1.arity()]).collect();
    for (v, pair) in slots.chunks(2).enumerate() {
        let var = b.var(format!("v{v}"), random_weight(rng, zero_weight_one_in));
        for &(a, p) in pair {
            scopes[a][p] = var;
        }
    }
    for (scope, &i) in scopes.into_iter().zip(&chosen) {
        b.atom_idx(&named[i].0, scope);
    }
    b.policy(DegreePolicy::Exactly(2));
    b.build().expect("generated instance is valid")
}

/// A degree-2 instance over `AMO_3` whose variables are edges between atom
/// slots; weights are `(1, w)` with an occasional `(0, 1)`.
pub fn random_monomer_dimer_instance<R: Rng>(rng: &mut R, n_atoms: usize) -> Instance {
    let n_atoms = n_atoms + n_atoms % 2;
    let mut slots: Vec<(usize, usize)> = (0..n_atoms).flat_map(|a| (0..3).map(move |p| (a, p))).collect();
    slots.shuffle(rng);
    let mut b = Instance::builder();
    b.signature("AMO3", at_most_one(3));
    let mut scopes = vec![vec![0usize; 3]; n_atoms];
    for (v, pair) in slots.chunks(2).enumerate() {
        let w = if rng.gen_ratio(1, 12) {
            Weight::new(int(0), int(1))
        } else {
            Weight::new(int(1), random_rational(rng, 3))
        };
        let var = b.var(format!("e{v}"), w);
        for &(a, p) in pair {
            scopes[a][p] = var;
        }
    }
    for scope in scopes {
        b.atom_idx("AMO3", scope);
    }
    b.policy(DegreePolicy::Exactly(2));
    b.build().expect("generated instance is valid")
}

/// An instance whose atom values lie in `[1, 1 + spread]`, each variable
/// used at most `max_degree` times, and positive weights.
pub fn random_in_regime_instance<R: Rng>(
    rng: &mut R,
    n_vars: usize,
    n_atoms: usize,
    max_arity: usize,
    max_degree: usize,
    spread: f64,
) -> Instance {
    let steps = 100i64;
    let top = (spread * steps as f64).floor() as i64;
    let family: Vec<Signature> = (1..=max_arity)
        .map(|k| {
            Signature::numbered((0..1usize << k).map(|_| ratio(steps + rng.gen_range(0..=top), steps)).collect())
                .expect("arity within cap")
        })
        .collect();
    random_degree_bounded_instance(rng, &family, n_vars, n_atoms, max_degree, 0)
}

/// The same instance without the variables no atom uses.
pub fn drop_isolated(inst: &Instance) -> Instance {
    let degrees = inst.degrees();
    let mut b = Instance::builder();
    for (name, f) in inst.signatures() {
        b.signature(name.clone(), f.clone());
    }
    let mut index = vec![usize::MAX; inst.num_vars()];
    for (v, &d) in degrees.iter().enumerate() {
        if d > 0 {
            index[v] = b.var(inst.vars().name(v), inst.weight(v).clone());
        }
    }
    for atom in inst.atoms() {
        b.atom_idx(&atom.sig, atom.scope.iter().map(|&v| index[v]).collect());
    }
    b.policy(inst.policy());
    b.build().expect("same atoms, same policy")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{is_basically_binary, is_weighted_neq_conj};

    #[test]
    fn class_generators_land_in_class() {
        let mut r = rng(1);
        for k in 1..=5 {
            for _ in 0..20 {
                assert!(is_weighted_neq_conj(&random_wnc_signature(&mut r, k)).member);
                assert!(is_basically_binary(&random_bb_signature(&mut r, k)).member);
            }
        }
    }

    #[test]
    fn eq2_degrees() {
        let mut r = rng(2);
        let family = [random_signature(&mut r, 3, 0.2), random_signature(&mut r, 2, 0.2)];
        for _ in 0..20 {
            let inst = random_eq2_instance(&mut r, &family, 5, 5);
            assert!(inst.degrees().iter().all(|&d| d == 2));
        }
    }

    #[test]
    fn degree_bound_respected() {
        let mut r = rng(3);
        let inst = random_in_regime_instance(&mut r, 8, 12, 3, 3, 0.2);
        assert!(inst.max_degree() <= 3);
        assert!(crate::mcmc::check_applicable(&inst, 0.1, 0).is_ok());
    }

    #[test]
    fn isolated_dropped() {
        let inst = random_instance(&mut rng(5), &[crate::algebra::library::pin0()], 6, 2, 0);
        let trimmed = drop_isolated(&inst);
        assert!(trimmed.num_vars() <= 2);
        assert!(trimmed.degrees().iter().all(|&d| d > 0));
    }

    #[test]
    fn reproducible() {
        let a = random_instance(&mut rng(4), &[crate::algebra::library::nand()], 5, 6, 4);
        let b = random_instance(&mut rng(4), &[crate::algebra::library::nand()], 5, 6, 4);
        assert_eq!(a, b);
    }
}
