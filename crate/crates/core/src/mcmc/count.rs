use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::chain::Chain;
use super::{check_applicable, mixing_time, ChainParams};
use crate::algebra::Instance;
use crate::error::{Error, Result};

/// Samples per ratio are `⌈SAMPLE_FACTOR · n / ε²⌉`. This is a tuning
/// constant chosen for Rao-Blackwellised estimates.
pub const SAMPLE_FACTOR: f64 = 8.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub state: Vec<bool>,
    pub params: ChainParams,
}

/// An approximation of `Z` with the parameters that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub ln_value: f64,
    pub params: ChainParams,
    /// Variables sampled through the telescoping product.
    pub ratios: usize,
    pub samples_per_ratio: u64,
    /// Burn-in of the first (largest) chain.
    pub burn_in: u64,
    pub total_steps: u64,
}

fn prepinned(chain: &Chain) -> Result<Option<(Vec<bool>, Vec<usize>)>> {
    let mut state = vec![false; chain.num_vars()];
    let mut free = Vec::new();
    for v in 0..chain.num_vars() {
        match chain.forced(v) {
            Ok(Some(b)) => state[v] = b,
            Ok(None) => free.push(v),
            Err(_) => return Ok(None),
        }
    }
    Ok(Some((state, free)))
}

/// Runs the chain for `T` steps from the all-zero configuration (with
/// forced variables set) and returns the final state.
pub fn fpaus(inst: &Instance, epsilon: f64, seed: u64) -> Result<Sample> {
    let params = check_applicable(inst, epsilon, seed)?;
    let chain = Chain::new(inst);
    let (mut state, free) = prepinned(&chain)?
        .ok_or_else(|| Error::Precondition("a variable has weight (0,0), so Z = 0".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..chain.num_vars()).collect();
    if !free.is_empty() {
        chain.run(&mut state, &all, params.t, &mut rng)?;
    }
    Ok(Sample { state, params })
}

/// Estimates `Z` by pinning the free variables one at a time to their
/// majority value and multiplying the estimated marginals.
pub fn fpras(inst: &Instance, epsilon: f64, seed: u64) -> Result<Estimate> {
    let params = check_applicable(inst, epsilon, seed)?;
    let chain = Chain::new(inst);
    let Some((mut state, order)) = prepinned(&chain)? else {
        return Ok(Estimate {
            value: 0.0,
            ln_value: f64::NEG_INFINITY,
            params,
            ratios: 0,
            samples_per_ratio: 0,
            burn_in: 0,
            total_steps: 0,
        });
    };
    let n = order.len();
    let samples = if n == 0 {
        0
    } else {
        (SAMPLE_FACTOR * n as f64 / (epsilon * epsilon)).ceil() as u64
    };
    let eps_ratio = epsilon / (2.0 * n.max(1) as f64);
    let mut ln_ratios = 0.0;
    let mut total_steps = 0u64;
    let mut burn_in = 0u64;
    for (i, &v) in order.iter().enumerate() {
        let free = &order[i..];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let t = mixing_time(free.len(), eps_ratio, params.c);
        if i == 0 {
            burn_in = t;
        }
        chain.run(&mut state, free, t, &mut rng)?;
        total_steps += t;
        let mut sum = 0.0;
        for _ in 0..samples {
            chain.run(&mut state, free, free.len() as u64, &mut rng)?;
            total_steps += free.len() as u64;
            sum += chain
                .conditional(&state, v)
                .ok_or_else(|| Error::Numeric("vanishing conditional".into()))?;
        }
        let p1 = sum / samples as f64;
        let (value, ratio) = if p1 >= 0.5 { (true, p1) } else { (false, 1.0 - p1) };
        if ratio <= 0.0 {
            return Err(Error::Numeric("ratio estimate is zero".into()));
        }
        state[v] = value;
        ln_ratios += ratio.ln();
    }
    let ln_value = chain.weight(&state).ln() - ln_ratios;
    Ok(Estimate {
        value: ln_value.exp(),
        ln_value,
        params,
        ratios: n,
        samples_per_ratio: samples,
        burn_in,
        total_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::{int, ratio, to_f64};
    use crate::algebra::{Signature, Weight};
    use crate::eval::brute_force_z;

    fn ring(n: usize, values: [i64; 4]) -> Instance {
        let mut b = Instance::builder();
        b.signature("F", Signature::numbered(values.iter().map(|&v| ratio(v, 100)).collect()).unwrap());
        let vars: Vec<usize> = (0..n)
            .map(|i| b.var(format!("x{i}"), Weight::new(int(1), ratio(i as i64 + 1, 3))))
            .collect();
        for i in 0..n {
            b.atom_idx("F", vec![vars[i], vars[(i + 1) % n]]);
        }
        b.build().unwrap()
    }

    #[test]
    fn empty_instance_is_one() {
        let inst = Instance::builder().build().unwrap();
        let e = fpras(&inst, 0.1, 0).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.ratios, 0);
    }

    #[test]
    fn single_free_variable() {
        let mut b = Instance::builder();
        b.var("x", Weight::unit());
        let e = fpras(&b.build().unwrap(), 0.1, 3).unwrap();
        assert!((e.ln_value - 2f64.ln()).abs() <= 0.1);
    }

    #[test]
    fn zero_weight_pair_gives_zero() {
        let mut b = Instance::builder();
        b.var("x", Weight::new(int(0), int(0)));
        b.var("y", Weight::unit());
        assert_eq!(fpras(&b.build().unwrap(), 0.1, 0).unwrap().value, 0.0);
    }

    #[test]
    fn ring_estimate_close() {
        let inst = ring(8, [100, 110, 105, 120]);
        let z = to_f64(&brute_force_z(&inst).unwrap());
        let hits = (0..10)
            .filter(|&s| (fpras(&inst, 0.1, s).unwrap().value / z).ln().abs() <= 0.1)
            .count();
        assert!(hits >= 8, "{hits}");
    }

    #[test]
    fn deterministic_under_seed() {
        let inst = ring(5, [100, 110, 105, 120]);
        assert_eq!(fpaus(&inst, 0.1, 11).unwrap(), fpaus(&inst, 0.1, 11).unwrap());
        assert_eq!(fpras(&inst, 0.2, 11).unwrap(), fpras(&inst, 0.2, 11).unwrap());
    }

    #[test]
    fn forced_variables_respected() {
        let mut b = Instance::builder();
        b.signature("F", Signature::numbered(vec![int(1), ratio(6, 5), int(1), int(1)]).unwrap());
        let x = b.var("x", Weight::new(int(0), int(2)));
        let y = b.var("y", Weight::unit());
        b.atom_idx("F", vec![x, y]);
        let inst = b.build().unwrap();
        assert!(fpaus(&inst, 0.1, 1).unwrap().state[0]);
        let e = fpras(&inst, 0.1, 1).unwrap();
        assert!((e.value - 2.0 * 2.2).abs() < 0.3, "{}", e.value);
    }

    #[test]
    fn fpaus_distribution_close_to_pi() {
        let inst = ring(3, [100, 130, 110, 150]);
        let pi = super::super::stationary_distribution(&inst).unwrap();
        let runs = 20_000u64;
        let mut counts = [0usize; 8];
        for s in 0..runs {
            let st = fpaus(&inst, 0.1, s).unwrap().state;
            counts[st.iter().enumerate().fold(0, |a, (i, &b)| a | (b as usize) << i)] += 1;
        }
        let tv: f64 = (0..8).map(|x| (counts[x] as f64 / runs as f64 - pi[x]).abs()).sum::<f64>() / 2.0;
        assert!(tv <= 0.2, "{tv}");
    }

    #[test]
    fn out_of_regime_rejected() {
        assert!(fpras(&ring(4, [100, 300, 100, 100]), 0.1, 0).is_err());
    }
}
