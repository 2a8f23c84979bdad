use rand::Rng;

use crate::algebra::num::to_f64;
use crate::algebra::Instance;
use crate::error::{Error, Result};
use crate::eval::brute_force_z;

/// Largest instance for which the dense transition matrix is built.
pub const TRANSITION_MATRIX_CAP: usize = 10;

struct LocalAtom {
    scope: Vec<usize>,
    table: Vec<f64>,
}

/// The instance in the form the chain reads: `f64` tables plus, for each
/// variable, the atoms it occurs in.
pub struct Chain {
    atoms: Vec<LocalAtom>,
    incident: Vec<Vec<usize>>,
    weights: Vec<[f64; 2]>,
}

impl Chain {
    pub fn new(inst: &Instance) -> Chain {
        let atoms: Vec<LocalAtom> = inst
            .atoms()
            .iter()
            .map(|a| LocalAtom {
                scope: a.scope.clone(),
                table: inst.atom_signature(a).table().iter().map(to_f64).collect(),
            })
            .collect();
        let mut incident = vec![Vec::new(); inst.num_vars()];
        for (a, atom) in atoms.iter().enumerate() {
            for &v in &atom.scope {
                if incident[v].last() != Some(&a) {
                    incident[v].push(a);
                }
            }
        }
        let weights = inst
            .weights()
            .iter()
            .map(|w| [to_f64(&w.w0), to_f64(&w.w1)])
            .collect();
        Chain {
            atoms,
            incident,
            weights,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn weight_pair(&self, v: usize) -> [f64; 2] {
        self.weights[v]
    }

    /// The value a variable is forced to by a zero weight component, or
    /// `Err` when both components vanish.
    pub fn forced(&self, v: usize) -> Result<Option<bool>> {
        match self.weights[v] {
            [w0, w1] if w0 == 0.0 && w1 == 0.0 => {
                Err(Error::Precondition(format!("variable {v} has weight (0,0)")))
            }
            [w0, _] if w0 == 0.0 => Ok(Some(true)),
            [_, w1] if w1 == 0.0 => Ok(Some(false)),
            _ => Ok(None),
        }
    }

    fn local_weight(&self, state: &[bool], v: usize, b: bool) -> f64 {
        let mut w = self.weights[v][b as usize];
        for &a in &self.incident[v] {
            let atom = &self.atoms[a];
            let idx = atom.scope.iter().enumerate().fold(0usize, |acc, (j, &u)| {
                let bit = if u == v { b } else { state[u] };
                acc | (bit as usize) << j
            });
            w *= atom.table[idx];
        }
        w
    }

    /// `P(v = 1 | rest)` from the atoms incident to `v`, or `None` when both
    /// branch weights vanish.
    pub fn conditional(&self, state: &[bool], v: usize) -> Option<f64> {
        let w0 = self.local_weight(state, v, false);
        let w1 = self.local_weight(state, v, true);
        let total = w0 + w1;
        (total > 0.0).then(|| w1 / total)
    }

    pub fn heat_bath_step<R: Rng + ?Sized>(&self, state: &mut [bool], v: usize, rng: &mut R) -> Result<()> {
        let p = self
            .conditional(state, v)
            .ok_or_else(|| Error::Precondition(format!("both branch weights vanish at variable {v}")))?;
        state[v] = rng.gen::<f64>() < p;
        Ok(())
    }

    /// `steps` heat-bath updates at variables drawn uniformly from `free`.
    pub fn run<R: Rng + ?Sized>(&self, state: &mut [bool], free: &[usize], steps: u64, rng: &mut R) -> Result<()> {
        if free.is_empty() {
            return Ok(());
        }
        for _ in 0..steps {
            let v = free[rng.gen_range(0..free.len())];
            self.heat_bath_step(state, v, rng)?;
        }
        Ok(())
    }

    /// One step of the coupling that shares the chosen variable and the
    /// uniform threshold between the two copies.
    pub fn coupled_step<R: Rng + ?Sized>(&self, x: &mut [bool], y: &mut [bool], rng: &mut R) -> Result<()> {
        let v = rng.gen_range(0..self.num_vars());
        let r = rng.gen::<f64>();
        let px = self.conditional(x, v).ok_or_else(|| Error::Precondition("vanishing branch".into()))?;
        let py = self.conditional(y, v).ok_or_else(|| Error::Precondition("vanishing branch".into()))?;
        x[v] = r < px;
        y[v] = r < py;
        Ok(())
    }

    /// Exact `E[d(X1, Y1)]` after one coupled step from `x`, `y`.
    pub fn coupled_expected_distance(&self, x: &[bool], y: &[bool]) -> f64 {
        let n = self.num_vars();
        let dist = x.iter().zip(y).filter(|(a, b)| a != b).count() as f64;
        let mut total = 0.0;
        for v in 0..n {
            let px = self.conditional(x, v).unwrap_or(0.0);
            let py = self.conditional(y, v).unwrap_or(0.0);
            let before = (x[v] != y[v]) as u8 as f64;
            total += dist - before + (px - py).abs();
        }
        total / n as f64
    }

    /// `wt(state)` in `f64`.
    pub fn weight(&self, state: &[bool]) -> f64 {
        let mut w: f64 = state
            .iter()
            .zip(&self.weights)
            .map(|(&b, pair)| pair[b as usize])
            .product();
        for atom in &self.atoms {
            let idx = atom
                .scope
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &u)| acc | (state[u] as usize) << j);
            w *= atom.table[idx];
        }
        w
    }
}

fn bits(x: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| x >> i & 1 == 1).collect()
}

fn index(state: &[bool]) -> usize {
    state.iter().enumerate().fold(0, |acc, (i, &b)| acc | (b as usize) << i)
}

/// The single-site transition matrix `P = (1/n) Σ_v P_v`, indexed by
/// configurations as bitmasks. Rows of states whose update at `v` has no
/// mass stay put.
pub fn transition_matrix(inst: &Instance) -> Result<Vec<Vec<f64>>> {
    let n = inst.num_vars();
    if n > TRANSITION_MATRIX_CAP {
        return Err(Error::SizeCap {
            what: "variables",
            size: n,
            cap: TRANSITION_MATRIX_CAP,
        });
    }
    let chain = Chain::new(inst);
    let size = 1usize << n;
    let mut p = vec![vec![0.0; size]; size];
    if n == 0 {
        p[0][0] = 1.0;
        return Ok(p);
    }
    let share = 1.0 / n as f64;
    for (x, row) in p.iter_mut().enumerate() {
        let state = bits(x, n);
        for v in 0..n {
            match chain.conditional(&state, v) {
                Some(p1) => {
                    let mut s = state.clone();
                    s[v] = false;
                    row[index(&s)] += share * (1.0 - p1);
                    s[v] = true;
                    row[index(&s)] += share * p1;
                }
                None => row[x] += share,
            }
        }
    }
    Ok(p)
}

/// `π(x) = wt(x) / Z`, computed exactly and then rounded.
pub fn stationary_distribution(inst: &Instance) -> Result<Vec<f64>> {
    let n = inst.num_vars();
    if n > TRANSITION_MATRIX_CAP {
        return Err(Error::SizeCap {
            what: "variables",
            size: n,
            cap: TRANSITION_MATRIX_CAP,
        });
    }
    let z = brute_force_z(inst)?;
    if z == crate::algebra::num::zero() {
        return Err(Error::Precondition("partition function is zero".into()));
    }
    Ok((0..1u64 << n).map(|x| to_f64(&(inst.config_weight(x) / &z))).collect())
}

/// `‖πP − π‖_∞`.
pub fn stationarity_error(inst: &Instance) -> Result<f64> {
    let p = transition_matrix(inst)?;
    let pi = stationary_distribution(inst)?;
    let mut worst: f64 = 0.0;
    for y in 0..pi.len() {
        let flow: f64 = (0..pi.len()).map(|x| pi[x] * p[x][y]).sum();
        worst = worst.max((flow - pi[y]).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::{int, ratio};
    use crate::algebra::{Signature, Weight};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance(values: &[i64], scopes: &[&[usize]], weights: &[(i64, i64)]) -> Instance {
        let mut b = Instance::builder();
        b.signature("F", Signature::numbered(values.iter().map(|&v| ratio(v, 10)).collect()).unwrap());
        for (i, &(w0, w1)) in weights.iter().enumerate() {
            b.var(format!("x{i}"), Weight::new(int(w0), int(w1)));
        }
        for scope in scopes {
            b.atom_idx("F", scope.to_vec());
        }
        b.build().unwrap()
    }

    #[test]
    fn symmetric_conditional_is_half() {
        let inst = instance(&[10, 10, 10, 10], &[&[0, 1]], &[(1, 1), (1, 1)]);
        let chain = Chain::new(&inst);
        assert_eq!(chain.conditional(&[false, true], 0), Some(0.5));
    }

    #[test]
    fn single_variable_weight() {
        let mut b = Instance::builder();
        b.var("x", Weight::new(int(1), int(3)));
        let chain = Chain::new(&b.build().unwrap());
        assert_eq!(chain.conditional(&[false], 0), Some(0.75));
    }

    #[test]
    fn empirical_one_step_marginal() {
        let inst = instance(&[10, 12, 11, 13], &[&[0, 1], &[1, 2]], &[(1, 2), (3, 1), (1, 1)]);
        let chain = Chain::new(&inst);
        let start = [true, false, true];
        let p = chain.conditional(&start, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 100_000;
        let mut ones = 0;
        for _ in 0..draws {
            let mut s = start;
            chain.heat_bath_step(&mut s, 1, &mut rng).unwrap();
            ones += s[1] as usize;
        }
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((ones as f64 / draws as f64 - p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn heat_bath_is_stationary() {
        let inst = instance(&[10, 12, 11, 13], &[&[0, 1], &[1, 2], &[2, 2]], &[(1, 2), (3, 1), (0, 1)]);
        assert!(stationarity_error(&inst).unwrap() <= 1e-12);
    }

    #[test]
    fn rows_are_stochastic() {
        let inst = instance(&[10, 12, 11, 13], &[&[0, 1]], &[(1, 2), (1, 0)]);
        for row in transition_matrix(&inst).unwrap() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn forced_values() {
        let inst = instance(&[10, 10, 10, 10], &[&[0, 1]], &[(0, 1), (2, 0)]);
        let chain = Chain::new(&inst);
        assert_eq!(chain.forced(0).unwrap(), Some(true));
        assert_eq!(chain.forced(1).unwrap(), Some(false));
        let inst = instance(&[10, 10, 10, 10], &[&[0, 1]], &[(0, 0), (1, 1)]);
        assert!(Chain::new(&inst).forced(0).is_err());
    }

    #[test]
    fn coupled_distance_matches_simulation() {
        let inst = instance(&[10, 15, 12, 18], &[&[0, 1], &[1, 2], &[0, 2]], &[(1, 1), (1, 2), (2, 1)]);
        let chain = Chain::new(&inst);
        let (x0, y0) = ([true, false, false], [true, true, false]);
        let exact = chain.coupled_expected_distance(&x0, &y0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let trials = 50_000;
        let mut total = 0usize;
        for _ in 0..trials {
            let (mut x, mut y) = (x0, y0);
            chain.coupled_step(&mut x, &mut y, &mut rng).unwrap();
            total += x.iter().zip(&y).filter(|(a, b)| a != b).count();
        }
        assert!((total as f64 / trials as f64 - exact).abs() < 0.02);
    }
}
