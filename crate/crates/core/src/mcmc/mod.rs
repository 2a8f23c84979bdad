//! Glauber heat-bath sampling and approximate counting for instances whose
//! atom values lie in `[1, (D+1)/(D-1))` with `D = d(k-1)`.
//!
//! Chain arithmetic is `f64`; the applicability check itself is exact.

mod chain;
mod count;

use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::num::{int, to_f64};
use crate::algebra::{Instance, Rational};
use crate::error::{Error, Result};

pub use chain::{stationarity_error, stationary_distribution, transition_matrix, Chain, TRANSITION_MATRIX_CAP};
pub use count::{fpaus, fpras, Estimate, Sample, SAMPLE_FACTOR};

/// Parameters of the heat-bath chain for one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainParams {
    pub d: usize,
    pub k: usize,
    /// Largest atom value.
    pub m: f64,
    /// Exclusive upper bound on atom values, `None` when `d(k-1) <= 1`.
    pub bound: Option<Rational>,
    pub c: f64,
    pub beta: f64,
    /// Number of heat-bath steps.
    pub t: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub num_vars: usize,
}

/// `(D+1)/(D-1)` for `D = d(k-1)`; no bound exists when `D <= 1`.
pub fn regime_bound(d: usize, k: usize) -> Option<Rational> {
    let dd = d * k.saturating_sub(1);
    (dd >= 2).then(|| Rational::new((dd as i64 + 1).into(), (dd as i64 - 1).into()))
}

/// `c = 1 - D(M-1)/(M+1)`.
pub fn contraction_constant(d: usize, k: usize, m: &Rational) -> Rational {
    let dd = int((d * k.saturating_sub(1)) as i64);
    Rational::one() - dd * (m - Rational::one()) / (m + Rational::one())
}

/// `T = ⌈ln(n/ε) / ln(1/β)⌉` with `β = 1 - c/n`, and at least one step for
/// a nonempty chain.
pub fn mixing_time(n: usize, epsilon: f64, c: f64) -> u64 {
    if n == 0 {
        return 0;
    }
    let beta = 1.0 - c / n as f64;
    let num = (n as f64 / epsilon).ln();
    if num <= 0.0 || beta <= 0.0 {
        return 1;
    }
    let t = (num / (1.0 / beta).ln()).ceil();
    t.to_u64().unwrap_or(u64::MAX).max(1)
}

/// Checks that every atom value lies in `[1, bound)` for the instance's
/// maximum degree and arity and derives the chain parameters.
pub fn check_applicable(inst: &Instance, epsilon: f64, seed: u64) -> Result<ChainParams> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    let d = inst.max_degree();
    let k = inst.max_arity();
    let bound = regime_bound(d, k);
    let mut m = Rational::one();
    for (a, atom) in inst.atoms().iter().enumerate() {
        for value in inst.atom_signature(atom).table() {
            let below_one = value < &Rational::one();
            let above = bound.as_ref().is_some_and(|b| value >= b);
            if below_one || above {
                return Err(Error::OutOfRegime {
                    atom: a,
                    sig: atom.sig.clone(),
                    value: value.to_string(),
                    bound: bound.as_ref().map_or("inf".into(), |b| b.to_string()),
                    d,
                    k,
                });
            }
            if value > &m {
                m = value.clone();
            }
        }
    }
    let c_exact = contraction_constant(d, k, &m);
    if c_exact <= Rational::zero() {
        return Err(Error::Numeric("contraction constant is not positive".into()));
    }
    let c = to_f64(&c_exact);
    let n = inst.num_vars();
    let beta = if n == 0 { 0.0 } else { 1.0 - c / n as f64 };
    Ok(ChainParams {
        d,
        k,
        m: to_f64(&m),
        bound,
        c,
        beta,
        t: mixing_time(n, epsilon, c),
        epsilon,
        seed,
        num_vars: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::ratio;
    use crate::algebra::{Signature, Weight};

    #[test]
    fn bounds() {
        assert_eq!(regime_bound(2, 2), Some(int(3)));
        assert_eq!(regime_bound(3, 3), Some(ratio(7, 5)));
        assert_eq!(regime_bound(1, 2), None);
        assert_eq!(regime_bound(5, 1), None);
    }

    #[test]
    fn mixing_time_arithmetic() {
        assert_eq!(mixing_time(10, 0.1, 0.5), 90);
        assert_eq!(mixing_time(0, 0.1, 0.5), 0);
        assert_eq!(mixing_time(1, 0.1, 1.0), 1);
    }

    fn path(values: Vec<Rational>, n: usize) -> Instance {
        let mut b = Instance::builder();
        b.signature("F", Signature::numbered(values).unwrap());
        let vars: Vec<usize> = (0..n).map(|i| b.var(format!("x{i}"), Weight::unit())).collect();
        for w in vars.windows(2) {
            b.atom_idx("F", w.to_vec());
        }
        b.build().unwrap()
    }

    #[test]
    fn all_ones_contracts_fully() {
        let p = check_applicable(&path(vec![int(1); 4], 5), 0.1, 0).unwrap();
        assert_eq!((p.d, p.k), (2, 2));
        assert_eq!(p.c, 1.0);
        assert!((p.beta - 0.8).abs() < 1e-15);
    }

    #[test]
    fn bound_is_exclusive() {
        let inst = path(vec![int(1), int(2), int(3), int(1)], 3);
        match check_applicable(&inst, 0.1, 0) {
            Err(Error::OutOfRegime { atom, value, bound, .. }) => {
                assert_eq!((atom, value.as_str(), bound.as_str()), (0, "3", "3"));
            }
            other => panic!("{other:?}"),
        }
        let inst = path(vec![int(1), int(2), ratio(29, 10), int(1)], 3);
        let p = check_applicable(&inst, 0.1, 0).unwrap();
        assert!(p.c > 0.0 && p.c < 0.1);
    }

    #[test]
    fn values_below_one_rejected() {
        let inst = path(vec![int(1), ratio(1, 2), int(1), int(1)], 3);
        assert!(matches!(check_applicable(&inst, 0.1, 0), Err(Error::OutOfRegime { .. })));
        assert!(check_applicable(&inst, 0.0, 0).is_err());
    }
}
