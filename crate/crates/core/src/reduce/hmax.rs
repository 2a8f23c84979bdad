use num_traits::{One, Signed, Zero};

use crate::algebra::num::{pow2, ratio, to_f64};
use crate::algebra::{Instance, Rational, Signature, Weight};
use crate::error::{Error, Result};

use super::{Relation, ReductionCertificate};

fn max_min(values: impl Iterator<Item = Rational>) -> (Rational, Rational) {
    let mut big = Rational::one();
    let mut small = Rational::one();
    for v in values.filter(|v| !v.is_zero()) {
        if v > big {
            big = v.clone();
        }
        if v < small {
            small = v;
        }
    }
    (big, small)
}

/// Replaces the atoms using `name`, whose signature must be `G_{h-max}`, by
/// `G` itself and moves the factor `2^{n·Σ x_i h_i}` into the weights. The
/// corrected value `Z(out) / 2^{nH|I'|}` approximates `Z(in)` within
/// `e^ε`, and falls at or below `m^s/4` exactly when `Z(in) = 0`.
pub fn simulate_hmax(
    inst: &Instance,
    name: &str,
    g: &Signature,
    h: &[i64],
    epsilon: &Rational,
) -> Result<ReductionCertificate> {
    if !epsilon.is_positive() || *epsilon >= ratio(1, 2) {
        return Err(Error::Precondition(format!("epsilon {epsilon} outside (0, 1/2)")));
    }
    if h.len() != g.arity() {
        return Err(Error::ArityMismatch {
            expected: g.arity(),
            found: h.len(),
        });
    }
    let target = inst
        .signature(name)
        .ok_or_else(|| Error::UnknownSignature(name.to_string()))?;
    let g_hmax = g.h_maximize(h)?;
    if target.table() != g_hmax.table() {
        return Err(Error::Precondition(format!("{name} is not the h-maximisation of G")));
    }
    let big_h = g.max_score(h)?;

    let used: Vec<&Signature> = {
        let mut names: Vec<&str> = inst.atoms().iter().map(|a| a.sig.as_str()).collect();
        names.sort();
        names.dedup();
        names.iter().map(|n| inst.signature(n).unwrap()).collect()
    };
    let values = used
        .iter()
        .flat_map(|s| s.table().iter().cloned())
        .chain(g.table().iter().cloned())
        .chain(inst.weights().iter().flat_map(|w| [w.w0.clone(), w.w1.clone()]));
    let (big_m, small_m) = max_min(values);

    let nv = inst.num_vars();
    let replaced: Vec<usize> = (0..inst.atoms().len()).filter(|&i| inst.atoms()[i].sig == name).collect();
    let s = (nv + inst.atoms().len()) as u32;
    let m_s = num_traits::pow(small_m.clone(), s as usize);
    let big_m_s = num_traits::pow(big_m.clone(), s as usize);
    let slack = &m_s * epsilon / Rational::from_integer(4.into());

    let estimate = nv as f64 + s as f64 * to_f64(&big_m).log2() - (to_f64(&m_s) * to_f64(epsilon) / 4.0).log2();
    let mut n = if estimate.is_finite() { estimate.ceil().max(1.0) as u64 } else { 1 };
    let lhs = pow2(nv as i64) * &big_m_s;
    while lhs > pow2(n as i64) * &slack {
        n += 1;
    }

    let mut exponent = vec![0i64; nv];
    for &i in &replaced {
        for (j, &v) in inst.atoms()[i].scope.iter().enumerate() {
            exponent[v] += h[j];
        }
    }
    let weights: Vec<Weight> = inst
        .weights()
        .iter()
        .zip(&exponent)
        .map(|(w, &e)| Weight::new(w.w0.clone(), &w.w1 * pow2(n as i64 * e)))
        .collect();

    let mut b = Instance::builder();
    let mut kept = std::collections::BTreeMap::new();
    for atom in inst.atoms().iter().filter(|a| a.sig != name) {
        kept.insert(atom.sig.clone(), inst.atom_signature(atom).clone());
    }
    let g_name = super::unused_name(&kept, "G");
    for (n, sig) in kept {
        b.signature(n, sig);
    }
    if !replaced.is_empty() {
        b.signature(g_name.clone(), g.clone());
    }
    for (v, w) in inst.vars().names().iter().zip(weights) {
        b.var(v.clone(), w);
    }
    for atom in inst.atoms() {
        let sig = if atom.sig == name { &g_name } else { &atom.sig };
        b.atom_idx(sig, atom.scope.clone());
    }
    b.policy(inst.policy());
    let out = b.build()?;

    let total = n as i64 * big_h * replaced.len() as i64;
    let relation = Relation::Approximate {
        scale: pow2(total),
        threshold: m_s / Rational::from_integer(4.into()),
        n,
        epsilon: epsilon.clone(),
    };
    let note = format!(
        "s = {s}, M = {big_m}, m = {small_m}, H = {big_h}, n = {n}, |I'| = {}",
        replaced.len()
    );
    Ok(ReductionCertificate::new(out, relation).with_note(note))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::library;
    use crate::algebra::num::int;
    use crate::eval::brute_force_z;

    #[test]
    fn neq_as_nand_hmax() {
        let h = [1i64, 1];
        let neq = library::nand().h_maximize(&h).unwrap();
        assert_eq!(neq.table(), library::neq().table());
        let mut b = Instance::builder();
        b.signature("NEQ", neq);
        b.unit_var("a");
        b.unit_var("b");
        b.atom("NEQ", &["a", "b"]).unwrap();
        let inst = b.build().unwrap();
        let cert = simulate_hmax(&inst, "NEQ", &library::nand(), &h, &ratio(1, 10)).unwrap();
        assert_eq!(brute_force_z(&inst).unwrap(), int(2));
        assert!(cert.verify(&inst).unwrap());
    }

    #[test]
    fn zero_instance_below_threshold() {
        let h = [1i64, 1];
        let mut b = Instance::builder();
        b.signature("NEQ", library::nand().h_maximize(&h).unwrap());
        b.signature("EQ_2", library::eq(2));
        b.unit_var("a");
        b.unit_var("b");
        b.atom("NEQ", &["a", "b"]).unwrap();
        b.atom("EQ_2", &["a", "b"]).unwrap();
        let inst = b.build().unwrap();
        assert!(brute_force_z(&inst).unwrap().is_zero());
        let cert = simulate_hmax(&inst, "NEQ", &library::nand(), &h, &ratio(1, 10)).unwrap();
        assert!(cert.verify(&inst).unwrap());
    }

    #[test]
    fn epsilon_range_checked() {
        let mut b = Instance::builder();
        b.signature("NEQ", library::neq());
        let inst = b.build().unwrap();
        assert!(simulate_hmax(&inst, "NEQ", &library::nand(), &[1, 1], &ratio(1, 2)).is_err());
    }
}
