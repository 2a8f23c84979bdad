use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::num::{from_f64, to_f64};
use crate::algebra::varset::VarSet;
use crate::algebra::{DegreePolicy, Instance, Rational, Signature, Weight};
use crate::error::{Error, Result};

use super::{Relation, ReductionCertificate};

/// Relative tolerance of the floating-point check in [`solve_unary_gadget`].
pub const UNARY_GADGET_TOLERANCE: f64 = 1e-9;

fn t_value(t: &Signature, a: u64, b: u64) -> &Rational {
    t.value(a | b << 1)
}

/// `(T^⊗ F^B)(x) = Σ_y Π_i T(x_i, y_i) · F(y)^B`.
pub fn transform_signature(t: &Signature, f: &Signature, b: u32) -> Result<Signature> {
    if t.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: t.arity(),
        });
    }
    let fb = f.pow(b);
    let k = f.arity();
    let mut table = fb.table().to_vec();
    // Apply T one coordinate at a time.
    for i in 0..k {
        let mut next = vec![Rational::zero(); table.len()];
        for (x, out) in next.iter_mut().enumerate() {
            let xi = (x >> i & 1) as u64;
            for yi in 0..2u64 {
                let y = (x & !(1 << i)) | (yi as usize) << i;
                let tv = t_value(t, xi, yi);
                if !tv.is_zero() && !table[y].is_zero() {
                    *out += tv * &table[y];
                }
            }
        }
        table = next;
    }
    Signature::new(f.vars().clone(), table)
}

/// Gadget of arity `B + 2` on `(x, x', y_1..y_B)` used to rewrite a formula
/// over `T^⊗ F^B` as a degree-2 formula over `F` and `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HolantGadget {
    pub b: u32,
    pub t: Signature,
    pub g: Signature,
}

impl HolantGadget {
    pub fn new(b: u32, t: Signature, g: Signature) -> Result<Self> {
        let gadget = HolantGadget { b, t, g };
        gadget.validate()?;
        Ok(gadget)
    }

    /// `G(x, x', y) = EQ_2(x, x') · EQ_B(y) · T(x, y_1)`.
    pub fn default_for(b: u32, t: Signature) -> Result<Self> {
        if !(1..=2).contains(&b) {
            return Err(Error::Precondition(format!("B = {b} is not 1 or 2")));
        }
        let k = b as usize + 2;
        let names: Vec<String> = ["x", "x'"]
            .into_iter()
            .map(String::from)
            .chain((1..=b).map(|i| format!("y{i}")))
            .collect();
        let t2 = t.clone();
        let g = Signature::from_fn(VarSet::new(names)?, move |bits| {
            let (x, x2) = (bits & 1, bits >> 1 & 1);
            let y = bits >> 2;
            let all_y_equal = y == 0 || y == (1 << b) - 1;
            if x != x2 || !all_y_equal {
                Rational::zero()
            } else {
                t_value(&t2, x, y & 1).clone()
            }
        })?;
        debug_assert_eq!(g.arity(), k);
        HolantGadget::new(b, t, g)
    }

    /// Checks `G(1, 0, y) = 0` and `G(x, x, y) = EQ_B(y) · T(x, y_1)`.
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.b) {
            return Err(Error::Precondition(format!("B = {} is not 1 or 2", self.b)));
        }
        if self.t.arity() != 2 || self.g.arity() != self.b as usize + 2 {
            return Err(Error::Gadget("gadget arities do not match B".into()));
        }
        let b = self.b as u64;
        for y in 0..1u64 << b {
            if !self.g.value(1 | y << 2).is_zero() {
                return Err(Error::Gadget(format!("G(1,0,y) is nonzero at y = {y:b}")));
            }
            for x in 0..2u64 {
                let expected = if y == 0 || y == (1 << b) - 1 {
                    t_value(&self.t, x, y & 1).clone()
                } else {
                    Rational::zero()
                };
                if *self.g.value(x | x << 1 | y << 2) != expected {
                    return Err(Error::Gadget(format!("G(x,x,y) mismatch at x = {x}, y = {y:b}")));
                }
            }
        }
        Ok(())
    }
}

/// Rewrites an instance whose atoms use `T^⊗ F_i^B` into a formula where
/// every variable has degree exactly 2. `bases` maps each signature name in
/// the instance to its `F_i`. Each variable becomes a cycle of chain
/// variables through `G` atoms, one per use, and each atom becomes `B`
/// copies of `F_i` over fresh variables shared with the `G` atoms.
pub fn holant_transform(
    inst: &Instance,
    bases: &BTreeMap<String, Signature>,
    gadget: &HolantGadget,
) -> Result<ReductionCertificate> {
    gadget.validate()?;
    let bb = gadget.b as usize;
    let mut base_name: BTreeMap<&str, String> = BTreeMap::new();
    for atom in inst.atoms() {
        let f = bases
            .get(&atom.sig)
            .ok_or_else(|| Error::UnknownSignature(atom.sig.clone()))?;
        let transformed = transform_signature(&gadget.t, f, gadget.b)?;
        if transformed.table() != inst.atom_signature(atom).table() {
            return Err(Error::Precondition(format!(
                "{} is not the transform of its base signature",
                atom.sig
            )));
        }
        base_name.insert(atom.sig.as_str(), format!("F[{}]", atom.sig));
    }
    let uses = super::uses(inst);
    if let Some(v) = uses.iter().position(Vec::is_empty) {
        return Err(Error::Precondition(format!(
            "variable {} has degree 0",
            inst.vars().name(v)
        )));
    }

    let mut b = Instance::builder();
    b.signature("G", gadget.g.clone());
    for (sig, name) in &base_name {
        b.signature(name.clone(), bases[*sig].clone());
    }
    let names = inst.vars().names();
    let mut chain: Vec<Vec<usize>> = Vec::new();
    for (v, u) in uses.iter().enumerate() {
        chain.push(
            (0..u.len())
                .map(|c| {
                    let w = if c == 0 { inst.weight(v).clone() } else { Weight::unit() };
                    b.fresh_var(&format!("{}.x{}", names[v], c + 1), w)
                })
                .collect(),
        );
    }
    let mut ys: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (a, atom) in inst.atoms().iter().enumerate() {
        for p in 0..atom.scope.len() {
            let y = (1..=bb)
                .map(|k| b.fresh_var(&format!("a{}.y{}.{}", a + 1, p + 1, k), Weight::unit()))
                .collect();
            ys.insert((a, p), y);
        }
    }
    for (v, u) in uses.iter().enumerate() {
        let d = u.len();
        for (c, use_) in u.iter().enumerate() {
            let mut scope = vec![chain[v][c], chain[v][(c + 1) % d]];
            scope.extend(&ys[use_]);
            b.atom_idx("G", scope);
        }
    }
    for (a, atom) in inst.atoms().iter().enumerate() {
        for k in 0..bb {
            let scope = (0..atom.scope.len()).map(|p| ys[&(a, p)][k]).collect();
            b.atom_idx(&base_name[atom.sig.as_str()], scope);
        }
    }
    b.policy(DegreePolicy::Exactly(2));
    let out = b.build()?;
    Ok(ReductionCertificate::new(out, Relation::Equal).with_note(format!("B = {bb}")))
}

/// Result of [`solve_unary_gadget`]: `G(x) = F(x) · W(x_n)` with
/// `(Σ_y T(x, y) H(y) W(y)^B)^m = U(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnaryGadget {
    pub m: u32,
    /// Coordinate of `F` carrying the weight `W`.
    pub n: usize,
    pub h: [f64; 2],
    pub w: [f64; 2],
    pub g: Signature,
    /// Largest relative error of the verification identity.
    pub max_relative_error: f64,
}

pub const UNARY_GADGET_MAX_M: u32 = 1_000_000;

/// Finds `m` and `W` such that the arity 1 signature `U` is expressed by
/// summing `T^⊗ G^B` over all coordinates but `n`, then raising to the
/// `m`-th power, where `G` is `F` weighted by `W` at coordinate `n`.
pub fn solve_unary_gadget(t: &Signature, f: &Signature, b: u32, u: [&Rational; 2]) -> Result<UnaryGadget> {
    if t.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: t.arity(),
        });
    }
    let tv = |a: u64, c: u64| to_f64(t_value(t, a, c));
    let det = tv(0, 0) * tv(1, 1) - tv(0, 1) * tv(1, 0);
    let exact_det = t_value(t, 0, 0) * t_value(t, 1, 1) - t_value(t, 0, 1) * t_value(t, 1, 0);
    if exact_det.is_zero() {
        return Err(Error::Precondition("T is degenerate".into()));
    }
    let case_pos = tv(0, 0) > tv(1, 0) && tv(0, 1) < tv(1, 1);
    let case_neg = tv(0, 1) > tv(1, 1) && tv(0, 0) < tv(1, 0);
    if !case_pos && !case_neg {
        return Err(Error::Precondition("T has no columns with opposite orderings".into()));
    }
    if u.iter().any(|x| x <= &&Rational::zero()) {
        return Err(Error::Precondition("U must be positive".into()));
    }
    let support = f.support();
    if support.len() < 2 {
        return Err(Error::Precondition("F needs at least two support elements".into()));
    }
    let varying = support.iter().fold(0u64, |acc, &x| acc | (x ^ support[0]));
    let n = 63 - varying.leading_zeros() as usize;

    let mut h = [0.0f64; 2];
    for (x, val) in f.table().iter().enumerate() {
        if val.is_zero() {
            continue;
        }
        let mut prod = to_f64(val).powi(b as i32);
        for i in (0..f.arity()).filter(|&i| i != n) {
            let yi = (x >> i & 1) as u64;
            prod *= tv(0, yi) + tv(1, yi);
        }
        h[x >> n & 1] += prod;
    }
    let (u0, u1) = (to_f64(u[0]), to_f64(u[1]));
    let rhs = |m: u32| {
        let (r0, r1) = (u0.powf(1.0 / m as f64), u1.powf(1.0 / m as f64));
        [
            (tv(1, 1) * r0 - tv(0, 1) * r1) / det,
            (-tv(1, 0) * r0 + tv(0, 0) * r1) / det,
        ]
    };
    let m = (1..=UNARY_GADGET_MAX_M)
        .find(|&m| rhs(m).iter().all(|&r| r > 0.0))
        .ok_or_else(|| Error::Numeric(format!("no m <= {UNARY_GADGET_MAX_M} makes the system positive")))?;
    let r = rhs(m);
    let w = [
        (r[0] / h[0]).powf(1.0 / b as f64),
        (r[1] / h[1]).powf(1.0 / b as f64),
    ];
    let w_exact = [
        from_f64(w[0]).ok_or_else(|| Error::Numeric("W(0) not finite".into()))?,
        from_f64(w[1]).ok_or_else(|| Error::Numeric("W(1) not finite".into()))?,
    ];
    let g = f.weight_position(n, (&w_exact[0], &w_exact[1]));

    let marginal = transform_signature(t, &g, b)?.sum_out(f.vars().full_mask() & !(1 << n));
    let mut max_err = 0.0f64;
    for (x, target) in [u0, u1].into_iter().enumerate() {
        let got = to_f64(marginal.value(x as u64)).powi(m as i32);
        max_err = max_err.max(((got - target) / target).abs());
    }
    if max_err > UNARY_GADGET_TOLERANCE {
        return Err(Error::Numeric(format!("verification error {max_err:e} exceeds tolerance")));
    }
    Ok(UnaryGadget {
        m,
        n,
        h,
        w,
        g,
        max_relative_error: max_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::library;
    use crate::algebra::num::{int, ratio};
    use crate::eval::brute_force_z;

    #[test]
    fn identity_transform() {
        let f = Signature::numbered((1..=8).map(int).collect()).unwrap();
        assert_eq!(transform_signature(&library::eq(2), &f, 1).unwrap(), f);
        assert_eq!(transform_signature(&library::eq(2), &f, 2).unwrap(), f.pow(2));
    }

    #[test]
    fn neq_transform_flips_pin() {
        let out = transform_signature(&library::neq(), &library::pin0(), 1).unwrap();
        assert_eq!(out.table(), library::pin1().table());
    }

    #[test]
    fn transform_of_tensor_is_tensor_of_transforms() {
        let t = Signature::numbered(vec![int(1), int(2), int(3), int(5)]).unwrap();
        let a = Signature::new(VarSet::new(["a"]).unwrap(), vec![int(2), int(7)]).unwrap();
        let c = library::nand().rename(["b", "c"]).unwrap();
        let lhs = transform_signature(&t, &a.tensor(&c).unwrap(), 1).unwrap();
        let rhs = transform_signature(&t, &a, 1)
            .unwrap()
            .tensor(&transform_signature(&t, &c, 1).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn default_gadget_valid() {
        let t = Signature::numbered(vec![int(1), int(2), int(3), int(5)]).unwrap();
        for b in 1..=2 {
            assert!(HolantGadget::default_for(b, t.clone()).is_ok());
        }
        let mut g = HolantGadget::default_for(1, t).unwrap();
        g.g = g.g.map_values(|x, v| if x == 0b001 { int(1) } else { v.clone() }).unwrap();
        assert!(g.validate().is_err());
    }

    #[test]
    fn single_atom_self_loop() {
        let t = library::eq(2);
        let mut b = Instance::builder();
        b.signature("TF", transform_signature(&t, &library::nand(), 1).unwrap());
        b.unit_var("x");
        b.atom("TF", &["x", "x"]).unwrap();
        let inst = b.build().unwrap();
        let bases = BTreeMap::from([("TF".to_string(), library::nand())]);
        let cert = holant_transform(&inst, &bases, &HolantGadget::default_for(1, t).unwrap()).unwrap();
        assert_eq!(brute_force_z(&inst).unwrap(), int(1));
        assert!(cert.output.degrees().iter().all(|&d| d == 2));
        assert!(cert.verify(&inst).unwrap());
    }

    #[test]
    fn asymmetric_t_two_atoms() {
        let t = Signature::numbered(vec![int(1), int(2), ratio(1, 3), int(5)]).unwrap();
        let f = Signature::numbered((0..8).map(|x| int(x % 3 + (x == 5) as i64)).collect()).unwrap();
        for bb in 1..=2u32 {
            let mut b = Instance::builder();
            b.signature("TF", transform_signature(&t, &f, bb).unwrap());
            b.var("a", Weight::new(int(2), int(1)));
            b.unit_var("c");
            b.atom("TF", &["a", "c", "a"]).unwrap();
            b.atom("TF", &["c", "c", "a"]).unwrap();
            let inst = b.build().unwrap();
            let bases = BTreeMap::from([("TF".to_string(), f.clone())]);
            let cert = holant_transform(&inst, &bases, &HolantGadget::default_for(bb, t.clone()).unwrap()).unwrap();
            assert!(cert.verify(&inst).unwrap());
        }
    }

    #[test]
    fn unary_gadget_cases() {
        let f = Signature::numbered(vec![int(1), int(2), int(0), int(3)]).unwrap();
        let t_pos = Signature::numbered(vec![int(3), int(1), int(1), int(2)]).unwrap();
        let t_neg = Signature::numbered(vec![int(1), int(3), int(2), int(1)]).unwrap();
        for t in [&t_pos, &t_neg] {
            for b in 1..=2 {
                for u in [[int(1), int(1)], [int(7), ratio(1, 5)], [ratio(1, 100), int(40)]] {
                    let sol = solve_unary_gadget(t, &f, b, [&u[0], &u[1]]).unwrap();
                    assert!(sol.max_relative_error <= UNARY_GADGET_TOLERANCE);
                }
            }
        }
        let sol = solve_unary_gadget(&t_pos, &f, 1, [&int(9), &int(1)]).unwrap();
        let root = |x: f64| x.powf(1.0 / sol.m as f64);
        assert!(2.0 * root(9.0) > 1.0 * root(1.0));
        assert!(1.0 * root(9.0) < 3.0 * root(1.0));
        let degenerate = Signature::numbered(vec![int(1), int(2), int(2), int(4)]).unwrap();
        assert!(solve_unary_gadget(&degenerate, &f, 1, [&int(1), &int(1)]).is_err());
    }
}
