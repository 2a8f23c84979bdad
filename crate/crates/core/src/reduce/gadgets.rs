use num_traits::One;

use crate::algebra::library::{neq, pm};
use crate::algebra::{Instance, KFormula, PartialConfiguration, Rational, Signature, Weight};
use crate::classify::{find_minimal_pinning, has_basically_binary_support, is_delta_matroid, Target};
use crate::error::{Error, Result};

/// The formula `G^U(x) = Σ_y G(z) · Π_{i∈U} NEQ(x_i, y_i)` where `z_i` is
/// `y_i` for `i ∈ U` and `x_i` otherwise. Externals are `G`'s variables.
pub fn flip_gadget(g: &Signature, u: u64) -> Result<KFormula> {
    let k = g.arity();
    if u >> k != 0 {
        return Err(Error::Precondition(format!("flip set {u:b} exceeds arity {k}")));
    }
    let mut b = Instance::builder();
    b.signature("G", g.clone());
    let externals: Vec<String> = g.vars().names().to_vec();
    let mut scope = Vec::with_capacity(k);
    for name in &externals {
        scope.push(b.unit_var(name.clone()));
    }
    if u != 0 {
        b.signature("NEQ", neq());
    }
    let mut neqs = Vec::new();
    for (i, x) in scope.iter_mut().enumerate() {
        if u >> i & 1 == 1 {
            let y = b.fresh_var(&format!("{}'", externals[i]), Weight::unit());
            neqs.push((*x, y));
            *x = y;
        }
    }
    b.atom_idx("G", scope);
    for (x, y) in neqs {
        b.atom_idx("NEQ", vec![x, y]);
    }
    b.build_formula(&externals)
}

/// `H(x1, x2, y) = Σ_t G(x1, t) · F(t, x2, y)` on `F`'s variables.
pub fn compose_im_gadget(g: &Signature, f: &Signature) -> Result<Signature> {
    if g.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: g.arity(),
        });
    }
    if f.arity() < 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            found: 0,
        });
    }
    Signature::from_fn(f.vars().clone(), |x| {
        let x1 = x & 1;
        let rest = x & !1;
        (0..2u64)
            .map(|t| g.value(x1 | t << 1) * f.value(rest | t))
            .sum()
    })
}

/// The formula `Σ_t G(x1, t) · F(t, x2, ...)` with internal `t`, whose
/// signature is [`compose_im_gadget`]. Externals are `F`'s variables.
pub fn compose_im_formula(g: &Signature, f: &Signature) -> Result<KFormula> {
    let h = compose_im_gadget(g, f)?;
    let externals: Vec<String> = h.vars().names().to_vec();
    let mut b = Instance::builder();
    b.signature("G", g.clone()).signature("F", f.clone());
    let xs: Vec<usize> = externals.iter().map(|x| b.unit_var(x.clone())).collect();
    let t = b.fresh_var("t", Weight::unit());
    b.atom_idx("G", vec![xs[0], t]);
    let mut scope = xs;
    scope[0] = t;
    b.atom_idx("F", scope);
    b.build_formula(&externals)
}

/// A pinning and h-maximisation turning a signature into a simple
/// weighting of a flip of `PM_3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pm3Flip {
    pub pinning: PartialConfiguration,
    pub h: [i64; 3],
    /// Flip set `U` (bitmask over the three remaining positions).
    pub flip: u64,
    /// `h_maximize(pin(F, p), h)`; its support is `PM_3^U`.
    pub signature: Signature,
    /// Unary factors with `signature · Π U_i(x_i) = PM_3^U`.
    pub unaries: [Weight; 3],
}

/// For a signature whose support is a delta matroid but not basically
/// binary, finds a minimal pinning and an h-maximisation whose support is
/// a flip of `PM_3`.
pub fn extract_pm3_flip(f: &Signature) -> Result<Pm3Flip> {
    let support = f.support_relation();
    if !is_delta_matroid(&support)?.member {
        return Err(Error::Precondition("support is not a delta matroid".into()));
    }
    if has_basically_binary_support(f).member {
        return Err(Error::Precondition("support is basically binary".into()));
    }
    let (pinning, pinned) = find_minimal_pinning(&support, Target::NonBasicallyBinary)?;
    if pinned.arity() != 3 {
        return Err(Error::Gadget(format!(
            "minimal non-basically-binary pinning has arity {}",
            pinned.arity()
        )));
    }
    let in_r = |x: u64| pinned.in_support(x);
    let sphere = (0..8u64).find_map(|x| {
        let layer = |d: u32| (0..8u64).filter(move |u| u.count_ones() == d).map(move |u| x ^ u);
        for d in 1..=2u32 {
            let inside_empty = (0..d).all(|e| layer(e).all(|y| !in_r(y)));
            if inside_empty && layer(d).all(in_r) {
                return Some((x, d));
            }
        }
        None
    });
    let (x, d) = sphere.ok_or_else(|| Error::Gadget("no sphere configuration".into()))?;
    let h = [0, 1, 2].map(|i| 2 * (x >> i & 1) as i64 - 1);
    let flip = if d == 1 { x } else { !x & 0b111 };
    let weighted = f.pin(&pinning)?.h_maximize(&h)?;
    let target = pm(3).flip_mask(flip);
    if weighted.support_relation().table() != target.table() {
        return Err(Error::Gadget("h-maximisation is not a flip of PM_3".into()));
    }
    // F' = flip(weighted, U) is supported on the unit vectors e_i.
    let unaries = [0usize, 1, 2].map(|i| {
        let fi = weighted.value((1u64 << i) ^ flip);
        let u1 = Rational::one() / fi;
        if flip >> i & 1 == 1 {
            Weight::new(u1, Rational::one())
        } else {
            Weight::new(Rational::one(), u1)
        }
    });
    let mut check = weighted.clone();
    for (i, u) in unaries.iter().enumerate() {
        check = check.weight_position(i, (&u.w0, &u.w1));
    }
    if check.table() != target.table() {
        return Err(Error::Gadget("simple weighting does not reach PM_3^U".into()));
    }
    Ok(Pm3Flip {
        pinning,
        h,
        flip,
        signature: weighted,
        unaries,
    })
}
