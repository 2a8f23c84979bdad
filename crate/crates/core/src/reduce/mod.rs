//! Constructive reductions between #CSP instances. Each transformation
//! returns a [`ReductionCertificate`] stating how the partition function of
//! the output relates to that of the input.

mod equality;
mod gadgets;
mod hmax;
mod holant;
mod monomer;
mod pins;
mod weights;

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::num::ln;
use crate::algebra::{Instance, Rational};
use crate::error::Result;
use crate::eval::{brute_force_z, exact_z};

pub use equality::{extract_r4, three_simulate_equality, two_simulate_equality, R4Trace};
pub use gadgets::{compose_im_formula, compose_im_gadget, extract_pm3_flip, flip_gadget, Pm3Flip};
pub use hmax::simulate_hmax;
pub use holant::{
    holant_transform, solve_unary_gadget, transform_signature, HolantGadget, UnaryGadget,
    UNARY_GADGET_TOLERANCE,
};
pub use monomer::{to_monomer_dimer, MonomerDimer};
pub use pins::{rewrite_pinnings, simulate_pins};
pub use weights::{encode_pow2_weights, signatures_to_weights, weights_to_signatures, SimpleWeighting};

/// How `Z(out)` relates to `Z(in)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `Z(out) = Z(in)`.
    Equal,
    /// `Z(out) = scale · Z(in)`.
    Scaled { scale: Rational },
    /// `Z(out) = scale · Z(in)^power`.
    ScaledPower { scale: Rational, power: u32 },
    /// With `Z'' = Z(out)/scale`: if `Z(in) = 0` then `Z'' ≤ threshold`,
    /// otherwise `Z'' > threshold` and `e^{-ε} Z(in) ≤ Z'' ≤ e^{ε} Z(in)`.
    Approximate {
        scale: Rational,
        threshold: Rational,
        n: u64,
        epsilon: Rational,
    },
}

impl Relation {
    pub fn kind(&self) -> &'static str {
        match self {
            Relation::Equal => "equal",
            Relation::Scaled { .. } => "scaled",
            Relation::ScaledPower { .. } => "scaled-power",
            Relation::Approximate { .. } => "approximate-with-threshold",
        }
    }

    pub fn holds(&self, z_in: &Rational, z_out: &Rational) -> bool {
        match self {
            Relation::Equal => z_in == z_out,
            Relation::Scaled { scale } => *z_out == scale * z_in,
            Relation::ScaledPower { scale, power } => {
                let mut p = Rational::one();
                for _ in 0..*power {
                    p *= z_in;
                }
                *z_out == scale * p
            }
            Relation::Approximate {
                scale,
                threshold,
                epsilon,
                ..
            } => {
                let corrected = z_out / scale;
                if z_in.is_zero() {
                    return corrected <= *threshold;
                }
                if corrected <= *threshold {
                    return false;
                }
                let eps = crate::algebra::num::to_f64(epsilon);
                (ln(&corrected) - ln(z_in)).abs() <= eps
            }
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Equal => write!(f, "Z(out) = Z(in)"),
            Relation::Scaled { scale } => write!(f, "Z(out) = {scale} * Z(in)"),
            Relation::ScaledPower { scale, power } => write!(f, "Z(out) = {scale} * Z(in)^{power}"),
            Relation::Approximate {
                scale,
                threshold,
                n,
                epsilon,
            } => write!(
                f,
                "Z(out)/{scale} within exp({epsilon}) of Z(in), or <= {threshold} iff Z(in) = 0 (n = {n})"
            ),
        }
    }
}

/// The transformed instance plus the stated relation between partition
/// functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub output: Instance,
    pub relation: Relation,
    pub notes: Vec<String>,
}

/// Instances up to this many variables are checked by plain enumeration;
/// larger ones go through variable elimination.
pub const VERIFY_ENUMERATION_CAP: usize = 20;

/// Exact `Z` by enumeration for small instances, elimination otherwise.
pub fn oracle_z(inst: &Instance) -> Result<Rational> {
    if inst.num_vars() <= VERIFY_ENUMERATION_CAP {
        brute_force_z(inst)
    } else {
        exact_z(inst)
    }
}

impl ReductionCertificate {
    pub fn new(output: Instance, relation: Relation) -> Self {
        ReductionCertificate {
            output,
            relation,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn check(&self, z_in: &Rational, z_out: &Rational) -> bool {
        self.relation.holds(z_in, z_out)
    }

    /// Recomputes both partition functions exactly and checks the relation.
    pub fn verify(&self, input: &Instance) -> Result<bool> {
        let z_in = oracle_z(input)?;
        let z_out = oracle_z(&self.output)?;
        Ok(self.check(&z_in, &z_out))
    }
}

/// `(atom, position)` pairs for every variable, in atom order.
pub(crate) fn uses(inst: &Instance) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new(); inst.num_vars()];
    for (a, atom) in inst.atoms().iter().enumerate() {
        for (pos, &v) in atom.scope.iter().enumerate() {
            out[v].push((a, pos));
        }
    }
    out
}

/// `stem`, primed until it is not a key of `taken`.
pub(crate) fn unused_name<V>(taken: &std::collections::BTreeMap<String, V>, stem: &str) -> String {
    let mut name = stem.to_string();
    while taken.contains_key(&name) {
        name.push('\'');
    }
    name
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::{int, ratio};

    #[test]
    fn relation_kinds() {
        assert!(Relation::Equal.holds(&int(3), &int(3)));
        assert!(Relation::Scaled { scale: ratio(1, 2) }.holds(&int(6), &int(3)));
        let sp = Relation::ScaledPower {
            scale: int(2),
            power: 3,
        };
        assert!(sp.holds(&int(2), &int(16)));
        assert!(!sp.holds(&int(2), &int(8)));
    }

    #[test]
    fn approximate_relation_threshold() {
        let r = Relation::Approximate {
            scale: int(4),
            threshold: ratio(1, 4),
            n: 5,
            epsilon: ratio(1, 10),
        };
        assert!(r.holds(&int(0), &ratio(1, 2)));
        assert!(!r.holds(&int(0), &int(2)));
        assert!(r.holds(&int(2), &int(8)));
        assert!(!r.holds(&int(2), &int(10)));
    }
}
