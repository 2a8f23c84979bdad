//! Signature algebra, configurations, and the formula/instance data model.

pub mod formula;
pub mod library;
pub mod num;
pub mod signature;
pub mod varset;

pub use formula::{Atom, DegreePolicy, Instance, InstanceBuilder, KFormula, Weight};
pub use num::Rational;
pub use signature::{arity_cap, linearly_dependent, set_arity_cap, Signature};
pub use varset::{Configuration, PartialConfiguration, VarSet};
