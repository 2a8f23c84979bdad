use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use super::num::Rational;
use super::signature::{arity_cap, Signature};
use super::varset::VarSet;
use crate::error::{Error, Result};

/// The set `K` of allowed variable degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DegreePolicy {
    Unbounded,
    AtMost(usize),
    Exactly(usize),
}

impl DegreePolicy {
    pub fn allows(&self, degree: usize) -> bool {
        match *self {
            DegreePolicy::Unbounded => true,
            DegreePolicy::AtMost(d) => degree <= d,
            DegreePolicy::Exactly(d) => degree == d,
        }
    }

    /// The least positive degree in `K`.
    pub fn smallest(&self) -> usize {
        match *self {
            DegreePolicy::Exactly(d) => d,
            _ => 1,
        }
    }
}

impl fmt::Display for DegreePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreePolicy::Unbounded => write!(f, "unbounded"),
            DegreePolicy::AtMost(d) => write!(f, "<= {d}"),
            DegreePolicy::Exactly(d) => write!(f, "= {d}"),
        }
    }
}

/// A signature applied to a scope of variable positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub sig: String,
    pub scope: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub w0: Rational,
    pub w1: Rational,
}

impl Weight {
    pub fn new(w0: Rational, w1: Rational) -> Self {
        Weight { w0, w1 }
    }

    pub fn unit() -> Self {
        Weight::new(Rational::one(), Rational::one())
    }

    pub fn get(&self, value: bool) -> &Rational {
        if value {
            &self.w1
        } else {
            &self.w0
        }
    }

    pub fn is_unit(&self) -> bool {
        self.w0.is_one() && self.w1.is_one()
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight::unit()
    }
}

/// A pps-formula with a degree policy. Variables `0..n_external` are
/// external, the rest internal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KFormula {
    vars: VarSet,
    n_external: usize,
    atoms: Vec<Atom>,
    signatures: BTreeMap<String, Signature>,
    policy: DegreePolicy,
}

impl KFormula {
    pub fn new(
        vars: VarSet,
        n_external: usize,
        atoms: Vec<Atom>,
        signatures: BTreeMap<String, Signature>,
        policy: DegreePolicy,
    ) -> Result<Self> {
        if n_external > vars.len() {
            return Err(Error::Precondition("more externals than variables".into()));
        }
        let f = KFormula {
            vars,
            n_external,
            atoms,
            signatures,
            policy,
        };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        for atom in &self.atoms {
            let sig = self
                .signatures
                .get(&atom.sig)
                .ok_or_else(|| Error::UnknownSignature(atom.sig.clone()))?;
            if sig.arity() != atom.scope.len() {
                return Err(Error::ArityMismatch {
                    expected: sig.arity(),
                    found: atom.scope.len(),
                });
            }
            if let Some(&v) = atom.scope.iter().find(|&&v| v >= self.vars.len()) {
                return Err(Error::UnknownVariable(format!("#{v}")));
            }
        }
        if self.policy != DegreePolicy::Unbounded {
            for (v, &deg) in self.degrees().iter().enumerate() {
                let ok = if v < self.n_external {
                    deg == 1
                } else {
                    self.policy.allows(deg)
                };
                if !ok {
                    return Err(Error::DegreePolicy {
                        var: self.vars.name(v).to_string(),
                        degree: deg,
                        policy: self.policy.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn n_external(&self) -> usize {
        self.n_external
    }

    pub fn externals(&self) -> &[String] {
        &self.vars.names()[..self.n_external]
    }

    pub fn internals(&self) -> &[String] {
        &self.vars.names()[self.n_external..]
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn signatures(&self) -> &BTreeMap<String, Signature> {
        &self.signatures
    }

    pub fn signature(&self, name: &str) -> Option<&Signature> {
        self.signatures.get(name)
    }

    pub fn policy(&self) -> DegreePolicy {
        self.policy
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vars.len()];
        for atom in &self.atoms {
            for &v in &atom.scope {
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn atom_signature(&self, atom: &Atom) -> &Signature {
        &self.signatures[&atom.sig]
    }

    /// Value of atom `a` under the assignment `value(v)`.
    pub fn atom_value(&self, atom: &Atom, value: impl Fn(usize) -> bool) -> &Rational {
        let idx = atom
            .scope
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &v)| acc | (value(v) as u64) << j);
        self.atom_signature(atom).value(idx)
    }

    /// `Z_φ(x)` for an external configuration, summing over internals.
    pub fn evaluate(&self, external: u64) -> Result<Rational> {
        let n_int = self.vars.len() - self.n_external;
        if n_int > 30 {
            return Err(Error::SizeCap {
                what: "internal variables",
                size: n_int,
                cap: 30,
            });
        }
        let mut total = Rational::zero();
        for y in 0..1u64 << n_int {
            let x = external | y << self.n_external;
            let mut prod = Rational::one();
            for atom in &self.atoms {
                let v = self.atom_value(atom, |i| x >> i & 1 == 1);
                if v.is_zero() {
                    prod = Rational::zero();
                    break;
                }
                prod *= v;
            }
            total += prod;
        }
        Ok(total)
    }

    /// The signature `Z_φ` on the external variables.
    pub fn to_signature(&self) -> Result<Signature> {
        let ext = VarSet::new(self.externals().iter().cloned())?;
        if ext.len() > arity_cap() {
            return Err(Error::ArityCap {
                arity: ext.len(),
                cap: arity_cap(),
            });
        }
        let table = (0..1u64 << ext.len())
            .map(|x| self.evaluate(x))
            .collect::<Result<Vec<_>>>()?;
        Signature::new(ext, table)
    }

    /// Replaces every atom using `name` by a copy of `psi`, externals renamed
    /// to the atom's scope and internals renamed fresh.
    pub fn substitute(&self, name: &str, psi: &KFormula) -> Result<KFormula> {
        let (f, _) = substitute_parts(self, name, psi)?;
        Ok(f)
    }
}

/// Returns the substituted formula and the number of fresh variables appended.
fn substitute_parts(phi: &KFormula, name: &str, psi: &KFormula) -> Result<(KFormula, usize)> {
    let target = phi
        .signature(name)
        .ok_or_else(|| Error::UnknownSignature(name.to_string()))?;
    if target.arity() != psi.n_external {
        return Err(Error::ArityMismatch {
            expected: target.arity(),
            found: psi.n_external,
        });
    }
    let mut signatures = phi.signatures.clone();
    for (n, s) in &psi.signatures {
        match signatures.get(n) {
            Some(existing) if existing != s => return Err(Error::NameCollision(n.clone())),
            _ => {
                signatures.insert(n.clone(), s.clone());
            }
        }
    }
    let mut names: Vec<String> = phi.vars.names().to_vec();
    let mut taken: std::collections::HashSet<String> = names.iter().cloned().collect();
    let mut atoms = Vec::new();
    let mut copy = 0usize;
    for atom in &phi.atoms {
        if atom.sig != name {
            atoms.push(atom.clone());
            continue;
        }
        copy += 1;
        let mut map: Vec<usize> = atom.scope.clone();
        for internal in psi.internals() {
            let mut fresh = format!("{internal}#{copy}");
            while taken.contains(&fresh) {
                fresh.push('\'');
            }
            taken.insert(fresh.clone());
            map.push(names.len());
            names.push(fresh);
        }
        for a in &psi.atoms {
            atoms.push(Atom {
                sig: a.sig.clone(),
                scope: a.scope.iter().map(|&v| map[v]).collect(),
            });
        }
    }
    let added = names.len() - phi.vars.len();
    if !atoms.iter().any(|a| a.sig == name) {
        signatures.remove(name);
        if let Some(s) = psi.signatures.get(name) {
            signatures.insert(name.to_string(), s.clone());
        }
    }
    let f = KFormula::new(VarSet::new(names)?, phi.n_external, atoms, signatures, phi.policy)?;
    Ok((f, added))
}

/// A #CSP instance: a formula without externals plus variable weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    formula: KFormula,
    weights: Vec<Weight>,
}

impl Instance {
    pub fn new(formula: KFormula, weights: Vec<Weight>) -> Result<Self> {
        if formula.n_external != 0 {
            return Err(Error::Precondition("instances have no external variables".into()));
        }
        if weights.len() != formula.vars.len() {
            return Err(Error::Precondition(format!(
                "{} weights for {} variables",
                weights.len(),
                formula.vars.len()
            )));
        }
        if weights
            .iter()
            .any(|w| num_traits::Signed::is_negative(&w.w0) || num_traits::Signed::is_negative(&w.w1))
        {
            return Err(Error::NegativeValue);
        }
        Ok(Instance { formula, weights })
    }

    pub fn builder() -> InstanceBuilder {
        InstanceBuilder::default()
    }

    pub fn formula(&self) -> &KFormula {
        &self.formula
    }

    pub fn vars(&self) -> &VarSet {
        &self.formula.vars
    }

    pub fn num_vars(&self) -> usize {
        self.formula.vars.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.formula.atoms
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> &Weight {
        &self.weights[v]
    }

    pub fn signatures(&self) -> &BTreeMap<String, Signature> {
        &self.formula.signatures
    }

    pub fn signature(&self, name: &str) -> Option<&Signature> {
        self.formula.signature(name)
    }

    pub fn atom_signature(&self, atom: &Atom) -> &Signature {
        self.formula.atom_signature(atom)
    }

    pub fn policy(&self) -> DegreePolicy {
        self.formula.policy
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.formula.degrees()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn max_arity(&self) -> usize {
        self.atoms()
            .iter()
            .map(|a| a.scope.len())
            .max()
            .unwrap_or(0)
    }

    /// Same formula, new weights.
    pub fn with_weights(&self, weights: Vec<Weight>) -> Result<Instance> {
        Instance::new(self.formula.clone(), weights)
    }

    /// Same instance under another degree policy (revalidated).
    pub fn with_policy(&self, policy: DegreePolicy) -> Result<Instance> {
        let f = &self.formula;
        let formula = KFormula::new(f.vars.clone(), 0, f.atoms.clone(), f.signatures.clone(), policy)?;
        Instance::new(formula, self.weights.clone())
    }

    /// `wt(x)` for a configuration given as bits over the instance variables.
    pub fn config_weight(&self, x: u64) -> Rational {
        let mut prod = Rational::one();
        for (v, w) in self.weights.iter().enumerate() {
            prod *= w.get(x >> v & 1 == 1);
            if prod.is_zero() {
                return prod;
            }
        }
        for atom in self.atoms() {
            prod *= self.formula.atom_value(atom, |i| x >> i & 1 == 1);
            if prod.is_zero() {
                return prod;
            }
        }
        prod
    }

    /// Substitutes `psi` for the signature `name`; fresh internals get weight (1,1).
    pub fn substitute(&self, name: &str, psi: &KFormula) -> Result<Instance> {
        let (formula, added) = substitute_parts(&self.formula, name, psi)?;
        let mut weights = self.weights.clone();
        weights.extend(std::iter::repeat_n(Weight::unit(), added));
        Instance::new(formula, weights)
    }
}

/// Incremental construction of instances and formulas by variable name.
#[derive(Clone, Debug, Default)]
pub struct InstanceBuilder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    weights: Vec<Weight>,
    atoms: Vec<Atom>,
    signatures: BTreeMap<String, Signature>,
    policy: Option<DegreePolicy>,
}

impl InstanceBuilder {
    pub fn signature(&mut self, name: impl Into<String>, sig: Signature) -> &mut Self {
        self.signatures.insert(name.into(), sig);
        self
    }

    pub fn has_signature(&self, name: &str) -> bool {
        self.signatures.contains_key(name)
    }

    /// Declares a variable (or overwrites its weight) and returns its index.
    pub fn var(&mut self, name: impl Into<String>, weight: Weight) -> usize {
        let name = name.into();
        if let Some(&i) = self.index.get(&name) {
            self.weights[i] = weight;
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        self.weights.push(weight);
        i
    }

    /// Index of `name`, declaring it with weight (1,1) if new.
    pub fn unit_var(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        match self.index.get(&name) {
            Some(&i) => i,
            None => self.var(name, Weight::unit()),
        }
    }

    /// A fresh variable whose name starts with `stem`.
    pub fn fresh_var(&mut self, stem: &str, weight: Weight) -> usize {
        let mut name = stem.to_string();
        let mut k = 1;
        while self.index.contains_key(&name) {
            name = format!("{stem}~{k}");
            k += 1;
        }
        self.var(name, weight)
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn weight_mut(&mut self, v: usize) -> &mut Weight {
        &mut self.weights[v]
    }

    pub fn atom<S: AsRef<str>>(&mut self, sig: &str, scope: &[S]) -> Result<&mut Self> {
        let scope = scope
            .iter()
            .map(|n| {
                self.index
                    .get(n.as_ref())
                    .copied()
                    .ok_or_else(|| Error::UnknownVariable(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.atom_idx(sig, scope))
    }

    pub fn atom_idx(&mut self, sig: &str, scope: Vec<usize>) -> &mut Self {
        self.atoms.push(Atom {
            sig: sig.to_string(),
            scope,
        });
        self
    }

    pub fn policy(&mut self, policy: DegreePolicy) -> &mut Self {
        self.policy = Some(policy);
        self
    }

    pub fn build(&self) -> Result<Instance> {
        let formula = KFormula::new(
            VarSet::new(self.names.iter().cloned())?,
            0,
            self.atoms.clone(),
            self.signatures.clone(),
            self.policy.unwrap_or(DegreePolicy::Unbounded),
        )?;
        Instance::new(formula, self.weights.clone())
    }

    /// Builds a formula whose externals are `externals`, in that order; all
    /// other declared variables are internal.
    pub fn build_formula<S: AsRef<str>>(&self, externals: &[S]) -> Result<KFormula> {
        let mut order: Vec<usize> = Vec::with_capacity(self.names.len());
        for e in externals {
            let i = *self
                .index
                .get(e.as_ref())
                .ok_or_else(|| Error::UnknownVariable(e.as_ref().to_string()))?;
            if order.contains(&i) {
                return Err(Error::DuplicateVariable(e.as_ref().to_string()));
            }
            order.push(i);
        }
        for i in 0..self.names.len() {
            if !order.contains(&i) {
                order.push(i);
            }
        }
        let mut pos = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                sig: a.sig.clone(),
                scope: a.scope.iter().map(|&v| pos[v]).collect(),
            })
            .collect();
        KFormula::new(
            VarSet::new(order.iter().map(|&i| self.names[i].clone()))?,
            externals.len(),
            atoms,
            self.signatures.clone(),
            self.policy.unwrap_or(DegreePolicy::Unbounded),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::library;
    use crate::algebra::num::int;

    fn neq_path_for_eq() -> KFormula {
        let mut b = Instance::builder();
        b.signature("NEQ", library::neq());
        for v in ["x", "y", "z"] {
            b.unit_var(v);
        }
        b.atom("NEQ", &["x", "y"]).unwrap();
        b.atom("NEQ", &["y", "z"]).unwrap();
        b.build_formula(&["x", "z"]).unwrap()
    }

    #[test]
    fn eq2_through_neq() {
        let psi = neq_path_for_eq();
        assert_eq!(psi.to_signature().unwrap().table(), library::eq(2).table());
    }

    #[test]
    fn substitute_eq_by_neq_path() {
        let mut b = Instance::builder();
        b.signature("EQ_2", library::eq(2)).signature("NAND", library::nand());
        for v in ["a", "b", "c"] {
            b.var(v, Weight::new(int(1), int(2)));
        }
        b.atom("EQ_2", &["a", "b"]).unwrap();
        b.atom("NAND", &["b", "c"]).unwrap();
        b.atom("EQ_2", &["c", "a"]).unwrap();
        let inst = b.build().unwrap();
        let out = inst.substitute("EQ_2", &neq_path_for_eq()).unwrap();
        assert_eq!(out.num_vars(), 5);
        assert!(out.signature("EQ_2").is_none());
        let z = |i: &Instance| (0..1u64 << i.num_vars()).map(|x| i.config_weight(x)).sum::<Rational>();
        assert_eq!(z(&inst), z(&out));
    }

    #[test]
    fn arity_mismatch_rejected() {
        let mut b = Instance::builder();
        b.signature("NAND", library::nand());
        b.unit_var("a");
        b.atom("NAND", &["a"]).unwrap();
        assert!(matches!(b.build(), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn degree_policy_enforced() {
        let mut b = Instance::builder();
        b.signature("NAND", library::nand());
        for v in ["a", "b", "c"] {
            b.unit_var(v);
        }
        b.atom("NAND", &["a", "b"]).unwrap();
        b.atom("NAND", &["a", "c"]).unwrap();
        b.policy(DegreePolicy::Exactly(2));
        assert!(matches!(b.build(), Err(Error::DegreePolicy { .. })));
        b.policy(DegreePolicy::AtMost(2));
        assert!(b.build().is_ok());
    }
}
