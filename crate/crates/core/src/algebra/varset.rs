use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered set of variable names. Position `i` is bit `i` of every
/// configuration over the set.
#[derive(Clone)]
pub struct VarSet(Arc<Inner>);

struct Inner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateVariable(n.clone()));
            }
        }
        Ok(VarSet(Arc::new(Inner { names, index })))
    }

    /// `x1, …, xk`.
    pub fn numbered(k: usize) -> Self {
        Self::new((1..=k).map(|i| format!("x{i}"))).expect("distinct names")
    }

    pub fn empty() -> Self {
        Self::numbered(0)
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0.names[i]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.position(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.index.contains_key(name)
    }

    /// Bitmask of the named variables.
    pub fn mask_of<S: AsRef<str>>(&self, names: &[S]) -> Result<u64> {
        names
            .iter()
            .try_fold(0u64, |m, n| Ok(m | 1 << self.require(n.as_ref())?))
    }

    /// The variables whose positions are *not* in `mask`, in order.
    pub fn without(&self, mask: u64) -> VarSet {
        VarSet::new(
            self.names()
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 0)
                .map(|(_, n)| n.clone()),
        )
        .expect("subset of distinct names")
    }

    pub fn full_mask(&self) -> u64 {
        low_mask(self.len())
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }
}

impl Eq for VarSet {}

impl Hash for VarSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.names.hash(state)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

pub fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Positions of the set bits of `mask`, ascending.
pub fn positions(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Spreads the low bits of `compact` onto `positions`.
pub fn scatter(compact: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &p)| acc | (compact >> j & 1) << p)
}

/// Inverse of [`scatter`].
pub fn gather(bits: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &p)| acc | (bits >> p & 1) << j)
}

/// Renders `bits` with the first variable leftmost.
pub fn bitstring(bits: u64, n: usize) -> String {
    (0..n)
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(s: &str) -> Option<u64> {
    if s.len() > 64 {
        return None;
    }
    s.bytes().enumerate().try_fold(0u64, |acc, (i, b)| match b {
        b'0' => Some(acc),
        b'1' => Some(acc | 1 << i),
        _ => None,
    })
}

/// A total assignment over a variable set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    vars: VarSet,
    bits: u64,
}

impl Configuration {
    pub fn new(vars: VarSet, bits: u64) -> Self {
        assert!(vars.len() <= 64, "configurations are limited to 64 variables");
        assert!(bits & !vars.full_mask() == 0, "bits outside the variable set");
        Configuration { vars, bits }
    }

    pub fn zeros(vars: VarSet) -> Self {
        Self::new(vars, 0)
    }

    pub fn ones(vars: VarSet) -> Self {
        let bits = vars.full_mask();
        Self::new(vars, bits)
    }

    pub fn from_bitstring(vars: VarSet, s: &str) -> Option<Self> {
        (s.len() == vars.len()).then_some(())?;
        Some(Self::new(vars, parse_bitstring(s)?))
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn value(&self, name: &str) -> Result<bool> {
        Ok(self.get(self.vars.require(name)?))
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(self.vars.clone(), self.bits & other.bits))
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(self.vars.clone(), self.bits | other.bits))
    }

    pub fn complement(&self) -> Self {
        Self::new(self.vars.clone(), !self.bits & self.vars.full_mask())
    }

    pub fn flipped(&self, mask: u64) -> Self {
        Self::new(self.vars.clone(), (self.bits ^ mask) & self.vars.full_mask())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VarSetMismatch)
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bitstring(self.bits, self.vars.len()))
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({self})")
    }
}

/// An assignment to a subset of a variable set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialConfiguration {
    vars: VarSet,
    domain: u64,
    bits: u64,
}

impl PartialConfiguration {
    pub fn empty(vars: VarSet) -> Self {
        PartialConfiguration {
            vars,
            domain: 0,
            bits: 0,
        }
    }

    pub fn from_masks(vars: VarSet, domain: u64, bits: u64) -> Self {
        assert!(domain & !vars.full_mask() == 0, "domain outside the variable set");
        PartialConfiguration {
            vars,
            domain,
            bits: bits & domain,
        }
    }

    pub fn from_pairs<S: AsRef<str>>(vars: VarSet, pairs: &[(S, bool)]) -> Result<Self> {
        let mut p = Self::empty(vars);
        for (name, value) in pairs {
            p = p.with(name.as_ref(), *value)?;
        }
        Ok(p)
    }

    pub fn with(mut self, name: &str, value: bool) -> Result<Self> {
        let i = self.vars.require(name)?;
        self.domain |= 1 << i;
        self.bits = self.bits & !(1 << i) | (value as u64) << i;
        Ok(self)
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn domain_size(&self) -> usize {
        self.domain.count_ones() as usize
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (self.domain >> i & 1 == 1).then_some(self.bits >> i & 1 == 1)
    }

    /// Pinned variables as `(name, value)` pairs in variable order.
    pub fn pairs(&self) -> Vec<(&str, bool)> {
        positions(self.domain)
            .into_iter()
            .map(|i| (self.vars.name(i), self.bits >> i & 1 == 1))
            .collect()
    }
}

impl fmt::Display for PartialConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.vars.len())
            .map(|i| match self.get(i) {
                None => '*',
                Some(true) => '1',
                Some(false) => '0',
            })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for PartialConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialConfiguration({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> VarSet {
        VarSet::numbered(3)
    }

    #[test]
    fn meet_and_join() {
        let x = Configuration::from_bitstring(three(), "011").unwrap();
        let y = Configuration::from_bitstring(three(), "110").unwrap();
        assert_eq!(x.meet(&y).unwrap().to_string(), "010");
        assert_eq!(x.join(&y).unwrap().to_string(), "111");
        assert_eq!(x.meet(&x).unwrap(), x);
        assert_eq!(x.join(&Configuration::zeros(three())).unwrap(), x);
    }

    #[test]
    fn varset_mismatch_is_an_error() {
        let x = Configuration::zeros(three());
        let y = Configuration::zeros(VarSet::numbered(2));
        assert_eq!(x.meet(&y), Err(Error::VarSetMismatch));
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(VarSet::new(["a", "b", "a"]).is_err());
    }

    #[test]
    fn scatter_gather_roundtrip() {
        let pos = [1, 4, 5];
        for c in 0..8 {
            assert_eq!(gather(scatter(c, &pos), &pos), c);
        }
    }

    #[test]
    fn partial_display() {
        let p = PartialConfiguration::from_pairs(three(), &[("x1", true), ("x3", false)]).unwrap();
        assert_eq!(p.to_string(), "1*0");
        assert_eq!(p.domain_size(), 2);
        assert!(PartialConfiguration::from_pairs(three(), &[("y", true)]).is_err());
    }
}
