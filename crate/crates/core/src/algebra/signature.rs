use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{One, Signed, Zero};

use super::num::Rational;
use super::varset::{
    bitstring, low_mask, positions, scatter, Configuration, PartialConfiguration, VarSet,
};
use crate::error::{Error, Result};

pub const DEFAULT_ARITY_CAP: usize = 16;
/// Dense tables beyond this size are not representable regardless of the cap.
pub const MAX_ARITY_CAP: usize = 24;

static ARITY_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ARITY_CAP);

pub fn arity_cap() -> usize {
    ARITY_CAP.load(Ordering::Relaxed)
}

/// Sets the process-wide arity cap, clamped to [`MAX_ARITY_CAP`].
pub fn set_arity_cap(cap: usize) {
    ARITY_CAP.store(cap.min(MAX_ARITY_CAP), Ordering::Relaxed);
}

/// A non-negative rational function on the configurations of a variable set,
/// stored as a dense table indexed by configuration bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    vars: VarSet,
    table: Vec<Rational>,
}

impl Signature {
    pub fn new(vars: VarSet, table: Vec<Rational>) -> Result<Self> {
        let cap = arity_cap();
        if vars.len() > cap {
            return Err(Error::ArityCap {
                arity: vars.len(),
                cap,
            });
        }
        if table.len() != 1 << vars.len() {
            return Err(Error::TableSize {
                expected: 1 << vars.len(),
                found: table.len(),
            });
        }
        if table.iter().any(Signed::is_negative) {
            return Err(Error::NegativeValue);
        }
        Ok(Signature { vars, table })
    }

    /// A signature on `x1..xk`, with `k` read off the table length.
    pub fn numbered(table: Vec<Rational>) -> Result<Self> {
        let k = table.len().trailing_zeros() as usize;
        if !table.len().is_power_of_two() {
            return Err(Error::TableSize {
                expected: 1 << k,
                found: table.len(),
            });
        }
        Self::new(VarSet::numbered(k), table)
    }

    pub fn from_fn(vars: VarSet, f: impl Fn(u64) -> Rational) -> Result<Self> {
        if vars.len() > arity_cap() {
            return Err(Error::ArityCap {
                arity: vars.len(),
                cap: arity_cap(),
            });
        }
        let table = (0..1u64 << vars.len()).map(f).collect();
        Self::new(vars, table)
    }

    /// The 0/1 indicator of a set of configurations.
    pub fn relation(vars: VarSet, support: impl IntoIterator<Item = u64>) -> Result<Self> {
        let n = vars.len();
        let mut table = vec![Rational::zero(); 1 << n.min(MAX_ARITY_CAP)];
        for x in support {
            let slot = table
                .get_mut(x as usize)
                .ok_or(Error::TableSize {
                    expected: 1 << n,
                    found: x as usize + 1,
                })?;
            *slot = Rational::one();
        }
        Self::new(vars, table)
    }

    /// Indicator relation on `x1..xk` from bitstrings such as `"011"`.
    pub fn relation_from_bitstrings(k: usize, support: &[&str]) -> Result<Self> {
        let bits = support
            .iter()
            .map(|s| {
                super::varset::parse_bitstring(s)
                    .filter(|_| s.len() == k)
                    .ok_or_else(|| Error::Precondition(format!("bad bitstring `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::relation(VarSet::numbered(k), bits)
    }

    pub fn scalar(value: Rational) -> Self {
        Self::new(VarSet::empty(), vec![value]).expect("arity 0")
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn value(&self, bits: u64) -> &Rational {
        &self.table[bits as usize]
    }

    pub fn value_at(&self, x: &Configuration) -> Result<&Rational> {
        if x.vars() != &self.vars {
            return Err(Error::VarSetMismatch);
        }
        Ok(self.value(x.bits()))
    }

    pub fn support(&self) -> Vec<u64> {
        (0..self.table.len() as u64)
            .filter(|&x| !self.table[x as usize].is_zero())
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.table.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn in_support(&self, bits: u64) -> bool {
        !self.table[bits as usize].is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(Zero::is_zero)
    }

    pub fn is_relation(&self) -> bool {
        self.table.iter().all(|v| v.is_zero() || v.is_one())
    }

    pub fn require_relation(&self) -> Result<()> {
        if self.is_relation() {
            Ok(())
        } else {
            Err(Error::NotRelation)
        }
    }

    /// The 0/1 indicator of the support.
    pub fn support_relation(&self) -> Signature {
        let table = self
            .table
            .iter()
            .map(|v| if v.is_zero() { Rational::zero() } else { Rational::one() })
            .collect();
        Signature {
            vars: self.vars.clone(),
            table,
        }
    }

    /// Pins by variable name; `p` may be over any variable set whose pinned
    /// names all occur in this signature.
    pub fn pin(&self, p: &PartialConfiguration) -> Result<Signature> {
        let mut domain = 0u64;
        let mut bits = 0u64;
        for (name, value) in p.pairs() {
            let i = self.vars.require(name)?;
            domain |= 1 << i;
            bits |= (value as u64) << i;
        }
        Ok(self.pin_mask(domain, bits))
    }

    /// Pins the positions in `domain` to the corresponding bits of `bits`.
    pub fn pin_mask(&self, domain: u64, bits: u64) -> Signature {
        let free = positions(!domain & self.vars.full_mask());
        let base = bits & domain;
        let table = (0..1u64 << free.len())
            .map(|y| self.table[(base | scatter(y, &free)) as usize].clone())
            .collect();
        Signature {
            vars: self.vars.without(domain),
            table,
        }
    }

    pub fn flip<S: AsRef<str>>(&self, names: &[S]) -> Result<Signature> {
        Ok(self.flip_mask(self.vars.mask_of(names)?))
    }

    /// `F^U(x) = F(x ⊕ U)`.
    pub fn flip_mask(&self, mask: u64) -> Signature {
        let mask = mask & self.vars.full_mask();
        let table = (0..self.table.len() as u64)
            .map(|x| self.table[(x ^ mask) as usize].clone())
            .collect();
        Signature {
            vars: self.vars.clone(),
            table,
        }
    }

    /// `(F ⊗ G)(x, x') = F(x) G(x')`; `self`'s variables come first.
    pub fn tensor(&self, other: &Signature) -> Result<Signature> {
        if let Some(n) = other.vars.names().iter().find(|n| self.vars.contains(n)) {
            return Err(Error::NameCollision(n.clone()));
        }
        let vars = VarSet::new(self.vars.names().iter().chain(other.vars.names()).cloned())?;
        let k = self.arity();
        Signature::from_fn(vars, |x| {
            &self.table[(x & low_mask(k)) as usize] * &other.table[(x >> k) as usize]
        })
    }

    pub fn score(h: &[i64], x: u64) -> i64 {
        h.iter()
            .enumerate()
            .filter(|(i, _)| x >> i & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    /// `max Σ hᵢxᵢ` over the support.
    pub fn max_score(&self, h: &[i64]) -> Result<i64> {
        if h.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: h.len(),
            });
        }
        self.support()
            .into_iter()
            .map(|x| Self::score(h, x))
            .max()
            .ok_or(Error::EmptySupport)
    }

    /// Keeps the values on supported configurations maximizing `Σ hᵢxᵢ`.
    pub fn h_maximize(&self, h: &[i64]) -> Result<Signature> {
        let best = self.max_score(h)?;
        let table = (0..self.table.len() as u64)
            .map(|x| {
                if Self::score(h, x) == best {
                    self.table[x as usize].clone()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Ok(Signature {
            vars: self.vars.clone(),
            table,
        })
    }

    /// Sums out the positions in `mask`.
    pub fn sum_out(&self, mask: u64) -> Signature {
        let mask = mask & self.vars.full_mask();
        let keep = positions(!mask & self.vars.full_mask());
        let gone = positions(mask);
        let table = (0..1u64 << keep.len())
            .map(|y| {
                let base = scatter(y, &keep);
                (0..1u64 << gone.len()).fold(Rational::zero(), |acc, z| {
                    acc + &self.table[(base | scatter(z, &gone)) as usize]
                })
            })
            .collect();
        Signature {
            vars: self.vars.without(mask),
            table,
        }
    }

    /// Reorders variables: position `i` of the result is position `order[i]`
    /// of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<Signature> {
        let k = self.arity();
        let mut seen = vec![false; k];
        if order.len() != k || order.iter().any(|&o| o >= k || std::mem::replace(&mut seen[o], true)) {
            return Err(Error::Precondition(format!("{order:?} is not a permutation of 0..{k}")));
        }
        let vars = VarSet::new(order.iter().map(|&o| self.vars.name(o).to_string()))?;
        Signature::from_fn(vars, |x| self.table[scatter(x, order) as usize].clone())
    }

    pub fn rename<S: Into<String>>(&self, names: impl IntoIterator<Item = S>) -> Result<Signature> {
        let vars = VarSet::new(names)?;
        if vars.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: vars.len(),
            });
        }
        Ok(Signature {
            vars,
            table: self.table.clone(),
        })
    }

    pub fn map_values(&self, f: impl Fn(u64, &Rational) -> Rational) -> Result<Signature> {
        let table = self
            .table
            .iter()
            .enumerate()
            .map(|(x, v)| f(x as u64, v))
            .collect();
        Signature::new(self.vars.clone(), table)
    }

    pub fn scale(&self, c: &Rational) -> Result<Signature> {
        self.map_values(|_, v| v * c)
    }

    pub fn pow(&self, b: u32) -> Signature {
        Signature {
            vars: self.vars.clone(),
            table: self.table.iter().map(|v| num_traits::pow(v.clone(), b as usize)).collect(),
        }
    }

    /// Multiplies by the unary weight `(w0, w1)` on position `i`.
    pub fn weight_position(&self, i: usize, w: (&Rational, &Rational)) -> Signature {
        Signature {
            vars: self.vars.clone(),
            table: self
                .table
                .iter()
                .enumerate()
                .map(|(x, v)| v * if x >> i & 1 == 1 { w.1 } else { w.0 })
                .collect(),
        }
    }

    pub fn same_table(&self, other: &Signature) -> bool {
        self.table == other.table
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for x in self.support() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{}: {}", bitstring(x, self.arity()), self.table[x as usize])?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({:?} {})", self.vars, self)
    }
}

/// Exact linear dependence of two equal-length vectors: every 2×2 minor of
/// the 2×n matrix vanishes.
pub fn linearly_dependent(a: &[Rational], b: &[Rational]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let Some(p) = a.iter().position(|v| !v.is_zero()) else {
        return true;
    };
    a.iter().zip(b).all(|(ai, bi)| ai * &b[p] == bi * &a[p])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::library;
    use crate::algebra::num::{int, ratio};

    fn unary(a: i64, b: i64, name: &str) -> Signature {
        Signature::new(VarSet::new([name]).unwrap(), vec![int(a), int(b)]).unwrap()
    }

    #[test]
    fn pin_imp_gives_pin1() {
        let p = PartialConfiguration::from_pairs(VarSet::numbered(2), &[("x1", true)]).unwrap();
        let s = library::imp().pin(&p).unwrap();
        assert_eq!(s.vars().names(), ["x2"]);
        assert_eq!(s.table(), &[int(0), int(1)]);
    }

    #[test]
    fn pin_pm3() {
        let p = PartialConfiguration::from_pairs(VarSet::numbered(3), &[("x1", true)]).unwrap();
        let s = library::pm(3).pin(&p).unwrap();
        assert_eq!(s.support(), vec![0]);
        assert_eq!(s.arity(), 2);
    }

    #[test]
    fn empty_pin_is_identity() {
        let f = library::nand();
        assert_eq!(f.pin(&PartialConfiguration::empty(f.vars().clone())).unwrap(), f);
    }

    #[test]
    fn unknown_pin_variable() {
        let p = PartialConfiguration::from_pairs(VarSet::new(["zz"]).unwrap(), &[("zz", true)]).unwrap();
        assert_eq!(library::nand().pin(&p), Err(Error::UnknownVariable("zz".into())));
    }

    #[test]
    fn flip_neq_is_eq() {
        assert_eq!(library::neq().flip(&["x1"]).unwrap(), library::eq(2));
        assert_eq!(library::neq().flip::<&str>(&[]).unwrap(), library::neq());
    }

    #[test]
    fn tensor_products() {
        let a = unary(1, 0, "a");
        let b = unary(0, 1, "b");
        assert_eq!(a.tensor(&b).unwrap().support(), vec![0b10]);
        let u = unary(1, 2, "u");
        let v = unary(3, 5, "v");
        // index bit 0 is u, bit 1 is v: (00,10,01,11) in bitstring order u v
        assert_eq!(u.tensor(&v).unwrap().table(), &[int(3), int(6), int(5), int(10)]);
        assert_eq!(u.tensor(&Signature::scalar(int(1))).unwrap(), u);
        assert!(u.tensor(&u).is_err());
    }

    #[test]
    fn h_max_examples() {
        assert_eq!(library::nand().h_maximize(&[1, 1]).unwrap(), library::neq());
        let f = library::pm(3);
        assert_eq!(f.h_maximize(&[0, 0, 0]).unwrap(), f);
        let r = Signature::relation_from_bitstrings(3, &["000", "100", "010", "110", "111"]).unwrap();
        assert_eq!(r.h_maximize(&[-1, -1, -1]).unwrap().support(), vec![0]);
        let zero = Signature::relation(VarSet::numbered(2), []).unwrap();
        assert_eq!(zero.h_maximize(&[1, 1]), Err(Error::EmptySupport));
    }

    #[test]
    fn permute_and_sum() {
        let f = Signature::numbered((0..8).map(int).collect()).unwrap();
        let g = f.permute(&[2, 0, 1]).unwrap();
        for x in 0..8u64 {
            let old = scatter(x, &[2, 0, 1]);
            assert_eq!(g.value(x), f.value(old));
        }
        let s = f.sum_out(0b110);
        assert_eq!(s.table(), &[int(2 + 4 + 6), int(1 + 3 + 5 + 7)]);
    }

    #[test]
    fn dependence() {
        assert!(linearly_dependent(&[int(1), int(2)], &[int(3), int(6)]));
        assert!(linearly_dependent(&[int(0), int(0)], &[int(3), int(6)]));
        assert!(!linearly_dependent(&[int(1), int(2)], &[int(1), int(3)]));
        assert!(!linearly_dependent(&[int(1), int(0)], &[int(0), ratio(1, 2)]));
    }
}
