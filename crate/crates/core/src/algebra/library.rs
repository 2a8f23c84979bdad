//! Named signatures on `x1..xk`.

use super::signature::Signature;
use super::varset::VarSet;

fn rel(k: usize, pred: impl Fn(u64) -> bool) -> Signature {
    Signature::relation(VarSet::numbered(k), (0..1u64 << k).filter(|&x| pred(x)))
        .expect("library arities are small")
}

/// All-equal relation of arity `k`.
pub fn eq(k: usize) -> Signature {
    let ones = (1u64 << k) - 1;
    rel(k, |x| x == 0 || x == ones)
}

pub fn neq() -> Signature {
    rel(2, |x| x == 0b01 || x == 0b10)
}

pub fn pin0() -> Signature {
    rel(1, |x| x == 0)
}

pub fn pin1() -> Signature {
    rel(1, |x| x == 1)
}

pub fn nand() -> Signature {
    rel(2, |x| x != 0b11)
}

pub fn or() -> Signature {
    rel(2, |x| x != 0)
}

/// `x1 ≤ x2`.
pub fn imp() -> Signature {
    rel(2, |x| x != 0b01)
}

/// Exactly one variable is 1.
pub fn pm(k: usize) -> Signature {
    rel(k, |x| x.count_ones() == 1)
}

/// At most one variable is 1; `AMO_3` is the monomer-dimer relation.
pub fn at_most_one(k: usize) -> Signature {
    rel(k, |x| x.count_ones() <= 1)
}

/// Looks up `EQ_k`, `NEQ`, `PIN_0`, `PIN_1`, `NAND`, `OR`, `IMP`, `PM_k`, `AMO_k`.
pub fn by_name(name: &str) -> Option<Signature> {
    let sized = |prefix: &str| -> Option<usize> {
        let k: usize = name.strip_prefix(prefix)?.parse().ok()?;
        (1..=super::signature::arity_cap()).contains(&k).then_some(k)
    };
    match name {
        "NEQ" => Some(neq()),
        "PIN_0" => Some(pin0()),
        "PIN_1" => Some(pin1()),
        "NAND" => Some(nand()),
        "OR" => Some(or()),
        "IMP" => Some(imp()),
        _ => sized("EQ_")
            .map(eq)
            .or_else(|| sized("PM_").map(pm))
            .or_else(|| sized("AMO_").map(at_most_one)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables() {
        assert_eq!(imp().support(), vec![0b00, 0b10, 0b11]);
        assert_eq!(nand().support_size(), 3);
        assert_eq!(pm(3).support(), vec![1, 2, 4]);
        assert_eq!(eq(3).support(), vec![0, 7]);
        assert_eq!(by_name("EQ_4"), Some(eq(4)));
        assert_eq!(by_name("PM_0"), None);
        assert_eq!(by_name("AMO_3").unwrap().support_size(), 4);
    }
}
