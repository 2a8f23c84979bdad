use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Multiplies numerators and denominators separately and normalises once,
/// so long products of small factors avoid a gcd per step.
pub fn product<'a>(factors: impl IntoIterator<Item = &'a Rational>) -> Rational {
    let (mut n, mut d) = (BigInt::one(), BigInt::one());
    for f in factors {
        n *= f.numer();
        d *= f.denom();
    }
    Rational::new(n, d)
}

/// Numerators over the product of the denominators.
pub fn common_denominator(values: &[&Rational]) -> (Vec<BigInt>, BigInt) {
    let den: BigInt = values.iter().map(|v| v.denom()).product();
    let nums = values.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    (nums, den)
}

/// `2^e` for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    let magnitude = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(magnitude)
    } else {
        Rational::new(BigInt::one(), magnitude)
    }
}

/// Returns `e` when `q == 2^e`.
pub fn log2_exact(q: &Rational) -> Option<i64> {
    if !q.is_positive() {
        return None;
    }
    let exponent = |n: &BigInt| -> Option<i64> {
        let tz = n.trailing_zeros()?;
        (n >> tz).is_one().then_some(tz as i64)
    };
    Some(exponent(q.numer())? - exponent(q.denom())?)
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Some(Rational::new(digits, scale));
    }
    let q: Rational = s.parse().ok()?;
    Some(q)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn is_nonnegative(q: &Rational) -> bool {
    !q.is_negative()
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Natural logarithm of a positive rational without going through an
/// overflowing `f64` conversion.
pub fn ln(q: &Rational) -> f64 {
    fn ln_int(n: &BigInt) -> f64 {
        let bits = n.bits();
        if bits < 1000 {
            return n.to_f64().unwrap().ln();
        }
        let shift = bits - 64;
        (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_int(q.numer()) - ln_int(q.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(-2), ratio(1, 4));
        assert_eq!(log2_exact(&ratio(1, 8)), Some(-3));
        assert_eq!(log2_exact(&int(12)), None);
        assert_eq!(log2_exact(&int(0)), None);
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn log_of_huge_values() {
        let big = pow2(3000);
        assert!((ln(&big) - 3000.0 * std::f64::consts::LN_2).abs() < 1e-6);
        assert!((ln(&ratio(3, 7)) - (3.0f64 / 7.0).ln()).abs() < 1e-12);
    }
}
