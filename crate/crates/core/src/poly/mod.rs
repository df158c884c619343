//! Exact multivariate polynomial arithmetic.

mod monomial;
mod polynomial;

pub use monomial::{Monomial, MonomialOrder};
pub use polynomial::Polynomial;

pub type Rational = num_rational::BigRational;

/// Parses a decimal literal (`-1.25`, `3`, `.5`) or a fraction (`2/3`) into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let mut denom = BigInt::one();
    for _ in 0..frac_part.len() {
        denom *= 10;
    }
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_rational("1.2"), Some(Rational::new(6.into(), 5.into())));
        assert_eq!(
            parse_rational("-0.25"),
            Some(Rational::new((-1).into(), 4.into()))
        );
        assert_eq!(parse_rational("4"), Some(Rational::from_integer(4.into())));
        assert_eq!(parse_rational("2/6"), Some(Rational::new(1.into(), 3.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("-"), None);
    }
}
