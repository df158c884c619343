use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::monomial::{Monomial, MonomialOrder};
use super::Rational;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored and every monomial has arity `nvars`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        Self::term(nvars, Monomial::var(nvars, index), Rational::one())
    }

    pub fn term(nvars: usize, mono: Monomial, coeff: Rational) -> Self {
        assert_eq!(mono.nvars(), nvars, "monomial arity mismatch");
        let mut p = Self::zero(nvars);
        if !coeff.is_zero() {
            p.terms.insert(mono, coeff);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    /// Indices of variables that occur in some term.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&v| self.terms.keys().any(|m| m.exponent(v) > 0))
            .collect()
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(var) > 0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.nvars(), self.nvars);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn leading_monomial(&self, order: MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_term(&self, mono: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.mul(mono), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Scales to leading coefficient one under `order`.
    pub fn monic(&self, order: MonomialOrder) -> Polynomial {
        match self.leading_term(order) {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars, "evaluation point arity mismatch");
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    v *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            total += v;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars, "evaluation point arity mismatch");
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = c.to_f64().unwrap_or(f64::NAN);
                for (i, &e) in m.exponents().iter().enumerate() {
                    if e > 0 {
                        v *= point[i].powi(e as i32);
                    }
                }
                v
            })
            .sum()
    }

    /// Replaces variable `var` by `value` (which must have the same arity).
    pub fn substitute(&self, var: usize, value: &Polynomial) -> Polynomial {
        assert_eq!(value.nvars, self.nvars);
        let max_e = self.degree_in(var) as u32;
        if max_e == 0 {
            return self.clone();
        }
        let mut powers = vec![Polynomial::one(self.nvars)];
        for i in 1..=max_e as usize {
            let next = &powers[i - 1] * value;
            powers.push(next);
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponent(var) as usize;
            let rest = m.with_exponent(var, 0);
            if e == 0 {
                out.add_term(rest, c.clone());
            } else {
                out = &out + &powers[e].mul_term(&rest, c);
            }
        }
        out
    }

    /// Reindexes variables into a ring with `nvars` variables; `map[i]` is the new index of `x_i`.
    pub fn remap(&self, map: &[usize], nvars: usize) -> Polynomial {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            p.add_term(m.remap(map, nvars), c.clone());
        }
        p
    }

    /// Multiplies by the lcm of the denominators and divides by the gcd of the numerators,
    /// giving a primitive integer polynomial with the same zero set.
    pub fn primitive_integer_terms(&self) -> Vec<(Monomial, BigInt)> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let mut ints: Vec<(Monomial, BigInt)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.numer() * (&den / c.denom())))
            .collect();
        let mut g = BigInt::zero();
        for (_, c) in &ints {
            g = g.gcd(c);
        }
        if !g.is_one() {
            for (_, c) in ints.iter_mut() {
                *c = &*c / &g;
            }
        }
        ints
    }

    pub fn from_integer_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        Self::from_terms(
            nvars,
            terms.into_iter().map(|(m, c)| (m, Rational::from_integer(c))),
        )
    }

    /// Renders using the given variable names; terms appear in descending degrevlex order.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| MonomialOrder::DegRevLex.cmp(b.0, a.0));
        let mut out = String::new();
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                m.fmt_with(names, &mut out)
                    .expect("writing to a String cannot fail");
            }
        }
        out
    }

    fn default_names(&self) -> Vec<String> {
        (0..self.nvars).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&self.default_names()))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&self.default_names()))
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
