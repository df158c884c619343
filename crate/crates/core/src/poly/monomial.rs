use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

pub type Exponents = SmallVec<[u16; 16]>;

/// A power product `x_0^e_0 * ... * x_{n-1}^e_{n-1}` with a fixed arity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: u32,
    exps: Exponents,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            degree: 0,
            exps: SmallVec::from_elem(0, nvars),
        }
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        Self::var_pow(nvars, index, 1)
    }

    pub fn var_pow(nvars: usize, index: usize, power: u16) -> Self {
        let mut m = Self::one(nvars);
        m.exps[index] = power;
        m.degree = power as u32;
        m
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        Monomial {
            degree: exps.iter().map(|&e| e as u32).sum(),
            exps: SmallVec::from_slice(exps),
        }
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    #[inline]
    pub fn exponent(&self, var: usize) -> u16 {
        self.exps[var]
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial {
            degree: self.degree + other.degree,
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial {
            degree: other.degree - self.degree,
            exps: other
                .exps
                .iter()
                .zip(self.exps.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let exps: Exponents = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| *a.max(b))
            .collect();
        Monomial {
            degree: exps.iter().map(|&e| e as u32).sum(),
            exps,
        }
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps
            .iter()
            .zip(other.exps.iter())
            .all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Bit `i` is set when variable `i % 64` occurs.
    pub fn support_mask(&self) -> u64 {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u64, |m, (i, _)| m | (1u64 << (i % 64)))
    }

    /// True when no variable with index `< split` occurs.
    pub fn avoids_prefix(&self, split: usize) -> bool {
        self.exps[..split].iter().all(|&e| e == 0)
    }

    /// Reindexes the exponents: variable `i` moves to `map[i]` in a ring of `nvars` variables.
    pub fn remap(&self, map: &[usize], nvars: usize) -> Monomial {
        let mut exps: Exponents = SmallVec::from_elem(0, nvars);
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                exps[map[i]] += e;
            }
        }
        Monomial {
            degree: self.degree,
            exps,
        }
    }

    pub(crate) fn with_exponent(&self, var: usize, power: u16) -> Monomial {
        let mut m = self.clone();
        m.degree = m.degree - m.exps[var] as u32 + power as u32;
        m.exps[var] = power;
        m
    }

    pub fn fmt_with(&self, names: &[String], f: &mut impl fmt::Write) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_char('*')?;
            }
            first = false;
            f.write_str(&names[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_char('1')?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps.as_slice())
    }
}

/// Admissible monomial orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic, `x_0 > x_1 > ...`.
    #[default]
    DegRevLex,
    /// Pure lexicographic, `x_0 > x_1 > ...`.
    Lex,
    /// Block order eliminating the variables `x_0 .. x_{split-1}`: degrevlex on the first block,
    /// ties broken by degrevlex on the rest.
    Elimination { split: usize },
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::DegRevLex => a.degree.cmp(&b.degree).then_with(|| revlex(&a.exps, &b.exps)),
            MonomialOrder::Lex => a.exps.cmp(&b.exps),
            MonomialOrder::Elimination { split } => {
                let (a1, a2) = a.exps.split_at(split);
                let (b1, b2) = b.exps.split_at(split);
                let da: u32 = a1.iter().map(|&e| e as u32).sum();
                let db: u32 = b1.iter().map(|&e| e as u32).sum();
                da.cmp(&db)
                    .then_with(|| revlex(a1, b1))
                    .then_with(|| (a.degree - da).cmp(&(b.degree - db)))
                    .then_with(|| revlex(a2, b2))
            }
        }
    }
}

/// Reverse lexicographic tie break: the monomial with the smaller exponent in the
/// last differing variable is larger.
#[inline]
fn revlex(a: &[u16], b: &[u16]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()).rev() {
        if x != y {
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u16]) -> Monomial {
        Monomial::from_exponents(e)
    }

    #[test]
    fn degrevlex_basics() {
        let o = MonomialOrder::DegRevLex;
        // x^2 > xy > y^2 > xz
        assert_eq!(o.cmp(&m(&[2, 0, 0]), &m(&[1, 1, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[1, 1, 0]), &m(&[0, 2, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 2, 0]), &m(&[1, 0, 1])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 0, 0]), &m(&[0, 0, 1])), Ordering::Less);
    }

    #[test]
    fn elimination_prefers_first_block() {
        let o = MonomialOrder::Elimination { split: 1 };
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 5, 5])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[1, 1, 0]), &m(&[1, 0, 0])), Ordering::Greater);
    }

    #[test]
    fn lcm_and_division() {
        let a = m(&[2, 0, 1]);
        let b = m(&[1, 3, 0]);
        let l = a.lcm(&b);
        assert_eq!(l, m(&[2, 3, 1]));
        assert!(a.divides(&l) && b.divides(&l));
        assert_eq!(a.quotient_of(&l), m(&[0, 3, 0]));
        assert!(!a.is_coprime(&b));
        assert!(m(&[1, 0, 0]).is_coprime(&m(&[0, 2, 1])));
    }
}
