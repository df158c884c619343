//! Integer polynomials kept sorted under a fixed monomial order, used by the
//! fraction-free reduction and completion loops.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Budget, GroebnerError};
use crate::poly::{Monomial, MonomialOrder, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IntPoly {
    /// Descending under the order the polynomial was built with.
    pub terms: Vec<(Monomial, BigInt)>,
}

impl IntPoly {
    pub fn from_polynomial(p: &Polynomial, order: MonomialOrder) -> IntPoly {
        let mut terms = p.primitive_integer_terms();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out = IntPoly { terms };
        out.normalize_sign();
        out
    }

    pub fn to_polynomial(&self, nvars: usize) -> Polynomial {
        Polynomial::from_integer_terms(nvars, self.terms.iter().cloned())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn make_primitive(&mut self) {
        let g = self.content();
        if !g.is_zero() && !g.is_one() {
            for (_, c) in self.terms.iter_mut() {
                *c = &*c / &g;
            }
        }
        self.normalize_sign();
    }

    fn normalize_sign(&mut self) {
        if self.terms.first().is_some_and(|(_, c)| c.is_negative()) {
            for (_, c) in self.terms.iter_mut() {
                *c = -&*c;
            }
        }
    }
}

/// `a * p[skip_p..] - b * mono * q[skip_q..]`, both inputs sorted descending.
pub(crate) fn combine(
    a: &BigInt,
    p: &[(Monomial, BigInt)],
    b: &BigInt,
    mono: &Monomial,
    q: &[(Monomial, BigInt)],
    order: MonomialOrder,
) -> Vec<(Monomial, BigInt)> {
    let mut out = Vec::with_capacity(p.len() + q.len());
    let a_is_one = a.is_one();
    let mut qi = q.iter().map(|(m, c)| (m.mul(mono), c)).peekable();
    let mut pi = p.iter().peekable();
    loop {
        match (pi.peek(), qi.peek()) {
            (None, None) => break,
            (Some(_), None) => {
                let (m, c) = pi.next().unwrap();
                out.push((m.clone(), if a_is_one { c.clone() } else { a * c }));
            }
            (None, Some(_)) => {
                let (m, c) = qi.next().unwrap();
                out.push((m, -(b * c)));
            }
            (Some((pm, _)), Some((qm, _))) => match order.cmp(pm, qm) {
                Ordering::Greater => {
                    let (m, c) = pi.next().unwrap();
                    out.push((m.clone(), if a_is_one { c.clone() } else { a * c }));
                }
                Ordering::Less => {
                    let (m, c) = qi.next().unwrap();
                    out.push((m, -(b * c)));
                }
                Ordering::Equal => {
                    let (m, pc) = pi.next().unwrap();
                    let (_, qc) = qi.next().unwrap();
                    let v = if a_is_one { pc - b * qc } else { a * pc - b * qc };
                    if !v.is_zero() {
                        out.push((m.clone(), v));
                    }
                }
            },
        }
    }
    out
}

/// Reducer set with cached leading monomials and support masks.
pub(crate) struct Reducers<'a> {
    pub polys: Vec<&'a IntPoly>,
    masks: Vec<u64>,
}

impl<'a> Reducers<'a> {
    pub fn new(polys: Vec<&'a IntPoly>) -> Self {
        let masks = polys.iter().map(|p| p.lm().support_mask()).collect();
        Reducers { polys, masks }
    }

    fn find(&self, m: &Monomial) -> Option<&'a IntPoly> {
        let mask = m.support_mask();
        self.polys
            .iter()
            .zip(self.masks.iter())
            .find(|(g, &gm)| gm & !mask == 0 && g.lm().divides(m))
            .map(|(g, _)| *g)
    }
}

/// Fraction-free full reduction. The result `r` satisfies `c * p - r ∈ ideal` for some
/// nonzero integer `c`; it is returned primitive with a positive leading coefficient.
pub(crate) fn reduce_full(
    p: IntPoly,
    reducers: &Reducers<'_>,
    order: MonomialOrder,
    budget: &Budget,
) -> Result<IntPoly, GroebnerError> {
    reduce_from(Vec::new(), p.terms, reducers, order, budget)
}

/// Like [`reduce_full`] but keeps the leading term of `p` untouched.
pub(crate) fn reduce_tail(
    mut p: IntPoly,
    reducers: &Reducers<'_>,
    order: MonomialOrder,
    budget: &Budget,
) -> Result<IntPoly, GroebnerError> {
    if p.is_zero() {
        return Ok(p);
    }
    let rest = p.terms.split_off(1);
    reduce_from(p.terms, rest, reducers, order, budget)
}

fn reduce_from(
    mut done: Vec<(Monomial, BigInt)>,
    mut rest: Vec<(Monomial, BigInt)>,
    reducers: &Reducers<'_>,
    order: MonomialOrder,
    budget: &Budget,
) -> Result<IntPoly, GroebnerError> {
    let mut start = 0usize;
    let mut steps: u64 = 0;
    while start < rest.len() {
        steps += 1;
        if steps.is_multiple_of(32) {
            budget.check()?;
            // keep coefficient growth in check
            if rest[start..].iter().any(|(_, c)| c.bits() > 256) {
                let mut g = BigInt::zero();
                for (_, c) in done.iter().chain(rest[start..].iter()) {
                    g = g.gcd(c);
                    if g.is_one() {
                        break;
                    }
                }
                if !g.is_one() && !g.is_zero() {
                    for (_, c) in done.iter_mut().chain(rest[start..].iter_mut()) {
                        *c = &*c / &g;
                    }
                }
            }
        }
        let lead = &rest[start].0;
        match reducers.find(lead) {
            None => {
                // Terms below an irreducible lead may still be reducible.
                done.push(rest[start].clone());
                start += 1;
            }
            Some(g) => {
                let c = &rest[start].1;
                let b = g.lc();
                let d = c.gcd(b);
                let ca = b / &d;
                let cb = c / &d;
                let q = g.lm().quotient_of(lead);
                if !ca.is_one() {
                    for (_, v) in done.iter_mut() {
                        *v = &*v * &ca;
                    }
                }
                rest = combine(&ca, &rest[start + 1..], &cb, &q, &g.terms[1..], order);
                start = 0;
            }
        }
    }
    let mut out = IntPoly { terms: done };
    out.make_primitive();
    Ok(out)
}

/// Integer S-polynomial of `f` and `g`.
pub(crate) fn s_poly(f: &IntPoly, g: &IntPoly, order: MonomialOrder) -> IntPoly {
    let lcm = f.lm().lcm(g.lm());
    let tf = f.lm().quotient_of(&lcm);
    let tg = g.lm().quotient_of(&lcm);
    let d = f.lc().gcd(g.lc());
    let af = g.lc() / &d;
    let ag = f.lc() / &d;
    let left: Vec<(Monomial, BigInt)> = f.terms[1..].iter().map(|(m, c)| (m.mul(&tf), c * &af)).collect();
    let terms = combine(&BigInt::one(), &left, &ag, &tg, &g.terms[1..], order);
    IntPoly { terms }
}
