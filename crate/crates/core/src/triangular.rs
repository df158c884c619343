//! Triangular sets and successive pseudo-division.
//!
//! Each polynomial produced here is a combination of the input hypotheses, so a zero
//! final remainder gives an identity `I·T ∈ ⟨H⟩` where `I` is a product of initials.

use crate::groebner::{Budget, GroebnerError};
use num_traits::One;

use crate::poly::{Monomial, Polynomial, Rational};

/// Coefficient of `v^k` in `p`, as a polynomial free of `v`.
pub fn coefficient_in(p: &Polynomial, v: usize, k: u16) -> Polynomial {
    let n = p.nvars();
    Polynomial::from_terms(
        n,
        p.terms().filter(|(m, _)| m.exponent(v) == k).map(|(m, c)| {
            let mut e = m.exponents().to_vec();
            e[v] = 0;
            (Monomial::from_exponents(&e), c.clone())
        }),
    )
}

/// Leading coefficient of `p` with respect to `v`.
pub fn initial(p: &Polynomial, v: usize) -> Polynomial {
    coefficient_in(p, v, p.degree_in(v))
}

fn primitive(p: Polynomial) -> Polynomial {
    if p.is_zero() {
        return p;
    }
    Polynomial::from_integer_terms(p.nvars(), p.primitive_integer_terms())
}

/// Remainders larger than this are abandoned.
pub const MAX_TERMS: usize = 40_000;

/// Pseudo-remainder of `f` by `g` in the variable `v`, made primitive over the integers.
/// `None` once an intermediate result exceeds [`MAX_TERMS`].
pub fn pseudo_remainder(
    f: &Polynomial,
    g: &Polynomial,
    v: usize,
    budget: &Budget,
) -> Result<Option<Polynomial>, GroebnerError> {
    let n = f.nvars();
    let d = g.degree_in(v);
    if d == 0 {
        return Ok(Some(f.clone()));
    }
    let lc = initial(g, v);
    let tail = g - &(&lc * &Polynomial::term(n, Monomial::var_pow(n, v, d), Rational::one()));
    let mut r = f.clone();
    while !r.is_zero() && r.degree_in(v) >= d {
        budget.check()?;
        let k = r.degree_in(v);
        let c = coefficient_in(&r, v, k);
        let lead = &c * &Polynomial::term(n, Monomial::var_pow(n, v, k), Rational::one());
        let shift = Polynomial::term(n, Monomial::var_pow(n, v, k - d), Rational::one());
        r = &(&lc * &(&r - &lead)) - &(&(&c * &shift) * &tail);
        r = primitive(r);
        if r.len() > MAX_TERMS {
            return Ok(None);
        }
    }
    Ok(Some(r))
}

/// Highest variable of `order` occurring in `p`, as a position in `order`.
fn class(p: &Polynomial, order: &[usize]) -> Option<usize> {
    order.iter().rposition(|&v| p.uses_var(v))
}

/// Brings `hyps` into triangular form along `order` (lowest first): one polynomial per
/// variable, each with that variable as its highest. Variables outside `order` are
/// parameters. Returns `None` if some variable ends up unconstrained or a relation among
/// the parameters alone appears.
pub fn triangulate(
    hyps: &[Polynomial],
    order: &[usize],
    budget: &Budget,
) -> Result<Option<Vec<(usize, Polynomial)>>, GroebnerError> {
    let mut pool: Vec<Polynomial> = hyps.iter().filter(|h| !h.is_zero()).cloned().collect();
    let mut out = Vec::with_capacity(order.len());
    for pos in (0..order.len()).rev() {
        let v = order[pos];
        let (mut level, rest): (Vec<Polynomial>, Vec<Polynomial>) =
            pool.into_iter().partition(|p| class(p, order) == Some(pos));
        pool = rest;
        while level.len() > 1 {
            budget.check()?;
            let best = (0..level.len())
                .min_by_key(|&i| (level[i].degree_in(v), level[i].len()))
                .unwrap();
            let g = level.swap_remove(best);
            let mut next = vec![];
            for f in level {
                let Some(r) = pseudo_remainder(&f, &g, v, budget)? else {
                    return Ok(None);
                };
                if r.is_zero() {
                    continue;
                }
                if class(&r, order) == Some(pos) {
                    next.push(r);
                } else {
                    pool.push(r);
                }
            }
            next.push(g);
            level = next;
        }
        match level.pop() {
            Some(g) => out.push((v, g)),
            None => return Ok(None),
        }
    }
    if pool.iter().any(|p| !p.is_zero()) {
        return Ok(None);
    }
    out.reverse();
    Ok(Some(out))
}

/// Successive pseudo-remainder of `f` by a triangular set, highest variable first.
/// `None` when a remainder grows past [`MAX_TERMS`].
pub fn reduce_by_chain(
    f: &Polynomial,
    chain: &[(usize, Polynomial)],
    budget: &Budget,
) -> Result<Option<Polynomial>, GroebnerError> {
    let mut r = f.clone();
    for (v, g) in chain.iter().rev() {
        if r.is_zero() {
            break;
        }
        match pseudo_remainder(&r, g, *v, budget)? {
            Some(next) => r = next,
            None => return Ok(None),
        }
    }
    Ok(Some(r))
}

/// True when `p` is clearly nonzero at `point`, relative to the size of its terms.
pub fn nonzero_at(p: &Polynomial, point: &[f64]) -> bool {
    let value = p.eval_f64(point);
    let size: f64 = p
        .terms()
        .map(|(m, c)| {
            let mono: f64 = m
                .exponents()
                .iter()
                .zip(point)
                .map(|(&e, &x)| x.powi(e as i32))
                .product();
            (crate::poly::rational_to_f64(c) * mono).abs()
        })
        .sum();
    value.is_finite() && value.abs() > 1e-8 * size.max(f64::MIN_POSITIVE)
}
