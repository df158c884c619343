//! Gröbner bases over the rationals.
//!
//! The completion loop works on primitive integer polynomials (content removed after each
//! reduction) and selects critical pairs by the sugar strategy. Useless pairs are dropped
//! with the Gebauer–Möller installation, which subsumes Buchberger's coprime-leading-term
//! criterion. Time limits are cooperative: the deadline and the cancellation flag are
//! polled between pair reductions and every few reduction steps.

mod intpoly;

use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::poly::{Monomial, MonomialOrder, Polynomial};
pub(crate) use intpoly::IntPoly;
use intpoly::{reduce_full, reduce_tail, s_poly, Reducers};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("time budget exhausted")]
    Timeout,
    #[error("computation cancelled")]
    Cancelled,
}

/// Wall-clock limit plus an optional external cancellation flag.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    cancel: Option<Arc<AtomicBool>>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn with_timeout(limit: Duration) -> Self {
        Budget {
            deadline: Some(Instant::now() + limit),
            cancel: None,
        }
    }

    pub fn cancelled_by(mut self, flag: Arc<AtomicBool>) -> Self {
        self.cancel = Some(flag);
        self
    }

    pub fn check(&self) -> Result<(), GroebnerError> {
        if let Some(flag) = &self.cancel {
            if flag.load(AtomicOrdering::Relaxed) {
                return Err(GroebnerError::Cancelled);
            }
        }
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(GroebnerError::Timeout),
            _ => Ok(()),
        }
    }
}

/// A Gröbner basis together with the order it was computed for.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub order: MonomialOrder,
    pub nvars: usize,
    /// Reduced and monic.
    pub polys: Vec<Polynomial>,
}

impl GroebnerBasis {
    /// Normal form of `f` modulo the basis.
    pub fn reduce(&self, f: &Polynomial) -> Polynomial {
        normal_form(f, &self.polys, self.order)
    }

    pub fn contains(&self, f: &Polynomial) -> bool {
        self.reduce(f).is_zero()
    }

    /// True when the ideal is the whole ring.
    pub fn is_unit_ideal(&self) -> bool {
        self.polys.iter().any(|p| !p.is_zero() && p.is_constant())
    }
}

/// Multivariate division over the rationals. Returns a remainder `r` with `f - r` in the
/// ideal generated by `basis` and no term of `r` divisible by a leading monomial of `basis`.
pub fn normal_form(f: &Polynomial, basis: &[Polynomial], order: MonomialOrder) -> Polynomial {
    let divisors: Vec<(Monomial, Polynomial)> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let g = g.monic(order);
            (g.leading_monomial(order).unwrap().clone(), g)
        })
        .collect();
    let mut p = f.clone();
    let mut r = Polynomial::zero(f.nvars());
    while let Some((m, c)) = p.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
        match divisors.iter().find(|(lm, _)| lm.divides(&m)) {
            Some((lm, g)) => {
                let q = lm.quotient_of(&m);
                p = &p - &g.mul_term(&q, &c);
            }
            None => {
                let t = Polynomial::term(f.nvars(), m.clone(), c.clone());
                r = &r + &t;
                p = &p - &t;
            }
        }
    }
    r
}

/// `lcm/lt(f) * f - lcm/lt(g) * g` with monic leading terms.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial, order: MonomialOrder) -> Polynomial {
    let (mf, cf) = f.leading_term(order).expect("s-polynomial of zero");
    let (mg, cg) = g.leading_term(order).expect("s-polynomial of zero");
    let lcm = mf.lcm(mg);
    let tf = mf.quotient_of(&lcm);
    let tg = mg.quotient_of(&lcm);
    &f.mul_term(&tf, &cf.recip()) - &g.mul_term(&tg, &cg.recip())
}

/// Checks Buchberger's criterion: every S-polynomial reduces to zero.
pub fn is_groebner_basis(basis: &[Polynomial], order: MonomialOrder) -> bool {
    let basis: Vec<&Polynomial> = basis.iter().filter(|p| !p.is_zero()).collect();
    let owned: Vec<Polynomial> = basis.iter().map(|p| (*p).clone()).collect();
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            let s = s_polynomial(basis[i], basis[j], order);
            if !normal_form(&s, &owned, order).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Computes the reduced Gröbner basis of the ideal generated by `generators`.
pub fn buchberger(
    generators: &[Polynomial],
    order: MonomialOrder,
    budget: &Budget,
) -> Result<GroebnerBasis, GroebnerError> {
    let nvars = generators.first().map(Polynomial::nvars).unwrap_or(0);
    let mut engine = Engine::new(order, budget);
    let ints: Vec<IntPoly> = generators
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| IntPoly::from_polynomial(g, order))
        .collect();
    match engine.run(ints, |_| false)? {
        Completion::Complete => {}
        Completion::Stopped(_) => unreachable!("predicate never stops"),
    }
    let polys = engine
        .reduced_basis()?
        .into_iter()
        .map(|p| p.to_polynomial(nvars).monic(order))
        .collect();
    Ok(GroebnerBasis { order, nvars, polys })
}

pub(crate) enum Completion {
    Complete,
    /// A new basis element satisfied the stop predicate.
    Stopped(IntPoly),
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

pub(crate) struct Engine<'b> {
    order: MonomialOrder,
    budget: &'b Budget,
    polys: Vec<IntPoly>,
    sugar: Vec<u32>,
    in_basis: Vec<bool>,
    pairs: Vec<Pair>,
    pub reductions: usize,
}

impl<'b> Engine<'b> {
    pub fn new(order: MonomialOrder, budget: &'b Budget) -> Self {
        Engine {
            order,
            budget,
            polys: Vec::new(),
            sugar: Vec::new(),
            in_basis: Vec::new(),
            pairs: Vec::new(),
            reductions: 0,
        }
    }

    fn reducers(&self) -> Reducers<'_> {
        Reducers::new(
            self.polys
                .iter()
                .zip(self.in_basis.iter())
                .filter(|(_, &b)| b)
                .map(|(p, _)| p)
                .collect(),
        )
    }

    /// Runs completion. `stop` is consulted on every new nonzero basis element.
    pub fn run(
        &mut self,
        generators: Vec<IntPoly>,
        stop: impl Fn(&IntPoly) -> bool,
    ) -> Result<Completion, GroebnerError> {
        for g in generators {
            self.budget.check()?;
            let sugar = g.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0);
            let h = reduce_full(g, &self.reducers(), self.order, self.budget)?;
            if h.is_zero() {
                continue;
            }
            if stop(&h) {
                return Ok(Completion::Stopped(h));
            }
            self.install(h, sugar);
        }
        while let Some(pair) = self.next_pair() {
            self.budget.check()?;
            let s = s_poly(&self.polys[pair.i], &self.polys[pair.j], self.order);
            if s.is_zero() {
                continue;
            }
            self.reductions += 1;
            let h = reduce_full(s, &self.reducers(), self.order, self.budget)?;
            if h.is_zero() {
                continue;
            }
            if stop(&h) {
                return Ok(Completion::Stopped(h));
            }
            self.install(h, pair.sugar);
        }
        Ok(Completion::Complete)
    }

    fn next_pair(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let order = self.order;
        let best = (0..self.pairs.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&self.pairs[a], &self.pairs[b]);
                pa.sugar.cmp(&pb.sugar).then_with(|| order.cmp(&pa.lcm, &pb.lcm))
            })
            .unwrap();
        Some(self.pairs.swap_remove(best))
    }

    /// Gebauer–Möller installation of a new element `h`.
    fn install(&mut self, h: IntPoly, sugar: u32) {
        let k = self.polys.len();
        let lm_h = h.lm().clone();
        let deg_h = lm_h.degree();

        // Candidate pairs (g, h) for g in the current basis.
        let mut cands: Vec<(usize, Monomial, bool)> = Vec::new();
        for (i, g) in self.polys.iter().enumerate() {
            if !self.in_basis[i] {
                continue;
            }
            let lcm = g.lm().lcm(&lm_h);
            let coprime = g.lm().is_coprime(&lm_h);
            cands.push((i, lcm, coprime));
        }

        // Chain criterion among the new pairs: a pair is dropped when another pending or
        // accepted pair has an lcm dividing its own. Coprime pairs are accepted here and
        // discarded afterwards (product criterion).
        let mut pending: std::collections::VecDeque<(usize, Monomial, bool)> = cands.into();
        let mut accepted: Vec<(usize, Monomial, bool)> = Vec::new();
        while let Some(cand) = pending.pop_front() {
            let dominated = pending
                .iter()
                .chain(accepted.iter())
                .any(|(_, l, _)| l.divides(&cand.1));
            if cand.2 || !dominated {
                accepted.push(cand);
            }
        }
        let mut new_pairs: Vec<Pair> = Vec::new();
        for (i, lcm, coprime) in accepted {
            if coprime {
                continue;
            }
            let gi = &self.polys[i];
            let s = (self.sugar[i] + lcm.degree() - gi.lm().degree()).max(sugar + lcm.degree() - deg_h);
            new_pairs.push(Pair {
                i,
                j: k,
                lcm,
                sugar: s,
            });
        }

        // Old pairs made redundant by h.
        let polys = &self.polys;
        self.pairs.retain(|p| {
            if !lm_h.divides(&p.lcm) {
                return true;
            }
            let l1 = polys[p.i].lm().lcm(&lm_h);
            let l2 = polys[p.j].lm().lcm(&lm_h);
            l1 == p.lcm || l2 == p.lcm
        });
        self.pairs.extend(new_pairs);

        for i in 0..self.polys.len() {
            if self.in_basis[i] && lm_h.divides(self.polys[i].lm()) {
                self.in_basis[i] = false;
            }
        }
        self.polys.push(h);
        self.sugar.push(sugar);
        self.in_basis.push(true);
    }

    /// Current basis elements (not necessarily reduced).
    pub fn basis(&self) -> Vec<&IntPoly> {
        self.polys
            .iter()
            .zip(self.in_basis.iter())
            .filter(|(_, &b)| b)
            .map(|(p, _)| p)
            .collect()
    }

    /// Interreduces the completed basis.
    pub fn reduced_basis(&self) -> Result<Vec<IntPoly>, GroebnerError> {
        let mut current: Vec<IntPoly> = self.basis().into_iter().cloned().collect();
        // minimal basis first: leading monomials are already pairwise non-divisible
        current.sort_by(|a, b| self.order.cmp(a.lm(), b.lm()));
        let mut out = Vec::with_capacity(current.len());
        for i in 0..current.len() {
            let others: Vec<&IntPoly> = current
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p)
                .collect();
            let reducers = Reducers::new(others);
            let reduced = reduce_tail(current[i].clone(), &reducers, self.order, self.budget)?;
            out.push(reduced);
        }
        Ok(out)
    }
}
