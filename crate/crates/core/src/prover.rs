//! Deciding statements over a construction.
//!
//! A thesis `T` is proved when some nonzero polynomial in the independent variables lies in
//! `⟨H, 1 - zT⟩`: then `T` vanishes wherever that non-degeneracy condition does not, i.e.
//! in general. The search runs Buchberger's algorithm under an order eliminating the
//! dependent variables and `z`, and stops at the first basis element free of them. A
//! completed basis without such an element refutes the thesis. Constructions computable
//! over the rationals are first tested at an exact random instance.

use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{algebraize_statement, subsystem, AlgebraicTranslation, Subsystem, SubsystemOptions};
use crate::construction::{Construction, ExactParam, StepKind};
use crate::groebner::{Budget, Completion, Engine, GroebnerError, IntPoly};
use crate::poly::{MonomialOrder, Polynomial, Rational};
use crate::statement::Statement;
use crate::triangular::{initial, nonzero_at, reduce_by_chain, triangulate};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Proved,
    Refuted,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownReason {
    Timeout,
    Cancelled,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// The thesis became zero after substituting linearly defined points.
    Substitution,
    /// A nonzero polynomial in the independent variables whose non-vanishing implies the thesis.
    NonDegeneracy { condition: String, basis_size: usize },
    /// Exact instance where the thesis is nonzero.
    Counterexample {
        coordinates: Vec<(String, String, String)>,
        value: String,
    },
    /// Completed basis with no element in the independent variables.
    EliminationIdealZero { basis_size: usize },
    /// Successive pseudo-division by a triangular form of the hypotheses left no remainder;
    /// holds wherever the listed initials do not vanish, which they do not on the figure.
    PseudoRemainder { initials: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofVerdict {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<UnknownReason>,
    /// One entry per proved thesis, or the refuting one.
    pub certificates: Vec<Certificate>,
}

impl ProofVerdict {
    fn unknown(reason: UnknownReason) -> Self {
        ProofVerdict {
            verdict: Verdict::Unknown,
            reason: Some(reason),
            certificates: Vec::new(),
        }
    }

    fn refuted(cert: Certificate) -> Self {
        ProofVerdict {
            verdict: Verdict::Refuted,
            reason: None,
            certificates: vec![cert],
        }
    }

    pub fn is_proved(&self) -> bool {
        self.verdict == Verdict::Proved
    }
}

#[derive(Clone, Debug)]
pub struct ProverConfig {
    pub timeout: Duration,
    pub pin: bool,
    pub seed: u64,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            timeout: DEFAULT_TIMEOUT,
            pin: false,
            seed: 0,
            cancel: None,
        }
    }
}

/// Decides whether `stmt` holds in general on the construction.
pub fn decide_statement(
    c: &Construction,
    t: &AlgebraicTranslation,
    stmt: &Statement,
    config: &ProverConfig,
) -> ProofVerdict {
    let mut budget = Budget::with_timeout(config.timeout);
    if let Some(flag) = &config.cancel {
        budget = budget.cancelled_by(flag.clone());
    }
    if c.is_rational() {
        if let Some(cert) = exact_counterexample(c, t, stmt, config.seed) {
            return ProofVerdict::refuted(cert);
        }
    }
    let sub = match subsystem(c, t, stmt, SubsystemOptions { pin: config.pin }) {
        Ok(s) => s,
        Err(_) => return ProofVerdict::unknown(UnknownReason::Inconclusive),
    };
    let values = sub.instance_values(c, t);
    decide_subsystem_at(&sub, values.as_deref(), &budget)
}

/// Runs the elimination test for every thesis of a prepared subsystem.
pub fn decide_subsystem(sub: &Subsystem, budget: &Budget) -> ProofVerdict {
    decide_subsystem_at(sub, None, budget)
}

/// Like [`decide_subsystem`], first trying pseudo-division when the subsystem's values at
/// the drawn figure are known.
pub fn decide_subsystem_at(sub: &Subsystem, values: Option<&[f64]>, budget: &Budget) -> ProofVerdict {
    let mut certificates = Vec::new();
    let chain = match values {
        Some(v) => match triangular_chain(sub, v, budget) {
            Ok(chain) => chain,
            Err(GroebnerError::Timeout) => return ProofVerdict::unknown(UnknownReason::Timeout),
            Err(GroebnerError::Cancelled) => return ProofVerdict::unknown(UnknownReason::Cancelled),
        },
        None => None,
    };
    for thesis in &sub.theses {
        if thesis.is_zero() {
            certificates.push(Certificate::Substitution);
            continue;
        }
        if let Some(chain) = &chain {
            match reduce_by_chain(thesis, chain, budget) {
                Ok(Some(r)) if r.is_zero() => {
                    certificates.push(Certificate::PseudoRemainder {
                        initials: chain
                            .iter()
                            .map(|(v, g)| initial(g, *v).to_string_with(&sub.variables))
                            .collect(),
                    });
                    continue;
                }
                Ok(_) => {}
                Err(GroebnerError::Timeout) => return ProofVerdict::unknown(UnknownReason::Timeout),
                Err(GroebnerError::Cancelled) => return ProofVerdict::unknown(UnknownReason::Cancelled),
            }
        }
        match prove_thesis(sub, thesis, budget) {
            Ok(Outcome::Proved(cert)) => certificates.push(cert),
            Ok(Outcome::Refuted(cert)) => return ProofVerdict::refuted(cert),
            Err(GroebnerError::Timeout) => return ProofVerdict::unknown(UnknownReason::Timeout),
            Err(GroebnerError::Cancelled) => return ProofVerdict::unknown(UnknownReason::Cancelled),
        }
    }
    ProofVerdict {
        verdict: Verdict::Proved,
        reason: None,
        certificates,
    }
}

/// Triangular form of the hypotheses whose initials are all nonzero at `values`.
fn triangular_chain(
    sub: &Subsystem,
    values: &[f64],
    budget: &Budget,
) -> Result<Option<Vec<(usize, Polynomial)>>, GroebnerError> {
    let n = sub.variables.len();
    let mut order: Vec<usize> = (0..n).filter(|&v| sub.constant[v]).collect();
    order.extend((0..n).filter(|&v| !sub.free[v] && !sub.constant[v]));
    let Some(chain) = triangulate(&sub.hypotheses, &order, budget)? else {
        return Ok(None);
    };
    let ok = chain.iter().all(|(v, g)| nonzero_at(&initial(g, *v), values));
    Ok(ok.then_some(chain))
}

enum Outcome {
    Proved(Certificate),
    Refuted(Certificate),
}

fn prove_thesis(sub: &Subsystem, thesis: &Polynomial, budget: &Budget) -> Result<Outcome, GroebnerError> {
    let n = sub.variables.len();
    // z first, then dependent variables with later points larger, then algebraic
    // constants, then the independent variables
    let mut order_vars: Vec<usize> = Vec::with_capacity(n);
    order_vars.extend((0..n).rev().filter(|&v| !sub.free[v] && !sub.constant[v]));
    order_vars.extend((0..n).filter(|&v| sub.constant[v]));
    let split = order_vars.len() + 1;
    order_vars.extend((0..n).filter(|v| sub.free[*v]));
    let mut map = vec![0usize; n];
    for (pos, &v) in order_vars.iter().enumerate() {
        map[v] = pos + 1;
    }
    let nv = n + 1;
    let order = MonomialOrder::Elimination { split };
    let lift = |p: &Polynomial| p.remap(&map, nv);

    let z = Polynomial::var(nv, 0);
    let rabinowitsch = &Polynomial::one(nv) - &(&z * &lift(thesis));
    let mut gens: Vec<IntPoly> = vec![IntPoly::from_polynomial(&rabinowitsch, order)];
    gens.extend(
        sub.hypotheses
            .iter()
            .map(|h| IntPoly::from_polynomial(&lift(h), order)),
    );
    // small generators first
    gens.sort_by_key(|g| (g.lm().degree(), g.terms.len()));

    let mut engine = Engine::new(order, budget);
    match engine.run(gens, |h| h.lm().avoids_prefix(split))? {
        Completion::Stopped(h) => {
            let mut names = vec!["z".to_string(); nv];
            for (v, &pos) in map.iter().enumerate() {
                names[pos] = sub.variables[v].clone();
            }
            let mut condition = h.to_polynomial(nv).to_string_with(&names);
            if condition.len() > 400 {
                condition.truncate(400);
                condition.push_str("...");
            }
            Ok(Outcome::Proved(Certificate::NonDegeneracy {
                condition,
                basis_size: engine.basis().len(),
            }))
        }
        Completion::Complete => Ok(Outcome::Refuted(Certificate::EliminationIdealZero {
            basis_size: engine.basis().len(),
        })),
    }
}

/// Random exact parameters: small rationals for free points and line parameters.
pub fn random_exact_params(c: &Construction, rng: &mut impl Rng) -> Vec<ExactParam> {
    let mut r = || Rational::new(rng.gen_range(-60i64..=60).into(), rng.gen_range(1i64..=7).into());
    c.steps()
        .iter()
        .map(|s| match s.kind {
            StepKind::FreePoint { .. } => ExactParam::Point(r(), r()),
            StepKind::PointOnLine { .. } => ExactParam::Scalar(r()),
            _ => ExactParam::None,
        })
        .collect()
}

/// Exact coordinates of a random generic instance, if one is found in a few draws.
pub fn random_exact_instance(c: &Construction, rng: &mut impl Rng) -> Option<Vec<(Rational, Rational)>> {
    for _ in 0..16 {
        let params = random_exact_params(c, rng);
        if let Ok(coords) = c.evaluate_exact(&params) {
            let distinct = coords.iter().enumerate().all(|(i, p)| {
                coords[..i]
                    .iter()
                    .enumerate()
                    .all(|(j, q)| p != q || c.points()[i].coords == c.points()[j].coords)
            });
            if distinct {
                return Some(coords);
            }
        }
    }
    None
}

/// Exact values of the statement's theses at the given point coordinates.
pub fn exact_thesis_values(
    t: &AlgebraicTranslation,
    stmt: &Statement,
    coords: &[(Rational, Rational)],
) -> Vec<Rational> {
    let mut point = vec![Rational::zero(); t.nvars()];
    for (i, (x, y)) in coords.iter().enumerate() {
        let (xv, yv) = t.var_map[i];
        point[xv] = x.clone();
        point[yv] = y.clone();
    }
    algebraize_statement(stmt, t)
        .map(|theses| theses.iter().map(|p| p.eval(&point)).collect())
        .unwrap_or_default()
}

fn exact_counterexample(
    c: &Construction,
    t: &AlgebraicTranslation,
    stmt: &Statement,
    seed: u64,
) -> Option<Certificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    let coords = random_exact_instance(c, &mut rng)?;
    let values = exact_thesis_values(t, stmt, &coords);
    let value = values.into_iter().find(|v| !v.is_zero())?;
    let mut pts: Vec<_> = stmt.points();
    pts.sort();
    pts.dedup();
    Some(Certificate::Counterexample {
        coordinates: pts
            .iter()
            .map(|p| {
                let (x, y) = &coords[p.index()];
                (c.name(*p).to_string(), x.to_string(), y.to_string())
            })
            .collect(),
        value: value.to_string(),
    })
}

/// Wall-clock helper for verdict logs.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}
