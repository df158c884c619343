//! Floating-point predicates over numeric instances, and resampling of constructions.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::construction::{diameter, Construction, StepKind, StepParam};
use crate::statement::Statement;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_RESAMPLES: usize = 4;
pub const SAMPLE_BOX: f64 = 10.0;
const MAX_DRAWS_PER_SAMPLE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("too many degenerate draws while resampling")]
    ResampleExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericConfig {
    pub tolerance: f64,
    pub resamples: usize,
    pub seed: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            tolerance: DEFAULT_TOLERANCE,
            resamples: DEFAULT_RESAMPLES,
            seed: 0,
        }
    }
}

type Pt = (f64, f64);

fn d(a: Pt, b: Pt) -> Pt {
    (b.0 - a.0, b.1 - a.1)
}

/// Evaluates a predicate on the statement's points. `figure_scale` is only used for
/// identity, whose own point set has no extent when it holds.
pub fn numeric_predicate(
    stmt: &Statement,
    coords: &[Pt],
    tol: f64,
    figure_scale: f64,
) -> Result<bool, NumericError> {
    let pts: Vec<Pt> = stmt.points().iter().map(|p| coords[p.index()]).collect();
    if pts.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(NumericError::NonFinite);
    }
    // translate to the first point to limit cancellation
    let o = pts[0];
    let pts: Vec<Pt> = pts.iter().map(|&p| d(o, p)).collect();
    let scale = diameter(&pts);
    let s2 = scale * scale;
    Ok(match stmt {
        Statement::Identical(..) => {
            let v = pts[1];
            v.0.abs().max(v.1.abs()) <= tol * figure_scale
        }
        Statement::Collinear(_) => {
            let (u, v) = (pts[1], pts[2]);
            (u.0 * v.1 - u.1 * v.0).abs() <= tol * s2
        }
        Statement::Concyclic(_) => {
            // rows (x, y, x²+y²) relative to the first point
            let r: Vec<[f64; 3]> = pts[1..]
                .iter()
                .map(|p| [p.0, p.1, p.0 * p.0 + p.1 * p.1])
                .collect();
            let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
            det.abs() <= tol * s2 * s2
        }
        Statement::Parallel(..) => {
            let (u, v) = (d(pts[0], pts[1]), d(pts[2], pts[3]));
            (u.0 * v.1 - u.1 * v.0).abs() <= tol * s2
        }
        Statement::Perpendicular(..) => {
            let (u, v) = (d(pts[0], pts[1]), d(pts[2], pts[3]));
            (u.0 * v.0 + u.1 * v.1).abs() <= tol * s2
        }
        Statement::Congruent(..) => {
            let (u, v) = (d(pts[0], pts[1]), d(pts[2], pts[3]));
            ((u.0 * u.0 + u.1 * u.1) - (v.0 * v.0 + v.1 * v.1)).abs() <= tol * s2
        }
    })
}

/// The original instance plus `k` random re-instantiations of a construction.
#[derive(Clone, Debug)]
pub struct NumericSamples {
    instances: Vec<Vec<Pt>>,
    scales: Vec<f64>,
    tol: f64,
}

impl NumericSamples {
    pub fn new(c: &Construction, config: &NumericConfig) -> Result<Self, NumericError> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut instances = vec![c.coords()];
        for _ in 0..config.resamples {
            instances.push(draw_instance(c, &mut rng)?);
        }
        let scales = instances
            .iter()
            .map(|i| diameter(i).max(f64::MIN_POSITIVE))
            .collect();
        Ok(NumericSamples {
            instances,
            scales,
            tol: config.tolerance,
        })
    }

    pub fn instances(&self) -> &[Vec<Pt>] {
        &self.instances
    }

    /// True iff the predicate holds on every instance.
    pub fn check(&self, stmt: &Statement) -> bool {
        self.instances
            .iter()
            .zip(&self.scales)
            .all(|(inst, &s)| numeric_predicate(stmt, inst, self.tol, s).unwrap_or(false))
    }

    /// Checks only the stored instance.
    pub fn check_original(&self, stmt: &Statement) -> bool {
        numeric_predicate(stmt, &self.instances[0], self.tol, self.scales[0]).unwrap_or(false)
    }
}

/// Random parameters for one instance: free points uniform in the sampling box, semi-free
/// points moved along their object.
pub fn random_params(c: &Construction, rng: &mut impl Rng) -> Vec<StepParam> {
    c.steps()
        .iter()
        .map(|s| match s.kind {
            StepKind::FreePoint { .. } => StepParam::Point(
                rng.gen_range(-SAMPLE_BOX..SAMPLE_BOX),
                rng.gen_range(-SAMPLE_BOX..SAMPLE_BOX),
            ),
            StepKind::PointOnLine { .. } => StepParam::Scalar(rng.gen_range(-2.0..2.0)),
            StepKind::PointOnCircle { .. } => StepParam::Scalar(rng.gen_range(0.0..2.0 * PI)),
            _ => s.param,
        })
        .collect()
}

/// Draws one non-degenerate instance, retrying degenerate draws a bounded number of times.
pub fn draw_instance(c: &Construction, rng: &mut impl Rng) -> Result<Vec<Pt>, NumericError> {
    for _ in 0..MAX_DRAWS_PER_SAMPLE {
        let params = random_params(c, rng);
        if let Ok(coords) = c.evaluate(&params) {
            if !has_spurious_coincidence(c, &coords) {
                return Ok(coords);
            }
        }
    }
    Err(NumericError::ResampleExhausted)
}

/// Rejects draws where points that differ in the stored instance land on top of each other.
fn has_spurious_coincidence(c: &Construction, coords: &[Pt]) -> bool {
    let orig = c.coords();
    let (s0, s1) = (diameter(&orig), diameter(coords));
    if s1 <= 0.0 {
        return !coords.is_empty() && s0 > 0.0;
    }
    for i in 0..coords.len() {
        for j in 0..i {
            let near = |p: Pt, q: Pt, s: f64| (p.0 - q.0).hypot(p.1 - q.1) <= 1e-6 * s;
            if near(coords[i], coords[j], s1) && !near(orig[i], orig[j], s0) {
                return true;
            }
        }
    }
    false
}

/// True iff `stmt` holds at the stored instance and at `k` seeded random re-instantiations.
pub fn resample_check(
    c: &Construction,
    stmt: &Statement,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<bool, NumericError> {
    let samples = NumericSamples::new(
        c,
        &NumericConfig {
            tolerance: tol,
            resamples: k,
            seed,
        },
    )?;
    Ok(samples.check(stmt))
}
