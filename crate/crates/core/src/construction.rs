//! Geometric constructions: an ordered list of steps producing points, with a numeric
//! instance kept alongside and the incidence facts each step implies by definition.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{rational_to_f64, Rational};
use crate::statement::{PointId, Statement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StepId(pub u32);

impl StepId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A line given by points of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LineRef {
    Through(PointId, PointId),
    /// Through `through`, parallel to `a b`.
    Parallel {
        a: PointId,
        b: PointId,
        through: PointId,
    },
    /// Through `through`, perpendicular to `a b`.
    Perpendicular {
        a: PointId,
        b: PointId,
        through: PointId,
    },
    PerpendicularBisector(PointId, PointId),
}

impl LineRef {
    pub fn points(&self) -> Vec<PointId> {
        match *self {
            LineRef::Through(a, b) | LineRef::PerpendicularBisector(a, b) => vec![a, b],
            LineRef::Parallel { a, b, through } | LineRef::Perpendicular { a, b, through } => {
                vec![a, b, through]
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CircleRef {
    /// Centered at `center`, passing through `through`.
    Center {
        center: PointId,
        through: PointId,
    },
    Through3(PointId, PointId, PointId),
}

impl CircleRef {
    pub fn points(&self) -> Vec<PointId> {
        match *self {
            CircleRef::Center { center, through } => vec![center, through],
            CircleRef::Through3(a, b, c) => vec![a, b, c],
        }
    }
}

/// Which of two intersection points a step picks.
///
/// For a line and a circle `First` is the one earlier along the line direction; for two
/// circles it is the one to the left of the ray from the first center to the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepKind {
    FreePoint {
        x: Rational,
        y: Rational,
    },
    Midpoint(PointId, PointId),
    IntersectLines(LineRef, LineRef),
    IntersectLineCircle {
        line: LineRef,
        circle: CircleRef,
        hint: (Rational, Rational),
    },
    IntersectCircles {
        first: CircleRef,
        second: CircleRef,
        hint: (Rational, Rational),
    },
    /// Foot of the perpendicular from `point` to `line`.
    Foot {
        point: PointId,
        line: LineRef,
    },
    PointOnLine {
        line: LineRef,
        hint: (Rational, Rational),
    },
    PointOnCircle {
        circle: CircleRef,
        hint: (Rational, Rational),
    },
    /// Counterclockwise regular polygon on the side `a b`; outputs vertices 3..=sides.
    RegularPolygon {
        a: PointId,
        b: PointId,
        sides: u32,
    },
}

impl StepKind {
    pub fn output_count(&self) -> usize {
        match self {
            StepKind::RegularPolygon { sides, .. } => sides.saturating_sub(2) as usize,
            _ => 1,
        }
    }

    /// Points this step reads.
    pub fn dependencies(&self) -> Vec<PointId> {
        let mut deps = match self {
            StepKind::FreePoint { .. } => vec![],
            StepKind::Midpoint(a, b) => vec![*a, *b],
            StepKind::IntersectLines(l1, l2) => [l1.points(), l2.points()].concat(),
            StepKind::IntersectLineCircle { line, circle, .. } => [line.points(), circle.points()].concat(),
            StepKind::IntersectCircles { first, second, .. } => [first.points(), second.points()].concat(),
            StepKind::Foot { point, line } => [vec![*point], line.points()].concat(),
            StepKind::PointOnLine { line, .. } => line.points(),
            StepKind::PointOnCircle { circle, .. } => circle.points(),
            StepKind::RegularPolygon { a, b, .. } => vec![*a, *b],
        };
        deps.sort();
        deps.dedup();
        deps
    }

    fn point_kind(&self) -> PointKind {
        match self {
            StepKind::FreePoint { .. } => PointKind::Free,
            StepKind::PointOnLine { .. } | StepKind::PointOnCircle { .. } => PointKind::SemiFree,
            _ => PointKind::Dependent,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            StepKind::FreePoint { .. } => "point",
            StepKind::Midpoint(..) => "midpoint",
            StepKind::IntersectLines(..) => "intersect",
            StepKind::IntersectLineCircle { .. } | StepKind::IntersectCircles { .. } => "intersect2",
            StepKind::Foot { .. } => "foot",
            StepKind::PointOnLine { .. } | StepKind::PointOnCircle { .. } => "on",
            StepKind::RegularPolygon { .. } => "regular_polygon",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Free,
    /// One degree of freedom along a line or circle.
    SemiFree,
    Dependent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeoPoint {
    pub id: PointId,
    pub name: String,
    pub step: StepId,
    pub coords: (f64, f64),
    pub kind: PointKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionStep {
    pub kind: StepKind,
    pub outputs: Vec<PointId>,
    /// Parameter of a free or semi-free step as stored in the construction.
    pub param: StepParam,
    pub branch: Option<Branch>,
}

/// Incidence implied by a single step's definition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialFact {
    pub statement: Statement,
    pub source: StepId,
}

/// Numeric degrees of freedom of one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepParam {
    None,
    /// Coordinates of a free point.
    Point(f64, f64),
    /// Line parameter or angle of a semi-free point.
    Scalar(f64),
}

/// Exact degrees of freedom of one step.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactParam {
    None,
    Point(Rational, Rational),
    Scalar(Rational),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("unknown point `{0}`")]
    UnknownReference(String),
    #[error("point `{0}` is already defined")]
    DuplicateName(String),
    #[error("{step} expects {expected} output name(s), got {got}")]
    OutputCount {
        step: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("degenerate {step} step: {reason}")]
    DegenerateStep {
        step: &'static str,
        reason: &'static str,
    },
    #[error("regular polygons need at least 3 sides")]
    TooFewSides,
}

/// Evaluation failed for this instance; callers should resample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("degenerate instance at step {step}: {reason}")]
pub struct DegenerateInstance {
    pub step: usize,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExactEvalError {
    #[error("step {0} has no rational evaluation")]
    NotRational(usize),
    #[error("step {0} is degenerate at this instance")]
    Degenerate(usize),
}

/// Relative threshold below which numeric configurations count as degenerate.
const DEGENERATE_EPS: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Construction {
    points: Vec<GeoPoint>,
    steps: Vec<ConstructionStep>,
    facts: Vec<TrivialFact>,
    hidden: BTreeSet<PointId>,
}

impl Construction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &[GeoPoint] {
        &self.points
    }

    pub fn point(&self, id: PointId) -> &GeoPoint {
        &self.points[id.index()]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn steps(&self) -> &[ConstructionStep] {
        &self.steps
    }

    pub fn step(&self, id: StepId) -> &ConstructionStep {
        &self.steps[id.index()]
    }

    pub fn trivial_facts(&self) -> &[TrivialFact] {
        &self.facts
    }

    pub fn name(&self, id: PointId) -> &str {
        &self.points[id.index()].name
    }

    pub fn find(&self, name: &str) -> Option<PointId> {
        self.points.iter().find(|p| p.name == name).map(|p| p.id)
    }

    pub fn coords(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| p.coords).collect()
    }

    pub fn hidden(&self) -> &BTreeSet<PointId> {
        &self.hidden
    }

    pub fn is_hidden(&self, id: PointId) -> bool {
        self.hidden.contains(&id)
    }

    pub fn set_hidden(&mut self, id: PointId, hidden: bool) {
        if hidden {
            self.hidden.insert(id);
        } else {
            self.hidden.remove(&id);
        }
    }

    /// Visible points in construction order.
    pub fn visible(&self) -> Vec<PointId> {
        self.points
            .iter()
            .map(|p| p.id)
            .filter(|id| !self.hidden.contains(id))
            .collect()
    }

    /// Appends a step. `names` label its outputs.
    pub fn apply_step(&mut self, names: &[&str], kind: StepKind) -> Result<StepId, ConstructionError> {
        let expected = kind.output_count();
        if let StepKind::RegularPolygon { sides, .. } = kind {
            if sides < 3 {
                return Err(ConstructionError::TooFewSides);
            }
        }
        if names.len() != expected {
            return Err(ConstructionError::OutputCount {
                step: kind.label(),
                expected,
                got: names.len(),
            });
        }
        for dep in kind.dependencies() {
            if dep.index() >= self.points.len() {
                return Err(ConstructionError::UnknownReference(dep.to_string()));
            }
        }
        for (i, n) in names.iter().enumerate() {
            if self.find(n).is_some() || names[..i].contains(n) {
                return Err(ConstructionError::DuplicateName(n.to_string()));
            }
        }
        let coords = self.coords();
        let degenerate = |reason| ConstructionError::DegenerateStep {
            step: kind.label(),
            reason,
        };
        let (param, branch) = resolve_hints(&kind, &coords).map_err(degenerate)?;
        let values = eval_step(&kind, param, branch, &coords).map_err(degenerate)?;

        let step_id = StepId(self.steps.len() as u32);
        let mut outputs = Vec::with_capacity(values.len());
        for (name, xy) in names.iter().zip(values) {
            let id = PointId(self.points.len() as u32);
            self.points.push(GeoPoint {
                id,
                name: name.to_string(),
                step: step_id,
                coords: xy,
                kind: kind.point_kind(),
            });
            outputs.push(id);
        }
        for statement in seed_facts(&kind, &outputs) {
            self.facts.push(TrivialFact {
                statement,
                source: step_id,
            });
        }
        self.steps.push(ConstructionStep {
            kind,
            outputs,
            param,
            branch,
        });
        Ok(step_id)
    }

    /// Convenience wrapper for a free point with exact coordinates.
    pub fn free_point(&mut self, name: &str, x: Rational, y: Rational) -> Result<PointId, ConstructionError> {
        let s = self.apply_step(&[name], StepKind::FreePoint { x, y })?;
        Ok(self.steps[s.index()].outputs[0])
    }

    pub fn add(&mut self, name: &str, kind: StepKind) -> Result<PointId, ConstructionError> {
        let s = self.apply_step(&[name], kind)?;
        Ok(self.steps[s.index()].outputs[0])
    }

    /// Parameters of the stored instance.
    pub fn params(&self) -> Vec<StepParam> {
        self.steps.iter().map(|s| s.param).collect()
    }

    /// Recomputes all coordinates top-down from the given step parameters.
    pub fn evaluate(&self, params: &[StepParam]) -> Result<Vec<(f64, f64)>, DegenerateInstance> {
        assert_eq!(params.len(), self.steps.len(), "one parameter per step");
        let mut coords: Vec<(f64, f64)> = Vec::with_capacity(self.points.len());
        for (i, step) in self.steps.iter().enumerate() {
            let values = eval_step(&step.kind, params[i], step.branch, &coords)
                .map_err(|reason| DegenerateInstance { step: i, reason })?;
            coords.extend(values);
        }
        Ok(coords)
    }

    /// Re-evaluates with new free point positions; semi-free points keep their parameters.
    pub fn evaluate_numeric(
        &self,
        free_coords: &BTreeMap<PointId, (f64, f64)>,
    ) -> Result<Vec<(f64, f64)>, DegenerateInstance> {
        let params: Vec<StepParam> = self
            .steps
            .iter()
            .map(|s| match (&s.kind, s.outputs.first()) {
                (StepKind::FreePoint { .. }, Some(id)) => match free_coords.get(id) {
                    Some(&(x, y)) => StepParam::Point(x, y),
                    None => s.param,
                },
                _ => s.param,
            })
            .collect();
        self.evaluate(&params)
    }

    /// True when every step can be evaluated over the rationals.
    pub fn is_rational(&self) -> bool {
        self.steps.iter().all(|s| step_is_rational(&s.kind))
    }

    /// Exact parameters of the stored instance, where they exist.
    pub fn exact_params(&self) -> Vec<ExactParam> {
        self.steps
            .iter()
            .map(|s| match &s.kind {
                StepKind::FreePoint { x, y } => ExactParam::Point(x.clone(), y.clone()),
                StepKind::PointOnLine { .. } => match s.param {
                    StepParam::Scalar(t) => {
                        ExactParam::Scalar(Rational::from_float(t).unwrap_or_else(Rational::zero))
                    }
                    _ => ExactParam::None,
                },
                _ => ExactParam::None,
            })
            .collect()
    }

    /// Exact evaluation for constructions without square roots.
    pub fn evaluate_exact(&self, params: &[ExactParam]) -> Result<Vec<(Rational, Rational)>, ExactEvalError> {
        assert_eq!(params.len(), self.steps.len(), "one parameter per step");
        let mut coords: Vec<(Rational, Rational)> = Vec::with_capacity(self.points.len());
        for (i, step) in self.steps.iter().enumerate() {
            let values = exact::eval_step(&step.kind, &params[i], &coords).map_err(|e| match e {
                exact::Failure::NotRational => ExactEvalError::NotRational(i),
                exact::Failure::Degenerate => ExactEvalError::Degenerate(i),
            })?;
            coords.extend(values);
        }
        Ok(coords)
    }

    /// Steps needed to construct `points`, in construction order.
    pub fn ancestor_steps(&self, points: &[PointId]) -> BTreeSet<StepId> {
        let mut needed = BTreeSet::new();
        let mut stack: Vec<StepId> = points.iter().map(|p| self.point(*p).step).collect();
        while let Some(s) = stack.pop() {
            if needed.insert(s) {
                for dep in self.steps[s.index()].kind.dependencies() {
                    stack.push(self.point(dep).step);
                }
            }
        }
        needed
    }

    /// Characteristic size of the numeric instance.
    pub fn scale(coords: &[(f64, f64)]) -> f64 {
        diameter(coords)
    }
}

pub(crate) fn diameter(points: &[(f64, f64)]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let (mut x0, mut x1, mut y0, mut y1) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt()
}

fn step_is_rational(kind: &StepKind) -> bool {
    match kind {
        StepKind::FreePoint { .. }
        | StepKind::Midpoint(..)
        | StepKind::IntersectLines(..)
        | StepKind::Foot { .. }
        | StepKind::PointOnLine { .. } => true,
        StepKind::RegularPolygon { sides, .. } => *sides == 4,
        _ => false,
    }
}

fn seed_facts(kind: &StepKind, outputs: &[PointId]) -> Vec<Statement> {
    fn on_line(line: &LineRef, x: PointId) -> Option<Statement> {
        match *line {
            LineRef::Through(a, b) => Some(Statement::Collinear([a, b, x])),
            LineRef::Parallel { a, b, through } => Some(Statement::Parallel([through, x], [a, b])),
            LineRef::Perpendicular { a, b, through } => Some(Statement::Perpendicular([through, x], [a, b])),
            LineRef::PerpendicularBisector(..) => None,
        }
    }
    fn on_circle(circle: &CircleRef, x: PointId) -> Option<Statement> {
        match *circle {
            CircleRef::Through3(a, b, c) => Some(Statement::Concyclic([a, b, c, x])),
            CircleRef::Center { .. } => None,
        }
    }
    let mut facts = Vec::new();
    let Some(&out) = outputs.first() else {
        return facts;
    };
    match kind {
        StepKind::Midpoint(a, b) => facts.push(Statement::Collinear([*a, *b, out])),
        StepKind::IntersectLines(l1, l2) => {
            facts.extend(on_line(l1, out));
            facts.extend(on_line(l2, out));
        }
        StepKind::IntersectLineCircle { line, circle, .. } => {
            facts.extend(on_line(line, out));
            facts.extend(on_circle(circle, out));
        }
        StepKind::IntersectCircles { first, second, .. } => {
            facts.extend(on_circle(first, out));
            facts.extend(on_circle(second, out));
        }
        StepKind::Foot { point, line } => {
            facts.extend(on_line(line, out));
            let dir = line_direction_points(line);
            match line {
                LineRef::Through(..) | LineRef::Parallel { .. } => {
                    facts.push(Statement::Perpendicular([*point, out], dir))
                }
                LineRef::Perpendicular { .. } | LineRef::PerpendicularBisector(..) => {
                    facts.push(Statement::Parallel([*point, out], dir))
                }
            }
        }
        StepKind::PointOnLine { line, .. } => facts.extend(on_line(line, out)),
        StepKind::PointOnCircle { circle, .. } => facts.extend(on_circle(circle, out)),
        StepKind::FreePoint { .. } | StepKind::RegularPolygon { .. } => {}
    }
    facts
}

/// The two points whose join gives the reference direction of the line (the line itself
/// for `Through`/`Parallel`, its normal for the perpendicular kinds).
fn line_direction_points(line: &LineRef) -> [PointId; 2] {
    match *line {
        LineRef::Through(a, b) | LineRef::PerpendicularBisector(a, b) => [a, b],
        LineRef::Parallel { a, b, .. } | LineRef::Perpendicular { a, b, .. } => [a, b],
    }
}

// ---- numeric evaluation ----

#[derive(Clone, Copy, Debug)]
struct Line2 {
    anchor: (f64, f64),
    dir: (f64, f64),
}

fn sub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}

fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn dot(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

fn norm(a: (f64, f64)) -> f64 {
    a.0.hypot(a.1)
}

fn magnitude(pts: &[(f64, f64)]) -> f64 {
    pts.iter().map(|p| p.0.abs().max(p.1.abs())).fold(1.0, f64::max)
}

fn line_of(line: &LineRef, c: &[(f64, f64)]) -> Result<Line2, &'static str> {
    let (a, b) = match *line {
        LineRef::Through(a, b) | LineRef::PerpendicularBisector(a, b) => (a, b),
        LineRef::Parallel { a, b, .. } | LineRef::Perpendicular { a, b, .. } => (a, b),
    };
    let (pa, pb) = (c[a.index()], c[b.index()]);
    let d = sub(pb, pa);
    if norm(d) <= DEGENERATE_EPS * magnitude(&[pa, pb]) {
        return Err("line defined by coincident points");
    }
    let rot = (-d.1, d.0);
    Ok(match *line {
        LineRef::Through(..) => Line2 { anchor: pa, dir: d },
        LineRef::Parallel { through, .. } => Line2 {
            anchor: c[through.index()],
            dir: d,
        },
        LineRef::Perpendicular { through, .. } => Line2 {
            anchor: c[through.index()],
            dir: rot,
        },
        LineRef::PerpendicularBisector(..) => Line2 {
            anchor: ((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0),
            dir: rot,
        },
    })
}

/// Center, squared radius, and the reference point used for angles.
/// Centre, radius and one point of a circle.
type CircleData = ((f64, f64), f64, (f64, f64));

fn circle_of(circle: &CircleRef, c: &[(f64, f64)]) -> Result<CircleData, &'static str> {
    match *circle {
        CircleRef::Center { center, through } => {
            let (o, a) = (c[center.index()], c[through.index()]);
            let r2 = dot(sub(a, o), sub(a, o));
            if r2.sqrt() <= DEGENERATE_EPS * magnitude(&[o, a]) {
                return Err("circle with zero radius");
            }
            Ok((o, r2, a))
        }
        CircleRef::Through3(a, b, cc) => {
            let (pa, pb, pc) = (c[a.index()], c[b.index()], c[cc.index()]);
            let (ab, ac) = (sub(pb, pa), sub(pc, pa));
            let d = 2.0 * cross(ab, ac);
            if d.abs() <= DEGENERATE_EPS * norm(ab) * norm(ac) {
                return Err("circle through collinear points");
            }
            let (b2, c2) = (dot(ab, ab), dot(ac, ac));
            let ox = (ac.1 * b2 - ab.1 * c2) / d;
            let oy = (ab.0 * c2 - ac.0 * b2) / d;
            let o = (pa.0 + ox, pa.1 + oy);
            Ok((o, ox * ox + oy * oy, pa))
        }
    }
}

fn line_circle_roots(l: &Line2, o: (f64, f64), r2: f64) -> Result<(f64, f64), &'static str> {
    // |anchor + t dir - o|^2 = r2
    let w = sub(l.anchor, o);
    let a = dot(l.dir, l.dir);
    let b = 2.0 * dot(l.dir, w);
    let cc = dot(w, w) - r2;
    let mut disc = b * b - 4.0 * a * cc;
    if disc < 0.0 {
        if disc > -DEGENERATE_EPS * b.abs().max(4.0 * a * r2) {
            disc = 0.0;
        } else {
            return Err("line misses circle");
        }
    }
    let s = disc.sqrt();
    Ok(((-b - s) / (2.0 * a), (-b + s) / (2.0 * a)))
}

type PointPair = ((f64, f64), (f64, f64));

fn circle_circle(o1: (f64, f64), r1sq: f64, o2: (f64, f64), r2sq: f64) -> Result<PointPair, &'static str> {
    let d = sub(o2, o1);
    let dist2 = dot(d, d);
    if dist2.sqrt() <= DEGENERATE_EPS * magnitude(&[o1, o2]) {
        return Err("concentric circles");
    }
    let a = (r1sq - r2sq + dist2) / (2.0 * dist2.sqrt());
    let mut h2 = r1sq - a * a;
    if h2 < 0.0 {
        if h2 > -DEGENERATE_EPS * r1sq {
            h2 = 0.0;
        } else {
            return Err("circles do not meet");
        }
    }
    let dist = dist2.sqrt();
    let base = (o1.0 + a * d.0 / dist, o1.1 + a * d.1 / dist);
    let h = h2.sqrt();
    let off = (-d.1 / dist * h, d.0 / dist * h);
    // left of o1->o2 first
    Ok(((base.0 + off.0, base.1 + off.1), (base.0 - off.0, base.1 - off.1)))
}

fn resolve_hints(kind: &StepKind, c: &[(f64, f64)]) -> Result<(StepParam, Option<Branch>), &'static str> {
    let h = |hint: &(Rational, Rational)| (rational_to_f64(&hint.0), rational_to_f64(&hint.1));
    let closer = |p: (f64, f64), q: (f64, f64), hint: (f64, f64)| {
        if norm(sub(p, hint)) <= norm(sub(q, hint)) {
            Branch::First
        } else {
            Branch::Second
        }
    };
    Ok(match kind {
        StepKind::FreePoint { x, y } => (StepParam::Point(rational_to_f64(x), rational_to_f64(y)), None),
        StepKind::PointOnLine { line, hint } => {
            let l = line_of(line, c)?;
            let t = dot(sub(h(hint), l.anchor), l.dir) / dot(l.dir, l.dir);
            (StepParam::Scalar(t), None)
        }
        StepKind::PointOnCircle { circle, hint } => {
            let (o, _, start) = circle_of(circle, c)?;
            let (u, v) = (sub(start, o), sub(h(hint), o));
            (StepParam::Scalar(cross(u, v).atan2(dot(u, v))), None)
        }
        StepKind::IntersectLineCircle { line, circle, hint } => {
            let l = line_of(line, c)?;
            let (o, r2, _) = circle_of(circle, c)?;
            let (t1, t2) = line_circle_roots(&l, o, r2)?;
            let p = |t: f64| (l.anchor.0 + t * l.dir.0, l.anchor.1 + t * l.dir.1);
            (StepParam::None, Some(closer(p(t1), p(t2), h(hint))))
        }
        StepKind::IntersectCircles { first, second, hint } => {
            let (o1, r1, _) = circle_of(first, c)?;
            let (o2, r2, _) = circle_of(second, c)?;
            let (p, q) = circle_circle(o1, r1, o2, r2)?;
            (StepParam::None, Some(closer(p, q, h(hint))))
        }
        _ => (StepParam::None, None),
    })
}

fn eval_step(
    kind: &StepKind,
    param: StepParam,
    branch: Option<Branch>,
    c: &[(f64, f64)],
) -> Result<Vec<(f64, f64)>, &'static str> {
    let out = match kind {
        StepKind::FreePoint { .. } => match param {
            StepParam::Point(x, y) => vec![(x, y)],
            _ => return Err("free point without coordinates"),
        },
        StepKind::Midpoint(a, b) => {
            let (pa, pb) = (c[a.index()], c[b.index()]);
            vec![((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0)]
        }
        StepKind::IntersectLines(l1, l2) => {
            let (m, n) = (line_of(l1, c)?, line_of(l2, c)?);
            let den = cross(m.dir, n.dir);
            if den.abs() <= DEGENERATE_EPS * norm(m.dir) * norm(n.dir) {
                return Err("parallel lines");
            }
            let t = cross(sub(n.anchor, m.anchor), n.dir) / den;
            vec![(m.anchor.0 + t * m.dir.0, m.anchor.1 + t * m.dir.1)]
        }
        StepKind::IntersectLineCircle { line, circle, .. } => {
            let l = line_of(line, c)?;
            let (o, r2, _) = circle_of(circle, c)?;
            let (t1, t2) = line_circle_roots(&l, o, r2)?;
            let t = if branch == Some(Branch::Second) { t2 } else { t1 };
            vec![(l.anchor.0 + t * l.dir.0, l.anchor.1 + t * l.dir.1)]
        }
        StepKind::IntersectCircles { first, second, .. } => {
            let (o1, r1, _) = circle_of(first, c)?;
            let (o2, r2, _) = circle_of(second, c)?;
            let (p, q) = circle_circle(o1, r1, o2, r2)?;
            vec![if branch == Some(Branch::Second) { q } else { p }]
        }
        StepKind::Foot { point, line } => {
            let l = line_of(line, c)?;
            let p = c[point.index()];
            let t = dot(sub(p, l.anchor), l.dir) / dot(l.dir, l.dir);
            vec![(l.anchor.0 + t * l.dir.0, l.anchor.1 + t * l.dir.1)]
        }
        StepKind::PointOnLine { line, .. } => {
            let l = line_of(line, c)?;
            let StepParam::Scalar(t) = param else {
                return Err("semi-free point without parameter");
            };
            vec![(l.anchor.0 + t * l.dir.0, l.anchor.1 + t * l.dir.1)]
        }
        StepKind::PointOnCircle { circle, .. } => {
            let (o, _, start) = circle_of(circle, c)?;
            let StepParam::Scalar(theta) = param else {
                return Err("semi-free point without parameter");
            };
            let u = sub(start, o);
            let (s, co) = theta.sin_cos();
            vec![(o.0 + co * u.0 - s * u.1, o.1 + s * u.0 + co * u.1)]
        }
        StepKind::RegularPolygon { a, b, sides } => {
            let (pa, pb) = (c[a.index()], c[b.index()]);
            let side = sub(pb, pa);
            if norm(side) <= DEGENERATE_EPS * magnitude(&[pa, pb]) {
                return Err("polygon side of zero length");
            }
            let mut out = Vec::new();
            let mut cur = pb;
            for k in 1..(*sides as usize - 1) {
                let (s, co) = rotation(*sides, k);
                let step = (co * side.0 - s * side.1, s * side.0 + co * side.1);
                cur = (cur.0 + step.0, cur.1 + step.1);
                out.push(cur);
            }
            out
        }
    };
    if out.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err("non-finite coordinates");
    }
    Ok(out)
}

/// `(sin, cos)` of `k` exterior angles of a regular `n`-gon, exact for the common cases.
fn rotation(n: u32, k: usize) -> (f64, f64) {
    let quarters = k as u64 * 4;
    if quarters.is_multiple_of(n as u64) {
        return match (quarters / n as u64) % 4 {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
    }
    let angle = 2.0 * PI * k as f64 / n as f64;
    angle.sin_cos()
}

mod exact {
    //! Exact evaluation over the rationals for the steps that admit it.

    use super::*;

    pub(super) enum Failure {
        NotRational,
        Degenerate,
    }

    type P = (Rational, Rational);

    fn sub(a: &P, b: &P) -> P {
        (&a.0 - &b.0, &a.1 - &b.1)
    }

    fn cross(a: &P, b: &P) -> Rational {
        &a.0 * &b.1 - &a.1 * &b.0
    }

    fn dot(a: &P, b: &P) -> Rational {
        &a.0 * &b.0 + &a.1 * &b.1
    }

    fn line(l: &LineRef, c: &[P]) -> Result<(P, P), Failure> {
        let (a, b) = match *l {
            LineRef::Through(a, b) | LineRef::PerpendicularBisector(a, b) => (a, b),
            LineRef::Parallel { a, b, .. } | LineRef::Perpendicular { a, b, .. } => (a, b),
        };
        let (pa, pb) = (&c[a.index()], &c[b.index()]);
        let d = sub(pb, pa);
        if d.0.is_zero() && d.1.is_zero() {
            return Err(Failure::Degenerate);
        }
        let rot = (-d.1.clone(), d.0.clone());
        let two = Rational::from_integer(2.into());
        Ok(match *l {
            LineRef::Through(..) => (pa.clone(), d),
            LineRef::Parallel { through, .. } => (c[through.index()].clone(), d),
            LineRef::Perpendicular { through, .. } => (c[through.index()].clone(), rot),
            LineRef::PerpendicularBisector(..) => (((&pa.0 + &pb.0) / &two, (&pa.1 + &pb.1) / &two), rot),
        })
    }

    fn along(anchor: &P, dir: &P, t: &Rational) -> P {
        (&anchor.0 + t * &dir.0, &anchor.1 + t * &dir.1)
    }

    pub(super) fn eval_step(kind: &StepKind, param: &ExactParam, c: &[P]) -> Result<Vec<P>, Failure> {
        Ok(match kind {
            StepKind::FreePoint { .. } => match param {
                ExactParam::Point(x, y) => vec![(x.clone(), y.clone())],
                _ => return Err(Failure::Degenerate),
            },
            StepKind::Midpoint(a, b) => {
                let two = Rational::from_integer(2.into());
                let (pa, pb) = (&c[a.index()], &c[b.index()]);
                vec![((&pa.0 + &pb.0) / &two, (&pa.1 + &pb.1) / two)]
            }
            StepKind::IntersectLines(l1, l2) => {
                let (am, dm) = line(l1, c)?;
                let (an, dn) = line(l2, c)?;
                let den = cross(&dm, &dn);
                if den.is_zero() {
                    return Err(Failure::Degenerate);
                }
                let t = cross(&sub(&an, &am), &dn) / den;
                vec![along(&am, &dm, &t)]
            }
            StepKind::Foot { point, line: l } => {
                let (a, d) = line(l, c)?;
                let t = dot(&sub(&c[point.index()], &a), &d) / dot(&d, &d);
                vec![along(&a, &d, &t)]
            }
            StepKind::PointOnLine { line: l, .. } => {
                let (a, d) = line(l, c)?;
                let ExactParam::Scalar(t) = param else {
                    return Err(Failure::Degenerate);
                };
                vec![along(&a, &d, t)]
            }
            StepKind::RegularPolygon { a, b, sides: 4 } => {
                let (pa, pb) = (&c[a.index()], &c[b.index()]);
                let d = sub(pb, pa);
                let rot = (-d.1.clone(), d.0.clone());
                if d.0.is_zero() && d.1.is_zero() {
                    return Err(Failure::Degenerate);
                }
                let p3 = (&pb.0 + &rot.0, &pb.1 + &rot.1);
                let p4 = (&pa.0 + &rot.0, &pa.1 + &rot.1);
                vec![p3, p4]
            }
            _ => return Err(Failure::NotRational),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn triangle() -> (Construction, PointId, PointId, PointId) {
        let mut c = Construction::new();
        let a = c.free_point("A", q(0), q(0)).unwrap();
        let b = c.free_point("B", q(4), q(0)).unwrap();
        let cc = c.free_point("C", q(2), q(2)).unwrap();
        (c, a, b, cc)
    }

    #[test]
    fn single_free_point() {
        let mut c = Construction::new();
        let a = c.free_point("A", q(0), q(0)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.point(a).coords, (0.0, 0.0));
        assert_eq!(c.point(a).kind, PointKind::Free);
    }

    #[test]
    fn midpoint_seeds_collinearity() {
        let (mut c, _, b, cc) = triangle();
        let d = c.add("D", StepKind::Midpoint(b, cc)).unwrap();
        assert_eq!(c.point(d).coords, (3.0, 1.0));
        assert_eq!(c.trivial_facts().len(), 1);
        assert_eq!(c.trivial_facts()[0].statement, Statement::Collinear([b, cc, d]));
        let exact = c.evaluate_exact(&c.exact_params()).unwrap();
        assert_eq!(exact[d.index()], (q(3), q(1)));
    }

    #[test]
    fn identical_lines_are_degenerate() {
        let mut c = Construction::new();
        let a = c.free_point("A", q(0), q(0)).unwrap();
        let b = c.free_point("B", q(4), q(0)).unwrap();
        let err = c
            .add(
                "G",
                StepKind::IntersectLines(LineRef::Through(a, b), LineRef::Through(a, b)),
            )
            .unwrap_err();
        assert!(matches!(err, ConstructionError::DegenerateStep { .. }));
    }

    #[test]
    fn unknown_reference_and_duplicates() {
        let (mut c, a, _, _) = triangle();
        assert!(matches!(
            c.add("X", StepKind::Midpoint(a, PointId(9))),
            Err(ConstructionError::UnknownReference(_))
        ));
        assert!(matches!(
            c.add("A", StepKind::Midpoint(a, a)),
            Err(ConstructionError::DuplicateName(_))
        ));
    }

    fn parallelogram() -> (Construction, [PointId; 6]) {
        let mut c = Construction::new();
        let p1 = c.free_point("P1", q(0), q(0)).unwrap();
        let p2 = c.free_point("P2", q(4), q(0)).unwrap();
        let p3 = c.free_point("P3", q(5), q(3)).unwrap();
        let p4 = c
            .add(
                "P4",
                StepKind::IntersectLines(
                    LineRef::Parallel {
                        a: p1,
                        b: p2,
                        through: p3,
                    },
                    LineRef::Parallel {
                        a: p2,
                        b: p3,
                        through: p1,
                    },
                ),
            )
            .unwrap();
        let p5 = c.add("P5", StepKind::Midpoint(p1, p3)).unwrap();
        let p6 = c.add("P6", StepKind::Midpoint(p2, p4)).unwrap();
        (c, [p1, p2, p3, p4, p5, p6])
    }

    #[test]
    fn parallelogram_diagonals_bisect() {
        let (c, [p1, p2, p3, p4, p5, p6]) = parallelogram();
        let exact = c.evaluate_exact(&c.exact_params()).unwrap();
        assert_eq!(exact[p4.index()], (q(1), q(3)));
        let half = Rational::new(5.into(), 2.into());
        let y = Rational::new(3.into(), 2.into());
        assert_eq!(exact[p5.index()], (half.clone(), y.clone()));
        assert_eq!(exact[p6.index()], (half, y));

        let mut moved = BTreeMap::new();
        moved.insert(p1, (-1.5, 0.25));
        moved.insert(p2, (3.0, -2.0));
        moved.insert(p3, (7.0, 4.5));
        let coords = c.evaluate_numeric(&moved).unwrap();
        let (a, b) = (coords[p5.index()], coords[p6.index()]);
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        let _ = p4;
    }

    #[test]
    fn coincident_line_points_give_degenerate_instance() {
        let (c, [p1, p2, p3, ..]) = parallelogram();
        let mut moved = BTreeMap::new();
        moved.insert(p1, (1.0, 1.0));
        moved.insert(p2, (1.0, 1.0));
        moved.insert(p3, (5.0, 3.0));
        assert!(c.evaluate_numeric(&moved).is_err());
    }

    #[test]
    fn evaluation_is_deterministic() {
        let (c, _) = parallelogram();
        let a = c.evaluate(&c.params()).unwrap();
        let b = c.evaluate(&c.params()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c.coords());
    }

    #[test]
    fn regular_hexagon_vertices() {
        let mut c = Construction::new();
        let a = c.free_point("A", q(0), q(0)).unwrap();
        let b = c.free_point("B", q(1), q(0)).unwrap();
        c.apply_step(&["C", "D", "E", "F"], StepKind::RegularPolygon { a, b, sides: 6 })
            .unwrap();
        let s3 = 3f64.sqrt();
        let expect = [(1.5, s3 / 2.0), (1.0, s3), (0.0, s3), (-0.5, s3 / 2.0)];
        for (i, e) in expect.iter().enumerate() {
            let p = c.points()[2 + i].coords;
            assert!(
                (p.0 - e.0).abs() < 1e-12 && (p.1 - e.1).abs() < 1e-12,
                "{i}: {p:?}"
            );
        }
    }

    #[test]
    fn branch_hint_selects_nearest_intersection() {
        let mut c = Construction::new();
        let o = c.free_point("O", q(0), q(0)).unwrap();
        let a = c.free_point("A", q(5), q(0)).unwrap();
        let p = c.free_point("P", q(-10), q(3)).unwrap();
        let r = c.free_point("R", q(10), q(3)).unwrap();
        let x = c
            .add(
                "X",
                StepKind::IntersectLineCircle {
                    line: LineRef::Through(p, r),
                    circle: CircleRef::Center {
                        center: o,
                        through: a,
                    },
                    hint: (q(4), q(3)),
                },
            )
            .unwrap();
        let xy = c.point(x).coords;
        assert!((xy.0 - 4.0).abs() < 1e-12 && (xy.1 - 3.0).abs() < 1e-12);
        // small perturbation keeps the branch
        let mut moved = BTreeMap::new();
        moved.insert(p, (-10.0, 3.1));
        let coords = c.evaluate_numeric(&moved).unwrap();
        assert!(coords[x.index()].0 > 0.0);
    }

    #[test]
    fn ancestors_follow_dependencies() {
        let (c, [p1, p2, p3, p4, p5, _]) = parallelogram();
        let steps = c.ancestor_steps(&[p5]);
        let ids: Vec<u32> = steps.iter().map(|s| s.0).collect();
        assert_eq!(
            ids,
            vec![c.point(p1).step.0, c.point(p3).step.0, c.point(p5).step.0]
        );
        assert_eq!(c.ancestor_steps(&[p4]).len(), 4);
        let _ = p2;
    }
}
