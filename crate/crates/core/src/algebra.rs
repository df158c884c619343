//! Polynomial translation of constructions and statements.
//!
//! Every geometric point owns two variables `x_P, y_P`. Semi-free points on lines add a
//! line parameter, and regular polygons add the algebraic numbers of their rotation.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::construction::{CircleRef, Construction, LineRef, StepId, StepKind};
use crate::groebner::{buchberger, normal_form, Budget};
use crate::poly::{Monomial, MonomialOrder, Polynomial, Rational};
use crate::statement::{PointId, Statement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("step {0} cannot be translated to polynomials")]
    UnsupportedStep(usize),
    #[error("statement refers to point {0} outside the translation")]
    UnsupportedStatement(PointId),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub poly: Polynomial,
    pub step: StepId,
}

/// Polynomial system of a construction.
#[derive(Clone, Debug)]
pub struct AlgebraicTranslation {
    /// Variable names: `x_A, y_A, ...` for points in construction order, then `aux_1, ...`.
    pub variables: Vec<String>,
    pub hypotheses: Vec<Hypothesis>,
    /// `(x, y)` variable indices per point.
    pub var_map: Vec<(usize, usize)>,
    /// Independent variables: coordinates of free points, parameters of semi-free points.
    pub free: Vec<bool>,
    /// Algebraic constants such as the rotation coefficients of regular polygons.
    pub constant: Vec<bool>,
    /// Step owning each variable.
    pub owner: Vec<StepId>,
}

impl AlgebraicTranslation {
    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn point_var_count(&self) -> usize {
        2 * self.var_map.len()
    }

    pub fn aux_count(&self) -> usize {
        self.variables.len() - self.point_var_count()
    }

    /// Plain-text dump for external cross-checking.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "variables: {}", self.variables.join(", "));
        let free: Vec<&str> = self
            .variables
            .iter()
            .zip(&self.free)
            .filter(|(_, f)| **f)
            .map(|(v, _)| v.as_str())
            .collect();
        let _ = writeln!(out, "independent: {}", free.join(", "));
        let _ = writeln!(out, "hypotheses:");
        for h in &self.hypotheses {
            let _ = writeln!(out, "  {}", h.poly.to_string_with(&self.variables));
        }
        out
    }

    /// Values of all variables at the construction's stored instance.
    pub fn instance_values(&self, c: &Construction) -> Vec<f64> {
        let mut vals = vec![0.0; self.nvars()];
        for (i, (x, y)) in c.coords().into_iter().enumerate() {
            let (xv, yv) = self.var_map[i];
            vals[xv] = x;
            vals[yv] = y;
        }
        for v in self.point_var_count()..self.nvars() {
            let step = self.owner[v];
            match &c.step(step).kind {
                StepKind::RegularPolygon { sides, .. } => {
                    let (sin, cos) = (2.0 * PI / *sides as f64).sin_cos();
                    let first = (self.point_var_count()..v).all(|u| self.owner[u] != step);
                    vals[v] = match rotation_kind(*sides) {
                        Rotation::Quadratic { r, .. } => (r as f64).sqrt(),
                        Rotation::General if first => cos,
                        Rotation::General => sin,
                        Rotation::Rational(..) => 0.0,
                    };
                }
                _ => {
                    // linear in its own parameter: h(v) = h(0) + v (h(1) - h(0))
                    let mut best = (0.0, 0.0);
                    for h in self
                        .hypotheses
                        .iter()
                        .filter(|h| h.step == step && h.poly.uses_var(v))
                    {
                        vals[v] = 0.0;
                        let h0 = h.poly.eval_f64(&vals);
                        vals[v] = 1.0;
                        let slope = h.poly.eval_f64(&vals) - h0;
                        if slope.abs() > best.1 {
                            best = (-h0 / slope, slope.abs());
                        }
                    }
                    vals[v] = best.0;
                }
            }
        }
        vals
    }

    fn x(&self, p: PointId) -> Polynomial {
        Polynomial::var(self.nvars(), self.var_map[p.index()].0)
    }

    fn y(&self, p: PointId) -> Polynomial {
        Polynomial::var(self.nvars(), self.var_map[p.index()].1)
    }

    fn pt(&self, p: PointId) -> (Polynomial, Polynomial) {
        (self.x(p), self.y(p))
    }
}

fn safe_name(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' })
        .collect()
}

type P2 = (Polynomial, Polynomial);

fn sub2(a: &P2, b: &P2) -> P2 {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn cross(a: &P2, b: &P2) -> Polynomial {
    &(&a.0 * &b.1) - &(&a.1 * &b.0)
}

fn dot(a: &P2, b: &P2) -> Polynomial {
    &(&a.0 * &b.0) + &(&a.1 * &b.1)
}

fn norm2(a: &P2) -> Polynomial {
    dot(a, a)
}

/// Determinant of rows `(dx, dy, dx²+dy²)` for `b, c, d` relative to `a`.
fn concyclic_det(a: &P2, b: &P2, c: &P2, d: &P2) -> Polynomial {
    let rows: Vec<[Polynomial; 3]> = [b, c, d]
        .iter()
        .map(|p| {
            let v = sub2(p, a);
            let n = norm2(&v);
            [v.0, v.1, n]
        })
        .collect();
    let m =
        |i: usize, j: usize, k: usize, l: usize| &(&rows[i][k] * &rows[j][l]) - &(&rows[i][l] * &rows[j][k]);
    let t0 = &rows[0][0] * &m(1, 2, 1, 2);
    let t1 = &rows[0][1] * &m(1, 2, 0, 2);
    let t2 = &rows[0][2] * &m(1, 2, 0, 1);
    &(&t0 - &t1) + &t2
}

/// Anchor and direction of a line. The anchor of a perpendicular bisector is scaled by 2.
struct LinePoly {
    anchor: P2,
    anchor_scale: i64,
    dir: P2,
}

fn rot90(v: &P2) -> P2 {
    (-&v.1, v.0.clone())
}

impl AlgebraicTranslation {
    fn line(&self, l: &LineRef) -> LinePoly {
        match *l {
            LineRef::Through(a, b) => LinePoly {
                anchor: self.pt(a),
                anchor_scale: 1,
                dir: sub2(&self.pt(b), &self.pt(a)),
            },
            LineRef::Parallel { a, b, through } => LinePoly {
                anchor: self.pt(through),
                anchor_scale: 1,
                dir: sub2(&self.pt(b), &self.pt(a)),
            },
            LineRef::Perpendicular { a, b, through } => LinePoly {
                anchor: self.pt(through),
                anchor_scale: 1,
                dir: rot90(&sub2(&self.pt(b), &self.pt(a))),
            },
            LineRef::PerpendicularBisector(a, b) => {
                let (pa, pb) = (self.pt(a), self.pt(b));
                LinePoly {
                    anchor: (&pa.0 + &pb.0, &pa.1 + &pb.1),
                    anchor_scale: 2,
                    dir: rot90(&sub2(&pb, &pa)),
                }
            }
        }
    }

    /// Polynomial vanishing iff `p` lies on the line.
    fn on_line(&self, l: &LineRef, p: &P2) -> Polynomial {
        let lp = self.line(l);
        let k = Polynomial::from_int(self.nvars(), lp.anchor_scale);
        let scaled = (&p.0 * &k, &p.1 * &k);
        cross(&lp.dir, &sub2(&scaled, &lp.anchor))
    }

    fn on_circle(&self, c: &CircleRef, p: &P2) -> Polynomial {
        match *c {
            CircleRef::Center { center, through } => {
                let o = self.pt(center);
                &norm2(&sub2(p, &o)) - &norm2(&sub2(&self.pt(through), &o))
            }
            CircleRef::Through3(a, b, c) => concyclic_det(&self.pt(a), &self.pt(b), &self.pt(c), p),
        }
    }
}

/// Integer coefficients of the minimal polynomial of `2 cos(2π/n)`, lowest degree first.
fn cos_minimal_poly(n: u32) -> Vec<i64> {
    let mut coeffs: Vec<f64> = vec![1.0];
    for k in 1..n {
        if 2 * k >= n || gcd(k, n) != 1 {
            continue;
        }
        let r = 2.0 * (2.0 * PI * k as f64 / n as f64).cos();
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * r;
        }
        coeffs = next;
    }
    coeffs.iter().map(|c| c.round() as i64).collect()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Rotation coefficients `(cos, sin)` of a regular `n`-gon's exterior angle, in terms of
/// the auxiliary variables of the step.
enum Rotation {
    /// Both rational.
    Rational(Rational, Rational),
    /// `cos = a + b·s`, `sin = c + d·s` with `s² = r`.
    Quadratic {
        r: i64,
        cos: (Rational, Rational),
        sin: (Rational, Rational),
    },
    /// Two auxiliaries `c, s` with `2c` a root of the minimal polynomial of `2cos(2π/n)`
    /// and `c² + s² = 1`.
    General,
}

fn rotation_kind(n: u32) -> Rotation {
    let q = |a: i64, b: i64| Rational::new(a.into(), b.into());
    match n {
        3 => Rotation::Quadratic {
            r: 3,
            cos: (q(-1, 2), q(0, 1)),
            sin: (q(0, 1), q(1, 2)),
        },
        4 => Rotation::Rational(q(0, 1), q(1, 1)),
        6 => Rotation::Quadratic {
            r: 3,
            cos: (q(1, 2), q(0, 1)),
            sin: (q(0, 1), q(1, 2)),
        },
        8 => Rotation::Quadratic {
            r: 2,
            cos: (q(0, 1), q(1, 2)),
            sin: (q(0, 1), q(1, 2)),
        },
        12 => Rotation::Quadratic {
            r: 3,
            cos: (q(0, 1), q(1, 2)),
            sin: (q(1, 2), q(0, 1)),
        },
        _ => Rotation::General,
    }
}

/// Translates a construction into its hypothesis system.
pub fn algebraize_construction(c: &Construction) -> Result<AlgebraicTranslation, AlgebraError> {
    // variable layout first
    let mut variables = Vec::new();
    let mut var_map = Vec::new();
    let mut owner = Vec::new();
    let mut free = Vec::new();
    let mut constant = Vec::new();
    for p in c.points() {
        let n = safe_name(&p.name);
        var_map.push((variables.len(), variables.len() + 1));
        variables.push(format!("x_{n}"));
        variables.push(format!("y_{n}"));
        owner.push(p.step);
        owner.push(p.step);
        let (fx, fy) = match &c.step(p.step).kind {
            StepKind::FreePoint { .. } => (true, true),
            StepKind::PointOnCircle { .. } => (true, false),
            _ => (false, false),
        };
        free.push(fx);
        free.push(fy);
        constant.extend([false, false]);
    }
    // auxiliaries per step
    let mut aux_of_step: Vec<Vec<usize>> = vec![Vec::new(); c.steps().len()];
    for (i, s) in c.steps().iter().enumerate() {
        let count = match &s.kind {
            StepKind::PointOnLine { .. } => 1,
            StepKind::RegularPolygon { sides, .. } => match rotation_kind(*sides) {
                Rotation::Rational(..) => 0,
                Rotation::Quadratic { .. } => 1,
                Rotation::General => 2,
            },
            _ => 0,
        };
        for _ in 0..count {
            aux_of_step[i].push(variables.len());
            variables.push(format!("aux_{}", variables.len() - 2 * var_map.len() + 1));
            owner.push(StepId(i as u32));
            free.push(matches!(s.kind, StepKind::PointOnLine { .. }));
            constant.push(matches!(s.kind, StepKind::RegularPolygon { .. }));
        }
    }
    let mut t = AlgebraicTranslation {
        variables,
        hypotheses: Vec::new(),
        var_map,
        free,
        constant,
        owner,
    };
    let nv = t.nvars();
    let int = |v: i64| Polynomial::from_int(nv, v);
    let ratp = |r: &Rational| Polynomial::constant(nv, r.clone());

    for (i, s) in c.steps().iter().enumerate() {
        let sid = StepId(i as u32);
        let mut hs: Vec<Polynomial> = Vec::new();
        let out = s.outputs.first().copied();
        match &s.kind {
            StepKind::FreePoint { .. } => {}
            StepKind::Midpoint(a, b) => {
                let d = out.unwrap();
                hs.push(&(&t.x(d) * &int(2)) - &(&t.x(*a) + &t.x(*b)));
                hs.push(&(&t.y(d) * &int(2)) - &(&t.y(*a) + &t.y(*b)));
            }
            StepKind::IntersectLines(l1, l2) => {
                let p = t.pt(out.unwrap());
                hs.push(t.on_line(l1, &p));
                hs.push(t.on_line(l2, &p));
            }
            StepKind::IntersectLineCircle { line, circle, .. } => {
                let p = t.pt(out.unwrap());
                hs.push(t.on_line(line, &p));
                hs.push(t.on_circle(circle, &p));
            }
            StepKind::IntersectCircles { first, second, .. } => {
                let p = t.pt(out.unwrap());
                hs.push(t.on_circle(first, &p));
                hs.push(t.on_circle(second, &p));
            }
            StepKind::Foot { point, line } => {
                let f = t.pt(out.unwrap());
                hs.push(t.on_line(line, &f));
                let lp = t.line(line);
                hs.push(dot(&lp.dir, &sub2(&f, &t.pt(*point))));
            }
            StepKind::PointOnLine { line, .. } => {
                let p = t.pt(out.unwrap());
                let lp = t.line(line);
                let tv = Polynomial::var(nv, aux_of_step[i][0]);
                let k = Rational::new(BigInt::one(), BigInt::from(lp.anchor_scale));
                let ax = lp.anchor.0.scale(&k);
                let ay = lp.anchor.1.scale(&k);
                hs.push(&(&p.0 - &ax) - &(&tv * &lp.dir.0));
                hs.push(&(&p.1 - &ay) - &(&tv * &lp.dir.1));
            }
            StepKind::PointOnCircle { circle, .. } => {
                let p = t.pt(out.unwrap());
                hs.push(t.on_circle(circle, &p));
            }
            StepKind::RegularPolygon { a, b, sides } => {
                let (cos, sin) = match rotation_kind(*sides) {
                    Rotation::Rational(c0, s0) => (ratp(&c0), ratp(&s0)),
                    Rotation::Quadratic { r, cos, sin } => {
                        let sv = Polynomial::var(nv, aux_of_step[i][0]);
                        hs.push(&(&sv * &sv) - &int(r));
                        (
                            &ratp(&cos.0) + &(&sv * &ratp(&cos.1)),
                            &ratp(&sin.0) + &(&sv * &ratp(&sin.1)),
                        )
                    }
                    Rotation::General => {
                        let cv = Polynomial::var(nv, aux_of_step[i][0]);
                        let sv = Polynomial::var(nv, aux_of_step[i][1]);
                        // minimal polynomial evaluated at 2c
                        let two_c = &cv * &int(2);
                        let mut mp = Polynomial::zero(nv);
                        let mut power = Polynomial::one(nv);
                        for coeff in cos_minimal_poly(*sides) {
                            mp = &mp + &(&power * &int(coeff));
                            power = &power * &two_c;
                        }
                        hs.push(mp);
                        hs.push(&(&(&cv * &cv) + &(&sv * &sv)) - &int(1));
                        (cv, sv)
                    }
                };
                let mut prev = t.pt(*a);
                let mut cur = t.pt(*b);
                for &v in &s.outputs {
                    let step = sub2(&cur, &prev);
                    let rx = &(&cos * &step.0) - &(&sin * &step.1);
                    let ry = &(&sin * &step.0) + &(&cos * &step.1);
                    let next = t.pt(v);
                    hs.push(&(&next.0 - &cur.0) - &rx);
                    hs.push(&(&next.1 - &cur.1) - &ry);
                    prev = cur;
                    cur = next;
                }
            }
        }
        for h in hs {
            if !h.is_zero() {
                t.hypotheses.push(Hypothesis { poly: h, step: sid });
            }
        }
    }
    Ok(t)
}

/// Thesis polynomials of a statement; identity yields one per coordinate.
pub fn algebraize_statement(
    stmt: &Statement,
    t: &AlgebraicTranslation,
) -> Result<Vec<Polynomial>, AlgebraError> {
    for p in stmt.points() {
        if p.index() >= t.var_map.len() {
            return Err(AlgebraError::UnsupportedStatement(p));
        }
    }
    let p = |i: PointId| t.pt(i);
    Ok(match *stmt {
        Statement::Identical(a, b) => vec![&t.x(a) - &t.x(b), &t.y(a) - &t.y(b)],
        Statement::Collinear([a, b, c]) => {
            vec![cross(&sub2(&p(b), &p(a)), &sub2(&p(c), &p(a)))]
        }
        Statement::Concyclic([a, b, c, d]) => vec![concyclic_det(&p(a), &p(b), &p(c), &p(d))],
        Statement::Parallel([a, b], [c, d]) => {
            vec![cross(&sub2(&p(b), &p(a)), &sub2(&p(d), &p(c)))]
        }
        Statement::Perpendicular([a, b], [c, d]) => {
            vec![dot(&sub2(&p(b), &p(a)), &sub2(&p(d), &p(c)))]
        }
        Statement::Congruent([a, b], [c, d]) => {
            vec![&norm2(&sub2(&p(b), &p(a))) - &norm2(&sub2(&p(d), &p(c)))]
        }
    })
}

/// A self-contained polynomial system for one statement, over a compact variable set.
#[derive(Clone, Debug)]
pub struct Subsystem {
    pub variables: Vec<String>,
    pub free: Vec<bool>,
    pub constant: Vec<bool>,
    pub hypotheses: Vec<Polynomial>,
    pub theses: Vec<Polynomial>,
    /// Relations among algebraic constants; also contained in `hypotheses`.
    pub constants: Vec<Polynomial>,
    /// Number of dependent variables removed by linear substitution.
    pub substitutions: usize,
    /// Index of each variable in the full translation.
    pub origin: Vec<usize>,
    /// Free points fixed at `(0,0)` and `(1,0)`, in that order.
    pub pinned: Vec<PointId>,
}

impl Subsystem {
    /// Values of the subsystem's variables at the stored instance, moved by the direct
    /// similarity that takes the pinned points to `(0,0)` and `(1,0)`.
    pub fn instance_values(&self, c: &Construction, t: &AlgebraicTranslation) -> Option<Vec<f64>> {
        let mut all = t.instance_values(c);
        if let Some(&p0) = self.pinned.first() {
            let (ox, oy) = (all[t.var_map[p0.index()].0], all[t.var_map[p0.index()].1]);
            // z -> (z - o) / (u - o) as complex numbers
            let (ux, uy) = match self.pinned.get(1) {
                Some(&p1) => (
                    all[t.var_map[p1.index()].0] - ox,
                    all[t.var_map[p1.index()].1] - oy,
                ),
                None => (1.0, 0.0),
            };
            let norm = ux * ux + uy * uy;
            if norm == 0.0 {
                return None;
            }
            for &(xv, yv) in &t.var_map {
                let (dx, dy) = (all[xv] - ox, all[yv] - oy);
                all[xv] = (dx * ux + dy * uy) / norm;
                all[yv] = (dy * ux - dx * uy) / norm;
            }
        }
        Some(self.origin.iter().map(|&v| all[v]).collect())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SubsystemOptions {
    /// Fix the first two free points at `(0,0)` and `(1,0)`.
    pub pin: bool,
}

/// Extracts the hypotheses needed for `stmt`, renumbers the used variables, and removes
/// dependent variables defined linearly with a constant coefficient.
pub fn subsystem(
    c: &Construction,
    t: &AlgebraicTranslation,
    stmt: &Statement,
    opts: SubsystemOptions,
) -> Result<Subsystem, AlgebraError> {
    let theses = algebraize_statement(stmt, t)?;
    let steps = c.ancestor_steps(&stmt.points());
    let mut hyps: Vec<Polynomial> = t
        .hypotheses
        .iter()
        .filter(|h| steps.contains(&h.step))
        .map(|h| h.poly.clone())
        .collect();
    let mut theses = theses;
    let nv = t.nvars();

    let mut pinned_points = Vec::new();
    if opts.pin {
        let mut pinned = 0;
        for p in c.points() {
            if pinned == 2 || !steps.contains(&p.step) {
                continue;
            }
            if !matches!(c.step(p.step).kind, StepKind::FreePoint { .. }) {
                continue;
            }
            let (xv, yv) = t.var_map[p.id.index()];
            let vals = if pinned == 0 { (0, 0) } else { (1, 0) };
            for (v, val) in [(xv, vals.0), (yv, vals.1)] {
                let value = Polynomial::from_int(nv, val);
                for h in hyps.iter_mut().chain(theses.iter_mut()) {
                    *h = h.substitute(v, &value);
                }
            }
            pinned += 1;
            pinned_points.push(p.id);
        }
    }

    // linear elimination of dependent variables
    let mut substitutions = 0;
    loop {
        let mut found = None;
        'search: for (hi, h) in hyps.iter().enumerate() {
            for v in h.variables() {
                if t.free[v] || h.degree_in(v) != 1 {
                    continue;
                }
                let mono = Monomial::var(nv, v);
                let coeff = h.coefficient(&mono);
                if coeff.is_zero() {
                    continue;
                }
                // v must occur only in the term `coeff * v`
                let only_linear = h.terms().filter(|(m, _)| m.exponent(v) > 0).count() == 1;
                if only_linear {
                    found = Some((hi, v, coeff));
                    break 'search;
                }
            }
        }
        let Some((hi, v, coeff)) = found else { break };
        let h = hyps.swap_remove(hi);
        let mono = Monomial::var(nv, v);
        let mut rest = h.clone();
        rest.add_term(mono, -coeff.clone());
        let value = rest.scale(&(-Rational::one() / coeff));
        for g in hyps.iter_mut().chain(theses.iter_mut()) {
            if g.uses_var(v) {
                *g = g.substitute(v, &value);
            }
        }
        substitutions += 1;
    }

    // reduce modulo the relations among algebraic constants
    let (constants, mut hyps): (Vec<Polynomial>, Vec<Polynomial>) = hyps
        .into_iter()
        .partition(|h| h.variables().iter().all(|&v| t.constant[v]));
    if !constants.is_empty() {
        let order = MonomialOrder::DegRevLex;
        let gb = buchberger(&constants, order, &Budget::unlimited())
            .map(|b| b.polys)
            .unwrap_or_else(|_| constants.clone());
        for g in hyps.iter_mut().chain(theses.iter_mut()) {
            *g = normal_form(g, &gb, order);
        }
        hyps.extend(constants.iter().cloned());
    }
    hyps.retain(|h| !h.is_zero());
    hyps.dedup();

    // compact ring
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for g in hyps.iter().chain(theses.iter()) {
        used.extend(g.variables());
    }
    let used: Vec<usize> = used.into_iter().collect();
    let mut map = vec![usize::MAX; nv];
    for (i, &v) in used.iter().enumerate() {
        map[v] = i;
    }
    let n = used.len();
    let remap = |p: &Polynomial| p.remap(&map, n);
    Ok(Subsystem {
        variables: used.iter().map(|&v| t.variables[v].clone()).collect(),
        free: used.iter().map(|&v| t.free[v]).collect(),
        constant: used.iter().map(|&v| t.constant[v]).collect(),
        hypotheses: hyps.iter().map(remap).collect(),
        constants: constants.iter().map(remap).collect(),
        theses: theses.iter().map(remap).collect(),
        substitutions,
        origin: used,
        pinned: pinned_points,
    })
}
