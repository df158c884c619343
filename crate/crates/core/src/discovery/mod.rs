//! Automated discovery: every property of a target point, proved and grouped into classes.
//!
//! Candidates are enumerated kind by kind (identity, collinearity, concyclicity,
//! parallelism, congruence, perpendicularity). Each one must first survive the numeric
//! filter, then the prover; proved facts go into a [`Registry`] whose closure prunes
//! later candidates. The final report lists the registry's classes, minus those already
//! implied by the construction steps and those not touching the target.

mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::algebra::{algebraize_construction, AlgebraError, AlgebraicTranslation};
use crate::construction::Construction;
use crate::numeric::{NumericConfig, NumericError, NumericSamples};
use crate::prover::{decide_statement, ProofVerdict, ProverConfig, Verdict, DEFAULT_TIMEOUT};
use crate::registry::{DirectionRelation, LineId, Registry, Segment};
use crate::statement::{PointId, Statement};

pub use report::{ConjectureTiming, DiscoveryReport, LogEntry, LogVerdict, Theorem, TheoremKind, Timings};

#[derive(Clone, Debug)]
pub struct DiscoveryConfig {
    pub numeric: NumericConfig,
    /// Prover budget per conjecture.
    pub timeout: Duration,
    /// Fix two free points of each subsystem; sound because every statement kind is
    /// invariant under similarities.
    pub pin: bool,
    /// Skip candidates the registry already implies.
    pub pruning: bool,
    pub cancel: Option<Arc<AtomicBool>>,
    /// Record wall-clock timings; when off every time is reported as zero.
    pub timings: bool,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        DiscoveryConfig {
            numeric: NumericConfig::default(),
            timeout: DEFAULT_TIMEOUT,
            pin: false,
            pruning: true,
            cancel: None,
            timings: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum DiscoveryError {
    #[error("unknown target point {0:?}")]
    UnknownTarget(PointId),
    #[error("cannot sample the construction: {0}")]
    DegenerateConstruction(#[from] NumericError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("discovery cancelled")]
    Cancelled,
}

/// Report plus the final registry and every statement the prover accepted.
#[derive(Clone, Debug)]
pub struct DiscoveryOutcome {
    pub report: DiscoveryReport,
    pub registry: Registry,
    pub proved: Vec<Statement>,
}

pub fn discover(
    c: &Construction,
    target: PointId,
    config: &DiscoveryConfig,
) -> Result<DiscoveryReport, DiscoveryError> {
    discover_with_registry(c, target, config).map(|o| o.report)
}

pub fn discover_with_registry(
    c: &Construction,
    target: PointId,
    config: &DiscoveryConfig,
) -> Result<DiscoveryOutcome, DiscoveryError> {
    if target.index() >= c.len() {
        return Err(DiscoveryError::UnknownTarget(target));
    }
    let t0 = Instant::now();
    let samples = NumericSamples::new(c, &config.numeric)?;
    let translation = algebraize_construction(c)?;
    let mut run = Run {
        c,
        t: &translation,
        samples,
        config,
        prover: ProverConfig {
            timeout: config.timeout,
            pin: config.pin,
            seed: config.numeric.seed,
            cancel: config.cancel.clone(),
        },
        reg: Registry::new(c.len()),
        numeric_time: t0.elapsed(),
        symbolic_time: Duration::ZERO,
        per_conjecture: Vec::new(),
        log: Vec::new(),
        proved: Vec::new(),
        visible: c.visible(),
    };

    if let Some(reason) = run.identities()? {
        let report = run.finish_halted(target, reason);
        return Ok(DiscoveryOutcome {
            report,
            registry: run.reg,
            proved: run.proved,
        });
    }
    let closure = closure_registry(c, &run.reg);
    run.reg = closure.clone();
    run.collinear()?;
    run.concyclic()?;
    run.parallel()?;
    run.congruent()?;
    run.perpendicular()?;

    let theorems = build_theorems(c, &run.reg, &closure, target);
    let report = DiscoveryReport {
        target: c.name(target).to_string(),
        theorems,
        halted: false,
        halt_reason: None,
        timings: run.timings(),
        verdict_log: run.log,
    };
    Ok(DiscoveryOutcome {
        report,
        registry: run.reg,
        proved: run.proved,
    })
}

struct Run<'a> {
    c: &'a Construction,
    t: &'a AlgebraicTranslation,
    samples: NumericSamples,
    config: &'a DiscoveryConfig,
    prover: ProverConfig,
    reg: Registry,
    numeric_time: Duration,
    symbolic_time: Duration,
    per_conjecture: Vec<ConjectureTiming>,
    log: Vec<LogEntry>,
    proved: Vec<Statement>,
    visible: Vec<PointId>,
}

impl Run<'_> {
    fn cancelled(&self) -> Result<(), DiscoveryError> {
        match &self.config.cancel {
            Some(flag) if flag.load(Ordering::Relaxed) => Err(DiscoveryError::Cancelled),
            _ => Ok(()),
        }
    }

    fn numeric(&mut self, stmt: &Statement) -> bool {
        let start = Instant::now();
        let ok = self.samples.check(stmt);
        self.numeric_time += start.elapsed();
        ok
    }

    fn describe(&self, stmt: &Statement) -> String {
        stmt.describe(|p| self.c.name(p).to_string())
    }

    /// Numeric filter then prover. `None` when the numeric filter rejects.
    fn test(&mut self, phase: u8, stmt: Statement) -> Result<Option<Verdict>, DiscoveryError> {
        self.cancelled()?;
        if !self.numeric(&stmt) {
            return Ok(None);
        }
        let start = Instant::now();
        let ProofVerdict { verdict, .. } = decide_statement(self.c, self.t, &stmt, &self.prover);
        let elapsed = start.elapsed();
        self.symbolic_time += elapsed;
        self.cancelled()?;
        let text = self.describe(&stmt);
        self.per_conjecture.push(ConjectureTiming {
            statement: text.clone(),
            verdict: verdict.into(),
            ms: elapsed.as_millis() as u64,
        });
        self.log.push(LogEntry {
            phase,
            statement: text,
            verdict: verdict.into(),
        });
        if verdict == Verdict::Proved {
            self.proved.push(stmt);
        }
        Ok(Some(verdict))
    }

    fn skip(&self, stmt: &Statement) -> bool {
        self.config.pruning && implied(&self.reg, stmt)
    }

    fn reps(&self) -> Vec<PointId> {
        let mut v: Vec<PointId> = self.visible.iter().map(|&p| self.reg.rep(p)).collect();
        v.sort();
        v.dedup();
        v
    }

    fn identities(&mut self) -> Result<Option<String>, DiscoveryError> {
        let vis = self.visible.clone();
        for (i, &a) in vis.iter().enumerate() {
            for &b in &vis[..i] {
                let stmt = Statement::Identical(b, a);
                if self.skip(&stmt) {
                    continue;
                }
                match self.test(1, stmt)? {
                    Some(Verdict::Proved) => {
                        let _ = self.reg.merge_points(a, b);
                    }
                    Some(Verdict::Unknown) => {
                        return Ok(Some(format!(
                            "cannot decide whether {} and {} coincide; redraw the figure",
                            self.c.name(b),
                            self.c.name(a)
                        )));
                    }
                    _ => {}
                }
            }
        }
        Ok(None)
    }

    fn collinear(&mut self) -> Result<(), DiscoveryError> {
        let v = self.reps();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                for k in j + 1..v.len() {
                    let stmt = Statement::Collinear([v[i], v[j], v[k]]);
                    if self.skip(&stmt) {
                        continue;
                    }
                    if self.test(2, stmt)? == Some(Verdict::Proved) {
                        let _ = self.reg.register_collinear([v[i], v[j], v[k]]);
                    }
                }
            }
        }
        Ok(())
    }

    fn concyclic(&mut self) -> Result<(), DiscoveryError> {
        let v = self.reps();
        let n = v.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let quad = [v[a], v[b], v[c], v[d]];
                        if self.has_collinear_triple(quad) {
                            continue;
                        }
                        let stmt = Statement::Concyclic(quad);
                        if self.skip(&stmt) {
                            continue;
                        }
                        if self.test(3, stmt)? == Some(Verdict::Proved) {
                            let _ = self.reg.register_concyclic(quad);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn has_collinear_triple(&self, q: [PointId; 4]) -> bool {
        const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        TRIPLES.iter().any(|t| {
            self.samples
                .check_original(&Statement::Collinear([q[t[0]], q[t[1]], q[t[2]]]))
        })
    }

    /// Point pairs standing for candidate lines: registered lines with two visible
    /// points, plus every visible pair not on such a line. In brute-force mode, every pair.
    fn candidate_lines(&self) -> Vec<[PointId; 2]> {
        let v = self.reps();
        let vis: BTreeSet<PointId> = v.iter().copied().collect();
        let mut out = Vec::new();
        let mut covered = BTreeSet::new();
        if self.config.pruning {
            for l in self.reg.lines() {
                let members: Vec<PointId> = self
                    .reg
                    .line_members(l)
                    .iter()
                    .copied()
                    .filter(|p| vis.contains(p))
                    .collect();
                if members.len() >= 2 {
                    out.push([members[0], members[1]]);
                    for i in 0..members.len() {
                        for j in i + 1..members.len() {
                            covered.insert((members[i], members[j]));
                        }
                    }
                }
            }
        }
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if !covered.contains(&(v[i], v[j])) {
                    out.push([v[i], v[j]]);
                }
            }
        }
        out.sort();
        out
    }

    fn parallel(&mut self) -> Result<(), DiscoveryError> {
        let lines = self.candidate_lines();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (p, q) = (lines[i], lines[j]);
                if p.iter().any(|x| q.contains(x)) || self.same_line(p, q) {
                    continue;
                }
                let stmt = Statement::Parallel(p, q);
                if self.skip(&stmt) {
                    continue;
                }
                if self.test(4, stmt)? == Some(Verdict::Proved) {
                    let a = self.reg.ensure_line(p[0], p[1]);
                    let b = self.reg.ensure_line(q[0], q[1]);
                    let _ = self
                        .reg
                        .register_direction_relation(a, b, DirectionRelation::Parallel);
                }
            }
        }
        Ok(())
    }

    fn same_line(&self, p: [PointId; 2], q: [PointId; 2]) -> bool {
        self.reg.are_collinear(p[0], p[1], q[0]) && self.reg.are_collinear(p[0], p[1], q[1])
    }

    fn congruent(&mut self) -> Result<(), DiscoveryError> {
        let v = self.reps();
        let mut segs = Vec::new();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                segs.push([v[i], v[j]]);
            }
        }
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let stmt = Statement::Congruent(segs[i], segs[j]);
                if self.skip(&stmt) {
                    continue;
                }
                if self.test(5, stmt)? == Some(Verdict::Proved) {
                    self.reg.register_length_equality(
                        Segment::new(segs[i][0], segs[i][1]),
                        Segment::new(segs[j][0], segs[j][1]),
                    );
                }
            }
        }
        Ok(())
    }

    /// Pairs of direction classes when pruning; all line pairs otherwise.
    fn perpendicular(&mut self) -> Result<(), DiscoveryError> {
        let lines = self.candidate_lines();
        let groups: Vec<[PointId; 2]> = if self.config.pruning {
            let mut seen: Vec<[PointId; 2]> = Vec::new();
            for l in lines {
                let dup = seen
                    .iter()
                    .any(|s| self.line_relation(*s, l) == Some(DirectionRelation::Parallel));
                if !dup {
                    seen.push(l);
                }
            }
            seen
        } else {
            lines
        };
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let (p, q) = (groups[i], groups[j]);
                if self.same_line(p, q) {
                    continue;
                }
                let stmt = Statement::Perpendicular(p, q);
                if self.skip(&stmt) {
                    continue;
                }
                if self.test(6, stmt)? == Some(Verdict::Proved) {
                    let a = self.reg.ensure_line(p[0], p[1]);
                    let b = self.reg.ensure_line(q[0], q[1]);
                    let _ = self
                        .reg
                        .register_direction_relation(a, b, DirectionRelation::Perpendicular);
                }
            }
        }
        Ok(())
    }

    fn line_relation(&self, p: [PointId; 2], q: [PointId; 2]) -> Option<DirectionRelation> {
        let a = self.reg.line_through(p[0], p[1])?;
        let b = self.reg.line_through(q[0], q[1])?;
        self.reg.direction_relation(a, b)
    }

    fn timings(&self) -> Timings {
        if !self.config.timings {
            return Timings {
                numeric_ms: 0,
                symbolic_ms: 0,
                per_conjecture: self
                    .per_conjecture
                    .iter()
                    .map(|t| ConjectureTiming { ms: 0, ..t.clone() })
                    .collect(),
            };
        }
        Timings {
            numeric_ms: self.numeric_time.as_millis() as u64,
            symbolic_ms: self.symbolic_time.as_millis() as u64,
            per_conjecture: self.per_conjecture.clone(),
        }
    }

    fn finish_halted(&mut self, target: PointId, reason: String) -> DiscoveryReport {
        DiscoveryReport {
            target: self.c.name(target).to_string(),
            theorems: Vec::new(),
            halted: true,
            halt_reason: Some(reason),
            timings: self.timings(),
            verdict_log: std::mem::take(&mut self.log),
        }
    }
}

/// Whether the registry's closure already contains `stmt`.
pub fn implied(reg: &Registry, stmt: &Statement) -> bool {
    match *stmt {
        Statement::Identical(a, b) => reg.same_point(a, b),
        Statement::Collinear([a, b, c]) => reg.are_collinear(a, b, c),
        Statement::Concyclic(q) => {
            let distinct: BTreeSet<PointId> = q.iter().map(|&p| reg.rep(p)).collect();
            distinct.len() == 4 && reg.are_concyclic(q)
        }
        Statement::Parallel(p, q) => relation(reg, p, q) == Some(DirectionRelation::Parallel),
        Statement::Perpendicular(p, q) => relation(reg, p, q) == Some(DirectionRelation::Perpendicular),
        Statement::Congruent(p, q) => reg.equal_length(Segment::new(p[0], p[1]), Segment::new(q[0], q[1])),
    }
}

fn relation(reg: &Registry, p: [PointId; 2], q: [PointId; 2]) -> Option<DirectionRelation> {
    let a = reg.line_through(p[0], p[1])?;
    let b = reg.line_through(q[0], q[1])?;
    if reg.resolve_line(a) == reg.resolve_line(b) {
        return Some(DirectionRelation::Parallel);
    }
    reg.direction_relation(a, b)
}

/// Identity merges plus the incidences each construction step implies by definition.
pub fn closure_registry(c: &Construction, identities: &Registry) -> Registry {
    let mut reg = identities.clone();
    for fact in c.trivial_facts() {
        let s = fact.statement;
        match s {
            Statement::Collinear(t) => {
                let _ = reg.register_collinear(t);
            }
            Statement::Concyclic(q) => {
                let _ = reg.register_concyclic(q);
            }
            Statement::Parallel(p, q) | Statement::Perpendicular(p, q) => {
                if reg.same_point(p[0], p[1]) || reg.same_point(q[0], q[1]) {
                    continue;
                }
                let rel = if matches!(s, Statement::Parallel(..)) {
                    DirectionRelation::Parallel
                } else {
                    DirectionRelation::Perpendicular
                };
                let a = reg.ensure_line(p[0], p[1]);
                let b = reg.ensure_line(q[0], q[1]);
                let _ = reg.register_direction_relation(a, b, rel);
            }
            Statement::Identical(a, b) => {
                let _ = reg.merge_points(a, b);
            }
            Statement::Congruent(p, q) => {
                reg.register_length_equality(Segment::new(p[0], p[1]), Segment::new(q[0], q[1]));
            }
        }
    }
    reg
}

/// Statements not already implied by the closure registry.
pub fn filter_trivial(stmts: &[Statement], closure: &Registry) -> Vec<Statement> {
    stmts.iter().filter(|s| !implied(closure, s)).copied().collect()
}

/// Statements mentioning the target's point class.
pub fn filter_relevant(stmts: &[Statement], reg: &Registry, target: PointId) -> Vec<Statement> {
    let t = reg.rep(target);
    stmts
        .iter()
        .filter(|s| s.points().iter().any(|&p| reg.rep(p) == t))
        .copied()
        .collect()
}

fn build_theorems(c: &Construction, reg: &Registry, closure: &Registry, target: PointId) -> Vec<Theorem> {
    let vis: BTreeSet<PointId> = c.visible().into_iter().collect();
    let t = reg.rep(target);
    let name = |p: PointId| c.name(p).to_string();
    let names = |ps: &[PointId]| ps.iter().map(|&p| name(p)).collect::<Vec<_>>();
    let mut out = Vec::new();

    for class in reg.point_classes() {
        let members: Vec<PointId> = class.into_iter().filter(|p| vis.contains(p)).collect();
        if members.len() < 2 {
            continue;
        }
        let n = names(&members);
        out.push(Theorem {
            kind: TheoremKind::Identical,
            text: report::identity_text(&n),
            points: n,
            segments: None,
            groups: None,
            class_id: format!("point:{}", reg.rep(members[0]).0),
            color: 0,
        });
    }

    for l in reg.lines() {
        let members: Vec<PointId> = reg
            .line_members(l)
            .iter()
            .copied()
            .filter(|p| vis.contains(p))
            .collect();
        if members.len() < 3 || !members.contains(&t) {
            continue;
        }
        let trivial = closure.lines().into_iter().any(|k| {
            let m = closure.line_members(k);
            members.iter().all(|p| m.contains(p))
        });
        if trivial {
            continue;
        }
        let n = names(&members);
        out.push(Theorem {
            kind: TheoremKind::Collinear,
            text: report::collinear_text(&n),
            points: n,
            segments: None,
            groups: None,
            class_id: format!("line:{}", l.0),
            color: 0,
        });
    }

    for k in reg.circles() {
        let members: Vec<PointId> = reg
            .circle_members(k)
            .iter()
            .copied()
            .filter(|p| vis.contains(p))
            .collect();
        if members.len() < 4 || !members.contains(&t) {
            continue;
        }
        let trivial = closure.circles().into_iter().any(|j| {
            let m = closure.circle_members(j);
            members.iter().all(|p| m.contains(p))
        });
        if trivial {
            continue;
        }
        let n = names(&members);
        out.push(Theorem {
            kind: TheoremKind::Concyclic,
            text: report::concyclic_text(&n),
            points: n,
            segments: None,
            groups: None,
            class_id: format!("circle:{}", k.0),
            color: 0,
        });
    }

    let line_points = |l: LineId| -> Vec<PointId> {
        reg.line_members(l)
            .iter()
            .copied()
            .filter(|p| vis.contains(p))
            .collect()
    };
    for grid in reg.grid_classes() {
        let axes: Vec<Vec<LineId>> = grid
            .axes
            .iter()
            .map(|axis| {
                axis.iter()
                    .copied()
                    .filter(|&l| line_points(l).len() >= 2)
                    .collect::<Vec<_>>()
            })
            .filter(|axis: &Vec<LineId>| !axis.is_empty())
            .collect();
        let total: usize = axes.iter().map(Vec::len).sum();
        if total < 2 {
            continue;
        }
        let touches = axes.iter().flatten().any(|&l| line_points(l).contains(&t));
        if !touches || grid_is_trivial(reg, closure, &axes) {
            continue;
        }
        // lines through the target first, on the first axis
        let mut axes = axes;
        for axis in &mut axes {
            axis.sort_by_key(|&l| (!line_points(l).contains(&t), l));
        }
        axes.sort_by_key(|axis| (!axis.iter().any(|&l| line_points(l).contains(&t)), axis[0]));
        let groups: Vec<Vec<Vec<String>>> = axes
            .iter()
            .map(|axis| axis.iter().map(|&l| names(&line_points(l))).collect())
            .collect();
        let labels: Vec<Vec<String>> = groups
            .iter()
            .map(|axis| axis.iter().map(|l| report::line_name(l)).collect())
            .collect();
        let mut pts: Vec<PointId> = axes.iter().flatten().flat_map(|&l| line_points(l)).collect();
        pts.sort();
        pts.dedup();
        let root = axes.iter().flatten().min().copied().unwrap_or(LineId(0));
        out.push(Theorem {
            kind: if axes.len() == 1 {
                TheoremKind::Parallel
            } else {
                TheoremKind::Perpendicular
            },
            text: report::direction_text(&labels),
            points: names(&pts),
            segments: None,
            groups: Some(groups),
            class_id: format!("grid:{}", root.0),
            color: 0,
        });
    }

    for class in reg.length_classes() {
        let segs: Vec<Segment> = class
            .into_iter()
            .filter(|s| vis.contains(&s.0) && vis.contains(&s.1))
            .collect();
        if segs.len() < 2 || !segs.iter().any(|s| s.0 == t || s.1 == t) {
            continue;
        }
        let mut segs = segs;
        segs.sort_by_key(|s| (!(s.0 == t || s.1 == t), *s));
        let pairs: Vec<[String; 2]> = segs.iter().map(|s| [name(s.0), name(s.1)]).collect();
        let labels: Vec<String> = pairs.iter().map(|p| format!("{}{}", p[0], p[1])).collect();
        let mut pts: Vec<PointId> = segs.iter().flat_map(|s| [s.0, s.1]).collect();
        pts.sort();
        pts.dedup();
        out.push(Theorem {
            kind: TheoremKind::Congruent,
            text: report::congruent_text(&labels),
            points: names(&pts),
            segments: Some(pairs),
            groups: None,
            class_id: format!("length:{}:{}", segs[0].0 .0, segs[0].1 .0),
            color: 0,
        });
    }

    for (i, th) in out.iter_mut().enumerate() {
        th.color = i;
    }
    out
}

/// True when every pair of lines in the class is already related in the closure.
fn grid_is_trivial(reg: &Registry, closure: &Registry, axes: &[Vec<LineId>]) -> bool {
    let lines: Vec<(LineId, usize)> = axes
        .iter()
        .enumerate()
        .flat_map(|(i, axis)| axis.iter().map(move |&l| (l, i)))
        .collect();
    let find = |l: LineId| {
        let m = reg.line_members(l);
        closure.lines().into_iter().find(|&k| {
            let cm = closure.line_members(k);
            m.iter().filter(|p| cm.contains(p)).count() >= 2
        })
    };
    let mapped: Vec<Option<LineId>> = lines.iter().map(|&(l, _)| find(l)).collect();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (Some(a), Some(b)) = (mapped[i], mapped[j]) else {
                return false;
            };
            let want = if lines[i].1 == lines[j].1 {
                DirectionRelation::Parallel
            } else {
                DirectionRelation::Perpendicular
            };
            let got = if closure.resolve_line(a) == closure.resolve_line(b) {
                Some(DirectionRelation::Parallel)
            } else {
                closure.direction_relation(a, b)
            };
            if got != Some(want) {
                return false;
            }
        }
    }
    true
}

/// Expands a reported theorem into the pairwise statements it asserts.
pub fn theorem_statements(c: &Construction, th: &Theorem) -> Option<Vec<Statement>> {
    let id = |n: &String| c.find(n);
    let pts: Vec<PointId> = th.points.iter().map(id).collect::<Option<_>>()?;
    let mut out = Vec::new();
    match th.kind {
        TheoremKind::Identical => {
            for w in pts.windows(2) {
                out.push(Statement::Identical(w[0], w[1]));
            }
        }
        TheoremKind::Collinear => {
            for &p in &pts[2..] {
                out.push(Statement::Collinear([pts[0], pts[1], p]));
            }
        }
        TheoremKind::Concyclic => {
            for &p in &pts[3..] {
                out.push(Statement::Concyclic([pts[0], pts[1], pts[2], p]));
            }
        }
        TheoremKind::Parallel | TheoremKind::Perpendicular => {
            let groups = th.groups.as_ref()?;
            let lines: Vec<Vec<(PointId, PointId)>> = groups
                .iter()
                .map(|axis| {
                    axis.iter()
                        .map(|l| Some((id(l.first()?)?, id(l.get(1)?)?)))
                        .collect::<Option<Vec<_>>>()
                })
                .collect::<Option<_>>()?;
            let first = lines.first()?.first().copied()?;
            for (i, axis) in lines.iter().enumerate() {
                for &(a, b) in axis {
                    if (a, b) == first {
                        continue;
                    }
                    out.push(if i == 0 {
                        Statement::Parallel([first.0, first.1], [a, b])
                    } else {
                        Statement::Perpendicular([first.0, first.1], [a, b])
                    });
                }
            }
        }
        TheoremKind::Congruent => {
            let segs: Vec<[PointId; 2]> = th
                .segments
                .as_ref()?
                .iter()
                .map(|[a, b]| Some([id(a)?, id(b)?]))
                .collect::<Option<_>>()?;
            for s in &segs[1..] {
                out.push(Statement::Congruent(segs[0], *s));
            }
        }
    }
    Some(out)
}

/// Theorems grouped by kind, for summaries.
pub fn kind_counts(report: &DiscoveryReport) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for t in &report.theorems {
        *m.entry(format!("{:?}", t.kind).to_lowercase()).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_dsl;

    const MIDLINE: &str = "\
point A 0 0
point B 4 0
point C 1 3
midpoint D B C
midpoint E A C
discover D
";

    #[test]
    fn midline_finds_exactly_the_two_facts() {
        let f = parse_dsl(MIDLINE).unwrap();
        let r = discover(&f.construction, f.target().unwrap(), &DiscoveryConfig::default()).unwrap();
        let texts: Vec<&str> = r.theorems.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, ["DE is parallel to AB", "BD and CD are congruent"]);
        assert!(!r.halted);
    }

    #[test]
    fn untimed_reports_are_reproducible() {
        let f = parse_dsl(MIDLINE).unwrap();
        let cfg = DiscoveryConfig {
            timings: false,
            ..DiscoveryConfig::default()
        };
        let a = discover(&f.construction, f.target().unwrap(), &cfg).unwrap();
        let b = discover(&f.construction, f.target().unwrap(), &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn trivial_facts_are_filtered() {
        let f = parse_dsl(MIDLINE).unwrap();
        let c = &f.construction;
        let closure = closure_registry(c, &Registry::new(c.len()));
        let id = |n: &str| c.find(n).unwrap();
        let stmts = [
            Statement::Collinear([id("B"), id("C"), id("D")]),
            Statement::Parallel([id("D"), id("E")], [id("A"), id("B")]),
        ];
        assert_eq!(filter_trivial(&stmts, &closure), vec![stmts[1]]);
        assert_eq!(filter_relevant(&stmts, &closure, id("E")), vec![stmts[1]]);
    }

    #[test]
    fn unknown_target_is_an_error() {
        let f = parse_dsl(MIDLINE).unwrap();
        let err = discover(&f.construction, PointId(99), &DiscoveryConfig::default());
        assert!(matches!(err, Err(DiscoveryError::UnknownTarget(_))));
    }

    #[test]
    fn cancellation_stops_the_run() {
        let f = parse_dsl(MIDLINE).unwrap();
        let flag = Arc::new(AtomicBool::new(true));
        let cfg = DiscoveryConfig {
            cancel: Some(flag),
            ..DiscoveryConfig::default()
        };
        let err = discover(&f.construction, f.target().unwrap(), &cfg);
        assert!(matches!(err, Err(DiscoveryError::Cancelled)));
    }

    #[test]
    fn theorems_expand_to_true_statements() {
        let f = parse_dsl(MIDLINE).unwrap();
        let c = &f.construction;
        let out = discover_with_registry(c, f.target().unwrap(), &DiscoveryConfig::default()).unwrap();
        for th in &out.report.theorems {
            let stmts = theorem_statements(c, th).unwrap();
            assert!(!stmts.is_empty());
            for s in stmts {
                assert!(implied(&out.registry, &s));
            }
        }
    }
}
