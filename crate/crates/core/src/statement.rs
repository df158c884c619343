//! Candidate relations between geometric points.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a geometric point in construction order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub u32);

impl PointId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementKind {
    Identical,
    Collinear,
    Concyclic,
    Parallel,
    Perpendicular,
    Congruent,
}

impl StatementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StatementKind::Identical => "identical",
            StatementKind::Collinear => "collinear",
            StatementKind::Concyclic => "concyclic",
            StatementKind::Parallel => "parallel",
            StatementKind::Perpendicular => "perpendicular",
            StatementKind::Congruent => "congruent",
        }
    }

    pub fn parse(word: &str) -> Option<Self> {
        Some(match word {
            "identical" | "equal" => StatementKind::Identical,
            "collinear" => StatementKind::Collinear,
            "concyclic" => StatementKind::Concyclic,
            "parallel" => StatementKind::Parallel,
            "perpendicular" | "perp" => StatementKind::Perpendicular,
            "congruent" => StatementKind::Congruent,
            _ => return None,
        })
    }

    /// Number of point operands.
    pub fn arity(self) -> usize {
        match self {
            StatementKind::Identical => 2,
            StatementKind::Collinear => 3,
            _ => 4,
        }
    }
}

/// A single relation over geometric points. Segment and line operands are point pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum Statement {
    Identical(PointId, PointId),
    Collinear([PointId; 3]),
    Concyclic([PointId; 4]),
    /// Line `p0 p1` parallel to line `q0 q1`.
    Parallel([PointId; 2], [PointId; 2]),
    Perpendicular([PointId; 2], [PointId; 2]),
    /// Segment `p0 p1` as long as segment `q0 q1`.
    Congruent([PointId; 2], [PointId; 2]),
}

impl Statement {
    pub fn kind(&self) -> StatementKind {
        match self {
            Statement::Identical(..) => StatementKind::Identical,
            Statement::Collinear(_) => StatementKind::Collinear,
            Statement::Concyclic(_) => StatementKind::Concyclic,
            Statement::Parallel(..) => StatementKind::Parallel,
            Statement::Perpendicular(..) => StatementKind::Perpendicular,
            Statement::Congruent(..) => StatementKind::Congruent,
        }
    }

    /// Operands in their natural order.
    pub fn points(&self) -> Vec<PointId> {
        match self {
            Statement::Identical(a, b) => vec![*a, *b],
            Statement::Collinear(p) => p.to_vec(),
            Statement::Concyclic(p) => p.to_vec(),
            Statement::Parallel(a, b) | Statement::Perpendicular(a, b) | Statement::Congruent(a, b) => {
                vec![a[0], a[1], b[0], b[1]]
            }
        }
    }

    /// Builds a statement from a kind and a flat operand list.
    pub fn from_points(kind: StatementKind, pts: &[PointId]) -> Option<Statement> {
        if pts.len() != kind.arity() {
            return None;
        }
        Some(match kind {
            StatementKind::Identical => Statement::Identical(pts[0], pts[1]),
            StatementKind::Collinear => Statement::Collinear([pts[0], pts[1], pts[2]]),
            StatementKind::Concyclic => Statement::Concyclic([pts[0], pts[1], pts[2], pts[3]]),
            StatementKind::Parallel => Statement::Parallel([pts[0], pts[1]], [pts[2], pts[3]]),
            StatementKind::Perpendicular => Statement::Perpendicular([pts[0], pts[1]], [pts[2], pts[3]]),
            StatementKind::Congruent => Statement::Congruent([pts[0], pts[1]], [pts[2], pts[3]]),
        })
    }

    /// Canonical form: symmetric operands sorted, so equal relations compare equal.
    pub fn canonical(&self) -> Statement {
        fn pair(p: [PointId; 2]) -> [PointId; 2] {
            if p[0] <= p[1] {
                p
            } else {
                [p[1], p[0]]
            }
        }
        fn two(a: [PointId; 2], b: [PointId; 2]) -> ([PointId; 2], [PointId; 2]) {
            let (a, b) = (pair(a), pair(b));
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        }
        match *self {
            Statement::Identical(a, b) => Statement::Identical(a.min(b), a.max(b)),
            Statement::Collinear(mut p) => {
                p.sort();
                Statement::Collinear(p)
            }
            Statement::Concyclic(mut p) => {
                p.sort();
                Statement::Concyclic(p)
            }
            Statement::Parallel(a, b) => {
                let (a, b) = two(a, b);
                Statement::Parallel(a, b)
            }
            Statement::Perpendicular(a, b) => {
                let (a, b) = two(a, b);
                Statement::Perpendicular(a, b)
            }
            Statement::Congruent(a, b) => {
                let (a, b) = two(a, b);
                Statement::Congruent(a, b)
            }
        }
    }

    /// Renders with point names, e.g. `parallel D E A B`.
    pub fn describe(&self, name: impl Fn(PointId) -> String) -> String {
        let mut out = self.kind().as_str().to_string();
        for p in self.points() {
            out.push(' ');
            out.push_str(&name(p));
        }
        out
    }
}
