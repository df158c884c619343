//! Equivalence classes of proved relations: points, lines, circles, directions, grids and
//! lengths. Classes are merged as new facts arrive so that every relation is stored once.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::statement::PointId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("three of the concyclic points are collinear")]
    CollinearSubset,
    #[error("a direction would be both parallel and perpendicular to another")]
    Inconsistent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct LineId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct CircleId(pub usize);

/// Unordered pair of point representatives, smaller first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Segment(pub PointId, pub PointId);

impl Segment {
    pub fn new(a: PointId, b: PointId) -> Segment {
        if a <= b {
            Segment(a, b)
        } else {
            Segment(b, a)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionRelation {
    Parallel,
    Perpendicular,
}

#[derive(Clone, Debug)]
struct Slot<T> {
    members: BTreeSet<T>,
    alive: bool,
}

#[derive(Clone, Debug)]
pub struct Registry {
    point_parent: Vec<PointId>,
    lines: Vec<Slot<PointId>>,
    line_alias: Vec<usize>,
    /// Parity union-find over line ids: parity 1 means perpendicular to the parent.
    dir_parent: Vec<usize>,
    dir_parity: Vec<u8>,
    circles: Vec<Slot<PointId>>,
    lengths: Vec<Slot<Segment>>,
    length_of: BTreeMap<Segment, usize>,
}

/// One grid class: the lines on each of its (at most two) axes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridClass {
    pub axes: Vec<Vec<LineId>>,
}

impl Registry {
    pub fn new(points: usize) -> Self {
        Registry {
            point_parent: (0..points as u32).map(PointId).collect(),
            lines: Vec::new(),
            line_alias: Vec::new(),
            dir_parent: Vec::new(),
            dir_parity: Vec::new(),
            circles: Vec::new(),
            lengths: Vec::new(),
            length_of: BTreeMap::new(),
        }
    }

    pub fn point_count(&self) -> usize {
        self.point_parent.len()
    }

    // ---- points ----

    /// Representative (lowest id) of the point's class.
    pub fn rep(&self, p: PointId) -> PointId {
        let mut x = p;
        while self.point_parent[x.index()] != x {
            x = self.point_parent[x.index()];
        }
        x
    }

    pub fn same_point(&self, a: PointId, b: PointId) -> bool {
        self.rep(a) == self.rep(b)
    }

    /// Point classes in order of their representatives.
    pub fn point_classes(&self) -> Vec<Vec<PointId>> {
        let mut groups: BTreeMap<PointId, Vec<PointId>> = BTreeMap::new();
        for i in 0..self.point_count() {
            let p = PointId(i as u32);
            groups.entry(self.rep(p)).or_default().push(p);
        }
        groups.into_values().collect()
    }

    pub fn members_of(&self, p: PointId) -> Vec<PointId> {
        let r = self.rep(p);
        (0..self.point_count() as u32)
            .map(PointId)
            .filter(|q| self.rep(*q) == r)
            .collect()
    }

    pub fn merge_points(&mut self, p: PointId, q: PointId) -> Result<(), RegistryError> {
        let (rp, rq) = (self.rep(p), self.rep(q));
        if rp == rq {
            return Ok(());
        }
        let (keep, gone) = if rp < rq { (rp, rq) } else { (rq, rp) };
        self.point_parent[gone.index()] = keep;
        let rename = |x: PointId| if x == gone { keep } else { x };

        for slot in self.lines.iter_mut().chain(self.circles.iter_mut()) {
            if slot.alive && slot.members.contains(&gone) {
                slot.members = slot.members.iter().map(|&x| rename(x)).collect();
            }
        }
        for id in 0..self.lines.len() {
            if self.lines[id].alive && self.lines[id].members.len() < 2 {
                self.lines[id].alive = false;
            }
        }
        for id in 0..self.circles.len() {
            if self.circles[id].alive && self.circles[id].members.len() < 3 {
                self.circles[id].alive = false;
            }
        }

        // segments
        let mut merged_into: Vec<(usize, usize)> = Vec::new();
        let mut new_index: BTreeMap<Segment, usize> = BTreeMap::new();
        for id in 0..self.lengths.len() {
            if !self.lengths[id].alive {
                continue;
            }
            let renamed: BTreeSet<Segment> = self.lengths[id]
                .members
                .iter()
                .map(|s| Segment::new(rename(s.0), rename(s.1)))
                .filter(|s| s.0 != s.1)
                .collect();
            self.lengths[id].members = renamed;
            for s in self.lengths[id].members.clone() {
                if let Some(&other) = new_index.get(&s) {
                    if other != id {
                        merged_into.push((other, id));
                    }
                } else {
                    new_index.insert(s, id);
                }
            }
        }
        self.length_of = new_index;
        for (a, b) in merged_into {
            self.union_lengths(a, b);
        }
        self.cascade()
    }

    // ---- lines ----

    fn line_root(&self, id: usize) -> usize {
        let mut x = id;
        while self.line_alias[x] != x {
            x = self.line_alias[x];
        }
        x
    }

    pub fn resolve_line(&self, l: LineId) -> LineId {
        LineId(self.line_root(l.0))
    }

    pub fn line_members(&self, l: LineId) -> &BTreeSet<PointId> {
        &self.lines[self.line_root(l.0)].members
    }

    /// Live lines in creation order.
    pub fn lines(&self) -> Vec<LineId> {
        (0..self.lines.len())
            .filter(|&i| self.lines[i].alive)
            .map(LineId)
            .collect()
    }

    /// The line through both points, if one is registered.
    pub fn line_through(&self, a: PointId, b: PointId) -> Option<LineId> {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return None;
        }
        (0..self.lines.len())
            .find(|&i| {
                self.lines[i].alive
                    && self.lines[i].members.contains(&a)
                    && self.lines[i].members.contains(&b)
            })
            .map(LineId)
    }

    pub fn are_collinear(&self, a: PointId, b: PointId, c: PointId) -> bool {
        let (a, b, c) = (self.rep(a), self.rep(b), self.rep(c));
        if a == b || b == c || a == c {
            return true;
        }
        self.lines
            .iter()
            .any(|s| s.alive && s.members.contains(&a) && s.members.contains(&b) && s.members.contains(&c))
    }

    fn new_line(&mut self, members: BTreeSet<PointId>) -> usize {
        let id = self.lines.len();
        self.lines.push(Slot { members, alive: true });
        self.line_alias.push(id);
        self.dir_parent.push(id);
        self.dir_parity.push(0);
        id
    }

    /// The line through `a` and `b`, created with two points if missing.
    pub fn ensure_line(&mut self, a: PointId, b: PointId) -> LineId {
        if let Some(l) = self.line_through(a, b) {
            return l;
        }
        let members = [self.rep(a), self.rep(b)].into_iter().collect();
        LineId(self.new_line(members))
    }

    pub fn register_collinear(&mut self, triple: [PointId; 3]) -> Result<(), RegistryError> {
        let pts: BTreeSet<PointId> = triple.iter().map(|&p| self.rep(p)).collect();
        if pts.len() < 3 {
            return Ok(());
        }
        let host = (0..self.lines.len())
            .find(|&i| self.lines[i].alive && self.lines[i].members.intersection(&pts).count() >= 2);
        match host {
            Some(i) => self.lines[i].members.extend(pts),
            None => {
                self.new_line(pts);
            }
        }
        self.cascade()
    }

    fn merge_lines(&mut self, keep: usize, gone: usize) -> Result<(), RegistryError> {
        let moved = std::mem::take(&mut self.lines[gone].members);
        self.lines[gone].alive = false;
        self.lines[keep].members.extend(moved);
        self.line_alias[gone] = keep;
        self.union_dirs(keep, gone, 0)
    }

    // ---- circles ----

    pub fn circles(&self) -> Vec<CircleId> {
        (0..self.circles.len())
            .filter(|&i| self.circles[i].alive)
            .map(CircleId)
            .collect()
    }

    pub fn circle_members(&self, c: CircleId) -> &BTreeSet<PointId> {
        &self.circles[c.0].members
    }

    pub fn are_concyclic(&self, quad: [PointId; 4]) -> bool {
        let pts: BTreeSet<PointId> = quad.iter().map(|&p| self.rep(p)).collect();
        self.circles.iter().any(|s| s.alive && pts.is_subset(&s.members))
    }

    fn has_noncollinear_triple(&self, shared: &BTreeSet<PointId>) -> bool {
        let v: Vec<PointId> = shared.iter().copied().collect();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                for k in j + 1..v.len() {
                    if !self.are_collinear(v[i], v[j], v[k]) {
                        return true;
                    }
                }
            }
        }
        false
    }

    pub fn register_concyclic(&mut self, quad: [PointId; 4]) -> Result<(), RegistryError> {
        let reps: Vec<PointId> = quad.iter().map(|&p| self.rep(p)).collect();
        let pts: BTreeSet<PointId> = reps.iter().copied().collect();
        if pts.len() < 4 || !self.has_all_triples_noncollinear(&reps) {
            return Err(RegistryError::CollinearSubset);
        }
        let host = (0..self.circles.len()).find(|&i| {
            self.circles[i].alive && {
                let shared: BTreeSet<PointId> = self.circles[i].members.intersection(&pts).copied().collect();
                self.has_noncollinear_triple(&shared)
            }
        });
        match host {
            Some(i) => self.circles[i].members.extend(pts),
            None => self.circles.push(Slot {
                members: pts,
                alive: true,
            }),
        }
        self.cascade()
    }

    fn has_all_triples_noncollinear(&self, v: &[PointId]) -> bool {
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                for k in j + 1..v.len() {
                    if self.are_collinear(v[i], v[j], v[k]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Merges lines sharing two points and circles sharing three non-collinear points
    /// until none remain.
    fn cascade(&mut self) -> Result<(), RegistryError> {
        loop {
            let mut changed = false;
            let live = self.lines();
            'lines: for (x, a) in live.iter().enumerate() {
                for b in &live[x + 1..] {
                    let shared = self.lines[a.0]
                        .members
                        .intersection(&self.lines[b.0].members)
                        .count();
                    if shared >= 2 {
                        self.merge_lines(a.0, b.0)?;
                        changed = true;
                        break 'lines;
                    }
                }
            }
            if changed {
                continue;
            }
            let live = self.circles();
            'circles: for (x, a) in live.iter().enumerate() {
                for b in &live[x + 1..] {
                    let shared: BTreeSet<PointId> = self.circles[a.0]
                        .members
                        .intersection(&self.circles[b.0].members)
                        .copied()
                        .collect();
                    if shared.len() >= 3 && self.has_noncollinear_triple(&shared) {
                        let moved = std::mem::take(&mut self.circles[b.0].members);
                        self.circles[b.0].alive = false;
                        self.circles[a.0].members.extend(moved);
                        changed = true;
                        break 'circles;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    // ---- directions ----

    fn dir_find(&self, id: usize) -> (usize, u8) {
        let mut x = id;
        let mut parity = 0u8;
        while self.dir_parent[x] != x {
            parity ^= self.dir_parity[x];
            x = self.dir_parent[x];
        }
        (x, parity)
    }

    fn union_dirs(&mut self, a: usize, b: usize, rel: u8) -> Result<(), RegistryError> {
        let (ra, pa) = self.dir_find(a);
        let (rb, pb) = self.dir_find(b);
        if ra == rb {
            return if pa ^ pb == rel {
                Ok(())
            } else {
                Err(RegistryError::Inconsistent)
            };
        }
        let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.dir_parent[gone] = keep;
        self.dir_parity[gone] = pa ^ pb ^ rel;
        Ok(())
    }

    pub fn register_direction_relation(
        &mut self,
        a: LineId,
        b: LineId,
        rel: DirectionRelation,
    ) -> Result<(), RegistryError> {
        let (a, b) = (self.line_root(a.0), self.line_root(b.0));
        let bit = match rel {
            DirectionRelation::Parallel => 0,
            DirectionRelation::Perpendicular => 1,
        };
        self.union_dirs(a, b, bit)
    }

    /// Known relation between two lines, if any.
    pub fn direction_relation(&self, a: LineId, b: LineId) -> Option<DirectionRelation> {
        let (ra, pa) = self.dir_find(self.line_root(a.0));
        let (rb, pb) = self.dir_find(self.line_root(b.0));
        if ra != rb {
            return None;
        }
        Some(if pa == pb {
            DirectionRelation::Parallel
        } else {
            DirectionRelation::Perpendicular
        })
    }

    /// Live lines grouped into direction classes, keyed for deterministic order.
    pub fn direction_classes(&self) -> Vec<Vec<LineId>> {
        let mut groups: BTreeMap<(usize, u8), Vec<LineId>> = BTreeMap::new();
        for l in self.lines() {
            groups.entry(self.dir_find(l.0)).or_default().push(l);
        }
        let mut out: Vec<Vec<LineId>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn grid_classes(&self) -> Vec<GridClass> {
        let mut groups: BTreeMap<usize, [Vec<LineId>; 2]> = BTreeMap::new();
        for l in self.lines() {
            let (root, parity) = self.dir_find(l.0);
            groups.entry(root).or_default()[parity as usize].push(l);
        }
        let mut out: Vec<GridClass> = groups
            .into_values()
            .map(|[a, b]| {
                let mut axes: Vec<Vec<LineId>> = [a, b].into_iter().filter(|v| !v.is_empty()).collect();
                axes.sort();
                GridClass { axes }
            })
            .collect();
        out.sort_by(|x, y| x.axes.cmp(&y.axes));
        out
    }

    // ---- lengths ----

    fn union_lengths(&mut self, a: usize, b: usize) {
        if a == b || !self.lengths[a].alive || !self.lengths[b].alive {
            return;
        }
        let (keep, gone) = (a.min(b), a.max(b));
        let moved = std::mem::take(&mut self.lengths[gone].members);
        self.lengths[gone].alive = false;
        for s in &moved {
            self.length_of.insert(*s, keep);
        }
        self.lengths[keep].members.extend(moved);
    }

    fn length_slot(&mut self, s: Segment) -> usize {
        if let Some(&i) = self.length_of.get(&s) {
            return i;
        }
        let id = self.lengths.len();
        self.lengths.push(Slot {
            members: [s].into_iter().collect(),
            alive: true,
        });
        self.length_of.insert(s, id);
        id
    }

    pub fn segment(&self, a: PointId, b: PointId) -> Segment {
        Segment::new(self.rep(a), self.rep(b))
    }

    pub fn register_length_equality(&mut self, s: Segment, t: Segment) {
        let s = self.segment(s.0, s.1);
        let t = self.segment(t.0, t.1);
        let a = self.length_slot(s);
        let b = self.length_slot(t);
        self.union_lengths(a, b);
    }

    pub fn equal_length(&self, s: Segment, t: Segment) -> bool {
        let s = self.segment(s.0, s.1);
        let t = self.segment(t.0, t.1);
        s == t || matches!((self.length_of.get(&s), self.length_of.get(&t)), (Some(a), Some(b)) if a == b)
    }

    /// Length classes with at least two segments.
    pub fn length_classes(&self) -> Vec<Vec<Segment>> {
        let mut out: Vec<Vec<Segment>> = self
            .lengths
            .iter()
            .filter(|s| s.alive && s.members.len() >= 2)
            .map(|s| s.members.iter().copied().collect())
            .collect();
        out.sort();
        out
    }

    // ---- snapshot ----

    /// Canonical snapshot: classes by member sets, sorted.
    pub fn snapshot(&self) -> RegistrySnapshot {
        let line_pts = |l: &LineId| self.lines[l.0].members.iter().copied().collect::<Vec<_>>();
        let mut lines: Vec<Vec<PointId>> = self.lines().iter().map(line_pts).collect();
        lines.sort();
        let mut circles: Vec<Vec<PointId>> = self
            .circles()
            .iter()
            .map(|c| self.circles[c.0].members.iter().copied().collect())
            .collect();
        circles.sort();
        let mut directions: Vec<Vec<Vec<PointId>>> = self
            .direction_classes()
            .iter()
            .map(|d| {
                let mut v: Vec<Vec<PointId>> = d.iter().map(line_pts).collect();
                v.sort();
                v
            })
            .collect();
        directions.sort();
        let mut grids: Vec<Vec<Vec<Vec<PointId>>>> = self
            .grid_classes()
            .iter()
            .map(|g| {
                let mut axes: Vec<Vec<Vec<PointId>>> = g
                    .axes
                    .iter()
                    .map(|axis| {
                        let mut v: Vec<Vec<PointId>> = axis.iter().map(line_pts).collect();
                        v.sort();
                        v
                    })
                    .collect();
                axes.sort();
                axes
            })
            .collect();
        grids.sort();
        RegistrySnapshot {
            points: self.point_classes().into_iter().filter(|c| c.len() > 1).collect(),
            lines,
            circles,
            directions,
            grids,
            lengths: self.length_classes(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegistrySnapshot {
    pub points: Vec<Vec<PointId>>,
    pub lines: Vec<Vec<PointId>>,
    pub circles: Vec<Vec<PointId>>,
    pub directions: Vec<Vec<Vec<PointId>>>,
    pub grids: Vec<Vec<Vec<Vec<PointId>>>>,
    pub lengths: Vec<Vec<Segment>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: u32) -> PointId {
        PointId(i)
    }

    #[test]
    fn identity_chain() {
        let mut r = Registry::new(9);
        r.merge_points(p(6), p(7)).unwrap();
        r.merge_points(p(7), p(8)).unwrap();
        assert_eq!(r.members_of(p(8)), vec![p(6), p(7), p(8)]);
        r.merge_points(p(3), p(3)).unwrap();
        assert_eq!(r.point_classes().len(), 7);
    }

    #[test]
    fn merge_cascades_lines() {
        // A=0, G=1, X=2, H=3, Y=4
        let mut r = Registry::new(5);
        r.register_collinear([p(0), p(1), p(2)]).unwrap();
        r.register_collinear([p(0), p(3), p(4)]).unwrap();
        assert_eq!(r.lines().len(), 2);
        r.merge_points(p(1), p(3)).unwrap();
        let lines = r.lines();
        assert_eq!(lines.len(), 1);
        let members: Vec<PointId> = r.line_members(lines[0]).iter().copied().collect();
        assert_eq!(members, vec![p(0), p(1), p(2), p(4)]);
    }

    #[test]
    fn collinear_absorbs_into_existing_line() {
        let mut r = Registry::new(5);
        r.register_collinear([p(0), p(1), p(2)]).unwrap();
        r.register_collinear([p(0), p(1), p(3)]).unwrap();
        assert_eq!(r.lines().len(), 1);
        assert_eq!(r.line_members(r.lines()[0]).len(), 4);
    }

    #[test]
    fn two_point_lines_absorb_third() {
        let mut r = Registry::new(4);
        let l1 = r.ensure_line(p(0), p(1));
        let l2 = r.ensure_line(p(2), p(3));
        r.register_collinear([p(1), p(2), p(3)]).unwrap();
        assert_eq!(r.line_members(l1).len(), 2);
        assert_eq!(
            r.line_members(l2).iter().copied().collect::<Vec<_>>(),
            vec![p(1), p(2), p(3)]
        );
    }

    #[test]
    fn concyclic_rejects_collinear_subset() {
        let mut r = Registry::new(5);
        r.register_collinear([p(0), p(1), p(2)]).unwrap();
        assert_eq!(
            r.register_concyclic([p(0), p(1), p(2), p(3)]),
            Err(RegistryError::CollinearSubset)
        );
        r.register_concyclic([p(0), p(1), p(3), p(4)]).unwrap();
        r.register_concyclic([p(0), p(1), p(3), p(2)]).unwrap_err();
    }

    #[test]
    fn concyclic_absorbs() {
        let mut r = Registry::new(6);
        r.register_concyclic([p(0), p(1), p(2), p(3)]).unwrap();
        r.register_concyclic([p(0), p(1), p(2), p(4)]).unwrap();
        assert_eq!(r.circles().len(), 1);
        assert_eq!(r.circle_members(r.circles()[0]).len(), 5);
    }

    #[test]
    fn perpendicular_composition() {
        let mut r = Registry::new(6);
        let l1 = r.ensure_line(p(0), p(1));
        let l2 = r.ensure_line(p(2), p(3));
        let l3 = r.ensure_line(p(4), p(5));
        r.register_direction_relation(l1, l2, DirectionRelation::Perpendicular)
            .unwrap();
        r.register_direction_relation(l2, l3, DirectionRelation::Perpendicular)
            .unwrap();
        assert_eq!(r.direction_relation(l1, l3), Some(DirectionRelation::Parallel));
        assert_eq!(r.grid_classes().len(), 1);
        assert_eq!(r.direction_classes().len(), 2);
        assert_eq!(
            r.register_direction_relation(l1, l3, DirectionRelation::Perpendicular),
            Err(RegistryError::Inconsistent)
        );
        r.register_direction_relation(l1, l1, DirectionRelation::Parallel)
            .unwrap();
    }

    #[test]
    fn lengths_union() {
        let mut r = Registry::new(4);
        let bd = Segment::new(p(1), p(3));
        let cd = Segment::new(p(2), p(3));
        r.register_length_equality(bd, cd);
        assert_eq!(r.length_classes(), vec![vec![bd, cd]]);
        r.register_length_equality(bd, bd);
        assert_eq!(r.length_classes().len(), 1);
        assert!(r.equal_length(cd, bd));
    }
}
