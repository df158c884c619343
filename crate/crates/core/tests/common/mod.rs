#![allow(dead_code)]

use std::path::PathBuf;

use geodiscover_core::algebra::{algebraize_construction, AlgebraicTranslation};
use geodiscover_core::construction::LineRef;
use geodiscover_core::poly::Rational;
use geodiscover_core::prover::{exact_thesis_values, random_exact_instance};
use geodiscover_core::{parse_dsl, Construction, ParsedFile, PointId, Statement, StepKind};
use rand::Rng;

pub fn constructions_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../constructions")
}

pub fn load(name: &str) -> ParsedFile {
    let path = constructions_dir().join(format!("{name}.geo"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_dsl(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn pick(rng: &mut impl Rng, n: usize, k: usize) -> Vec<PointId> {
    let mut ids: Vec<u32> = (0..n as u32).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        ids.swap(i, j);
    }
    ids[..k].iter().map(|&i| PointId(i)).collect()
}

/// Random construction over the rationals: three free points, then midpoints,
/// intersections, feet and points on lines, up to `max_points` points in all.
pub fn random_construction(rng: &mut impl Rng, max_points: usize) -> Construction {
    loop {
        let mut c = Construction::new();
        for name in ["A", "B", "C"] {
            c.free_point(name, q(rng.gen_range(-9..=9)), q(rng.gen_range(-9..=9)))
                .unwrap();
        }
        let names = ["D", "E", "F", "G", "H", "I", "J"];
        let target = rng.gen_range(4..=max_points);
        let mut ok = true;
        while c.len() < target && ok {
            let n = c.len();
            let name = names[n - 3];
            let kind = match rng.gen_range(0..4) {
                0 => {
                    let p = pick(rng, n, 2);
                    StepKind::Midpoint(p[0], p[1])
                }
                1 if n >= 4 => {
                    let p = pick(rng, n, 4);
                    StepKind::IntersectLines(LineRef::Through(p[0], p[1]), LineRef::Through(p[2], p[3]))
                }
                2 => {
                    let p = pick(rng, n, 3);
                    StepKind::Foot {
                        point: p[0],
                        line: LineRef::Through(p[1], p[2]),
                    }
                }
                _ => {
                    let p = pick(rng, n, 2);
                    StepKind::PointOnLine {
                        line: LineRef::Through(p[0], p[1]),
                        hint: (q(rng.gen_range(-9..=9)), q(rng.gen_range(-9..=9))),
                    }
                }
            };
            ok = c.add(name, kind).is_ok();
        }
        if ok && distinct(&c) {
            return c;
        }
    }
}

fn distinct(c: &Construction) -> bool {
    let pts = c.coords();
    let scale = pts
        .iter()
        .fold(0.0f64, |m, p| m.max(p.0.abs()).max(p.1.abs()))
        .max(1.0);
    pts.iter().enumerate().all(|(i, p)| {
        pts[..i]
            .iter()
            .all(|r| (p.0 - r.0).hypot(p.1 - r.1) > 1e-3 * scale)
    })
}

/// Whether every thesis of `stmt` is exactly zero at `k` random rational instances.
pub fn exactly_true(
    c: &Construction,
    t: &AlgebraicTranslation,
    stmt: &Statement,
    k: usize,
    rng: &mut impl Rng,
) -> bool {
    let mut checked = 0;
    let mut attempts = 0;
    while checked < k && attempts < 10 * k {
        attempts += 1;
        let Some(coords) = random_exact_instance(c, rng) else {
            continue;
        };
        if exact_thesis_values(t, stmt, &coords).iter().any(|v| *v != q(0)) {
            return false;
        }
        checked += 1;
    }
    checked == k
}

pub fn translation(c: &Construction) -> AlgebraicTranslation {
    algebraize_construction(c).unwrap()
}

use geodiscover_core::poly::{Monomial, Polynomial};
use std::collections::BTreeMap;

/// All exponent vectors in `n` variables of total degree at most `d`.
pub fn monomials_up_to(n: usize, d: u16) -> Vec<Monomial> {
    fn go(n: usize, d: u16, prefix: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if prefix.len() == n {
            out.push(Monomial::from_exponents(prefix));
            return;
        }
        let used: u16 = prefix.iter().sum();
        for e in 0..=(d - used) {
            prefix.push(e);
            go(n, d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, d, &mut Vec::new(), &mut out);
    out
}

/// Decides whether `f = Σ cᵢ gᵢ` has a solution with every `deg cᵢ ≤ d`, by exact
/// Gaussian elimination on the cofactor coefficients.
pub fn member_by_cofactors(f: &Polynomial, gens: &[Polynomial], d: u16) -> bool {
    let n = f.nvars();
    let monos = monomials_up_to(n, d);
    // columns: one unknown per (generator, cofactor monomial); rows: result monomials
    let mut rows: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
    let cols = gens.len() * monos.len();
    for (gi, g) in gens.iter().enumerate() {
        for (mi, m) in monos.iter().enumerate() {
            for (gm, gc) in g.terms() {
                let row = rows.entry(gm.mul(m)).or_insert_with(|| vec![q(0); cols + 1]);
                row[gi * monos.len() + mi] += gc.clone();
            }
        }
    }
    for (m, c) in f.terms() {
        let Some(row) = rows.get_mut(m) else { return false };
        row[cols] = c.clone();
    }
    let mut matrix: Vec<Vec<Rational>> = rows.into_values().collect();
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(p) = (pivot_row..matrix.len()).find(|&r| matrix[r][col] != q(0)) else {
            continue;
        };
        matrix.swap(pivot_row, p);
        let inv = q(1) / matrix[pivot_row][col].clone();
        for v in matrix[pivot_row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..matrix.len() {
            if r != pivot_row && matrix[r][col] != q(0) {
                let factor = matrix[r][col].clone();
                let pivot = matrix[pivot_row].clone();
                for (v, p) in matrix[r].iter_mut().zip(&pivot).skip(col) {
                    *v -= &factor * p;
                }
            }
        }
        pivot_row += 1;
    }
    // consistent iff no row reads 0 = nonzero
    matrix[pivot_row..].iter().all(|row| row[cols] == q(0))
}

/// Random polynomial with small integer coefficients and total degree at most `d`.
pub fn random_poly(rng: &mut impl Rng, n: usize, d: u16, terms: usize) -> Polynomial {
    let monos = monomials_up_to(n, d);
    Polynomial::from_terms(
        n,
        (0..terms).map(|_| {
            (
                monos[rng.gen_range(0..monos.len())].clone(),
                q(rng.gen_range(-5..=5)),
            )
        }),
    )
}
