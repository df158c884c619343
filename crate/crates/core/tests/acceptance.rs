//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Runs without the libtest harness so that every line is printed even when an earlier
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use geodiscover_core::discovery::{discover_with_registry, theorem_statements, DiscoveryOutcome};
use geodiscover_core::groebner::{buchberger, is_groebner_basis, Budget};
use geodiscover_core::numeric::NumericSamples;
use geodiscover_core::poly::{MonomialOrder, Polynomial};
use geodiscover_core::{
    discover, Construction, DiscoveryConfig, DiscoveryReport, NumericConfig, Theorem, TheoremKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

enum Outcome {
    Pass(String),
    Warn(String),
    Fail(String),
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn record(&mut self, id: &str, title: &str, outcome: Outcome) {
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Warn(d) => ("PASS (warning)", d),
            Outcome::Fail(d) => {
                self.failures += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {id}. {title}: {detail}");
    }
}

fn names(ps: &[&str]) -> BTreeSet<String> {
    ps.iter().map(|s| s.to_string()).collect()
}

fn point_set(t: &Theorem) -> BTreeSet<String> {
    t.points.iter().cloned().collect()
}

fn segment_set(t: &Theorem) -> BTreeSet<BTreeSet<String>> {
    t.segments.iter().flatten().map(|[a, b]| names(&[a, b])).collect()
}

/// Lines of each axis of a direction class, each line as a point set.
fn axes(t: &Theorem) -> Vec<Vec<BTreeSet<String>>> {
    t.groups
        .iter()
        .flatten()
        .map(|axis| axis.iter().map(|l| l.iter().cloned().collect()).collect())
        .collect()
}

fn is_direction(t: &Theorem) -> bool {
    matches!(t.kind, TheoremKind::Parallel | TheoremKind::Perpendicular)
}

fn run(file: &str, config: &DiscoveryConfig) -> (Construction, DiscoveryOutcome, Duration) {
    let parsed = load(file);
    let target = parsed.target().expect("file names a target");
    let start = Instant::now();
    let out = discover_with_registry(&parsed.construction, target, config).expect("discovery runs");
    (parsed.construction, out, start.elapsed())
}

fn with_timeout(secs: u64) -> DiscoveryConfig {
    DiscoveryConfig {
        timeout: Duration::from_secs(secs),
        ..DiscoveryConfig::default()
    }
}

fn secs(d: Duration) -> String {
    format!("{:.3} s", d.as_secs_f64())
}

fn midline() -> Outcome {
    let (_, out, took) = run("midline", &with_timeout(5));
    let r = &out.report;
    let parallel = r.theorems.iter().any(|t| {
        t.kind == TheoremKind::Parallel && axes(t) == vec![vec![names(&["D", "E"]), names(&["A", "B"])]]
    });
    let congruent = r.theorems.iter().any(|t| {
        t.kind == TheoremKind::Congruent && segment_set(t) == [names(&["B", "D"]), names(&["C", "D"])].into()
    });
    let texts: Vec<&str> = r.theorems.iter().map(|t| t.text.as_str()).collect();
    if r.theorems.len() == 2 && parallel && congruent && took < Duration::from_secs(2) {
        Outcome::Pass(format!("{texts:?} in {}", secs(took)))
    } else {
        Outcome::Fail(format!("got {texts:?} in {} (limit 2 s)", secs(took)))
    }
}

fn hexagon() -> Outcome {
    let (_, out, took) = run("hexagon", &with_timeout(5));
    let r = &out.report;
    let identity = r
        .theorems
        .iter()
        .filter(|t| t.kind == TheoremKind::Identical)
        .map(point_set)
        .collect::<Vec<_>>();
    let circles: Vec<_> = r
        .theorems
        .iter()
        .filter(|t| t.kind == TheoremKind::Concyclic)
        .collect();
    let hexagon_circle = names(&["A", "B", "C", "D", "E", "F"]);
    let grids = r.theorems.iter().filter(|t| is_direction(t)).count();
    let lengths = r.count(TheoremKind::Congruent);
    let ok = identity == vec![names(&["G", "H", "I"])]
        && circles.len() == 1
        && point_set(circles[0]).is_superset(&hexagon_circle)
        && grids == 3
        && lengths == 3
        && took < Duration::from_secs(30);
    let detail = format!(
        "identity {identity:?}, {} concyclic item(s), {grids} direction classes, {lengths} length classes, {}",
        circles.len(),
        secs(took)
    );
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn euler() -> Outcome {
    let (_, out, took) = run("euler", &with_timeout(5));
    let r = &out.report;
    let identity: BTreeSet<BTreeSet<String>> = r
        .theorems
        .iter()
        .filter(|t| t.kind == TheoremKind::Identical)
        .map(point_set)
        .collect();
    let want: BTreeSet<BTreeSet<String>> = [
        names(&["G", "H", "I"]),
        names(&["J", "K", "L"]),
        names(&["P", "Q", "R"]),
    ]
    .into();
    // class representatives: orthocenter G, centroid J, circumcenter P
    let euler_line = r
        .theorems
        .iter()
        .any(|t| t.kind == TheoremKind::Collinear && point_set(t).is_superset(&names(&["G", "J", "P"])));
    let per_check = r.timings.per_conjecture.iter().map(|c| c.ms).max().unwrap_or(0);
    let ok = identity == want && euler_line && took < Duration::from_secs(60) && per_check <= 5_000;
    let detail = format!(
        "identity {identity:?}, Euler line {}, slowest check {per_check} ms, {}",
        if euler_line { "found" } else { "missing" },
        secs(took)
    );
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn nine_point() -> Outcome {
    let (_, out, took) = run("ninepoint", &with_timeout(5));
    let nine = names(&["D", "E", "F", "G", "H", "I", "J", "K", "L"]);
    let circle = out
        .report
        .theorems
        .iter()
        .find(|t| t.kind == TheoremKind::Concyclic && point_set(t).is_superset(&nine));
    match circle {
        Some(t) if took < Duration::from_secs(60) => {
            Outcome::Pass(format!("\"{}\" in {}", t.text, secs(took)))
        }
        _ => Outcome::Fail(format!("no circle through all nine points, {}", secs(took))),
    }
}

/// Every statement behind the report holds at freshly seeded numeric instances.
fn numerically_sound(c: &Construction, r: &DiscoveryReport) -> Result<(), String> {
    let samples = NumericSamples::new(
        c,
        &NumericConfig {
            seed: 0xfeed,
            resamples: 8,
            ..NumericConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    for t in &r.theorems {
        for s in theorem_statements(c, t).unwrap_or_default() {
            if !samples.check(&s) {
                return Err(format!("\"{}\" fails at a fresh instance", t.text));
            }
        }
    }
    Ok(())
}

fn imo() -> Outcome {
    let config = DiscoveryConfig {
        timeout: Duration::from_secs(30),
        pin: true,
        ..DiscoveryConfig::default()
    };
    let (c, out, took) = run("imo2010", &config);
    let r = &out.report;
    if let Err(e) = numerically_sound(&c, r) {
        return Outcome::Fail(e);
    }
    let congruent = r.theorems.iter().any(|t| {
        t.kind == TheoremKind::Congruent
            && segment_set(t).is_superset(&[names(&["A", "P"]), names(&["A", "Q"])].into())
    });
    let parallel = r.theorems.iter().filter(|t| is_direction(t)).any(|t| {
        axes(t).iter().any(|axis| {
            axis.iter().any(|l| l.is_superset(&names(&["D", "P"])))
                && axis.iter().any(|l| l.is_superset(&names(&["E", "Q"])))
        })
    });
    let circle = |pts: &[&str]| {
        r.theorems
            .iter()
            .any(|t| t.kind == TheoremKind::Concyclic && point_set(t).is_superset(&names(pts)))
    };
    let found = [
        ("AP ≅ AQ", congruent),
        ("DP ∥ EQ", parallel),
        ("C,D,P,Q concyclic", circle(&["C", "D", "P", "Q"])),
        ("A,F,P,Q concyclic", circle(&["A", "F", "P", "Q"])),
    ];
    let missing: Vec<&str> = found.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let unknown = r
        .timings
        .per_conjecture
        .iter()
        .filter(|c| c.verdict == geodiscover_core::discovery::LogVerdict::Unknown)
        .count();
    if missing.is_empty() {
        Outcome::Pass(format!("all four found with pinned subsystems in {}", secs(took)))
    } else {
        Outcome::Warn(format!(
            "missing {missing:?} ({unknown} checks Unknown at 30 s), no false theorem reported, {}",
            secs(took)
        ))
    }
}

fn soundness_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut theorems = 0;
    let mut statements = 0;
    for round in 0..200 {
        let c = random_construction(&mut rng, 6);
        let t = translation(&c);
        let target = geodiscover_core::PointId(rng.gen_range(0..c.len() as u32));
        let config = DiscoveryConfig {
            numeric: NumericConfig {
                seed: round,
                ..NumericConfig::default()
            },
            timings: false,
            ..with_timeout(5)
        };
        let out = match discover_with_registry(&c, target, &config) {
            Ok(o) => o,
            Err(e) => return Outcome::Fail(format!("round {round}: {e}")),
        };
        let mut stmts = out.proved.clone();
        for th in &out.report.theorems {
            theorems += 1;
            stmts.extend(theorem_statements(&c, th).unwrap_or_default());
        }
        for s in &stmts {
            statements += 1;
            if !exactly_true(&c, &t, s, 10, &mut rng) {
                let text = s.describe(|p| c.name(p).to_string());
                return Outcome::Fail(format!("round {round}: \"{text}\" is not exactly zero"));
            }
        }
    }
    Outcome::Pass(format!(
        "200 constructions, {theorems} theorems, {statements} statements exact at 10 instances each"
    ))
}

/// Order-free view of a report's theorems.
fn normalized(r: &DiscoveryReport) -> BTreeSet<String> {
    r.theorems
        .iter()
        .map(|t| {
            let mut axes: Vec<Vec<BTreeSet<String>>> = axes(t);
            for a in &mut axes {
                a.sort();
            }
            axes.sort();
            format!("{:?} {:?} {:?} {:?}", t.kind, point_set(t), segment_set(t), axes)
        })
        .collect()
}

fn small_fixtures() -> Vec<(String, Construction, geodiscover_core::PointId)> {
    let mut out = Vec::new();
    for name in ["midline", "parallelogram"] {
        let f = load(name);
        out.push((name.to_string(), f.construction.clone(), f.target().unwrap()));
    }
    let square = geodiscover_core::parse_dsl(
        "point A 0 0\npoint B 2 0\nregular_polygon A B 4 C D\nintersect M line(A,C) line(B,D)\nmidpoint N A B\ndiscover M\n",
    )
    .unwrap();
    out.push((
        "square".into(),
        square.construction.clone(),
        square.target().unwrap(),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..30 {
        let c = random_construction(&mut rng, 7);
        let target = geodiscover_core::PointId(c.len() as u32 - 1);
        out.push((format!("random-{i}"), c, target));
    }
    out
}

fn pruning_equivalence() -> Outcome {
    let fixtures = small_fixtures();
    for (name, c, target) in &fixtures {
        let config = DiscoveryConfig {
            timings: false,
            ..with_timeout(5)
        };
        let brute = DiscoveryConfig {
            pruning: false,
            ..config.clone()
        };
        let a = discover_with_registry(c, *target, &config).unwrap();
        let b = discover_with_registry(c, *target, &brute).unwrap();
        if normalized(&a.report) != normalized(&b.report) {
            return Outcome::Fail(format!("{name}: reports differ"));
        }
        if a.registry.snapshot() != b.registry.snapshot() {
            return Outcome::Fail(format!("{name}: registries differ"));
        }
    }
    Outcome::Pass(format!(
        "{} constructions of at most 7 points agree",
        fixtures.len()
    ))
}

fn groebner_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut members = 0;
    for i in 0..50 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=n);
        let gens: Vec<Polynomial> = (0..k)
            .map(|_| random_poly(&mut rng, n, 2, 4))
            .filter(|g| !g.is_zero())
            .collect();
        if gens.is_empty() {
            continue;
        }
        for order in [MonomialOrder::DegRevLex, MonomialOrder::Lex] {
            let gb = buchberger(&gens, order, &Budget::unlimited()).unwrap();
            if !is_groebner_basis(&gb.polys, order) {
                return Outcome::Fail(format!("ideal {i}: S-polynomial check fails under {order:?}"));
            }
        }
        let gb = buchberger(&gens, MonomialOrder::DegRevLex, &Budget::unlimited()).unwrap();
        // one known member and one random candidate per ideal
        let member: Polynomial = gens.iter().fold(Polynomial::zero(n), |acc, g| {
            &acc + &(&random_poly(&mut rng, n, 1, 3) * g)
        });
        let candidate = random_poly(&mut rng, n, 2, 3);
        for f in [member, candidate] {
            let by_gb = gb.contains(&f);
            let by_oracle = member_by_cofactors(&f, &gens, 2) || member_by_cofactors(&f, &gens, 4);
            if by_gb != by_oracle {
                return Outcome::Fail(format!(
                    "ideal {i}: basis says {by_gb}, cofactor oracle says {by_oracle}"
                ));
            }
            members += usize::from(by_gb);
        }
    }
    Outcome::Pass(format!(
        "50 ideals, bases verified, 100 membership queries agree ({members} members)"
    ))
}

fn twelve_gon() -> Outcome {
    let names: Vec<String> = (3..=12).map(|i| format!("V{i}")).collect();
    let text = format!(
        "point A 0 0\npoint B 1 0\nregular_polygon A B 12 {}\ndiscover A\n",
        names.join(" ")
    );
    let f = geodiscover_core::parse_dsl(&text).unwrap();
    let start = Instant::now();
    let r = discover(&f.construction, f.target().unwrap(), &with_timeout(60)).unwrap();
    let took = start.elapsed();
    let detail = format!(
        "{} theorems in {} (limit 600 s); 20-gon timing is recorded by the scaling benchmark",
        r.theorems.len(),
        secs(took)
    );
    if took < Duration::from_secs(600) && !r.halted {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn main() -> ExitCode {
    // libtest passes flags such as --nocapture; a name filter selects criteria by number
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    type Criterion = (&'static str, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("1", "midline theorem", midline),
        ("2", "regular hexagon", hexagon),
        ("3", "Euler line", euler),
        ("4", "nine-point circle", nine_point),
        ("5", "IMO 2010 shortlist (stretch)", imo),
        ("6", "soundness fuzz", soundness_fuzz),
        ("7", "pruning equivalence", pruning_equivalence),
        ("8", "Gröbner basis properties", groebner_suite),
        ("9", "regular 12-gon within 10 minutes", twelve_gon),
    ];
    let mut suite = Suite { failures: 0 };
    for (id, title, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| x == id) {
            continue;
        }
        suite.record(id, title, f());
    }
    if suite.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criterion(s) failed", suite.failures);
        ExitCode::FAILURE
    }
}
