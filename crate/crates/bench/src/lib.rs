//! Shared fixtures for the benchmarks and the scaling report.

use std::path::PathBuf;

use geodiscover_core::poly::Polynomial;
use geodiscover_core::{parse_dsl, ParsedFile};

pub fn constructions_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../constructions")
}

pub fn load(name: &str) -> ParsedFile {
    let path = constructions_dir().join(format!("{name}.geo"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_dsl(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Regular `n`-gon on the unit segment AB with discovery aimed at A.
pub fn polygon(n: usize) -> ParsedFile {
    let names: Vec<String> = (3..=n).map(|i| format!("V{i}")).collect();
    let text = format!(
        "point A 0 0\npoint B 1 0\nregular_polygon A B {n} {}\ndiscover A\n",
        names.join(" ")
    );
    parse_dsl(&text).expect("polygon parses")
}

/// Katsura system in `n + 1` variables, a standard Gröbner benchmark.
pub fn katsura(n: usize) -> Vec<Polynomial> {
    let vars = n + 1;
    let u = |i: isize| -> Polynomial {
        let i = i.unsigned_abs();
        if i <= n {
            Polynomial::var(vars, i)
        } else {
            Polynomial::zero(vars)
        }
    };
    let mut out = Vec::new();
    for m in 0..n as isize {
        let mut sum = Polynomial::zero(vars);
        for l in -(n as isize)..=(n as isize) {
            sum = &sum + &(&u(l) * &u(m - l));
        }
        out.push(&sum - &u(m));
    }
    let mut linear = Polynomial::from_int(vars, -1);
    for l in -(n as isize)..=(n as isize) {
        linear = &linear + &u(l);
    }
    out.push(linear);
    out
}
