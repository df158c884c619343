//! Command-line front end and HTTP service for the geodiscover engine.

pub mod cli;
pub mod server;

use geodiscover_core::{Construction, PointId, Statement, StatementKind};

/// Parses `collinear A B C`, `parallel(A,B,D,E)` and similar; separators are whitespace,
/// commas and parentheses.
pub fn parse_statement(c: &Construction, text: &str) -> Result<Statement, String> {
    let mut words = text
        .split(|ch: char| ch.is_whitespace() || ch == ',' || ch == '(' || ch == ')')
        .filter(|w| !w.is_empty());
    let word = words.next().ok_or("empty statement")?;
    let kind = StatementKind::parse(&word.to_ascii_lowercase())
        .ok_or_else(|| format!("unknown statement kind `{word}`"))?;
    let points = words
        .map(|w| c.find(w).ok_or_else(|| format!("unknown point `{w}`")))
        .collect::<Result<Vec<PointId>, String>>()?;
    Statement::from_points(kind, &points).ok_or_else(|| {
        format!(
            "`{}` takes {} points, got {}",
            kind.as_str(),
            kind.arity(),
            points.len()
        )
    })
}

/// Marks the named points hidden.
pub fn hide_points(c: &mut Construction, names: &[String]) -> Result<(), String> {
    for name in names {
        let p = c.find(name).ok_or_else(|| format!("unknown point `{name}`"))?;
        c.set_hidden(p, true);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use geodiscover_core::parse_dsl;

    #[test]
    fn statements_parse_in_both_notations() {
        let f = parse_dsl("point A 0 0\npoint B 4 0\npoint C 1 3\nmidpoint D B C\nmidpoint E A C\n").unwrap();
        let c = &f.construction;
        let a = parse_statement(c, "parallel D E A B").unwrap();
        let b = parse_statement(c, "Parallel(D,E, A,B)").unwrap();
        assert_eq!(a, b);
        assert!(parse_statement(c, "collinear A B")
            .unwrap_err()
            .contains("takes 3"));
        assert!(parse_statement(c, "collinear A B Z").unwrap_err().contains("`Z`"));
        assert!(parse_statement(c, "tangent A B C").is_err());
    }
}
