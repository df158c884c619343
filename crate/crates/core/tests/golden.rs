mod common;

use geodiscover_core::{discover, DiscoveryConfig};

use common::*;

const FIXTURES: [&str; 5] = ["midline", "hexagon", "euler", "ninepoint", "parallelogram"];

/// Set `UPDATE_GOLDEN=1` to rewrite the expected files.
#[test]
fn reports_match_golden_files() {
    let config = DiscoveryConfig {
        timings: false,
        ..DiscoveryConfig::default()
    };
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for name in FIXTURES {
        let f = load(name);
        let report = discover(&f.construction, f.target().unwrap(), &config).unwrap();
        let json = report.to_json() + "\n";
        let path = dir.join(format!("{name}.json"));
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(&path, &json).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(json, expected, "{name}");
    }
}
