//! Parses a JSON run specification and prints the report.
//!
//! `cargo run --example run_spec [path/to/spec.json]`

use cauchy_dual::cli::{parse_spec, run_suite, Overrides};

const DEFAULT_SPEC: &str = r#"{
  "tree": {"kind": "quasi_brownian", "valency": 3, "depth": 10},
  "weights": {"kind": "adjacency"},
  "commands": [
    {"name": "classify-tree"},
    {"name": "check-2iso"},
    {"name": "classify-adjacency"},
    {"name": "moments", "dual": true, "nmax": 8},
    {"name": "dual-subnormality"},
    {"name": "verify-table1", "row": "quasi_brownian", "nmax": 6}
  ]
}"#;

fn main() -> cauchy_dual::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(&path).map_err(|e| cauchy_dual::Error::Io {
            path,
            message: e.to_string(),
        })?,
        None => DEFAULT_SPEC.to_string(),
    };
    let report = run_suite(&parse_spec(&text)?, &Overrides::default())?;
    print!("{}", report.summary());
    Ok(())
}
