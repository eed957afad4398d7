//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use ipta::lang::{parse_binding, parse_query, Query};
use ipta::pipeline::System;

pub fn model_text(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

/// The client/server example with interval [0.7, 0.8] on normal responses.
pub fn client_server(requests: u32, timeout: u32) -> System {
    let bindings: Vec<_> = [
        "L=0.7".to_string(),
        "U=0.8".to_string(),
        format!("REQUESTS={requests}"),
        format!("TIMEOUT={timeout}"),
    ]
    .iter()
    .map(|b| parse_binding(b).unwrap())
    .collect();
    System::parse(&model_text("client_server.ipta"), &bindings).unwrap()
}

pub fn min_fast_responses() -> Query {
    parse_query("Pmin=? [ F \"lessThan50PercentSlow\" ]").unwrap()
}
