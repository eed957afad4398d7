#![allow(dead_code)]

use std::path::PathBuf;

use ipta::explore::{build_imdp, BuildOptions, Imdp};
use ipta::lang::{parse_binding, parse_model, parse_query, resolve, Value};
use ipta::pipeline::System;
use ipta::Ipta;

pub fn model_text(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

pub fn bindings(list: &[&str]) -> Vec<(String, Value)> {
    list.iter().map(|b| parse_binding(b).unwrap()).collect()
}

/// The elaborated modules of a model, uncomposed.
pub fn modules(text: &str, consts: &[&str]) -> Vec<Ipta> {
    resolve(&parse_model(text).unwrap(), &bindings(consts))
        .unwrap()
        .modules
}

pub fn system(text: &str, consts: &[&str]) -> System {
    System::parse(text, &bindings(consts)).unwrap()
}

/// The running example with the given number of requests and interval.
pub fn client_server(l: &str, u: &str, requests: u32, timeout: Option<u32>) -> System {
    let mut consts = vec![
        format!("L={l}"),
        format!("U={u}"),
        format!("REQUESTS={requests}"),
    ];
    if let Some(t) = timeout {
        consts.push(format!("TIMEOUT={t}"));
    }
    let refs: Vec<&str> = consts.iter().map(String::as_str).collect();
    system(&model_text("client_server.ipta"), &refs)
}

/// State space of `sys` built for `query`.
pub fn imdp_for(sys: &System, query: &str) -> Imdp {
    let q = sys.compile(&parse_query(query).unwrap()).unwrap();
    build_imdp(&sys.automaton, Some(&q), &BuildOptions::default()).unwrap()
}
