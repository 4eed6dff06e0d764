//! Library half of the `ellwall` binary: the verification checks and
//! output helpers, shared with the acceptance suite.

pub mod verify;

use serde_json::{json, Map, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed conventions plus any overrides chosen on the command line; every
/// output document embeds this under `conventions`.
pub fn conventions(overrides: &[(&str, String)]) -> Value {
    let mut m = Map::new();
    let fixed = [
        ("heisenberg", "[a_m(g), a_k(h)} = m delta_{m+k,0} <g,h>"),
        ("pairing", "<E,pt> = <pt,E> = 1, <sigma+,sigma-> = 1 = -<sigma-,sigma+>"),
        ("vertex_operator", "Y(e^{mE},z) = e^{mE} exp(sum_{n>0} a_{-n}(mE) z^n/n) exp(-sum_{n>0} a_n(mE) z^{-n}/n), no cocycle"),
        ("product", "dual"),
        ("rho_f", "charge reflection c -> -n - c"),
        ("preproj_sign", ellwall_core::local_model::PREPROJ_SIGN_CONVENTION),
        ("preproj_lambda", "lambda_i = A_i"),
        ("hbar", "all formulas at hbar-degree 0"),
        ("extended_mode", "off"),
    ];
    for (k, v) in fixed {
        m.insert(k.into(), json!(v));
    }
    for (k, v) in overrides {
        m.insert((*k).into(), json!(v));
    }
    Value::Object(m)
}

/// Wraps a payload with `conventions` and `tool_version`.
pub fn with_metadata(payload: Value, overrides: &[(&str, String)]) -> Value {
    let mut obj = match payload {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert("conventions".into(), conventions(overrides));
    obj.insert("tool_version".into(), json!(TOOL_VERSION));
    Value::Object(obj)
}
