//! Bundled replay corpus and run helpers shared by the binary and the
//! acceptance suite.

use divforge_core::script::parse::ParseError;
use divforge_core::script::{evaluate, EvalState, Report};

/// The bundled construction replays, in run order.
pub const CORPUS: &[(&str, &str)] = &[
    ("cone.srf", include_str!("../corpus/cone.srf")),
    ("prop_q3.srf", include_str!("../corpus/prop_q3.srf")),
    ("elliptic.srf", include_str!("../corpus/elliptic.srf")),
    ("f4.srf", include_str!("../corpus/f4.srf")),
    ("p2.srf", include_str!("../corpus/p2.srf")),
];

pub fn corpus_script(name: &str) -> Option<&'static str> {
    CORPUS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// Runs one script under the engine; trace verbosity from DIVFORGE_TRACE.
pub fn run_script(name: &str, text: &str) -> Result<(Report, EvalState), ParseError> {
    let trace = std::env::var("DIVFORGE_TRACE")
        .map(|v| v == "1")
        .unwrap_or(false);
    evaluate(name, text, trace)
}
