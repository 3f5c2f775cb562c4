//! The surface-script language: lexer, parser, evaluator and report emitter.

pub mod ast;
pub mod eval;
pub mod lex;
pub mod parse;
pub mod report;

pub use ast::Script;
pub use eval::{evaluate, EvalState, Evaluator};
pub use parse::{parse_script, ParseError};
pub use report::Report;
