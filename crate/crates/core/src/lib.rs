//! divforge-core: exact-arithmetic divisor calculus on rational and ruled
//! surfaces and their iterated blow-ups.
//!
//! The crate is generic over the integer scalar via [`scalar::Scalar`];
//! the aliases below fix the default arbitrary-precision instantiation used
//! by the script engine and CLI.

pub mod base;
pub mod ledger;
pub mod linsys;
pub mod picard;
pub mod ruled;
pub mod scalar;
pub mod script;
pub mod sing;

pub use scalar::Scalar;

/// Default exact integer scalar.
pub type Int = num_bigint::BigInt;

pub type CurveClassExpr = base::CurveClassExpr<Int>;
pub type BaseCurve = base::BaseCurve<Int>;
pub type DivisorClass = picard::DivisorClass<Int>;
pub type SurfaceModel = picard::SurfaceModel<Int>;
pub type CurveRecord = picard::CurveRecord<Int>;
pub type ExceptionalConfig = sing::ExceptionalConfig<Int>;
pub type Cycle = sing::Cycle<Int>;
pub type LedgerState = ledger::LedgerState<Int>;
pub type Interval = ledger::Interval<Int>;
