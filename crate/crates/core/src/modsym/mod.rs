//! Modular symbols for elliptic curves over Q.

pub mod curve;
pub mod linalg;
pub mod p1;
pub mod space;
pub mod symbol;

pub use curve::{builtin_curve, CurveData};
pub use space::ManinSymbolSpace;
pub use symbol::{extract_eigensymbol, twist_symbol, EigenSymbol, SymbolEvaluator, TwistedSymbol};
