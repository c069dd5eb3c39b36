//! Exact and p-adic arithmetic for signed Iwasawa invariants of supersingular
//! elliptic curves: cyclotomic rings, truncated Iwasawa algebras, modular
//! symbols, signed reconstruction, coprimality certificates and c2 divisors.
#![no_std]

extern crate alloc;

pub mod arith;
pub mod chern;
pub mod coprimality;
pub mod cyclotomic;
pub mod error;
pub mod iwasawa;
pub mod modsym;
pub mod padic;
pub mod poly;
pub mod ser;
pub mod signed;

pub use error::{Error, Result};
