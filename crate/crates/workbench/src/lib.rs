//! Orchestration around the core crate: file formats, the eigensymbol cache,
//! the table pipeline and the command line.

pub mod cache;
pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod table;
