//! Command line support for ddgeo-core: input loading, the worker pool,
//! dataset shards, the subprocess proposer and the matcher benchmark.

pub mod bench;
pub mod exec;
pub mod inputs;
pub mod pool;
pub mod shards;

pub use inputs::{CliError, Inputs};
