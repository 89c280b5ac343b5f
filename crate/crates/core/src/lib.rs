//! Euclidean plane geometry: a construction language, a numeric kernel,
//! forward-chaining deduction with traceback, and the dataset and proof
//! search pipelines built on them.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod builder;
pub mod catalog;
pub mod engine;
pub mod figure;
pub mod filter;
pub mod generator;
pub mod lang;
pub mod numeric;
pub mod prover;
pub mod statement;
pub mod traceback;
