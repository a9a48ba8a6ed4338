pub mod baseline;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod gcn;
pub mod graph;
pub mod pipeline;
pub mod risk;
pub mod rng;
pub mod synthetic;
pub mod viz;

pub use error::{Error, Result};
