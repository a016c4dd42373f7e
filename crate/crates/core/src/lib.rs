//! Generalization-gap bounds driven by Rényi entropy, the method-of-types
//! machinery behind them, and Monte-Carlo harnesses that check the bounds on
//! synthetic discrete tasks.

pub mod dist;
pub mod bounds;
pub mod cli;
pub mod entropy;
pub mod numeric;
pub mod rng;
pub mod simulator;
pub mod types;
