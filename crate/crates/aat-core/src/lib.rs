//! Elimination pipeline, addition-theorem variety, addition laws and numeric
//! verification built on the exact kernel.

pub mod addition;
pub mod alphabet;
pub mod elimination;
pub mod extfield;
pub mod family;
pub mod generator;
pub mod numeric;
pub mod polyutil;
pub mod pipeline;
pub mod problem;
pub mod registry;
pub mod report;
pub mod variety;
