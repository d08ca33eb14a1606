//! Graph I/O, brute-force oracles, generators and the experiment runner.

pub mod baseline;
pub mod experiment;
pub mod generate;
pub mod io;
pub mod oracle;
pub mod stats;
