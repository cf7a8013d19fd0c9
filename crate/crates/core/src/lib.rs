//! Trace equivalence for simple cryptographic processes, with compressed and
//! dependency-reduced symbolic exploration.

pub mod checker;
pub mod cli;
pub mod compressed;
pub mod concrete;
pub mod frame;
pub mod parser;
pub mod process;
pub mod reduction;
pub mod solver;
pub mod symbolic;
pub mod term;
pub mod toy;
