//! Implication of embedded dependencies by the chase, with countermodels for
//! failed implications and checkable inclusion-dependency deductions for
//! successful ones.

pub mod chase;
pub mod cli;
pub mod model;
pub mod proof;
pub mod symbol;
pub mod textio;

pub use symbol::Symbol;
