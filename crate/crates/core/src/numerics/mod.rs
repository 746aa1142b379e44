//! Generic one-dimensional numerical tools used by the asymptotic formulas.

pub mod quadrature;
pub mod roots;

pub use quadrature::{integrate, QuadResult};
pub use roots::{expand_upper_bracket, find_root};
