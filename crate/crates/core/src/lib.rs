#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod b_calculus;
pub mod complex_structure;
pub mod formal_nn;
pub mod lattice;
pub mod lattice_monoid;
pub mod linalg;
pub mod model_space;
pub mod par;
