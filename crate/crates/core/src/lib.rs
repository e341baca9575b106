pub mod catalog;
pub mod fields;
pub mod geometry;
pub mod harness;
pub mod operators;
pub mod soliton;
pub mod symexpr;
