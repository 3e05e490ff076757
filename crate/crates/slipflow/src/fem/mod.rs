//! Finite-element core: quadrature, elements, spaces, assembly, solve.

pub mod assemble;
pub mod element;
pub mod quadrature;
pub mod solve;
pub mod space;
