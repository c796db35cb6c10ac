//! Discrete integration over lattices: summed-area tables, corner
//! coefficients of rectilinear domains, slanted integrals along monotone
//! lattice curves, and the detachment calculus.

#![no_std]

extern crate alloc;

pub mod detach;
pub mod green;
pub mod grid;
pub mod sat;
pub mod slant;
