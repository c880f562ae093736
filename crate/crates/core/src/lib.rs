//! Spectrality analysis for infinite convolutions generated by complete
//! residue systems.

pub mod analysis;
pub mod arith;
pub mod fourier;
pub mod intpoly;
pub mod moran;
pub mod residue;
pub mod spectrum;
