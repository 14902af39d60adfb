//! Rational Calogero-Moser toolkit built on the root-type Lax pair.

pub mod exactmath;
pub mod rootsys;
pub mod lax;
pub mod eigen;
pub mod matching;
pub mod indicator;
pub mod reconstruct;
pub mod presets;
pub mod collisionsearch;
