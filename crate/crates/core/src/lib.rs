//! Exact time-Taylor expansion of the incompressible Euler equation on the
//! 3-torus for Fourier-polynomial data, with tools to estimate convergence
//! radii and candidate singular times from the norm series.

pub mod analysis;
pub mod euler;
pub mod exact;
pub mod field;
pub mod norms;
pub mod pade;
pub mod roots;
pub mod symmetry;
