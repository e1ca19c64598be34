//! Numerical toolkit for unitarily invariant measures on Hermitian
//! matrices: orbital integrals by dual routes (Schur series and closed
//! determinant), characteristic functions and densities of the ergodic
//! limit measures, spectral-scaling limit diagnostics, seeded Monte Carlo
//! samplers, fundamental splines, and total-positivity tests.

mod dd;
pub mod convergence;
pub mod ergodic;
pub mod orbital;
pub mod partition;
pub mod quad;
pub mod sampling;
pub mod spectrum;
pub mod splines;
pub mod symfunc;
pub mod tp;

pub use partition::Partition;
pub use spectrum::{EvalPoint, Spectrum, SpectrumError};

pub use convergence::{LimitEstimate, SpectrumSequence};
pub use ergodic::ErgodicParams;
pub use orbital::{OnevarEvaluator, SeriesResult};
pub use sampling::{HermitianSample, SamplerSpec, UnitaryMatrix};
pub use splines::KnotVector;
pub use tp::TabulatedDensity;
