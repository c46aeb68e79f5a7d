//! Simulation and verification laboratory for patterned random matrices
//! whose entries are continuous-time random walks or randomly stopped walks.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! walks/clocks  ->  ensemble  ->  spectra/empirics
//!      ^                              |
//!      +--- specfn / combinat  <------+   (closed-form and brute-force oracles)
//! ```
//!
//! * [`specfn`] — special functions and closed-form limit moments,
//! * [`walks`] — step laws and discrete random-walk increments,
//! * [`clocks`] — stable subordinators, inverse subordinators, fractional Poisson sampling,
//! * [`patterns`] — link functions and their structural diagnostics,
//! * [`ensemble`] — matrix-valued process samples,
//! * [`spectra`] — eigenvalues, empirical spectral distributions, trace moments,
//! * [`combinat`] — circuits, pair-matched words, brute-force class counting,
//! * [`empirics`] — empirical eigenvalue processes and finite-dimensional statistics,
//! * [`stream`] — deterministic, splittable random streams for parallel trials.

pub mod clocks;
pub mod combinat;
pub mod empirics;
pub mod ensemble;
pub mod patterns;
pub mod specfn;
pub mod spectra;
pub mod stream;
pub mod walks;

pub use clocks::{FppMethod, FppPath, InversePath};
pub use ensemble::{Clock, MatrixSnapshot, ProcessConfig, ProcessSample, Scaling};
pub use patterns::{LinkKind, LinkTable};
pub use spectra::{ComplexSpectrum, Esd, MomentEstimate};
pub use stream::RandomStream;
pub use walks::{StepLaw, TimeGrid};
