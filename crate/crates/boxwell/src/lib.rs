//! Numerical toolkit for the wall-corrected Hamiltonian of a particle in an
//! infinite box.
//!
//! The eigenvalue problem of the box admits closed-form solutions, yet the
//! operator that actually has the windowed eigenfunctions as whole-line
//! eigenstates carries extra wall-localized derivative terms. This crate
//! cross-validates that picture four independent ways:
//!
//! * [`analytic`] - closed forms: energies, box modes, momentum
//!   wavefunctions in two printed forms, and the momentum density;
//! * [`transform`] - direct quadrature Fourier transforms between sampled
//!   position and momentum representations;
//! * [`momsolver`] - a dense discretization of the momentum-space integral
//!   equation, solved as a general complex eigenproblem with overlap-based
//!   mode matching and convergence studies;
//! * [`mollifier`] - a smoothed position-space realization of the
//!   wall-corrected operator, verified weakly against test functions as the
//!   smoothing width shrinks;
//! * [`moments`] - truncated momentum moments, their convergent values and
//!   divergence growth laws.
//!
//! [`domain`] holds the shared configuration, grid, and sample types.

pub mod analytic;
pub mod domain;
pub mod mollifier;
pub mod moments;
pub mod momsolver;
mod quad;
pub mod transform;

pub use analytic::{AnalyticError, PhiForm, SampledFunction};
pub use domain::{
    BoxConfig, DomainError, Energy, MomentumGrid, PositionGrid, QuadratureRule, QuantumNumber,
    SampleGrid, WaveSample,
};
pub use mollifier::{MollifierError, MollifierParams, OperatorVariant};
pub use moments::{MomentError, MomentReport, MomentRule, Verdict};
pub use momsolver::{
    ComplexOperatorMatrix, KernelConvention, MatchedSpectrum, OperatorOptions, RawSpectrum,
    SolveError,
};
