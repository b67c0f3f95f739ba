//! Painlevé-I tritronquée solution on straight lines in the complex plane.
//!
//! The line `z = a·x + b` is split into two unbounded end segments and one or
//! more finite middle segments. On the end segments the unknown is the
//! remainder `v = Ω − σ√(z/3)` expressed in the compactified variable
//! `s = 1/√z`, so the point at infinity becomes the ordinary endpoint `s = 0`.
//! On the middle segments Painlevé I is solved for `Ω` directly. Every segment
//! is discretized by Chebyshev collocation, the segments are glued by C¹
//! conditions that replace the collocation rows at the junctions, and the
//! whole nonlinear system is solved with Newton's method.
//!
//! ```no_run
//! use tritronquee::{newton_solve, DomainLayout, LineSpec, SolverConfig};
//!
//! let line = LineSpec::imaginary_axis();
//! let layout = DomainLayout::three_domain(-10.0, 10.0, 20, 256, 20).unwrap();
//! let (state, report) = newton_solve(&line, &layout, &SolverConfig::default()).unwrap();
//! assert!(report.converged);
//! let (omega, _) = state.evaluate(0.0).unwrap();
//! println!("Omega(0) = {omega}");
//! ```

pub mod chebyshev;
pub mod complex_line;
pub mod dense;
mod error;
pub mod painleve;
pub mod solver;

pub use num_complex::Complex64 as C64;

pub use chebyshev::{decay_diagnostic, ChebCoeffs, ChebGrid, DecayDiagnostic};
pub use complex_line::{DomainLayout, LineSpec, SectorViolation, Side, Sigma};
pub use dense::{condition_estimate, lu_solve, DenseMatrix, LuFactors};
pub use error::{Error, Result};
pub use painleve::{AsymptoticSeries, EndDomainOperator, MiddleDomainOperator};
pub use solver::{
    assemble, evaluate_solution, initial_iterate, newton_from, newton_solve, Discretization, DomainKind, Forcing,
    DomainSpectrum, JunctionMismatch, SolveReport, SolveState, SolverConfig,
};
