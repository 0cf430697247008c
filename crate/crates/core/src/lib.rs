//! Oscillation theory for 2x2 trace-normed canonical systems `J u' = -z H u`.
//!
//! The crate counts and locates eigenvalues through the Prüfer angle,
//! classifies semibounded systems from their angle profile `phi`, estimates
//! the bottom of the essential spectrum, converts Schrödinger operators and
//! diagonal systems, and estimates growth of transfer matrices.

pub mod entire;
pub mod exec;
pub mod hamiltonian;
pub mod ode;
pub mod oracle;
pub mod pruefer;
pub mod quad;
pub mod spectra;
pub mod transforms;

pub use exec::Execution;
pub use hamiltonian::{Hamiltonian, MatrixH, PhiPiece, PhiProfile, Segment, SegmentKind, Tail};
