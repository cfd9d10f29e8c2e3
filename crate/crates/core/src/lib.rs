//! Numerical laboratory for radial non-radiative solutions of the focusing and
//! defocusing energy-critical wave equation in five space dimensions,
//!
//! ```text
//! u_tt - u_rr - (4/r) u_r = chi_R(r, t) F(u),   F(u) = ±|u|^{4/3} u,
//! ```
//!
//! built around radiation profiles: functions `G` on the real line that
//! parametrize radial finite-energy free waves isometrically.
//!
//! Layout, bottom up:
//!
//! - [`profile`]: grids and piecewise-linear profiles with exact jumps.
//! - [`freewave`]: the profile/data dictionary for free waves.
//! - [`extsolve`]: exterior nonlinear solver and a finite-difference oracle.
//! - [`fixpoint`]: first- and second-order fixed-point constructions.
//! - [`charnum`]: characteristic numbers `(alpha, beta)` and log-log fits.
//! - [`dynamics`]: translation law, uniqueness, overlap and ground-state checks.
//! - [`verify`]: the numbered acceptance checks used by tests and the CLI.

pub mod charnum;
pub mod dynamics;
pub mod error;
pub mod extsolve;
pub mod fixpoint;
pub mod freewave;
pub mod io;
pub mod profile;
mod quad;
pub mod verify;

pub use error::{Error, Result};
pub use profile::{GridSpec, RadialProfile, SIGMA4};
