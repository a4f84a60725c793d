//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A matrix failed the symplectic constraint a·d − b·c = 1.
    #[error("matrix is not symplectic: |ad - bc - 1| = {det_error:.3e} exceeds {tol:.1e}")]
    NotSymplectic { det_error: f64, tol: f64 },

    /// A representation coefficient needed in a denominator vanished
    /// (for the qQ kernel this is b(t) = 0, a caustic).
    #[error("{coefficient}(t) = {value:.3e} is below the floor {floor:.1e}; the {representation} representation is singular here")]
    SingularRepresentation {
        coefficient: &'static str,
        representation: &'static str,
        value: f64,
        floor: f64,
    },

    /// The family does not satisfy a(t) = −m·ḃ(t) at the requested time.
    #[error("family '{family}' fails the compatibility condition a = -m*db/dt at t = {t}: residual {residual:.3e} exceeds {tol:.1e}")]
    HjIncompatible {
        family: String,
        t: f64,
        residual: f64,
        tol: f64,
    },

    /// Evaluation requested at a declared singular time of a family.
    #[error("t = {t} is a singular time of family '{family}'")]
    SingularTime { family: String, t: f64 },

    /// The grid undersamples the kernel oscillation.
    #[error("grid resolves only {achieved:.2} samples per local phase period (need >= {required}); refine the spacing or shrink the window")]
    Undersampled { achieved: f64, required: f64 },

    /// The grid fails to contain the wavefunction.
    #[error("{fraction:.3e} of the norm sits in the outer {zone_percent:.0}% of the grid (tolerance {tol:.1e}); enlarge the domain")]
    SupportSpill {
        fraction: f64,
        zone_percent: f64,
        tol: f64,
    },

    /// Evolution parameters violate the resolution guard Δt ≤ Δq²·m/ħ · safety.
    #[error("time step {dt:.3e} exceeds the resolution guard {limit:.3e} (= spacing^2 * m/hbar * {safety}); increase steps or coarsen the grid")]
    ResolutionGuard { dt: f64, limit: f64, safety: f64 },

    /// Structurally invalid input (empty grid, nonpositive spacing, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed wavefunction file or sidecar.
    #[error("format error: {0}")]
    Format(String),
}
