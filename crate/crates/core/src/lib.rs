//! Classical linear canonical transformations turned into quantum propagator kernels.
//!
//! The pipeline: a one-parameter family of symplectic matrices (Q = a·q + b·p,
//! P = c·q + d·p with ad − bc = 1) induces quadratic generating functions, which become
//! the phases of closed-form propagator kernels. A parallel Hamilton–Jacobi route builds
//! the same kernels from a complex quantum action S = W + iħ·ln√b. Kernels are applied to
//! discretized wavefunctions either by direct quadrature or by a chirp–FFT–chirp fast
//! path, and everything is cross-checked against an independent Crank–Nicolson integrator
//! and a closed-form free Gaussian.

pub mod chirp_fft;
pub mod error;
pub mod generating;
pub mod grid;
pub mod hamilton_jacobi;
pub mod kernel;
pub mod schrodinger;
pub mod symplectic;
pub mod systems;
pub mod tolerances;
pub mod wavefunction;

pub use error::{Error, Result};
pub use generating::{GeneratingKind, QuadraticGeneratingFunction};
pub use grid::Grid;
pub use hamilton_jacobi::{QuadraticPotential, QuantumAction};
pub use kernel::{PropagatorKernel, Representation};
pub use schrodinger::EvolutionSpec;
pub use symplectic::{PhysicalConstants, SymplecticMatrix, TransformFamily};
pub use wavefunction::{SpaceLabel, WaveFunction};
