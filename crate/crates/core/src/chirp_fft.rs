//! Fast kernel application by the chirp–FFT–chirp factorization.
//!
//! Writing x_i = x₀ + iΔx, y_j = y₀ + jΔy, the quadrature sum splits as
//!
//!   ψ_out(x_i) = pref·Δy · e^(i·xx·x_i²/ħ) · e^(i·cross·y₀(x_i−x₀)/ħ)
//!                · Σ_j u_j e^(iθij),   θ = cross·Δx·Δy/ħ,
//!   u_j = ψ_in(y_j)·w_j · e^(i[yy·y_j² + cross·x₀·y_j]/ħ),
//!
//! with w_j the trapezoid weights. When |θ| = 2π/N (grids matched to the kernel,
//! Δx·Δy·N = 2πħ/|cross|) and N_out = N_in, the inner sum is a single length-N
//! DFT whose direction follows the sign of cross. Otherwise the sum is a
//! chirp-z transform, evaluated exactly through Bluestein's identity
//! ij = (i² + j² − (i−j)²)/2 as one zero-padded circular convolution, still
//! O(N log N). Either way the result agrees with the direct quadrature to
//! rounding; the matched route additionally assumes the spacing product hits
//! 2πħ|cross|⁻¹/N at machine precision, the routing tolerance only decides
//! which path runs.
//!
//! Oscillation guards mirror the direct path, except that on matched grids the
//! output edges sit by construction at the Nyquist frequency of the cross term,
//! so unless the input fills its whole grid those corners carry no amplitude.
//! The matched route therefore checks resolution over the classically
//! transported window of the input's moments rather than the full output span.

use crate::error::Result;
use crate::grid::Grid;
use crate::kernel::{check_input, check_resolution, trapezoid_weight, PropagatorKernel};
use crate::tolerances::FAST_MATCH_RTOL;
use crate::wavefunction::WaveFunction;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Which factorization carried a fast application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FastRoute {
    /// Grids matched to the kernel: one DFT of the input length.
    MatchedFft,
    /// General grids: Bluestein chirp-z convolution.
    ChirpZ,
}

impl FastRoute {
    pub fn label(&self) -> &'static str {
        match self {
            FastRoute::MatchedFft => "matched-fft",
            FastRoute::ChirpZ => "chirp-z",
        }
    }
}

/// Mean and half-width of the output window predicted by transporting the
/// input's phase-space moments through the stationary-phase relation
/// cross·x + 2·yy·y + p/ħ·ħ = 0.
fn transported_window(kernel: &PropagatorKernel, psi_in: &WaveFunction) -> (f64, f64) {
    let m = psi_in.moments(kernel.constants().hbar);
    let w = kernel.phase();
    let inv = 1.0 / w.cross;
    let mean = -(m.momentum_mean + 2.0 * w.yy * m.mean) * inv;
    let var = (4.0 * w.yy * w.yy * m.variance + m.momentum_variance + 4.0 * w.yy * m.covariance)
        * inv
        * inv;
    let half = (8.0 * var.max(0.0).sqrt()).max(4.0 * psi_in.grid().spacing);
    (mean - half, mean + half)
}

fn is_matched(kernel: &PropagatorKernel, in_grid: &Grid, out_grid: &Grid) -> bool {
    if in_grid.len != out_grid.len {
        return false;
    }
    let product = in_grid.spacing * out_grid.spacing * in_grid.len as f64;
    let target = 2.0 * PI * kernel.constants().hbar / kernel.phase().cross.abs();
    (product / target - 1.0).abs() <= FAST_MATCH_RTOL
}

/// Σ_j u_j e^(iθij) for i in [0, n_out) at arbitrary θ: Bluestein's algorithm,
/// one forward/forward/inverse FFT triple at the padded power-of-two length.
fn chirp_z(u: &[Complex64], theta: f64, n_out: usize) -> Vec<Complex64> {
    let n_in = u.len();
    let m = (n_in + n_out - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(m);
    let inverse = planner.plan_fft_inverse(m);

    // v_j = u_j e^(i theta j^2 / 2), padded.
    let mut v = vec![Complex64::new(0.0, 0.0); m];
    for (j, &uj) in u.iter().enumerate() {
        let jf = j as f64;
        v[j] = uj * Complex64::cis(0.5 * theta * jf * jf);
    }
    // w_k = e^(-i theta k^2 / 2) laid out circularly for k in [-(n_in-1), n_out-1].
    let mut w = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n_out {
        let kf = k as f64;
        w[k] = Complex64::cis(-0.5 * theta * kf * kf);
    }
    for k in 1..n_in {
        let kf = k as f64;
        w[m - k] = Complex64::cis(-0.5 * theta * kf * kf);
    }

    forward.process(&mut v);
    forward.process(&mut w);
    for (a, b) in v.iter_mut().zip(w.iter()) {
        *a *= b;
    }
    inverse.process(&mut v);

    let scale = 1.0 / m as f64;
    (0..n_out)
        .map(|i| {
            let fi = i as f64;
            v[i] * Complex64::cis(0.5 * theta * fi * fi) * scale
        })
        .collect()
}

/// Fast application, reporting which route ran. Same contract and guards as
/// [`crate::kernel::apply_kernel_direct`].
pub fn apply_kernel_fast_with_route(
    kernel: &PropagatorKernel,
    psi_in: &WaveFunction,
    out_grid: &Grid,
) -> Result<(WaveFunction, FastRoute)> {
    check_input(kernel, psi_in)?;
    let in_grid = *psi_in.grid();
    let matched = is_matched(kernel, &in_grid, out_grid);
    if matched {
        let (lo, hi) = transported_window(kernel, psi_in);
        check_resolution(kernel, psi_in, lo, hi)?;
    } else {
        check_resolution(kernel, psi_in, out_grid.coordinate(0), out_grid.last_coordinate())?;
    }

    let hbar = kernel.constants().hbar;
    let w = *kernel.phase();
    let x0 = out_grid.coordinate(0);
    let y0 = in_grid.coordinate(0);
    let n_in = in_grid.len;

    let mut u = Vec::with_capacity(n_in);
    for (j, psi) in psi_in.samples().iter().enumerate() {
        let y = in_grid.coordinate(j);
        let angle = (w.yy * y * y + w.cross * x0 * y) / hbar;
        u.push(psi * trapezoid_weight(j, n_in) * Complex64::cis(angle));
    }

    let theta = w.cross * in_grid.spacing * out_grid.spacing / hbar;
    let transformed = if matched {
        let mut planner = FftPlanner::new();
        let fft = if theta < 0.0 {
            planner.plan_fft_forward(n_in)
        } else {
            planner.plan_fft_inverse(n_in)
        };
        fft.process(&mut u);
        u
    } else {
        chirp_z(&u, theta, out_grid.len)
    };

    let scale = kernel.prefactor() * in_grid.spacing;
    let mut out = Vec::with_capacity(out_grid.len);
    for (i, f) in transformed.into_iter().enumerate() {
        let x = out_grid.coordinate(i);
        let angle = (w.xx * x * x + w.cross * y0 * (x - x0)) / hbar;
        out.push(f * scale * Complex64::cis(angle));
    }
    let psi_out = WaveFunction::new(*out_grid, kernel.representation().output_space(), out)?;
    Ok((psi_out, if matched { FastRoute::MatchedFft } else { FastRoute::ChirpZ }))
}

/// Fast application; see [`apply_kernel_fast_with_route`].
pub fn apply_kernel_fast(
    kernel: &PropagatorKernel,
    psi_in: &WaveFunction,
    out_grid: &Grid,
) -> Result<WaveFunction> {
    apply_kernel_fast_with_route(kernel, psi_in, out_grid).map(|(psi, _)| psi)
}
