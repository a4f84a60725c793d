//! Propagator kernels built from symplectic data, and their direct application.
//!
//! The position-position kernel of a transformation with b ≠ 0 is
//!
//!   ⟨q|Q; t⟩ = √(−1/(2πiħb)) · exp[(i/ħ)(2qQ − a·q² − d·Q²)/(2b)],
//!
//! i.e. prefactor × exp(i·W₁(q, Q)/ħ). The other three representations swap W₁
//! for W₂/W₃/W₄ with prefactors √(1/(2πħd)), √(1/(2πħa)), √(1/(2πiħc)). All
//! square roots are principal-branch, which for the free particle reproduces the
//! Feynman propagator phase e^(−iπ/4) at t > 0. Kernels built from a family
//! carry a caustic count n and the continuity phase e^(−iπ/2·n) across b = 0.
//!
//! Application is ψ_out(x) = ∫ K(x, y)·ψ_in(y) dy by trapezoid quadrature; the
//! integration grid must resolve the kernel chirp over the region where ψ_in
//! actually lives (MIN_SAMPLES_PER_PERIOD samples per local period), and ψ_in
//! must vanish toward its grid edges. The check covers the kernel phase only;
//! sharply chirped inputs need correspondingly finer grids.

use crate::chirp_fft;
use crate::error::{Error, Result};
use crate::generating::{from_matrix, GeneratingKind, QuadraticGeneratingFunction};
use crate::grid::Grid;
use crate::symplectic::{PhysicalConstants, SymplecticMatrix, TransformFamily};
use crate::tolerances::{BOUNDARY_FRACTION, COEFF_FLOOR, GRID_TOL, MIN_SAMPLES_PER_PERIOD};
use crate::wavefunction::{SpaceLabel, WaveFunction};
use num_complex::Complex64;

/// Which mixed matrix element the kernel is: old variable ⟨x| against new |y⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// ⟨q|Q⟩, phase W₁
    PositionPosition,
    /// ⟨q|P⟩, phase W₂
    PositionMomentum,
    /// ⟨p|Q⟩, phase W₃
    MomentumPosition,
    /// ⟨p|P⟩, phase W₄
    MomentumMomentum,
}

impl Representation {
    pub fn label(&self) -> &'static str {
        match self {
            Representation::PositionPosition => "qQ",
            Representation::PositionMomentum => "qP",
            Representation::MomentumPosition => "pQ",
            Representation::MomentumMomentum => "pP",
        }
    }

    pub fn generating_kind(&self) -> GeneratingKind {
        match self {
            Representation::PositionPosition => GeneratingKind::W1,
            Representation::PositionMomentum => GeneratingKind::W2,
            Representation::MomentumPosition => GeneratingKind::W3,
            Representation::MomentumMomentum => GeneratingKind::W4,
        }
    }

    /// Space of the wavefunctions this kernel consumes (the new-side variable).
    pub fn input_space(&self) -> SpaceLabel {
        match self {
            Representation::PositionPosition | Representation::MomentumPosition => SpaceLabel::NewPosition,
            Representation::PositionMomentum | Representation::MomentumMomentum => SpaceLabel::NewMomentum,
        }
    }

    /// Space of the wavefunctions this kernel produces (the old-side variable).
    pub fn output_space(&self) -> SpaceLabel {
        match self {
            Representation::PositionPosition | Representation::PositionMomentum => SpaceLabel::OldPosition,
            Representation::MomentumPosition | Representation::MomentumMomentum => SpaceLabel::OldMomentum,
        }
    }
}

/// A kernel K(x, y) = prefactor · exp(i·W(x, y)/ħ).
#[derive(Debug, Clone)]
pub struct PropagatorKernel {
    representation: Representation,
    matrix: SymplecticMatrix,
    phase: QuadraticGeneratingFunction,
    prefactor: Complex64,
    constants: PhysicalConstants,
    time: f64,
    caustic_crossings: usize,
}

impl PropagatorKernel {
    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn matrix(&self) -> &SymplecticMatrix {
        &self.matrix
    }

    pub fn phase(&self) -> &QuadraticGeneratingFunction {
        &self.phase
    }

    pub fn prefactor(&self) -> Complex64 {
        self.prefactor
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Number of b = 0 crossings folded into the prefactor phase; zero for
    /// kernels built from a bare matrix.
    pub fn caustic_crossings(&self) -> usize {
        self.caustic_crossings
    }

    /// K(x, y) with x in the old-side variable, y in the new-side one.
    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        self.prefactor * Complex64::cis(self.phase.value(x, y) / self.constants.hbar)
    }
}

/// Squared prefactor for each representation; the principal square root of this
/// is the kernel normalization.
fn prefactor_squared(representation: Representation, m: &SymplecticMatrix, hbar: f64) -> Complex64 {
    let two_pi_h = 2.0 * std::f64::consts::PI * hbar;
    match representation {
        // -1/(2*pi*i*hbar*b) = i/(2*pi*hbar*b)
        Representation::PositionPosition => Complex64::new(0.0, 1.0 / (two_pi_h * m.b)),
        Representation::PositionMomentum => Complex64::new(1.0 / (two_pi_h * m.d), 0.0),
        Representation::MomentumPosition => Complex64::new(1.0 / (two_pi_h * m.a), 0.0),
        // 1/(2*pi*i*hbar*c) = -i/(2*pi*hbar*c)
        Representation::MomentumMomentum => Complex64::new(0.0, -1.0 / (two_pi_h * m.c)),
    }
}

/// Builds the kernel of a single matrix in the given representation, on the
/// principal branch. Rejects non-symplectic matrices and vanishing
/// representation coefficients.
pub fn build_kernel(
    m: &SymplecticMatrix,
    representation: Representation,
    t: f64,
    constants: &PhysicalConstants,
) -> Result<PropagatorKernel> {
    let report = m.validate();
    if !report.ok {
        return Err(Error::NotSymplectic { det_error: report.det_error, tol: crate::tolerances::DET_TOL });
    }
    let phase = from_matrix(representation.generating_kind(), m)?;
    let prefactor = prefactor_squared(representation, m, constants.hbar).sqrt();
    Ok(PropagatorKernel {
        representation,
        matrix: *m,
        phase,
        prefactor,
        constants: *constants,
        time: t,
        caustic_crossings: 0,
    })
}

/// Builds the position-position kernel of a family at time t > 0, carrying the
/// phase by continuity from t = 0⁺: each zero of b crossed along the way
/// multiplies the prefactor by e^(−iπ/2). With no crossing this coincides with
/// the principal branch.
pub fn build_kernel_from_family(
    family: &TransformFamily,
    t: f64,
    constants: &PhysicalConstants,
) -> Result<PropagatorKernel> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!(
            "family kernels evolve forward; t = {t} is not positive (build from the matrix instead)"
        )));
    }
    if family.is_singular(t) {
        let b = family.matrix_at(t).b;
        return Err(Error::SingularRepresentation {
            coefficient: "b",
            representation: "qQ",
            value: b,
            floor: COEFF_FLOOR,
        });
    }
    let m = family.matrix_at(t);
    let report = m.validate();
    if !report.ok {
        return Err(Error::NotSymplectic { det_error: report.det_error, tol: crate::tolerances::DET_TOL });
    }
    let phase = from_matrix(GeneratingKind::W1, &m)?;
    let crossings = family.caustic_crossings(t);
    // Initial branch read off just after t = 0; identity-started compatible
    // families have b < 0 there, giving the Feynman e^(-i*pi/4).
    let eps = 1e-9 * t.max(1.0);
    let initial_sign = if family.matrix_at(eps).b < 0.0 { -1.0 } else { 1.0 };
    let two_pi_h = 2.0 * std::f64::consts::PI * constants.hbar;
    let angle = initial_sign * std::f64::consts::FRAC_PI_4 - crossings as f64 * std::f64::consts::FRAC_PI_2;
    let prefactor = Complex64::from_polar((two_pi_h * m.b.abs()).powf(-0.5), angle);
    Ok(PropagatorKernel {
        representation: Representation::PositionPosition,
        matrix: m,
        phase,
        prefactor,
        constants: *constants,
        time: t,
        caustic_crossings: crossings,
    })
}

/// Shared input validation: space label and containment of ψ_in in its grid.
pub(crate) fn check_input(kernel: &PropagatorKernel, psi_in: &WaveFunction) -> Result<()> {
    let expected = kernel.representation.input_space();
    if psi_in.space() != expected {
        return Err(Error::InvalidInput(format!(
            "{} kernel consumes {}-space wavefunctions, got {}-space",
            kernel.representation.label(),
            expected,
            psi_in.space()
        )));
    }
    let spill = psi_in.edge_mass_fraction(BOUNDARY_FRACTION);
    if spill > GRID_TOL {
        return Err(Error::SupportSpill {
            fraction: spill,
            zone_percent: BOUNDARY_FRACTION * 100.0,
            tol: GRID_TOL,
        });
    }
    Ok(())
}

/// Verifies that the integration grid resolves the kernel oscillation for
/// output coordinates in [x_lo, x_hi] and integration points across the
/// effective support of ψ_in. Returns the achieved samples per period.
pub(crate) fn check_resolution(
    kernel: &PropagatorKernel,
    psi_in: &WaveFunction,
    x_lo: f64,
    x_hi: f64,
) -> Result<f64> {
    let Some((lo, hi)) = psi_in.effective_support() else {
        return Ok(f64::INFINITY);
    };
    let y_lo = psi_in.grid().coordinate(lo);
    let y_hi = psi_in.grid().coordinate(hi);
    let w = kernel.phase;
    // d/dy of the kernel phase is (cross*x + 2*yy*y)/hbar; linear, so extreme at corners.
    let mut max_freq: f64 = 0.0;
    for x in [x_lo, x_hi] {
        for y in [y_lo, y_hi] {
            max_freq = max_freq.max((w.cross * x + 2.0 * w.yy * y).abs());
        }
    }
    let two_pi_h = 2.0 * std::f64::consts::PI * kernel.constants.hbar;
    let achieved = if max_freq == 0.0 {
        f64::INFINITY
    } else {
        two_pi_h / (psi_in.grid().spacing * max_freq)
    };
    if achieved < MIN_SAMPLES_PER_PERIOD {
        Err(Error::Undersampled { achieved, required: MIN_SAMPLES_PER_PERIOD })
    } else {
        Ok(achieved)
    }
}

/// Trapezoid weights: 1/2 at both ends, 1 inside.
pub(crate) fn trapezoid_weight(i: usize, len: usize) -> f64 {
    if i == 0 || i + 1 == len {
        0.5
    } else {
        1.0
    }
}

/// ψ_out(x_i) = Σ_j K(x_i, y_j)·ψ_in(y_j)·w_j·Δy by direct O(N_out·N_in)
/// summation. The oscillation guard covers every output point, so each value is
/// individually trustworthy (given a smooth, resolved ψ_in).
pub fn apply_kernel_direct(
    kernel: &PropagatorKernel,
    psi_in: &WaveFunction,
    out_grid: &Grid,
) -> Result<WaveFunction> {
    check_input(kernel, psi_in)?;
    check_resolution(kernel, psi_in, out_grid.coordinate(0), out_grid.last_coordinate())?;

    let hbar = kernel.constants.hbar;
    let w = kernel.phase;
    let in_grid = psi_in.grid();
    let n_in = in_grid.len;

    // Hoist the y-only factors: weighted sample and its quadratic phase.
    let mut weighted = Vec::with_capacity(n_in);
    let mut y_phase = Vec::with_capacity(n_in);
    for (j, psi) in psi_in.samples().iter().enumerate() {
        let y = in_grid.coordinate(j);
        weighted.push(psi * trapezoid_weight(j, n_in));
        y_phase.push(w.yy * y * y / hbar);
    }

    let scale = kernel.prefactor * in_grid.spacing;
    let mut out = Vec::with_capacity(out_grid.len);
    for i in 0..out_grid.len {
        let x = out_grid.coordinate(i);
        let cross_x = w.cross * x / hbar;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n_in {
            let angle = cross_x * in_grid.coordinate(j) + y_phase[j];
            acc += weighted[j] * Complex64::cis(angle);
        }
        out.push(acc * scale * Complex64::cis(w.xx * x * x / hbar));
    }
    WaveFunction::new(*out_grid, kernel.representation.output_space(), out)
}

/// O(N log N) application via the chirp–FFT–chirp factorization; see
/// [`chirp_fft::apply_kernel_fast`]. Agrees with the direct path to rounding.
pub use chirp_fft::apply_kernel_fast;

/// Probes discrete unitarity: columns of a well-resolved kernel are orthogonal,
/// Σ_i conj(K(x_i, y_j))·K(x_i, y_j')·Δx ≈ δ_jj'/Δy. Returns the worst absolute
/// deviation over a fixed probe set of column pairs (compare it to 1/Δy).
pub fn kernel_unitarity_check(kernel: &PropagatorKernel, x_grid: &Grid, y_grid: &Grid) -> f64 {
    let n = y_grid.len;
    let probes = [n / 4, n / 2, 3 * n / 4];
    let mut partners = Vec::new();
    for &j in &probes {
        for offset in [0isize, 1, -1, (n / 8) as isize, -((n / 8) as isize)] {
            let jj = j as isize + offset;
            if jj >= 0 && (jj as usize) < n {
                partners.push((j, jj as usize));
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (j, jp) in partners {
        let yj = y_grid.coordinate(j);
        let yjp = y_grid.coordinate(jp);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..x_grid.len {
            let x = x_grid.coordinate(i);
            acc += kernel.value(x, yj).conj() * kernel.value(x, yjp);
        }
        let overlap = acc * x_grid.spacing;
        let target = if j == jp { 1.0 / y_grid.spacing } else { 0.0 };
        worst = worst.max((overlap - target).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{free_particle, harmonic_oscillator};

    const UNITS: PhysicalConstants = PhysicalConstants { hbar: 1.0, mass: 1.0 };

    fn free_kernel(t: f64) -> PropagatorKernel {
        build_kernel_from_family(&free_particle(&UNITS), t, &UNITS).unwrap()
    }

    #[test]
    fn free_kernel_matches_the_feynman_propagator() {
        // Independent oracle: sqrt(m/(2*pi*i*hbar*t)) * exp(i*m*(q-Q)^2/(2*hbar*t)).
        for t in [0.3, 1.0, 4.0] {
            let k = free_kernel(t);
            let pref = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI * t)).sqrt();
            for (q, big_q) in [(0.0f64, 0.0), (1.3, -0.4), (-2.0, 2.0)] {
                let oracle = pref * Complex64::cis((q - big_q).powi(2) / (2.0 * t));
                let got = k.value(q, big_q);
                assert!(
                    (got - oracle).norm() <= 1e-13 * oracle.norm(),
                    "t={t} q={q} Q={big_q}: {got} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn matrix_route_prefactor_is_principal_branch() {
        // Free particle at t > 0 has b < 0 and phase -pi/4; the time-reversed
        // matrix has b > 0 and phase +pi/4.
        let k = free_kernel(1.0);
        assert!((k.prefactor().arg() + std::f64::consts::FRAC_PI_4).abs() < 1e-14);
        let reversed = free_particle(&UNITS).matrix_at(-1.0);
        let kr = build_kernel(&reversed, Representation::PositionPosition, -1.0, &UNITS).unwrap();
        assert!((kr.prefactor().arg() - std::f64::consts::FRAC_PI_4).abs() < 1e-14);
    }

    #[test]
    fn prefactor_modulus_follows_the_representation_coefficient() {
        let m = SymplecticMatrix::checked(0.8, -2.0, 0.3, 0.5).unwrap();
        let two_pi_h = 2.0 * std::f64::consts::PI * UNITS.hbar;
        for (rep, coeff) in [
            (Representation::PositionPosition, m.b),
            (Representation::PositionMomentum, m.d),
            (Representation::MomentumPosition, m.a),
            (Representation::MomentumMomentum, m.c),
        ] {
            let k = build_kernel(&m, rep, 0.0, &UNITS).unwrap();
            let want = (two_pi_h * coeff.abs()).powf(-0.5);
            assert!(
                (k.prefactor().norm() - want).abs() < 1e-14,
                "{} modulus {} vs {want}",
                rep.label(),
                k.prefactor().norm()
            );
        }
    }

    #[test]
    fn quarter_period_oscillator_kernel_is_a_rotated_fourier_kernel() {
        // At omega*t = pi/2 (m = omega = 1): sqrt(1/(2*pi*i*hbar)) * exp(-i*q*Q/hbar).
        let ho = harmonic_oscillator(&UNITS, 1.0);
        let k = build_kernel_from_family(&ho, std::f64::consts::FRAC_PI_2, &UNITS).unwrap();
        let pref = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI)).sqrt();
        for (q, big_q) in [(0.5, 0.5), (-1.0, 2.0)] {
            let oracle = pref * Complex64::cis(-q * big_q);
            assert!((k.value(q, big_q) - oracle).norm() < 1e-14);
        }
    }

    #[test]
    fn family_route_tracks_caustic_crossings() {
        let ho = harmonic_oscillator(&UNITS, 1.0);
        let before = build_kernel_from_family(&ho, 2.0, &UNITS).unwrap();
        assert_eq!(before.caustic_crossings(), 0);

        let after = build_kernel_from_family(&ho, 4.0, &UNITS).unwrap();
        assert_eq!(after.caustic_crossings(), 1);
        // Continuity phase -pi/4 - pi/2 = -3*pi/4; the bare matrix (b > 0 there)
        // would sit at +pi/4, so the family kernel is the matrix kernel times -1.
        assert!((after.prefactor().arg() + 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        let bare =
            build_kernel(&ho.matrix_at(4.0), Representation::PositionPosition, 4.0, &UNITS).unwrap();
        let ratio = after.prefactor() / bare.prefactor();
        assert!((ratio + Complex64::new(1.0, 0.0)).norm() < 1e-12, "ratio {ratio}");
    }

    #[test]
    fn family_route_rejects_caustics_and_backward_times() {
        let ho = harmonic_oscillator(&UNITS, 1.0);
        assert!(matches!(
            build_kernel_from_family(&ho, std::f64::consts::PI, &UNITS),
            Err(Error::SingularRepresentation { .. })
        ));
        assert!(build_kernel_from_family(&ho, -1.0, &UNITS).is_err());
    }

    #[test]
    fn build_rejects_non_symplectic_matrices() {
        let bad = SymplecticMatrix::new(1.0, 1.0, 1.0, 1.0);
        assert!(matches!(
            build_kernel(&bad, Representation::PositionPosition, 0.0, &UNITS),
            Err(Error::NotSymplectic { .. })
        ));
    }

    #[test]
    fn delta_input_reads_out_a_kernel_column() {
        let k = free_kernel(1.0);
        let grid = Grid::centered(0.0, 0.05, 161).unwrap();
        let mut samples = vec![Complex64::new(0.0, 0.0); 161];
        samples[80] = Complex64::new(1.0, 0.0);
        let psi = WaveFunction::new(grid, SpaceLabel::NewPosition, samples).unwrap();
        let out = apply_kernel_direct(&k, &psi, &grid).unwrap();
        let y = grid.coordinate(80);
        for (i, &v) in out.samples().iter().enumerate() {
            let want = k.value(grid.coordinate(i), y) * grid.spacing;
            assert!((v - want).norm() < 1e-12, "column mismatch at {i}");
        }
    }

    #[test]
    fn application_preserves_norm_on_resolved_grids() {
        let k = free_kernel(1.0);
        let grid = Grid::centered(0.0, 0.01, 2001).unwrap();
        let psi = WaveFunction::gaussian(grid, SpaceLabel::NewPosition, 1.0, 0.0, 0.3, &UNITS).unwrap();
        let out = apply_kernel_direct(&k, &psi, &grid).unwrap();
        assert_eq!(out.space(), SpaceLabel::OldPosition);
        assert!(
            (out.norm() - psi.norm()).abs() < 1e-6,
            "norm drifted from {} to {}",
            psi.norm(),
            out.norm()
        );
    }

    #[test]
    fn input_checks_catch_mislabeled_and_spilling_states() {
        let k = free_kernel(1.0);
        let grid = Grid::centered(0.0, 0.01, 2001).unwrap();
        let wrong_space = WaveFunction::gaussian(grid, SpaceLabel::OldPosition, 1.0, 0.0, 0.0, &UNITS).unwrap();
        assert!(apply_kernel_direct(&k, &wrong_space, &grid).is_err());

        let spilling = WaveFunction::gaussian(grid, SpaceLabel::NewPosition, 1.0, 9.7, 0.0, &UNITS).unwrap();
        assert!(matches!(
            apply_kernel_direct(&k, &spilling, &grid),
            Err(Error::SupportSpill { .. })
        ));
    }

    #[test]
    fn coarse_grids_are_rejected_as_undersampled() {
        let k = free_kernel(1.0);
        let grid = Grid::centered(0.0, 0.25, 81).unwrap();
        let psi = WaveFunction::gaussian(grid, SpaceLabel::NewPosition, 1.0, 0.0, 0.0, &UNITS).unwrap();
        assert!(matches!(
            apply_kernel_direct(&k, &psi, &grid),
            Err(Error::Undersampled { .. })
        ));
    }

    #[test]
    fn unitarity_deviation_is_small_on_matched_grids() {
        // Delta_x * Delta_y * N = 2*pi*hbar*|b| makes columns discretely orthogonal.
        let k = free_kernel(1.0);
        let n = 2048;
        let spacing = (2.0 * std::f64::consts::PI / n as f64).sqrt();
        let grid = Grid::centered(0.0, spacing, n).unwrap();
        let deviation = kernel_unitarity_check(&k, &grid, &grid);
        let scale = 1.0 / grid.spacing;
        assert!(deviation / scale <= 1e-3, "relative deviation {}", deviation / scale);
    }
}
