//! Independent time-domain reference: Crank–Nicolson integration of the
//! Schrödinger equation on the same grids the kernels use, plus the exact
//! spreading Gaussian of the free particle. Nothing here touches the kernel or
//! FFT machinery, so agreement between the two pipelines is evidence, not
//! tautology.
//!
//! One step solves (I + iΔtH/2ħ)ψ' = (I − iΔtH/2ħ)ψ with the three-point
//! Laplacian and hard walls at the grid ends. The scheme is exactly
//! norm-preserving and second order in Δt; accuracy (not stability) demands
//! Δt ≲ Δq²·m/ħ, enforced with a safety factor. Walls mean the state must stay
//! away from the edges for the whole run, checked periodically.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hamilton_jacobi::QuadraticPotential;
use crate::symplectic::PhysicalConstants;
use crate::tolerances::{BOUNDARY_FRACTION, CN_SAFETY, GRID_TOL};
use crate::wavefunction::{SpaceLabel, WaveFunction};
use num_complex::Complex64;

/// A fully specified Crank–Nicolson run: grid, potential, step size and count.
#[derive(Debug, Clone)]
pub struct EvolutionSpec {
    pub grid: Grid,
    pub potential: QuadraticPotential,
    pub dt: f64,
    pub steps: usize,
    pub constants: PhysicalConstants,
}

impl EvolutionSpec {
    /// Largest Δt the accuracy guard admits for a grid.
    pub fn dt_limit(grid: &Grid, constants: &PhysicalConstants) -> f64 {
        grid.spacing * grid.spacing * constants.mass / constants.hbar * CN_SAFETY
    }

    pub fn new(
        grid: Grid,
        potential: QuadraticPotential,
        dt: f64,
        steps: usize,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidInput(format!("step size must be positive, got {dt}")));
        }
        if steps == 0 {
            return Err(Error::InvalidInput("step count must be positive".into()));
        }
        let limit = Self::dt_limit(&grid, &constants);
        if dt > limit {
            return Err(Error::ResolutionGuard { dt, limit, safety: CN_SAFETY });
        }
        Ok(EvolutionSpec { grid, potential, dt, steps, constants })
    }

    /// Picks the coarsest admissible Δt that divides `total_time` evenly.
    pub fn for_duration(
        grid: Grid,
        potential: QuadraticPotential,
        total_time: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(Error::InvalidInput(format!(
                "total time must be positive, got {total_time}"
            )));
        }
        let limit = Self::dt_limit(&grid, &constants);
        let steps = (total_time / limit).ceil().max(1.0) as usize;
        Self::new(grid, potential, total_time / steps as f64, steps, constants)
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

fn edge_fraction(samples: &[Complex64], zone_fraction: f64) -> f64 {
    let n = samples.len();
    let zone = ((n as f64 * zone_fraction) as usize).max(1);
    let total: f64 = samples.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let edge: f64 = samples[..zone]
        .iter()
        .chain(&samples[n - zone..])
        .map(|z| z.norm_sqr())
        .sum();
    edge / total
}

/// Runs the Crank–Nicolson scheme. The input must live on the spec's grid; the
/// output keeps its space label. Fails if probability reaches the walls.
pub fn evolve_cn(spec: &EvolutionSpec, psi0: &WaveFunction) -> Result<WaveFunction> {
    if *psi0.grid() != spec.grid {
        return Err(Error::InvalidInput("initial state is not on the evolution grid".into()));
    }
    let n = spec.grid.len;
    let hbar = spec.constants.hbar;
    let lambda = spec.dt / (2.0 * hbar);
    let kinetic = hbar * hbar / (2.0 * spec.constants.mass * spec.grid.spacing * spec.grid.spacing);

    // A = I + i*lambda*H (implicit side), B = I - i*lambda*H (explicit side).
    let off_a = Complex64::new(0.0, -lambda * kinetic);
    let off_b = -off_a;
    let mut diag_a = Vec::with_capacity(n);
    let mut diag_b = Vec::with_capacity(n);
    for i in 0..n {
        let v = spec.potential.value(spec.grid.coordinate(i));
        let h_diag = 2.0 * kinetic + v;
        diag_a.push(Complex64::new(1.0, lambda * h_diag));
        diag_b.push(Complex64::new(1.0, -lambda * h_diag));
    }

    // A never changes, so the Thomas forward elimination is precomputed: cp are
    // the eliminated superdiagonal ratios, inv_denom the pivot reciprocals.
    let mut cp = Vec::with_capacity(n);
    let mut inv_denom = Vec::with_capacity(n);
    let mut denom = diag_a[0];
    inv_denom.push(denom.inv());
    cp.push(off_a * inv_denom[0]);
    for i in 1..n {
        denom = diag_a[i] - off_a * cp[i - 1];
        inv_denom.push(denom.inv());
        cp.push(off_a * inv_denom[i]);
    }

    let check_every = (spec.steps / 64).max(1);
    let mut psi: Vec<Complex64> = psi0.samples().to_vec();
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for step in 0..spec.steps {
        // rhs = B psi with hard walls beyond both ends.
        rhs[0] = diag_b[0] * psi[0] + off_b * psi[1];
        for i in 1..n - 1 {
            rhs[i] = diag_b[i] * psi[i] + off_b * (psi[i - 1] + psi[i + 1]);
        }
        rhs[n - 1] = diag_b[n - 1] * psi[n - 1] + off_b * psi[n - 2];

        // Solve A psi' = rhs in place.
        psi[0] = rhs[0] * inv_denom[0];
        for i in 1..n {
            psi[i] = (rhs[i] - off_a * psi[i - 1]) * inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            let upper = psi[i + 1];
            psi[i] -= cp[i] * upper;
        }

        if (step + 1) % check_every == 0 || step + 1 == spec.steps {
            let spill = edge_fraction(&psi, BOUNDARY_FRACTION);
            if spill > GRID_TOL {
                return Err(Error::SupportSpill {
                    fraction: spill,
                    zone_percent: BOUNDARY_FRACTION * 100.0,
                    tol: GRID_TOL,
                });
            }
        }
    }
    WaveFunction::new(spec.grid, psi0.space(), psi)
}

/// Exact free evolution of the Gaussian that [`WaveFunction::gaussian`]
/// produces at t = 0: complex width α(t) = σ0² + iħt/2m, drifting center, and
/// the boost phase p0·q − p0²t/2m. Spreads as σ²(t) = σ0² + (ħt/2mσ0)².
pub fn free_gaussian_evolved(
    grid: Grid,
    space: SpaceLabel,
    sigma0: f64,
    center: f64,
    momentum: f64,
    t: f64,
    constants: &PhysicalConstants,
) -> Result<WaveFunction> {
    if !(sigma0 > 0.0) || !sigma0.is_finite() {
        return Err(Error::InvalidInput(format!("width must be positive, got {sigma0}")));
    }
    let hbar = constants.hbar;
    let mass = constants.mass;
    let s2 = sigma0 * sigma0;
    let alpha = Complex64::new(s2, hbar * t / (2.0 * mass));
    let amplitude = (2.0 * std::f64::consts::PI * s2).powf(-0.25) * (Complex64::new(s2, 0.0) / alpha).sqrt();
    let drift = center + momentum * t / mass;
    let action = momentum * momentum * t / (2.0 * mass);
    WaveFunction::from_fn(grid, space, |q| {
        let dq = q - drift;
        let boost = Complex64::cis((momentum * q - action) / hbar);
        amplitude * boost * (-Complex64::new(dq * dq, 0.0) / (4.0 * alpha)).exp()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{free_potential, harmonic_potential};

    const UNITS: PhysicalConstants = PhysicalConstants { hbar: 1.0, mass: 1.0 };

    #[test]
    fn step_size_guard_rejects_coarse_time_steps() {
        let grid = Grid::centered(0.0, 0.1, 201).unwrap();
        let limit = EvolutionSpec::dt_limit(&grid, &UNITS);
        assert!((limit - 0.005).abs() < 1e-15);
        assert!(matches!(
            EvolutionSpec::new(grid, free_potential(), 0.006, 10, UNITS),
            Err(Error::ResolutionGuard { .. })
        ));
        assert!(EvolutionSpec::new(grid, free_potential(), 0.005, 10, UNITS).is_ok());
    }

    #[test]
    fn for_duration_tiles_the_interval_exactly() {
        let grid = Grid::centered(0.0, 0.1, 201).unwrap();
        let spec = EvolutionSpec::for_duration(grid, free_potential(), 1.0, UNITS).unwrap();
        assert!((spec.total_time() - 1.0).abs() < 1e-12);
        assert!(spec.dt <= EvolutionSpec::dt_limit(&grid, &UNITS) + 1e-18);
    }

    #[test]
    fn cayley_steps_preserve_the_norm_exactly() {
        let grid = Grid::centered(0.0, 0.05, 512).unwrap();
        let psi0 = WaveFunction::gaussian(grid, SpaceLabel::OldPosition, 1.0, 0.0, 1.0, &UNITS).unwrap();
        let spec = EvolutionSpec::new(grid, free_potential(), 1e-3, 2000, UNITS).unwrap();
        let out = evolve_cn(&spec, &psi0).unwrap();
        assert!(
            (out.norm() - psi0.norm()).abs() < 1e-10,
            "norm drifted to {}",
            out.norm()
        );
    }

    #[test]
    fn closed_form_gaussian_satisfies_the_schrodinger_equation() {
        // Finite-difference residual i*hbar*dpsi/dt + hbar^2/2m*psi'' at scattered
        // points; both derivative steps are small enough for ~1e-6 accuracy.
        let grid = Grid::centered(0.0, 1e-3, 9).unwrap();
        let (sigma0, c, p0, t) = (0.8, -0.4, 0.6, 1.3);
        let dt = 1e-5;
        let sample = |q: f64, tt: f64| {
            let g = Grid::centered(q, 1e-3, 9).unwrap();
            free_gaussian_evolved(g, SpaceLabel::OldPosition, sigma0, c, p0, tt, &UNITS)
                .unwrap()
                .samples()
                .to_vec()
        };
        for q in [-1.0, 0.2, 1.5] {
            let now = sample(q, t);
            let later = sample(q, t + dt);
            let earlier = sample(q, t - dt);
            let mid = 4;
            let dpsi_dt = (later[mid] - earlier[mid]) / (2.0 * dt);
            let lap = (now[mid + 1] - 2.0 * now[mid] + now[mid - 1]) / (grid.spacing * grid.spacing);
            let residual = Complex64::new(0.0, 1.0) * dpsi_dt + 0.5 * lap;
            assert!(residual.norm() < 1e-5, "residual {} at q={q}", residual.norm());
        }
    }

    #[test]
    fn closed_form_matches_the_static_gaussian_at_time_zero() {
        let grid = Grid::centered(0.0, 0.01, 2001).unwrap();
        let a = free_gaussian_evolved(grid, SpaceLabel::OldPosition, 0.9, 0.3, -0.7, 0.0, &UNITS).unwrap();
        let b = WaveFunction::gaussian(grid, SpaceLabel::OldPosition, 0.9, 0.3, -0.7, &UNITS).unwrap();
        assert!(a.l2_distance(&b).unwrap() < 1e-13);
    }

    #[test]
    fn closed_form_spreads_at_the_textbook_rate() {
        let grid = Grid::centered(0.5, 0.02, 2501).unwrap();
        let psi = free_gaussian_evolved(grid, SpaceLabel::OldPosition, 1.0, 0.5, 0.0, 2.0, &UNITS).unwrap();
        let m = psi.moments(UNITS.hbar);
        let expect = 1.0 + (2.0f64 / 2.0).powi(2);
        assert!((m.variance - expect).abs() < 1e-4, "variance {}", m.variance);
    }

    #[test]
    fn crank_nicolson_tracks_the_spreading_gaussian() {
        let grid = Grid::centered(0.0, 0.02, 2001).unwrap();
        let psi0 = WaveFunction::gaussian(grid, SpaceLabel::OldPosition, 1.0, 0.0, 0.5, &UNITS).unwrap();
        let spec = EvolutionSpec::for_duration(grid, free_potential(), 1.0, UNITS).unwrap();
        let cn = evolve_cn(&spec, &psi0).unwrap();
        let exact =
            free_gaussian_evolved(grid, SpaceLabel::OldPosition, 1.0, 0.0, 0.5, 1.0, &UNITS).unwrap();
        let err = cn.l2_distance(&exact).unwrap();
        assert!(err < 5e-4, "Crank-Nicolson error {err}");
    }

    #[test]
    fn half_period_oscillator_flips_parity_with_phase_minus_i() {
        // U(pi/omega) maps psi(q) to -i*psi(-q): every eigenphase is
        // e^(-i*pi/2)*(-1)^n. Checked against a displaced packet.
        let grid = Grid::centered(0.0, 0.02, 1201).unwrap();
        let psi0 = WaveFunction::gaussian(grid, SpaceLabel::OldPosition, 1.0, 1.0, 0.0, &UNITS).unwrap();
        let spec =
            EvolutionSpec::for_duration(grid, harmonic_potential(&UNITS, 1.0), std::f64::consts::PI, UNITS)
                .unwrap();
        let cn = evolve_cn(&spec, &psi0).unwrap();
        let norm_const = (2.0 * std::f64::consts::PI).powf(-0.25);
        let expected = WaveFunction::from_fn(grid, SpaceLabel::OldPosition, |q| {
            Complex64::new(0.0, -norm_const * (-(q + 1.0) * (q + 1.0) / 4.0).exp())
        })
        .unwrap();
        let err = cn.l2_distance(&expected).unwrap();
        assert!(err < 1e-3, "half-period error {err}");
    }

    #[test]
    fn halving_the_step_quarters_the_time_discretization_error() {
        // Errors measured against a same-grid run at dt/16, so the shared
        // spatial error cancels and the second-order step shows its 4x.
        let grid = Grid::centered(0.0, 0.05, 512).unwrap();
        let psi0 = WaveFunction::gaussian(grid, SpaceLabel::OldPosition, 1.0, 0.0, 1.0, &UNITS).unwrap();
        let total = 0.256;
        let run = |steps: usize| {
            let spec = EvolutionSpec::new(grid, free_potential(), total / steps as f64, steps, UNITS)
                .unwrap();
            evolve_cn(&spec, &psi0).unwrap()
        };
        let reference = run(4096);
        let coarse = run(256).l2_distance(&reference).unwrap();
        let fine = run(512).l2_distance(&reference).unwrap();
        let ratio = coarse / fine;
        // dt^2 scaling against the dt/16 anchor: (1 - 1/256)/(1/4 - 1/256) = 4.05.
        assert!((3.5..=4.6).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn reaching_the_walls_is_an_error() {
        let grid = Grid::centered(0.0, 0.05, 256).unwrap();
        let psi0 = WaveFunction::gaussian(grid, SpaceLabel::OldPosition, 0.5, 0.0, 4.0, &UNITS).unwrap();
        let spec = EvolutionSpec::for_duration(grid, free_potential(), 2.0, UNITS).unwrap();
        assert!(matches!(evolve_cn(&spec, &psi0), Err(Error::SupportSpill { .. })));
    }
}
