//! Run configuration: one JSON document plus command-line overrides.
//!
//! Precedence is built-in defaults, then the config file, then flags. Every
//! command receives the same merged [`RunConfig`]; `--dump-config` prints it
//! back out so a run can be reproduced from the dump alone.

use std::path::{Path, PathBuf};

use lct_core::systems::{free_particle, free_potential, harmonic_oscillator, harmonic_potential};
use lct_core::{
    Grid, PhysicalConstants, QuadraticPotential, SpaceLabel, SymplecticMatrix, TransformFamily,
    WaveFunction,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Free,
    Harmonic,
    Custom,
}

impl SystemKind {
    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::Free => "free",
            SystemKind::Harmonic => "harmonic",
            SystemKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    pub hbar: f64,
    pub mass: f64,
    /// Oscillator frequency; ignored by the free system, 1.0 when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0, omega: None }
    }
}

/// Coefficient expressions for a custom family, in the little expression
/// language of [`crate::expr`]. Only accepted from a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientExpressions {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub origin: f64,
    pub spacing: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 4096, origin: -20.0, spacing: 40.0 / 4096.0 }
    }
}

fn default_sigma() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialState {
    Gaussian {
        #[serde(default = "default_sigma")]
        sigma0: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        momentum: f64,
    },
    /// Wavefunction CSV written by an earlier run (with its .meta.json sidecar).
    File { path: PathBuf },
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Gaussian { sigma0: 1.0, center: 0.0, momentum: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    /// Symplectic gate on |ad - bc - 1|.
    pub determinant: f64,
    /// Override for the compatibility residual; when absent the library picks
    /// by rate source (analytic vs finite differences).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hj_residual: Option<f64>,
    /// Kernel vs Crank-Nicolson L2 bound for `compare`.
    pub compare_l2: f64,
    /// Fast vs direct peak-relative bound for `bench`.
    pub bench_deviation: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            determinant: lct_core::tolerances::DET_TOL,
            hj_residual: None,
            compare_l2: 1e-4,
            bench_deviation: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemKind,
    pub constants: ConstantsConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientExpressions>,
    pub time: f64,
    /// Omitted: commands derive the grid (default, or the input file's own).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    pub initial: InitialState,
    pub tolerances: ToleranceConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: SystemKind::Free,
            constants: ConstantsConfig::default(),
            coefficients: None,
            time: 1.0,
            grid: None,
            initial: InitialState::default(),
            tolerances: ToleranceConfig::default(),
        }
    }
}

/// Flag-level overrides, applied on top of whatever the file said.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub system: Option<SystemKind>,
    pub time: Option<f64>,
    pub grid: Option<GridConfig>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
    pub omega: Option<f64>,
}

pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("reading {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("parsing {}: {e}", p.display())))
        }
    }
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.system {
            self.system = s;
        }
        if let Some(t) = o.time {
            self.time = t;
        }
        if let Some(g) = o.grid {
            self.grid = Some(g);
        }
        if let Some(h) = o.hbar {
            self.constants.hbar = h;
        }
        if let Some(m) = o.mass {
            self.constants.mass = m;
        }
        if let Some(w) = o.omega {
            self.constants.omega = Some(w);
        }
    }

    pub fn constants(&self) -> Result<PhysicalConstants, CliError> {
        Ok(PhysicalConstants::new(self.constants.hbar, self.constants.mass)?)
    }

    pub fn omega(&self) -> Result<f64, CliError> {
        let w = self.constants.omega.unwrap_or(1.0);
        if !(w.is_finite() && w > 0.0) {
            return Err(CliError::Config(format!("omega must be positive, got {w}")));
        }
        Ok(w)
    }

    /// Explicit grid, or the built-in default.
    pub fn effective_grid(&self) -> Result<Grid, CliError> {
        let g = self.grid.unwrap_or_default();
        Ok(Grid::new(g.origin, g.spacing, g.n)?)
    }

    pub fn family(&self, constants: &PhysicalConstants) -> Result<TransformFamily, CliError> {
        match self.system {
            SystemKind::Free => Ok(free_particle(constants)),
            SystemKind::Harmonic => Ok(harmonic_oscillator(constants, self.omega()?)),
            SystemKind::Custom => {
                let Some(c) = &self.coefficients else {
                    return Err(CliError::Config(
                        "system 'custom' needs a coefficients block with expressions for a, b, c, d"
                            .into(),
                    ));
                };
                let parse = |letter: &str, src: &str| {
                    expr::parse(src)
                        .map_err(|e| CliError::Config(format!("coefficient {letter}: {e}")))
                };
                let a = parse("a", &c.a)?;
                let b = parse("b", &c.b)?;
                let cc = parse("c", &c.c)?;
                let d = parse("d", &c.d)?;
                let mass = constants.mass;
                let omega = self.omega()?;
                let family = TransformFamily::new("custom", move |t| {
                    SymplecticMatrix::new(
                        a.eval(t, mass, omega),
                        b.eval(t, mass, omega),
                        cc.eval(t, mass, omega),
                        d.eval(t, mass, omega),
                    )
                });
                self.check_custom_symplectic(&family)?;
                Ok(family)
            }
        }
    }

    /// Custom coefficients are arbitrary user input, so ad - bc = 1 is gated
    /// over a 32-point time sweep before any command is allowed to run.
    fn check_custom_symplectic(&self, family: &TransformFamily) -> Result<(), CliError> {
        let horizon =
            if self.time.is_finite() && self.time > 0.0 { self.time } else { 1.0 };
        let tol = self.tolerances.determinant;
        for k in 1..=32 {
            let t = horizon * k as f64 / 32.0;
            let err = (family.matrix_at(t).determinant() - 1.0).abs();
            if !(err <= tol) {
                return Err(CliError::Config(format!(
                    "custom coefficients are not symplectic: |ad - bc - 1| = {err:.3e} at t = {t:.6} (tolerance {tol:.1e})"
                )));
            }
        }
        Ok(())
    }

    /// Potential for the Schrödinger oracle. `kind` may differ from the
    /// configured system when a mismatch is being demonstrated on purpose.
    pub fn oracle_potential(
        &self,
        kind: SystemKind,
        constants: &PhysicalConstants,
    ) -> Result<QuadraticPotential, CliError> {
        match kind {
            SystemKind::Free => Ok(free_potential()),
            SystemKind::Harmonic => Ok(harmonic_potential(constants, self.omega()?)),
            SystemKind::Custom => Err(CliError::Config(
                "the Schrödinger oracle needs a free or harmonic potential; pass --oracle-system"
                    .into(),
            )),
        }
    }

    /// Initial wavefunction in the kernel's input space. Position-space files
    /// are accepted; an old-side label is relabeled so runs can be chained.
    pub fn initial_state(&self, constants: &PhysicalConstants) -> Result<WaveFunction, CliError> {
        match &self.initial {
            InitialState::Gaussian { sigma0, center, momentum } => {
                let grid = self.effective_grid()?;
                Ok(WaveFunction::gaussian(
                    grid,
                    SpaceLabel::NewPosition,
                    *sigma0,
                    *center,
                    *momentum,
                    constants,
                )?)
            }
            InitialState::File { path } => {
                let (wf, meta) = WaveFunction::read_files(path)?;
                if (meta.hbar - constants.hbar).abs() > 1e-12
                    || (meta.mass - constants.mass).abs() > 1e-12
                {
                    return Err(CliError::Config(format!(
                        "{} was written with hbar = {}, mass = {}; this run uses hbar = {}, mass = {}",
                        path.display(),
                        meta.hbar,
                        meta.mass,
                        constants.hbar,
                        constants.mass
                    )));
                }
                match wf.space() {
                    SpaceLabel::NewPosition => Ok(wf),
                    SpaceLabel::OldPosition => Ok(wf.relabeled(SpaceLabel::NewPosition)),
                    other => Err(CliError::Config(format!(
                        "initial state must be in position space, {} is labeled '{}'",
                        path.display(),
                        other
                    ))),
                }
            }
        }
    }
}
