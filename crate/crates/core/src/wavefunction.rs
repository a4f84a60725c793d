//! Discretized wavefunctions, their moments, and the on-disk format.
//!
//! Files come in pairs: a CSV with header `index,coordinate,re,im` holding the
//! samples at 17 significant digits (lossless for f64), and a JSON sidecar
//! (same stem, extension `.meta.json`) carrying the grid geometry, space label,
//! physical constants and recorded norm.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::symplectic::PhysicalConstants;
use crate::tolerances::SUPPORT_FLOOR;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Which of the four coordinates the samples are indexed by: old/new position
/// (q, Q) or old/new momentum (p, P).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceLabel {
    #[serde(rename = "q")]
    OldPosition,
    #[serde(rename = "Q")]
    NewPosition,
    #[serde(rename = "p")]
    OldMomentum,
    #[serde(rename = "P")]
    NewMomentum,
}

impl fmt::Display for SpaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceLabel::OldPosition => "q",
            SpaceLabel::NewPosition => "Q",
            SpaceLabel::OldMomentum => "p",
            SpaceLabel::NewMomentum => "P",
        };
        f.write_str(s)
    }
}

/// Norm and first/second moments in position and momentum, plus the symmetrized
/// position-momentum covariance. Momentum moments come from central-difference
/// derivatives, so they are estimates good to O(spacing²).
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    pub norm: f64,
    pub mean: f64,
    pub variance: f64,
    pub momentum_mean: f64,
    pub momentum_variance: f64,
    pub covariance: f64,
}

/// Complex samples over a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    space: SpaceLabel,
    samples: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, space: SpaceLabel, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len {
            return Err(Error::InvalidInput(format!(
                "grid has {} points but {} samples were supplied",
                grid.len,
                samples.len()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("samples must be finite".into()));
        }
        Ok(Self { grid, space, samples })
    }

    pub fn from_fn(grid: Grid, space: SpaceLabel, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples = grid.coordinates().map(f).collect();
        Self::new(grid, space, samples)
    }

    /// Normalized Gaussian (2πσ₀²)^(−1/4)·exp(−(x−center)²/(4σ₀²) + i·momentum·x/ħ);
    /// σ₀² is the position variance.
    pub fn gaussian(
        grid: Grid,
        space: SpaceLabel,
        sigma0: f64,
        center: f64,
        momentum: f64,
        constants: &PhysicalConstants,
    ) -> Result<Self> {
        if !(sigma0.is_finite() && sigma0 > 0.0) {
            return Err(Error::InvalidInput(format!("sigma0 must be positive, got {sigma0}")));
        }
        let amp = (2.0 * std::f64::consts::PI * sigma0 * sigma0).powf(-0.25);
        let hbar = constants.hbar;
        Self::from_fn(grid, space, |x| {
            let dx = x - center;
            amp * (Complex64::new(-dx * dx / (4.0 * sigma0 * sigma0), momentum * x / hbar)).exp()
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn space(&self) -> SpaceLabel {
        self.space
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Same samples viewed as a function of a different coordinate; used when a
    /// propagation output (old position) becomes the next step's input (new position).
    pub fn relabeled(&self, space: SpaceLabel) -> Self {
        Self { grid: self.grid, space, samples: self.samples.clone() }
    }

    /// √(Σ|ψ|²·Δ)
    pub fn norm(&self) -> f64 {
        let sum: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        (sum * self.grid.spacing).sqrt()
    }

    /// Σ conj(self)·other·Δ. Requires identical grids and spaces.
    pub fn overlap(&self, other: &WaveFunction) -> Result<Complex64> {
        self.require_same_layout(other)?;
        let sum: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.spacing)
    }

    /// √(Σ|self − other|²·Δ). Requires identical grids and spaces.
    pub fn l2_distance(&self, other: &WaveFunction) -> Result<f64> {
        self.require_same_layout(other)?;
        let sum: f64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((sum * self.grid.spacing).sqrt())
    }

    fn require_same_layout(&self, other: &WaveFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidInput("wavefunctions live on different grids".into()));
        }
        if self.space != other.space {
            return Err(Error::InvalidInput(format!(
                "wavefunctions live in different spaces ({} vs {})",
                self.space, other.space
            )));
        }
        Ok(())
    }

    /// Norm plus position/momentum moments; ħ enters the momentum estimates.
    pub fn moments(&self, hbar: f64) -> Moments {
        let dx = self.grid.spacing;
        let weight: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        let norm = (weight * dx).sqrt();
        if weight == 0.0 {
            return Moments {
                norm: 0.0,
                mean: 0.0,
                variance: 0.0,
                momentum_mean: 0.0,
                momentum_variance: 0.0,
                covariance: 0.0,
            };
        }
        let mut mean = 0.0;
        for (i, z) in self.samples.iter().enumerate() {
            mean += self.grid.coordinate(i) * z.norm_sqr();
        }
        mean /= weight;
        let mut variance = 0.0;
        for (i, z) in self.samples.iter().enumerate() {
            let d = self.grid.coordinate(i) - mean;
            variance += d * d * z.norm_sqr();
        }
        variance /= weight;

        // Momentum moments via interior central differences:
        // <p> = hbar * Im Σ conj(ψ)ψ' / Σ|ψ|², <p²> = hbar² Σ|ψ'|² / Σ|ψ|²,
        // cov = hbar * Im Σ (x - <x>) conj(ψ)ψ' / Σ|ψ|².
        let mut pmean = 0.0;
        let mut psq = 0.0;
        let mut cov = 0.0;
        for i in 1..self.samples.len() - 1 {
            let dpsi = (self.samples[i + 1] - self.samples[i - 1]) / (2.0 * dx);
            let g = self.samples[i].conj() * dpsi;
            pmean += g.im;
            psq += dpsi.norm_sqr();
            cov += (self.grid.coordinate(i) - mean) * g.im;
        }
        let momentum_mean = hbar * pmean / weight;
        let momentum_variance = (hbar * hbar * psq / weight - momentum_mean * momentum_mean).max(0.0);
        let covariance = hbar * cov / weight;
        Moments { norm, mean, variance, momentum_mean, momentum_variance, covariance }
    }

    /// Index range (inclusive) where |ψ| exceeds SUPPORT_FLOOR × peak;
    /// None when all samples vanish.
    pub fn effective_support(&self) -> Option<(usize, usize)> {
        let peak = self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return None;
        }
        let floor = SUPPORT_FLOOR * peak;
        let lo = self.samples.iter().position(|z| z.norm() > floor)?;
        let hi = self.samples.iter().rposition(|z| z.norm() > floor)?;
        Some((lo, hi))
    }

    /// Fraction of Σ|ψ|² living in the outer `fraction` of samples on each side.
    pub fn edge_mass_fraction(&self, fraction: f64) -> f64 {
        let total: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let zone = ((self.samples.len() as f64 * fraction).ceil() as usize).max(1);
        let zone = zone.min(self.samples.len() / 2);
        let edges: f64 = self.samples[..zone]
            .iter()
            .chain(&self.samples[self.samples.len() - zone..])
            .map(|z| z.norm_sqr())
            .sum();
        edges / total
    }

    /// Writes the CSV and its sidecar; see the module docs for the layout.
    pub fn write_files(&self, csv_path: &Path, constants: &PhysicalConstants) -> Result<()> {
        let mut out = BufWriter::new(std::fs::File::create(csv_path)?);
        writeln!(out, "index,coordinate,re,im")?;
        for (i, z) in self.samples.iter().enumerate() {
            writeln!(out, "{i},{:.16e},{:.16e},{:.16e}", self.grid.coordinate(i), z.re, z.im)?;
        }
        out.flush()?;

        let meta = WaveMeta {
            space_label: self.space,
            origin: self.grid.origin,
            spacing: self.grid.spacing,
            n: self.grid.len,
            hbar: constants.hbar,
            mass: constants.mass,
            norm: self.norm(),
        };
        let sidecar = sidecar_path(csv_path);
        let file = std::fs::File::create(sidecar)?;
        serde_json::to_writer_pretty(BufWriter::new(file), &meta)
            .map_err(|e| Error::Format(format!("writing sidecar: {e}")))?;
        Ok(())
    }

    /// Reads a CSV + sidecar pair and cross-checks sample count and coordinates.
    pub fn read_files(csv_path: &Path) -> Result<(Self, WaveMeta)> {
        let sidecar = sidecar_path(csv_path);
        let file = std::fs::File::open(&sidecar)?;
        let meta: WaveMeta = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::Format(format!("reading sidecar {}: {e}", sidecar.display())))?;
        let grid = Grid::new(meta.origin, meta.spacing, meta.n)?;

        let reader = BufReader::new(std::fs::File::open(csv_path)?);
        let mut lines = reader.lines();
        match lines.next() {
            Some(Ok(header)) if header.trim() == "index,coordinate,re,im" => {}
            Some(Ok(header)) => {
                return Err(Error::Format(format!("unexpected CSV header '{header}'")));
            }
            Some(Err(e)) => return Err(e.into()),
            None => return Err(Error::Format("empty CSV".into())),
        }
        let mut samples = Vec::with_capacity(meta.n);
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut field = |name: &str| -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| Error::Format(format!("row {row}: missing {name}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("row {row}: bad {name}: {e}")))
            };
            let index = field("index")?;
            if index as usize != row {
                return Err(Error::Format(format!("row {row}: index {index} out of order")));
            }
            let coordinate = field("coordinate")?;
            let expected = grid.coordinate(row);
            if (coordinate - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
                return Err(Error::Format(format!(
                    "row {row}: coordinate {coordinate} disagrees with sidecar geometry {expected}"
                )));
            }
            let re = field("re")?;
            let im = field("im")?;
            samples.push(Complex64::new(re, im));
        }
        if samples.len() != meta.n {
            return Err(Error::Format(format!(
                "sidecar promises {} samples, CSV holds {}",
                meta.n,
                samples.len()
            )));
        }
        let wf = WaveFunction::new(grid, meta.space_label, samples)?;
        Ok((wf, meta))
    }
}

/// Sidecar record stored next to the CSV.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WaveMeta {
    pub space_label: SpaceLabel,
    pub origin: f64,
    pub spacing: f64,
    pub n: usize,
    pub hbar: f64,
    pub mass: f64,
    pub norm: f64,
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    fn wide_gaussian(sigma: f64, center: f64, momentum: f64) -> WaveFunction {
        let grid = Grid::centered(center, 0.02, 2048).unwrap();
        WaveFunction::gaussian(grid, SpaceLabel::OldPosition, sigma, center, momentum, &units()).unwrap()
    }

    #[test]
    fn gaussian_is_normalized() {
        let psi = wide_gaussian(1.0, 0.0, 0.0);
        assert!((psi.norm() - 1.0).abs() < 1e-9, "norm {}", psi.norm());
    }

    #[test]
    fn moments_match_the_gaussian_parameters() {
        let psi = wide_gaussian(0.8, 0.7, 1.3);
        let m = psi.moments(1.0);
        assert!((m.mean - 0.7).abs() < 1e-9);
        assert!((m.variance - 0.64).abs() < 1e-6);
        // Central differences bias the momentum estimates by O((p*spacing)^2).
        assert!((m.momentum_mean - 1.3).abs() < 1e-3);
        // Minimum-uncertainty packet: Var(p) = hbar^2/(4 sigma^2), cov = 0.
        assert!((m.momentum_variance - 1.0 / (4.0 * 0.64)).abs() < 5e-3);
        assert!(m.covariance.abs() < 1e-9);
    }

    #[test]
    fn chirped_gaussian_has_positive_covariance() {
        let grid = Grid::centered(0.0, 0.02, 2048).unwrap();
        let alpha = 0.3;
        let psi = WaveFunction::from_fn(grid, SpaceLabel::OldPosition, |x| {
            Complex64::new(-x * x / 4.0, alpha * x * x).exp()
        })
        .unwrap();
        let m = psi.moments(1.0);
        // psi ~ exp(i alpha x^2): cov = 2 hbar alpha <x^2> = 2 alpha Var.
        assert!((m.covariance - 2.0 * alpha * m.variance).abs() < 1e-3);
    }

    #[test]
    fn effective_support_brackets_the_peak() {
        let psi = wide_gaussian(0.5, 0.0, 0.0);
        let (lo, hi) = psi.effective_support().unwrap();
        let xlo = psi.grid().coordinate(lo);
        let xhi = psi.grid().coordinate(hi);
        assert!(xlo < -3.0 && xhi > 3.0, "support [{xlo}, {xhi}] too narrow");
        assert!(xlo > -15.0 && xhi < 15.0, "support [{xlo}, {xhi}] should clip the tails");
    }

    #[test]
    fn edge_mass_detects_spill() {
        let grid = Grid::centered(0.0, 0.1, 256).unwrap();
        let centered = WaveFunction::gaussian(grid, SpaceLabel::OldPosition, 1.0, 0.0, 0.0, &units()).unwrap();
        assert!(centered.edge_mass_fraction(0.05) < 1e-12);
        let shifted = WaveFunction::gaussian(grid, SpaceLabel::OldPosition, 1.0, 12.0, 0.0, &units()).unwrap();
        assert!(shifted.edge_mass_fraction(0.05) > 0.1);
    }

    #[test]
    fn overlap_requires_matching_layout() {
        let a = wide_gaussian(1.0, 0.0, 0.0);
        let b = a.relabeled(SpaceLabel::NewPosition);
        assert!(a.overlap(&b).is_err());
        assert!((a.overlap(&a).unwrap().re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn files_round_trip_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("psi.csv");
        let psi = wide_gaussian(0.9, -0.3, 2.0);
        psi.write_files(&path, &units()).unwrap();
        let (back, meta) = WaveFunction::read_files(&path).unwrap();
        assert_eq!(meta.n, psi.len());
        assert_eq!(meta.space_label, psi.space());
        assert!((meta.norm - psi.norm()).abs() < 1e-15);
        assert_eq!(back.grid(), psi.grid());
        for (a, b) in back.samples().iter().zip(psi.samples()) {
            assert_eq!(a.re, b.re, "17 significant digits must round-trip exactly");
            assert_eq!(a.im, b.im);
        }
    }

    #[test]
    fn read_rejects_tampered_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("psi.csv");
        let psi = wide_gaussian(1.0, 0.0, 0.0);
        psi.write_files(&path, &units()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replace("index,coordinate,re,im", "a,b,c,d")).unwrap();
        assert!(matches!(WaveFunction::read_files(&path), Err(Error::Format(_))));
    }

    #[test]
    fn rejects_non_finite_samples() {
        let grid = Grid::centered(0.0, 0.1, 8).unwrap();
        let mut samples = vec![Complex64::new(0.0, 0.0); 8];
        samples[3] = Complex64::new(f64::NAN, 0.0);
        assert!(WaveFunction::new(grid, SpaceLabel::OldPosition, samples).is_err());
    }
}
