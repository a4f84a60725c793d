#![allow(dead_code)]

use lct_core::{Grid, PhysicalConstants, SymplecticMatrix, WaveFunction};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const UNITS: PhysicalConstants = PhysicalConstants { hbar: 1.0, mass: 1.0 };

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// Draws a, b, d in moderate ranges and solves c from the determinant, so every
/// sample is symplectic to rounding. b is log-uniform over two decades with a
/// random sign; a and d share a sign to keep c from blowing up.
pub fn random_symplectic(rng: &mut ChaCha8Rng) -> SymplecticMatrix {
    random_symplectic_with_b(rng, 0.1, 10.0)
}

/// Like [`random_symplectic`] with |b| kept near 1, so that products of two
/// draws have O(10) entries and absolute determinant checks stay meaningful.
pub fn random_symplectic_moderate(rng: &mut ChaCha8Rng) -> SymplecticMatrix {
    random_symplectic_with_b(rng, 0.2, 2.0)
}

fn random_symplectic_with_b(rng: &mut ChaCha8Rng, b_lo: f64, b_hi: f64) -> SymplecticMatrix {
    let sign = random_sign(rng);
    let a = sign * rng.random_range(0.6..1.4);
    let d = sign * rng.random_range(0.6..1.4);
    let b = random_sign(rng) * (rng.random_range(b_lo.ln()..b_hi.ln())).exp();
    let c = (a * d - 1.0) / b;
    SymplecticMatrix::new(a, b, c, d)
}

/// A Gaussian packet with O(1) width and gentle center/momentum offsets.
pub struct PacketDraw {
    pub sigma0: f64,
    pub center: f64,
    pub momentum: f64,
}

pub fn random_packet(rng: &mut ChaCha8Rng) -> PacketDraw {
    PacketDraw {
        sigma0: rng.random_range(0.7..1.3),
        center: rng.random_range(-0.5..0.5),
        momentum: rng.random_range(-0.5..0.5),
    }
}

/// Input and output grids sized for one kernel application: the input spans the
/// packet's support, the output spans the moment-transported window, and the
/// input spacing resolves the kernel chirp at every output point with margin
/// over the eight-samples rule.
pub fn physical_grids(m: &SymplecticMatrix, packet: &PacketDraw, n_out: usize) -> (Grid, Grid) {
    let cross = 1.0 / m.b;
    let yy = -m.d / (2.0 * m.b);
    let half_in = 10.0 * packet.sigma0;

    // Transported center and spread of the output packet.
    let var_p = UNITS.hbar * UNITS.hbar / (4.0 * packet.sigma0 * packet.sigma0);
    let x_mean = -(packet.momentum + 2.0 * yy * packet.center) / cross;
    let var_x =
        (4.0 * yy * yy * packet.sigma0 * packet.sigma0 + var_p) / (cross * cross);
    let half_out = 8.0 * var_x.sqrt() + 1.0;
    let out_spacing = 2.0 * half_out / (n_out - 1) as f64;
    let out_grid = Grid::centered(x_mean, out_spacing, n_out).unwrap();

    let mut max_freq: f64 = 0.0;
    for x in [out_grid.coordinate(0), out_grid.last_coordinate()] {
        for y in [packet.center - half_in, packet.center + half_in] {
            max_freq = max_freq.max((cross * x + 2.0 * yy * y).abs());
        }
    }
    let in_spacing = 2.0 * std::f64::consts::PI * UNITS.hbar / (9.0 * max_freq);
    let n_in = (2.0 * half_in / in_spacing).ceil() as usize + 1;
    let in_grid = Grid::centered(packet.center, in_spacing, n_in).unwrap();
    (in_grid, out_grid)
}

pub fn max_rel_deviation(a: &WaveFunction, b: &WaveFunction) -> f64 {
    let peak = b.samples().iter().map(|z| z.norm()).fold(0.0, f64::max);
    a.samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y).norm() / peak)
        .fold(0.0, f64::max)
}
