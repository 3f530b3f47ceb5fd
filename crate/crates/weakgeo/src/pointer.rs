//! The 1-D measuring particle: uniform position grid, wavefunctions,
//! momentum representation, spectral translations, moments, and the
//! position-momentum covariance term.
//!
//! The Fourier kernel convention is fixed once for the whole crate by the
//! overlap `<q(x)|p(y)> = e^{ixy}/sqrt(2π)`, so the forward map
//! (position → momentum) is
//!
//! ```text
//! φ_p(y) = (1/sqrt(2π)) ∫ e^{-ixy} φ(x) dx
//! ```
//!
//! and the momentum operator acts as `P = -i d/dx` in the position basis.
//! Both transforms are evaluated by FFT with explicit phase factors for the
//! grid offset, which makes them exactly unitary on the grid (Parseval holds
//! to machine precision).

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Norm tolerance for wave validation.
const NORM_TOL: f64 = 1e-10;
/// Wrap-around guard: boundary amplitude must stay below this fraction of peak.
const BOUNDARY_GUARD: f64 = 1e-8;

/// Uniform position grid with `m` points on `[x_min, x_max)`.
///
/// `m` must be a power of two (the transforms are FFT-based) and at least 16.
/// The induced momentum grid has spacing `dy = 2π/(m·dx)` and spans
/// `[-m/2·dy, m/2·dy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    m: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, m: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "span [{x_min}, {x_max}] is not a finite positive interval"
            )));
        }
        if m < 16 || !m.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "m = {m} must be a power of two and at least 16"
            )));
        }
        Ok(Self { x_min, x_max, m })
    }

    /// The default pointer grid: x in [-20, 20] with 4096 points.
    pub fn default_pointer() -> Self {
        Self {
            x_min: -20.0,
            x_max: 20.0,
            m: 4096,
        }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.m as f64
    }

    /// Momentum-grid spacing `2π/(m·dx)`.
    pub fn dy(&self) -> f64 {
        TAU / (self.m as f64 * self.dx())
    }

    pub fn point(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(|k| self.point(k))
    }

    /// The conjugate grid: ascending momenta `y_k = (k - m/2)·dy`.
    pub fn momentum_grid(&self) -> Grid {
        let dy = self.dy();
        let half = self.m as f64 / 2.0;
        Grid {
            x_min: -half * dy,
            x_max: half * dy,
            m: self.m,
        }
    }
}

/// Complex wavefunction samples on a [`Grid`], normalized so that
/// `Σ |ψ(x_k)|² dx = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerWave {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl PointerWave {
    /// Wrap samples that are already normalized (within 1e-10) and pass the
    /// wrap-around guard.
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                left: grid.len(),
                right: samples.len(),
            });
        }
        let w = Self { grid, samples };
        let residue = (w.norm_sqr() - 1.0).abs();
        if residue > NORM_TOL {
            return Err(Error::NotNormalized(residue));
        }
        w.check_boundary()?;
        Ok(w)
    }

    /// Normalize arbitrary samples and wrap them.
    pub fn normalized(grid: Grid, mut samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                left: grid.len(),
                right: samples.len(),
            });
        }
        let n2: f64 = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / n2.sqrt();
        for z in &mut samples {
            *z *= scale;
        }
        let w = Self { grid, samples };
        w.check_boundary()?;
        Ok(w)
    }

    /// Internal constructor for outputs of exactly unitary maps.
    fn from_unitary_image(grid: Grid, samples: Vec<Complex64>) -> Self {
        let w = Self { grid, samples };
        debug_assert!((w.norm_sqr() - 1.0).abs() < 1e-8);
        w
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// `Σ |ψ|² dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// `|ψ(x_k)|²`, the probability density on the grid.
    pub fn density(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }

    fn check_boundary(&self) -> Result<()> {
        let peak = self
            .samples
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        if peak == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let edge = self.samples[0]
            .norm()
            .max(self.samples[self.samples.len() - 1].norm());
        let ratio = edge / peak;
        if ratio >= BOUNDARY_GUARD {
            return Err(Error::BoundaryOverflow(ratio));
        }
        Ok(())
    }
}

/// Parameters of a (possibly chirped) Gaussian pointer state.
///
/// The generated wave is
///
/// ```text
/// ψ(x) ∝ exp( -(1 + i·chirp)·(x - center)² / (4·width²) + i·mean_momentum·x )
/// ```
///
/// For `chirp = 0` this has `<Q> = center`, `<P> = mean_momentum`,
/// `Var(Q) = width²` and `Var(P) = 1/(4·width²)`. A nonzero chirp correlates
/// position and momentum: `C(Q,P) = -chirp` under this crate's kernel
/// convention, while `Var(P)` grows to `(1 + chirp²)/(4·width²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub center: f64,
    pub mean_momentum: f64,
    pub width: f64,
    pub chirp: f64,
}

impl GaussianSpec {
    /// Standard real Gaussian: centered, at rest, unit width.
    pub fn standard() -> Self {
        Self {
            center: 0.0,
            mean_momentum: 0.0,
            width: 1.0,
            chirp: 0.0,
        }
    }

    pub fn with_chirp(chirp: f64) -> Self {
        Self {
            chirp,
            ..Self::standard()
        }
    }
}

/// Sample a normalized Gaussian pointer state on `grid`.
///
/// The grid must span at least eight widths on each side of the center;
/// narrower grids fail loudly rather than aliasing.
pub fn gaussian_wave(spec: &GaussianSpec, grid: &Grid) -> Result<PointerWave> {
    if !(spec.width > 0.0 && spec.width.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "gaussian width must be positive, got {}",
            spec.width
        )));
    }
    let needed_min = spec.center - 8.0 * spec.width;
    let needed_max = spec.center + 8.0 * spec.width;
    if grid.x_min() > needed_min || grid.x_max() < needed_max {
        return Err(Error::GridTooSmall {
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            needed_min,
            needed_max,
        });
    }
    let quarter_inv = 1.0 / (4.0 * spec.width * spec.width);
    let samples: Vec<Complex64> = grid
        .points()
        .map(|x| {
            let u = x - spec.center;
            let exponent = Complex64::new(-u * u * quarter_inv, -spec.chirp * u * u * quarter_inv)
                + Complex64::new(0.0, spec.mean_momentum * x);
            exponent.exp()
        })
        .collect();
    PointerWave::normalized(grid.clone(), samples)
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(m: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(m)
        } else {
            p.plan_fft_forward(m)
        }
    })
}

/// Raw momentum-representation samples on the ascending momentum grid,
/// `φ_p(y_k) = (dx/sqrt(2π)) Σ_j e^{-i y_k x_j} ψ(x_j)`.
fn momentum_samples(w: &PointerWave) -> Vec<Complex64> {
    let grid = w.grid();
    let m = grid.len();
    let mut buf: Vec<Complex64> = w.samples().to_vec();
    plan(m, false).process(&mut buf);
    let pgrid = grid.momentum_grid();
    let scale = grid.dx() / TAU.sqrt();
    (0..m)
        .map(|k| {
            let y = pgrid.point(k);
            // DFT bin for frequency (k - m/2), taken modulo m
            let bin = (k + m / 2) % m;
            let phase = Complex64::new(0.0, -y * grid.x_min()).exp();
            buf[bin] * phase * scale
        })
        .collect()
}

/// Invert [`momentum_samples`]: recover position samples on `grid`.
fn position_samples(grid: &Grid, momentum: &[Complex64]) -> Vec<Complex64> {
    let m = grid.len();
    let pgrid = grid.momentum_grid();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, &v) in momentum.iter().enumerate() {
        let y = pgrid.point(k);
        let phase = Complex64::new(0.0, y * grid.x_min()).exp();
        let bin = (k + m / 2) % m;
        buf[bin] = v * phase;
    }
    plan(m, true).process(&mut buf);
    let scale = pgrid.dx() / TAU.sqrt();
    buf.iter().map(|z| z * scale).collect()
}

/// Momentum representation of `w`, as a wave on the conjugate grid.
///
/// Unitary: `Σ |φ_p|² dy = Σ |ψ|² dx` exactly (up to rounding).
pub fn to_momentum(w: &PointerWave) -> PointerWave {
    PointerWave::from_unitary_image(w.grid().momentum_grid(), momentum_samples(w))
}

/// Inverse of [`to_momentum`]. `grid` must be the original position grid.
pub fn from_momentum(grid: &Grid, w: &PointerWave) -> PointerWave {
    PointerWave::from_unitary_image(grid.clone(), position_samples(grid, w.samples()))
}

/// Apply a momentum-diagonal map `φ_p(y) → u(y)·φ_p(y)` and return the
/// position-space result. Unitary whenever `u` is a pure phase.
pub(crate) fn momentum_diagonal_map(
    w: &PointerWave,
    u: impl Fn(f64) -> Complex64,
) -> PointerWave {
    let grid = w.grid();
    let pgrid = grid.momentum_grid();
    let mut mom = momentum_samples(w);
    for (k, v) in mom.iter_mut().enumerate() {
        *v *= u(pgrid.point(k));
    }
    PointerWave::from_unitary_image(grid.clone(), position_samples(grid, &mom))
}

/// Rigid translation `ψ(x) → ψ(x - xi)`, applied spectrally so non-lattice
/// shifts are exact to spectral accuracy. Errors if the shifted support
/// reaches the grid boundary (wrap-around guard).
pub fn translate(w: &PointerWave, xi: f64) -> Result<PointerWave> {
    let out = momentum_diagonal_map(w, |y| Complex64::new(0.0, -y * xi).exp());
    out.check_boundary()?;
    Ok(out)
}

/// Position and momentum means and variances of a wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_q: f64,
    pub var_p: f64,
}

fn grid_moments(grid: &Grid, density: &[f64]) -> (f64, f64) {
    let dx = grid.dx();
    let mean: f64 = density
        .iter()
        .enumerate()
        .map(|(k, &d)| grid.point(k) * d)
        .sum::<f64>()
        * dx;
    let var: f64 = density
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let u = grid.point(k) - mean;
            u * u * d
        })
        .sum::<f64>()
        * dx;
    (mean, var)
}

/// Position moments by grid quadrature; momentum moments by quadrature in
/// the momentum representation.
pub fn moments(w: &PointerWave) -> Moments {
    let (mean_q, var_q) = grid_moments(w.grid(), &w.density());
    let mw = to_momentum(w);
    let (mean_p, var_p) = grid_moments(mw.grid(), &mw.density());
    Moments {
        mean_q,
        mean_p,
        var_q,
        var_p,
    }
}

/// Apply the momentum operator spectrally: `(Pψ)(x_j)`.
pub fn apply_momentum(w: &PointerWave) -> Vec<Complex64> {
    let grid = w.grid();
    let pgrid = grid.momentum_grid();
    let mut mom = momentum_samples(w);
    for (k, v) in mom.iter_mut().enumerate() {
        *v *= pgrid.point(k);
    }
    position_samples(grid, &mom)
}

/// Position-momentum covariance `C(Q,P) = <{Q,P}> - 2<P><Q>`.
///
/// The anticommutator expectation is computed as `2·Re(<Qψ|Pψ>)` with `Pψ`
/// evaluated spectrally. Real Gaussians give 0; a chirped Gaussian gives
/// `-chirp`.
pub fn covariance_term(w: &PointerWave) -> f64 {
    let grid = w.grid();
    let dx = grid.dx();
    let p_psi = apply_momentum(w);
    let anticomm: f64 = w
        .samples()
        .iter()
        .zip(p_psi.iter())
        .enumerate()
        .map(|(j, (psi, pp))| {
            let q_psi = psi * grid.point(j);
            (q_psi.conj() * pp).re
        })
        .sum::<f64>()
        * dx
        * 2.0;
    let mom = moments(w);
    anticomm - 2.0 * mom.mean_p * mom.mean_q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Multiply by a plane wave e^{i p0 x} (test helper).
    fn modulate(w: &PointerWave, p0: f64) -> PointerWave {
        let samples: Vec<Complex64> = w
            .samples()
            .iter()
            .enumerate()
            .map(|(j, z)| z * Complex64::new(0.0, p0 * w.grid().point(j)).exp())
            .collect();
        PointerWave::new(w.grid().clone(), samples).unwrap()
    }

    /// Independent 4th-order finite-difference route for P = -i d/dx.
    fn apply_momentum_fd(w: &PointerWave) -> Vec<Complex64> {
        let s = w.samples();
        let m = s.len();
        let dx = w.grid().dx();
        (0..m)
            .map(|j| {
                let sm2 = s[(j + m - 2) % m];
                let sm1 = s[(j + m - 1) % m];
                let sp1 = s[(j + 1) % m];
                let sp2 = s[(j + 2) % m];
                let d = (sm2 - sp2 + (sp1 - sm1) * 8.0) / (12.0 * dx);
                Complex64::new(0.0, -1.0) * d
            })
            .collect()
    }

    fn covariance_oracle(w: &PointerWave) -> f64 {
        let grid = w.grid();
        let dx = grid.dx();
        let p_psi = apply_momentum_fd(w);
        let anticomm: f64 = w
            .samples()
            .iter()
            .zip(p_psi.iter())
            .enumerate()
            .map(|(j, (psi, pp))| ((psi * grid.point(j)).conj() * pp).re)
            .sum::<f64>()
            * dx
            * 2.0;
        let mean_q = grid_moments(grid, &w.density()).0;
        let mean_p: f64 = w
            .samples()
            .iter()
            .zip(p_psi.iter())
            .map(|(psi, pp)| (psi.conj() * pp).re)
            .sum::<f64>()
            * dx;
        anticomm - 2.0 * mean_p * mean_q
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(-10.0, 10.0, 1000).is_err()); // not a power of two
        assert!(Grid::new(-10.0, 10.0, 8).is_err()); // too few points
        assert!(Grid::new(10.0, -10.0, 64).is_err());
        let g = Grid::new(-10.0, 10.0, 64).unwrap();
        assert!((g.dx() - 20.0 / 64.0).abs() < 1e-15);
        assert!((g.dy() - TAU / (64.0 * g.dx())).abs() < 1e-15);
    }

    #[test]
    fn gaussian_centered_is_real_and_symmetric() {
        let w = gaussian_wave(&GaussianSpec::standard(), &Grid::default_pointer()).unwrap();
        let max_im = w.samples().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(max_im < 1e-15);
        let m = moments(&w);
        assert!(m.mean_q.abs() < 1e-12);
        assert!(m.mean_p.abs() < 1e-12);
    }

    #[test]
    fn gaussian_moments_match_spec() {
        let w = gaussian_wave(&GaussianSpec::standard(), &Grid::default_pointer()).unwrap();
        let m = moments(&w);
        assert!((m.var_q - 1.0).abs() < 1e-10);
        assert!((m.var_p - 0.25).abs() < 1e-10);

        let off = GaussianSpec {
            center: 1.5,
            mean_momentum: -0.4,
            width: 0.8,
            chirp: 0.0,
        };
        let w = gaussian_wave(&off, &Grid::default_pointer()).unwrap();
        let m = moments(&w);
        assert!((m.mean_q - 1.5).abs() < 1e-8);
        assert!((m.mean_p + 0.4).abs() < 1e-8);
        assert!((m.var_q - 0.64).abs() < 1e-8);

        // chirp widens the momentum spread: Var(P) = (1 + c²)/(4σ²)
        let chirped = gaussian_wave(&GaussianSpec::with_chirp(1.5), &Grid::default_pointer())
            .unwrap();
        let m = moments(&chirped);
        assert!((m.var_q - 1.0).abs() < 1e-8);
        assert!((m.var_p - (1.0 + 1.5 * 1.5) / 4.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_grid_too_small() {
        let g = Grid::new(-10.0, 10.0, 1024).unwrap();
        let spec = GaussianSpec {
            center: 5.0,
            mean_momentum: 0.0,
            width: 1.0,
            chirp: 0.0,
        };
        match gaussian_wave(&spec, &g) {
            Err(Error::GridTooSmall { .. }) => {}
            other => panic!("expected GridTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn momentum_of_gaussian_is_gaussian() {
        // width sigma in x maps to width 1/(2 sigma) in y
        let w = gaussian_wave(&GaussianSpec::standard(), &Grid::default_pointer()).unwrap();
        let mw = to_momentum(&w);
        // real and positive up to machine noise
        let max_im = mw.samples().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(max_im < 1e-12);
        let (mean, var) = grid_moments(mw.grid(), &mw.density());
        assert!(mean.abs() < 1e-10);
        assert!((var - 0.25).abs() < 1e-10);
        // analytic profile check at a few points: |φ_p(y)| = (2/π)^{1/4} e^{-y²}
        let norm = (2.0 / std::f64::consts::PI).powf(0.25);
        for k in [1024, 2048, 3000] {
            let y = mw.grid().point(k);
            let expect = norm * (-y * y).exp();
            assert!((mw.samples()[k].norm() - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn modulation_shifts_momentum_peak() {
        let w = gaussian_wave(&GaussianSpec::standard(), &Grid::default_pointer()).unwrap();
        let wm = modulate(&w, 1.3);
        let m = moments(&wm);
        assert!((m.mean_p - 1.3).abs() < 1e-8);
        assert!((m.mean_q - 0.0).abs() < 1e-10);
        // density peak sits at the nearest momentum-grid point to 1.3
        let mw = to_momentum(&wm);
        let peak = mw
            .density()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((mw.grid().point(peak) - 1.3).abs() <= mw.grid().dx());
    }

    #[test]
    fn momentum_roundtrip_is_identity() {
        let spec = GaussianSpec {
            center: 0.7,
            mean_momentum: 2.1,
            width: 0.6,
            chirp: 0.5,
        };
        let w = gaussian_wave(&spec, &Grid::default_pointer()).unwrap();
        let back = from_momentum(w.grid(), &to_momentum(&w));
        let max_diff = w
            .samples()
            .iter()
            .zip(back.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-12);
    }

    #[test]
    fn parseval_holds() {
        let spec = GaussianSpec {
            center: -1.0,
            mean_momentum: 0.9,
            width: 1.4,
            chirp: -0.8,
        };
        let w = gaussian_wave(&spec, &Grid::default_pointer()).unwrap();
        let mw = to_momentum(&w);
        assert!((w.norm_sqr() - mw.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn translate_identity_and_moment() {
        let w = gaussian_wave(&GaussianSpec::standard(), &Grid::default_pointer()).unwrap();
        let same = translate(&w, 0.0).unwrap();
        let max_diff = w
            .samples()
            .iter()
            .zip(same.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-13);

        let shifted = translate(&w, 0.7).unwrap();
        let m = moments(&shifted);
        assert!((m.mean_q - 0.7).abs() < 1e-8);
        assert!((shifted.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translate_group_law() {
        let w = gaussian_wave(&GaussianSpec::standard(), &Grid::default_pointer()).unwrap();
        let ab = translate(&translate(&w, 0.31).unwrap(), -1.17).unwrap();
        let once = translate(&w, 0.31 - 1.17).unwrap();
        let max_diff = ab
            .samples()
            .iter()
            .zip(once.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-10);
    }

    #[test]
    fn translate_lattice_shift_matches_index_shift() {
        let grid = Grid::default_pointer();
        let w = gaussian_wave(&GaussianSpec::standard(), &grid).unwrap();
        let k = 37usize;
        let shifted = translate(&w, k as f64 * grid.dx()).unwrap();
        for j in 0..grid.len() {
            let src = (j + grid.len() - k) % grid.len();
            assert!(
                (shifted.samples()[j] - w.samples()[src]).norm() < 1e-12,
                "index {j}"
            );
        }
    }

    #[test]
    fn translate_overflow_is_loud() {
        let w = gaussian_wave(&GaussianSpec::standard(), &Grid::default_pointer()).unwrap();
        match translate(&w, 15.0) {
            Err(Error::BoundaryOverflow(_)) => {}
            other => panic!("expected BoundaryOverflow, got {other:?}"),
        }
    }

    #[test]
    fn translation_covariance_of_moments() {
        let w = gaussian_wave(&GaussianSpec::with_chirp(0.7), &Grid::default_pointer()).unwrap();
        let before = moments(&w);
        let after = moments(&translate(&w, -0.9).unwrap());
        assert!((after.mean_q - before.mean_q + 0.9).abs() < 1e-8);
        assert!((after.mean_p - before.mean_p).abs() < 1e-10);
        assert!((after.var_q - before.var_q).abs() < 1e-9);
        assert!((after.var_p - before.var_p).abs() < 1e-9);
    }

    #[test]
    fn covariance_vanishes_for_real_gaussian() {
        let w = gaussian_wave(&GaussianSpec::standard(), &Grid::default_pointer()).unwrap();
        assert!(covariance_term(&w).abs() < 1e-8);
    }

    #[test]
    fn covariance_of_chirped_gaussian() {
        // C(Q,P) = -chirp for the generator exp(-(1+ic)(x-q0)²/(4σ²)):
        // the phase gradient is S'(x) = -c(x-q0)/(2σ²) + p0, so
        // <{Q,P}> - 2<P><Q> = 2 Cov(x, S'(x)) = -c·Var(Q)/σ² = -c.
        for chirp in [1.0, -0.6, 2.3] {
            let w = gaussian_wave(&GaussianSpec::with_chirp(chirp), &Grid::default_pointer())
                .unwrap();
            let got = covariance_term(&w);
            assert!(
                (got + chirp).abs() < 1e-8,
                "chirp {chirp}: got {got}, expected {}",
                -chirp
            );
            // independent finite-difference oracle; its truncation error grows
            // with the chirp (higher derivatives), hence the looser tolerance
            assert!((got - covariance_oracle(&w)).abs() < 1e-7);
        }
    }

    #[test]
    fn covariance_invariant_under_translate_and_modulate() {
        let w = gaussian_wave(&GaussianSpec::standard(), &Grid::default_pointer()).unwrap();
        let moved = modulate(&translate(&w, 1.1).unwrap(), -2.0);
        assert!(covariance_term(&moved).abs() < 1e-8);
        assert!(covariance_oracle(&moved).abs() < 1e-8);
    }

    #[test]
    fn heisenberg_floor() {
        for (width, chirp) in [(1.0, 0.0), (0.3, 0.0), (2.0, 1.5), (0.5, -2.0)] {
            let spec = GaussianSpec {
                center: 0.0,
                mean_momentum: 0.0,
                width,
                chirp,
            };
            let w = gaussian_wave(&spec, &Grid::default_pointer()).unwrap();
            let m = moments(&w);
            assert!(m.var_q * m.var_p >= 0.25 - 1e-8);
            if chirp == 0.0 {
                assert!((m.var_q * m.var_p - 0.25).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn grid_convergence_of_moments() {
        let coarse = Grid::new(-20.0, 20.0, 2048).unwrap();
        let fine = Grid::new(-20.0, 20.0, 4096).unwrap();
        let spec = GaussianSpec {
            center: 0.3,
            mean_momentum: 0.8,
            width: 1.1,
            chirp: 0.4,
        };
        let mc = moments(&gaussian_wave(&spec, &coarse).unwrap());
        let mf = moments(&gaussian_wave(&spec, &fine).unwrap());
        assert!((mc.mean_q - mf.mean_q).abs() < 1e-10);
        assert!((mc.mean_p - mf.mean_p).abs() < 1e-10);
        assert!((mc.var_q - mf.var_q).abs() < 1e-10);
        assert!((mc.var_p - mf.var_p).abs() < 1e-10);
    }

    #[test]
    fn rejects_unnormalized_and_mismatched() {
        let grid = Grid::new(-10.0, 10.0, 64).unwrap();
        let samples = vec![c(1.0, 0.0); 64];
        assert!(matches!(
            PointerWave::new(grid.clone(), samples),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            PointerWave::new(grid, vec![c(1.0, 0.0); 32]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
