//! Seeded generators for randomized verification batteries. Everything here
//! is deterministic given the RNG state, which is what makes battery CSV
//! output reproducible byte-for-byte.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::linalg::{HermitianOperator, StateVector};
use crate::rayspace::BlochPoint;

/// One standard normal deviate (Box–Muller).
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

/// Complex normal deviate.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// Haar-ish random pure state: normalized complex-normal amplitudes.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        if let Ok(s) = StateVector::normalized(amps) {
            return s;
        }
    }
}

/// Random Hermitian operator with spectrum drawn uniformly from [-1, 1] and a
/// random eigenbasis.
pub fn random_hermitian_unit_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> HermitianOperator {
    let g = DMatrix::from_fn(dim, dim, |_, _| random_complex(rng));
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let basis = HermitianOperator::new(h).expect("hermitian by construction");
    let v = basis.eigenvectors();
    let spectrum = DVector::from_iterator(
        dim,
        (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)),
    );
    let m = v * DMatrix::from_diagonal(&spectrum) * v.adjoint();
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0); // scrub rounding asymmetry
    HermitianOperator::new(m).expect("hermitian by construction")
}

/// Uniform point on the Bloch sphere.
pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R) -> BlochPoint {
    let theta = rng.random_range(-1.0..1.0f64).acos();
    let phi = rng.random_range(-PI..PI);
    BlochPoint::new(theta, phi).expect("angles in range")
}
