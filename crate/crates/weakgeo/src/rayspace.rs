//! Geometry of the space of rays CP(n): projective coordinates, the
//! Fubini–Study metric in coordinate and projector form, the abelian
//! connection 1-form, Pancharatnam triangle phases, and Bloch-sphere maps
//! with oriented solid angles.
//!
//! Coordinates: on the chart `ψ⁰ ≠ 0` a ray is described by the `n` complex
//! numbers `ξ^i = ψ^i/ψ⁰`. A vector is recovered from `(r, φ, ξ)` as
//!
//! ```text
//! ψ⁰ = r·e^{iφ}/(1 + ξ̄ξ)^{1/2},    ψ^i = ξ^i·ψ⁰.
//! ```
//!
//! Only this chart is implemented; hitting its singularity is an explicit
//! error and the caller rotates the basis.
//!
//! Sign conventions, fixed once:
//!
//! - the triangle phase is `arg(<a|c><c|b><b|a>)` (cyclic, read right to left
//!   as the loop a → b → c → a);
//! - the solid angle of `(p1, p2, p3)` carries the sign of the scalar triple
//!   product of the corresponding unit vectors;
//! - with both of these, qubit triangles satisfy `Θ = -Ω/2`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::linalg::{inner_product, StateVector};
use crate::{wrap_angle, Error, Result};

/// Overlap magnitude below which a Pancharatnam phase is undefined.
const OVERLAP_GUARD: f64 = 1e-12;
/// Chart singularity threshold on `|ψ⁰|`.
const CHART_GUARD: f64 = 1e-12;

/// A vector lifted off the chart: norm `r`, global phase `varphi`, and
/// projective coordinates `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedCoordinates {
    pub r: f64,
    pub varphi: f64,
    pub xi: Vec<Complex64>,
}

impl LiftedCoordinates {
    /// `Σ ξ̄ξ`.
    pub fn chart_norm_sqr(&self) -> f64 {
        self.xi.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Rebuild the full `(n+1)`-component vector.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let s = self.chart_norm_sqr();
        let psi0 = Complex64::new(0.0, self.varphi).exp() * (self.r / (1.0 + s).sqrt());
        let mut out = Vec::with_capacity(self.xi.len() + 1);
        out.push(psi0);
        out.extend(self.xi.iter().map(|xi| xi * psi0));
        out
    }
}

/// A point on the Bloch sphere, `theta ∈ [0, π]`, `phi ∈ (-π, π]`.
///
/// Antipodal points represent orthogonal states; the stereographic chart is
/// `ξ = tan(θ/2)·e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    theta: f64,
    phi: f64,
}

impl BlochPoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() || !(-1e-12..=PI + 1e-12).contains(&theta) {
            return Err(Error::InvalidBlochPoint(format!(
                "theta = {theta}, phi = {phi}"
            )));
        }
        Ok(Self {
            theta: theta.clamp(0.0, PI),
            phi: wrap_angle(phi),
        })
    }

    pub fn north_pole() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The unit vector (sinθcosφ, sinθsinφ, cosθ).
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = (self.theta.sin(), self.theta.cos());
        let (sp, cp) = (self.phi.sin(), self.phi.cos());
        [st * cp, st * sp, ct]
    }
}

/// A small displacement of projective coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDisplacement {
    pub dxi: Vec<Complex64>,
}

/// Projective coordinates of `psi` on the `ψ⁰ ≠ 0` chart.
pub fn projective_coords(psi: &StateVector) -> Result<LiftedCoordinates> {
    let amps = psi.amplitudes();
    let psi0 = amps[0];
    if psi0.norm() <= CHART_GUARD {
        return Err(Error::ChartSingularity(psi0.norm()));
    }
    let xi: Vec<Complex64> = amps[1..].iter().map(|a| a / psi0).collect();
    Ok(LiftedCoordinates {
        r: psi.vector().norm(),
        varphi: psi0.arg(),
        xi,
    })
}

/// `|θ,φ> = cos(θ/2)|u0> + e^{iφ}·sin(θ/2)|u1>`.
pub fn state_from_bloch(p: &BlochPoint) -> StateVector {
    let half = p.theta / 2.0;
    StateVector::new(vec![
        Complex64::new(half.cos(), 0.0),
        Complex64::new(0.0, p.phi).exp() * half.sin(),
    ])
    .expect("bloch parametrization is normalized")
}

/// Bloch angles of a qubit state, up to global phase. `phi` is 0 by
/// convention at the poles.
pub fn bloch_from_state(psi: &StateVector) -> Result<BlochPoint> {
    if psi.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: psi.dim(),
        });
    }
    let a = psi.amplitudes()[0];
    let b = psi.amplitudes()[1];
    let theta = 2.0 * b.norm().atan2(a.norm());
    let phi = if b.norm() < 1e-14 || a.norm() < 1e-14 {
        0.0
    } else {
        wrap_angle(b.arg() - a.arg())
    };
    BlochPoint::new(theta, phi)
}

/// Geodesic Fubini–Study distance `arccos|<a|b>| ∈ [0, π/2]`.
///
/// Symmetric and invariant under global phases of either argument.
pub fn fs_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = inner_product(a, b)?;
    Ok(overlap.norm().clamp(0.0, 1.0).acos())
}

/// The Fubini–Study quadratic form in projective coordinates,
///
/// ```text
/// ds² = [(1 + ξ̄ξ)·δ_j^k - ξ̄_k·ξ^j] / (1 + ξ̄ξ)² · dξ^k·dξ̄_j
///     = [(1+s)·|dξ|² - |ξ̄·dξ|²] / (1+s)².
/// ```
pub fn fs_metric_form(point: &LiftedCoordinates, d: &TangentDisplacement) -> f64 {
    assert_eq!(point.xi.len(), d.dxi.len(), "displacement dimension");
    let s = point.chart_norm_sqr();
    let dxi_sqr: f64 = d.dxi.iter().map(|z| z.norm_sqr()).sum();
    let z: Complex64 = point
        .xi
        .iter()
        .zip(d.dxi.iter())
        .map(|(xi, dxi)| xi.conj() * dxi)
        .sum();
    let val = ((1.0 + s) * dxi_sqr - z.norm_sqr()) / ((1.0 + s) * (1.0 + s));
    debug_assert!(val >= -1e-14);
    val
}

/// The abelian connection 1-form
/// `A = (i/2)·(ξ^i·dξ̄_i - ξ̄_i·dξ^i)/(1 + ξ̄ξ) = Im(ξ̄·dξ)/(1 + ξ̄ξ)`,
/// evaluated on a displacement. Manifestly real.
pub fn connection_eval(point: &LiftedCoordinates, d: &TangentDisplacement) -> f64 {
    assert_eq!(point.xi.len(), d.dxi.len(), "displacement dimension");
    let s = point.chart_norm_sqr();
    let z: Complex64 = point
        .xi
        .iter()
        .zip(d.dxi.iter())
        .map(|(xi, dxi)| xi.conj() * dxi)
        .sum();
    z.im / (1.0 + s)
}

/// Lift a coordinate displacement to the unit sphere along the constant-phase
/// section: returns `(ψ, dψ)` with `ψ` the unit vector at `point` (using its
/// `varphi`, with `r` forced to 1) and `dψ` the exact differential of the
/// section under `ξ → ξ + dξ`.
///
/// Along this section `<ψ|dψ> = i·A(dξ)`, so the projector form of the metric
/// applied to `dψ` reproduces [`fs_metric_form`] identically.
pub fn lift_displacement(
    point: &LiftedCoordinates,
    d: &TangentDisplacement,
) -> (Vec<Complex64>, Vec<Complex64>) {
    assert_eq!(point.xi.len(), d.dxi.len(), "displacement dimension");
    let s = point.chart_norm_sqr();
    let psi0 = Complex64::new(0.0, point.varphi).exp() / (1.0 + s).sqrt();
    let z: Complex64 = point
        .xi
        .iter()
        .zip(d.dxi.iter())
        .map(|(xi, dxi)| xi.conj() * dxi)
        .sum();
    let ds = 2.0 * z.re; // d(ξ̄ξ)
    let dpsi0 = psi0 * (-ds / (2.0 * (1.0 + s)));

    let mut psi = Vec::with_capacity(point.xi.len() + 1);
    let mut dpsi = Vec::with_capacity(point.xi.len() + 1);
    psi.push(psi0);
    dpsi.push(dpsi0);
    for (xi, dxi) in point.xi.iter().zip(d.dxi.iter()) {
        psi.push(xi * psi0);
        dpsi.push(dxi * psi0 + xi * dpsi0);
    }
    (psi, dpsi)
}

/// Projector form of the Fubini–Study metric,
/// `ds² = <dψ|dψ> - <dψ|ψ><ψ|dψ>`, for a unit `ψ`.
pub fn fs_projector_form(psi: &[Complex64], dpsi: &[Complex64]) -> f64 {
    let dd: f64 = dpsi.iter().map(|z| z.norm_sqr()).sum();
    let pd: Complex64 = psi
        .iter()
        .zip(dpsi.iter())
        .map(|(p, d)| p.conj() * d)
        .sum();
    dd - pd.norm_sqr()
}

/// Pancharatnam phase of the ordered triple `(a, b, c)`:
/// `Θ = arg(<a|c><c|b><b|a>) ∈ (-π, π]`.
///
/// Invariant under independent global phase changes of all three arguments.
/// For qubits this equals `-Ω/2` with `Ω` the oriented solid angle from
/// [`solid_angle`] of the corresponding Bloch points.
pub fn pancharatnam_phase(a: &StateVector, b: &StateVector, c: &StateVector) -> Result<f64> {
    let ac = inner_product(a, c)?;
    let cb = inner_product(c, b)?;
    let ba = inner_product(b, a)?;
    let min_overlap = ac.norm().min(cb.norm()).min(ba.norm());
    if min_overlap <= OVERLAP_GUARD {
        return Err(Error::UndefinedPhase(min_overlap, OVERLAP_GUARD));
    }
    Ok(wrap_angle((ac * cb * ba).arg()))
}

/// Oriented solid angle of the geodesic triangle `(p1, p2, p3)` on the unit
/// sphere, in steradians.
///
/// Computed as the spherical excess `α + β + γ - π` with interior angles from
/// unit-vector arithmetic, signed by the orientation of the vertex order
/// (the scalar triple product). Degenerate triangles (a coincident pair, or
/// all three on one great circle) return 0 by continuity; an antipodal pair
/// is an error since the connecting geodesic is not unique.
pub fn solid_angle(p1: &BlochPoint, p2: &BlochPoint, p3: &BlochPoint) -> Result<f64> {
    let n = [p1.unit_vector(), p2.unit_vector(), p3.unit_vector()];
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let pair_dots = [
        dot(&n[0], &n[1]),
        dot(&n[0], &n[2]),
        dot(&n[1], &n[2]),
    ];
    for &d in &pair_dots {
        if d < -1.0 + 1e-10 {
            return Err(Error::AntipodalPoints);
        }
        if d > 1.0 - 1e-12 {
            return Ok(0.0); // coincident pair: zero-area triangle
        }
    }

    let cross = |a: &[f64; 3], b: &[f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let triple = dot(&n[0], &cross(&n[1], &n[2]));
    if triple.abs() < 1e-10 {
        return Ok(0.0); // collinear on a great circle
    }

    // interior angle at vertex i between the tangents toward j and k
    let interior = |i: usize, j: usize, k: usize| {
        let project = |target: &[f64; 3]| {
            let c = dot(&n[i], target);
            let mut t = [0.0f64; 3];
            for (a, (&tt, &ni)) in t.iter_mut().zip(target.iter().zip(n[i].iter())) {
                *a = tt - c * ni;
            }
            let norm = dot(&t, &t).sqrt();
            [t[0] / norm, t[1] / norm, t[2] / norm]
        };
        let tj = project(&n[j]);
        let tk = project(&n[k]);
        dot(&tj, &tk).clamp(-1.0, 1.0).acos()
    };

    let excess = interior(0, 1, 2) + interior(1, 0, 2) + interior(2, 0, 1) - PI;
    Ok(excess * triple.signum())
}

/// Split of the unit-sphere line element `<dψ|dψ>` into the phase part
/// `(dφ - A)² = |<ψ|dψ>|²` and the Fubini–Study part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMetricParts {
    pub phase_part: f64,
    pub fs_part: f64,
    pub total: f64,
}

/// Decompose a perturbation of `psi` into phase and ray motion.
///
/// The radial component of `dpsi` (the part changing the norm, with
/// `Re<ψ|dψ> ≠ 0`) is projected out first; the parts then satisfy
/// `phase_part + fs_part = total` identically.
pub fn sphere_metric_decomposition(
    psi: &StateVector,
    dpsi: &[Complex64],
) -> Result<SphereMetricParts> {
    if dpsi.len() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: dpsi.len(),
        });
    }
    let overlap: Complex64 = psi
        .amplitudes()
        .iter()
        .zip(dpsi.iter())
        .map(|(p, d)| p.conj() * d)
        .sum();
    // kill the radial part
    let radial = overlap.re;
    let tangent: Vec<Complex64> = dpsi
        .iter()
        .zip(psi.amplitudes().iter())
        .map(|(d, p)| d - p * radial)
        .collect();
    let overlap_t: Complex64 = psi
        .amplitudes()
        .iter()
        .zip(tangent.iter())
        .map(|(p, d)| p.conj() * d)
        .sum();
    debug_assert!(overlap_t.re.abs() < 1e-10);
    let total: f64 = tangent.iter().map(|z| z.norm_sqr()).sum();
    let phase_part = overlap_t.norm_sqr();
    Ok(SphereMetricParts {
        phase_part,
        fs_part: total - phase_part,
        total,
    })
}

/// Ray-space geodesic distance between two Bloch points: half the angular
/// separation of the unit vectors.
pub fn bloch_separation(a: &BlochPoint, b: &BlochPoint) -> f64 {
    let va = a.unit_vector();
    let vb = b.unit_vector();
    let d = (va[0] * vb[0] + va[1] * vb[1] + va[2] * vb[2]).clamp(-1.0, 1.0);
    d.acos() / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_bloch, random_state};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn section_state(xi: &[Complex64]) -> StateVector {
        let lifted = LiftedCoordinates {
            r: 1.0,
            varphi: 0.0,
            xi: xi.to_vec(),
        };
        StateVector::new(lifted.reconstruct()).unwrap()
    }

    /// Ray-equality residual `1 - |<a|b>|` (0 for equal rays).
    fn ray_residual(a: &StateVector, b: &StateVector) -> f64 {
        1.0 - inner_product(a, b).unwrap().norm()
    }

    fn random_displacement<R: Rng>(rng: &mut R, n: usize, scale: f64) -> TangentDisplacement {
        TangentDisplacement {
            dxi: (0..n)
                .map(|_| c(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
                .collect(),
        }
    }

    #[test]
    fn projective_coords_examples() {
        let center = StateVector::basis(4, 0);
        let pc = projective_coords(&center).unwrap();
        assert!((pc.r - 1.0).abs() < 1e-14);
        assert!(pc.varphi.abs() < 1e-14);
        assert!(pc.xi.iter().all(|z| z.norm() < 1e-14));

        // stereographic projection of a Bloch state
        for (theta, phi) in [(0.4, 1.0), (1.2, -2.0), (2.4, 3.0)] {
            let psi = state_from_bloch(&BlochPoint::new(theta, phi).unwrap());
            let pc = projective_coords(&psi).unwrap();
            let expect = c(0.0, phi).exp() * (theta / 2.0).tan();
            assert!((pc.xi[0] - expect).norm() < 1e-10, "theta={theta}");
        }

        let south = StateVector::basis(2, 1);
        assert!(matches!(
            projective_coords(&south),
            Err(Error::ChartSingularity(_))
        ));
    }

    #[test]
    fn reconstruction_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for dim in 2..=4 {
            for _ in 0..30 {
                let psi = random_state(&mut rng, dim);
                let pc = match projective_coords(&psi) {
                    Ok(pc) => pc,
                    Err(_) => continue, // chart singularity; skip
                };
                let rebuilt = pc.reconstruct();
                let max_diff: f64 = psi
                    .amplitudes()
                    .iter()
                    .zip(rebuilt.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(max_diff < 1e-10);
            }
        }
    }

    #[test]
    fn bloch_roundtrip_and_poles() {
        let north = bloch_from_state(&StateVector::basis(2, 0)).unwrap();
        assert!(north.theta().abs() < 1e-14 && north.phi().abs() < 1e-14);
        let south = bloch_from_state(&StateVector::basis(2, 1)).unwrap();
        assert!((south.theta() - PI).abs() < 1e-14);

        let s = 1.0 / 2.0f64.sqrt();
        let psi = StateVector::new(vec![c(s, 0.0), c(0.0, s)]).unwrap();
        let p = bloch_from_state(&psi).unwrap();
        assert!((p.theta() - FRAC_PI_2).abs() < 1e-14);
        assert!((p.phi() - FRAC_PI_2).abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let point = random_bloch(&mut rng);
            let back = bloch_from_state(&state_from_bloch(&point)).unwrap();
            let residual = ray_residual(&state_from_bloch(&point), &state_from_bloch(&back));
            assert!(residual < 1e-10);
        }

        assert!(matches!(
            bloch_from_state(&StateVector::basis(3, 0)),
            Err(Error::WrongDimension { .. })
        ));
    }

    #[test]
    fn antipodal_states_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let p = random_bloch(&mut rng);
            let q = BlochPoint::new(PI - p.theta(), p.phi() + PI).unwrap();
            let overlap =
                inner_product(&state_from_bloch(&p), &state_from_bloch(&q)).unwrap();
            assert!(overlap.norm() < 1e-10);
        }
    }

    #[test]
    fn fs_distance_examples() {
        let a = StateVector::basis(2, 0);
        assert!(fs_distance(&a, &a.with_global_phase(1.1)).unwrap() < 1e-14);
        assert!((fs_distance(&a, &StateVector::basis(2, 1)).unwrap() - FRAC_PI_2).abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let p = random_bloch(&mut rng);
            let q = random_bloch(&mut rng);
            let d = fs_distance(&state_from_bloch(&p), &state_from_bloch(&q)).unwrap();
            assert!((d - bloch_separation(&p, &q)).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_form_at_chart_center() {
        let point = LiftedCoordinates {
            r: 1.0,
            varphi: 0.0,
            xi: vec![c(0.0, 0.0); 3],
        };
        let d = TangentDisplacement {
            dxi: vec![c(0.1, -0.2), c(0.0, 0.3), c(-0.4, 0.0)],
        };
        let dxi_sqr: f64 = d.dxi.iter().map(|z| z.norm_sqr()).sum();
        assert!((fs_metric_form(&point, &d) - dxi_sqr).abs() < 1e-15);

        let doubled = TangentDisplacement {
            dxi: d.dxi.iter().map(|z| z * 2.0).collect(),
        };
        assert!((fs_metric_form(&point, &doubled) - 4.0 * dxi_sqr).abs() < 1e-14);
    }

    #[test]
    fn metric_form_matches_projector_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in 1..=3 {
            for _ in 0..50 {
                let xi: Vec<Complex64> = (0..n)
                    .map(|_| c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)))
                    .collect();
                let point = LiftedCoordinates {
                    r: 1.0,
                    varphi: rng.random_range(-3.0..3.0),
                    xi,
                };
                let d = random_displacement(&mut rng, n, 1.0);
                let (psi, dpsi) = lift_displacement(&point, &d);
                let coord = fs_metric_form(&point, &d);
                let proj = fs_projector_form(&psi, &dpsi);
                assert!((coord - proj).abs() < 1e-12, "coord {coord} proj {proj}");
            }
        }
    }

    #[test]
    fn lift_matches_finite_difference() {
        // independent check of the analytic lift: compare the projector form
        // on ψ(ξ+h·u) - ψ(ξ) against the coordinate form, ratio → 1 as h → 0
        let point = LiftedCoordinates {
            r: 1.0,
            varphi: 0.0,
            xi: vec![c(0.4, -0.3), c(0.2, 0.6)],
        };
        let u = TangentDisplacement {
            dxi: vec![c(0.7, 0.1), c(-0.2, 0.5)],
        };
        let a = section_state(&point.xi);
        let mut prev_err = f64::INFINITY;
        for h in [1e-2, 1e-3, 1e-4] {
            let moved: Vec<Complex64> = point
                .xi
                .iter()
                .zip(u.dxi.iter())
                .map(|(xi, du)| xi + du * h)
                .collect();
            let b = section_state(&moved);
            let dpsi: Vec<Complex64> = a
                .amplitudes()
                .iter()
                .zip(b.amplitudes().iter())
                .map(|(pa, pb)| pb - pa)
                .collect();
            let fd = fs_projector_form(a.amplitudes(), &dpsi);
            let scaled = TangentDisplacement {
                dxi: u.dxi.iter().map(|z| z * h).collect(),
            };
            let coord = fs_metric_form(&point, &scaled);
            let rel = (fd / coord - 1.0).abs();
            assert!(rel < prev_err, "no convergence at h={h}");
            assert!(rel < 10.0 * h, "rel error {rel} at h={h}");
            prev_err = rel;
        }
    }

    #[test]
    fn connection_examples() {
        let real_point = LiftedCoordinates {
            r: 1.0,
            varphi: 0.0,
            xi: vec![c(0.7, 0.0)],
        };
        let real_d = TangentDisplacement {
            dxi: vec![c(0.3, 0.0)],
        };
        assert_eq!(connection_eval(&real_point, &real_d), 0.0);

        let origin = LiftedCoordinates {
            r: 1.0,
            varphi: 0.0,
            xi: vec![c(0.0, 0.0)],
        };
        let d = TangentDisplacement {
            dxi: vec![c(0.3, -0.9)],
        };
        assert_eq!(connection_eval(&origin, &d), 0.0);
    }

    #[test]
    fn connection_loop_integral_matches_triangle_phase() {
        // Discrete ∮A around the small coordinate triangle ξ0 → ξ0+w → ξ0+u → ξ0
        // (midpoint rule) equals the Pancharatnam phase of (ψ(ξ0), ψ(ξ0+u), ψ(ξ0+w))
        // up to O(h³): the product arg(<a|c><c|b><b|a>) reads as the loop a→c→b→a.
        let xi0 = c(0.5, -0.3);
        let h = 1e-3;
        let u = c(1.0, 0.4) * h;
        let w = c(-0.3, 1.1) * h;

        let a = section_state(&[xi0]);
        let b = section_state(&[xi0 + u]);
        let cc = section_state(&[xi0 + w]);
        let theta = pancharatnam_phase(&a, &b, &cc).unwrap();

        let midpoint_a = |from: Complex64, to: Complex64| {
            let mid = LiftedCoordinates {
                r: 1.0,
                varphi: 0.0,
                xi: vec![(from + to) / 2.0],
            };
            let step = TangentDisplacement {
                dxi: vec![to - from],
            };
            connection_eval(&mid, &step)
        };
        let loop_integral = midpoint_a(xi0, xi0 + w)
            + midpoint_a(xi0 + w, xi0 + u)
            + midpoint_a(xi0 + u, xi0);

        assert!(
            (loop_integral - theta).abs() < 1e-8,
            "loop {loop_integral} vs theta {theta}"
        );
    }

    #[test]
    fn pancharatnam_examples() {
        let a = state_from_bloch(&BlochPoint::new(0.4, 0.9).unwrap());
        assert_eq!(pancharatnam_phase(&a, &a, &a).unwrap(), 0.0);

        // north pole + two equator points separated by γ: Θ = -γ/2
        let north = StateVector::basis(2, 0);
        for gamma in [0.3, 1.0, 2.0] {
            let e0 = state_from_bloch(&BlochPoint::new(FRAC_PI_2, 0.0).unwrap());
            let eg = state_from_bloch(&BlochPoint::new(FRAC_PI_2, gamma).unwrap());
            let theta = pancharatnam_phase(&north, &e0, &eg).unwrap();
            assert!((theta + gamma / 2.0).abs() < 1e-12, "gamma={gamma}");
        }

        // vanishing overlap is loud
        let south = StateVector::basis(2, 1);
        assert!(matches!(
            pancharatnam_phase(&north, &south, &a),
            Err(Error::UndefinedPhase(..))
        ));
    }

    #[test]
    fn pancharatnam_phase_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(300);
        for _ in 0..30 {
            let a = random_state(&mut rng, 3);
            let b = random_state(&mut rng, 3);
            let cc = random_state(&mut rng, 3);
            let base = match pancharatnam_phase(&a, &b, &cc) {
                Ok(t) => t,
                Err(_) => continue,
            };
            let shifted = pancharatnam_phase(
                &a.with_global_phase(rng.random_range(-3.0..3.0)),
                &b.with_global_phase(rng.random_range(-3.0..3.0)),
                &cc.with_global_phase(rng.random_range(-3.0..3.0)),
            )
            .unwrap();
            assert!(crate::wrap_angle(base - shifted).abs() < 1e-12);
        }
    }

    #[test]
    fn solid_angle_examples() {
        let north = BlochPoint::new(0.0, 0.0).unwrap();
        let e0 = BlochPoint::new(FRAC_PI_2, 0.0).unwrap();
        let e90 = BlochPoint::new(FRAC_PI_2, FRAC_PI_2).unwrap();

        // coincident points
        assert_eq!(solid_angle(&north, &north, &e0).unwrap(), 0.0);

        // octant triangle: three right angles
        let oct = solid_angle(&north, &e0, &e90).unwrap();
        assert!((oct - FRAC_PI_2).abs() < 1e-12);

        // swapping two vertices flips the sign
        let swapped = solid_angle(&north, &e90, &e0).unwrap();
        assert!((oct + swapped).abs() < 1e-12);

        // collinear: three points on the equator
        let e1 = BlochPoint::new(FRAC_PI_2, 1.0).unwrap();
        assert_eq!(solid_angle(&e0, &e90, &e1).unwrap(), 0.0);

        // antipodal pair
        let south = BlochPoint::new(PI, 0.0).unwrap();
        assert!(matches!(
            solid_angle(&north, &south, &e0),
            Err(Error::AntipodalPoints)
        ));
    }

    /// Signed-area oracle: the Van Oosterom–Strackee formula
    /// `Ω = 2·atan2(n1·(n2×n3), 1 + n1·n2 + n1·n3 + n2·n3)`.
    fn solid_angle_oracle(p1: &BlochPoint, p2: &BlochPoint, p3: &BlochPoint) -> f64 {
        let a = p1.unit_vector();
        let b = p2.unit_vector();
        let c3 = p3.unit_vector();
        let dot = |x: &[f64; 3], y: &[f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let cross = [
            b[1] * c3[2] - b[2] * c3[1],
            b[2] * c3[0] - b[0] * c3[2],
            b[0] * c3[1] - b[1] * c3[0],
        ];
        let num = dot(&a, &cross);
        let den = 1.0 + dot(&a, &b) + dot(&a, &c3) + dot(&b, &c3);
        2.0 * num.atan2(den)
    }

    #[test]
    fn solid_angle_matches_independent_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let mut checked = 0;
        while checked < 200 {
            let p1 = random_bloch(&mut rng);
            let p2 = random_bloch(&mut rng);
            let p3 = random_bloch(&mut rng);
            match solid_angle(&p1, &p2, &p3) {
                Ok(omega) if omega != 0.0 => {
                    let oracle = solid_angle_oracle(&p1, &p2, &p3);
                    assert!(
                        (omega - oracle).abs() < 1e-10,
                        "excess {omega} vs oracle {oracle}"
                    );
                    checked += 1;
                }
                _ => {}
            }
        }
    }

    #[test]
    fn theta_equals_minus_half_omega() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut checked = 0;
        while checked < 200 {
            let ps = [
                random_bloch(&mut rng),
                random_bloch(&mut rng),
                random_bloch(&mut rng),
            ];
            // keep the battery away from degenerate geometry
            let vs: Vec<[f64; 3]> = ps.iter().map(|p| p.unit_vector()).collect();
            let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            if dot(&vs[0], &vs[1]).abs() > 0.999
                || dot(&vs[0], &vs[2]).abs() > 0.999
                || dot(&vs[1], &vs[2]).abs() > 0.999
            {
                continue;
            }
            let theta = pancharatnam_phase(
                &state_from_bloch(&ps[0]),
                &state_from_bloch(&ps[1]),
                &state_from_bloch(&ps[2]),
            )
            .unwrap();
            let omega = solid_angle(&ps[0], &ps[1], &ps[2]).unwrap();
            let residue = crate::wrap_angle(theta + omega / 2.0).abs();
            assert!(residue < 1e-9, "theta {theta}, omega {omega}");
            checked += 1;
        }
    }

    #[test]
    fn ray_invariance_of_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        for _ in 0..30 {
            let a = random_state(&mut rng, 3);
            let b = random_state(&mut rng, 3);
            let base = fs_distance(&a, &b).unwrap();
            let shifted = fs_distance(
                &a.with_global_phase(rng.random_range(-3.0..3.0)),
                &b.with_global_phase(rng.random_range(-3.0..3.0)),
            )
            .unwrap();
            assert!((base - shifted).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_decomposition_examples() {
        let psi = state_from_bloch(&BlochPoint::new(1.1, 0.4).unwrap());

        // pure phase direction: dψ = iεψ
        let eps = 1e-3;
        let dpsi: Vec<Complex64> = psi.amplitudes().iter().map(|z| c(0.0, eps) * z).collect();
        let parts = sphere_metric_decomposition(&psi, &dpsi).unwrap();
        assert!((parts.phase_part - eps * eps).abs() < 1e-18);
        assert!(parts.fs_part.abs() < 1e-18);

        // orthogonal direction: no phase part
        let orth = state_from_bloch(&BlochPoint::new(PI - 1.1, 0.4 + PI).unwrap());
        let dpsi: Vec<Complex64> = orth.amplitudes().iter().map(|z| z * eps).collect();
        let parts = sphere_metric_decomposition(&psi, &dpsi).unwrap();
        assert!(parts.phase_part < 1e-20);
        assert!((parts.fs_part - parts.total).abs() < 1e-18);

        // random tangent: parts always sum to the total
        let mut rng = ChaCha8Rng::seed_from_u64(121);
        for _ in 0..20 {
            let psi = random_state(&mut rng, 4);
            let dpsi: Vec<Complex64> = (0..4)
                .map(|_| c(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1)))
                .collect();
            let parts = sphere_metric_decomposition(&psi, &dpsi).unwrap();
            assert!((parts.phase_part + parts.fs_part - parts.total).abs() < 1e-15);
        }
    }

    #[test]
    fn finite_distance_approaches_metric_form() {
        // move along the tangent lift of the displacement; the ratio of the
        // finite distance to sqrt(ds²) then converges to 1 at second order
        let point = LiftedCoordinates {
            r: 1.0,
            varphi: 0.0,
            xi: vec![c(0.3, 0.5)],
        };
        let u = TangentDisplacement {
            dxi: vec![c(0.8, -0.6)],
        };
        let (psi, dpsi) = lift_displacement(&point, &u);
        let a = StateVector::new(psi.clone()).unwrap();
        let form_unit = fs_metric_form(&point, &u).sqrt();
        for h in [1e-2, 1e-3, 1e-4] {
            let moved: Vec<Complex64> = psi
                .iter()
                .zip(dpsi.iter())
                .map(|(p, d)| p + d * h)
                .collect();
            let b = StateVector::normalized(moved).unwrap();
            let dist = fs_distance(&a, &b).unwrap();
            let rel = (dist / (h * form_unit) - 1.0).abs();
            assert!(rel < 10.0 * h * h, "rel {rel} at h={h}");
        }
    }

    #[test]
    fn stereographic_roundtrip_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let theta = rng.random_range(0.0..2.9);
            let phi = rng.random_range(-PI..PI);
            let p = BlochPoint::new(theta, phi).unwrap();
            let pc = projective_coords(&state_from_bloch(&p)).unwrap();
            let expect = c(0.0, phi).exp() * (theta / 2.0).tan();
            assert!((pc.xi[0] - expect).norm() < 1e-10);
        }
    }
}
