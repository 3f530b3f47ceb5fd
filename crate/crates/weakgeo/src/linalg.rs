//! Exact finite-dimensional complex linear algebra: states, observables,
//! density matrices, composite system-meter states, partial traces and
//! matrix functions of Hermitian operators.
//!
//! All quantities are dimensionless (`ħ = 1`). Matrix functions go through an
//! explicit Hermitian eigendecomposition rather than series expansions:
//! dimensions are small (≤ 16 in practice) and exact unitarity matters for
//! long products of evolution operators.
//!
//! Conventions: the dagger conjugates the *left* slot of the inner product,
//! `inner_product(a, b) = <a|b> = Σ conj(a_i)·b_i`.
//!
//! Every type here is immutable after construction and every operation is a
//! pure function, so values can be shared freely across threads.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::pointer::Grid;
use crate::{Error, Result};

/// Construction-time validation tolerance.
pub const VALIDATION_TOL: f64 = 1e-12;
/// Tolerance for derived-quantity assertions (reconstruction, traces, ...).
pub const DERIVED_TOL: f64 = 1e-10;

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A normalized pure state of a finite-dimensional system.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    /// Wrap amplitudes that are already normalized within 1e-12.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::WrongDimension {
                expected: 1,
                got: 0,
            });
        }
        let v = DVector::from_vec(amps);
        let residue = (v.norm_squared() - 1.0).abs();
        if residue > VALIDATION_TOL {
            return Err(Error::NotNormalized(residue));
        }
        Ok(Self { amps: v })
    }

    /// Normalize arbitrary amplitudes.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::WrongDimension {
                expected: 1,
                got: 0,
            });
        }
        let mut v = DVector::from_vec(amps);
        let n = v.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        v /= Complex64::new(n, 0.0);
        Ok(Self { amps: v })
    }

    /// The k-th computational basis state of a `dim`-dimensional system.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        v[k] = Complex64::new(1.0, 0.0);
        Self { amps: v }
    }

    pub(crate) fn from_unitary_image(v: DVector<Complex64>) -> Self {
        debug_assert!((v.norm_squared() - 1.0).abs() < 1e-9);
        Self { amps: v }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub(crate) fn vector(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// The same ray with a different vector representative.
    pub fn with_global_phase(&self, angle: f64) -> Self {
        let phase = Complex64::new(0.0, angle).exp();
        Self {
            amps: &self.amps * phase,
        }
    }
}

/// `<a|b>`, conjugating the first argument.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.amps.dotc(&b.amps))
}

/// A finite-dimensional observable with its spectral decomposition.
///
/// Construction validates Hermiticity entrywise (1e-12), then checks that the
/// computed eigenvector matrix is unitary and reconstructs the input within
/// 1e-10. Degenerate spectra are allowed; eigenvectors are re-orthonormalized
/// within (near-)degenerate blocks so downstream spectral projectors stay
/// exact.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: DMatrix<Complex64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.is_empty() {
            return Err(Error::WrongDimension {
                expected: 1,
                got: 0,
            });
        }
        let asym = max_abs(&(&matrix - matrix.adjoint()));
        if asym > VALIDATION_TOL {
            return Err(Error::NotHermitian(asym));
        }

        let eigen = matrix.clone().symmetric_eigen();
        let n = matrix.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eigen.eigenvalues[i].total_cmp(&eigen.eigenvalues[j]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eigen.eigenvalues[i]).collect();
        let mut eigenvectors = DMatrix::from_fn(n, n, |r, c| eigen.eigenvectors[(r, order[c])]);

        reorthonormalize_degenerate(&eigenvalues, &mut eigenvectors);

        let unit_residual = max_abs(&(eigenvectors.adjoint() * &eigenvectors - DMatrix::identity(n, n)));
        if unit_residual > DERIVED_TOL {
            return Err(Error::NotUnitary(unit_residual));
        }
        let recon = &eigenvectors
            * DMatrix::from_diagonal(&DVector::from_iterator(
                n,
                eigenvalues.iter().map(|&o| Complex64::new(o, 0.0)),
            ))
            * eigenvectors.adjoint();
        let recon_residual = max_abs(&(recon - &matrix));
        if recon_residual > DERIVED_TOL {
            return Err(Error::BadReconstruction(recon_residual));
        }

        Ok(Self {
            matrix,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim)).expect("identity is Hermitian")
    }

    pub fn pauli_x() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Self::new(DMatrix::from_row_slice(2, 2, &[z, one, one, z])).unwrap()
    }

    pub fn pauli_y() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        Self::new(DMatrix::from_row_slice(2, 2, &[z, -i, i, z])).unwrap()
    }

    pub fn pauli_z() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Self::new(DMatrix::from_row_slice(2, 2, &[one, z, z, -one])).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as matrix columns, ordered like
    /// [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, j: usize) -> StateVector {
        StateVector::from_unitary_image(self.eigenvectors.column(j).into_owned())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub(crate) fn apply(&self, psi: &StateVector) -> DVector<Complex64> {
        &self.matrix * psi.vector()
    }
}

/// Gram-Schmidt within clusters of (near-)equal eigenvalues. The solver
/// already returns orthonormal vectors for well-separated eigenvalues, but
/// inside degenerate blocks any basis is valid and may drift off orthonormal.
fn reorthonormalize_degenerate(eigenvalues: &[f64], vectors: &mut DMatrix<Complex64>) {
    let n = eigenvalues.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eigenvalues[end] - eigenvalues[end - 1]).abs() < 1e-9 {
            end += 1;
        }
        if end - start > 1 {
            for c in start..end {
                let mut col = vectors.column(c).into_owned();
                for prev in start..c {
                    let p = vectors.column(prev);
                    let overlap = p.dotc(&col);
                    col -= p.into_owned() * overlap;
                }
                let norm = col.norm();
                if norm > 0.0 {
                    col /= Complex64::new(norm, 0.0);
                }
                vectors.set_column(c, &col);
            }
        }
        start = end;
    }
}

/// `<ψ|O|ψ>`, asserted real within 1e-12.
pub fn expectation(o: &HermitianOperator, psi: &StateVector) -> Result<f64> {
    if o.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: o.dim(),
            right: psi.dim(),
        });
    }
    let val = psi.vector().dotc(&o.apply(psi));
    if val.im.abs() > VALIDATION_TOL {
        return Err(Error::ImaginaryResidue(val.im.abs(), VALIDATION_TOL));
    }
    Ok(val.re)
}

/// `<O²> - <O>²`, clamped to zero against tiny negative rounding.
pub fn variance(o: &HermitianOperator, psi: &StateVector) -> Result<f64> {
    if o.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: o.dim(),
            right: psi.dim(),
        });
    }
    let o_psi = o.apply(psi);
    let second = o_psi.norm_squared();
    let first = psi.vector().dotc(&o_psi).re;
    let var = second - first * first;
    debug_assert!(var > -1e-12);
    Ok(var.max(0.0))
}

/// `e^{-i·s·O}` via the spectral decomposition
/// `V · diag(e^{-i·s·o_j}) · V†`; exactly unitary up to rounding.
pub fn hermitian_exp(o: &HermitianOperator, s: f64) -> DMatrix<Complex64> {
    let n = o.dim();
    let phases = DVector::from_iterator(
        n,
        o.eigenvalues()
            .iter()
            .map(|&oj| Complex64::new(0.0, -s * oj).exp()),
    );
    o.eigenvectors() * DMatrix::from_diagonal(&phases) * o.eigenvectors().adjoint()
}

/// A mixed state: Hermitian, unit trace, positive semi-definite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Full validation: Hermitian within 1e-12, trace 1 within 1e-10,
    /// smallest eigenvalue ≥ -1e-10.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dm = Self::from_gram(matrix)?;
        let min = dm
            .eigenvalues()
            .first()
            .copied()
            .ok_or(Error::WrongDimension {
                expected: 1,
                got: 0,
            })?;
        if min < -DERIVED_TOL {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        Ok(dm)
    }

    /// Checks everything except positivity. Reserved for matrices that are
    /// positive by construction (Gram matrices from partial traces), where an
    /// eigendecomposition would be wasted work at large meter dimensions.
    pub(crate) fn from_gram(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let asym = max_abs(&(&matrix - matrix.adjoint()));
        if asym > VALIDATION_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DERIVED_TOL || trace.im.abs() > DERIVED_TOL {
            return Err(Error::InvalidTrace(trace.re));
        }
        Ok(Self { matrix })
    }

    /// The rank-1 projector `|ψ><ψ|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        let v = psi.vector();
        Self {
            matrix: v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Real spectrum in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eigen = self.matrix.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }
}

/// Which meter family a [`BipartiteState`] is correlated with.
#[derive(Debug, Clone, PartialEq)]
pub enum MeterKind {
    /// Discrete orthonormal meter basis; plain sums in traces.
    FiniteBasis,
    /// Position-grid meter; sums carry the quadrature weight `dx`.
    PositionGrid(Grid),
}

/// A pure joint state of system ⊗ meter with components `C[j][k]`
/// (system index `j`, meter index `k`).
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    components: DMatrix<Complex64>,
    meter: MeterKind,
}

impl BipartiteState {
    pub fn new_finite(components: DMatrix<Complex64>) -> Result<Self> {
        Self::with_kind(components, MeterKind::FiniteBasis)
    }

    pub fn new_on_grid(components: DMatrix<Complex64>, grid: Grid) -> Result<Self> {
        if components.ncols() != grid.len() {
            return Err(Error::DimensionMismatch {
                left: components.ncols(),
                right: grid.len(),
            });
        }
        Self::with_kind(components, MeterKind::PositionGrid(grid))
    }

    fn with_kind(components: DMatrix<Complex64>, meter: MeterKind) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::WrongDimension {
                expected: 1,
                got: 0,
            });
        }
        let state = Self { components, meter };
        let residue = (state.norm_sqr() - 1.0).abs();
        if residue > DERIVED_TOL {
            return Err(Error::NotNormalized(residue));
        }
        Ok(state)
    }

    pub fn system_dim(&self) -> usize {
        self.components.nrows()
    }

    pub fn meter_dim(&self) -> usize {
        self.components.ncols()
    }

    pub fn components(&self) -> &DMatrix<Complex64> {
        &self.components
    }

    pub fn meter_kind(&self) -> &MeterKind {
        &self.meter
    }

    /// Quadrature weight of the meter index: `dx` on a grid, 1 otherwise.
    pub fn meter_weight(&self) -> f64 {
        match &self.meter {
            MeterKind::FiniteBasis => 1.0,
            MeterKind::PositionGrid(g) => g.dx(),
        }
    }

    /// Total squared norm including the grid weight.
    pub fn norm_sqr(&self) -> f64 {
        self.components.norm_squared() * self.meter_weight()
    }

    /// Meter marginal `Σ_j |C[j][k]|²`: the diagonal of the reduced meter
    /// density. On a grid this is the position probability density, with
    /// `Σ_k marginal[k]·dx = 1`.
    pub fn meter_marginal(&self) -> Vec<f64> {
        (0..self.meter_dim())
            .map(|k| self.components.column(k).norm_squared())
            .collect()
    }
}

/// Which factor [`partial_trace`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    System,
    Meter,
}

/// Reduced density matrix of one factor of a pure bipartite state.
///
/// Grid meters use `dx`-weighted summation; the reduced meter matrix is
/// returned in the orthonormal convention `ρ[k][l] = dx·Σ_j C[j][k]·conj(C[j][l])`
/// so that its plain matrix trace is 1.
pub fn partial_trace(state: &BipartiteState, keep: Keep) -> DensityMatrix {
    let c = &state.components;
    let w = Complex64::new(state.meter_weight(), 0.0);
    let matrix = match keep {
        Keep::System => c * c.adjoint() * w,
        Keep::Meter => (c.adjoint() * c).transpose() * w,
    };
    DensityMatrix::from_gram(matrix).expect("partial trace of a normalized pure state")
}

/// Ensemble expectation `tr(ρ·O)`, asserted real within 1e-10.
pub fn ensemble_expectation(rho: &DensityMatrix, o: &HermitianOperator) -> Result<f64> {
    if rho.dim() != o.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: o.dim(),
        });
    }
    let val = (rho.matrix() * o.matrix()).trace();
    if val.im.abs() > DERIVED_TOL {
        return Err(Error::ImaginaryResidue(val.im.abs(), DERIVED_TOL));
    }
    Ok(val.re)
}
