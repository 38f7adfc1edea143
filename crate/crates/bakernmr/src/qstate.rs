//! Dense complex linear algebra on 2^N-dimensional registers.
//!
//! Basis convention: Z|0> = +|0>, index j = sum a_k 2^k, and the leftmost
//! Kronecker factor is the most significant qubit.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

pub const UNITARY_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Hermiticity tolerance for density matrices produced by long simulations.
pub const RHO_HERMITIAN_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> Mat {
    Mat::identity(dim, dim)
}

pub fn pauli_x() -> Mat {
    Mat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> Mat {
    Mat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> Mat {
    Mat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// (1/sqrt 2)[[1,1],[1,-1]]
pub fn hadamard() -> Mat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Mat::from_row_slice(2, 2, &[c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.)])
}

/// Two-qubit swap in the computational basis.
pub fn swap2() -> Mat {
    let mut m = Mat::zeros(4, 4);
    m[(0, 0)] = c(1., 0.);
    m[(1, 2)] = c(1., 0.);
    m[(2, 1)] = c(1., 0.);
    m[(3, 3)] = c(1., 0.);
    m
}

fn ensure_square(m: &Mat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

pub fn dagger(m: &Mat) -> Mat {
    m.adjoint()
}

/// Largest entrywise modulus of a matrix.
/// Largest entry modulus; NaN if any entry is NaN.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc: f64, z| {
        let n = z.norm();
        if n.is_nan() || n > acc {
            n
        } else {
            acc
        }
    })
}

pub fn hermitian_deviation(m: &Mat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_deviation(m: &Mat) -> f64 {
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - identity(n)))
}

pub fn trace(m: &Mat) -> C64 {
    m.diagonal().iter().sum()
}

/// Kronecker product with `a` as the most significant factor.
pub fn kron(a: &Mat, b: &Mat) -> Result<Mat> {
    ensure_square(a)?;
    ensure_square(b)?;
    Ok(a.kronecker(b))
}

/// Kronecker product of a list, leftmost most significant.
pub fn kron_all(factors: &[Mat]) -> Result<Mat> {
    let mut out = identity(1);
    for f in factors {
        out = kron(&out, f)?;
    }
    Ok(out)
}

/// Place `op` on the `targets` of a register whose labels are listed in
/// `order` (leftmost = most significant), identity elsewhere.
///
/// The first target is the most significant factor of `op`.
pub fn embed<L: PartialEq + Debug>(op: &Mat, targets: &[L], order: &[L]) -> Result<Mat> {
    let k = targets.len();
    let n = order.len();
    let d = ensure_square(op)?;
    if d != 1 << k {
        return Err(Error::DimensionMismatch { expected: 1 << k, found: d });
    }
    // position (from the most significant end) of each target
    let mut pos = Vec::with_capacity(k);
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].contains(t) {
            return Err(Error::DuplicateLabel(format!("{t:?}")));
        }
        match order.iter().position(|l| l == t) {
            Some(p) => pos.push(p),
            None => return Err(Error::UnknownLabel(format!("{t:?}"))),
        }
    }
    let dim = 1usize << n;
    let bit = |idx: usize, p: usize| (idx >> (n - 1 - p)) & 1;
    let mut out = Mat::zeros(dim, dim);
    for col in 0..dim {
        let sub_col = pos.iter().fold(0, |acc, &p| (acc << 1) | bit(col, p));
        let rest = pos.iter().fold(col, |acc, &p| acc & !(1 << (n - 1 - p)));
        for sub_row in 0..d {
            let v = op[(sub_row, sub_col)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let mut row = rest;
            for (i, &p) in pos.iter().enumerate() {
                if (sub_row >> (k - 1 - i)) & 1 == 1 {
                    row |= 1 << (n - 1 - p);
                }
            }
            out[(row, col)] += v;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
}

impl StateVector {
    /// Checks the dimension and unit norm.
    pub fn new(amps: DVector<C64>) -> Result<Self> {
        let d = amps.len();
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::InvalidDimension(d));
        }
        let n2 = amps.norm_squared();
        if !((n2 - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amps })
    }

    /// Rescales to unit norm.
    pub fn normalized(amps: DVector<C64>) -> Result<Self> {
        let n = amps.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Self::new(amps / C64::new(n, 0.0))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidDimension(dim));
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    /// Tensor product of single-qubit states, leftmost most significant.
    pub fn product(factors: &[StateVector]) -> Result<Self> {
        let mut v = DVector::from_element(1, C64::new(1.0, 0.0));
        for f in factors {
            v = v.kronecker(&f.amps);
        }
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// |<self|other>|^2
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix { m: &self.amps * self.amps.adjoint() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: Mat,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: Mat) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(m)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Only checks shape; callers vouch for the physics.
    pub fn from_matrix_unchecked(m: Mat) -> Result<Self> {
        let d = ensure_square(&m)?;
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: identity(dim) / C64::new(dim as f64, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        let h = hermitian_deviation(&self.m);
        // negated comparisons so NaN entries fail
        if !(h <= RHO_HERMITIAN_TOL) {
            return Err(Error::NotHermitian(h));
        }
        let tr = trace(&self.m);
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return Err(Error::TraceNotOne(tr.re));
        }
        let lo = self.min_eigenvalue();
        if !(lo >= -POSITIVITY_TOL) {
            return Err(Error::NegativeEigenvalue(lo));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn into_matrix(self) -> Mat {
        self.m
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.m + self.m.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn trace(&self) -> C64 {
        trace(&self.m)
    }

    pub fn purity(&self) -> f64 {
        trace(&(&self.m * &self.m)).re
    }

    /// U rho U^dagger
    pub fn conjugate(&self, u: &UnitaryOperator) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.dim() });
        }
        Ok(Self { m: &u.m * &self.m * u.m.adjoint() })
    }

    pub fn entropy_bits(&self) -> Result<f64> {
        von_neumann_entropy_bits(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    m: Mat,
}

impl UnitaryOperator {
    pub fn new(m: Mat) -> Result<Self> {
        ensure_square(&m)?;
        let dev = unitarity_deviation(&m);
        if !(dev <= UNITARY_TOL) {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { m })
    }

    pub(crate) fn from_matrix_unchecked(m: Mat) -> Self {
        Self { m }
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn into_matrix(self) -> Mat {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    /// The operator that applies `self` first, then `next`.
    pub fn then(&self, next: &UnitaryOperator) -> Self {
        Self { m: &next.m * &self.m }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        StateVector::normalized(&self.m * &psi.amps)
    }

    pub fn deviation(&self) -> f64 {
        unitarity_deviation(&self.m)
    }
}

impl Mul for &UnitaryOperator {
    type Output = UnitaryOperator;
    fn mul(self, rhs: &UnitaryOperator) -> UnitaryOperator {
        UnitaryOperator { m: &self.m * &rhs.m }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: Mat,
}

impl HermitianOperator {
    pub fn new(m: Mat) -> Result<Self> {
        ensure_square(&m)?;
        let dev = hermitian_deviation(&m);
        if !(dev <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { m })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: Mat::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    /// Eigenvalues and eigenvectors (columns).
    pub fn eigen(&self) -> (Vec<f64>, Mat) {
        let e = self.m.clone().symmetric_eigen();
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    }
}

/// exp(-i h t) by spectral decomposition.
pub fn expm_hermitian(h: &HermitianOperator, t: f64) -> UnitaryOperator {
    let (vals, vecs) = h.eigen();
    expm_from_eigen(&vals, &vecs, t)
}

/// exp(-i h t) from a precomputed eigendecomposition of h.
pub fn expm_from_eigen(vals: &[f64], vecs: &Mat, t: f64) -> UnitaryOperator {
    let d = vals.len();
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let ph = C64::from_polar(1.0, -l * t);
        for i in 0..d {
            scaled[(i, j)] *= ph;
        }
    }
    UnitaryOperator { m: scaled * vecs.adjoint() }
}

/// Entry (k, j) = exp(2 pi i k j / dim) / sqrt(dim).
pub fn dft_matrix(dim: usize) -> Result<UnitaryOperator> {
    if dim < 1 {
        return Err(Error::InvalidDimension(dim));
    }
    let norm = 1.0 / (dim as f64).sqrt();
    let m = Mat::from_fn(dim, dim, |k, j| {
        // reduce k*j mod dim before forming the angle
        let kj = (k * j) % dim;
        C64::from_polar(norm, 2.0 * PI * kj as f64 / dim as f64)
    });
    Ok(UnitaryOperator { m })
}

/// Entropy in bits from a list of eigenvalues, with the clamp window applied.
pub fn entropy_from_eigenvalues(vals: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in vals {
        if !(l >= -POSITIVITY_TOL) {
            return Err(Error::NegativeEigenvalue(l));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s)
}

pub fn von_neumann_entropy_bits(rho: &DensityMatrix) -> Result<f64> {
    entropy_from_eigenvalues(&rho.eigenvalues())
}

/// 1 - |tr(u^dagger v)| / dim
pub fn phase_invariant_distance(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    // tr(u^dagger v) as an entrywise sum
    let tr: C64 = u.m.iter().zip(v.m.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok((1.0 - tr.norm() / u.dim() as f64).max(0.0))
}
