//! Density matrices, Bloch vectors and probability vectors, and the
//! conversions between them.
//!
//! Probability vectors are laid out generator-major: the `N` emergent
//! probabilities `p_n(1..N)` of generator `n` are contiguous, in the
//! descending eigenvalue order of [`GeneratorBasis::eigenvalues`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NsitError, Result};
use crate::gellmann::GeneratorBasis;
use crate::linalg::{self, c, ensure_hermitian, trace_product, CMatrix, CVector};

/// Hermitian unit-trace matrix. Positivity is not required, so the same
/// type carries pseudodensity matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        ensure_hermitian(&matrix, 1e-10)?;
        let tr = matrix.trace();
        if (tr - c(1.0)).norm() > 1e-10 {
            return Err(NsitError::NotUnitTrace(tr.re));
        }
        Ok(DensityMatrix { matrix })
    }

    pub(crate) fn from_raw(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(dim, dim) * c(1.0 / dim as f64),
        }
    }

    /// `|ψ⟩⟨ψ|` for a ket, normalized first.
    pub fn from_ket(ket: &CVector) -> Result<Self> {
        let norm = ket.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(NsitError::NonFinite("ket"));
        }
        let v = ket / c(norm);
        Ok(DensityMatrix {
            matrix: &v * v.adjoint(),
        })
    }

    /// `Σ_m w_m |f_m⟩⟨f_m|` for the columns `f_m` of `frame`. The weights must
    /// sum to one but may be negative.
    pub fn from_spectrum(frame: &CMatrix, weights: &[f64]) -> Result<Self> {
        let dim = frame.nrows();
        if frame.ncols() != weights.len() {
            return Err(NsitError::DimensionMismatch {
                expected: frame.ncols(),
                actual: weights.len(),
            });
        }
        let mut m = CMatrix::zeros(dim, dim);
        for (col, &w) in frame.column_iter().zip(weights) {
            m += col * col.adjoint() * c(w);
        }
        DensityMatrix::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Tr[ρ²].
    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).re
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }
}

/// Expectation values `⟨λ_n⟩` of all `N² - 1` generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    dim: usize,
    coords: Vec<f64>,
}

impl BlochVector {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(NsitError::InvalidDimension(dim));
        }
        if coords.len() != dim * dim - 1 {
            return Err(NsitError::DimensionMismatch {
                expected: dim * dim - 1,
                actual: coords.len(),
            });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(NsitError::NonFinite("Bloch vector"));
        }
        Ok(BlochVector { dim, coords })
    }

    pub fn zeros(dim: usize) -> Self {
        BlochVector {
            dim,
            coords: vec![0.0; dim * dim - 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm_squared(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum()
    }

    pub fn dot(&self, other: &BlochVector) -> Result<f64> {
        if self.dim != other.dim {
            return Err(NsitError::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        Ok(self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum())
    }
}

impl std::ops::Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        BlochVector {
            dim: self.dim,
            coords: self.coords.into_iter().map(|x| -x).collect(),
        }
    }
}

/// Emergent probabilities `p_n(k)` for all generators, flattened.
///
/// Components are allowed to be negative: evolved postmeasurement vectors
/// can leave the probability simplex, which is exactly what the negativity
/// scan looks for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    dim: usize,
    data: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(NsitError::InvalidDimension(dim));
        }
        let expected = dim * (dim * dim - 1);
        if data.len() != expected {
            return Err(NsitError::DimensionMismatch {
                expected,
                actual: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(NsitError::NonFinite("probability vector"));
        }
        Ok(ProbabilityVector { dim, data })
    }

    pub fn from_tuples(dim: usize, tuples: &[Vec<f64>]) -> Result<Self> {
        if tuples.iter().any(|t| t.len() != dim) {
            return Err(NsitError::Malformed(format!(
                "every probability tuple must have {dim} entries"
            )));
        }
        ProbabilityVector::new(dim, tuples.concat())
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<f64>) -> Self {
        ProbabilityVector { dim, data }
    }

    /// The vector with every tuple uniform, i.e. that of `I/N`.
    pub fn uniform(dim: usize) -> Self {
        ProbabilityVector {
            dim,
            data: vec![1.0 / dim as f64; dim * (dim * dim - 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_tuples(&self) -> usize {
        self.dim * self.dim - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn tuple(&self, n: usize) -> &[f64] {
        &self.data[n * self.dim..(n + 1) * self.dim]
    }

    pub(crate) fn tuple_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.data[n * self.dim..(n + 1) * self.dim]
    }

    pub fn tuples(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim)
    }

    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.data[n * self.dim + k]
    }

    pub fn max_tuple_sum_error(&self) -> f64 {
        self.tuples()
            .map(|t| (t.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Errors if any tuple sum is further than `tol` from one.
    pub fn check_tuple_sums(&self, tol: f64) -> Result<()> {
        for (n, t) in self.tuples().enumerate() {
            let sum: f64 = t.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(NsitError::InconsistentTuples { tuple: n, sum });
            }
        }
        Ok(())
    }

    /// Smallest component with its `(n, k)` position.
    pub fn min_component(&self) -> (usize, usize, f64) {
        let (idx, &value) = self
            .data
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("probability vectors are never empty");
        (idx / self.dim, idx % self.dim, value)
    }
}

fn check_dim(basis: &GeneratorBasis, actual: usize) -> Result<()> {
    if basis.dim() != actual {
        return Err(NsitError::DimensionMismatch {
            expected: basis.dim(),
            actual,
        });
    }
    Ok(())
}

/// `⟨λ_n⟩ = Tr[λ_n ρ]`.
pub fn bloch_from_density(rho: &DensityMatrix, basis: &GeneratorBasis) -> Result<BlochVector> {
    check_dim(basis, rho.dim())?;
    let coords = basis
        .generators()
        .iter()
        .map(|g| trace_product(g, &rho.matrix).re)
        .collect();
    Ok(BlochVector {
        dim: basis.dim(),
        coords,
    })
}

/// `ρ = (I + Σ_n ⟨λ_n⟩ λ_n) / N`.
pub fn density_from_bloch(v: &BlochVector, basis: &GeneratorBasis) -> Result<DensityMatrix> {
    check_dim(basis, v.dim)?;
    if v.coords.iter().any(|x| !x.is_finite()) {
        return Err(NsitError::NonFinite("Bloch vector"));
    }
    let dim = basis.dim();
    let mut m = CMatrix::identity(dim, dim);
    for (g, &x) in basis.generators().iter().zip(&v.coords) {
        if x != 0.0 {
            m += g * c(x);
        }
    }
    Ok(DensityMatrix::from_raw(m * c(1.0 / dim as f64)))
}

/// `p_n(k) = Tr[P_n(k) ρ]`.
pub fn probability_vector_from_density(
    rho: &DensityMatrix,
    basis: &GeneratorBasis,
) -> Result<ProbabilityVector> {
    check_dim(basis, rho.dim())?;
    Ok(probabilities_of_matrix(&rho.matrix, basis))
}

pub(crate) fn probabilities_of_matrix(m: &CMatrix, basis: &GeneratorBasis) -> ProbabilityVector {
    let dim = basis.dim();
    let mut data = Vec::with_capacity(basis.vector_len());
    for n in 0..basis.len() {
        for k in 0..dim {
            data.push(basis.sparse_eigenvector(n, k).expectation(m));
        }
    }
    ProbabilityVector { dim, data }
}

/// `⟨λ_n⟩ = Σ_k λ_n(k) p_n(k)`. Tuples must sum to one within 1e-6.
pub fn expectations_from_probabilities(
    p: &ProbabilityVector,
    basis: &GeneratorBasis,
) -> Result<BlochVector> {
    check_dim(basis, p.dim)?;
    p.check_tuple_sums(1e-6)?;
    Ok(expectations_unchecked(p, basis))
}

pub(crate) fn expectations_unchecked(p: &ProbabilityVector, basis: &GeneratorBasis) -> BlochVector {
    let coords = p
        .tuples()
        .enumerate()
        .map(|(n, t)| t.iter().zip(basis.eigenvalues(n)).map(|(p, l)| p * l).sum())
        .collect();
    BlochVector { dim: p.dim, coords }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochNorm {
    pub norm_squared: f64,
    pub within_ball: bool,
}

/// Generalized Bloch-ball test `Σ ⟨λ_n⟩² ≤ N - 1`.
pub fn bloch_norm_check(v: &BlochVector) -> BlochNorm {
    let norm_squared = v.norm_squared();
    BlochNorm {
        norm_squared,
        within_ball: norm_squared <= (v.dim - 1) as f64 + 1e-9,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Positivity {
    pub min_eigenvalue: f64,
    pub is_quantum: bool,
}

pub fn positivity_check(rho: &DensityMatrix) -> Positivity {
    let min_eigenvalue = rho.spectrum()[0];
    Positivity {
        min_eigenvalue,
        is_quantum: min_eigenvalue >= -1e-9,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Overlap {
    pub dot: f64,
    pub satisfied: bool,
}

/// Necessary condition `λ1 · λ2 ≥ -1` for two Bloch vectors to both be
/// quantum states (it is `Tr[ρ1 ρ2] ≥ 0`).
pub fn overlap_condition(v1: &BlochVector, v2: &BlochVector) -> Result<Overlap> {
    let dot = v1.dot(v2)?;
    Ok(Overlap {
        dot,
        satisfied: dot >= -1.0 - 1e-9,
    })
}

/// Random ket with independent standard-normal real and imaginary parts.
pub fn random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    use rand_distr::StandardNormal;
    CVector::from_fn(dim, |_, _| {
        num_complex::Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::from_ket(&random_ket(dim, rng)).expect("a Gaussian ket is nonzero")
}

/// Mixed state with a random Gram-Schmidt frame and a uniformly drawn
/// simplex spectrum.
pub fn random_mixed_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let frame = crate::datagen::random_frame(dim, rng).expect("frame sampling");
    let spectrum = crate::datagen::simplex_spectrum(dim, rng);
    DensityMatrix::from_spectrum(&frame, &spectrum).expect("valid spectrum")
}
