//! Hamiltonian dynamics in the Bloch and probability-vector pictures.
//!
//! With ħ = 1 the Bloch generator is `h[n][m] = -(i/N) Tr[λ_m [λ_n, H]]`,
//! so that `d⟨λ_n⟩/dt = Σ_m h[n][m] ⟨λ_m⟩`. The transfer matrix acts on
//! probability vectors:
//!
//! `H[(n,k),(m,l)] = λ_m(l) / (N i) · Tr[λ_m [P_n(k), H]]`
//!
//! and `p(t) = exp(t H) p(0)` is evaluated by scaling and squaring.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{NsitError, Result};
use crate::gellmann::GeneratorBasis;
use crate::linalg::{self, c, commutator, ensure_hermitian, trace_product, CMatrix, I};
use crate::states::{BlochVector, DensityMatrix, ProbabilityVector};

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    matrix: CMatrix,
    field: Option<[f64; 3]>,
}

impl HamiltonianSpec {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() < 2 {
            return Err(NsitError::InvalidDimension(matrix.nrows()));
        }
        ensure_hermitian(&matrix, 1e-10)?;
        Ok(HamiltonianSpec {
            matrix,
            field: None,
        })
    }

    /// `H = (Bx σx + By σy + Bz σz) / 2`.
    pub fn qubit_field(b: [f64; 3]) -> Result<Self> {
        if b.iter().any(|x| !x.is_finite()) {
            return Err(NsitError::NonFinite("field"));
        }
        let [bx, by, bz] = b;
        let matrix = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(bz / 2.0),
                c(bx / 2.0) - I * (by / 2.0),
                c(bx / 2.0) + I * (by / 2.0),
                c(-bz / 2.0),
            ],
        );
        Ok(HamiltonianSpec {
            matrix,
            field: Some(b),
        })
    }

    /// Random Hermitian matrix `(G + G†) / 2` with complex Gaussian `G`.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            num_complex::Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        HamiltonianSpec {
            matrix: (&g + g.adjoint()) * c(0.5),
            field: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn field(&self) -> Option<[f64; 3]> {
        self.field
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

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(NsitError::NonFinite("time"));
    }
    Ok(())
}

/// Real antisymmetric generator of Bloch-vector dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochGenerator {
    dim: usize,
    matrix: DMatrix<f64>,
}

impl BlochGenerator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

pub fn bloch_generator(h: &HamiltonianSpec, basis: &GeneratorBasis) -> Result<BlochGenerator> {
    check_dim(basis, h.dim())?;
    let count = basis.len();
    let dim = basis.dim() as f64;
    let mut matrix = DMatrix::zeros(count, count);
    for n in 0..count {
        let comm = commutator(basis.generator(n), &h.matrix);
        for m in 0..count {
            // -(i/N) Tr[λ_m C] is real because C is anti-Hermitian.
            matrix[(n, m)] = (trace_product(basis.generator(m), &comm) * (-I)).re / dim;
        }
    }
    Ok(BlochGenerator {
        dim: basis.dim(),
        matrix,
    })
}

/// Real generator of probability-vector dynamics, rows and columns indexed
/// generator-major like [`ProbabilityVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    dim: usize,
    matrix: DMatrix<f64>,
}

impl TransferMatrix {
    pub fn new(dim: usize, matrix: DMatrix<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(NsitError::InvalidDimension(dim));
        }
        let size = dim * (dim * dim - 1);
        if matrix.nrows() != size || matrix.ncols() != size {
            return Err(NsitError::DimensionMismatch {
                expected: size,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(NsitError::NonFinite("transfer matrix"));
        }
        Ok(TransferMatrix { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `exp(t H)`.
    pub fn propagator(&self, t: f64) -> Result<DMatrix<f64>> {
        check_time(t)?;
        Ok(linalg::expm(&(&self.matrix * t)))
    }

    /// `dp/dt = H p`.
    pub fn derivative(&self, p: &ProbabilityVector) -> Result<ProbabilityVector> {
        self.check_vector(p)?;
        let out = &self.matrix * DVector::from_column_slice(p.as_slice());
        Ok(ProbabilityVector::from_raw(self.dim, out.as_slice().to_vec()))
    }

    /// Largest column sum within a tuple block. Zero means `Σ_k p_n(k)` is
    /// conserved for every starting vector.
    pub fn conservation_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        let dim = self.dim;
        for block in 0..self.matrix.nrows() / dim {
            for col in 0..self.matrix.ncols() {
                let s: f64 = (0..dim).map(|k| self.matrix[(block * dim + k, col)]).sum();
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    pub(crate) fn check_vector(&self, p: &ProbabilityVector) -> Result<()> {
        if p.dim() != self.dim {
            return Err(NsitError::DimensionMismatch {
                expected: self.dim,
                actual: p.dim(),
            });
        }
        Ok(())
    }
}

pub fn transfer_matrix(h: &HamiltonianSpec, basis: &GeneratorBasis) -> Result<TransferMatrix> {
    check_dim(basis, h.dim())?;
    let dim = basis.dim();
    let count = basis.len();
    let size = basis.vector_len();
    // Tr[λ_m [P, H]] = ⟨v|[H, λ_m]|v⟩ for P = |v⟩⟨v|; A_m = -i [H, λ_m] is
    // Hermitian so the entry is λ_m(l) ⟨v|A_m|v⟩ / N.
    let a: Vec<CMatrix> = basis
        .generators()
        .iter()
        .map(|g| commutator(&h.matrix, g) * (-I))
        .collect();
    let mut matrix = DMatrix::zeros(size, size);
    for n in 0..count {
        for k in 0..dim {
            let ket = basis.sparse_eigenvector(n, k);
            let row = n * dim + k;
            for (m, am) in a.iter().enumerate() {
                let base = ket.expectation(am) / dim as f64;
                if base == 0.0 {
                    continue;
                }
                for (l, &lambda) in basis.eigenvalues(m).iter().enumerate() {
                    matrix[(row, m * dim + l)] = lambda * base;
                }
            }
        }
    }
    Ok(TransferMatrix { dim, matrix })
}

/// `exp(t H) p0`.
pub fn evolve_probabilities(
    p0: &ProbabilityVector,
    h: &TransferMatrix,
    t: f64,
) -> Result<ProbabilityVector> {
    h.check_vector(p0)?;
    let u = h.propagator(t)?;
    Ok(apply(&u, p0))
}

pub(crate) fn apply(u: &DMatrix<f64>, p: &ProbabilityVector) -> ProbabilityVector {
    let out = u * DVector::from_column_slice(p.as_slice());
    ProbabilityVector::from_raw(p.dim(), out.as_slice().to_vec())
}

/// Reference evolution `e^{-iHt} ρ e^{iHt}` through the eigen-decomposition
/// of `H`.
pub fn evolve_density_oracle(
    rho0: &DensityMatrix,
    h: &HamiltonianSpec,
    t: f64,
) -> Result<DensityMatrix> {
    check_time(t)?;
    if rho0.dim() != h.dim() {
        return Err(NsitError::DimensionMismatch {
            expected: h.dim(),
            actual: rho0.dim(),
        });
    }
    let (values, vectors) = linalg::hermitian_eigh(&h.matrix);
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|e| (-I * (e * t)).exp()),
    ));
    let u = &vectors * phases * vectors.adjoint();
    let rho = &u * rho0.matrix() * u.adjoint();
    Ok(DensityMatrix::from_raw((&rho + rho.adjoint()) * c(0.5)))
}

/// `exp(t h) v0`.
pub fn evolve_bloch(v0: &BlochVector, h: &BlochGenerator, t: f64) -> Result<BlochVector> {
    check_time(t)?;
    if v0.dim() != h.dim {
        return Err(NsitError::DimensionMismatch {
            expected: h.dim,
            actual: v0.dim(),
        });
    }
    let u = linalg::expm(&(&h.matrix * t));
    let out = u * DVector::from_column_slice(v0.coords());
    BlochVector::new(h.dim, out.as_slice().to_vec())
}
