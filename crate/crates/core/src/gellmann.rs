//! Generalized Gell-Mann generators of SU(N), normalized so that
//! `Tr[λ_n λ_m] = N δ_nm`, together with their spectral data.
//!
//! Generator order: symmetric off-diagonal elements for each pair `j < k`
//! (lexicographic), then the antisymmetric ones in the same pair order, then
//! the `N - 1` diagonal elements. For `N = 2` this yields `σx, σy, σz`.
//!
//! Every generator is stored with `N` rank-1 projectors. Eigenvalues are
//! sorted in descending order; degenerate eigenvalues keep the order of the
//! computational-basis index of their eigenvector, so the projector layout
//! is fully deterministic.

use num_complex::Complex64;

use crate::error::{NsitError, Result};
use crate::linalg::{c, commutator, hermiticity_defect, max_abs, trace_product, CMatrix, CVector, I};

/// Eigenvector with only its nonzero entries stored; off-diagonal generators
/// have eigenvectors with at most two nonzero components.
#[derive(Debug, Clone)]
pub(crate) struct SparseKet {
    entries: Vec<(usize, Complex64)>,
}

impl SparseKet {
    fn dense(&self, dim: usize) -> CVector {
        let mut v = CVector::zeros(dim);
        for &(i, z) in &self.entries {
            v[i] = z;
        }
        v
    }

    /// ⟨v|M|v⟩, real part.
    pub(crate) fn expectation(&self, m: &CMatrix) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(i, zi) in &self.entries {
            for &(j, zj) in &self.entries {
                acc += zi.conj() * m[(i, j)] * zj;
            }
        }
        acc.re
    }
}

/// Structure constants `f[a][b][c]` with `[λ_a, λ_b] = i Σ_c f[a][b][c] λ_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    count: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.count + b) * self.count + c]
    }

    /// The slice `f[a][b][..]`.
    pub fn row(&self, a: usize, b: usize) -> &[f64] {
        let start = (a * self.count + b) * self.count;
        &self.data[start..start + self.count]
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    dim: usize,
    generators: Vec<CMatrix>,
    eigenvalues: Vec<Vec<f64>>,
    eigenvectors: Vec<Vec<SparseKet>>,
    projectors: Vec<Vec<CMatrix>>,
    structure: StructureConstants,
}

/// Builds the scaled basis for `dim >= 2`.
pub fn build_basis(dim: usize) -> Result<GeneratorBasis> {
    if dim < 2 {
        return Err(NsitError::InvalidDimension(dim));
    }
    let scale = (dim as f64 / 2.0).sqrt();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let count = dim * dim - 1;

    let mut generators = Vec::with_capacity(count);
    // (eigenvalue, tie-break index, eigenvector) before sorting
    let mut spectra: Vec<Vec<(f64, usize, SparseKet)>> = Vec::with_capacity(count);

    let rest = |j: usize, k: usize| -> Vec<(f64, usize, SparseKet)> {
        (0..dim)
            .filter(|&i| i != j && i != k)
            .map(|i| {
                (
                    0.0,
                    i,
                    SparseKet {
                        entries: vec![(i, c(1.0))],
                    },
                )
            })
            .collect()
    };

    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut g = CMatrix::zeros(dim, dim);
            g[(j, k)] = c(scale);
            g[(k, j)] = c(scale);
            generators.push(g);
            let mut spec = vec![
                (
                    scale,
                    j,
                    SparseKet {
                        entries: vec![(j, c(inv_sqrt2)), (k, c(inv_sqrt2))],
                    },
                ),
                (
                    -scale,
                    k,
                    SparseKet {
                        entries: vec![(j, c(inv_sqrt2)), (k, c(-inv_sqrt2))],
                    },
                ),
            ];
            spec.extend(rest(j, k));
            spectra.push(spec);
        }
    }
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut g = CMatrix::zeros(dim, dim);
            g[(j, k)] = -I * scale;
            g[(k, j)] = I * scale;
            generators.push(g);
            let mut spec = vec![
                (
                    scale,
                    j,
                    SparseKet {
                        entries: vec![(j, c(inv_sqrt2)), (k, I * inv_sqrt2)],
                    },
                ),
                (
                    -scale,
                    k,
                    SparseKet {
                        entries: vec![(j, c(inv_sqrt2)), (k, -I * inv_sqrt2)],
                    },
                ),
            ];
            spec.extend(rest(j, k));
            spectra.push(spec);
        }
    }
    for l in 1..dim {
        let a = scale * (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut g = CMatrix::zeros(dim, dim);
        let mut spec = Vec::with_capacity(dim);
        for m in 0..dim {
            let value = match m.cmp(&l) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Equal => -(l as f64) * a,
                std::cmp::Ordering::Greater => 0.0,
            };
            g[(m, m)] = c(value);
            spec.push((
                value,
                m,
                SparseKet {
                    entries: vec![(m, c(1.0))],
                },
            ));
        }
        generators.push(g);
        spectra.push(spec);
    }

    let mut eigenvalues = Vec::with_capacity(count);
    let mut eigenvectors = Vec::with_capacity(count);
    let mut projectors = Vec::with_capacity(count);
    for mut spec in spectra {
        spec.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        eigenvalues.push(spec.iter().map(|s| s.0).collect());
        projectors.push(
            spec.iter()
                .map(|s| {
                    let v = s.2.dense(dim);
                    &v * v.adjoint()
                })
                .collect(),
        );
        eigenvectors.push(spec.into_iter().map(|s| s.2).collect());
    }

    let structure = compute_structure(dim, &generators);
    Ok(GeneratorBasis {
        dim,
        generators,
        eigenvalues,
        eigenvectors,
        projectors,
        structure,
    })
}

fn compute_structure(dim: usize, generators: &[CMatrix]) -> StructureConstants {
    let count = generators.len();
    let mut data = vec![0.0; count * count * count];
    let norm = dim as f64;
    for a in 0..count {
        for b in (a + 1)..count {
            let comm = commutator(&generators[a], &generators[b]);
            if max_abs(&comm) == 0.0 {
                continue;
            }
            for (cc, g) in generators.iter().enumerate() {
                // (1 / iN) Tr[[λa, λb] λc]
                let value = (trace_product(&comm, g) / (I * norm)).re;
                data[(a * count + b) * count + cc] = value;
                data[(b * count + a) * count + cc] = -value;
            }
        }
    }
    StructureConstants { count, data }
}

/// Structure constants `(1/(iN)) Tr[[λa, λb] λc]` of a basis, evaluated
/// from its generators.
pub fn structure_constants(basis: &GeneratorBasis) -> StructureConstants {
    compute_structure(basis.dim, &basis.generators)
}

impl GeneratorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators, `N² - 1`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Length of a probability vector, `N (N² - 1)`.
    pub fn vector_len(&self) -> usize {
        self.dim * self.generators.len()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn generator(&self, n: usize) -> &CMatrix {
        &self.generators[n]
    }

    /// Eigenvalues of generator `n`, descending.
    pub fn eigenvalues(&self, n: usize) -> &[f64] {
        &self.eigenvalues[n]
    }

    pub fn projectors(&self, n: usize) -> &[CMatrix] {
        &self.projectors[n]
    }

    pub fn projector(&self, n: usize, k: usize) -> &CMatrix {
        &self.projectors[n][k]
    }

    pub fn eigenvector(&self, n: usize, k: usize) -> CVector {
        self.eigenvectors[n][k].dense(self.dim)
    }

    pub(crate) fn sparse_eigenvector(&self, n: usize, k: usize) -> &SparseKet {
        &self.eigenvectors[n][k]
    }

    pub fn structure(&self) -> &StructureConstants {
        &self.structure
    }
}

/// Largest residual observed for each basis invariant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BasisReport {
    pub hermiticity: f64,
    pub tracelessness: f64,
    pub orthonormalization: f64,
    pub spectral_reconstruction: f64,
    pub projector_completeness: f64,
    pub projector_orthogonality: f64,
    pub closure: f64,
    pub structure_antisymmetry: f64,
    pub structure_imaginary: f64,
}

impl BasisReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.hermiticity,
            self.tracelessness,
            self.orthonormalization,
            self.spectral_reconstruction,
            self.projector_completeness,
            self.projector_orthogonality,
            self.closure,
            self.structure_antisymmetry,
            self.structure_imaginary,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Checks the residuals against the construction (1e-10 / 1e-12) and
    /// closure (1e-9) tolerances.
    pub fn within_tolerances(&self) -> bool {
        self.hermiticity <= 1e-12
            && self.tracelessness <= 1e-12
            && self.orthonormalization <= 1e-10
            && self.spectral_reconstruction <= 1e-10
            && self.projector_completeness <= 1e-10
            && self.projector_orthogonality <= 1e-10
            && self.closure <= 1e-9
            && self.structure_antisymmetry <= 1e-10
            && self.structure_imaginary <= 1e-10
    }
}

/// Measures every basis invariant. Never mutates the basis.
pub fn verify_basis(basis: &GeneratorBasis) -> BasisReport {
    let dim = basis.dim;
    let count = basis.len();
    let identity = CMatrix::identity(dim, dim);
    let mut r = BasisReport {
        hermiticity: 0.0,
        tracelessness: 0.0,
        orthonormalization: 0.0,
        spectral_reconstruction: 0.0,
        projector_completeness: 0.0,
        projector_orthogonality: 0.0,
        closure: 0.0,
        structure_antisymmetry: 0.0,
        structure_imaginary: 0.0,
    };

    for (n, g) in basis.generators.iter().enumerate() {
        r.hermiticity = r.hermiticity.max(hermiticity_defect(g));
        r.tracelessness = r.tracelessness.max(g.trace().norm());
        for (m, h) in basis.generators.iter().enumerate() {
            let expected = if n == m { dim as f64 } else { 0.0 };
            let dev = (trace_product(g, h) - c(expected)).norm();
            r.orthonormalization = r.orthonormalization.max(dev);
        }

        let projectors = &basis.projectors[n];
        let mut recon = CMatrix::zeros(dim, dim);
        let mut total = CMatrix::zeros(dim, dim);
        for (k, p) in projectors.iter().enumerate() {
            recon += p * c(basis.eigenvalues[n][k]);
            total += p;
            for (k2, p2) in projectors.iter().enumerate() {
                let prod = p * p2;
                let dev = if k == k2 {
                    max_abs(&(prod - p))
                } else {
                    max_abs(&prod)
                };
                r.projector_orthogonality = r.projector_orthogonality.max(dev);
            }
        }
        r.spectral_reconstruction = r.spectral_reconstruction.max(max_abs(&(recon - g)));
        r.projector_completeness = r.projector_completeness.max(max_abs(&(total - &identity)));
    }

    let f = &basis.structure;
    for a in 0..count {
        for b in 0..count {
            let comm = commutator(&basis.generators[a], &basis.generators[b]);
            let mut expansion = CMatrix::zeros(dim, dim);
            for (cc, g) in basis.generators.iter().enumerate() {
                let coeff = f.get(a, b, cc);
                if coeff != 0.0 {
                    expansion += g * (I * coeff);
                }
                let anti = (coeff + f.get(b, a, cc)).abs();
                r.structure_antisymmetry = r.structure_antisymmetry.max(anti);
                if a < b {
                    let raw = trace_product(&comm, g) / (I * dim as f64);
                    r.structure_imaginary = r.structure_imaginary.max(raw.im.abs());
                }
            }
            r.closure = r.closure.max(max_abs(&(comm - expansion)));
        }
    }
    r
}
