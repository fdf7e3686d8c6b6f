//! Noninvasive measurements on probability vectors and the interference
//! witness.
//!
//! Measuring generator `n` with outcome `k` replaces tuple `n` by the one-hot
//! tuple at `k` and leaves every other tuple alone. The pseudodensity matrix
//! rebuilt from such a vector need not be positive; the magnitude of its
//! negative spectrum is the witness γ.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::{apply, TransferMatrix};
use crate::error::{NsitError, Result};
use crate::gellmann::GeneratorBasis;
use crate::states::{density_from_bloch, expectations_from_probabilities, DensityMatrix, ProbabilityVector};

/// Eigenvalues below this count towards γ.
pub const GAMMA_THRESHOLD: f64 = -1e-10;
/// Evolved components below this count as negative in a scan.
pub const SCAN_THRESHOLD: f64 = -1e-8;

/// Outcome `k` of generator `n`, both zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub n: usize,
    pub k: usize,
}

impl MeasurementRecord {
    pub fn new(n: usize, k: usize) -> Self {
        MeasurementRecord { n, k }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let generators = dim * dim - 1;
        if self.n >= generators {
            return Err(NsitError::OutOfRange {
                what: "generator",
                index: self.n,
                limit: generators,
            });
        }
        if self.k >= dim {
            return Err(NsitError::OutOfRange {
                what: "outcome",
                index: self.k,
                limit: dim,
            });
        }
        Ok(())
    }
}

pub fn collapse(p: &ProbabilityVector, m: MeasurementRecord) -> Result<ProbabilityVector> {
    m.validate(p.dim())?;
    let mut out = p.clone();
    for (k, x) in out.tuple_mut(m.n).iter_mut().enumerate() {
        *x = if k == m.k { 1.0 } else { 0.0 };
    }
    Ok(out)
}

/// `(I + Σ_n ⟨λ_n⟩' λ_n) / N` with `⟨λ_n⟩' = Σ_k λ_n(k) p'_n(k)`.
pub fn reconstruct_pseudodensity(
    p_post: &ProbabilityVector,
    basis: &GeneratorBasis,
) -> Result<DensityMatrix> {
    let v = expectations_from_probabilities(p_post, basis)?;
    density_from_bloch(&v, basis)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub record: MeasurementRecord,
    pub gamma: f64,
    pub negative_eigenvalues: Vec<f64>,
    /// Pseudodensity spectrum, ascending.
    pub spectrum: Vec<f64>,
}

impl WitnessReport {
    fn from_spectrum(record: MeasurementRecord, spectrum: Vec<f64>) -> Self {
        let negative_eigenvalues: Vec<f64> =
            spectrum.iter().copied().filter(|&e| e < GAMMA_THRESHOLD).collect();
        let gamma = negative_eigenvalues.iter().fold(0.0, |acc, e| acc + e.abs());
        WitnessReport {
            record,
            gamma,
            negative_eigenvalues,
            spectrum,
        }
    }
}

/// Collapse, rebuild the pseudodensity matrix and sum its negative spectrum.
pub fn witness_gamma(
    p: &ProbabilityVector,
    m: MeasurementRecord,
    basis: &GeneratorBasis,
) -> Result<WitnessReport> {
    let post = collapse(p, m)?;
    let rho = reconstruct_pseudodensity(&post, basis)?;
    Ok(WitnessReport::from_spectrum(m, rho.spectrum()))
}

/// γ of an arbitrary Hermitian unit-trace matrix, used for datasets where the
/// pseudodensity matrix is given directly.
pub fn gamma_of_matrix(rho: &DensityMatrix) -> f64 {
    rho.spectrum()
        .into_iter()
        .filter(|&e| e < GAMMA_THRESHOLD)
        .fold(0.0, |acc, e| acc + e.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativeComponent {
    pub t: f64,
    pub n: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub violating: bool,
    /// First grid point with a component below the threshold, and the most
    /// negative component there.
    pub first_negative: Option<NegativeComponent>,
    /// Bisection estimate (to 1e-6) of the time at which the smallest
    /// component first drops below the threshold.
    pub crossing_time: Option<f64>,
    /// Smallest component seen over the whole grid.
    pub min_value: f64,
}

/// Caches `exp(dt H)` for the most recent step so uniform grids cost one
/// exponential.
struct Stepper<'a> {
    h: &'a TransferMatrix,
    dt: f64,
    u: DMatrix<f64>,
}

impl<'a> Stepper<'a> {
    fn new(h: &'a TransferMatrix) -> Self {
        let size = h.matrix().nrows();
        Stepper {
            h,
            dt: 0.0,
            u: DMatrix::identity(size, size),
        }
    }

    fn step(&mut self, p: &ProbabilityVector, dt: f64) -> Result<ProbabilityVector> {
        if (dt - self.dt).abs() > 1e-13 * dt.abs().max(1.0) {
            self.u = self.h.propagator(dt)?;
            self.dt = dt;
        }
        Ok(apply(&self.u, p))
    }
}

/// Evolves `p_post` across `t_grid` and reports the first evolved component
/// below −1e−8.
pub fn negativity_scan(
    p_post: &ProbabilityVector,
    h: &TransferMatrix,
    t_grid: &[f64],
) -> Result<ScanReport> {
    h.check_vector(p_post)?;
    if t_grid.is_empty() {
        return Err(NsitError::EmptyInput("time grid"));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(NsitError::NonFinite("time grid"));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(NsitError::InvalidConfig("time grid must be sorted ascending".into()));
    }

    let mut stepper = Stepper::new(h);
    let mut current = h.propagator(t_grid[0]).map(|u| apply(&u, p_post))?;
    let mut prev: Option<(f64, ProbabilityVector)> = None;
    let mut min_value = f64::INFINITY;
    for (i, &t) in t_grid.iter().enumerate() {
        if i > 0 {
            current = stepper.step(&current, t - t_grid[i - 1])?;
        }
        let (n, k, value) = current.min_component();
        min_value = min_value.min(value);
        if value < SCAN_THRESHOLD {
            let crossing_time = match &prev {
                Some((t0, p0)) => refine_crossing(h, p0, *t0, t)?,
                None => t,
            };
            return Ok(ScanReport {
                violating: true,
                first_negative: Some(NegativeComponent { t, n, k, value }),
                crossing_time: Some(crossing_time),
                min_value,
            });
        }
        prev = Some((t, current.clone()));
    }
    Ok(ScanReport {
        violating: false,
        first_negative: None,
        crossing_time: None,
        min_value,
    })
}

fn refine_crossing(h: &TransferMatrix, p0: &ProbabilityVector, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut p_lo = p0.clone();
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let p_mid = apply(&h.propagator(mid - lo)?, &p_lo);
        if p_mid.min_component().2 < SCAN_THRESHOLD {
            hi = mid;
        } else {
            lo = mid;
            p_lo = p_mid;
        }
    }
    Ok(hi)
}
