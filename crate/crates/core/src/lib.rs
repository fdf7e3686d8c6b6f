//! Probability-vector representation of N-level quantum dynamics.
//!
//! A state of an N-level system is described by the emergent probabilities
//! of the N² - 1 generalized Gell-Mann observables. Unitary evolution becomes
//! a real linear flow `dp/dt = H p` on these probabilities. Noninvasive
//! measurements collapse one probability tuple while leaving the others
//! intact, which can produce pseudodensity matrices with negative
//! eigenvalues; the sum of their magnitudes is the interference witness γ
//! that signals a violation of no-signaling in time (NSIT).
//!
//! Modules:
//! - [`gellmann`]: scaled SU(N) generator basis with spectral data
//! - [`states`]: density matrices, Bloch vectors, probability vectors
//! - [`dynamics`]: Bloch generator, transfer matrix, time evolution
//! - [`measurement`]: collapse, pseudodensity reconstruction, γ, negativity scans
//! - [`qubit`]: closed-form single-qubit witnesses and the Δ measure
//! - [`classical`]: Monte Carlo classical spin ensembles (an NSIT-satisfying theory)
//! - [`datagen`]: labeled NSIT-conforming / NSIT-violating datasets
//! - [`classifier`]: logistic-regression classifier over probability vectors
//! - [`schema`]: versioned text file formats

pub mod classical;
pub mod classifier;
pub mod datagen;
pub mod dynamics;
pub mod error;
pub mod gellmann;
pub mod linalg;
pub mod measurement;
pub mod qubit;
pub mod schema;
pub mod states;

pub use classical::{Axis, ClassicalMarginals, SpinDistribution, SpinEnsemble};
pub use classifier::{ClassifierModel, FeatureMap, Metrics, TrainConfig};
pub use datagen::{Dataset, GenerationConfig, Label, LabeledExample};
pub use dynamics::{BlochGenerator, HamiltonianSpec, TransferMatrix};
pub use error::{NsitError, Result};
pub use gellmann::{build_basis, BasisReport, GeneratorBasis};
pub use measurement::{MeasurementRecord, ScanReport, WitnessReport};
pub use num_complex::Complex64;
pub use states::{BlochVector, DensityMatrix, ProbabilityVector};
