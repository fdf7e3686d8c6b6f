//! Classical spin ensembles, the NSIT-satisfying reference theory.
//!
//! Each spin obeys `dS/dt = M S` with
//!
//! ```text
//!     [  0   Bz  -By ]
//! M = [ -Bz  0    Bx ]
//!     [  By -Bx   0  ]
//! ```
//!
//! i.e. `dS/dt = S × B`, a rigid rotation about `B` at rate `|B|`. Samples are
//! rotated exactly (Rodrigues formula). Measuring the sign of `S_a` keeps the
//! samples with `ε(S_a) = s`, where `ε(x) = +1` for `x ≥ 0`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NsitError, Result};

/// Samples drawn from one ChaCha stream; chunking keeps ensembles identical
/// however the chunks are scheduled.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpinDistribution {
    UniformOnSphere { radius: f64 },
    IsotropicGaussian { sigma: f64 },
    PointMass { spin: [f64; 3] },
}

impl SpinDistribution {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            SpinDistribution::UniformOnSphere { radius } => radius.is_finite() && radius >= 0.0,
            SpinDistribution::IsotropicGaussian { sigma } => sigma.is_finite() && sigma > 0.0,
            SpinDistribution::PointMass { spin } => spin.iter().all(|x| x.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(NsitError::InvalidConfig(format!("bad parameters for {self}")))
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        match *self {
            SpinDistribution::UniformOnSphere { radius } => {
                let u: [f64; 3] = UnitSphere.sample(rng);
                u.map(|x| x * radius)
            }
            SpinDistribution::IsotropicGaussian { sigma } => {
                let normal = Normal::new(0.0, sigma).expect("validated sigma");
                [normal.sample(rng), normal.sample(rng), normal.sample(rng)]
            }
            SpinDistribution::PointMass { spin } => spin,
        }
    }
}

impl fmt::Display for SpinDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpinDistribution::UniformOnSphere { radius } => write!(f, "uniform-on-sphere:{radius}"),
            SpinDistribution::IsotropicGaussian { sigma } => write!(f, "isotropic-gaussian:{sigma}"),
            SpinDistribution::PointMass { spin } => {
                write!(f, "point-mass:{},{},{}", spin[0], spin[1], spin[2])
            }
        }
    }
}

/// Parses `uniform-on-sphere[:r]`, `isotropic-gaussian[:σ]` or
/// `point-mass:x,y,z`.
impl FromStr for SpinDistribution {
    type Err = NsitError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let number = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| NsitError::InvalidConfig(format!("cannot parse `{p}` as a number")))
        };
        let dist = match (name, params) {
            ("uniform-on-sphere", None) => SpinDistribution::UniformOnSphere { radius: 1.0 },
            ("uniform-on-sphere", Some(p)) => SpinDistribution::UniformOnSphere { radius: number(p)? },
            ("isotropic-gaussian", None) => SpinDistribution::IsotropicGaussian { sigma: 1.0 },
            ("isotropic-gaussian", Some(p)) => SpinDistribution::IsotropicGaussian { sigma: number(p)? },
            ("point-mass", Some(p)) => {
                let parts: Vec<&str> = p.split(',').collect();
                if parts.len() != 3 {
                    return Err(NsitError::InvalidConfig(
                        "point-mass needs three comma-separated components".into(),
                    ));
                }
                SpinDistribution::PointMass {
                    spin: [number(parts[0])?, number(parts[1])?, number(parts[2])?],
                }
            }
            ("point-mass", None) => {
                return Err(NsitError::InvalidConfig("point-mass needs a spin vector".into()))
            }
            _ => return Err(NsitError::UnknownDistribution(name.to_string())),
        };
        dist.validate()?;
        Ok(dist)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> char {
        ['x', 'y', 'z'][self.index()]
    }
}

impl FromStr for Axis {
    type Err = NsitError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(NsitError::InvalidConfig(format!("unknown axis `{other}`"))),
        }
    }
}

/// `ε(x)`: +1 for `x ≥ 0`, −1 otherwise.
pub fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinEnsemble {
    samples: Vec<[f64; 3]>,
    seed: u64,
}

impl SpinEnsemble {
    pub fn from_samples(samples: Vec<[f64; 3]>, seed: u64) -> Result<Self> {
        if samples.is_empty() {
            return Err(NsitError::EmptyInput("spin ensemble"));
        }
        if samples.iter().flatten().any(|x| !x.is_finite()) {
            return Err(NsitError::NonFinite("spin sample"));
        }
        Ok(SpinEnsemble { samples, seed })
    }

    pub fn samples(&self) -> &[[f64; 3]] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sample mean and standard error of an observable.
    pub fn mean_and_stderr(&self, observable: impl Fn([f64; 3]) -> f64) -> (f64, f64) {
        mean_and_var(&self.samples, &observable).map_or((0.0, 0.0), |(m, v)| {
            (m, (v / self.samples.len() as f64).sqrt())
        })
    }
}

/// Mean and unbiased variance (zero for a single sample).
fn mean_and_var(samples: &[[f64; 3]], observable: &impl Fn([f64; 3]) -> f64) -> Option<(f64, f64)> {
    if samples.is_empty() {
        return None;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().map(|&s| observable(s)).sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|&s| (observable(s) - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some((mean, var))
}

pub fn sample_ensemble(dist: SpinDistribution, n: usize, seed: u64) -> Result<SpinEnsemble> {
    if n == 0 {
        return Err(NsitError::EmptyInput("spin ensemble"));
    }
    dist.validate()?;
    let mut samples = vec![[0.0; 3]; n];
    samples
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(chunk, out)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            for s in out.iter_mut() {
                *s = dist.sample(&mut rng);
            }
        });
    Ok(SpinEnsemble { samples, seed })
}

/// Exact solution of `dS/dt = S × B` after time `t`.
pub fn rotate(s: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    let norm = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if norm == 0.0 || t == 0.0 {
        return s;
    }
    let n = b.map(|x| x / norm);
    let theta = -norm * t;
    let (sin, cos) = theta.sin_cos();
    let cross = [
        n[1] * s[2] - n[2] * s[1],
        n[2] * s[0] - n[0] * s[2],
        n[0] * s[1] - n[1] * s[0],
    ];
    let dot = n[0] * s[0] + n[1] * s[1] + n[2] * s[2];
    std::array::from_fn(|i| s[i] * cos + cross[i] * sin + n[i] * dot * (1.0 - cos))
}

pub fn evolve_ensemble(e: &SpinEnsemble, b: [f64; 3], t: f64) -> Result<SpinEnsemble> {
    if !t.is_finite() || b.iter().any(|x| !x.is_finite()) {
        return Err(NsitError::NonFinite("field or time"));
    }
    let samples = e.samples.par_iter().map(|&s| rotate(s, b, t)).collect();
    Ok(SpinEnsemble {
        samples,
        seed: e.seed,
    })
}

/// Sign-coarse-grained marginals `p̄_a(±1)`, indexed by axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMarginals {
    pub plus: [f64; 3],
    pub minus: [f64; 3],
    /// Binomial standard error of each `p̄_a(+1)` (equal for `p̄_a(−1)`).
    pub stderr: [f64; 3],
}

impl ClassicalMarginals {
    /// Flattened `(p̄_x(+1), p̄_x(−1), p̄_y(+1), ...)`, the layout of a qubit
    /// probability vector.
    pub fn as_vector(&self) -> [f64; 6] {
        [
            self.plus[0],
            self.minus[0],
            self.plus[1],
            self.minus[1],
            self.plus[2],
            self.minus[2],
        ]
    }
}

pub fn coarse_grain(e: &SpinEnsemble) -> ClassicalMarginals {
    let n = e.samples.len();
    let mut up = [0usize; 3];
    for s in &e.samples {
        for a in 0..3 {
            if sign(s[a]) > 0 {
                up[a] += 1;
            }
        }
    }
    let total = n as f64;
    let plus = up.map(|u| u as f64 / total);
    let minus = up.map(|u| (n - u) as f64 / total);
    let stderr = plus.map(|p| (p * (1.0 - p) / total).sqrt());
    ClassicalMarginals { plus, minus, stderr }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conditioned {
    pub ensemble: SpinEnsemble,
    /// Fraction of samples that survived, `p̄_{a,s}`.
    pub weight: f64,
}

/// Keeps the samples with `ε(S_a) = outcome`.
pub fn conditional_update(e: &SpinEnsemble, axis: Axis, outcome: i8) -> Result<Conditioned> {
    if outcome != 1 && outcome != -1 {
        return Err(NsitError::InvalidConfig(format!("outcome must be ±1, got {outcome}")));
    }
    let a = axis.index();
    let samples: Vec<[f64; 3]> = e
        .samples
        .iter()
        .copied()
        .filter(|s| sign(s[a]) == outcome)
        .collect();
    if samples.is_empty() {
        return Err(NsitError::EmptyConditional {
            axis: axis.label(),
            outcome,
        });
    }
    let weight = samples.len() as f64 / e.samples.len() as f64;
    Ok(Conditioned {
        ensemble: SpinEnsemble {
            samples,
            seed: e.seed,
        },
        weight,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub residual: f64,
    pub stderr: f64,
    pub mixture: f64,
    pub unmeasured: f64,
}

/// Compares `Σ_s p̄_{a,s} E[O(t) | s]` with the unmeasured `E[O(t)]`.
///
/// An outcome with no survivors contributes nothing to the mixture (its
/// weight is zero).
pub fn nsit_residual(
    e: &SpinEnsemble,
    b: [f64; 3],
    axis: Axis,
    t: f64,
    observable: impl Fn([f64; 3]) -> f64,
) -> Result<Residual> {
    let evolved = evolve_ensemble(e, b, t)?;
    let (unmeasured, var_all) = mean_and_var(&evolved.samples, &observable).expect("nonempty ensemble");
    let mut mixture = 0.0;
    let mut var_mixture = 0.0;
    for outcome in [1, -1] {
        match conditional_update(e, axis, outcome) {
            Ok(branch) => {
                let branch_t = evolve_ensemble(&branch.ensemble, b, t)?;
                let (mean, var) = mean_and_var(&branch_t.samples, &observable).expect("nonempty branch");
                mixture += branch.weight * mean;
                var_mixture += branch.weight.powi(2) * var / branch_t.samples.len() as f64;
            }
            Err(NsitError::EmptyConditional { .. }) => {}
            Err(other) => return Err(other),
        }
    }
    let stderr = (var_mixture + var_all / evolved.samples.len() as f64).sqrt();
    Ok(Residual {
        residual: (mixture - unmeasured).abs(),
        stderr,
        mixture,
        unmeasured,
    })
}
