//! Logistic-regression classifier for probability vectors.
//!
//! Labels are 0 (NSIT-conforming) and 1 (NSIT-violating). The decision
//! function is `σ(w·φ(p) + b)` with a fixed feature map `φ`. Training is
//! full-batch gradient descent on the mean logistic loss from a zero start;
//! whenever a step would raise the loss the step size is halved and the step
//! retried, so the recorded loss never increases.
//!
//! The quadratic feature map appends the products `p_n(k) p_n(l)`, `k ≤ l`,
//! within each tuple. Quantum validity is a quadratic condition on the
//! probabilities (for a qubit it is the Bloch ball `Σ ⟨σ⟩² ≤ 1`), which a
//! purely linear score cannot express.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::datagen::{Label, LabeledExample};
use crate::error::{NsitError, Result};
use crate::states::ProbabilityVector;

const MAX_HALVINGS: usize = 60;
const LOSS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMap {
    Linear,
    Quadratic,
}

impl FeatureMap {
    pub fn len(self, dim: usize) -> usize {
        let base = dim * (dim * dim - 1);
        match self {
            FeatureMap::Linear => base,
            FeatureMap::Quadratic => base + (dim * dim - 1) * dim * (dim + 1) / 2,
        }
    }

    pub fn apply(self, p: &ProbabilityVector) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len(p.dim()));
        out.extend_from_slice(p.as_slice());
        if self == FeatureMap::Quadratic {
            for t in p.tuples() {
                for k in 0..t.len() {
                    for l in k..t.len() {
                        out.push(t[k] * t[l]);
                    }
                }
            }
        }
        out
    }
}

impl std::str::FromStr for FeatureMap {
    type Err = NsitError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(FeatureMap::Linear),
            "quadratic" => Ok(FeatureMap::Quadratic),
            other => Err(NsitError::InvalidConfig(format!("unknown feature map `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// Seeds the train/validation split.
    pub seed: u64,
    pub validation_fraction: f64,
    pub features: FeatureMap,
}

impl TrainConfig {
    pub fn new(seed: u64) -> Self {
        TrainConfig {
            epochs: 5000,
            learning_rate: 1.0,
            seed,
            validation_fraction: 0.2,
            features: FeatureMap::Quadratic,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(NsitError::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(NsitError::InvalidConfig("learning rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(NsitError::InvalidConfig("validation fraction must be in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub epochs: usize,
    pub learning_rate: f64,
    /// Step size after any halvings.
    pub final_learning_rate: f64,
    pub final_loss: f64,
    pub seed: u64,
    pub train_examples: usize,
    pub validation_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub dim: usize,
    pub features: FeatureMap,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub metadata: TrainingMetadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl ClassifierModel {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(NsitError::InvalidDimension(self.dim));
        }
        let expected = self.features.len(self.dim);
        if self.weights.len() != expected {
            return Err(NsitError::DimensionMismatch {
                expected,
                actual: self.weights.len(),
            });
        }
        if self.weights.iter().chain([&self.bias]).any(|x| !x.is_finite()) {
            return Err(NsitError::NonFinite("model parameters"));
        }
        Ok(())
    }

    /// `w·φ(p) + b`.
    pub fn affine(&self, p: &ProbabilityVector) -> f64 {
        dot(&self.weights, &self.features.apply(p)) + self.bias
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Design {
    rows: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Design {
    fn loss(&self, w: &[f64], b: f64) -> f64 {
        let total: f64 = self
            .rows
            .iter()
            .zip(&self.targets)
            .map(|(x, &y)| {
                let z = dot(w, x) + b;
                softplus(z) - y * z
            })
            .sum();
        total / self.rows.len() as f64
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let mut gw = vec![0.0; w.len()];
        let mut gb = 0.0;
        for (x, &y) in self.rows.iter().zip(&self.targets) {
            let r = sigmoid(dot(w, x) + b) - y;
            gb += r;
            for (g, xi) in gw.iter_mut().zip(x) {
                *g += r * xi;
            }
        }
        let n = self.rows.len() as f64;
        gw.iter_mut().for_each(|g| *g /= n);
        (gw, gb / n)
    }
}

fn check_examples(examples: &[LabeledExample]) -> Result<usize> {
    let first = examples.first().ok_or(NsitError::EmptyInput("examples"))?;
    let dim = first.vector.dim();
    if let Some(bad) = examples.iter().find(|e| e.vector.dim() != dim) {
        return Err(NsitError::DimensionMismatch {
            expected: dim,
            actual: bad.vector.dim(),
        });
    }
    Ok(dim)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRun {
    pub model: ClassifierModel,
    /// Loss after each epoch, starting with the loss of the zero model.
    pub loss_history: Vec<f64>,
    pub validation: Option<Metrics>,
}

pub fn train(examples: &[LabeledExample], config: &TrainConfig) -> Result<ClassifierModel> {
    Ok(train_detailed(examples, config)?.model)
}

pub fn train_detailed(examples: &[LabeledExample], config: &TrainConfig) -> Result<TrainingRun> {
    config.validate()?;
    let dim = check_examples(examples)?;

    let mut order: Vec<usize> = (0..examples.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let n_val = (examples.len() as f64 * config.validation_fraction).floor() as usize;
    let (val_idx, train_idx) = order.split_at(n_val);

    let count = |label| train_idx.iter().filter(|&&i| examples[i].label == label).count();
    if count(Label::Conforming) < 2 || count(Label::Violating) < 2 {
        return Err(NsitError::SingleClass);
    }

    let design = Design {
        rows: train_idx.iter().map(|&i| config.features.apply(&examples[i].vector)).collect(),
        targets: train_idx.iter().map(|&i| examples[i].label.as_u8() as f64).collect(),
    };
    let mut w = vec![0.0; config.features.len(dim)];
    let mut b = 0.0;
    let mut lr = config.learning_rate;
    let mut loss = design.loss(&w, b);
    let mut history = Vec::with_capacity(config.epochs + 1);
    history.push(loss);
    for _ in 0..config.epochs {
        let (gw, gb) = design.gradient(&w, b);
        let mut halvings = 0;
        loop {
            let w_new: Vec<f64> = w.iter().zip(&gw).map(|(x, g)| x - lr * g).collect();
            let b_new = b - lr * gb;
            let loss_new = design.loss(&w_new, b_new);
            if loss_new <= loss + LOSS_SLACK {
                w = w_new;
                b = b_new;
                loss = loss_new.min(loss);
                break;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                break;
            }
            lr *= 0.5;
        }
        history.push(loss);
    }

    let mut model = ClassifierModel {
        dim,
        features: config.features,
        weights: w,
        bias: b,
        metadata: TrainingMetadata {
            epochs: config.epochs,
            learning_rate: config.learning_rate,
            final_learning_rate: lr,
            final_loss: loss,
            seed: config.seed,
            train_examples: train_idx.len(),
            validation_accuracy: None,
        },
    };
    let validation = if val_idx.is_empty() {
        None
    } else {
        let held_out: Vec<LabeledExample> = val_idx.iter().map(|&i| examples[i].clone()).collect();
        let metrics = evaluate(&model, &held_out)?;
        model.metadata.validation_accuracy = Some(metrics.accuracy);
        Some(metrics)
    };
    Ok(TrainingRun {
        model,
        loss_history: history,
        validation,
    })
}

pub fn predict(model: &ClassifierModel, p: &ProbabilityVector) -> Result<Prediction> {
    if p.dim() != model.dim {
        return Err(NsitError::DimensionMismatch {
            expected: model.dim,
            actual: p.dim(),
        });
    }
    p.check_tuple_sums(1e-6)?;
    let score = sigmoid(model.affine(p));
    let label = if score >= 0.5 {
        Label::Violating
    } else {
        Label::Conforming
    };
    Ok(Prediction { label, score })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub true_positive: u64,
    pub false_positive: u64,
    pub true_negative: u64,
    pub false_negative: u64,
}

impl Metrics {
    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }

    /// One-sided normal-approximation lower confidence bound on the
    /// accuracy, `â - z √(â(1-â)/n)`; `z = 2.326` gives 99%.
    pub fn accuracy_lower_bound(&self, z: f64) -> f64 {
        let n = self.total() as f64;
        self.accuracy - z * (self.accuracy * (1.0 - self.accuracy) / n).sqrt()
    }
}

/// Confusion counts against the stored labels; "positive" is the violating
/// class. Precision and recall are 0 when undefined.
pub fn evaluate(model: &ClassifierModel, examples: &[LabeledExample]) -> Result<Metrics> {
    check_examples(examples)?;
    let (mut tp, mut fp, mut tn, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for e in examples {
        let predicted = predict(model, &e.vector)?.label;
        match (predicted, e.label) {
            (Label::Violating, Label::Violating) => tp += 1,
            (Label::Violating, Label::Conforming) => fp += 1,
            (Label::Conforming, Label::Conforming) => tn += 1,
            (Label::Conforming, Label::Violating) => fn_ += 1,
        }
    }
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(Metrics {
        accuracy: ratio(tp + tn, examples.len() as u64),
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        true_positive: tp,
        false_positive: fp,
        true_negative: tn,
        false_negative: fn_,
    })
}
