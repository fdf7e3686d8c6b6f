//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails or exceeds its time budget.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nsit_core::classical::{nsit_residual, sample_ensemble, Axis, SpinDistribution};
use nsit_core::classifier::{evaluate, predict, train_detailed, TrainConfig};
use nsit_core::datagen::{generate_class, generate_dataset, GenerationConfig, Label};
use nsit_core::dynamics::{
    evolve_density_oracle, evolve_probabilities, transfer_matrix, HamiltonianSpec,
};
use nsit_core::gellmann::{build_basis, verify_basis};
use nsit_core::linalg::{hermitian_eigenvalues, trace_product, CMatrix};
use nsit_core::measurement::{negativity_scan, reconstruct_pseudodensity, witness_gamma, MeasurementRecord};
use nsit_core::qubit::delta_measure;
use nsit_core::states::{
    density_from_bloch, probability_vector_from_density, random_mixed_state, BlochVector,
    DensityMatrix, ProbabilityVector,
};
use nsit_core::Complex64;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// The single-qubit transfer matrix for `H = B·σ/2`, typed in row by row
/// in the order p_x(+1), p_x(-1), p_y(+1), p_y(-1), p_z(+1), p_z(-1).
fn printed_qubit_matrix(b: [f64; 3]) -> DMatrix<f64> {
    let (bx, by, bz) = (b[0] / 2.0, b[1] / 2.0, b[2] / 2.0);
    #[rustfmt::skip]
    let rows = [
        0.0, 0.0, -bz,  bz,  by, -by,
        0.0, 0.0,  bz, -bz, -by,  by,
         bz, -bz, 0.0, 0.0, -bx,  bx,
        -bz,  bz, 0.0, 0.0,  bx, -bx,
        -by,  by,  bx, -bx, 0.0, 0.0,
         by, -by, -bx,  bx, 0.0, 0.0,
    ];
    DMatrix::from_row_slice(6, 6, &rows)
}

fn qubit_density(b: [f64; 3]) -> DensityMatrix {
    let basis = build_basis(2).unwrap();
    density_from_bloch(&BlochVector::new(2, b.to_vec()).unwrap(), &basis).unwrap()
}

fn random_ball_point(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let p: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return p;
        }
    }
}

fn random_unit_vector(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let p = random_ball_point(rng);
        let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return p.map(|x| x / n);
        }
    }
}

fn criterion_1() -> Outcome {
    let basis = build_basis(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let b: [f64; 3] = std::array::from_fn(|_| rng.random_range(-5.0..5.0));
        let general = transfer_matrix(&HamiltonianSpec::qubit_field(b).unwrap(), &basis).unwrap();
        worst = worst.max((general.matrix() - printed_qubit_matrix(b)).amax());
    }
    check(worst <= 1e-12, format!("max entry deviation {worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let basis = build_basis(2).unwrap();
    let expected = (2f64.sqrt() - 1.0) / 2.0;
    let plus_x = probability_vector_from_density(&qubit_density([1.0, 0.0, 0.0]), &basis).unwrap();
    let mut worst = 0.0_f64;
    for k in 0..2 {
        let r = witness_gamma(&plus_x, MeasurementRecord::new(1, k), &basis).unwrap();
        worst = worst.max((r.gamma - expected).abs());
    }
    let mixed = probability_vector_from_density(&DensityMatrix::maximally_mixed(2), &basis).unwrap();
    let mut mixed_max = 0.0_f64;
    for n in 0..3 {
        for k in 0..2 {
            let r = witness_gamma(&mixed, MeasurementRecord::new(n, k), &basis).unwrap();
            mixed_max = mixed_max.max(r.gamma);
        }
    }
    check(
        worst <= 1e-12 && mixed_max == 0.0,
        format!("|γ_y - (√2-1)/2| = {worst:.2e}, max γ for I/2 = {mixed_max:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let basis = build_basis(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let gamma_sum = |b: [f64; 3]| -> f64 {
        let p = probability_vector_from_density(&qubit_density(b), &basis).unwrap();
        (0..3)
            .map(|a| {
                let g = witness_gamma(&p, MeasurementRecord::new(a, 0), &basis).unwrap().gamma;
                g * (1.0 + g)
            })
            .sum()
    };
    let mut identity_worst = 0.0_f64;
    let mut bound_worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let b = random_ball_point(&mut rng);
        let s = gamma_sum(b);
        let delta = delta_measure(b).unwrap();
        identity_worst = identity_worst.max((delta - 4.0 / 3.0 * s).abs());
        bound_worst = bound_worst.max(s);
    }
    let mut saturation_worst = 0.0_f64;
    for _ in 0..1000 {
        let s = gamma_sum(random_unit_vector(&mut rng));
        saturation_worst = saturation_worst.max((s - 0.5).abs());
    }
    check(
        identity_worst <= 1e-10 && bound_worst <= 0.5 + 1e-9 && saturation_worst <= 1e-9,
        format!(
            "Δ identity {identity_worst:.2e}, max Σγ(1+γ) {bound_worst:.12}, pure-state |Σγ(1+γ) - 1/2| {saturation_worst:.2e}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst = 0.0_f64;
    let mut sums = 0.0_f64;
    for dim in 2..=5 {
        let basis = build_basis(dim).unwrap();
        for _ in 0..100 {
            let h = HamiltonianSpec::random(dim, &mut rng);
            let rho = random_mixed_state(dim, &mut rng);
            let t = rng.random_range(0.0..=5.0);
            let tm = transfer_matrix(&h, &basis).unwrap();
            let p0 = probability_vector_from_density(&rho, &basis).unwrap();
            let p = evolve_probabilities(&p0, &tm, t).unwrap();
            let oracle =
                probability_vector_from_density(&evolve_density_oracle(&rho, &h, t).unwrap(), &basis).unwrap();
            for (a, b) in p.as_slice().iter().zip(oracle.as_slice()) {
                worst = worst.max((a - b).abs());
            }
            sums = sums.max(p.max_tuple_sum_error());
        }
    }
    check(
        worst <= 1e-8 && sums <= 1e-8,
        format!("max deviation {worst:.2e}, max tuple-sum drift {sums:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let basis = build_basis(2).unwrap();
    let tm = transfer_matrix(&HamiltonianSpec::qubit_field([0.0, 0.0, 1.0]).unwrap(), &basis).unwrap();
    let grid: Vec<f64> = (1..).map(|i| i as f64 * 0.01).take_while(|&t| t <= PI).collect();
    let post = ProbabilityVector::new(2, vec![1.0, 0.0, 1.0, 0.0, 0.5, 0.5]).unwrap();
    let report = negativity_scan(&post, &tm, &grid).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut false_alarms = 0;
    let mut min_seen = f64::INFINITY;
    for _ in 0..100 {
        let p = probability_vector_from_density(&random_mixed_state(2, &mut rng), &basis).unwrap();
        let r = negativity_scan(&p, &tm, &grid).unwrap();
        min_seen = min_seen.min(r.min_value);
        if r.violating {
            false_alarms += 1;
        }
    }
    let first = report.first_negative;
    check(
        report.violating && false_alarms == 0,
        format!(
            "violating start: first negative {:?}; valid starts flagged {false_alarms}/100 (min component {min_seen:.2e})",
            first.map(|f| (f.t, f.value))
        ),
    )
}

fn criterion_6() -> Outcome {
    let e = sample_ensemble(SpinDistribution::UniformOnSphere { radius: 1.0 }, 1_000_000, 106).unwrap();
    let mut worst_ratio = 0.0_f64;
    let mut all = true;
    for t in [0.5, 1.5] {
        for a in 0..3 {
            let r = nsit_residual(&e, [0.0, 0.0, 1.0], Axis::X, t, |s| s[a]).unwrap();
            all &= r.residual < 3.0 * r.stderr;
            worst_ratio = worst_ratio.max(r.residual / r.stderr);
        }
    }
    check(all, format!("max residual / stderr = {worst_ratio:.2e}"))
}

fn criterion_7() -> Outcome {
    let mut means = Vec::new();
    for dim in [2, 4, 6] {
        let cfg = GenerationConfig {
            conforming: 0,
            ..GenerationConfig::balanced(dim, 100_000, 107)
        };
        let basis = build_basis(dim).unwrap();
        let (examples, _) = generate_class(&cfg, &basis, Label::Violating, 100_000).unwrap();
        assert!(examples.iter().all(|e| e.gamma > 0.0));
        means.push(examples.iter().map(|e| e.gamma).sum::<f64>() / examples.len() as f64);
    }
    check(
        means[0] < means[1] && means[1] < means[2],
        format!("γ̄_2 = {:.4}, γ̄_4 = {:.4}, γ̄_6 = {:.4}", means[0], means[1], means[2]),
    )
}

fn criterion_8() -> Outcome {
    let dataset = generate_dataset(&GenerationConfig::balanced(4, 10_000, 108)).unwrap();
    let basis = build_basis(4).unwrap();
    let examples = &dataset.examples;
    let negatives = examples
        .iter()
        .filter(|e| e.vector.as_slice().iter().any(|&x| x < 0.0))
        .count();
    let sum_error = examples.iter().map(|e| e.vector.max_tuple_sum_error()).fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(1108);
    let audit = sample(&mut rng, examples.len(), examples.len() / 100);
    let mut disagreements = 0;
    for i in audit.iter() {
        let e = &examples[i];
        let rho = reconstruct_pseudodensity(&e.vector, &basis).unwrap();
        let min = hermitian_eigenvalues(rho.matrix())[0];
        let psd = min >= -1e-10;
        if psd != (e.label == Label::Conforming) {
            disagreements += 1;
        }
    }
    check(
        examples.len() == 20_000 && negatives == 0 && sum_error <= 1e-9 && disagreements == 0,
        format!(
            "{} examples, audited {}, label disagreements {disagreements}, negative vectors {negatives}, max tuple-sum error {sum_error:.2e}",
            examples.len(),
            audit.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let data = generate_dataset(&GenerationConfig::balanced(2, 5000, 109)).unwrap();
    let run = train_detailed(&data.examples, &TrainConfig::new(9)).unwrap();
    let held_out = run.validation.unwrap();
    let fresh = generate_dataset(&GenerationConfig::balanced(2, 1000, 209)).unwrap();
    let fresh_metrics = evaluate(&run.model, &fresh.examples).unwrap();
    let z99 = 2.326;
    let violating = ProbabilityVector::new(2, vec![1.0, 0.0, 1.0, 0.0, 0.5, 0.5]).unwrap();
    let sanity = predict(&run.model, &violating).unwrap().label == Label::Violating
        && predict(&run.model, &ProbabilityVector::uniform(2)).unwrap().label == Label::Conforming;
    check(
        held_out.accuracy_lower_bound(z99) > 0.5
            && held_out.accuracy >= 0.85
            && fresh_metrics.accuracy_lower_bound(z99) > 0.5
            && sanity,
        format!(
            "held-out accuracy {:.4} (n = {}, 99% lower bound {:.4}), fresh-set accuracy {:.4}",
            held_out.accuracy,
            held_out.total(),
            held_out.accuracy_lower_bound(z99),
            fresh_metrics.accuracy
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut ok = true;
    let mut worst_ortho = 0.0_f64;
    let mut worst_report = 0.0_f64;
    for dim in 2..=8 {
        let basis = build_basis(dim).unwrap();
        let report = verify_basis(&basis);
        ok &= report.within_tolerances();
        worst_report = worst_report.max(report.max_residual());
        // direct Gram-matrix check, independent of the report
        for (a, ga) in basis.generators().iter().enumerate() {
            for (b, gb) in basis.generators().iter().enumerate() {
                let target = if a == b { dim as f64 } else { 0.0 };
                let dev = (trace_product(ga, gb) - Complex64::new(target, 0.0)).norm();
                worst_ortho = worst_ortho.max(dev);
            }
            let mut rebuilt = CMatrix::zeros(dim, dim);
            for (k, &l) in basis.eigenvalues(a).iter().enumerate() {
                rebuilt += basis.projector(a, k) * Complex64::new(l, 0.0);
            }
            ok &= (rebuilt - ga).iter().all(|z| z.norm() <= 1e-10);
        }
    }
    check(
        ok && worst_ortho <= 1e-10,
        format!("max residual {worst_report:.2e}, max Gram deviation {worst_ortho:.2e}"),
    )
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "qubit transfer matrix", Duration::from_secs(1), criterion_1),
        (2, "witness reproduction", Duration::from_secs(1), criterion_2),
        (3, "Δ-γ identity and bound", Duration::from_secs(5), criterion_3),
        (4, "evolution oracle equivalence", Duration::from_secs(60), criterion_4),
        (5, "negativity scan", Duration::from_secs(10), criterion_5),
        (6, "classical NSIT oracle", Duration::from_secs(30), criterion_6),
        (7, "γ̄ ordering over N", Duration::from_secs(600), criterion_7),
        (8, "dataset soundness audit", Duration::from_secs(60), criterion_8),
        (9, "classifier better than chance", Duration::from_secs(120), criterion_9),
        (10, "basis algebra N = 2..8", Duration::from_secs(30), criterion_10),
    ];
    let mut failures = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = outcome.passed && in_time;
        // written to the stdout handle directly so the report survives test capture
        writeln!(
            io::stdout().lock(),
            "criterion {id:>2} {} {name}: {} [{:.2}s / {}s]",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        )
        .unwrap();
        if !passed {
            failures.push(id);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
