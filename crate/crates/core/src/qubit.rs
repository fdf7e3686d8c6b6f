//! Closed-form single-qubit witnesses.
//!
//! For a qubit with Bloch vector `b`, measuring `σa` gives
//! `γa = (√(1 + Σ_{c≠a} b_c²) - 1) / 2` for either outcome. The backreaction
//! measure `Δ = (1/3) Σ_a Σ_b (δσ_b(a))²` compares `⟨σ_b⟩` before and after
//! a nonselective `σa` measurement and satisfies
//! `Δ = (2/3)|b|² = (4/3) Σ_a γa (1 + γa)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dynamics::TransferMatrix;
use crate::error::{NsitError, Result};
use crate::linalg::{c, trace_product, CMatrix, I};

fn validate(bloch: [f64; 3]) -> Result<f64> {
    if bloch.iter().any(|x| !x.is_finite()) {
        return Err(NsitError::NonFinite("Bloch vector"));
    }
    let norm2: f64 = bloch.iter().map(|x| x * x).sum();
    if norm2 > 1.0 + 1e-9 {
        return Err(NsitError::InvalidQuantumState(norm2));
    }
    Ok(norm2)
}

pub fn gamma_closed_form(bloch: [f64; 3]) -> Result<[f64; 3]> {
    let norm2 = validate(bloch)?;
    Ok(bloch.map(|ba| 0.5 * ((1.0 + norm2 - ba * ba).sqrt() - 1.0)))
}

fn paulis() -> [CMatrix; 3] {
    let o = c(0.0);
    let l = c(1.0);
    [
        CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        CMatrix::from_row_slice(2, 2, &[o, -I, I, o]),
        CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

/// Δ from the projector-averaged states `ρ_a = Σ_s P_{a,s} ρ P_{a,s}`.
pub fn delta_measure(bloch: [f64; 3]) -> Result<f64> {
    validate(bloch)?;
    let sigma = paulis();
    let identity = CMatrix::identity(2, 2);
    let mut rho = identity.clone();
    for (s, &b) in sigma.iter().zip(&bloch) {
        rho += s * c(b);
    }
    rho *= c(0.5);

    let mut total = 0.0;
    for sa in &sigma {
        let plus = (&identity + sa) * c(0.5);
        let minus = (&identity - sa) * c(0.5);
        let averaged = &plus * &rho * &plus + &minus * &rho * &minus;
        for (sb, &b0) in sigma.iter().zip(&bloch) {
            let d = trace_product(sb, &averaged).re - b0;
            total += d * d;
        }
    }
    Ok(total / 3.0)
}

/// `Δ = (2/3) |b|²`.
pub fn delta_closed_form(bloch: [f64; 3]) -> Result<f64> {
    Ok(2.0 / 3.0 * validate(bloch)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub satisfied: bool,
}

/// `Σ_a γa (1 + γa) ≤ 1/2`.
pub fn bound_check(gammas: [f64; 3]) -> BoundCheck {
    let lhs = gammas.iter().map(|g| g * (1.0 + g)).sum();
    BoundCheck {
        lhs,
        satisfied: lhs <= 0.5 + 1e-9,
    }
}

/// The 6×6 transfer matrix for `H = B·σ/2`, written out entry by entry.
pub fn transfer_matrix_2level(b: [f64; 3]) -> Result<TransferMatrix> {
    if b.iter().any(|x| !x.is_finite()) {
        return Err(NsitError::NonFinite("field"));
    }
    let [x, y, z] = b.map(|v| v / 2.0);
    #[rustfmt::skip]
    let rows = [
        0.0, 0.0,  -z,   z,   y,  -y,
        0.0, 0.0,   z,  -z,  -y,   y,
          z,  -z, 0.0, 0.0,  -x,   x,
         -z,   z, 0.0, 0.0,   x,  -x,
         -y,   y,   x,  -x, 0.0, 0.0,
          y,  -y,  -x,   x, 0.0, 0.0,
    ];
    TransferMatrix::new(2, DMatrix::from_row_slice(6, 6, &rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitWitnessSet {
    pub gamma_x: f64,
    pub gamma_y: f64,
    pub gamma_z: f64,
    pub delta: f64,
    pub bloch: [f64; 3],
}

impl QubitWitnessSet {
    pub fn from_bloch(bloch: [f64; 3]) -> Result<Self> {
        let [gamma_x, gamma_y, gamma_z] = gamma_closed_form(bloch)?;
        Ok(QubitWitnessSet {
            gamma_x,
            gamma_y,
            gamma_z,
            delta: delta_measure(bloch)?,
            bloch,
        })
    }

    pub fn gammas(&self) -> [f64; 3] {
        [self.gamma_x, self.gamma_y, self.gamma_z]
    }

    pub fn bound(&self) -> BoundCheck {
        bound_check(self.gammas())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{transfer_matrix, HamiltonianSpec};
    use crate::gellmann::build_basis;
    use crate::measurement::{witness_gamma, MeasurementRecord};
    use crate::states::{density_from_bloch, probability_vector_from_density, BlochVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ball_point(rng: &mut impl Rng) -> [f64; 3] {
        loop {
            let p: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                return p;
            }
        }
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_closed_form([0.0; 3]).unwrap(), [0.0; 3]);
        let g = gamma_closed_form([1.0, 0.0, 0.0]).unwrap();
        let expected = (2f64.sqrt() - 1.0) / 2.0;
        assert_eq!(g[0], 0.0);
        assert!((g[1] - expected).abs() < 1e-15 && (g[2] - expected).abs() < 1e-15);
        assert!(matches!(
            gamma_closed_form([1.0, 1.0, 0.0]),
            Err(NsitError::InvalidQuantumState(_))
        ));
    }

    #[test]
    fn gamma_matches_general_witness() {
        let basis = build_basis(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let b = random_ball_point(&mut rng);
            let rho = density_from_bloch(&BlochVector::new(2, b.to_vec()).unwrap(), &basis).unwrap();
            let p = probability_vector_from_density(&rho, &basis).unwrap();
            let closed = gamma_closed_form(b).unwrap();
            for (a, expected) in closed.iter().enumerate() {
                for s in 0..2 {
                    let r = witness_gamma(&p, MeasurementRecord::new(a, s), &basis).unwrap();
                    assert!((r.gamma - expected).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn delta_examples() {
        assert!(delta_measure([0.0; 3]).unwrap().abs() < 1e-15);
        assert!((delta_measure([1.0, 0.0, 0.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn delta_gamma_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..500 {
            let b = random_ball_point(&mut rng);
            let set = QubitWitnessSet::from_bloch(b).unwrap();
            let bound = set.bound();
            assert!((set.delta - 4.0 / 3.0 * bound.lhs).abs() < 1e-10);
            assert!((set.delta - delta_closed_form(b).unwrap()).abs() < 1e-12);
            let norm2: f64 = b.iter().map(|x| x * x).sum();
            assert!((norm2 - 2.0 * bound.lhs).abs() < 1e-10);
            assert!(bound.satisfied);
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bound_check([0.0; 3]), BoundCheck { lhs: 0.0, satisfied: true });
        let g = (2f64.sqrt() - 1.0) / 2.0;
        let b = bound_check([0.0, g, g]);
        assert!((b.lhs - 0.5).abs() < 1e-15 && b.satisfied);
        for i in 1..10 {
            let r = i as f64 / 10.0;
            let b = bound_check(gamma_closed_form([0.0, r / 2f64.sqrt(), r / 2f64.sqrt()]).unwrap());
            assert!((b.lhs - r * r / 2.0).abs() < 1e-12);
            assert!(b.lhs < 0.5);
        }
    }

    #[test]
    fn printed_matrix_matches_general_construction() {
        let basis = build_basis(2).unwrap();
        let tm = transfer_matrix_2level([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(tm.matrix()[(0, 2)], -0.5);
        assert_eq!(tm.matrix()[(0, 3)], 0.5);
        assert!(transfer_matrix_2level([0.0; 3]).unwrap().matrix().iter().all(|&x| x == 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let b = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let general = transfer_matrix(&HamiltonianSpec::qubit_field(b).unwrap(), &basis).unwrap();
            let printed = transfer_matrix_2level(b).unwrap();
            assert!((general.matrix() - printed.matrix()).amax() < 1e-12);
        }
    }
}
