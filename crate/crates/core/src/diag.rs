//! Diagonal two-qubit unitaries: the tensor invariant, tensor splitting and
//! a circuit of at most five gates.

use crate::error::{Error, Result};
use crate::gate::{push_rotation, Circuit, Gate, Line};
use crate::mat::{Mat2, Mat4, C64, ONE};

/// Invariants at or below this phase are implemented without CNOTs.
const TRIVIAL_PHASE_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diag4 {
    pub z: [C64; 4],
}

impl Diag4 {
    /// Checks that each entry has unit modulus within `1e-9`.
    pub fn new(z: [C64; 4]) -> Result<Self> {
        if z.iter().all(|w| (w.norm() - 1.0).abs() <= 1e-9) {
            Ok(Diag4 { z })
        } else {
            Err(Error::NotUnitModulus)
        }
    }

    pub fn identity() -> Self {
        Diag4 { z: [ONE; 4] }
    }

    pub fn matrix(&self) -> Mat4 {
        Mat4::diag(self.z)
    }

    pub fn det(&self) -> C64 {
        self.z.iter().product()
    }
}

/// `z₁·z₂⁻¹·z₃⁻¹·z₄`; equal to 1 exactly when the diagonal is a tensor product.
pub fn tensor_invariant(d: &Diag4) -> C64 {
    let [z1, z2, z3, z4] = d.z;
    z1 * z4 / (z2 * z3)
}

/// Splits a tensor-decomposable diagonal as `a ⊗ b`, with the upper entry
/// of `b` pinned to 1.
pub fn split_diag_tensor(d: &Diag4) -> Result<(Mat2, Mat2)> {
    let deviation = (tensor_invariant(d) - ONE).norm();
    if deviation > 1e-8 {
        return Err(Error::NotTensorDecomposable { deviation });
    }
    let [z1, z2, z3, _] = d.z;
    Ok((Mat2::diag(z1, z3), Mat2::diag(ONE, z2 / z1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// CNOT–rotation–CNOT core first, then the one-line rotations.
    Left,
    /// One-line rotations first, then the core.
    Flipped,
}

/// `diag(e^{iθ₁}, e^{iθ₂}) = e^{i(θ₁+θ₂)/2}·Rz(θ₂ − θ₁)`.
fn one_line_diag(a: &Mat2, line: Line) -> Circuit {
    let (t1, t2) = (a.0[0][0].arg(), a.0[1][1].arg());
    let mut gates = Vec::with_capacity(1);
    let phase = C64::from_polar(1.0, (t1 + t2) / 2.0) * push_rotation(&mut gates, Gate::rz(line, t2 - t1));
    Circuit { gates, global_phase: phase }
}

/// The three-gate core with phase pattern `(+, −, −, +)·φ/4`.
pub fn diag_core(phi: f64) -> Circuit {
    Circuit::from_gates(vec![Gate::cnot(Line::Bottom), Gate::rz(Line::Top, -phi / 2.0), Gate::cnot(Line::Bottom)])
}

/// Circuit of at most five gates evaluating exactly to `diag(z)`.
pub fn synth_diag(d: &Diag4, orientation: Orientation) -> Circuit {
    let phi = tensor_invariant(d).arg();
    let (core, remainder) = if phi.abs() <= TRIVIAL_PHASE_EPS {
        (Circuit::new(), *d)
    } else {
        let q = C64::from_polar(1.0, phi / 4.0);
        let pattern = [q, q.conj(), q.conj(), q];
        let mut t = d.z;
        for (tk, pk) in t.iter_mut().zip(pattern) {
            *tk /= pk;
        }
        (diag_core(phi), Diag4 { z: t })
    };
    let [t1, t2, t3, _] = remainder.z;
    let (a, b) = (Mat2::diag(t1, t3), Mat2::diag(ONE, t2 / t1));
    let rotations = one_line_diag(&a, Line::Top).concat(&one_line_diag(&b, Line::Bottom));
    match orientation {
        Orientation::Left => core.concat(&rotations),
        Orientation::Flipped => rotations.concat(&core),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar;
    use crate::mat::{cis, I};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn product_diag(e: [f64; 4]) -> Diag4 {
        let [e1, e2, e3, e4] = e.map(cis);
        Diag4 { z: [e1 * e3, e1 * e4, e2 * e3, e2 * e4] }
    }

    #[test]
    fn invariant_examples() {
        assert_eq!(tensor_invariant(&Diag4::identity()), ONE);
        let d = Diag4::new([ONE, ONE, ONE, -ONE]).unwrap();
        assert_eq!(tensor_invariant(&d), -ONE);
        assert!((tensor_invariant(&product_diag([0.3, -1.0, 2.2, 0.9])) - ONE).norm() < 1e-14);
        let sqrt_d = Diag4::new([I, ONE, I, ONE]).unwrap();
        assert!((tensor_invariant(&sqrt_d) - ONE).norm() < 1e-15);
    }

    #[test]
    fn invariant_ignores_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let d = haar::random_diag4(&mut rng);
            let lam = cis(rng.gen_range(-PI..PI));
            let scaled = Diag4 { z: d.z.map(|w| w * lam) };
            assert!((tensor_invariant(&d) - tensor_invariant(&scaled)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_unit_entries() {
        assert_eq!(Diag4::new([ONE, ONE, ONE, C64::new(0.5, 0.0)]).unwrap_err(), Error::NotUnitModulus);
    }

    #[test]
    fn split_identity() {
        let (a, b) = split_diag_tensor(&Diag4::identity()).unwrap();
        assert_eq!(a, Mat2::identity());
        assert_eq!(b, Mat2::identity());
    }

    #[test]
    fn split_recovers_planted_factors() {
        let e = [0.4, 1.9, -0.6, 2.5];
        let d = product_diag(e);
        let (a, b) = split_diag_tensor(&d).unwrap();
        assert!(Mat4::kron(&a, &b).max_abs_diff(&d.matrix()) < 1e-12);
        // equal to the planted factors up to moving a phase between them
        let g = a.0[0][0] / cis(e[0]);
        assert!(a.max_abs_diff(&Mat2::diag(cis(e[0]), cis(e[1])).scale(g)) < 1e-12);
        assert!(b.scale(g).max_abs_diff(&Mat2::diag(cis(e[2]), cis(e[3]))) < 1e-12);
    }

    #[test]
    fn split_of_i1i1() {
        let d = Diag4::new([I, ONE, I, ONE]).unwrap();
        let (a, b) = split_diag_tensor(&d).unwrap();
        assert_eq!(a, Mat2::diag(I, I));
        assert_eq!(b, Mat2::diag(ONE, -I));
        assert!(Mat4::kron(&a, &b).max_abs_diff(&d.matrix()) < 1e-15);
    }

    #[test]
    fn split_rejects_entangling_diagonal() {
        let d = Diag4::new([ONE, ONE, ONE, -ONE]).unwrap();
        assert!(matches!(split_diag_tensor(&d), Err(Error::NotTensorDecomposable { .. })));
    }

    #[test]
    fn identity_synthesizes_to_nothing() {
        for o in [Orientation::Left, Orientation::Flipped] {
            let c = synth_diag(&Diag4::identity(), o);
            assert!(c.is_empty());
            assert_eq!(c.global_phase, ONE);
        }
    }

    #[test]
    fn core_phase_pattern_on_basis_states() {
        let phi = 0.77;
        let m = diag_core(phi).eval();
        let signs = [1.0, -1.0, -1.0, 1.0];
        for k in 0..4 {
            let out: Vec<C64> = (0..4).map(|i| m.0[i][k]).collect();
            for (i, w) in out.iter().enumerate() {
                let want = if i == k { cis(signs[k] * phi / 4.0) } else { C64::new(0.0, 0.0) };
                assert!((w - want).norm() < 1e-14, "basis {k}");
            }
        }
        assert!((tensor_invariant(&Diag4 { z: m.diagonal() }) - cis(phi)).norm() < 1e-14);
    }

    #[test]
    fn controlled_z_needs_five_gates() {
        let d = Diag4::new([ONE, ONE, ONE, -ONE]).unwrap();
        let c = synth_diag(&d, Orientation::Left);
        assert_eq!(c.counts().cnots, 2);
        assert!(c.len() <= 5);
        assert!(c.eval().max_abs_diff(&d.matrix()) < 1e-12);
    }

    #[test]
    fn product_diagonals_need_no_cnots() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..200 {
            let d = product_diag(std::array::from_fn(|_| rng.gen_range(-PI..PI)));
            let c = synth_diag(&d, Orientation::Flipped);
            assert!(c.len() <= 2);
            assert_eq!(c.counts().cnots, 0);
            assert!(c.eval().max_abs_diff(&d.matrix()) < 1e-9);
        }
    }

    #[test]
    fn random_diagonals_both_orientations() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..500 {
            let d = haar::random_diag4(&mut rng);
            for o in [Orientation::Left, Orientation::Flipped] {
                let c = synth_diag(&d, o);
                assert!(c.len() <= 5);
                assert_eq!(c.counts().cnots, 2);
                assert!(c.eval().max_abs_diff(&d.matrix()) < 1e-9);
            }
            let left = synth_diag(&d, Orientation::Left);
            let flipped = synth_diag(&d, Orientation::Flipped);
            assert_eq!(left.gates[0], Gate::cnot(Line::Bottom));
            assert_eq!(*flipped.gates.last().unwrap(), Gate::cnot(Line::Bottom));
        }
    }
}
