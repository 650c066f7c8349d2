//! The magic basis, the entangler `E` with its seven-gate circuit, and
//! conversion from SO(4) (in the magic basis) to a pair of SU(2) factors.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate, Line};
use crate::mat::{cis, Mat2, Mat4, Tolerance, C64, I, ONE, ZERO};

/// `E`; column `k` is the `k`-th magic basis vector.
pub fn entangler_matrix() -> Mat4 {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let i = I;
    Mat4::new([
        [ONE, i, ZERO, ZERO],
        [ZERO, ZERO, i, ONE],
        [ZERO, ZERO, i, -ONE],
        [ONE, -i, ZERO, ZERO],
    ])
    .scale(s)
}

/// `E*`.
pub fn disentangler_matrix() -> Mat4 {
    entangler_matrix().adjoint()
}

/// The four magic basis vectors.
pub fn magic_basis() -> [[C64; 4]; 4] {
    let e = entangler_matrix();
    std::array::from_fn(|k| std::array::from_fn(|row| e.0[row][k]))
}

/// Seven gates, four of them CNOTs, evaluating exactly to `E`.
///
/// `S = e^{iπ/4}·Rz(π/2)` sits on the top line and `H = i·Rz(π)·Ry(π/2)` on
/// the bottom line.
pub fn entangler_circuit() -> Circuit {
    Circuit::from_gates(vec![
        Gate::cnot(Line::Bottom),
        Gate::rz(Line::Top, PI / 2.0),
        Gate::cnot(Line::Bottom),
        Gate::ry(Line::Bottom, PI / 2.0),
        Gate::rz(Line::Bottom, PI),
        Gate::cnot(Line::Top),
        Gate::cnot(Line::Bottom),
    ])
    .with_phase(cis(3.0 * PI / 4.0))
}

pub fn disentangler_circuit() -> Circuit {
    entangler_circuit().inverse()
}

/// `E·m·E*`: the computational-basis form of an operator given in the magic
/// basis.
pub fn magic_conjugate(m: &Mat4) -> Mat4 {
    entangler_matrix() * *m * disentangler_matrix()
}

/// `E*·m·E`.
pub fn to_magic_basis(m: &Mat4) -> Mat4 {
    disentangler_matrix() * *m * entangler_matrix()
}

/// Splits `E·v·E*` for `v ∈ SO(4)` into `a ⊗ b` with `a, b ∈ SU(2)`.
///
/// The pair is unique up to a joint sign; the sign is chosen so that the
/// largest entry of `a` has argument in `(−π/2, π/2]`.
pub fn so4_to_tensor(v: &Mat4) -> Result<(Mat2, Mat2)> {
    if !v.is_special_orthogonal(Tolerance::new(1e-8)?) {
        return Err(Error::NotSpecialOrthogonal);
    }
    let m = magic_conjugate(v);
    let (mut pi, mut pj, mut best) = (0, 0, -1.0);
    for i in 0..2 {
        for j in 0..2 {
            let n = m.block(i, j).frobenius_norm();
            if n > best {
                (pi, pj, best) = (i, j, n);
            }
        }
    }
    let pivot = m.block(pi, pj);
    let mut b = pivot.scale(ONE / pivot.det().sqrt());
    let bb = (b.adjoint() * b).trace();
    let mut a = Mat2::new(std::array::from_fn(|i| {
        std::array::from_fn(|j| (b.adjoint() * m.block(i, j)).trace() / bb)
    }));

    let max = a.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = *a.0.iter().flatten().find(|z| z.norm() >= max - 1e-12).expect("nonempty");
    let arg = lead.arg();
    if !(arg > -PI / 2.0 && arg <= PI / 2.0) {
        a = a.scale(-ONE);
        b = b.scale(-ONE);
    }

    let residual = Mat4::kron(&a, &b).max_abs_diff(&m);
    if residual > 1e-7 {
        return Err(Error::NotTensorSplittable { residual });
    }
    Ok((a, b))
}
