//! QR baseline: six Givens rotations on adjacent basis pairs reduce a 4×4
//! unitary to a diagonal, and each rotation becomes a controlled one-qubit
//! gate.

use crate::diag::{synth_diag, Diag4, Orientation};
use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate, Line};
use crate::kak::{finish, Backend, SynthOptions, SynthesisReport};
use crate::mat::{Mat2, Mat4, C64, ZERO};
use crate::su2::{controlled_v_gates, one_qubit_gates};

/// Below this magnitude an entry is already eliminated.
const GIVENS_EPS: f64 = 1e-12;

/// Adjacent basis-state pair, numbered from 1 as rows of the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GivensPair {
    P12,
    P23,
    P34,
}

impl GivensPair {
    /// Zero-based index of the upper row.
    pub fn upper_row(self) -> usize {
        match self {
            GivensPair::P12 => 0,
            GivensPair::P23 => 1,
            GivensPair::P34 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensStep {
    pub pair: GivensPair,
    /// The factor of `u` contributed by this step, acting on the pair.
    pub rotation: Mat2,
}

impl GivensStep {
    /// The 4×4 matrix acting as `rotation` on the pair and as identity elsewhere.
    pub fn embed(&self) -> Mat4 {
        let r = self.pair.upper_row();
        let mut m = Mat4::identity();
        for i in 0..2 {
            for j in 0..2 {
                m.0[r + i][r + j] = self.rotation.0[i][j];
            }
        }
        m
    }
}

/// Elimination schedule: (pair, column) for entries (4,1), (3,1), (2,1),
/// (4,2), (3,2), (4,3).
const SCHEDULE: [(GivensPair, usize); 6] = [
    (GivensPair::P34, 0),
    (GivensPair::P23, 0),
    (GivensPair::P12, 0),
    (GivensPair::P34, 1),
    (GivensPair::P23, 1),
    (GivensPair::P34, 2),
];

/// Returns the steps and the diagonal remainder with
/// `u = Q1·Q2·…·Q6·diag(r)` where `Qk = steps[k].embed()`.
pub fn qr_reduce(u: &Mat4) -> Result<([GivensStep; 6], Diag4)> {
    let deviation = u.unitarity_deviation();
    if !u.is_finite() || deviation > crate::mat::Tolerance::default().eps() {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(qr_reduce_unchecked(u))
}

pub(crate) fn qr_reduce_unchecked(u: &Mat4) -> ([GivensStep; 6], Diag4) {
    let mut w = *u;
    let steps = SCHEDULE.map(|(pair, col)| {
        let r = pair.upper_row();
        let (x, y) = (w.0[r][col], w.0[r + 1][col]);
        let g = if y.norm() <= GIVENS_EPS {
            Mat2::identity()
        } else {
            let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
            Mat2::new([[x.conj(), y.conj()], [-y, x]]).scale(C64::new(1.0 / n, 0.0))
        };
        for j in 0..4 {
            let (a, b) = (w.0[r][j], w.0[r + 1][j]);
            w.0[r][j] = g.0[0][0] * a + g.0[0][1] * b;
            w.0[r + 1][j] = g.0[1][0] * a + g.0[1][1] * b;
        }
        if y.norm() > GIVENS_EPS {
            w.0[r + 1][col] = ZERO;
        }
        GivensStep { pair, rotation: g.adjoint() }
    });
    (steps, Diag4 { z: w.diagonal() })
}

/// Circuit evaluating exactly to `step.embed()`.
pub fn givens_to_gates(step: &GivensStep) -> Result<Circuit> {
    let v = step.rotation;
    match step.pair {
        GivensPair::P34 => controlled_v_gates(&v, Line::Top),
        GivensPair::P12 => {
            let x = one_qubit_gates(&Mat2::x(), Line::Top);
            Ok(x.concat(&controlled_v_gates(&v, Line::Top)?).concat(&x))
        }
        GivensPair::P23 => {
            let xvx = Mat2::x() * v * Mat2::x();
            let mut c = Circuit::from_gates(vec![Gate::cnot(Line::Bottom)]);
            c.append(&controlled_v_gates(&xvx, Line::Top)?);
            c.push(Gate::cnot(Line::Bottom));
            Ok(c)
        }
    }
}

/// Unsimplified QR circuit: the diagonal first, then `Q6 … Q1`.
pub fn qr_circuit(u: &Mat4) -> Result<Circuit> {
    let (steps, r) = qr_reduce_unchecked(u);
    let mut c = synth_diag(&r, Orientation::Left);
    for step in steps.iter().rev() {
        c.append(&givens_to_gates(step)?);
    }
    Ok(c)
}

pub fn synth_qr(u: &Mat4) -> Result<SynthesisReport> {
    synth_qr_with(u, &SynthOptions::default())
}

pub fn synth_qr_with(u: &Mat4, opts: &SynthOptions) -> Result<SynthesisReport> {
    let deviation = u.unitarity_deviation();
    if !u.is_finite() || deviation > opts.tolerance.eps() {
        return Err(Error::NotUnitary { deviation: if deviation.is_nan() { f64::INFINITY } else { deviation } });
    }
    finish(u, Backend::Qr, qr_circuit(u)?, opts, true)
}
