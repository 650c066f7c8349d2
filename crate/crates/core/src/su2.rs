//! One-qubit ZYZ decomposition and the two-CNOT controlled-V construction.

use crate::error::{Error, Result};
use crate::gate::{push_rotation, ry_matrix, rz_matrix, Circuit, Gate, Line};
use crate::mat::{cis, Mat2, Tolerance, C64, ONE};

/// Below this magnitude an entry of the normalized matrix counts as zero and
/// the split between `α` and `β` is fixed by convention.
const DEGENERATE_EPS: f64 = 1e-12;

/// `u = e^{iδ}·Rz(α)·Ry(θ)·Rz(β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZyzAngles {
    pub delta: f64,
    pub alpha: f64,
    pub theta: f64,
    pub beta: f64,
}

impl ZyzAngles {
    pub fn matrix(&self) -> Mat2 {
        (rz_matrix(self.alpha) * ry_matrix(self.theta) * rz_matrix(self.beta)).scale(cis(self.delta))
    }
}

pub fn zyz_decompose(u: &Mat2) -> Result<ZyzAngles> {
    let deviation = u.unitarity_deviation();
    if !u.is_finite() || deviation > Tolerance::default().eps() {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(zyz_decompose_unchecked(u))
}

/// ZYZ angles without the unitarity check. The caller guarantees `u` is
/// unitary; the result is meaningless otherwise.
pub fn zyz_decompose_unchecked(u: &Mat2) -> ZyzAngles {
    let delta = u.det().arg() / 2.0;
    let v = u.scale(cis(-delta));
    let a = (v.0[0][0] + v.0[1][1].conj()) / 2.0;
    let b = (v.0[0][1] - v.0[1][0].conj()) / 2.0;
    let theta = 2.0 * b.norm().atan2(a.norm());
    let (alpha, beta) = if b.norm() < DEGENERATE_EPS {
        (0.0, -2.0 * a.arg())
    } else if a.norm() < DEGENERATE_EPS {
        (0.0, 2.0 * b.arg())
    } else {
        (-(a.arg() + b.arg()), b.arg() - a.arg())
    };
    ZyzAngles { delta, alpha, theta, beta }
}

/// Rz(β), Ry(θ), Rz(α) in diagram order with phase `e^{iδ}`; trivial
/// rotations are dropped.
pub fn zyz_to_gates(z: &ZyzAngles, line: Line) -> Circuit {
    let mut gates = Vec::with_capacity(3);
    let mut phase = cis(z.delta);
    phase *= push_rotation(&mut gates, Gate::rz(line, z.beta));
    phase *= push_rotation(&mut gates, Gate::ry(line, z.theta));
    phase *= push_rotation(&mut gates, Gate::rz(line, z.alpha));
    Circuit { gates, global_phase: phase }
}

/// Gates for an arbitrary one-qubit unitary on `line`.
pub fn one_qubit_gates(u: &Mat2, line: Line) -> Circuit {
    zyz_to_gates(&zyz_decompose_unchecked(u), line)
}

/// The factors `A`, `B`, `C` and the control phase `δ` of a controlled-V,
/// with `ABC = I` and `A·X·B·X·C = e^{−iδ}·V`.
#[derive(Debug, Clone, Copy)]
pub struct ControlledVParts {
    pub angles: ZyzAngles,
    pub a: Mat2,
    pub b: Mat2,
    pub c: Mat2,
}

impl ControlledVParts {
    pub fn new(v: &Mat2) -> Result<Self> {
        let angles = zyz_decompose(v)?;
        let ZyzAngles { alpha, theta, beta, .. } = angles;
        Ok(ControlledVParts {
            angles,
            a: rz_matrix(alpha) * ry_matrix(theta / 2.0),
            b: ry_matrix(-theta / 2.0) * rz_matrix(-(alpha + beta) / 2.0),
            c: rz_matrix((beta - alpha) / 2.0),
        })
    }

    /// `C`, CNOT, `B`, CNOT: everything up to (not including) `A` and `D`.
    pub fn core_circuit(&self, control: Line) -> Circuit {
        let ZyzAngles { alpha, theta, beta, .. } = self.angles;
        let target = control.other();
        let mut gates = Vec::with_capacity(5);
        let mut phase = ONE;
        phase *= push_rotation(&mut gates, Gate::rz(target, (beta - alpha) / 2.0));
        gates.push(Gate::cnot(control));
        phase *= push_rotation(&mut gates, Gate::rz(target, -(alpha + beta) / 2.0));
        phase *= push_rotation(&mut gates, Gate::ry(target, -theta / 2.0));
        gates.push(Gate::cnot(control));
        Circuit { gates, global_phase: phase }
    }

    /// `A = Rz(α)·Ry(θ/2)` on the target line.
    pub fn a_circuit(&self, control: Line) -> Circuit {
        let target = control.other();
        let mut gates = Vec::with_capacity(2);
        let mut phase = ONE;
        phase *= push_rotation(&mut gates, Gate::ry(target, self.angles.theta / 2.0));
        phase *= push_rotation(&mut gates, Gate::rz(target, self.angles.alpha));
        Circuit { gates, global_phase: phase }
    }

    /// `diag(1, e^{iδ}) = e^{iδ/2}·Rz(δ)` on the control line.
    pub fn d_circuit(&self, control: Line) -> Circuit {
        let delta = self.angles.delta;
        let mut gates = Vec::with_capacity(1);
        let phase = cis(delta / 2.0) * push_rotation(&mut gates, Gate::rz(control, delta));
        Circuit { gates, global_phase: phase }
    }

    pub fn control_phase(&self) -> C64 {
        cis(self.angles.delta)
    }
}

/// Circuit for `V` applied to the other line when `control` is 1.
pub fn controlled_v_gates(v: &Mat2, control: Line) -> Result<Circuit> {
    let parts = ControlledVParts::new(v)?;
    let mut c = parts.core_circuit(control);
    c.append(&parts.a_circuit(control));
    c.append(&parts.d_circuit(control));
    Ok(c)
}
