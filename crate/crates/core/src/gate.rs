//! Elementary gates, circuits, evaluation and peephole simplification.
//!
//! A [`Circuit`] lists gates in diagram order: the first gate is applied
//! first, so its matrix is the rightmost factor of the product.

use std::f64::consts::PI;
use std::fmt;

use crate::mat::{Mat2, Mat4, C64, ONE};
use crate::su2;

const TWO_PI: f64 = 2.0 * PI;
const FOUR_PI: f64 = 4.0 * PI;

/// Rotations within this distance of a multiple of 2π are treated as exact.
pub const ANGLE_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Line {
    /// Most significant basis bit.
    Top,
    Bottom,
}

impl Line {
    pub fn other(self) -> Line {
        match self {
            Line::Top => Line::Bottom,
            Line::Bottom => Line::Top,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Line::Top => 0,
            Line::Bottom => 1,
        }
    }

    pub fn from_index(k: usize) -> Option<Line> {
        match k {
            0 => Some(Line::Top),
            1 => Some(Line::Bottom),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Ry { line: Line, angle: f64 },
    Rz { line: Line, angle: f64 },
    /// Controlled NOT; the target is the other line.
    Cnot { control: Line },
}

/// Reduces an angle into `[0, 4π)`, the period of `Ry`/`Rz`.
pub fn wrap_4pi(angle: f64) -> f64 {
    let a = angle.rem_euclid(FOUR_PI);
    if a >= FOUR_PI {
        0.0
    } else {
        a
    }
}

impl Gate {
    pub fn ry(line: Line, angle: f64) -> Gate {
        Gate::Ry { line, angle: wrap_4pi(angle) }
    }

    pub fn rz(line: Line, angle: f64) -> Gate {
        Gate::Rz { line, angle: wrap_4pi(angle) }
    }

    pub fn cnot(control: Line) -> Gate {
        Gate::Cnot { control }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    /// The line a rotation acts on; `None` for a CNOT, which touches both.
    pub fn rotation_line(&self) -> Option<Line> {
        match *self {
            Gate::Ry { line, .. } | Gate::Rz { line, .. } => Some(line),
            Gate::Cnot { .. } => None,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => Some(angle),
            Gate::Cnot { .. } => None,
        }
    }

    fn with_angle(&self, angle: f64) -> Gate {
        match *self {
            Gate::Ry { line, .. } => Gate::ry(line, angle),
            Gate::Rz { line, .. } => Gate::rz(line, angle),
            g @ Gate::Cnot { .. } => g,
        }
    }

    fn same_rotation_kind(&self, other: &Gate) -> bool {
        matches!(
            (self, other),
            (Gate::Ry { line: a, .. }, Gate::Ry { line: b, .. })
                | (Gate::Rz { line: a, .. }, Gate::Rz { line: b, .. }) if a == b
        )
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Ry { line, angle } => Gate::ry(line, -angle),
            Gate::Rz { line, angle } => Gate::rz(line, -angle),
            g @ Gate::Cnot { .. } => g,
        }
    }

    pub fn matrix(&self) -> Mat4 {
        gate_matrix(self)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Ry { line, angle } => write!(f, "ry {} {:.16e}", line.index(), angle),
            Gate::Rz { line, angle } => write!(f, "rz {} {:.16e}", line.index(), angle),
            Gate::Cnot { control } => write!(f, "cnot {} {}", control.index(), control.other().index()),
        }
    }
}

/// `Ry(θ) = [[cos θ/2, sin θ/2], [−sin θ/2, cos θ/2]]`.
pub fn ry_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    Mat2::from_real([[c, s], [-s, c]])
}

/// `Rz(α) = diag(e^{−iα/2}, e^{iα/2})`.
pub fn rz_matrix(alpha: f64) -> Mat2 {
    Mat2::diag(C64::from_polar(1.0, -alpha / 2.0), C64::from_polar(1.0, alpha / 2.0))
}

fn on_line(m: &Mat2, line: Line) -> Mat4 {
    match line {
        Line::Top => Mat4::kron(m, &Mat2::identity()),
        Line::Bottom => Mat4::kron(&Mat2::identity(), m),
    }
}

pub fn gate_matrix(g: &Gate) -> Mat4 {
    match *g {
        Gate::Ry { line, angle } => on_line(&ry_matrix(angle), line),
        Gate::Rz { line, angle } => on_line(&rz_matrix(angle), line),
        Gate::Cnot { control: Line::Top } => Mat4::top_cnot(),
        Gate::Cnot { control: Line::Bottom } => Mat4::bot_cnot(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub total: usize,
    pub cnots: usize,
    pub rotations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
    pub global_phase: C64,
}

impl Default for Circuit {
    fn default() -> Self {
        Circuit::new()
    }
}

impl Circuit {
    pub fn new() -> Self {
        Circuit { gates: Vec::new(), global_phase: ONE }
    }

    pub fn from_gates(gates: Vec<Gate>) -> Self {
        Circuit { gates, global_phase: ONE }
    }

    pub fn with_phase(mut self, phase: C64) -> Self {
        self.global_phase = phase;
        self
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    /// Appends `other` after `self` in diagram order.
    pub fn append(&mut self, other: &Circuit) {
        self.gates.extend_from_slice(&other.gates);
        self.global_phase *= other.global_phase;
    }

    pub fn concat(&self, other: &Circuit) -> Circuit {
        let mut out = self.clone();
        out.append(other);
        out
    }

    /// The circuit implementing the inverse operator.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            global_phase: self.global_phase.conj(),
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn eval(&self) -> Mat4 {
        eval_circuit(self)
    }

    pub fn counts(&self) -> GateCounts {
        count_gates(self)
    }

    pub fn simplified(&self) -> Circuit {
        simplify(self)
    }

    /// Rewrites every angle into `[0, 2π)`, moving the sign into the phase.
    pub fn normalized(&self) -> Circuit {
        let mut phase = self.global_phase;
        let gates = self
            .gates
            .iter()
            .map(|g| match g.angle() {
                Some(a) if wrap_4pi(a) >= TWO_PI => {
                    phase = -phase;
                    g.with_angle(wrap_4pi(a) - TWO_PI)
                }
                _ => *g,
            })
            .collect();
        Circuit { gates, global_phase: phase }
    }
}

pub fn eval_circuit(c: &Circuit) -> Mat4 {
    let mut m = Mat4::identity();
    for g in &c.gates {
        m = gate_matrix(g) * m;
    }
    m.scale(c.global_phase)
}

/// Frobenius distance between `a` and `b` minimised over a global phase on `b`.
pub fn phase_distance(a: &Mat4, b: &Mat4) -> f64 {
    let overlap = (a.adjoint() * *b).trace();
    let lambda = if overlap.norm() == 0.0 { ONE } else { overlap.conj() / overlap.norm() };
    (*a - b.scale(lambda)).frobenius_norm()
}

pub fn count_gates(c: &Circuit) -> GateCounts {
    let cnots = c.gates.iter().filter(|g| g.is_cnot()).count();
    GateCounts { total: c.gates.len(), cnots, rotations: c.gates.len() - cnots }
}

/// Pushes a rotation onto a stack, dropping it when trivial. Returns the
/// phase factor picked up by folding a 2π rotation.
pub(crate) fn push_rotation(stack: &mut Vec<Gate>, g: Gate) -> C64 {
    match classify_angle(g.angle().unwrap_or(0.0)) {
        AngleClass::Zero => ONE,
        AngleClass::TwoPi => -ONE,
        AngleClass::General => {
            stack.push(g);
            ONE
        }
    }
}

enum AngleClass {
    Zero,
    TwoPi,
    General,
}

fn classify_angle(angle: f64) -> AngleClass {
    let a = wrap_4pi(angle);
    if a <= ANGLE_EPS || FOUR_PI - a <= ANGLE_EPS {
        AngleClass::Zero
    } else if (a - TWO_PI).abs() <= ANGLE_EPS {
        AngleClass::TwoPi
    } else {
        AngleClass::General
    }
}

/// One left-to-right sweep of rules (1)–(4). Returns the rewritten gate list
/// and the accumulated phase factor.
fn peephole_pass(gates: &[Gate]) -> (Vec<Gate>, C64) {
    let mut stack: Vec<Gate> = Vec::with_capacity(gates.len());
    let mut phase = ONE;
    for &g in gates {
        match g.rotation_line() {
            None => {
                if stack.last() == Some(&g) {
                    stack.pop();
                } else {
                    stack.push(g);
                }
            }
            Some(line) => {
                // Look back past rotations on the other line for a partner.
                let mut partner = None;
                for k in (0..stack.len()).rev() {
                    let h = stack[k];
                    if h.same_rotation_kind(&g) {
                        partner = Some(k);
                        break;
                    }
                    if h.rotation_line() != Some(line.other()) {
                        break;
                    }
                }
                match partner {
                    Some(k) => {
                        let merged = stack[k].with_angle(stack[k].angle().unwrap() + g.angle().unwrap());
                        match classify_angle(merged.angle().unwrap()) {
                            AngleClass::General => stack[k] = merged,
                            AngleClass::Zero => {
                                stack.remove(k);
                            }
                            AngleClass::TwoPi => {
                                stack.remove(k);
                                phase = -phase;
                            }
                        }
                    }
                    None => phase *= push_rotation(&mut stack, g),
                }
            }
        }
    }
    (stack, phase)
}

/// Rule (5): inside each CNOT-free segment, replace a line's rotation run by
/// its ZYZ form when that form is strictly shorter.
fn fuse_runs(gates: &[Gate]) -> (Vec<Gate>, C64) {
    let mut out = Vec::with_capacity(gates.len());
    let mut phase = ONE;
    for segment in gates.split_inclusive(|g| g.is_cnot()) {
        let (body, tail) = match segment.last() {
            Some(g) if g.is_cnot() => (&segment[..segment.len() - 1], Some(*g)),
            _ => (segment, None),
        };
        let mut lines: [Vec<Gate>; 2] = [Vec::new(), Vec::new()];
        for g in body {
            if let Some(line) = g.rotation_line() {
                lines[line.index()].push(*g);
            }
        }
        let mut fused_any = false;
        for (k, run) in lines.iter_mut().enumerate() {
            if run.len() < 2 {
                continue;
            }
            let line = Line::from_index(k).expect("two lines");
            let mut u = Mat2::identity();
            for g in run.iter() {
                let m = match *g {
                    Gate::Ry { angle, .. } => ry_matrix(angle),
                    Gate::Rz { angle, .. } => rz_matrix(angle),
                    Gate::Cnot { .. } => unreachable!("segments contain no CNOT"),
                };
                u = m * u;
            }
            let z = su2::zyz_decompose_unchecked(&u);
            let short = su2::zyz_to_gates(&z, line);
            if short.len() < run.len() {
                *run = short.gates;
                phase *= short.global_phase;
                fused_any = true;
            }
        }
        if fused_any {
            out.extend(lines[0].iter().chain(lines[1].iter()).copied());
        } else {
            out.extend_from_slice(body);
        }
        out.extend(tail);
    }
    (out, phase)
}

/// Peephole simplification run to a fixed point; the evaluated matrix,
/// including the global phase, is preserved. Angles in the result lie in
/// `[0, 2π)`.
pub fn simplify(c: &Circuit) -> Circuit {
    let mut gates = c.gates.clone();
    let mut phase = c.global_phase;
    loop {
        let before = gates.len();
        let (g1, p1) = peephole_pass(&gates);
        let (g2, p2) = fuse_runs(&g1);
        gates = g2;
        phase *= p1 * p2;
        if gates.len() >= before {
            break;
        }
    }
    phase /= phase.norm();
    Circuit { gates, global_phase: phase }.normalized()
}
