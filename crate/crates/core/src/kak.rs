//! KAK synthesis through the magic basis, the sandwich variant, and the
//! backend-agnostic [`synthesize`] entry point.
//!
//! For a unitary `U` normalized to `det U = 1` the decomposition reads
//! `U = (U1⊗U2)·E·√D·E*·(U5⊗U6)`. The middle factor is block diagonal after
//! conjugation by the bottom-controlled CNOT, which yields a single
//! top-controlled gate plus a free one-qubit factor on the bottom line.

use std::fmt;
use std::str::FromStr;

use crate::diag::{synth_diag, Diag4, Orientation};
use crate::error::{Error, Result};
use crate::gate::{phase_distance, simplify, Circuit, Gate, GateCounts, Line};
use crate::magic::{disentangler_circuit, entangler_circuit, magic_conjugate, so4_to_tensor, to_magic_basis};
use crate::mat::{cis, spectral_symmetric_unitary, Mat2, Mat4, Tolerance, C64};
use crate::qr;
use crate::su2::{one_qubit_gates, ControlledVParts};

/// Internal tolerance for the intermediate symmetric-unitary and SO(4)
/// checks; looser than the user tolerance since errors compound.
const INTERNAL_EPS: f64 = 1e-7;

/// Arguments within this distance of −π are read as +π before halving.
const BRANCH_EPS: f64 = 1e-7;

/// Every accepted synthesis reconstructs its input to this phase distance.
pub const MAX_RECONSTRUCTION_ERROR: f64 = 1e-8;

/// Square roots of `d` whose product equals `target_det`.
///
/// Principal roots are taken first; if their product is `−target_det`, the
/// root with the largest imaginary part (lowest index on ties) changes sign.
pub fn sqrt_with_det(d: &[C64; 4], target_det: C64) -> Result<Diag4> {
    let mut roots = d.map(|z| {
        let mut arg = z.arg();
        if arg < -std::f64::consts::PI + BRANCH_EPS {
            arg = std::f64::consts::PI;
        }
        cis(arg / 2.0)
    });
    let product: C64 = roots.iter().product();
    if (product - target_det).norm() <= 1e-8 {
        return Ok(Diag4 { z: roots });
    }
    if (product + target_det).norm() > 1e-8 {
        return Err(Error::DetMismatch);
    }
    let mut pick = 0;
    for k in 1..4 {
        if roots[k].im.abs() > roots[pick].im.abs() + 1e-12 {
            pick = k;
        }
    }
    roots[pick] = -roots[pick];
    Ok(Diag4 { z: roots })
}

/// `(E*·u·E)·(E*·u·E)ᵗ`, the square of the symmetric polar factor.
pub fn magic_p_squared(u: &Mat4) -> Mat4 {
    let m = to_magic_basis(u);
    m * m.transpose()
}

/// All factors of the decomposition
/// `u = phase·(u1⊗u2)·E·diag(sqrt_d)·E*·(u5⊗u6)`, where
/// `E·diag(sqrt_d)·E* = botCNOT·((I⊗u4)·(I ⊕ u3))·botCNOT`.
#[derive(Debug, Clone)]
pub struct KakFactors {
    /// `det(u)^{1/4}`, removed before decomposing.
    pub phase: C64,
    pub k2: Mat4,
    pub sqrt_d: Diag4,
    pub k1: Mat4,
    pub u1: Mat2,
    pub u2: Mat2,
    pub u5: Mat2,
    pub u6: Mat2,
    /// Applied to the bottom line when the top line is set.
    pub u3: Mat2,
    /// Applied to the bottom line unconditionally, after `u3`.
    pub u4: Mat2,
}

impl KakFactors {
    /// `E·diag(√D)·E*`.
    pub fn middle(&self) -> Mat4 {
        magic_conjugate(&self.sqrt_d.matrix())
    }

    /// Product of all factors; equals the decomposed matrix.
    pub fn reconstruct(&self) -> Mat4 {
        (Mat4::kron(&self.u1, &self.u2) * self.middle() * Mat4::kron(&self.u5, &self.u6)).scale(self.phase)
    }
}

fn check_unitary(u: &Mat4, tol: Tolerance) -> Result<()> {
    let deviation = u.unitarity_deviation();
    if !u.is_finite() || deviation > tol.eps() {
        return Err(Error::NotUnitary { deviation: if deviation.is_nan() { f64::INFINITY } else { deviation } });
    }
    Ok(())
}

pub fn kak_decompose(u: &Mat4) -> Result<KakFactors> {
    kak_decompose_with(u, Tolerance::default())
}

pub fn kak_decompose_with(u: &Mat4, tol: Tolerance) -> Result<KakFactors> {
    check_unitary(u, tol)?;
    let internal = Tolerance::new(INTERNAL_EPS)?;
    let phase = cis(u.det().arg() / 4.0);
    let un = u.scale(phase.conj());

    let p2 = magic_p_squared(&un);
    let (k2, d) = spectral_symmetric_unitary(&p2, internal)?;
    let det = un.det();
    let sqrt_d = sqrt_with_det(&d, det / det.norm())?;

    let p = k2 * sqrt_d.matrix() * k2.transpose();
    let k1 = p.conj() * to_magic_basis(&un);
    if !k1.is_special_orthogonal(internal) {
        return Err(Error::DecompositionFailed("K1 is not in SO(4)".into()));
    }
    let k1 = Mat4::from_real(k1.real_part());

    let (u1, u2) = so4_to_tensor(&k2)?;
    let (u5, u6) = so4_to_tensor(&(k2.transpose() * k1))?;

    let m = magic_conjugate(&sqrt_d.matrix());
    let u4 = Mat2::new([[m.0[0][0], m.0[0][3]], [m.0[3][0], m.0[3][3]]]);
    let b = Mat2::new([[m.0[2][2], m.0[2][1]], [m.0[1][2], m.0[1][1]]]);
    let u3 = u4.adjoint() * b;

    Ok(KakFactors { phase, k2, sqrt_d, k1, u1, u2, u5, u6, u3, u4 })
}

/// The template circuit for a decomposition. With `merge` the free factor
/// `u4` is folded into the last target-line factor of the controlled gate,
/// giving at most 23 gates; without it the circuit has up to 25.
pub fn kak_circuit(f: &KakFactors, merge: bool) -> Result<Circuit> {
    let mut c = Circuit::new().with_phase(f.phase);
    c.append(&one_qubit_gates(&f.u5, Line::Top));
    c.append(&one_qubit_gates(&f.u6, Line::Bottom));
    c.push(Gate::cnot(Line::Bottom));

    let parts = ControlledVParts::new(&f.u3)?;
    c.append(&parts.core_circuit(Line::Top));
    c.append(&parts.d_circuit(Line::Top));
    if merge {
        c.append(&one_qubit_gates(&(f.u4 * parts.a), Line::Bottom));
    } else {
        c.append(&parts.a_circuit(Line::Top));
        c.append(&one_qubit_gates(&f.u4, Line::Bottom));
    }

    c.push(Gate::cnot(Line::Bottom));
    c.append(&one_qubit_gates(&f.u1, Line::Top));
    c.append(&one_qubit_gates(&f.u2, Line::Bottom));
    Ok(c)
}

/// `U5⊗U6`, `E*`, `√D` (rotations first), `E`, `U1⊗U2`.
pub fn sandwich_circuit(f: &KakFactors) -> Circuit {
    let mut c = Circuit::new().with_phase(f.phase);
    c.append(&one_qubit_gates(&f.u5, Line::Top));
    c.append(&one_qubit_gates(&f.u6, Line::Bottom));
    c.append(&disentangler_circuit());
    c.append(&synth_diag(&f.sqrt_d, Orientation::Flipped));
    c.append(&entangler_circuit());
    c.append(&one_qubit_gates(&f.u1, Line::Top));
    c.append(&one_qubit_gates(&f.u2, Line::Bottom));
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Kak,
    Qr,
    Sandwich,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Kak, Backend::Qr, Backend::Sandwich];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Kak => "kak",
            Backend::Qr => "qr",
            Backend::Sandwich => "sandwich",
        }
    }

    /// Worst-case `(total, cnots)` after simplification.
    pub fn gate_bound(self) -> (usize, usize) {
        match self {
            Backend::Kak => (23, 4),
            Backend::Qr => (61, 18),
            Backend::Sandwich => (28, 8),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "kak" => Ok(Backend::Kak),
            "qr" => Ok(Backend::Qr),
            "sandwich" => Ok(Backend::Sandwich),
            other => Err(format!("unknown backend '{other}' (expected kak, qr or sandwich)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthOptions {
    /// Unitarity tolerance for the input matrix.
    pub tolerance: Tolerance,
    pub simplify: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { tolerance: Tolerance::default(), simplify: true }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisReport {
    pub backend: Backend,
    pub circuit: Circuit,
    pub counts: GateCounts,
    /// Phase distance between the evaluated circuit and the input.
    pub reconstruction_error: f64,
}

impl SynthesisReport {
    /// `backend=<b> total=<n> cnots=<c> rotations=<r> error=<e>`.
    pub fn summary_line(&self) -> String {
        format!(
            "backend={} total={} cnots={} rotations={} error={:e}",
            self.backend, self.counts.total, self.counts.cnots, self.counts.rotations, self.reconstruction_error
        )
    }
}

/// Simplifies if requested, then checks reconstruction and (when
/// `enforce_bound`) the backend's gate ceilings.
pub(crate) fn finish(u: &Mat4, backend: Backend, raw: Circuit, opts: &SynthOptions, enforce_bound: bool) -> Result<SynthesisReport> {
    let circuit = if opts.simplify { simplify(&raw) } else { raw.normalized() };
    let counts = circuit.counts();
    let reconstruction_error = phase_distance(u, &circuit.eval());
    if reconstruction_error.is_nan() || reconstruction_error > MAX_RECONSTRUCTION_ERROR {
        return Err(Error::DecompositionFailed(format!(
            "{backend} circuit misses the input by {reconstruction_error:e}"
        )));
    }
    let (max_total, max_cnots) = backend.gate_bound();
    if enforce_bound && (counts.total > max_total || counts.cnots > max_cnots) {
        return Err(Error::DecompositionFailed(format!(
            "{backend} circuit exceeds its bound: {} gates, {} CNOTs",
            counts.total, counts.cnots
        )));
    }
    Ok(SynthesisReport { backend, circuit, counts, reconstruction_error })
}

pub fn synth_kak(u: &Mat4) -> Result<SynthesisReport> {
    synth_kak_with(u, &SynthOptions::default())
}

pub fn synth_kak_with(u: &Mat4, opts: &SynthOptions) -> Result<SynthesisReport> {
    let f = kak_decompose_with(u, opts.tolerance)?;
    let raw = kak_circuit(&f, true)?;
    finish(u, Backend::Kak, raw, opts, true)
}

pub fn synth_sandwich(u: &Mat4) -> Result<SynthesisReport> {
    synth_sandwich_with(u, &SynthOptions::default())
}

pub fn synth_sandwich_with(u: &Mat4, opts: &SynthOptions) -> Result<SynthesisReport> {
    let f = kak_decompose_with(u, opts.tolerance)?;
    finish(u, Backend::Sandwich, sandwich_circuit(&f), opts, opts.simplify)
}

/// Synthesizes `u` with the chosen backend.
pub fn synthesize(u: &Mat4, backend: Backend, opts: &SynthOptions) -> Result<SynthesisReport> {
    match backend {
        Backend::Kak => synth_kak_with(u, opts),
        Backend::Qr => qr::synth_qr_with(u, opts),
        Backend::Sandwich => synth_sandwich_with(u, opts),
    }
}
