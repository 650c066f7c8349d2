//! Synthesis of two-qubit unitaries into circuits of elementary gates.
//!
//! The gate library is `Ry(θ)`, `Rz(α)` on either line and the CNOT
//! controlled by either line. Three backends are provided:
//!
//! * [`kak::synth_kak`]: KAK decomposition through the magic basis, at most
//!   23 gates of which at most 4 are CNOTs.
//! * [`qr::synth_qr`]: Givens-rotation QR baseline, at most 61 gates / 18 CNOTs.
//! * [`kak::synth_sandwich`]: `E·D·E*` variant with explicit entangler
//!   circuits, at most 28 gates.
//!
//! Every backend returns a [`kak::SynthesisReport`] whose circuit evaluates to
//! the input matrix (the global phase is tracked exactly).

pub mod cli;
pub mod diag;
pub mod error;
pub mod gate;
pub mod haar;
pub mod kak;
pub mod magic;
pub mod mat;
pub mod qr;
pub mod samples;
pub mod su2;

pub use error::{Error, Result};
pub use gate::{Circuit, Gate, GateCounts, Line};
pub use kak::{synthesize, Backend, SynthOptions, SynthesisReport};
pub use mat::{Mat2, Mat4, Tolerance, C64};
