//! The fixed matrices used in the worked examples and the `examples`
//! subcommand.

use crate::mat::{Mat2, Mat4, C64, I, ONE};

/// `H ⊗ H`.
pub fn hadamard_pair() -> Mat4 {
    Mat4::kron(&Mat2::hadamard(), &Mat2::hadamard())
}

/// Oracle of Deutsch's algorithm for `f(x) = x + 1`: exchanges `|00⟩ ↔ |01⟩`.
pub fn deutsch_uf() -> Mat4 {
    Mat4::permutation([1, 0, 2, 3])
}

/// Two-qubit quantum Fourier transform.
pub fn qft() -> Mat4 {
    let h = C64::new(0.5, 0.0);
    Mat4::new([
        [ONE, ONE, ONE, ONE],
        [ONE, I, -ONE, -I],
        [ONE, -ONE, ONE, -ONE],
        [ONE, -I, -ONE, I],
    ])
    .scale(h)
}

/// `(file name, matrix)` for each bundled example.
pub fn named_examples() -> [(&'static str, Mat4); 3] {
    [("hxh.mat", hadamard_pair()), ("uf.mat", deutsch_uf()), ("qft.mat", qft())]
}
