//! Fixed-size complex 2×2 and 4×4 matrices and the decompositions the
//! synthesis pipeline relies on.
//!
//! Basis order for [`Mat4`] is `|00⟩, |01⟩, |10⟩, |11⟩` with the top line as
//! the most significant bit.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Real 4×4 matrix, row-major.
pub type Real4 = [[f64; 4]; 4];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Eigenvalues closer than this are treated as one eigenspace.
pub const CLUSTER_EPS: f64 = 1e-7;

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Dimensionless comparison tolerance, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(f64);

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_finite() && eps > 0.0 {
            Ok(Tolerance(eps))
        } else {
            Err(Error::InvalidTolerance(eps))
        }
    }

    pub fn eps(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(1e-9)
    }
}

#[derive(Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

#[derive(Clone, Copy, PartialEq)]
pub struct Mat4(pub [[C64; 4]; 4]);

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, self.0.iter().map(|r| &r[..]))
    }
}

impl fmt::Debug for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, self.0.iter().map(|r| &r[..]))
    }
}

fn write_rows<'a>(f: &mut fmt::Formatter<'_>, rows: impl Iterator<Item = &'a [C64]>) -> fmt::Result {
    writeln!(f, "[")?;
    for row in rows {
        write!(f, " ")?;
        for z in row {
            write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
        }
        writeln!(f)?;
    }
    write!(f, "]")
}

impl Mat2 {
    pub const fn new(rows: [[C64; 2]; 2]) -> Self {
        Mat2(rows)
    }

    pub fn identity() -> Self {
        Mat2::diag(ONE, ONE)
    }

    pub fn zeros() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn diag(a: C64, b: C64) -> Self {
        Mat2([[a, ZERO], [ZERO, b]])
    }

    pub fn from_real(rows: [[f64; 2]; 2]) -> Self {
        Mat2(rows.map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    /// Pauli X.
    pub fn x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    /// Hadamard.
    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Mat2::from_real([[s, s], [s, -s]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn conj(&self) -> Self {
        Mat2(self.0.map(|r| r.map(|z| z.conj())))
    }

    pub fn det(&self) -> C64 {
        det2(self)
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2(self.0.map(|r| r.map(|z| z * s)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: Tolerance) -> bool {
        self.unitarity_deviation() <= tol.eps()
    }

    /// Max-entry deviation of `M·M*` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        (*self * self.adjoint()).max_abs_diff(&Mat2::identity())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl Mat4 {
    pub const fn new(rows: [[C64; 4]; 4]) -> Self {
        Mat4(rows)
    }

    pub fn identity() -> Self {
        Mat4::diag([ONE; 4])
    }

    pub fn zeros() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn diag(d: [C64; 4]) -> Self {
        let mut m = Mat4::zeros();
        for (k, z) in d.into_iter().enumerate() {
            m.0[k][k] = z;
        }
        m
    }

    pub fn from_real(rows: Real4) -> Self {
        Mat4(rows.map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    pub fn real_part(&self) -> Real4 {
        self.0.map(|r| r.map(|z| z.re))
    }

    pub fn imag_part(&self) -> Real4 {
        self.0.map(|r| r.map(|z| z.im))
    }

    pub fn diagonal(&self) -> [C64; 4] {
        std::array::from_fn(|k| self.0[k][k])
    }

    /// `a ⊗ b`: block `(i, j)` equals `a[i][j]·b`.
    pub fn kron(a: &Mat2, b: &Mat2) -> Self {
        let mut m = Mat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                    }
                }
            }
        }
        m
    }

    /// The 2×2 block at block-row `i`, block-column `j`.
    pub fn block(&self, i: usize, j: usize) -> Mat2 {
        let m = &self.0;
        Mat2([
            [m[2 * i][2 * j], m[2 * i][2 * j + 1]],
            [m[2 * i + 1][2 * j], m[2 * i + 1][2 * j + 1]],
        ])
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn transpose(&self) -> Self {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i])))
    }

    pub fn conj(&self) -> Self {
        Mat4(self.0.map(|r| r.map(|z| z.conj())))
    }

    pub fn det(&self) -> C64 {
        det4(self)
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat4(self.0.map(|r| r.map(|z| z * s)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-entry deviation of `M·M*` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        (*self * self.adjoint()).max_abs_diff(&Mat4::identity())
    }

    pub fn asymmetry(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }

    pub fn max_imag(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: Tolerance) -> bool {
        is_unitary(self, tol)
    }

    pub fn is_special_orthogonal(&self, tol: Tolerance) -> bool {
        is_special_orthogonal(self, tol)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `topCNOT`: exchanges `|10⟩ ↔ |11⟩` (control on the top line).
    pub fn top_cnot() -> Self {
        Mat4::permutation([0, 1, 3, 2])
    }

    /// `botCNOT`: exchanges `|01⟩ ↔ |11⟩` (control on the bottom line).
    pub fn bot_cnot() -> Self {
        Mat4::permutation([0, 3, 2, 1])
    }

    pub fn swap() -> Self {
        Mat4::permutation([0, 2, 1, 3])
    }

    /// Permutation matrix sending basis state `k` to `perm[k]`.
    pub fn permutation(perm: [usize; 4]) -> Self {
        let mut m = Mat4::zeros();
        for (k, &p) in perm.iter().enumerate() {
            m.0[p][k] = ONE;
        }
        m
    }
}

impl Mul for Mat4 {
    type Output = Mat4;

    fn mul(self, rhs: Mat4) -> Mat4 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j] + a[i][3] * b[3][j];
            }
        }
        Mat4(out)
    }
}

impl Add for Mat4 {
    type Output = Mat4;

    fn add(self, rhs: Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] + rhs.0[i][j])))
    }
}

impl Sub for Mat4 {
    type Output = Mat4;

    fn sub(self, rhs: Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] - rhs.0[i][j])))
    }
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    *a * *b
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::kron(a, b)
}

pub fn det2(m: &Mat2) -> C64 {
    m.0[0][0] * m.0[1][1] - m.0[0][1] * m.0[1][0]
}

const PERMS4: [[usize; 4]; 24] = [
    [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
    [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
    [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
    [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
];

fn parity(p: &[usize; 4]) -> f64 {
    let mut inversions = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Leibniz expansion over the 24 permutations.
pub fn det4(m: &Mat4) -> C64 {
    PERMS4
        .iter()
        .map(|p| m.0[0][p[0]] * m.0[1][p[1]] * m.0[2][p[2]] * m.0[3][p[3]] * parity(p))
        .sum()
}

pub fn is_unitary(m: &Mat4, tol: Tolerance) -> bool {
    m.unitarity_deviation() <= tol.eps()
}

pub fn is_special_orthogonal(m: &Mat4, tol: Tolerance) -> bool {
    is_unitary(m, tol) && m.max_imag() <= tol.eps() && (m.det() - ONE).norm() <= tol.eps()
}

#[cfg(test)]
fn real_transpose(m: &Real4) -> Real4 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i]))
}

fn real_mul(a: &Real4, b: &Real4) -> Real4 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

fn real_asymmetry(m: &Real4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((m[i][j] - m[j][i]).abs());
        }
    }
    worst
}

fn real_det(m: &Real4) -> f64 {
    PERMS4
        .iter()
        .map(|p| m[0][p[0]] * m[1][p[1]] * m[2][p[2]] * m[3][p[3]] * parity(p))
        .sum()
}

/// Cyclic Jacobi on the leading `n×n` block of `s` (which must be symmetric).
/// Returns eigenvectors as columns of the leading block and the unsorted
/// eigenvalues.
fn jacobi_in_place(s: &mut Real4, n: usize) -> (Real4, [f64; 4]) {
    let mut v = [[0.0; 4]; 4];
    for (k, row) in v.iter_mut().enumerate() {
        row[k] = 1.0;
    }
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| s[i][j] * s[i][j])
        .sum::<f64>()
        .sqrt()
        .max(1.0);

    for _sweep in 0..50 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum::<f64>()
            .sqrt();
        if off < 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = s[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for row in s.iter_mut().take(n) {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - sn * akq;
                    row[q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (s[p][k], s[q][k]);
                    s[p][k] = c * apk - sn * aqk;
                    s[q][k] = sn * apk + c * aqk;
                }
                s[p][q] = 0.0;
                s[q][p] = 0.0;
                for row in v.iter_mut().take(n) {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - sn * vkq;
                    row[q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut lambda = [0.0; 4];
    for (k, l) in lambda.iter_mut().enumerate().take(n) {
        *l = s[k][k];
    }
    (v, lambda)
}

/// Eigen-decomposition of a real symmetric 4×4 matrix by cyclic Jacobi sweeps.
///
/// Returns `(O, λ)` with eigenvectors in the columns of `O` and `λ` sorted in
/// descending order, so that `s = O·diag(λ)·Oᵗ`.
pub fn jacobi_eigen_sym4(s: &Real4, tol: Tolerance) -> Result<(Real4, [f64; 4])> {
    let asymmetry = real_asymmetry(s);
    if asymmetry > tol.eps() {
        return Err(Error::NonSymmetricInput { asymmetry });
    }
    let mut work = symmetrized(s);
    let (v, lambda) = jacobi_in_place(&mut work, 4);
    let mut order = [0, 1, 2, 3];
    insertion_sort_by(&mut order, |&a, &b| lambda[a] > lambda[b]);
    let o = std::array::from_fn(|i| std::array::from_fn(|j| v[i][order[j]]));
    Ok((o, order.map(|k| lambda[k])))
}

fn symmetrized(s: &Real4) -> Real4 {
    std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (s[i][j] + s[j][i])))
}

/// Stable sort for tiny slices with a "comes before" predicate. Tolerant
/// comparisons are not total orders, so `sort_by` is avoided.
fn insertion_sort_by<T: Copy>(xs: &mut [T], before: impl Fn(&T, &T) -> bool) {
    for i in 1..xs.len() {
        let mut j = i;
        while j > 0 && before(&xs[j], &xs[j - 1]) {
            xs.swap(j, j - 1);
            j -= 1;
        }
    }
}

/// Consecutive runs of (sorted) values whose neighbours lie within `eps`.
fn clusters(values: &[f64], eps: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || (values[k] - values[k - 1]).abs() > eps {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Re-diagonalizes `m` on the span of `basis[.., range]` and rotates those
/// columns of `basis` into the eigenvectors found. Returns the eigenvalues of
/// the restriction, sorted descending, with the columns reordered to match.
fn refine_on_subspace(m: &Real4, basis: &mut Real4, range: std::ops::Range<usize>) -> Vec<f64> {
    let k = range.len();
    let cols: Vec<usize> = range.clone().collect();
    // restricted = Qᵗ m Q, Q = basis[.., cols]
    let mut restricted = [[0.0; 4]; 4];
    for a in 0..k {
        for b in 0..k {
            let mut acc = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    acc += basis[i][cols[a]] * m[i][j] * basis[j][cols[b]];
                }
            }
            restricted[a][b] = acc;
        }
    }
    let restricted = symmetrized(&restricted);
    let mut work = restricted;
    let (w, lambda) = jacobi_in_place(&mut work, k);
    let mut order: Vec<usize> = (0..k).collect();
    insertion_sort_by(&mut order, |&a, &b| lambda[a] > lambda[b]);

    let old = *basis;
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..4 {
            basis[i][cols[dst]] = (0..k).map(|a| old[i][cols[a]] * w[a][src]).sum();
        }
    }
    order.iter().map(|&s| lambda[s]).collect()
}

fn rayleigh(m: &Real4, basis: &Real4, col: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += basis[i][col] * m[i][j] * basis[j][col];
        }
    }
    acc
}

/// Simultaneous diagonalization of two commuting real symmetric matrices.
///
/// Diagonalizes `b`, then `a` restricted to each (clustered) eigenspace of
/// `b`, then `b` again inside any remaining joint degeneracy. Returns `O` in
/// SO(4) with the joint eigenvectors as columns, i.e. `a = O·diag(da)·Oᵗ` and
/// `b = O·diag(db)·Oᵗ`. Pairs are ordered by `da` descending, ties (within
/// [`CLUSTER_EPS`]) by `db` descending; a negative determinant is fixed by
/// negating the last column.
pub fn joint_diag_commuting(a: &Real4, b: &Real4, tol: Tolerance) -> Result<(Mat4, [f64; 4], [f64; 4])> {
    let asymmetry = real_asymmetry(a).max(real_asymmetry(b));
    if asymmetry > tol.eps() {
        return Err(Error::NonSymmetricInput { asymmetry });
    }
    let ab = real_mul(a, b);
    let ba = real_mul(b, a);
    let residual = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| (ab[i][j] - ba[i][j]).abs())
        .fold(0.0, f64::max);
    if residual > 1e-7 {
        return Err(Error::NonCommutingInput { residual });
    }
    let (a, b) = (symmetrized(a), symmetrized(b));

    let (mut basis, lb) = jacobi_eigen_sym4(&b, tol)?;
    for range in clusters(&lb, CLUSTER_EPS) {
        if range.len() < 2 {
            continue;
        }
        let la = refine_on_subspace(&a, &mut basis, range.clone());
        for sub in clusters(&la, CLUSTER_EPS) {
            if sub.len() < 2 {
                continue;
            }
            let shifted = (range.start + sub.start)..(range.start + sub.end);
            refine_on_subspace(&b, &mut basis, shifted);
        }
    }

    let da: [f64; 4] = std::array::from_fn(|k| rayleigh(&a, &basis, k));
    let db: [f64; 4] = std::array::from_fn(|k| rayleigh(&b, &basis, k));
    let mut order = [0, 1, 2, 3];
    insertion_sort_by(&mut order, |&x, &y| {
        if (da[x] - da[y]).abs() > CLUSTER_EPS {
            da[x] > da[y]
        } else {
            db[x] > db[y] + CLUSTER_EPS
        }
    });
    let mut o: Real4 = std::array::from_fn(|i| std::array::from_fn(|j| basis[i][order[j]]));
    if real_det(&o) < 0.0 {
        for row in o.iter_mut() {
            row[3] = -row[3];
        }
    }
    Ok((Mat4::from_real(o), order.map(|k| da[k]), order.map(|k| db[k])))
}

/// Spectral decomposition of a symmetric unitary: `p = O·diag(δ)·Oᵗ` with
/// `O ∈ SO(4)` and unit-modulus `δ`, ordered by real part descending then
/// imaginary part descending.
pub fn spectral_symmetric_unitary(p: &Mat4, tol: Tolerance) -> Result<(Mat4, [C64; 4])> {
    if !p.is_finite() || p.unitarity_deviation() > tol.eps() || p.asymmetry() > tol.eps() {
        return Err(Error::NotSymmetricUnitary);
    }
    // P P̄ = 1 forces the real and imaginary parts to commute.
    let (o, da, db) = joint_diag_commuting(&p.real_part(), &p.imag_part(), tol)?;
    let delta = std::array::from_fn(|k| {
        let z = C64::new(da[k], db[k]);
        z / z.norm()
    });
    Ok((o, delta))
}

/// Unitary polar decomposition `m = p·z` with `p` symmetric unitary and
/// `z ∈ SO(4)`.
pub fn unitary_polar(m: &Mat4, tol: Tolerance) -> Result<(Mat4, Mat4)> {
    let deviation = m.unitarity_deviation();
    if !m.is_finite() || deviation > tol.eps() {
        return Err(Error::NotUnitary { deviation });
    }
    let p_squared = *m * m.transpose();
    let (o, delta) = spectral_symmetric_unitary(&p_squared, tol)?;
    let det = m.det();
    let root = crate::kak::sqrt_with_det(&delta, det / det.norm())?;
    let p = o * Mat4::diag(root.z) * o.transpose();
    let z = p.conj() * *m;
    Ok((p, z))
}

#[cfg(test)]
pub(crate) fn real_reconstruct(o: &Real4, lambda: &[f64; 4]) -> Real4 {
    let d: Real4 = std::array::from_fn(|i| std::array::from_fn(|j| if i == j { lambda[i] } else { 0.0 }));
    real_mul(&real_mul(o, &d), &real_transpose(o))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn off_diagonal(m: &Real4) -> f64 {
        (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j].abs())
            .fold(0.0, f64::max)
    }

    fn real_diff(a: &Real4, b: &Real4) -> f64 {
        (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (a[i][j] - b[i][j]).abs())
            .fold(0.0, f64::max)
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn tolerance_rejects_non_positive() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(-1.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        assert_eq!(Tolerance::default().eps(), 1e-9);
    }

    #[test]
    fn products_of_cnots() {
        let id = Mat4::identity();
        assert_eq!(id * id, id);
        assert_eq!(Mat4::top_cnot() * Mat4::top_cnot(), id);
        let swap = Mat4::bot_cnot() * Mat4::top_cnot() * Mat4::bot_cnot();
        assert_eq!(swap, Mat4::swap());
    }

    #[test]
    fn cnot_matrices_match_permutation_displays() {
        let top = Mat4::from_real([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let bot = Mat4::from_real([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ]);
        assert_eq!(Mat4::top_cnot(), top);
        assert_eq!(Mat4::bot_cnot(), bot);
        assert_eq!(Mat4::top_cnot().transpose(), Mat4::top_cnot());
    }

    #[test]
    fn kron_examples() {
        assert_eq!(Mat4::kron(&Mat2::identity(), &Mat2::identity()), Mat4::identity());
        let e = [cis(0.3), cis(1.1), cis(-0.4), cis(2.0)];
        let k = Mat4::kron(&Mat2::diag(e[0], e[1]), &Mat2::diag(e[2], e[3]));
        let expected = Mat4::diag([e[0] * e[2], e[0] * e[3], e[1] * e[2], e[1] * e[3]]);
        assert!(k.max_abs_diff(&expected) < 1e-15);
        // X ⊗ I swaps the two halves of the basis.
        let xi = Mat4::kron(&Mat2::x(), &Mat2::identity());
        assert_eq!(xi, Mat4::permutation([2, 3, 0, 1]));
    }

    #[test]
    fn determinants() {
        assert_eq!(det4(&Mat4::identity()), ONE);
        assert_eq!(det4(&Mat4::top_cnot()), -ONE);
        assert!((det4(&crate::samples::qft()) - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((det2(&Mat2::hadamard()) + ONE).norm() < 1e-15);
        // Leibniz expansion agrees with a triangular product.
        let mut t = Mat4::zeros();
        for i in 0..4 {
            for j in i..4 {
                t.0[i][j] = C64::new((i + 2 * j) as f64, (j as f64) - 1.0);
            }
        }
        let diag_product: C64 = (0..4).map(|k| t.0[k][k]).product();
        assert!((det4(&t) - diag_product).norm() < 1e-12);
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(Mat4::identity().adjoint(), Mat4::identity());
        let e = crate::magic::entangler_matrix();
        assert!((e.adjoint() * e).max_abs_diff(&Mat4::identity()) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = haar::haar_unitary4(&mut rng);
        assert_eq!(m.adjoint(), m.transpose().conj());
    }

    #[test]
    fn unitary_and_special_orthogonal_predicates() {
        assert!(is_unitary(&Mat4::identity(), tol()));
        assert!(is_special_orthogonal(&Mat4::identity(), tol()));
        let e = crate::magic::entangler_matrix();
        assert!(is_unitary(&e, tol()));
        assert!(!is_special_orthogonal(&e, tol()));
        let s = FRAC_1_SQRT_2;
        let k2 = Mat4::from_real([
            [s, 0.0, 0.0, s],
            [0.0, s, -s, 0.0],
            [0.0, s, s, 0.0],
            [-s, 0.0, 0.0, s],
        ]);
        assert!(is_special_orthogonal(&k2, tol()));
        // det −1 is orthogonal but not special
        assert!(!is_special_orthogonal(&Mat4::top_cnot(), tol()));
        assert!(!is_unitary(&Mat4::identity().scale(C64::new(1.1, 0.0)), tol()));
    }

    #[test]
    fn jacobi_on_diagonal_input() {
        let s = [
            [3.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 4.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        let (o, lambda) = jacobi_eigen_sym4(&s, tol()).unwrap();
        assert_eq!(lambda, [4.0, 3.0, 1.0, 1.0]);
        for row in &o {
            assert_eq!(row.iter().filter(|x| x.abs() == 1.0).count(), 1);
        }
        assert!(real_diff(&real_reconstruct(&o, &lambda), &s) < 1e-15);
    }

    #[test]
    fn jacobi_on_antidiagonal_p_squared() {
        let s = [
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ];
        let (o, lambda) = jacobi_eigen_sym4(&s, tol()).unwrap();
        for (got, want) in lambda.iter().zip([1.0, 1.0, -1.0, -1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!(real_diff(&real_reconstruct(&o, &lambda), &s) < 1e-14);
    }

    #[test]
    fn jacobi_recovers_constructed_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let q = haar::random_so4(&mut rng).real_part();
            let mu: [f64; 4] = std::array::from_fn(|_| rand::Rng::gen_range(&mut rng, -3.0..3.0));
            let s = real_reconstruct(&q, &mu);
            let (o, lambda) = jacobi_eigen_sym4(&s, tol()).unwrap();
            assert!(real_diff(&real_reconstruct(&o, &lambda), &s) < 1e-10);
            assert!(lambda.windows(2).all(|w| w[0] >= w[1]));
            let want = sorted(mu.to_vec());
            let got = sorted(lambda.to_vec());
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn jacobi_rejects_asymmetric_input() {
        let mut s = [[0.0; 4]; 4];
        s[0][1] = 1.0;
        assert!(matches!(jacobi_eigen_sym4(&s, tol()), Err(Error::NonSymmetricInput { .. })));
    }

    #[test]
    fn joint_diag_identity() {
        let id = Mat4::identity().real_part();
        let (o, da, db) = joint_diag_commuting(&id, &id, tol()).unwrap();
        assert_eq!(da, [1.0; 4]);
        assert_eq!(db, [1.0; 4]);
        assert!(is_special_orthogonal(&o, tol()));
    }

    #[test]
    fn joint_diag_already_diagonal() {
        let a = Mat4::diag([1.0, 2.0, 3.0, 4.0].map(|x| C64::new(x, 0.0))).real_part();
        let b = Mat4::diag([4.0, 3.0, 2.0, 1.0].map(|x| C64::new(x, 0.0))).real_part();
        let (o, da, db) = joint_diag_commuting(&a, &b, tol()).unwrap();
        assert_eq!(da, [4.0, 3.0, 2.0, 1.0]);
        assert_eq!(db, [1.0, 2.0, 3.0, 4.0]);
        let o = o.real_part();
        for row in &o {
            assert_eq!(row.iter().filter(|x| x.abs() == 1.0).count(), 1);
        }
        let ot = real_transpose(&o);
        assert!(off_diagonal(&real_mul(&real_mul(&ot, &a), &o)) < 1e-15);
        assert!((real_det(&o) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn joint_diag_qft_p_squared() {
        let p2 = crate::kak::magic_p_squared(&crate::samples::qft());
        let (a, b) = (p2.real_part(), p2.imag_part());
        let (o, da, db) = joint_diag_commuting(&a, &b, tol()).unwrap();
        let o = o.real_part();
        let ot = real_transpose(&o);
        assert!(off_diagonal(&real_mul(&real_mul(&ot, &a), &o)) < 1e-8);
        assert!(off_diagonal(&real_mul(&real_mul(&ot, &b), &o)) < 1e-8);
        // eigenvalues of P² are {1, 1, i, i}
        let want = [ONE, ONE, I, I];
        for (k, w) in want.iter().enumerate() {
            assert!((C64::new(da[k], db[k]) - w).norm() < 1e-12, "{k}: {} {}", da[k], db[k]);
        }
    }

    #[test]
    fn joint_diag_rejects_non_commuting() {
        let a = Mat4::diag([1.0, 2.0, 3.0, 4.0].map(|x| C64::new(x, 0.0))).real_part();
        let mut b = [[0.0; 4]; 4];
        b[0][1] = 1.0;
        b[1][0] = 1.0;
        assert!(matches!(joint_diag_commuting(&a, &b, tol()), Err(Error::NonCommutingInput { .. })));
    }

    #[test]
    fn spectral_of_identity() {
        let (o, delta) = spectral_symmetric_unitary(&Mat4::identity(), tol()).unwrap();
        assert_eq!(o, Mat4::identity());
        assert_eq!(delta, [ONE; 4]);
    }

    #[test]
    fn spectral_of_qft_p_squared() {
        let p2 = crate::kak::magic_p_squared(&crate::samples::qft());
        let (o, delta) = spectral_symmetric_unitary(&p2, tol()).unwrap();
        let back = o * Mat4::diag(delta) * o.transpose();
        assert!(back.max_abs_diff(&p2) < 1e-8);
        // ordering: real part descending
        for (got, want) in delta.iter().zip([ONE, ONE, I, I]) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_rejects_non_symmetric() {
        assert_eq!(
            spectral_symmetric_unitary(&(Mat4::top_cnot().scale(I) * Mat4::bot_cnot()), tol()).unwrap_err(),
            Error::NotSymmetricUnitary
        );
    }

    #[test]
    fn spectral_recovers_random_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let o0 = haar::random_so4(&mut rng);
            let mu: [f64; 4] = std::array::from_fn(|_| rand::Rng::gen_range(&mut rng, -PI..PI));
            let p = o0 * Mat4::diag(mu.map(cis)) * o0.transpose();
            let (o, delta) = spectral_symmetric_unitary(&p, tol()).unwrap();
            assert!((o * Mat4::diag(delta) * o.transpose()).max_abs_diff(&p) < 1e-8);
            assert!(delta.iter().all(|d| (d.norm() - 1.0).abs() < 1e-9));
            let product: C64 = delta.iter().product();
            assert!((product - p.det()).norm() < 1e-8);
            // every planted phase is matched by some recovered eigenvalue
            for m in mu {
                assert!(delta.iter().any(|d| (d - cis(m)).norm() < 1e-8));
            }
        }
    }

    #[test]
    fn polar_of_orthogonal_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = haar::random_so4(&mut rng);
        let (p, z) = unitary_polar(&m, tol()).unwrap();
        assert!(p.max_abs_diff(&Mat4::identity()) < 1e-12);
        assert!(z.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn polar_of_scalar_phase() {
        let m = Mat4::identity().scale(I);
        let (p, z) = unitary_polar(&m, tol()).unwrap();
        assert!(p.max_abs_diff(&m) < 1e-12);
        assert!(z.max_abs_diff(&Mat4::identity()) < 1e-12);
    }

    #[test]
    fn polar_of_haar_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let m = haar::haar_unitary4(&mut rng);
            let (p, z) = unitary_polar(&m, tol()).unwrap();
            assert!((p * z).max_abs_diff(&m) < 1e-8);
            assert!(p.asymmetry() < 1e-9);
            assert!(is_special_orthogonal(&z, tol()));
        }
    }

    #[test]
    fn polar_rejects_non_unitary() {
        let m = Mat4::identity().scale(C64::new(2.0, 0.0));
        assert!(matches!(unitary_polar(&m, tol()), Err(Error::NotUnitary { .. })));
    }
}
