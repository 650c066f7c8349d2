//! Random matrices for property tests and benchmarks.
//!
//! Unitaries are Haar distributed: a complex Gaussian matrix is
//! orthonormalized column by column with modified Gram–Schmidt, which leaves
//! a triangular factor with positive diagonal.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::diag::Diag4;
use crate::mat::{cis, Mat2, Mat4, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

fn gram_schmidt<const N: usize>(cols: &mut [[C64; N]; N]) {
    for j in 0..N {
        for k in 0..j {
            let proj: C64 = (0..N).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..N {
                let v = cols[k][i];
                cols[j][i] -= proj * v;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
}

fn haar_columns<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> [[C64; N]; N] {
    let mut cols = [[C64::new(0.0, 0.0); N]; N];
    for col in cols.iter_mut() {
        for z in col.iter_mut() {
            *z = gaussian(rng);
        }
    }
    gram_schmidt(&mut cols);
    cols
}

pub fn haar_unitary2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let c = haar_columns::<2, R>(rng);
    Mat2::new(std::array::from_fn(|i| std::array::from_fn(|j| c[j][i])))
}

pub fn haar_unitary4<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let c = haar_columns::<4, R>(rng);
    Mat4::new(std::array::from_fn(|i| std::array::from_fn(|j| c[j][i])))
}

/// Haar unitary rescaled to determinant 1.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let u = haar_unitary2(rng);
    u.scale(C64::new(1.0, 0.0) / u.det().sqrt())
}

/// Haar orthogonal matrix with the first column negated if needed so the
/// determinant is 1.
pub fn random_so4<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let mut cols = [[C64::new(0.0, 0.0); 4]; 4];
    for col in cols.iter_mut() {
        for z in col.iter_mut() {
            let x: f64 = StandardNormal.sample(rng);
            *z = C64::new(x, 0.0);
        }
    }
    gram_schmidt(&mut cols);
    let mut m = Mat4::new(std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i])));
    if m.det().re < 0.0 {
        for row in m.0.iter_mut() {
            row[0] = -row[0];
        }
    }
    m
}

/// Diagonal unitary with independent uniform phases.
pub fn random_diag4<R: Rng + ?Sized>(rng: &mut R) -> Diag4 {
    Diag4 { z: std::array::from_fn(|_| cis(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))) }
}
