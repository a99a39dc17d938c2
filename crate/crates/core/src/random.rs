//! Seeded sampling of states, unitaries and channel parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qcore::{c, CMatrix, Complex64, DensityMatrix, Ket, Operator};

pub type SimRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for sub-task `index` of a run seeded with `seed`.
pub fn sub_rng(seed: u64, index: u64) -> SimRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index.wrapping_add(1));
    r
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Haar-random pure state: a normalized vector of independent complex Gaussians.
pub fn haar_ket<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Ket {
    let d: usize = dims.iter().product();
    let v: Vec<Complex64> = (0..d).map(|_| gaussian_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ket::new(v.into_iter().map(|z| z / norm).collect(), dims.to_vec()).expect("normalized by construction")
}

/// Random full-rank mixed state `G G† / tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let g = gaussian_matrix(rng, d, d);
    let m = &g * g.adjoint();
    let tr = m.trace();
    let m = m.map(|z| z / tr);
    let m = (&m + m.adjoint()).map(|z| z * 0.5);
    DensityMatrix::new(Operator::new(m, dims.to_vec()).expect("dims match")).expect("positive by construction")
}

/// Haar-random unitary from the QR decomposition of a Gaussian matrix, with the
/// phases of the R diagonal absorbed into Q.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Operator {
    let d: usize = dims.iter().product();
    let qr = gaussian_matrix(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let z = r[(k, k)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { c(1.0, 0.0) };
        for row in 0..d {
            q[(row, k)] *= phase;
        }
    }
    Operator::new(q, dims.to_vec()).expect("dims match")
}

/// Another Kraus representation of the same channel: `L_i = Σ_j V_ij K_j` for a
/// random isometry `V` with `extra` more rows than columns.
pub fn recombine_kraus<R: Rng + ?Sized>(rng: &mut R, kraus: &[Operator], extra: usize) -> Vec<Operator> {
    let m = kraus.len();
    let u = random_unitary(rng, &[m + extra]);
    let v = u.matrix();
    (0..m + extra)
        .map(|i| {
            let mut acc = kraus[0].scale(v[(i, 0)]);
            for (j, k) in kraus.iter().enumerate().skip(1) {
                acc = acc.add(&k.scale(v[(i, j)])).expect("same shape");
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::max_abs;

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(3);
        let u = random_unitary(&mut r, &[2, 2]);
        let prod = u.matrix().adjoint() * u.matrix();
        assert!(max_abs(&(prod - CMatrix::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn same_seed_same_draws() {
        let a = haar_ket(&mut rng(11), &[2]);
        let b = haar_ket(&mut rng(11), &[2]);
        assert_eq!(a, b);
        let c1 = haar_ket(&mut sub_rng(11, 0), &[2]);
        let c2 = haar_ket(&mut sub_rng(11, 1), &[2]);
        assert_ne!(c1, c2);
    }

    #[test]
    fn random_density_is_valid() {
        let rho = random_density(&mut rng(5), &[2, 2]);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(rho.min_eigenvalue() > 0.0);
    }
}
