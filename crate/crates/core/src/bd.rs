//! Block-diagonalization outer precoder.
//!
//! Each user's outer precoder `B_k` is an orthonormal basis of (part of) the
//! right null space of the stacked channels of all other users, so that
//! `H_l B_k = 0` for `l != k`. The user then sees the interference-free
//! equivalent channel `H_eq,k = H_k B_k`.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{complex_gaussian, stack_interferers, trial_rng, CMatrix, ChannelRealization};
use crate::error::{Error, Result};
use crate::scalar::{count, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct BdDecomposition<T: Real> {
    /// `N x L` outer precoder with orthonormal columns.
    pub b_outer: CMatrix<T>,
    /// `M x L` equivalent channel `H_k B_k`.
    pub h_eq: CMatrix<T>,
    pub l_dim: usize,
}

/// Orthonormal basis of `n_cols_needed` directions in the right null space
/// of `stacked` (taken from the trailing right singular vectors).
///
/// The numerical rank uses the threshold `max(rows, cols) * eps * s_max`.
pub fn null_space_basis<T: Real>(stacked: &CMatrix<T>, n_cols_needed: usize) -> Result<CMatrix<T>> {
    let n = stacked.ncols();
    let rows = stacked.nrows();
    if rows == 0 {
        if n_cols_needed > n {
            return Err(Error::Dimensionality { needed: n_cols_needed, available: n });
        }
        return Ok(CMatrix::<T>::identity(n, n_cols_needed));
    }

    // Thin SVD only returns min(rows, N) right vectors; zero padding to a
    // square matrix exposes the whole basis without changing the row space.
    let padded_rows = rows.max(n);
    let mut padded = CMatrix::<T>::zeros(padded_rows, n);
    padded.rows_mut(0, rows).copy_from(stacked);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;

    let s_max = sv.iter().copied().fold(T::zero(), |a, b| Float::max(a, b));
    let tol = count::<T>(padded_rows) * <T as Float>::epsilon() * s_max;
    let rank = sv.iter().filter(|&&s| s > tol).count();
    let available = n - rank;
    if n_cols_needed > available {
        return Err(Error::Dimensionality { needed: n_cols_needed, available });
    }

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).expect("finite singular values"));
    let chosen = &order[order.len() - n_cols_needed..];
    let mut basis = CMatrix::<T>::zeros(n, n_cols_needed);
    for (col, &idx) in chosen.iter().enumerate() {
        for r in 0..n {
            basis[(r, col)] = v_t[(idx, r)].conj();
        }
    }
    Ok(basis)
}

/// BD outer precoder of user `k` with `l_dim` transmit dimensions.
pub fn bd_decompose<T: Real>(
    real: &ChannelRealization<T>,
    k: usize,
    l_dim: usize,
) -> Result<BdDecomposition<T>> {
    let stacked = stack_interferers(real, k)?;
    let m = real.m_user();
    let n = real.n_bs();
    let max_l = n.saturating_sub(stacked.nrows());
    if l_dim < m || l_dim > max_l {
        return Err(Error::Dimensionality { needed: l_dim.max(m), available: max_l });
    }
    let b_outer = null_space_basis(&stacked, l_dim)?;
    let h_eq = &real.per_user[k] * &b_outer;
    Ok(BdDecomposition { b_outer, h_eq, l_dim })
}

/// BD for every user with the full null space, `L = N - (K-1)M`.
pub fn bd_decompose_all<T: Real>(real: &ChannelRealization<T>) -> Result<Vec<BdDecomposition<T>>> {
    let l_dim = real.n_bs().saturating_sub((real.k_users() - 1) * real.m_user());
    (0..real.k_users()).map(|k| bd_decompose(real, k, l_dim)).collect()
}

/// `||B^H B - I||_F`.
pub fn semi_unitarity_error<T: Real>(b: &CMatrix<T>) -> T {
    let gram = b.adjoint() * b;
    (gram - CMatrix::<T>::identity(b.ncols(), b.ncols())).norm()
}

/// Largest `||H_l B_k||_F / ||H_l||_F` over all `l != k`.
pub fn max_leakage<T: Real>(real: &ChannelRealization<T>, k: usize, b_outer: &CMatrix<T>) -> T {
    real.per_user
        .iter()
        .enumerate()
        .filter(|(l, _)| *l != k)
        .map(|(_, h)| (h * b_outer).norm() / h.norm())
        .fold(T::zero(), |a, b| Float::max(a, b))
}

/// Empirical moments of the entries of `H = A B` for Gaussian `A` and an
/// independent semi-unitary `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeStats {
    pub n_entries: usize,
    pub mean_re: f64,
    pub mean_im: f64,
    pub var_re: f64,
    pub var_im: f64,
    /// `E|h|^2`, 1 for CN(0,1).
    pub second_moment: f64,
    /// `E|h|^4`, 2 for CN(0,1).
    pub fourth_moment: f64,
    /// Kolmogorov–Smirnov distance of `|h|^2` from Exp(1), the law of
    /// `|h|^2` under CN(0,1).
    pub ks_exponential: f64,
}

impl ProbeStats {
    pub fn from_entries(entries: &[Complex<f64>]) -> Self {
        let n = entries.len() as f64;
        let mean_re = entries.iter().map(|z| z.re).sum::<f64>() / n;
        let mean_im = entries.iter().map(|z| z.im).sum::<f64>() / n;
        let var_re = entries.iter().map(|z| (z.re - mean_re).powi(2)).sum::<f64>() / n;
        let var_im = entries.iter().map(|z| (z.im - mean_im).powi(2)).sum::<f64>() / n;
        let second_moment = entries.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        let fourth_moment = entries.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>() / n;
        let mut power: Vec<f64> = entries.iter().map(|z| z.norm_sqr()).collect();
        power.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ks_exponential = power
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = 1.0 - (-x).exp();
                let lo = i as f64 / n;
                let hi = (i + 1) as f64 / n;
                (cdf - lo).abs().max((hi - cdf).abs())
            })
            .fold(0.0, f64::max);
        Self {
            n_entries: entries.len(),
            mean_re,
            mean_im,
            var_re,
            var_im,
            second_moment,
            fourth_moment,
            ks_exponential,
        }
    }
}

/// Random `n x l` matrix with orthonormal columns (Q factor of a Gaussian).
pub fn random_semi_unitary<T, R>(rng: &mut R, n: usize, l: usize) -> CMatrix<T>
where
    T: Real,
    R: rand::Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    complex_gaussian::<T, R>(rng, n, l).qr().q()
}

/// Collects the entries of `n_samples` products `A B`, `A` being `M x N`
/// Gaussian and `B` an independent `N x L` semi-unitary matrix.
pub fn probe_entries<T>(n_samples: usize, dims: (usize, usize, usize), seed: u64) -> Vec<Complex<f64>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    let (m, n, l) = dims;
    assert!(l <= n, "semi-unitary B needs L <= N");
    let mut out = Vec::with_capacity(n_samples * m * l);
    for s in 0..n_samples as u64 {
        let mut rng = trial_rng(seed, s);
        let b = random_semi_unitary::<T, _>(&mut rng, n, l);
        let a = complex_gaussian::<T, _>(&mut rng, m, n);
        let h: DMatrix<Complex<T>> = a * b;
        out.extend(h.iter().map(|z| {
            Complex::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
        }));
    }
    out
}

pub fn gaussianity_probe<T>(n_samples: usize, dims: (usize, usize, usize), seed: u64) -> ProbeStats
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    ProbeStats::from_entries(&probe_entries::<T>(n_samples, dims, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_channels, SystemConfig};

    fn rand_cm(rows: usize, cols: usize, seed: u64) -> CMatrix<f64> {
        complex_gaussian(&mut trial_rng(seed, 0), rows, cols)
    }

    #[test]
    fn null_space_of_nothing_is_everything() {
        let empty = CMatrix::<f64>::zeros(0, 5);
        let b = null_space_basis(&empty, 5).unwrap();
        assert!(semi_unitarity_error(&b) < 1e-14);
        assert_eq!(b.shape(), (5, 5));
    }

    #[test]
    fn coordinate_null_space() {
        let mut e1 = CMatrix::<f64>::zeros(1, 4);
        e1[(0, 0)] = Complex::new(1.0, 0.0);
        let b = null_space_basis(&e1, 3).unwrap();
        assert!((&e1 * &b).norm() < 1e-14);
        assert!(semi_unitarity_error(&b) < 1e-13);
        assert!(null_space_basis(&e1, 4).is_err());
    }

    #[test]
    fn random_null_space_is_orthonormal_and_annihilating() {
        let a = rand_cm(4, 8, 21);
        let b = null_space_basis(&a, 4).unwrap();
        assert!((&a * &b).norm() < 1e-10 * a.norm());
        assert!(semi_unitarity_error(&b) < 1e-10);
        assert!(matches!(null_space_basis(&a, 5), Err(Error::Dimensionality { needed: 5, available: 4 })));
    }

    #[test]
    fn tall_stack_has_no_null_space() {
        let a = rand_cm(6, 4, 2);
        assert!(matches!(null_space_basis(&a, 1), Err(Error::Dimensionality { available: 0, .. })));
    }

    #[test]
    fn rank_deficient_stack_exposes_extra_dimensions() {
        // two identical rows: rank 1 in C^3
        let row = rand_cm(1, 3, 4);
        let mut a = CMatrix::<f64>::zeros(2, 3);
        a.rows_mut(0, 1).copy_from(&row);
        a.rows_mut(1, 1).copy_from(&row);
        let b = null_space_basis(&a, 2).unwrap();
        assert!((&a * &b).norm() < 1e-12);
    }

    #[test]
    fn single_user_precoder_is_semi_unitary() {
        let cfg = SystemConfig::with_rho_sum(6, 2, 1, 1.0, 9).unwrap();
        let real = draw_channels::<f64>(&cfg, 0);
        let bd = bd_decompose(&real, 0, 4).unwrap();
        assert_eq!(bd.b_outer.shape(), (6, 4));
        assert!(semi_unitarity_error(&bd.b_outer) < 1e-12);
        assert!((&bd.h_eq - &real.per_user[0] * &bd.b_outer).norm() < 1e-14);
    }

    #[test]
    fn interference_is_cancelled() {
        let cfg = SystemConfig::with_rho_sum(8, 2, 3, 1.0, 17).unwrap();
        for t in 0..20 {
            let real = draw_channels::<f64>(&cfg, t);
            for k in 0..3 {
                let bd = bd_decompose(&real, k, 4).unwrap();
                for (l, h) in real.per_user.iter().enumerate() {
                    if l != k {
                        assert!((h * &bd.b_outer).norm() < 1e-9);
                    }
                }
                assert_eq!(bd.h_eq.shape(), (2, 4));
            }
        }
    }

    #[test]
    fn overloaded_realization_is_a_dimensionality_error() {
        // N=4, M=2, K=3 leaves 0 null dimensions
        let real = ChannelRealization {
            per_user: (0..3).map(|s| rand_cm(2, 4, s)).collect(),
            seed_used: 0,
        };
        assert!(matches!(bd_decompose(&real, 0, 2), Err(Error::Dimensionality { .. })));
        assert!(bd_decompose_all(&real).is_err());
    }

    #[test]
    fn identity_projection_selects_columns() {
        let a = rand_cm(2, 8, 1);
        let b = CMatrix::<f64>::identity(8, 4);
        assert_eq!(&a * &b, a.columns(0, 4).into_owned());
    }

    #[test]
    fn projected_entries_keep_gaussian_moments() {
        let stats = gaussianity_probe::<f64>(10_000, (2, 8, 4), 5);
        assert_eq!(stats.n_entries, 80_000);
        assert!((stats.second_moment - 1.0).abs() < 0.03, "{stats:?}");
        assert!((stats.fourth_moment - 2.0).abs() < 0.1, "{stats:?}");
        assert!((stats.var_re - 0.5).abs() < 0.02 && (stats.var_im - 0.5).abs() < 0.02);
        // 1% critical value of the one-sample KS test
        assert!(stats.ks_exponential < 1.63 / (stats.n_entries as f64).sqrt(), "{stats:?}");
    }

    #[test]
    fn unitary_rotation_is_indistinguishable_from_fresh_draws() {
        let rotated = probe_entries::<f64>(2_000, (2, 6, 6), 8);
        let cfg = SystemConfig::with_rho_sum(6, 2, 1, 1.0, 1234).unwrap();
        let fresh: Vec<Complex<f64>> = (0..2_000)
            .flat_map(|t| draw_channels::<f64>(&cfg, t).per_user[0].iter().copied().collect::<Vec<_>>())
            .collect();
        let d = ks_two_sample(
            rotated.iter().map(|z| z.norm_sqr()).collect(),
            fresh.iter().map(|z| z.norm_sqr()).collect(),
        );
        let d_re = ks_two_sample(rotated.iter().map(|z| z.re).collect(), fresh.iter().map(|z| z.re).collect());
        let (n, m) = (rotated.len() as f64, fresh.len() as f64);
        let crit = 1.63 * ((n + m) / (n * m)).sqrt();
        assert!(d < crit && d_re < crit, "d={d} d_re={d_re} crit={crit}");
    }

    fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    #[test]
    fn works_in_single_precision() {
        let cfg = SystemConfig::with_rho_sum(8, 2, 3, 1.0, 17).unwrap();
        let real = draw_channels::<f32>(&cfg, 0);
        let bd = bd_decompose(&real, 1, 4).unwrap();
        assert!(max_leakage(&real, 1, &bd.b_outer) < 1e-5);
        assert!(semi_unitarity_error(&bd.b_outer) < 1e-5);
    }
}
