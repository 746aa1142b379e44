//! System configuration and i.i.d. Rayleigh channel ensembles.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Dimensions and power budget of a single-cell BD downlink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Base-station antennas.
    pub n_bs: usize,
    /// Receive antennas per user.
    pub m_user: usize,
    /// Number of served users.
    pub k_users: usize,
    pub noise_var: f64,
    /// Total transmit power, split equally across users.
    pub power_total: f64,
    pub seed: u64,
}

impl SystemConfig {
    pub fn new(
        n_bs: usize,
        m_user: usize,
        k_users: usize,
        noise_var: f64,
        power_total: f64,
        seed: u64,
    ) -> Result<Self> {
        let cfg = Self { n_bs, m_user, k_users, noise_var, power_total, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Unit noise variance with `power_total = rho_sum`.
    pub fn with_rho_sum(
        n_bs: usize,
        m_user: usize,
        k_users: usize,
        rho_sum: f64,
        seed: u64,
    ) -> Result<Self> {
        Self::new(n_bs, m_user, k_users, 1.0, rho_sum, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bs == 0 || self.m_user == 0 || self.k_users == 0 {
            return Err(Error::InvalidConfig(format!(
                "N, M and K must be positive (got N={}, M={}, K={})",
                self.n_bs, self.m_user, self.k_users
            )));
        }
        if !(self.noise_var > 0.0 && self.noise_var.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise variance must be positive, got {}",
                self.noise_var
            )));
        }
        if !(self.power_total > 0.0 && self.power_total.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "total power must be positive, got {}",
                self.power_total
            )));
        }
        let interferer_dims = (self.k_users - 1) * self.m_user;
        let available = self.n_bs.saturating_sub(interferer_dims);
        if self.n_bs < interferer_dims || available < self.m_user {
            return Err(Error::InvalidConfig(format!(
                "N - (K-1)M = {} - {} = {} is below M = {} (N={}, M={}, K={}); \
                 block diagonalization needs L_k = N - (K-1)M >= M",
                self.n_bs as i64,
                interferer_dims,
                self.n_bs as i64 - interferer_dims as i64,
                self.m_user,
                self.n_bs,
                self.m_user,
                self.k_users
            )));
        }
        Ok(())
    }

    /// Null-space dimensions left to every user, `L = N - (K-1)M`.
    pub fn l_dim(&self) -> usize {
        self.n_bs - (self.k_users - 1) * self.m_user
    }

    pub fn power_per_user(&self) -> f64 {
        self.power_total / self.k_users as f64
    }

    /// Per-user SNR `P_k / sigma_n^2`.
    pub fn rho(&self) -> f64 {
        self.power_per_user() / self.noise_var
    }

    pub fn rho_sum(&self) -> f64 {
        self.power_total / self.noise_var
    }

    /// `N / M`.
    pub fn beta(&self) -> f64 {
        self.n_bs as f64 / self.m_user as f64
    }

    /// `beta - K + 1`, equal to `L / M`.
    pub fn beta_k(&self) -> f64 {
        self.beta() - self.k_users as f64 + 1.0
    }
}

/// The K per-user channels of one Monte Carlo trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T: Real> {
    /// `per_user[k]` is the `M x N` channel of user `k`.
    pub per_user: Vec<CMatrix<T>>,
    pub seed_used: u64,
}

impl<T: Real> ChannelRealization<T> {
    pub fn k_users(&self) -> usize {
        self.per_user.len()
    }

    pub fn n_bs(&self) -> usize {
        self.per_user.first().map_or(0, |h| h.ncols())
    }

    pub fn m_user(&self) -> usize {
        self.per_user.first().map_or(0, |h| h.nrows())
    }
}

/// RNG for one trial: the master seed selects the key, the trial index the
/// ChaCha stream, so trials never share keystream.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// `rows x cols` matrix of i.i.d. CN(0, 1) entries.
pub fn complex_gaussian<T, R>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let scale = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
    // column-major fill keeps the draw order independent of nalgebra internals
    let data: Vec<Complex<T>> = (0..rows * cols)
        .map(|_| {
            let re: T = StandardNormal.sample(rng);
            let im: T = StandardNormal.sample(rng);
            Complex::new(re * scale, im * scale)
        })
        .collect();
    CMatrix::from_vec(rows, cols, data)
}

/// Draws the channels of trial `trial_index`. Bit-identical for equal
/// `(cfg.seed, trial_index)`.
pub fn draw_channels<T>(cfg: &SystemConfig, trial_index: u64) -> ChannelRealization<T>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    let mut rng = trial_rng(cfg.seed, trial_index);
    let per_user = (0..cfg.k_users)
        .map(|_| complex_gaussian(&mut rng, cfg.m_user, cfg.n_bs))
        .collect();
    ChannelRealization { per_user, seed_used: cfg.seed }
}

/// Row-stack of every user's channel except user `k`, in ascending user
/// order. Has `(K-1)M` rows.
pub fn stack_interferers<T: Real>(real: &ChannelRealization<T>, k: usize) -> Result<CMatrix<T>> {
    let k_users = real.k_users();
    if k >= k_users {
        return Err(Error::UserIndex { index: k, k_users });
    }
    let m = real.m_user();
    let n = real.n_bs();
    let mut stacked = CMatrix::<T>::zeros((k_users - 1) * m, n);
    for (slot, h) in real.per_user.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, h)| h).enumerate() {
        stacked.rows_mut(slot * m, m).copy_from(h);
    }
    Ok(stacked)
}
