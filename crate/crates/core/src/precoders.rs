//! Inner precoders `D_k` on the BD equivalent channel and their exact
//! per-realization rates (bits per channel use).

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::channel::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::{count, Real, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecoderKind {
    /// Eigenmode transmission with water-filling.
    #[serde(rename = "svd")]
    SvdWaterfill,
    Zf,
    Rzf,
}

impl PrecoderKind {
    pub const ALL: [PrecoderKind; 3] = [PrecoderKind::SvdWaterfill, PrecoderKind::Zf, PrecoderKind::Rzf];

    pub fn name(self) -> &'static str {
        match self {
            PrecoderKind::SvdWaterfill => "svd",
            PrecoderKind::Zf => "zf",
            PrecoderKind::Rzf => "rzf",
        }
    }
}

impl fmt::Display for PrecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svd" => Ok(PrecoderKind::SvdWaterfill),
            "zf" => Ok(PrecoderKind::Zf),
            "rzf" => Ok(PrecoderKind::Rzf),
            other => Err(Error::InvalidConfig(format!("unknown precoder '{other}' (expected svd, zf or rzf)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerPrecoder<T: Real> {
    pub kind: PrecoderKind,
    /// `L x M`, one column per stream.
    pub d_matrix: CMatrix<T>,
    /// `tr(D D^H)`.
    pub power_used: T,
}

/// Water-filling over the eigenmodes `lambda_i` of `M^-1 H_eq H_eq^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillSolution<T> {
    /// `nu_bar = M nu`; active modes satisfy `nu_bar > 1/lambda_i`.
    pub level: T,
    /// Indices (into the input eigenvalues) of modes that get power.
    pub active_set: Vec<usize>,
    /// Per-mode SNR `(nu_bar - 1/lambda_i)^+ / M`; sums to `rho`.
    pub per_mode_power: Vec<T>,
    /// Per-mode rate `[log2(nu_bar lambda_i)]^+`.
    pub per_mode_rate: Vec<T>,
}

impl<T: Scalar> WaterfillSolution<T> {
    pub fn rate(&self) -> T {
        self.per_mode_rate.iter().fold(T::zero(), |s, &r| s + r)
    }
}

/// Solves `(1/M) sum_i (nu_bar - 1/lambda_i)^+ = rho` with `M = eigs.len()`.
///
/// Modes are visited in descending order and the largest active set whose
/// closed-form level clears the weakest member's threshold is kept.
/// Zero eigenvalues never receive power.
pub fn waterfill<T: Scalar>(eigs: &[T], rho: T) -> Result<WaterfillSolution<T>> {
    if eigs.is_empty() {
        return Err(Error::Domain("water-filling needs at least one eigenvalue".into()));
    }
    if eigs.iter().any(|&l| !(l >= T::zero()) || !l.is_finite()) {
        return Err(Error::Domain("eigenvalues must be finite and nonnegative".into()));
    }
    if !(rho > T::zero()) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    let m = count::<T>(eigs.len());
    let mut order: Vec<usize> = (0..eigs.len()).filter(|&i| eigs[i] > T::zero()).collect();
    if order.is_empty() {
        return Err(Error::DegenerateChannel);
    }
    order.sort_by(|&a, &b| eigs[b].partial_cmp(&eigs[a]).unwrap());

    let budget = m * rho;
    let mut inv_sum = T::zero();
    let mut best = None;
    for (n, &idx) in order.iter().enumerate() {
        inv_sum += eigs[idx].recip();
        let level = (budget + inv_sum) / count(n + 1);
        if level > eigs[idx].recip() {
            best = Some((n + 1, level));
        } else {
            break;
        }
    }
    // the strongest mode alone is always feasible since budget > 0
    let (n_active, level) = best.expect("strongest mode is always active");

    let mut per_mode_power = vec![T::zero(); eigs.len()];
    let mut per_mode_rate = vec![T::zero(); eigs.len()];
    let mut active_set: Vec<usize> = order[..n_active].to_vec();
    for &i in &active_set {
        per_mode_power[i] = (level - eigs[i].recip()) / m;
        per_mode_rate[i] = (level * eigs[i]).log2().max(T::zero());
    }
    active_set.sort_unstable();
    Ok(WaterfillSolution { level, active_set, per_mode_power, per_mode_rate })
}

struct Decomposed<T: Real> {
    /// Singular values, descending.
    sigma: Vec<T>,
    /// `M x M`, columns matching `sigma`.
    u: CMatrix<T>,
    /// `L x M`, columns matching `sigma`.
    v: CMatrix<T>,
}

fn thin_svd<T: Real>(h_eq: &CMatrix<T>) -> Result<Decomposed<T>> {
    let (m, l) = h_eq.shape();
    if l < m {
        return Err(Error::Dimensionality { needed: m, available: l });
    }
    let svd = h_eq.clone().svd(true, true);
    let u_raw = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).expect("finite singular values"));
    let mut u = CMatrix::<T>::zeros(m, m);
    let mut v = CMatrix::<T>::zeros(l, m);
    for (col, &idx) in order.iter().enumerate() {
        u.set_column(col, &u_raw.column(idx));
        for r in 0..l {
            v[(r, col)] = v_t[(idx, r)].conj();
        }
    }
    Ok(Decomposed { sigma: order.iter().map(|&i| sv[i]).collect(), u, v })
}

fn trace_power<T: Real>(d: &CMatrix<T>) -> T {
    d.iter().fold(T::zero(), |s, z| s + z.norm_sqr())
}

fn check_positive<T: Real>(p_k: T, noise_var: T) -> Result<T> {
    if !(p_k > T::zero()) || !(noise_var > T::zero()) {
        return Err(Error::Domain(format!(
            "power ({p_k}) and noise variance ({noise_var}) must be positive"
        )));
    }
    Ok(p_k / noise_var)
}

/// Eigenmode (SVD) precoder `D = V diag(p)^{1/2}` with water-filled powers.
pub fn svd_precoder<T: Real>(h_eq: &CMatrix<T>, p_k: T, noise_var: T) -> Result<(InnerPrecoder<T>, T)> {
    let rho = check_positive(p_k, noise_var)?;
    let dec = thin_svd(h_eq)?;
    let m = h_eq.nrows();
    let s_max = dec.sigma.first().copied().unwrap_or_else(T::zero);
    if !(s_max > T::zero()) {
        return Err(Error::DegenerateChannel);
    }
    let floor = count::<T>(h_eq.ncols()) * <T as Float>::epsilon() * s_max;
    let eigs: Vec<T> = dec
        .sigma
        .iter()
        .map(|&s| if s > floor { s * s / count(m) } else { T::zero() })
        .collect();
    let wf = waterfill(&eigs, rho)?;
    let mut d = dec.v.clone();
    for (col, &p) in wf.per_mode_power.iter().enumerate() {
        let amp = Float::sqrt(p * noise_var);
        d.column_mut(col).scale_mut(amp);
    }
    let power_used = trace_power(&d);
    let rate = wf.rate();
    Ok((InnerPrecoder { kind: PrecoderKind::SvdWaterfill, d_matrix: d, power_used }, rate))
}

/// Zero-forcing `D = kappa H_eq^+` with `kappa = sqrt(P / tr(H^+ H^+^H))`.
pub fn zf_precoder<T: Real>(h_eq: &CMatrix<T>, p_k: T, noise_var: T) -> Result<(InnerPrecoder<T>, T)> {
    let rho = check_positive(p_k, noise_var)?;
    let dec = thin_svd(h_eq)?;
    let (m, l) = h_eq.shape();
    let s_max = dec.sigma.first().copied().unwrap_or_else(T::zero);
    let tol = count::<T>(l) * <T as Float>::epsilon() * s_max;
    let rank = dec.sigma.iter().filter(|&&s| s > tol).count();
    if rank < m || !(s_max > T::zero()) {
        return Err(Error::RankDeficient { rank, needed: m });
    }
    // H^+ = V diag(1/s) U^H
    let inv_sigma: Vec<T> = dec.sigma.iter().map(|&s| Float::recip(s)).collect();
    let trace_inv = inv_sigma.iter().fold(T::zero(), |acc, &x| acc + x * x);
    let kappa = Float::sqrt(p_k / trace_inv);
    let mut v_scaled = dec.v.clone();
    for (col, &x) in inv_sigma.iter().enumerate() {
        v_scaled.column_mut(col).scale_mut(x * kappa);
    }
    let d = v_scaled * dec.u.adjoint();
    let power_used = trace_power(&d);
    let rate = count::<T>(m) * Float::log2(T::one() + rho / trace_inv);
    Ok((InnerPrecoder { kind: PrecoderKind::Zf, d_matrix: d, power_used }, rate))
}

/// Per-stream SINRs of the RZF precoder together with the precoder.
pub fn rzf_sinr<T: Real>(h_eq: &CMatrix<T>, p_k: T, noise_var: T) -> Result<(InnerPrecoder<T>, Vec<T>)> {
    let rho = check_positive(p_k, noise_var)?;
    let (m, l) = h_eq.shape();
    if l < m {
        return Err(Error::Dimensionality { needed: m, available: l });
    }
    if h_eq.iter().all(|z| z.norm_sqr() == T::zero()) {
        return Err(Error::DegenerateChannel);
    }
    let alpha = count::<T>(m) / rho;
    // W H^H = (H^H H + alpha I_L)^-1 H^H = H^H (H H^H + alpha I_M)^-1
    let mut gram = h_eq * h_eq.adjoint();
    for i in 0..m {
        gram[(i, i)] += Complex::new(alpha, T::zero());
    }
    let chol = gram.cholesky().ok_or(Error::DegenerateChannel)?;
    let g = h_eq.adjoint() * chol.inverse();
    let g_power = trace_power(&g);
    let kappa_sq = p_k / g_power;
    let d = &g * Complex::new(Float::sqrt(kappa_sq), T::zero());
    let power_used = trace_power(&d);

    // A[i][j] = h_i W h_j^H
    let a = h_eq * &g;
    let noise_term = noise_var / kappa_sq;
    let sinr = (0..m)
        .map(|i| {
            let signal = a[(i, i)].norm_sqr();
            let interference = (0..m).filter(|&j| j != i).fold(T::zero(), |s, j| s + a[(i, j)].norm_sqr());
            signal / (interference + noise_term)
        })
        .collect();
    Ok((InnerPrecoder { kind: PrecoderKind::Rzf, d_matrix: d, power_used }, sinr))
}

/// Regularized ZF `D = kappa W H_eq^H`, `W = (H^H H + M/rho I)^-1`.
pub fn rzf_precoder<T: Real>(h_eq: &CMatrix<T>, p_k: T, noise_var: T) -> Result<(InnerPrecoder<T>, T)> {
    let (pre, sinr) = rzf_sinr(h_eq, p_k, noise_var)?;
    let rate = sinr.iter().fold(T::zero(), |s, &g| s + Float::log2(T::one() + g));
    Ok((pre, rate))
}

pub fn precode<T: Real>(
    kind: PrecoderKind,
    h_eq: &CMatrix<T>,
    p_k: T,
    noise_var: T,
) -> Result<(InnerPrecoder<T>, T)> {
    match kind {
        PrecoderKind::SvdWaterfill => svd_precoder(h_eq, p_k, noise_var),
        PrecoderKind::Zf => zf_precoder(h_eq, p_k, noise_var),
        PrecoderKind::Rzf => rzf_precoder(h_eq, p_k, noise_var),
    }
}

/// Eigenvalues of `M^-1 H H^H`, descending.
pub fn normalized_gram_eigenvalues<T: Real>(h_eq: &CMatrix<T>) -> Vec<T> {
    let m = count::<T>(h_eq.nrows());
    let sv: DVector<T> = h_eq.singular_values();
    let mut eigs: Vec<T> = sv.iter().map(|&s| s * s / m).collect();
    eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eigs
}

/// `tr[(H H^H)^-1]`.
pub fn trace_inverse_gram<T: Real>(h_eq: &CMatrix<T>) -> T {
    h_eq.singular_values().iter().fold(T::zero(), |s, &x| s + Float::recip(x * x))
}
