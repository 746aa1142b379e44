//! Large-system rate formulas for BD with SVD, ZF and RZF inner precoders.
//!
//! All rates are in bits. Per-user formulas take the per-user normalized
//! dimension `beta_k = L/M` and per-user SNR `rho`; sum-rate formulas use
//! `beta_k = beta - K + 1` and `rho = rho_sum / K`.
//!
//! Marčenko–Pastur integrals are evaluated after the substitution
//! `x = a + (b - a) cos^2(theta/2)`, which turns the square-root edges of
//! the density (and the `1/x` pole at `a = 0` when `beta = 1`) into a
//! smooth integrand on `[0, pi]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::{expand_upper_bracket, find_root, integrate};
use crate::precoders::PrecoderKind;
use crate::scalar::{count, lit, Scalar};

/// Absolute quadrature tolerance.
pub const QUAD_TOL: f64 = 1e-10;

/// Relative distance from `K = beta` below which a system counts as fully loaded.
const FULL_LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams<T> {
    /// `N / M`.
    pub beta: T,
    /// `beta - K + 1`.
    pub beta_k: T,
    /// Per-user SNR.
    pub rho: T,
    pub m_user: usize,
}

impl<T: Scalar> AsymptoticParams<T> {
    pub fn new(beta: T, k_users: usize, rho: T, m_user: usize) -> Result<Self> {
        let beta_k = beta - count::<T>(k_users) + T::one();
        let p = Self { beta, beta_k, rho, m_user };
        p.check()?;
        Ok(p)
    }

    /// Single-link parameters: one user with `beta = beta_k`.
    pub fn link(beta_k: T, rho: T, m_user: usize) -> Result<Self> {
        Self::new(beta_k, 1, rho, m_user)
    }

    fn check(&self) -> Result<()> {
        if self.m_user == 0 {
            return Err(Error::Domain("M must be positive".into()));
        }
        if !(self.beta_k >= T::one() - lit(FULL_LOAD_TOL)) {
            return Err(Error::Domain(format!("beta_k = {} is below 1", self.beta_k)));
        }
        if !(self.rho >= T::zero()) || !self.rho.is_finite() {
            return Err(Error::Domain(format!("rho must be finite and nonnegative, got {}", self.rho)));
        }
        Ok(())
    }

    fn m(&self) -> T {
        count(self.m_user)
    }

    fn is_full_load(&self) -> bool {
        (self.beta_k - T::one()).abs() <= lit::<T>(FULL_LOAD_TOL) * self.beta.max(T::one())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `K < beta`, closed form.
    ClosedForm,
    /// `K = beta`.
    FullLoad,
    /// SVD below the all-modes-active threshold: water-filling evaluated by
    /// quadrature instead of the closed form.
    WaterfillQuadrature,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::ClosedForm => "closed_form",
            Regime::FullLoad => "full_load",
            Regime::WaterfillQuadrature => "waterfill_quadrature",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sum rate split into users-times-streams, dimension excess and array gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDecomposition<T> {
    /// `K M`.
    pub dof_factor: T,
    /// `log2(1 + rho (beta - K))`; zero at full load.
    pub dim_excess: T,
    /// Array-gain term; at full load it carries the whole per-stream rate.
    pub array_gain: T,
    pub total: T,
    pub regime: Regime,
}

impl<T: Scalar> RateDecomposition<T> {
    fn from_terms(dof_factor: T, dim_excess: T, array_gain: T, regime: Regime) -> Self {
        Self { dof_factor, dim_excess, array_gain, total: dof_factor * (dim_excess + array_gain), regime }
    }
}

/// Support `[(1 - sqrt(beta))^2, (1 + sqrt(beta))^2]` of the MP law.
pub fn mp_support<T: Scalar>(beta: T) -> (T, T) {
    let s = beta.sqrt();
    ((T::one() - s).powi(2), (T::one() + s).powi(2))
}

/// Marčenko–Pastur density `sqrt((x-a)(b-x)) / (2 pi x)` for ratio `beta >= 1`.
pub fn mp_density<T: Scalar>(x: T, beta: T) -> T {
    let (a, b) = mp_support(beta);
    if !(x > a && x < b) || !(x > T::zero()) {
        return T::zero();
    }
    ((x - a) * (b - x)).sqrt() / (lit::<T>(2.0) * T::PI() * x)
}

/// `int_lo^hi g(x) f_beta(x) dx`, limits clipped to the support.
pub fn mp_integral<T: Scalar, G: Fn(T) -> T>(g: G, lo: T, hi: T, beta: T, abs_tol: T) -> T {
    let (a, b) = mp_support(beta);
    let lo = lo.max(a);
    let hi = hi.min(b);
    if !(hi > lo) {
        return T::zero();
    }
    let two = lit::<T>(2.0);
    let width = b - a;
    // x(theta) = a + width cos^2(theta/2), theta in [0, pi] runs from b down to a
    let theta_of = |x: T| two * ((x - a) / width).max(T::zero()).min(T::one()).sqrt().acos();
    let (t0, t1) = (theta_of(hi), theta_of(lo));
    let integrand = |theta: T| {
        let (s, c) = (theta / two).sin_cos();
        let x = a + width * c * c;
        if !(x > T::zero()) {
            return T::zero();
        }
        // f dx = width^2 sin^2(theta) / (8 pi x) dtheta
        let sin_t = two * s * c;
        g(x) * width * width * sin_t * sin_t / (lit::<T>(8.0) * T::PI() * x)
    };
    integrate(integrand, t0, t1, abs_tol).value
}

/// Water-filling level to per-user SNR at full load, the closed form of
/// `int_{1/nu}^4 (nu - 1/x) f_1(x) dx`.
pub fn mp_level_to_rho<T: Scalar>(nu_bar: T) -> Result<T> {
    let quarter = lit::<T>(0.25);
    if !(nu_bar >= quarter) || !nu_bar.is_finite() {
        return Err(Error::Domain(format!("water level must be >= 0.25, got {nu_bar}")));
    }
    let two = lit::<T>(2.0);
    let arg = ((T::one() - two * nu_bar) / (two * nu_bar)).max(-T::one()).min(T::one());
    let root = (lit::<T>(4.0) * nu_bar - T::one()).max(T::zero()).sqrt();
    let value = ((T::one() + two * nu_bar) * arg.acos() - lit::<T>(3.0) * root) / (two * T::PI());
    Ok(value.max(T::zero()))
}

/// Inverse of [`mp_level_to_rho`]; unique since the map is increasing on `[0.25, inf)`.
pub fn rho_to_mp_level<T: Scalar>(rho: T) -> Result<T> {
    if !(rho > T::zero()) || !rho.is_finite() {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    let quarter = lit::<T>(0.25);
    let f = |nu: T| mp_level_to_rho(nu).unwrap_or_else(|_| T::nan()) - rho;
    let hi = expand_upper_bracket(&f, quarter, lit(0.5))?;
    find_root(&f, quarter, hi, lit::<T>(4.0) * T::epsilon())
}

/// Per-user SVD rate at full load (`beta_k = 1`).
pub fn svd_rate_fullload<T: Scalar>(rho: T, m_user: usize) -> Result<T> {
    if rho == T::zero() {
        return Ok(T::zero());
    }
    let nu = rho_to_mp_level(rho)?;
    let rate = mp_integral(|x| (nu * x).log2().max(T::zero()), nu.recip(), lit(4.0), T::one(), lit(QUAD_TOL));
    Ok(count::<T>(m_user) * rate)
}

/// Smallest per-user SNR at which water-filling activates every mode of
/// `M^-1 H H^H` asymptotically: `2 / ((sqrt(beta_k) - 1)(beta_k - 1))`.
pub fn svd_all_modes_threshold<T: Scalar>(beta_k: T) -> T {
    if !(beta_k > T::one()) {
        return T::infinity();
    }
    lit::<T>(2.0) / ((beta_k.sqrt() - T::one()) * (beta_k - T::one()))
}

/// Per-user SVD rate with every sub-channel active (`beta_k > 1`).
pub fn svd_rate_excess<T: Scalar>(params: &AsymptoticParams<T>) -> Result<T> {
    params.check()?;
    let bk = params.beta_k;
    if !(bk > T::one()) || params.is_full_load() {
        return Err(Error::Regime { formula: "SVD closed form", reason: "requires beta_k > 1".into() });
    }
    let threshold = svd_all_modes_threshold(bk);
    if params.rho < threshold {
        return Err(Error::Regime {
            formula: "SVD closed form",
            reason: format!("rho = {} below all-modes threshold {threshold}", params.rho),
        });
    }
    let log_e = T::log2_e();
    let per_stream = (T::one() + params.rho * (bk - T::one())).log2() + bk * bk.log2()
        - bk * (bk - T::one()).log2()
        - log_e;
    Ok(params.m() * per_stream)
}

/// Asymptotic water level `nu_bar` for MP ratio `beta` at per-user SNR `rho`.
pub fn mp_waterfill_level<T: Scalar>(beta: T, rho: T) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    if !(beta > T::one()) {
        return rho_to_mp_level(rho);
    }
    let (a, b) = mp_support(beta);
    let mean_inv = (beta - T::one()).recip();
    if rho >= a.recip() - mean_inv {
        return Ok(rho + mean_inv);
    }
    let tol = lit::<T>(QUAD_TOL);
    let f = |nu: T| mp_integral(|x| nu - x.recip(), nu.recip(), b, beta, tol) - rho;
    find_root(f, b.recip(), a.recip(), lit::<T>(1e-13))
}

/// Per-user SVD rate via asymptotic water-filling by quadrature; valid in
/// every regime and equal to [`svd_rate_excess`] above its threshold.
pub fn svd_rate_waterfill<T: Scalar>(params: &AsymptoticParams<T>) -> Result<T> {
    params.check()?;
    if params.rho == T::zero() {
        return Ok(T::zero());
    }
    if params.is_full_load() {
        return svd_rate_fullload(params.rho, params.m_user);
    }
    let beta = params.beta_k;
    let nu = mp_waterfill_level(beta, params.rho)?;
    let (_, b) = mp_support(beta);
    let rate = mp_integral(|x| (nu * x).log2().max(T::zero()), nu.recip(), b, beta, lit(QUAD_TOL));
    Ok(params.m() * rate)
}

/// Per-user ZF rate `M log2(1 + rho (beta_k - 1))`, `beta_k > 1`.
pub fn zf_rate_excess<T: Scalar>(params: &AsymptoticParams<T>) -> Result<T> {
    params.check()?;
    if !(params.beta_k > T::one()) || params.is_full_load() {
        return Err(Error::Regime {
            formula: "ZF asymptote",
            reason: "tr[(H H^H)^-1] does not converge at beta_k = 1".into(),
        });
    }
    Ok(params.m() * (T::one() + params.rho * (params.beta_k - T::one())).log2())
}

/// `((sqrt(x (1 + sqrt y)^2 + 1) - sqrt(x (1 - sqrt y)^2 + 1))^2) / 4`.
pub fn mp_capacity_f<T: Scalar>(x: T, y: T) -> T {
    let s = y.sqrt();
    let d = (x * (T::one() + s).powi(2) + T::one()).sqrt() - (x * (T::one() - s).powi(2) + T::one()).sqrt();
    d * d / lit(4.0)
}

/// Closed form of `int log2(1 + rho x) f_beta(x) dx`.
pub fn mp_capacity<T: Scalar>(rho: T, beta: T) -> T {
    if rho == T::zero() {
        return T::zero();
    }
    let f = mp_capacity_f(rho, beta);
    beta * (T::one() + rho - f).log2() + (T::one() + rho * beta - f).log2() - T::log2_e() / rho * f
}

/// The same integral by quadrature.
pub fn mp_capacity_quadrature<T: Scalar>(rho: T, beta: T) -> T {
    let (a, b) = mp_support(beta);
    mp_integral(|x| (T::one() + rho * x).log2(), a, b, beta, lit(QUAD_TOL))
}

/// Jensen upper bound on the per-user ZF rate, `M int log2(1 + rho x) f_{beta_k}(x) dx`.
pub fn zf_rate_upper_bound<T: Scalar>(params: &AsymptoticParams<T>) -> Result<T> {
    params.check()?;
    Ok(params.m() * mp_capacity(params.rho, params.beta_k.max(T::one())))
}

/// Per-user RZF rate.
pub fn rzf_rate<T: Scalar>(params: &AsymptoticParams<T>) -> Result<T> {
    params.check()?;
    let rho = params.rho;
    let e = params.beta_k.max(T::one()) - T::one();
    let two = lit::<T>(2.0);
    let root = (rho * rho * e * e + two * rho * (params.beta_k + T::one()) + T::one()).sqrt();
    Ok(params.m() * ((T::one() + rho * e + root).log2() - T::one()))
}

/// `log2(1 + rho (beta - K))`.
pub fn dim_excess_term<T: Scalar>(beta: T, k_users: usize, rho: T) -> T {
    (T::one() + rho * (beta - count(k_users))).log2()
}

/// Array-gain term for `K < beta`. The SVD row uses the sign consistent
/// with the per-user closed form (`- log2 e`).
pub fn array_gain_term<T: Scalar>(kind: PrecoderKind, beta: T, k_users: usize, rho: T) -> T {
    let excess = beta - count(k_users);
    match kind {
        PrecoderKind::Zf => T::zero(),
        PrecoderKind::Rzf => {
            let q = rho * excess + T::one();
            (T::one() + (T::one() + lit::<T>(4.0) * rho / (q * q)).sqrt()).log2() - T::one()
        }
        PrecoderKind::SvdWaterfill => (excess + T::one()) * (T::one() + excess.recip()).log2() - T::log2_e(),
    }
}

/// Asymptotic sum rate for `K` users at total SNR `rho_sum`, equal power split.
pub fn unified_sum_rate_at<T: Scalar>(
    kind: PrecoderKind,
    beta: T,
    m_user: usize,
    k_users: usize,
    rho_sum: T,
) -> Result<RateDecomposition<T>> {
    if k_users == 0 {
        return Err(Error::Domain("K must be at least 1".into()));
    }
    if !(rho_sum >= T::zero()) {
        return Err(Error::Domain(format!("rho_sum must be nonnegative, got {rho_sum}")));
    }
    let k_t = count::<T>(k_users);
    if k_t > beta * (T::one() + lit(FULL_LOAD_TOL)) {
        return Err(Error::Domain(format!("K = {k_users} exceeds beta = {beta}")));
    }
    let rho = rho_sum / k_t;
    let params = AsymptoticParams::new(beta, k_users, rho, m_user)?;
    let dof = k_t * count(m_user);
    let m = count::<T>(m_user);

    if params.is_full_load() {
        let per_user = match kind {
            PrecoderKind::SvdWaterfill => svd_rate_fullload(rho, m_user)?,
            PrecoderKind::Zf => zf_rate_upper_bound(&params)?,
            PrecoderKind::Rzf => rzf_rate(&params)?,
        };
        return Ok(RateDecomposition::from_terms(dof, T::zero(), per_user / m, Regime::FullLoad));
    }

    let i1 = dim_excess_term(beta, k_users, rho);
    if kind == PrecoderKind::SvdWaterfill && rho < svd_all_modes_threshold(params.beta_k) {
        let per_stream = svd_rate_waterfill(&params)? / m;
        return Ok(RateDecomposition::from_terms(dof, i1, per_stream - i1, Regime::WaterfillQuadrature));
    }
    let i2 = array_gain_term(kind, beta, k_users, rho);
    Ok(RateDecomposition::from_terms(dof, i1, i2, Regime::ClosedForm))
}

/// [`unified_sum_rate_at`] for a configuration; `k_users_override` replaces `cfg.k_users`.
pub fn unified_sum_rate(
    cfg: &SystemConfig,
    kind: PrecoderKind,
    k_users_override: Option<usize>,
) -> Result<RateDecomposition<f64>> {
    let k = k_users_override.unwrap_or(cfg.k_users);
    unified_sum_rate_at(kind, cfg.beta(), cfg.m_user, k, cfg.rho_sum())
}
