//! Monte Carlo engine and the sweeps built on it.
//!
//! Trials are seeded individually from `(cfg.seed, trial_index)` and their
//! results land in per-trial slots before a sequential reduction, so the
//! aggregates do not depend on the worker count.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{unified_sum_rate, RateDecomposition};
use crate::bd::bd_decompose_all;
use crate::channel::{draw_channels, SystemConfig};
use crate::error::{Error, Result};
use crate::precoders::{precode, PrecoderKind};

/// Largest tolerated fraction of discarded trials.
pub const MAX_DISCARD_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub per_user_mean: Vec<f64>,
    pub sum_mean: f64,
    /// Sample standard deviation of the per-trial sum rate over `sqrt(trials kept)`.
    pub sum_stderr: f64,
    pub n_trials: usize,
    pub n_discarded: usize,
}

/// Per-user rates of every trial, `None` for discarded trials.
pub type TrialRates = Vec<Option<Vec<f64>>>;

fn trial_rates(cfg: &SystemConfig, kinds: &[PrecoderKind], trial: u64) -> Result<Vec<Option<Vec<f64>>>> {
    let real = draw_channels::<f64>(cfg, trial);
    let bds = bd_decompose_all(&real)?;
    let p_k = cfg.power_per_user();
    Ok(kinds
        .iter()
        .map(|&kind| {
            bds.iter()
                .map(|bd| precode(kind, &bd.h_eq, p_k, cfg.noise_var).map(|(_, r)| r))
                .collect::<Result<Vec<f64>>>()
                .ok()
        })
        .collect())
}

fn with_workers<R: Send>(workers: Option<usize>, job: impl FnOnce() -> R + Send) -> R {
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(job),
        None => job(),
    }
}

/// Per-trial per-user rates for each precoder in `kinds` (outer index).
/// All precoders see the same channel draws.
pub fn simulate_trials(
    cfg: &SystemConfig,
    kinds: &[PrecoderKind],
    n_trials: usize,
    workers: Option<usize>,
) -> Result<Vec<TrialRates>> {
    cfg.validate()?;
    let per_trial: Vec<Vec<Option<Vec<f64>>>> = with_workers(workers, || {
        (0..n_trials as u64)
            .into_par_iter()
            .map(|t| trial_rates(cfg, kinds, t))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut out: Vec<TrialRates> = kinds.iter().map(|_| Vec::with_capacity(n_trials)).collect();
    for trial in per_trial {
        for (slot, rates) in out.iter_mut().zip(trial) {
            slot.push(rates);
        }
    }
    Ok(out)
}

/// Aggregates per-trial rates; fails when too many trials were discarded.
pub fn summarize(k_users: usize, trials: &TrialRates) -> Result<RateReport> {
    let n_trials = trials.len();
    if n_trials == 0 {
        return Err(Error::InvalidConfig("at least one trial is required".into()));
    }
    let kept: Vec<&Vec<f64>> = trials.iter().flatten().collect();
    let n_discarded = n_trials - kept.len();
    if n_discarded as f64 > MAX_DISCARD_FRACTION * n_trials as f64 || kept.is_empty() {
        return Err(Error::DiscardRate { discarded: n_discarded, trials: n_trials });
    }
    let n = kept.len() as f64;
    let mut per_user_mean = vec![0.0; k_users];
    for rates in &kept {
        for (acc, r) in per_user_mean.iter_mut().zip(rates.iter()) {
            *acc += r;
        }
    }
    per_user_mean.iter_mut().for_each(|m| *m /= n);
    let sums: Vec<f64> = kept.iter().map(|r| r.iter().sum()).collect();
    let sum_mean = per_user_mean.iter().sum();
    let sum_stderr = if kept.len() > 1 {
        let var = sums.iter().map(|s| (s - sum_mean) * (s - sum_mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(RateReport { per_user_mean, sum_mean, sum_stderr, n_trials, n_discarded })
}

pub fn run_monte_carlo(cfg: &SystemConfig, kind: PrecoderKind, n_trials: usize) -> Result<RateReport> {
    run_monte_carlo_with_workers(cfg, kind, n_trials, None)
}

pub fn run_monte_carlo_with_workers(
    cfg: &SystemConfig,
    kind: PrecoderKind,
    n_trials: usize,
    workers: Option<usize>,
) -> Result<RateReport> {
    let trials = simulate_trials(cfg, &[kind], n_trials, workers)?;
    summarize(cfg.k_users, &trials[0])
}

/// One report per precoder, sharing channel draws.
pub fn run_monte_carlo_multi(
    cfg: &SystemConfig,
    kinds: &[PrecoderKind],
    n_trials: usize,
    workers: Option<usize>,
) -> Result<Vec<RateReport>> {
    simulate_trials(cfg, kinds, n_trials, workers)?
        .iter()
        .map(|t| summarize(cfg.k_users, t))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Users,
    Snr,
    BsAntennas,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Users => "users",
            SweepAxis::Snr => "snr",
            SweepAxis::BsAntennas => "bs_antennas",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// K, rho_sum in dB, or N depending on the axis.
    pub axis_value: f64,
    pub n_bs: usize,
    pub m_user: usize,
    pub k_users: usize,
    pub rho_sum: f64,
    pub simulated: Option<RateReport>,
    pub asymptotic: Option<RateDecomposition<f64>>,
}

impl SweepPoint {
    pub fn rho_sum_db(&self) -> f64 {
        10.0 * self.rho_sum.log10()
    }

    /// `|sim - asym| / sim` when both are present.
    pub fn relative_gap(&self) -> Option<f64> {
        match (&self.simulated, &self.asymptotic) {
            (Some(s), Some(a)) => Some((s.sum_mean - a.total).abs() / s.sum_mean),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub precoder: PrecoderKind,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Argmax of the asymptotic total; the first (smallest axis value) wins ties.
    pub fn argmax_asymptotic(&self) -> Option<&SweepPoint> {
        self.points
            .iter()
            .filter(|p| p.asymptotic.is_some())
            .fold(None, |best: Option<&SweepPoint>, p| match best {
                Some(b) if b.asymptotic.unwrap().total >= p.asymptotic.unwrap().total => Some(b),
                _ => Some(p),
            })
    }

    /// Consecutive differences of the asymptotic totals.
    pub fn increments(&self) -> Vec<f64> {
        let totals: Vec<f64> = self.points.iter().filter_map(|p| p.asymptotic.map(|a| a.total)).collect();
        totals.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Simulated and/or asymptotic sum rate at one configuration.
pub fn evaluate_point(
    cfg: &SystemConfig,
    kinds: &[PrecoderKind],
    axis_value: f64,
    n_trials: Option<usize>,
    asymptotic: bool,
    workers: Option<usize>,
) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    let sims = match n_trials {
        Some(n) => Some(run_monte_carlo_multi(cfg, kinds, n, workers)?),
        None => None,
    };
    kinds
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            Ok(SweepPoint {
                axis_value,
                n_bs: cfg.n_bs,
                m_user: cfg.m_user,
                k_users: cfg.k_users,
                rho_sum: cfg.rho_sum(),
                simulated: sims.as_ref().map(|s| s[i].clone()),
                asymptotic: if asymptotic { Some(unified_sum_rate(cfg, kind, None)?) } else { None },
            })
        })
        .collect()
}

fn base_with(cfg: &SystemConfig, n_bs: usize, k_users: usize, rho_sum: f64) -> Result<SystemConfig> {
    SystemConfig::new(n_bs, cfg.m_user, k_users, cfg.noise_var, rho_sum * cfg.noise_var, cfg.seed)
}

/// Optimal number of users by exhaustive search of the asymptotic sum rate
/// over `K in 1..=floor(N/M)`, equal split of `rho_sum`.
pub fn optimal_k(cfg_base: &SystemConfig, kind: PrecoderKind, rho_sum: f64) -> Result<(usize, SweepResult)> {
    let k_max = cfg_base.n_bs / cfg_base.m_user;
    if k_max == 0 {
        return Err(Error::InvalidConfig("N < M leaves no candidate user count".into()));
    }
    let points = (1..=k_max)
        .map(|k| {
            let cfg = base_with(cfg_base, cfg_base.n_bs, k, rho_sum)?;
            Ok(evaluate_point(&cfg, &[kind], k as f64, None, true, None)?.remove(0))
        })
        .collect::<Result<Vec<_>>>()?;
    let curve = SweepResult { axis: SweepAxis::Users, precoder: kind, points };
    let k_star = curve.argmax_asymptotic().expect("nonempty curve").k_users;
    Ok((k_star, curve))
}

/// Optimal K from Monte Carlo means instead of the asymptotic formulas.
pub fn optimal_k_monte_carlo(
    cfg_base: &SystemConfig,
    kind: PrecoderKind,
    rho_sum: f64,
    n_trials: usize,
) -> Result<(usize, SweepResult)> {
    let k_max = cfg_base.n_bs / cfg_base.m_user;
    let points = (1..=k_max)
        .map(|k| {
            let cfg = base_with(cfg_base, cfg_base.n_bs, k, rho_sum)?;
            Ok(evaluate_point(&cfg, &[kind], k as f64, Some(n_trials), true, None)?.remove(0))
        })
        .collect::<Result<Vec<_>>>()?;
    let k_star = points
        .iter()
        .fold(None, |best: Option<&SweepPoint>, p| match best {
            Some(b) if b.simulated.as_ref().unwrap().sum_mean >= p.simulated.as_ref().unwrap().sum_mean => Some(b),
            _ => Some(p),
        })
        .map(|p| p.k_users)
        .ok_or_else(|| Error::InvalidConfig("N < M leaves no candidate user count".into()))?;
    Ok((k_star, SweepResult { axis: SweepAxis::Users, precoder: kind, points }))
}

/// Asymptotic sum rate for `N, N+1, ..., N+n_extra_max` antennas at fixed
/// K, M and `rho_sum`. [`SweepResult::increments`] gives the per-antenna gains.
pub fn antenna_increment_sweep(cfg_base: &SystemConfig, kind: PrecoderKind, n_extra_max: usize) -> Result<SweepResult> {
    let points = (0..=n_extra_max)
        .map(|j| {
            let n = cfg_base.n_bs + j;
            let cfg = base_with(cfg_base, n, cfg_base.k_users, cfg_base.rho_sum())?;
            Ok(evaluate_point(&cfg, &[kind], n as f64, None, true, None)?.remove(0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { axis: SweepAxis::BsAntennas, precoder: kind, points })
}

/// Paired simulated/asymptotic sum rates over a grid of configurations.
///
/// Configurations sharing `(N, M, rho_sum)` form one users-axis sweep per
/// precoder, in order of first appearance.
pub fn figure3_harness(
    grid: &[SystemConfig],
    kinds: &[PrecoderKind],
    n_trials: usize,
    workers: Option<usize>,
) -> Result<Vec<SweepResult>> {
    let mut groups: Vec<((usize, usize, u64), Vec<&SystemConfig>)> = Vec::new();
    for cfg in grid {
        let key = (cfg.n_bs, cfg.m_user, cfg.rho_sum().to_bits());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(cfg),
            None => groups.push((key, vec![cfg])),
        }
    }
    let mut out = Vec::new();
    for (_, mut members) in groups {
        members.sort_by_key(|c| c.k_users);
        members.dedup_by_key(|c| c.k_users);
        let mut per_kind: Vec<Vec<SweepPoint>> = kinds.iter().map(|_| Vec::new()).collect();
        for cfg in members {
            let points = evaluate_point(cfg, kinds, cfg.k_users as f64, Some(n_trials), true, workers)?;
            for (slot, p) in per_kind.iter_mut().zip(points) {
                slot.push(p);
            }
        }
        for (&kind, points) in kinds.iter().zip(per_kind) {
            out.push(SweepResult { axis: SweepAxis::Users, precoder: kind, points });
        }
    }
    Ok(out)
}
