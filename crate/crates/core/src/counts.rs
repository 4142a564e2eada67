//! Detection-count forward model, correlation estimators and seeded
//! synthetic experiments.
//!
//! Random streams: the record for τ-index `k` is drawn from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `k`, so records are
//! independent of evaluation order and of how many points are generated.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spectral::pair_probability_ratio;
use crate::{Error, Estimate, Result};

/// Upper bound on `p_max` for the first-order count model to apply.
pub const MAX_PAIR_PROBABILITY: f64 = 0.1;

/// The eight shared parameters of the count model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountModelParams {
    /// Signal noise counts per acquisition.
    pub n_s: f64,
    /// Idler noise counts per acquisition.
    pub n_i: f64,
    pub eta_s: f64,
    pub eta_i: f64,
    /// Pair probability per pulse at maximal pump overlap.
    pub p_max: f64,
    /// Combined pump bandwidth, rad/ps.
    pub sigma: f64,
    /// Pump walk-off magnitude, ps. Only `|τ_p|` is identifiable from counts:
    /// `(−τ_p, τ_c)` gives the same curves as `(τ_p, τ_c + τ_p)`.
    pub tau_p: f64,
    /// Stage offset, ps.
    pub tau_c: f64,
}

pub const PARAM_NAMES: [&str; 8] = ["N_s", "N_i", "eta_s", "eta_i", "p_max", "sigma", "tau_p", "tau_c"];

impl CountModelParams {
    pub fn validate(&self) -> Result<()> {
        let all = self.to_array();
        if let Some(k) = all.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("{} is not finite", PARAM_NAMES[k])));
        }
        if self.n_s < 0.0 || self.n_i < 0.0 {
            return Err(Error::domain("noise counts must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.eta_s) || !(0.0..=1.0).contains(&self.eta_i) {
            return Err(Error::domain("detection efficiencies must lie in [0, 1]"));
        }
        if !(0.0..=MAX_PAIR_PROBABILITY).contains(&self.p_max) {
            return Err(Error::domain(format!("p_max must lie in [0, {MAX_PAIR_PROBABILITY}], got {}", self.p_max)));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::domain("sigma must be positive"));
        }
        if !(self.tau_p > 0.0) {
            return Err(Error::domain("tau_p must be positive"));
        }
        Ok(())
    }

    /// Parameters in the order of [`PARAM_NAMES`].
    pub fn to_array(&self) -> [f64; 8] {
        [self.n_s, self.n_i, self.eta_s, self.eta_i, self.p_max, self.sigma, self.tau_p, self.tau_c]
    }

    pub fn from_array(v: [f64; 8]) -> Self {
        CountModelParams { n_s: v[0], n_i: v[1], eta_s: v[2], eta_i: v[3], p_max: v[4], sigma: v[5], tau_p: v[6], tau_c: v[7] }
    }

    /// Pair probability per pulse at stage delay `tau_exp`.
    pub fn pair_probability(&self, tau_exp: f64) -> Result<f64> {
        Ok(self.p_max * pair_probability_ratio(tau_exp - self.tau_c, self.sigma, self.tau_p)?)
    }

    /// Stage delay of maximal pump overlap.
    pub fn peak_delay(&self) -> f64 {
        self.tau_c - self.tau_p / 2.0
    }
}

/// One acquisition at a fixed stage delay.
///
/// `scale` multiplies the recorded singles (e.g. singles counted on a
/// divided-down gate); coincidences are never scaled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub tau_ps: f64,
    #[serde(rename = "C_s")]
    pub c_s: u64,
    #[serde(rename = "C_i")]
    pub c_i: u64,
    #[serde(rename = "C_si")]
    pub c_si: u64,
    #[serde(rename = "R")]
    pub r: u64,
    #[serde(default = "unit_scale")]
    pub scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl CountRecord {
    pub fn new(tau_ps: f64, c_s: u64, c_i: u64, c_si: u64, r: u64) -> Self {
        CountRecord { tau_ps, c_s, c_i, c_si, r, scale: 1.0 }
    }

    pub fn singles_signal(&self) -> f64 {
        self.scale * self.c_s as f64
    }

    pub fn singles_idler(&self) -> f64 {
        self.scale * self.c_i as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tau_ps.is_finite() {
            return Err(Error::InconsistentData("delay is not finite".into()));
        }
        if self.r == 0 {
            return Err(Error::InconsistentData(format!("R must be positive (τ = {} ps)", self.tau_ps)));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InconsistentData(format!("scale must be positive (τ = {} ps)", self.tau_ps)));
        }
        let c_si = self.c_si as f64;
        if c_si > self.singles_signal() || c_si > self.singles_idler() {
            return Err(Error::InconsistentData(format!(
                "coincidences exceed singles at τ = {} ps ({} > min({}, {}))",
                self.tau_ps,
                self.c_si,
                self.singles_signal(),
                self.singles_idler()
            )));
        }
        Ok(())
    }
}

/// Counts of a heralded autocorrelation measurement: signal split onto
/// detectors `s` and `s′`, idler on `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleCountRecord {
    #[serde(rename = "C_s")]
    pub c_s: u64,
    #[serde(rename = "C_s'")]
    pub c_s2: u64,
    #[serde(rename = "C_i")]
    pub c_i: u64,
    #[serde(rename = "C_si")]
    pub c_si: u64,
    #[serde(rename = "C_ss'")]
    pub c_ss2: u64,
    #[serde(rename = "C_s'i")]
    pub c_s2i: u64,
    #[serde(rename = "C_ss'i")]
    pub c_ss2i: u64,
    #[serde(rename = "R")]
    pub r: u64,
}

impl TripleCountRecord {
    pub fn validate(&self) -> Result<()> {
        let ok = self.c_si <= self.c_s.min(self.c_i)
            && self.c_s2i <= self.c_s2.min(self.c_i)
            && self.c_ss2 <= self.c_s.min(self.c_s2)
            && self.c_ss2i <= self.c_si.min(self.c_s2i).min(self.c_ss2)
            && self.c_s.max(self.c_s2).max(self.c_i) <= self.r;
        if ok {
            Ok(())
        } else {
            Err(Error::InconsistentData(format!("coincidences exceed constituent singles: {self:?}")))
        }
    }
}

/// Mean counts of one acquisition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCounts {
    pub c_s: f64,
    pub c_i: f64,
    pub c_si: f64,
}

impl ExpectedCounts {
    /// `g²_si` of the means.
    pub fn cross_correlation(&self, r: u64) -> f64 {
        self.c_si * r as f64 / (self.c_s * self.c_i)
    }
}

fn counts_at(params: &CountModelParams, p: f64, r: f64) -> ExpectedCounts {
    let CountModelParams { n_s, n_i, eta_s, eta_i, .. } = *params;
    ExpectedCounts {
        c_s: n_s + eta_s * p * r,
        c_i: n_i + eta_i * p * r,
        c_si: n_s * n_i / r + (1.0 - eta_s) * p * n_i + (1.0 - eta_i) * p * n_s + eta_s * eta_i * p * r,
    }
}

/// Mean singles and coincidences at stage delay `tau_exp` over `r` pulses.
pub fn expected_counts(params: &CountModelParams, tau_exp: f64, r: u64) -> Result<ExpectedCounts> {
    params.validate()?;
    if r == 0 {
        return Err(Error::domain("R must be positive"));
    }
    let p = params.pair_probability(tau_exp)?;
    Ok(counts_at(params, p, r as f64))
}

/// `g²_si = C_si·R/(C_s·C_i)` with its Poisson standard error.
pub fn cross_correlation(record: &CountRecord) -> Result<Estimate> {
    if record.c_s == 0 || record.c_i == 0 {
        return Err(Error::UndefinedEstimator(format!("zero singles at τ = {} ps", record.tau_ps)));
    }
    let g = record.c_si as f64 * record.r as f64 / (record.singles_signal() * record.singles_idler());
    let rel_var = 1.0 / (record.c_si.max(1) as f64) + 1.0 / record.c_s as f64 + 1.0 / record.c_i as f64;
    Ok(Estimate::new(g, g.max(poisson_floor(record)) * rel_var.sqrt()))
}

// a zero-coincidence record still has an uncertainty of one count
fn poisson_floor(record: &CountRecord) -> f64 {
    if record.c_si == 0 {
        record.r as f64 / (record.singles_signal() * record.singles_idler())
    } else {
        0.0
    }
}

/// Heralded autocorrelation `g²_ss′|i = C_ss′i·C_i/(C_si·C_s′i)`.
pub fn conditional_autocorr(record: &TripleCountRecord) -> Result<Estimate> {
    if record.c_si == 0 || record.c_s2i == 0 {
        return Err(Error::UndefinedEstimator("zero two-fold coincidences in the heralded arms".into()));
    }
    let base = record.c_i as f64 / (record.c_si as f64 * record.c_s2i as f64);
    let g = record.c_ss2i as f64 * base;
    let triples = record.c_ss2i.max(1) as f64;
    let rel_var = 1.0 / triples + 1.0 / record.c_i.max(1) as f64 + 1.0 / record.c_si as f64 + 1.0 / record.c_s2i as f64;
    Ok(Estimate::new(g, triples * base * rel_var.sqrt()))
}

/// RNG for the `index`-th record of a seeded run.
pub fn record_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws category counts of a multinomial over `n` trials by sequential
/// conditional binomials. The last category takes the remainder.
fn multinomial<R: Rng + ?Sized>(rng: &mut R, n: u64, probs: &[f64]) -> Result<Vec<u64>> {
    if probs.iter().any(|q| !(*q >= 0.0)) {
        return Err(Error::domain(format!("negative event-class probability in {probs:?}")));
    }
    let total: f64 = probs.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::domain(format!("event-class probabilities sum to {total} > 1")));
    }
    let mut out = Vec::with_capacity(probs.len() + 1);
    let mut left = n;
    let mut mass = 1.0;
    for &q in probs {
        let k = if left == 0 || q == 0.0 {
            0
        } else {
            let cond = (q / mass).min(1.0);
            Binomial::new(left, cond).map_err(|e| Error::domain(format!("binomial draw: {e}")))?.sample(rng)
        };
        out.push(k);
        left -= k;
        mass = (mass - q).max(0.0);
    }
    out.push(left);
    Ok(out)
}

/// Per-pulse probabilities of the disjoint event classes whose sums
/// reproduce the mean counts: pair detected in both arms, pair photon
/// detected with a noise partner, noise-noise, signal-only, idler-only.
fn event_classes(params: &CountModelParams, p: f64, r: f64) -> [f64; 5] {
    let mean = counts_at(params, p, r);
    let both = params.eta_s * params.eta_i * p;
    let pair_noise = ((1.0 - params.eta_s) * p * params.n_i + (1.0 - params.eta_i) * p * params.n_s) / r;
    let noise_noise = params.n_s * params.n_i / (r * r);
    [both, pair_noise, noise_noise, (mean.c_s - mean.c_si) / r, (mean.c_i - mean.c_si) / r]
}

fn simulate_one(params: &CountModelParams, tau_exp: f64, r: u64, seed: u64, index: u64) -> Result<CountRecord> {
    let p = params.pair_probability(tau_exp)?;
    if params.n_s > r as f64 || params.n_i > r as f64 {
        return Err(Error::domain(format!("noise counts exceed the {r} pulses of the acquisition")));
    }
    let classes = event_classes(params, p, r as f64);
    if classes[3] < 0.0 || classes[4] < 0.0 {
        return Err(Error::domain(format!(
            "mean coincidences exceed mean singles at τ = {tau_exp} ps; no per-pulse process has these means"
        )));
    }
    let mut rng = record_rng(seed, index);
    let n = multinomial(&mut rng, r, &classes)?;
    let c_si = n[0] + n[1] + n[2];
    Ok(CountRecord::new(tau_exp, c_si + n[3], c_si + n[4], c_si, r))
}

/// Synthetic acquisitions at each stage delay in `taus`.
///
/// Each pulse falls into one event class drawn from a multinomial whose
/// class probabilities reproduce the mean singles and coincidences, so
/// `C_si ≤ min(C_s, C_i)` holds by construction.
pub fn simulate_counts(params: &CountModelParams, taus: &[f64], r: u64, seed: u64) -> Result<Vec<CountRecord>> {
    params.validate()?;
    if r == 0 {
        return Err(Error::domain("R must be positive"));
    }
    taus.par_iter()
        .enumerate()
        .map(|(k, &tau)| simulate_one(params, tau, r, seed, k as u64))
        .collect()
}

/// Source seen by a heralded autocorrelation setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeraldedSource {
    /// Pair probability per pulse.
    pub p: f64,
    pub eta_s: f64,
    pub eta_i: f64,
    /// Signal noise click probability per pulse, split evenly onto `s` and `s′`.
    pub noise_s: f64,
    /// Idler noise click probability per pulse.
    pub noise_i: f64,
    /// Whether double pairs are emitted; their probability is `p²(1+P)/2`
    /// for a source of spectral purity `P`.
    pub multi_pair: bool,
    pub purity: f64,
}

impl HeraldedSource {
    /// The source behind a count model at maximal pump overlap.
    pub fn from_count_model(params: &CountModelParams, r: u64, purity: f64) -> Self {
        HeraldedSource {
            p: params.p_max,
            eta_s: params.eta_s,
            eta_i: params.eta_i,
            noise_s: params.n_s / r as f64,
            noise_i: params.n_i / r as f64,
            multi_pair: true,
            purity,
        }
    }

    fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if ![self.p, self.eta_s, self.eta_i, self.noise_s, self.noise_i, self.purity].into_iter().all(unit) {
            return Err(Error::domain("heralded source probabilities must lie in [0, 1]"));
        }
        if self.p + self.two_pair_probability() > 1.0 {
            return Err(Error::domain("pair probabilities exceed one"));
        }
        Ok(())
    }

    fn two_pair_probability(&self) -> f64 {
        if self.multi_pair {
            self.p * self.p * (1.0 + self.purity) / 2.0
        } else {
            0.0
        }
    }

    /// Per-pulse probabilities of the eight click patterns, indexed by the
    /// bits `s | s′<<1 | i<<2`.
    pub fn pattern_probabilities(&self) -> Result<[f64; 8]> {
        self.validate()?;
        let p2 = self.two_pair_probability();
        let weights = [(0, 1.0 - self.p - p2), (1, self.p), (2, p2)];
        let half_noise = self.noise_s / 2.0;
        let mut out = [0.0; 8];
        for (n, weight) in weights {
            // signal arm: each photon reaches s or s′ with η_s/2, noise adds independently
            let quiet_both = (1.0 - self.eta_s).powi(n) * (1.0 - half_noise).powi(2);
            let quiet_s = (1.0 - self.eta_s / 2.0).powi(n) * (1.0 - half_noise);
            let one = (quiet_s - quiet_both).max(0.0);
            let signal = [quiet_both, one, one, (1.0 - 2.0 * quiet_s + quiet_both).max(0.0)];
            // signal[1] = s clicks, s′ quiet: P(s′ quiet) − P(both quiet), same by symmetry
            let idler_quiet = (1.0 - self.eta_i).powi(n) * (1.0 - self.noise_i);
            for (bits, ps) in signal.iter().enumerate() {
                out[bits] += weight * ps * idler_quiet;
                out[bits | 4] += weight * ps * (1.0 - idler_quiet);
            }
        }
        Ok(out)
    }
}

/// Seeded heralded-autocorrelation experiment over `r` pulses.
pub fn simulate_heralded_triples(source: &HeraldedSource, r: u64, seed: u64) -> Result<TripleCountRecord> {
    let probs = source.pattern_probabilities()?;
    let mut rng = record_rng(seed, 0);
    // pattern 0 (no clicks) takes the remainder
    let n = multinomial(&mut rng, r, &probs[1..])?;
    let count = |mask: usize| -> u64 { (1..8).filter(|b| b & mask == mask).map(|b| n[b - 1]).sum() };
    Ok(TripleCountRecord {
        c_s: count(1),
        c_s2: count(2),
        c_i: count(4),
        c_si: count(5),
        c_ss2: count(3),
        c_s2i: count(6),
        c_ss2i: count(7),
        r,
    })
}
