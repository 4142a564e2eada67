//! Noise-corrected single-photon purity.
//!
//! Measured autocorrelations at the peak delay, at large delay and with the
//! pumps blocked give the raw, noise and detection purities. Together with
//! the count fractions they bound the purity of the photons that were truly
//! created in pairs. [`MixtureModel`] is the forward model behind those
//! bounds and is used to check them.

use serde::{Deserialize, Serialize};

use crate::{Error, Estimate, Result};

/// Singles and two-fold coincidences of the two signal detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutoCounts {
    #[serde(rename = "C_s")]
    pub c_s: u64,
    #[serde(rename = "C_s'")]
    pub c_s2: u64,
    #[serde(rename = "C_ss'")]
    pub c_ss2: u64,
    #[serde(rename = "R")]
    pub r: u64,
}

/// `g²_ss′ − 1 = C_ss′R/(C_sC_s′) − 1` with its Poisson standard error.
pub fn raw_purity(c_ss2: u64, c_s: u64, c_s2: u64, r: u64) -> Result<Estimate> {
    if c_s == 0 || c_s2 == 0 {
        return Err(Error::UndefinedEstimator("zero singles on a signal detector".into()));
    }
    let g = c_ss2 as f64 * r as f64 / (c_s as f64 * c_s2 as f64);
    let rel_var = 1.0 / c_ss2.max(1) as f64 + 1.0 / c_s as f64 + 1.0 / c_s2 as f64;
    let scale = if c_ss2 == 0 { r as f64 / (c_s as f64 * c_s2 as f64) } else { g };
    Ok(Estimate::new(g - 1.0, scale * rel_var.sqrt()))
}

impl AutoCounts {
    pub fn raw_purity(&self) -> Result<Estimate> {
        raw_purity(self.c_ss2, self.c_s, self.c_s2, self.r)
    }
}

/// Ratio `a/b` of two independent Poisson counts with its standard error.
fn count_ratio(a: u64, b: u64) -> Estimate {
    let v = a as f64 / b as f64;
    let rel = 1.0 / a.max(1) as f64 + 1.0 / b as f64;
    let base = if a == 0 { 1.0 / b as f64 } else { v };
    Estimate::new(v, base * rel.sqrt())
}

/// Everything the purity bounds consume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurityInputs {
    pub p_raw: Estimate,
    pub p_noise: Estimate,
    pub p_det: Estimate,
    /// Noise fraction of the counts at the peak delay, per detector.
    pub t_s: Estimate,
    pub t_s2: Estimate,
    /// Detection-noise fraction of the noise counts, per detector.
    pub u_s: Estimate,
    pub u_s2: Estimate,
}

impl PurityInputs {
    /// Inputs with identical arms: `t_s = t_s′ = 1 − r`, `u_s = u_s′ = u`.
    pub fn symmetric(p_raw: Estimate, p_noise: Estimate, p_det: Estimate, r: f64, u: f64) -> Self {
        let t = Estimate::exact(1.0 - r);
        let u = Estimate::exact(u);
        PurityInputs { p_raw, p_noise, p_det, t_s: t, t_s2: t, u_s: u, u_s2: u }
    }

    pub fn r(&self) -> f64 {
        ((1.0 - self.t_s.value) * (1.0 - self.t_s2.value)).max(0.0).sqrt()
    }

    pub fn t(&self) -> f64 {
        (self.t_s.value * self.t_s2.value).max(0.0).sqrt()
    }

    pub fn u(&self) -> f64 {
        (self.u_s.value * self.u_s2.value).max(0.0).sqrt()
    }

    /// `r` with its propagated error.
    pub fn r_estimate(&self) -> Estimate {
        let r = self.r();
        if r == 0.0 {
            return Estimate::exact(0.0);
        }
        // ∂r/∂t_x = −r/(2(1 − t_x))
        let ds = r / (2.0 * (1.0 - self.t_s.value)) * self.t_s.std_err;
        let ds2 = r / (2.0 * (1.0 - self.t_s2.value)) * self.t_s2.std_err;
        Estimate::new(r, ds.hypot(ds2))
    }

    fn values(&self) -> [f64; 7] {
        [self.p_raw.value, self.p_noise.value, self.p_det.value, self.t_s.value, self.t_s2.value, self.u_s.value, self.u_s2.value]
    }

    fn errors(&self) -> [f64; 7] {
        [
            self.p_raw.std_err,
            self.p_noise.std_err,
            self.p_det.std_err,
            self.t_s.std_err,
            self.t_s2.std_err,
            self.u_s.std_err,
            self.u_s2.std_err,
        ]
    }

    fn validate(&self) -> Result<()> {
        let v = self.values();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("purity inputs must be finite"));
        }
        if v[..3].iter().any(|p| *p < -1.0) {
            return Err(Error::domain("measured purities must be ≥ −1"));
        }
        if v[3..].iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::domain("count fractions must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Builds the bound inputs from counts at the peak delay `τ₀`, at large
/// delay, and with both pumps blocked.
///
/// Without any noise counts (`C(∞) = 0`) the noise terms vanish: `t = 0`,
/// `u = 0`, `P_noise = P_det = 0`. Without dark counts, `u = 0` and
/// `P_det = 0`.
pub fn noise_fractions(peak: &AutoCounts, far: &AutoCounts, dark: &AutoCounts) -> Result<PurityInputs> {
    if far.c_s > peak.c_s || far.c_s2 > peak.c_s2 {
        return Err(Error::InconsistentData(format!(
            "large-delay singles ({}, {}) exceed peak singles ({}, {}); no pair peak",
            far.c_s, far.c_s2, peak.c_s, peak.c_s2
        )));
    }
    if dark.c_s > far.c_s || dark.c_s2 > far.c_s2 {
        return Err(Error::InconsistentData("dark counts exceed the total noise counts".into()));
    }
    if peak.r == 0 || far.r == 0 || dark.r == 0 {
        return Err(Error::InconsistentData("R must be positive".into()));
    }
    let p_raw = peak.raw_purity()?;
    let noiseless = far.c_s == 0 || far.c_s2 == 0;
    let (t_s, t_s2, p_noise) = if noiseless {
        (Estimate::exact(0.0), Estimate::exact(0.0), Estimate::exact(0.0))
    } else {
        (count_ratio(far.c_s, peak.c_s), count_ratio(far.c_s2, peak.c_s2), far.raw_purity()?)
    };
    let no_darks = noiseless || dark.c_s == 0 || dark.c_s2 == 0;
    let (u_s, u_s2, p_det) = if no_darks {
        (Estimate::exact(0.0), Estimate::exact(0.0), Estimate::exact(0.0))
    } else {
        (count_ratio(dark.c_s, far.c_s), count_ratio(dark.c_s2, far.c_s2), dark.raw_purity()?)
    };
    Ok(PurityInputs { p_raw, p_noise, p_det, t_s, t_s2, u_s, u_s2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurityBounds {
    pub lower: Estimate,
    pub upper: Estimate,
    /// `P_noise − u²P_det` was negative and clamped to zero.
    pub clamped: bool,
    /// The upper bound exceeds one: inputs are statistically inconsistent.
    pub exceeds_unity: bool,
}

impl PurityBounds {
    pub fn is_point(&self) -> bool {
        self.lower.value == self.upper.value
    }
}

fn bound_values(v: &[f64; 7]) -> Result<(f64, f64, bool)> {
    let [p_raw, p_noise, p_det, t_s, t_s2, u_s, u_s2] = *v;
    let r2 = (1.0 - t_s) * (1.0 - t_s2);
    if !(r2 > 0.0) {
        return Err(Error::NoSignal("no pair counts above noise (r = 0)".into()));
    }
    let t = (t_s * t_s2).max(0.0).sqrt();
    let u2 = u_s * u_s2;
    let spurious = p_noise - u2 * p_det;
    let clamped = spurious < 0.0;
    let spurious = spurious.max(0.0);
    let upper = (p_raw - t * t * p_noise) / r2;
    let lower = upper - 2.0 * t / r2 * (p_raw.max(0.0) * spurious).sqrt();
    Ok((lower, upper, clamped))
}

/// Lower and upper bounds on the purity of the pair photons.
pub fn purity_bounds(inputs: &PurityInputs) -> Result<PurityBounds> {
    inputs.validate()?;
    let v = inputs.values();
    let (lower, upper, clamped) = bound_values(&v)?;
    let errs = inputs.errors();
    // first-order propagation by central differences, inputs independent
    let mut var_lo = 0.0;
    let mut var_up = 0.0;
    for k in 0..7 {
        if errs[k] == 0.0 {
            continue;
        }
        let h = 1e-6 * v[k].abs().max(1e-3);
        let mut plus = v;
        let mut minus = v;
        plus[k] += h;
        minus[k] -= h;
        let (lp, up, _) = bound_values(&plus)?;
        let (lm, um, _) = bound_values(&minus)?;
        var_lo += ((lp - lm) / (2.0 * h) * errs[k]).powi(2);
        var_up += ((up - um) / (2.0 * h) * errs[k]).powi(2);
    }
    Ok(PurityBounds {
        lower: Estimate::new(lower, var_lo.sqrt()),
        upper: Estimate::new(upper, var_up.sqrt()),
        clamped,
        exceeds_unity: upper > 1.0,
    })
}

/// Forward model of the measured raw purity: a fraction `w` of the signal
/// photons come from pairs (purity `P`), the rest are spurious (purity
/// `P_spu`), and detection noise makes up `v_x` of each detector's counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    pub purity: f64,
    pub purity_spurious: f64,
    pub purity_detection: f64,
    pub w: f64,
    pub v_s: f64,
    pub v_s2: f64,
    /// `Tr(ρ_sρ_spu)`.
    pub overlap: f64,
}

impl MixtureModel {
    pub fn validate(&self) -> Result<()> {
        let unit = [self.purity, self.purity_spurious, self.purity_detection, self.w, self.v_s, self.v_s2];
        if !unit.iter().all(|x| (0.0..=1.0).contains(x)) {
            return Err(Error::domain("purities and fractions must lie in [0, 1]"));
        }
        let max_overlap = (self.purity * self.purity_spurious).sqrt();
        if !(self.overlap >= 0.0 && self.overlap <= max_overlap * (1.0 + 1e-12)) {
            return Err(Error::domain(format!("overlap {} outside [0, √(P·P_spu)] = [0, {max_overlap}]", self.overlap)));
        }
        Ok(())
    }

    /// Raw purity without detection noise.
    pub fn source_raw_purity(&self) -> f64 {
        let w = self.w;
        w * w * self.purity + (1.0 - w).powi(2) * self.purity_spurious + 2.0 * w * (1.0 - w) * self.overlap
    }

    /// Detection-noise fraction of the noise counts on each detector.
    pub fn detection_noise_fractions(&self) -> (f64, f64) {
        let u = |v: f64| {
            let total = (1.0 - self.w) * (1.0 - v) + v;
            if total > 0.0 {
                v / total
            } else {
                0.0
            }
        };
        (u(self.v_s), u(self.v_s2))
    }

    /// Noise purity at large delay, where no pairs are produced.
    pub fn noise_purity(&self) -> f64 {
        let (u_s, u_s2) = self.detection_noise_fractions();
        (1.0 - u_s) * (1.0 - u_s2) * self.purity_spurious + u_s * u_s2 * self.purity_detection
    }

    /// Exact inputs a noise-free measurement of this model would produce.
    pub fn purity_inputs(&self) -> Result<PurityInputs> {
        let p_raw = forward_noise_mixture(self)?;
        let (u_s, u_s2) = self.detection_noise_fractions();
        let t = |v: f64| 1.0 - self.w * (1.0 - v);
        Ok(PurityInputs {
            p_raw: Estimate::exact(p_raw),
            p_noise: Estimate::exact(self.noise_purity()),
            p_det: Estimate::exact(self.purity_detection),
            t_s: Estimate::exact(t(self.v_s)),
            t_s2: Estimate::exact(t(self.v_s2)),
            u_s: Estimate::exact(u_s),
            u_s2: Estimate::exact(u_s2),
        })
    }
}

/// Measured raw purity predicted by the mixture model.
pub fn forward_noise_mixture(model: &MixtureModel) -> Result<f64> {
    model.validate()?;
    Ok((1.0 - model.v_s) * (1.0 - model.v_s2) * model.source_raw_purity() + model.v_s * model.v_s2 * model.purity_detection)
}
