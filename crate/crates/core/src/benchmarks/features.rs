//! Data-driven cost and stability features extracted from axis signals.

use std::sync::Mutex;

use rand::RngCore;
use rand_distr::{Distribution, Normal};
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

use super::plant::{ControllerGains, MotionSignals};

/// Right-sided sigmoid weight applied to the settle-phase signals, centered
/// `center_s` after the settle start with slope time `tau_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiFilter {
    pub center_s: f64,
    pub tau_s: f64,
    pub enabled: bool,
}

impl Default for XiFilter {
    fn default() -> Self {
        Self {
            center_s: 0.150,
            tau_s: 0.010,
            enabled: true,
        }
    }
}

impl XiFilter {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    /// Weight for sample `i` relative to the settle start `n_s`.
    pub fn weight(&self, i: usize, n_s: usize, fs: f64) -> f64 {
        if !self.enabled {
            return 1.0;
        }
        let center = self.center_s * fs;
        let tau = self.tau_s * fs;
        let z = ((i - n_s) as f64 - center) / tau;
        1.0 - 1.0 / (1.0 + (-z).exp())
    }
}

/// Heteroscedastic noise injected into the cost as a function of the
/// velocity-loop integral gain: variance `1e-7` for `vki <= 1200`, `1e-5`
/// above.
pub fn inject_delta(vki: f64, rng: &mut dyn RngCore) -> f64 {
    let variance: f64 = if vki <= 1200.0 { 1e-7 } else { 1e-5 };
    Normal::new(0.0, variance.sqrt())
        .expect("valid normal")
        .sample(rng)
}

/// Whether the synthetic heteroscedastic cost noise is injected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaConfig {
    pub enabled: bool,
}

/// Tracking cost (nm): mean of `|ξ·p_e|` over the settle window, plus the
/// injected noise draw when enabled.
pub fn tracking_cost(
    sig: &MotionSignals,
    gains: &ControllerGains,
    delta: DeltaConfig,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    if sig.settle_start >= sig.settle_end || sig.settle_end >= sig.len() {
        return Err(Error::invalid("invalid settle window"));
    }
    let xi = XiFilter::default();
    cost_with_filter(sig, &xi, gains, delta, rng)
}

/// Tracking cost with an explicit settle filter (the default entry point uses
/// the standard filter).
pub fn cost_with_filter(
    sig: &MotionSignals,
    xi: &XiFilter,
    gains: &ControllerGains,
    delta: DeltaConfig,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    if sig.settle_start >= sig.settle_end || sig.settle_end >= sig.len() {
        return Err(Error::invalid("invalid settle window"));
    }
    let n_s = sig.settle_start;
    let n_p = sig.settle_end;
    let mut acc = 0.0;
    for i in n_s..=n_p {
        let w = xi.weight(i, n_s, sig.sample_rate);
        acc += (w * sig.position_error_nm[i]).abs();
    }
    let mut cost = acc / (n_p - n_s + 1) as f64;
    if delta.enabled {
        cost += inject_delta(gains.vki, rng);
    }
    Ok(cost)
}

/// Frequency band searched by the stability feature (Hz).
pub const STABILITY_BAND_HZ: (f64, f64) = (140.0, 1250.0);

/// Sentinel returned for truncated (guard-tripped) runs; far above any
/// calibrated threshold.
pub const INSTABILITY_SENTINEL: f64 = 1e6;

/// Spectrum-amplitude feature unit (nm/s per unit).
pub const METRIC_UNIT_NM_S: f64 = 333.0;

static FFT_PLANNER: Mutex<Option<FftPlanner<f64>>> = Mutex::new(None);

fn fft_magnitudes(signal: &[f64], n_fft: usize) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = signal
        .iter()
        .map(|v| Complex::new(*v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(n_fft)
        .collect();
    let fft = {
        let mut guard = FFT_PLANNER.lock().expect("planner lock");
        guard
            .get_or_insert_with(FftPlanner::new)
            .plan_fft_forward(n_fft)
    };
    fft.process(&mut buf);
    buf.iter().map(|c| c.norm()).collect()
}

/// Stability feature: maximum magnitude of the DFT of the ξ-windowed
/// settle-phase velocity error over the frequency band, normalized by the
/// window length and reported in units of [`METRIC_UNIT_NM_S`].  Truncated
/// runs return [`INSTABILITY_SENTINEL`].
pub fn stability_metric(sig: &MotionSignals, band: (f64, f64), xi: &XiFilter) -> Result<f64> {
    if sig.settle_start >= sig.settle_end || sig.settle_end >= sig.len() {
        return Err(Error::invalid("invalid settle window"));
    }
    if sig.truncated {
        return Ok(INSTABILITY_SENTINEL);
    }
    let n_s = sig.settle_start;
    let n_p = sig.settle_end;
    let window: Vec<f64> = (n_s..=n_p)
        .map(|i| xi.weight(i, n_s, sig.sample_rate) * sig.velocity_error_nm_s[i])
        .collect();
    let n = window.len();
    // Zero-padding samples the spectrum finely enough that rectangular-window
    // scalloping stays below one percent.
    let n_fft = (8 * n).next_power_of_two();
    let mags = fft_magnitudes(&window, n_fft);
    let df = sig.sample_rate / n_fft as f64;
    let k_lo = (band.0 / df).ceil() as usize;
    let k_hi = ((band.1 / df).floor() as usize).min(n_fft / 2);
    if k_lo > k_hi {
        return Err(Error::invalid("frequency band contains no FFT bins"));
    }
    let peak = mags[k_lo..=k_hi].iter().copied().fold(0.0f64, f64::max);
    Ok(peak / n as f64 / METRIC_UNIT_NM_S)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gains(vki: f64) -> ControllerGains {
        ControllerGains {
            kp: 200.0,
            vkp: 600.0,
            vki,
            vff: 1.0,
            aff: 0.0,
        }
    }

    fn signals(p_e: Vec<f64>, v_e: Vec<f64>, n_s: usize) -> MotionSignals {
        let n = p_e.len();
        MotionSignals {
            position_error_nm: p_e,
            velocity_error_nm_s: v_e,
            settle_start: n_s,
            settle_end: n - 1,
            sample_rate: 20_000.0,
            truncated: false,
        }
    }

    #[test]
    fn zero_error_zero_cost() {
        let sig = signals(vec![0.0; 4001], vec![0.0; 4001], 1000);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = tracking_cost(&sig, &gains(1000.0), DeltaConfig { enabled: false }, &mut rng)
            .unwrap();
        assert_eq!(c, 0.0);
        let q = stability_metric(&sig, STABILITY_BAND_HZ, &XiFilter::default()).unwrap();
        assert_eq!(q, 0.0);
    }

    #[test]
    fn unit_error_with_disabled_filter_is_one() {
        let sig = signals(vec![1.0; 4001], vec![0.0; 4001], 1000);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = cost_with_filter(
            &sig,
            &XiFilter::disabled(),
            &gains(1000.0),
            DeltaConfig { enabled: false },
            &mut rng,
        )
        .unwrap();
        assert_relative_eq!(c, 1.0);
    }

    #[test]
    fn ramp_cost_matches_direct_summation() {
        let n = 5001;
        let n_s = 1000;
        let p_e: Vec<f64> = (0..n).map(|i| i as f64 * 1e-3).collect();
        let sig = signals(p_e.clone(), vec![0.0; n], n_s);
        let xi = XiFilter::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let got = cost_with_filter(
            &sig,
            &xi,
            &gains(1000.0),
            DeltaConfig { enabled: false },
            &mut rng,
        )
        .unwrap();
        // Independent summation.
        let mut acc = 0.0;
        for i in n_s..n {
            let z = ((i - n_s) as f64 - 0.150 * 20_000.0) / (0.010 * 20_000.0);
            let w = 1.0 - 1.0 / (1.0 + (-z).exp());
            acc += (w * p_e[i]).abs();
        }
        let expect = acc / (n - n_s) as f64;
        assert_relative_eq!(got, expect, max_relative = 1e-12);
    }

    #[test]
    fn delta_variances_match_branches() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let sample_var = |vki: f64, rng: &mut ChaCha8Rng| -> f64 {
            let draws: Vec<f64> = (0..n).map(|_| inject_delta(vki, rng)).collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1) as f64
        };
        let low = sample_var(1000.0, &mut rng);
        let high = sample_var(1500.0, &mut rng);
        assert!((low - 1e-7).abs() / 1e-7 < 0.05, "low-branch variance {low}");
        assert!(
            (high - 1e-5).abs() / 1e-5 < 0.05,
            "high-branch variance {high}"
        );
        // The boundary is inclusive on the low side.
        let boundary = sample_var(1200.0, &mut rng);
        assert!((boundary - 1e-7).abs() / 1e-7 < 0.05);
    }

    #[test]
    fn sinusoid_amplitude_recovered() {
        // 400 Hz amplitude-A sinusoid with the filter disabled → A/2 within 2%.
        let fs = 20_000.0;
        let n = 8001;
        let n_s = 2000;
        let amp = 3.7;
        let v_e: Vec<f64> = (0..n)
            .map(|i| amp * (2.0 * std::f64::consts::PI * 400.0 * i as f64 / fs).sin())
            .collect();
        let sig = signals(vec![0.0; n], v_e, n_s);
        let q = stability_metric(&sig, STABILITY_BAND_HZ, &XiFilter::disabled()).unwrap();
        let expect = amp / 2.0 / METRIC_UNIT_NM_S;
        assert!(
            (q - expect).abs() / expect < 0.02,
            "peak {q} vs expected {expect}"
        );
    }

    #[test]
    fn out_of_band_sinusoid_is_attenuated() {
        let fs = 20_000.0;
        let n = 8001;
        let n_s = 2000;
        let make = |freq: f64| -> MotionSignals {
            let v_e: Vec<f64> = (0..n)
                .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / fs).sin())
                .collect();
            signals(vec![0.0; n], v_e, n_s)
        };
        let xi = XiFilter::disabled();
        let in_band = stability_metric(&make(400.0), STABILITY_BAND_HZ, &xi).unwrap();
        let out_band = stability_metric(&make(50.0), STABILITY_BAND_HZ, &xi).unwrap();
        assert!(
            out_band <= 0.05 * in_band,
            "out-of-band leakage {out_band} vs in-band {in_band}"
        );
    }

    #[test]
    fn truncated_runs_hit_the_sentinel() {
        let mut sig = signals(vec![0.0; 4001], vec![0.0; 4001], 1000);
        sig.truncated = true;
        let q = stability_metric(&sig, STABILITY_BAND_HZ, &XiFilter::default()).unwrap();
        assert_eq!(q, INSTABILITY_SENTINEL);
    }

    #[test]
    fn features_are_non_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 4001;
        let p_e: Vec<f64> = (0..n).map(|i| ((i * 37) % 101) as f64 * 0.01 - 0.5).collect();
        let v_e: Vec<f64> = (0..n).map(|i| ((i * 53) % 89) as f64 * 0.1 - 4.0).collect();
        let sig = signals(p_e, v_e, 1000);
        let c = tracking_cost(&sig, &gains(1000.0), DeltaConfig { enabled: false }, &mut rng)
            .unwrap();
        let q = stability_metric(&sig, STABILITY_BAND_HZ, &XiFilter::default()).unwrap();
        assert!(c >= 0.0);
        assert!(q >= 0.0);
    }
}
