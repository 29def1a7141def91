//! Discrete-time simulation of a cascade-controlled linear motion axis.
//!
//! Plant: rigid mass with viscous damping plus one lightly damped resonant
//! mode, driven through a first-order current-loop lag.  Controller: position
//! P loop around a velocity PI loop with velocity and acceleration
//! feedforward, sampled at the plant rate.  All linear blocks use exact
//! zero-order-hold discretizations, so the fixed-step loop is not a source of
//! numerical instability.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

use super::reference::ReferenceTrajectory;

/// Force per unit of the velocity-loop proportional gain (N·s/m).
pub const VKP_SCALE: f64 = 16.0;
/// Force per unit of the velocity-loop integral gain (N/m per second).
pub const VKI_SCALE: f64 = 21_000.0;
/// Mass-equivalent per unit of the acceleration feedforward gain (kg).
pub const AFF_SCALE: f64 = 5.0;

/// Physical axis parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantModel {
    /// Moving mass (kg).
    pub mass: f64,
    /// Viscous damping (N·s/m).
    pub damping: f64,
    /// Resonant-mode natural frequency (Hz).
    pub mode_freq_hz: f64,
    /// Resonant-mode damping ratio.
    pub mode_zeta: f64,
    /// Dimensionless force coupling into the mode.
    pub mode_gain: f64,
    /// Current-loop first-order lag bandwidth (Hz).
    pub current_lag_hz: f64,
    /// Controller and acquisition sample rate (Hz).
    pub sample_rate: f64,
    /// Encoder position noise std (m).
    pub pos_noise_std: f64,
    /// Velocity measurement noise std (m/s).
    pub vel_noise_std: f64,
    /// Actuator force limit (N).
    pub force_limit: f64,
    /// Position-error guard bound (m); beyond it the run truncates.
    pub guard_bound: f64,
}

impl Default for PlantModel {
    fn default() -> Self {
        Self {
            mass: 5.0,
            damping: 20.0,
            mode_freq_hz: 400.0,
            mode_zeta: 0.02,
            mode_gain: 1.0,
            current_lag_hz: 1000.0,
            sample_rate: 20_000.0,
            pos_noise_std: 0.5e-9,
            vel_noise_std: 2.0e-8,
            force_limit: 500.0,
            guard_bound: 1.0e-3,
        }
    }
}

impl PlantModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("damping", self.damping),
            ("mode_freq_hz", self.mode_freq_hz),
            ("mode_zeta", self.mode_zeta),
            ("current_lag_hz", self.current_lag_hz),
            ("sample_rate", self.sample_rate),
            ("force_limit", self.force_limit),
            ("guard_bound", self.guard_bound),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if self.mode_freq_hz >= self.sample_rate / 2.0 {
            return Err(Error::invalid("resonant mode must lie below Nyquist"));
        }
        if !(self.mode_gain >= 0.0) || !(self.pos_noise_std >= 0.0) || !(self.vel_noise_std >= 0.0)
        {
            return Err(Error::invalid(
                "mode gain and noise levels must be non-negative",
            ));
        }
        Ok(())
    }
}

/// Cascade controller gains in vendor units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    /// Position-loop proportional gain (1/s).
    pub kp: f64,
    /// Velocity-loop proportional gain (vendor units, scaled by [`VKP_SCALE`]).
    pub vkp: f64,
    /// Velocity-loop integral gain (vendor units, scaled by [`VKI_SCALE`]).
    pub vki: f64,
    /// Velocity feedforward (1 = ideal), fixed during tuning.
    pub vff: f64,
    /// Acceleration feedforward (kg-equivalent units, scaled by [`AFF_SCALE`]).
    pub aff: f64,
}

impl ControllerGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kp", self.kp),
            ("vkp", self.vkp),
            ("vki", self.vki),
            ("vff", self.vff),
            ("aff", self.aff),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("gain {name} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Logged axis signals over one move: measured position error (nm), measured
/// velocity error (nm/s) and the settle window.
#[derive(Debug, Clone)]
pub struct MotionSignals {
    pub position_error_nm: Vec<f64>,
    pub velocity_error_nm_s: Vec<f64>,
    pub settle_start: usize,
    pub settle_end: usize,
    pub sample_rate: f64,
    /// Set when the guard bound tripped and the run was truncated.
    pub truncated: bool,
}

impl MotionSignals {
    pub fn len(&self) -> usize {
        self.position_error_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position_error_nm.is_empty()
    }
}

/// Exact ZOH update coefficients for the resonant mode.
struct ModeDiscretization {
    phi11: f64,
    phi12: f64,
    phi21: f64,
    phi22: f64,
    gamma1: f64,
    gamma2: f64,
}

impl ModeDiscretization {
    fn new(omega: f64, zeta: f64, h: f64) -> Self {
        let omega_d = omega * (1.0 - zeta * zeta).sqrt();
        let e = (-zeta * omega * h).exp();
        let c = (omega_d * h).cos();
        let s = (omega_d * h).sin();
        let phi11 = e * (c + zeta * omega / omega_d * s);
        let phi12 = e * s / omega_d;
        let phi21 = -omega * omega * e * s / omega_d;
        let phi22 = e * (c - zeta * omega / omega_d * s);
        // Γ = A⁻¹(Φ − I)B for B = [0, 1]ᵀ.
        let gamma1 = -2.0 * zeta / omega * phi12 - (phi22 - 1.0) / (omega * omega);
        let gamma2 = phi12;
        Self {
            phi11,
            phi12,
            phi21,
            phi22,
            gamma1,
            gamma2,
        }
    }
}

/// Fixed-step closed-loop simulation; deterministic for a given seed, and
/// seed-independent when both measurement noise levels are zero.
pub fn simulate_axis(
    plant: &PlantModel,
    gains: &ControllerGains,
    reference: &ReferenceTrajectory,
    seed: u64,
) -> Result<MotionSignals> {
    plant.validate()?;
    gains.validate()?;
    if reference.is_empty() {
        return Err(Error::invalid("empty reference trajectory"));
    }
    if (reference.sample_rate - plant.sample_rate).abs() > 1e-9 {
        return Err(Error::invalid(
            "reference and plant sample rates must match",
        ));
    }
    let h = 1.0 / plant.sample_rate;
    let n = reference.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");

    // Exact ZOH coefficients.
    let lag_alpha = (-2.0 * std::f64::consts::PI * plant.current_lag_hz * h).exp();
    let tau = plant.mass / plant.damping;
    let rigid_e = (-h / tau).exp();
    let omega = 2.0 * std::f64::consts::PI * plant.mode_freq_hz;
    let mode = ModeDiscretization::new(omega, plant.mode_zeta, h);
    let mode_input_gain = plant.mode_gain / plant.mass;

    let vkp_eff = VKP_SCALE * gains.vkp;
    let vki_eff = VKI_SCALE * gains.vki;
    let aff_kg = AFF_SCALE * gains.aff;
    let integ_limit = if vki_eff > 0.0 {
        plant.force_limit / vki_eff
    } else {
        f64::INFINITY
    };

    let (mut xr, mut vr) = (0.0f64, 0.0f64);
    let (mut xf, mut vf) = (0.0f64, 0.0f64);
    let mut force = 0.0f64;
    let mut integ = 0.0f64;

    let mut p_e = Vec::with_capacity(n);
    let mut v_e = Vec::with_capacity(n);
    let mut truncated = false;

    for i in 0..n {
        let noise_p = unit.sample(&mut rng) * plant.pos_noise_std;
        let noise_v = unit.sample(&mut rng) * plant.vel_noise_std;
        let p_meas = xr + xf + noise_p;
        let v_meas = vr + vf + noise_v;

        let p_err = reference.position[i] - p_meas;
        let v_err = gains.kp * p_err + gains.vff * reference.velocity[i] - v_meas;
        integ = (integ + v_err * h).clamp(-integ_limit, integ_limit);
        let f_cmd = (vkp_eff * v_err + vki_eff * integ + aff_kg * reference.acceleration[i])
            .clamp(-plant.force_limit, plant.force_limit);

        p_e.push(p_err * 1e9);
        v_e.push((reference.velocity[i] - v_meas) * 1e9);

        if p_err.abs() > plant.guard_bound {
            truncated = true;
            let last_p = *p_e.last().expect("pushed above");
            let last_v = *v_e.last().expect("pushed above");
            p_e.resize(n, last_p);
            v_e.resize(n, last_v);
            break;
        }

        // Current-loop lag, then exact rigid-body and mode updates under the
        // held force.
        force = lag_alpha * force + (1.0 - lag_alpha) * f_cmd;
        let f_over_b = force / plant.damping;
        let xr_next = xr + f_over_b * h + (vr - f_over_b) * tau * (1.0 - rigid_e);
        let vr_next = f_over_b + (vr - f_over_b) * rigid_e;
        xr = xr_next;
        vr = vr_next;
        let u = mode_input_gain * force;
        let xf_next = mode.phi11 * xf + mode.phi12 * vf + mode.gamma1 * u;
        let vf_next = mode.phi21 * xf + mode.phi22 * vf + mode.gamma2 * u;
        xf = xf_next;
        vf = vf_next;
    }

    Ok(MotionSignals {
        position_error_nm: p_e,
        velocity_error_nm_s: v_e,
        settle_start: reference.settle_start,
        settle_end: reference.settle_end,
        sample_rate: plant.sample_rate,
        truncated,
    })
}
