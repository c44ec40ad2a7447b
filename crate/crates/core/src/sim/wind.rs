use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Hub-height wind description.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum WindSpec {
    Constant { speed: f64 },
    Turbulent { mean: f64, intensity: f64, seed: u64 },
    Gust { speed: f64, start: f64 },
    Series { dt: f64, values: Vec<f64> },
}

/// Seeded Gaussian noise through a first-order low-pass, then shifted and
/// scaled so the sample mean and standard deviation are exact. Values are
/// clamped at zero.
pub fn wind_turbulent(mean: f64, intensity: f64, seed: u64, duration: f64, dt: f64, corner_hz: f64) -> Vec<f64> {
    let n = (duration / dt).round() as usize + 1;
    let sigma = intensity * mean;
    if sigma <= 0.0 || n < 2 {
        return alloc::vec![mean; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = (-2.0 * PI * corner_hz * dt).exp();
    let mut state: f64 = StandardNormal.sample(&mut rng);
    let mut raw = Vec::with_capacity(n);
    for _ in 0..n {
        raw.push(state);
        let e: f64 = StandardNormal.sample(&mut rng);
        state = phi * state + (1.0 - phi * phi).sqrt() * e;
    }
    let m = raw.iter().sum::<f64>() / n as f64;
    let s = (raw.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64).sqrt();
    raw.iter().map(|x| (mean + sigma * (x - m) / s).max(0.0)).collect()
}

/// Extreme operating gust: dip, peak, dip over `period` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Eog {
    pub hub_speed: f64,
    pub start: f64,
    pub amplitude: f64,
    pub period: f64,
}

impl Eog {
    /// Turbine class I, turbulence category A, 126 m rotor.
    pub fn class_ia(hub_speed: f64, start: f64) -> Self {
        Self::with_class(hub_speed, start, 50.0, 0.16, 126.0)
    }

    pub fn with_class(hub_speed: f64, start: f64, v_ref: f64, i_ref: f64, diameter: f64) -> Self {
        let v_e1 = 0.8 * 1.4 * v_ref;
        let sigma1 = i_ref * (0.75 * hub_speed + 5.6);
        let lambda1 = 42.0;
        let amplitude = (1.35 * (v_e1 - hub_speed)).min(3.3 * sigma1 / (1.0 + 0.1 * diameter / lambda1));
        Self { hub_speed, start, amplitude, period: 10.5 }
    }

    pub fn end(&self) -> f64 {
        self.start + self.period
    }

    pub fn speed(&self, t: f64) -> f64 {
        let tau = t - self.start;
        if !(0.0..=self.period).contains(&tau) {
            return self.hub_speed;
        }
        let x = tau / self.period;
        self.hub_speed - 0.37 * self.amplitude * (3.0 * PI * x).sin() * (1.0 - (2.0 * PI * x).cos())
    }
}

/// Time-indexed wind source with zero-order hold between samples.
#[derive(Debug, Clone, PartialEq)]
pub enum WindField {
    Constant(f64),
    Gust(Eog),
    Sampled { dt: f64, values: Vec<f64> },
}

impl WindField {
    pub fn from_spec(spec: &WindSpec, duration: f64, dt: f64, corner_hz: f64) -> Self {
        match spec {
            WindSpec::Constant { speed } => WindField::Constant(*speed),
            WindSpec::Turbulent { mean, intensity, seed } => {
                WindField::Sampled { dt, values: wind_turbulent(*mean, *intensity, *seed, duration, dt, corner_hz) }
            }
            WindSpec::Gust { speed, start } => WindField::Gust(Eog::class_ia(*speed, *start)),
            WindSpec::Series { dt, values } => WindField::Sampled { dt: *dt, values: values.clone() },
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            WindField::Constant(v) => *v,
            WindField::Gust(g) => g.speed(t),
            WindField::Sampled { dt, values } => {
                let k = ((t / dt + 1e-9).floor().max(0.0) as usize).min(values.len().saturating_sub(1));
                values.get(k).copied().unwrap_or(0.0).max(0.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_intensity_is_constant() {
        assert!(wind_turbulent(14.0, 0.0, 3, 10.0, 0.01, 0.1).iter().all(|v| *v == 14.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = wind_turbulent(16.0, 0.1, 9, 50.0, 0.01, 0.1);
        assert_eq!(a, wind_turbulent(16.0, 0.1, 9, 50.0, 0.01, 0.1));
        assert_ne!(a, wind_turbulent(16.0, 0.1, 10, 50.0, 0.01, 0.1));
    }

    #[test]
    fn turbulence_statistics() {
        let v = wind_turbulent(16.0, 0.1, 1, 200.0, 0.01, 0.1);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!((15.7..=16.3).contains(&mean), "{mean}");
        assert!((std - 1.6).abs() <= 0.16, "{std}");
    }

    #[test]
    fn gust_shape() {
        let g = Eog::class_ia(14.0, 10.0);
        assert_eq!(g.speed(5.0), 14.0);
        assert_eq!(g.speed(25.0), 14.0);
        let samples: Vec<(f64, f64)> = (0..=1050).map(|k| 10.0 + k as f64 * 0.01).map(|t| (t, g.speed(t))).collect();
        let min = samples.iter().copied().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let max = samples.iter().copied().fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        assert!(min.0 < max.0);
        assert!(max.1 > 14.0 && min.1 < 14.0);
    }

    #[test]
    fn twelve_metre_gust_dips_below_rated() {
        let g = Eog::class_ia(12.0, 0.0);
        let dip = (0..=1050).map(|k| g.speed(k as f64 * 0.01)).fold(f64::INFINITY, f64::min);
        assert!(dip < 11.4, "{dip}");
    }

    #[test]
    fn sampled_field_holds_values() {
        let f = WindField::Sampled { dt: 0.5, values: alloc::vec![1.0, 2.0, 3.0] };
        assert_eq!(f.at(0.0), 1.0);
        assert_eq!(f.at(0.7), 2.0);
        assert_eq!(f.at(100.0), 3.0);
    }
}
