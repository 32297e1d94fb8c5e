//! Ricker surface load.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Time signature of the surface traction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    /// Traction amplitude, N/m.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Central frequency, Hz.
    #[serde(default = "default_frequency")]
    pub frequency: f64,
    /// Unit direction of the traction; the wavelet's negative peak makes
    /// the default `(0, 1)` a downward push.
    #[serde(default = "default_direction")]
    pub direction: [f64; 2],
}

fn default_amplitude() -> f64 {
    1e4
}

fn default_frequency() -> f64 {
    15.0
}

fn default_direction() -> [f64; 2] {
    [0.0, 1.0]
}

impl Default for SourceSpec {
    fn default() -> Self {
        SourceSpec {
            amplitude: default_amplitude(),
            frequency: default_frequency(),
            direction: default_direction(),
        }
    }
}

impl SourceSpec {
    pub fn duration(&self) -> f64 {
        ricker_duration(self.frequency)
    }

    /// Traction vector at time `t`.
    pub fn traction(&self, t: f64) -> [f64; 2] {
        let s = self.amplitude * ricker(t, self.frequency);
        [s * self.direction[0], s * self.direction[1]]
    }
}

/// Support length `6√6 / ω_r` of the wavelet.
pub fn ricker_duration(f_r: f64) -> f64 {
    6.0 * 6f64.sqrt() / (2.0 * PI * f_r)
}

/// Shifted, normalized Ricker wavelet: zero at `t = 0`, minimum −1 at
/// half the duration, identically zero after the duration.
pub fn ricker(t: f64, f_r: f64) -> f64 {
    let omega = 2.0 * PI * f_r;
    if !(0.0..=ricker_duration(f_r)).contains(&t) {
        return 0.0;
    }
    // q = u²/4 with u = ω t − 3√6, expanded so that q(0) = 13.5 exactly
    let wt = omega * t;
    let q = 13.5 + 0.25 * wt * (wt - 6.0 * 6f64.sqrt());
    let tail = 13.0 * (-13.5f64).exp();
    ((q - 0.5) * (-q).exp() - tail) / (0.5 + tail)
}
