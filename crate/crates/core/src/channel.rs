//! Dimensionless discrete-slot signal model.
//!
//! A signal is a train of orthogonal wavepackets, one per temporal slot of
//! duration `1/B`. Each wavepacket is described by a complex amplitude whose
//! squared modulus is the mean photon number in that slot. Propagation maps
//! every amplitude independently as `alpha -> sqrt(tau) * alpha + zeta`, where
//! `zeta` is circular complex Gaussian noise carrying `n_n` photons on average.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Planck's constant in J s, to the precision used for all unit conversions.
pub const PLANCK: f64 = 6.626e-34;

/// Default half-width of the integration window for [`sinc_orthogonality`].
pub const DEFAULT_SINC_WINDOW: f64 = 200.0;
/// Default trapezoidal step for [`sinc_orthogonality`].
pub const DEFAULT_SINC_STEP: f64 = 0.01;

/// Power transmission `tau` and excess noise `n_n` (photons per slot).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    tau: f64,
    n_n: f64,
}

impl ChannelParams {
    /// Validates `tau >= 0`, `n_n >= 0` and, for amplification (`tau > 1`),
    /// the minimum added noise `n_n >= tau - 1`.
    pub fn new(tau: f64, n_n: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(invalid("tau", format!("must be finite and >= 0, got {tau}")));
        }
        if !(n_n.is_finite() && n_n >= 0.0) {
            return Err(invalid("n_n", format!("must be finite and >= 0, got {n_n}")));
        }
        if tau > 1.0 && n_n < tau - 1.0 {
            return Err(Error::AmplifierNoise {
                tau,
                n_n,
                required: tau - 1.0,
            });
        }
        Ok(Self { tau, n_n })
    }

    /// Pure loss channel (`n_n = 0`); requires `0 <= tau <= 1`.
    pub fn lossy(tau: f64) -> Result<Self> {
        Self::new(tau, 0.0)
    }

    /// The identity channel.
    pub fn identity() -> Self {
        Self { tau: 1.0, n_n: 0.0 }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n_n(&self) -> f64 {
        self.n_n
    }
}

/// A weighted set of per-slot complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    symbols: Vec<(Complex64, f64)>,
}

impl Constellation {
    /// Builds a constellation from `(amplitude, probability)` pairs.
    ///
    /// Probabilities must be nonnegative and sum to one within `1e-12`.
    pub fn new(symbols: Vec<(Complex64, f64)>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyConstellation);
        }
        for (a, p) in &symbols {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(invalid("amplitude", format!("non-finite amplitude {a}")));
            }
            if !(p.is_finite() && *p >= 0.0) {
                return Err(invalid("probability", format!("must be >= 0, got {p}")));
            }
        }
        let sum: f64 = symbols.iter().map(|(_, p)| p).sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Unnormalized { sum });
        }
        Ok(Self { symbols })
    }

    /// Equiprobable antipodal pair `{+alpha, -alpha}`.
    pub fn bpsk(alpha: f64) -> Self {
        Self {
            symbols: vec![(Complex64::new(alpha, 0.0), 0.5), (Complex64::new(-alpha, 0.0), 0.5)],
        }
    }

    pub fn symbols(&self) -> &[(Complex64, f64)] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Largest `|alpha|^2` over symbols with nonzero probability.
    pub fn max_photons(&self) -> f64 {
        self.symbols
            .iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(a, _)| a.norm_sqr())
            .fold(0.0, f64::max)
    }
}

/// Physical link parameters.
///
/// The narrowband condition `slot_rate << carrier_frequency` is assumed by
/// the slot model but not checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Optical power in W.
    pub power: f64,
    /// Slot rate `B` in Hz.
    pub slot_rate: f64,
    /// Carrier frequency in Hz.
    pub carrier_frequency: f64,
    /// Excess noise power spectral density in W/Hz.
    pub noise_psd: f64,
}

impl LinkBudget {
    pub fn new(power: f64, slot_rate: f64, carrier_frequency: f64, noise_psd: f64) -> Result<Self> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("power", power)?;
        positive("slot_rate", slot_rate)?;
        positive("carrier_frequency", carrier_frequency)?;
        if !(noise_psd.is_finite() && noise_psd >= 0.0) {
            return Err(invalid(
                "noise_psd",
                format!("must be finite and >= 0, got {noise_psd}"),
            ));
        }
        Ok(Self {
            power,
            slot_rate,
            carrier_frequency,
            noise_psd,
        })
    }

    /// Energy of one photon at the carrier frequency, `h f_c`.
    pub fn photon_energy(&self) -> f64 {
        PLANCK * self.carrier_frequency
    }
}

/// Mean photon number per slot, `sum_x p_x |alpha_x|^2`.
pub fn mean_photon_number(c: &Constellation) -> f64 {
    c.symbols.iter().map(|(a, p)| p * a.norm_sqr()).sum()
}

/// Received mean photon number `n_s = tau * nbar`.
pub fn received_mean_photons(nbar: f64, p: &ChannelParams) -> f64 {
    p.tau * nbar
}

/// Converts a link budget into `(n_s, n_n)` photons per slot.
///
/// `n_s = tau P / (B h f_c)` and `n_n = N / (h f_c)`.
pub fn photons_per_slot_from_budget(b: &LinkBudget, tau: f64) -> (f64, f64) {
    let hf = b.photon_energy();
    (tau * b.power / (b.slot_rate * hf), b.noise_psd / hf)
}

/// Draws a circular complex Gaussian with `E|z|^2 = mean_photons`.
///
/// Real and imaginary parts are independent standard normals (ziggurat
/// transform of the uniform stream) scaled by `sqrt(mean_photons / 2)`.
pub fn sample_complex_gaussian<R: Rng + ?Sized>(mean_photons: f64, rng: &mut R) -> Complex64 {
    let s = (mean_photons / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Propagates one amplitude through the channel: `sqrt(tau) alpha + zeta`.
///
/// With `n_n = 0` no random numbers are consumed and the result is exact.
pub fn propagate_sample<R: Rng + ?Sized>(alpha: Complex64, p: &ChannelParams, rng: &mut R) -> Complex64 {
    let signal = alpha * p.tau.sqrt();
    if p.n_n == 0.0 {
        signal
    } else {
        signal + sample_complex_gaussian(p.n_n, rng)
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Overlap `int u(s - j) u(s) ds` of sinc pulses displaced by `j` slots.
///
/// Trapezoidal rule on `[-window, window]`. With the defaults
/// ([`DEFAULT_SINC_WINDOW`], [`DEFAULT_SINC_STEP`]) the truncated tails
/// contribute below `1e-3`.
///
/// # Panics
///
/// If `window` or `step` is not strictly positive.
pub fn sinc_orthogonality(j: i64, window: f64, step: f64) -> f64 {
    assert!(window > 0.0 && step > 0.0, "window and step must be positive");
    let n = (2.0 * window / step).round() as usize;
    let h = 2.0 * window / n as f64;
    let shift = j as f64;
    let f = |s: f64| sinc(s - shift) * sinc(s);
    let interior: f64 = (1..n).map(|i| f(-window + i as f64 * h)).sum();
    h * (interior + 0.5 * (f(-window) + f(window)))
}
