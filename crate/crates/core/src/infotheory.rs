//! Mutual information engine and closed-form capacity limits.
//!
//! Capacities are per slot, for a received mean photon number `n_s` and
//! excess noise `n_n`:
//!
//! | scheme  | bits/slot                              |
//! |---------|----------------------------------------|
//! | S1      | `1/2 log2(1 + 4 n_s / (2 n_n + 1))`    |
//! | S2      | `log2(1 + n_s / (n_n + 1))`            |
//! | Holevo  | `g(n_s + n_n) - g(n_n)`                |
//! | Fock    | `g(nbar)` (lossless photon-number states) |
//!
//! where `g` is the thermal-state entropy [`g`]. Photon information
//! efficiency (PIE) is capacity divided by `n_s`.

use std::f64::consts::LN_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::LinkBudget;
use crate::detection::{homodyne_pdf, sample_detection, DetectionModel, Outcome};
use crate::error::{invalid, Error, Result};
use crate::quad::integrate_panels;
use crate::LOG2_E;

/// Entropy of a thermal state with mean photon number `v`, in bits:
/// `(v + 1) log2(v + 1) - v log2 v`, with `g(0) = 0`.
pub fn g(v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    if v <= 1.0 {
        ((v + 1.0) * v.ln_1p() - v * v.ln()) / LN_2
    } else {
        (v.ln_1p() + v * (1.0 / v).ln_1p()) / LN_2
    }
}

/// Shannon capacity with single-quadrature homodyne detection.
pub fn c_shannon_1q(n_s: f64, n_n: f64) -> f64 {
    0.5 * (4.0 * n_s / (2.0 * n_n + 1.0)).ln_1p() / LN_2
}

/// Shannon capacity with dual-quadrature (heterodyne-like) detection.
pub fn c_shannon_2q(n_s: f64, n_n: f64) -> f64 {
    (n_s / (n_n + 1.0)).ln_1p() / LN_2
}

/// Holevo capacity of the AWGN channel.
pub fn c_holevo(n_s: f64, n_n: f64) -> f64 {
    g(n_s + n_n) - g(n_n)
}

/// Capacity of photon-number states with direct detection; coincides with
/// the Holevo limit of a lossless (or loss-only) channel.
pub fn c_fock(nbar: f64) -> f64 {
    g(nbar)
}

/// Excess of the noiseless Holevo capacity over the dual-quadrature Shannon
/// capacity, `g(n_s) - log2(1 + n_s)`. Tends to `log2 e` (one nat) for large
/// `n_s`.
pub fn holevo_advantage(n_s: f64) -> f64 {
    g(n_s) - n_s.ln_1p() / LN_2
}

/// Photon information efficiency `bits_per_slot / n_s`.
pub fn pie(bits_per_slot: f64, n_s: f64) -> Result<f64> {
    if !(n_s > 0.0) {
        return Err(invalid("n_s", format!("PIE needs n_s > 0, got {n_s}")));
    }
    Ok(bits_per_slot / n_s)
}

/// Photon-starved (`n_s -> 0`) PIE of the S1 and S2 Shannon limits:
/// `(2 log2 e / (1 + 2 n_n), log2 e / (1 + n_n))`.
pub fn pie_shannon_limits(n_n: f64) -> (f64, f64) {
    (2.0 * LOG2_E / (1.0 + 2.0 * n_n), LOG2_E / (1.0 + n_n))
}

/// Photon-starved Holevo PIE in the presence of excess noise,
/// `log2(1 + 1/n_n)`. Diverges for `n_n = 0`.
pub fn pie_holevo_noisy_limit(n_n: f64) -> Result<f64> {
    if n_n == 0.0 {
        return Err(Error::Divergent("Holevo PIE is unbounded without excess noise"));
    }
    if !(n_n > 0.0) {
        return Err(invalid("n_n", format!("must be > 0, got {n_n}")));
    }
    Ok((1.0 / n_n).ln_1p() / LN_2)
}

/// Information rate in bit/s for a per-slot capacity and slot rate `B`.
pub fn rate(bits_per_slot: f64, slot_rate: f64) -> f64 {
    bits_per_slot * slot_rate
}

/// Photon-starved Holevo rate limit `(tau P / h f_c) log2(1 + h f_c / N)`.
pub fn holevo_rate_limit(b: &LinkBudget, tau: f64) -> Result<f64> {
    if b.noise_psd == 0.0 {
        return Err(Error::Divergent("Holevo rate limit needs nonzero noise PSD"));
    }
    let hf = b.photon_energy();
    Ok(tau * b.power / hf * (hf / b.noise_psd).ln_1p() / LN_2)
}

/// Capacity formula a [`CapacityPoint`] was evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    S1,
    S2,
    Holevo,
    Fock,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::S1, Scheme::S2, Scheme::Holevo, Scheme::Fock];

    /// Capacity in bits/slot. The Fock scheme ignores `n_n`.
    pub fn capacity(self, n_s: f64, n_n: f64) -> f64 {
        match self {
            Scheme::S1 => c_shannon_1q(n_s, n_n),
            Scheme::S2 => c_shannon_2q(n_s, n_n),
            Scheme::Holevo => c_holevo(n_s, n_n),
            Scheme::Fock => c_fock(n_s),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::S1 => "S1",
            Scheme::S2 => "S2",
            Scheme::Holevo => "Holevo",
            Scheme::Fock => "Fock",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(Scheme::S1),
            "s2" => Ok(Scheme::S2),
            "holevo" => Ok(Scheme::Holevo),
            "fock" => Ok(Scheme::Fock),
            _ => Err(invalid("scheme", format!("unknown scheme `{s}`"))),
        }
    }
}

/// One point of a capacity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityPoint {
    pub n_s: f64,
    pub n_n: f64,
    pub bits_per_slot: f64,
    pub scheme: Scheme,
}

impl CapacityPoint {
    pub fn evaluate(scheme: Scheme, n_s: f64, n_n: f64) -> Self {
        Self {
            n_s,
            n_n,
            bits_per_slot: scheme.capacity(n_s, n_n),
            scheme,
        }
    }
}

/// Shannon entropy of a pmf in bits.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

/// Binary entropy `h2(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

/// Mixture of Gaussians sharing one variance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    /// `(mean, weight)` pairs; weights sum to one.
    pub components: Vec<(f64, f64)>,
}

impl GaussianMixture {
    pub fn single(mean: f64) -> Self {
        Self {
            components: vec![(mean, 1.0)],
        }
    }

    fn validate(&self) -> Result<()> {
        check_pmf(self.components.iter().map(|c| c.1), 1e-9)?;
        if self.components.iter().any(|c| !c.0.is_finite()) {
            return Err(invalid("mean", "non-finite mixture mean"));
        }
        Ok(())
    }

    /// `ln` of the density at `y` for component variance `var`.
    fn ln_pdf(&self, y: f64, var: f64) -> f64 {
        let norm = -0.5 * (2.0 * std::f64::consts::PI * var).ln();
        let terms = self
            .components
            .iter()
            .filter(|c| c.1 > 0.0)
            .map(|&(m, w)| w.ln() - (y - m) * (y - m) / (2.0 * var));
        norm + log_sum_exp(terms)
    }

    fn mean_range(&self) -> (f64, f64) {
        self.components
            .iter()
            .filter(|c| c.1 > 0.0)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                (lo.min(c.0), hi.max(c.0))
            })
    }
}

fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let v: Vec<f64> = terms.into_iter().collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Conditional output law of every input of a memoryless channel.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionalLaw {
    /// `pmfs[x][y]` over a shared finite output alphabet.
    Discrete { pmfs: Vec<Vec<f64>> },
    /// Real output; input `x` yields `mixtures[x]` with component variance
    /// `variance`.
    Gaussian {
        variance: f64,
        mixtures: Vec<GaussianMixture>,
    },
    /// Discrete event plus, for the event `refined_event` only, a real
    /// refinement `y` distributed as `mixtures[x]` given input `x`.
    Hybrid {
        events: Vec<Vec<f64>>,
        refined_event: usize,
        variance: f64,
        mixtures: Vec<GaussianMixture>,
    },
}

/// A discrete-input channel: input distribution plus per-input output law.
#[derive(Debug, Clone, PartialEq)]
pub struct MiProblem {
    input_probs: Vec<f64>,
    law: ConditionalLaw,
}

fn check_pmf<I: IntoIterator<Item = f64>>(probs: I, tol: f64) -> Result<()> {
    let mut sum = 0.0;
    for p in probs {
        if !(p.is_finite() && p >= 0.0) {
            return Err(invalid("probability", format!("must be >= 0, got {p}")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > tol {
        return Err(Error::Unnormalized { sum });
    }
    Ok(())
}

impl MiProblem {
    pub fn new(input_probs: Vec<f64>, law: ConditionalLaw) -> Result<Self> {
        if input_probs.is_empty() {
            return Err(invalid("input_probs", "no inputs"));
        }
        check_pmf(input_probs.iter().copied(), 1e-12)?;
        let n = input_probs.len();
        let arity = |len: usize| {
            if len == n {
                Ok(())
            } else {
                Err(invalid("conditional_law", format!("{len} laws for {n} inputs")))
            }
        };
        let check_var = |v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid("variance", format!("must be > 0, got {v}")))
            }
        };
        match &law {
            ConditionalLaw::Discrete { pmfs } => {
                arity(pmfs.len())?;
                let width = pmfs[0].len();
                for pmf in pmfs {
                    if pmf.len() != width {
                        return Err(invalid("pmfs", "output alphabets differ in size"));
                    }
                    check_pmf(pmf.iter().copied(), 1e-9)?;
                }
            }
            ConditionalLaw::Gaussian { variance, mixtures } => {
                arity(mixtures.len())?;
                check_var(*variance)?;
                for m in mixtures {
                    m.validate()?;
                }
            }
            ConditionalLaw::Hybrid {
                events,
                refined_event,
                variance,
                mixtures,
            } => {
                arity(events.len())?;
                arity(mixtures.len())?;
                check_var(*variance)?;
                let width = events[0].len();
                if *refined_event >= width {
                    return Err(invalid("refined_event", "outside the event set"));
                }
                for (ev, m) in events.iter().zip(mixtures) {
                    if ev.len() != width {
                        return Err(invalid("events", "event sets differ in size"));
                    }
                    check_pmf(ev.iter().copied(), 1e-9)?;
                    m.validate()?;
                }
            }
        }
        Ok(Self { input_probs, law })
    }

    /// Equiprobable antipodal inputs `+-sqrt(n_s)` read out by homodyne
    /// detection in phase: outcomes `N(+-sqrt(2 n_s), 1/2)`.
    pub fn bpsk_homodyne(n_s: f64) -> Self {
        let m = (2.0 * n_s).sqrt();
        Self {
            input_probs: vec![0.5, 0.5],
            law: ConditionalLaw::Gaussian {
                variance: 0.5,
                mixtures: vec![GaussianMixture::single(m), GaussianMixture::single(-m)],
            },
        }
    }

    pub fn input_probs(&self) -> &[f64] {
        &self.input_probs
    }

    pub fn law(&self) -> &ConditionalLaw {
        &self.law
    }
}

/// Numerical settings of [`mutual_information_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiOptions {
    /// Absolute error target for the quadrature, in bits.
    pub abs_tol: f64,
    /// Half-width of the integration window beyond the extreme means, in
    /// standard deviations.
    pub span_sd: f64,
}

impl Default for MiOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            span_sd: 10.0,
        }
    }
}

/// Mutual information `I(X;Y)` in bits with default options.
pub fn mutual_information(p: &MiProblem) -> f64 {
    mutual_information_with(p, &MiOptions::default())
}

/// Mutual information `I(X;Y) = H(Y) - H(Y|X)` in bits.
///
/// Discrete laws are summed exactly. Continuous parts are integrated as
/// `sum_x p_x f(y|x) ln(f(y|x)/f(y))`, which is `h(Y) - h(Y|X)` folded into a
/// single integrand so that the shared variance constant cancels pointwise.
pub fn mutual_information_with(p: &MiProblem, opts: &MiOptions) -> f64 {
    let px = &p.input_probs;
    let nats = match &p.law {
        ConditionalLaw::Discrete { pmfs } => discrete_part(px, pmfs, None),
        ConditionalLaw::Gaussian { variance, mixtures } => {
            let ones = vec![1.0; px.len()];
            continuous_part(px, &ones, *variance, mixtures, opts)
        }
        ConditionalLaw::Hybrid {
            events,
            refined_event,
            variance,
            mixtures,
        } => {
            let w: Vec<f64> = events.iter().map(|e| e[*refined_event]).collect();
            discrete_part(px, events, Some(*refined_event)) + continuous_part(px, &w, *variance, mixtures, opts)
        }
    };
    (nats / LN_2).max(0.0)
}

/// `sum_x sum_{y != skip} p_x P(y|x) ln(P(y|x)/P(y))` in nats.
fn discrete_part(px: &[f64], pmfs: &[Vec<f64>], skip: Option<usize>) -> f64 {
    let width = pmfs[0].len();
    let mut total = 0.0;
    for y in (0..width).filter(|&y| Some(y) != skip) {
        let py: f64 = px.iter().zip(pmfs).map(|(p, pmf)| p * pmf[y]).sum();
        if py <= 0.0 {
            continue;
        }
        for (p, pmf) in px.iter().zip(pmfs) {
            let q = pmf[y];
            if *p > 0.0 && q > 0.0 {
                total += p * q * (q / py).ln();
            }
        }
    }
    total
}

/// Continuous contribution in nats: `sum_x int J_x ln(J_x / (p_x G)) dy` with
/// `J_x = p_x w_x f_x(y)` and `G = sum_x J_x`, where `w_x` is the probability
/// of the refined event (1 for a pure Gaussian law). Each term is a log
/// posterior-to-prior ratio, so small informations are not lost to
/// cancellation.
fn continuous_part(px: &[f64], w: &[f64], var: f64, mixtures: &[GaussianMixture], opts: &MiOptions) -> f64 {
    let active: Vec<(f64, f64, &GaussianMixture)> = px
        .iter()
        .zip(w)
        .zip(mixtures)
        .filter(|((p, q), _)| **p > 0.0 && **q > 0.0)
        .map(|((p, q), m)| (*p, *q, m))
        .collect();
    if active.is_empty() {
        return 0.0;
    }
    let (lo, hi) = active
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, _, m)| {
            let (a, b) = m.mean_range();
            (lo.min(a), hi.max(b))
        });
    let sd = var.sqrt();
    let a = lo - opts.span_sd * sd;
    let b = hi + opts.span_sd * sd;
    let panels = (((b - a) / sd).ceil() as usize).clamp(4, 4096);
    let ln_px: Vec<f64> = active.iter().map(|(p, _, _)| p.ln()).collect();
    let ln_wx: Vec<f64> = active.iter().map(|(_, q, _)| q.ln()).collect();
    let mut ln_cond = vec![0.0; active.len()];
    let integrand = move |y: f64| {
        for (l, (_, _, m)) in ln_cond.iter_mut().zip(&active) {
            *l = m.ln_pdf(y, var);
        }
        // ln J_x - ln p_x = ln w_x + ln f_x
        let ln_g = log_sum_exp(ln_px.iter().zip(&ln_wx).zip(&ln_cond).map(|((a, b), c)| a + b + c));
        if ln_g == f64::NEG_INFINITY {
            return 0.0;
        }
        ln_px
            .iter()
            .zip(&ln_wx)
            .zip(&ln_cond)
            .filter(|(_, c)| c.is_finite())
            .map(|((lp, lw), lc)| (lp + lw + lc).exp() * (lw + lc - ln_g))
            .sum::<f64>()
    };
    integrate_panels(integrand, a, b, panels, opts.abs_tol * LN_2).value
}

/// Monte Carlo estimate with its standard error, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Sampling estimate of the BPSK homodyne mutual information at `n_s`.
///
/// Draws equiprobable inputs `+-sqrt(n_s)`, samples homodyne outcomes and
/// averages `log2(f(y|x) / f(y))`. Independent of the quadrature engine.
pub fn bpsk_homodyne_mi_monte_carlo<R: Rng + ?Sized>(n_s: f64, samples: usize, rng: &mut R) -> MonteCarloEstimate {
    let a = Complex64::new(n_s.sqrt(), 0.0);
    let model = DetectionModel::Homodyne { phase: 0.0 };
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let x = if rng.random::<bool>() { a } else { -a };
        let y = match sample_detection(model, x, rng) {
            Outcome::Quadrature(q) => q.y,
            _ => unreachable!("homodyne yields quadratures"),
        };
        let fx = homodyne_pdf(x, 0.0, y);
        let f = 0.5 * (homodyne_pdf(a, 0.0, y) + homodyne_pdf(-a, 0.0, y));
        let s = (fx / f).log2();
        sum += s;
        sum_sq += s * s;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean) * n / (n - 1.0);
    MonteCarloEstimate {
        value: mean,
        std_error: (var / n).sqrt(),
    }
}

/// BPSK homodyne mutual information per slot, by quadrature.
pub fn bpsk_homodyne_mi(n_s: f64) -> f64 {
    if n_s <= 0.0 {
        return 0.0;
    }
    let opts = MiOptions {
        abs_tol: 1e-9 * n_s.min(1.0),
        ..MiOptions::default()
    };
    mutual_information_with(&MiProblem::bpsk_homodyne(n_s), &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    /// Fine-grid Riemann sum of `sum_x p_x f_x ln(f_x / f)` over +-12 sd.
    fn riemann_mi(px: &[f64], means: &[Vec<(f64, f64)>], var: f64, step: f64) -> f64 {
        let sd = var.sqrt();
        let all = means.iter().flatten().map(|c| c.0);
        let lo = all.clone().fold(f64::INFINITY, f64::min) - 12.0 * sd;
        let hi = all.fold(f64::NEG_INFINITY, f64::max) + 12.0 * sd;
        let pdf = |y: f64, mix: &Vec<(f64, f64)>| {
            mix.iter()
                .map(|&(m, w)| w * (-(y - m).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt())
                .sum::<f64>()
        };
        let n = ((hi - lo) / step).ceil() as usize;
        let mut total = 0.0;
        for i in 0..=n {
            let y = lo + i as f64 * step;
            let fx: Vec<f64> = means.iter().map(|m| pdf(y, m)).collect();
            let f: f64 = px.iter().zip(&fx).map(|(p, v)| p * v).sum();
            for (p, v) in px.iter().zip(&fx) {
                if *v > 0.0 && *p > 0.0 {
                    total += p * v * (v / f).log2() * step;
                }
            }
        }
        total
    }

    #[test]
    fn gordon_function() {
        assert_eq!(g(0.0), 0.0);
        close(g(1.0), 2.0, 1e-15);
        close(g(3.0), 8.0 - 3.0 * 3f64.log2(), 1e-14);
        close(g(3.0), 3.245112497836532, 1e-12);
        // concave and increasing on a log grid
        for i in 0..60 {
            let v = 10f64.powf(-3.0 + 6.0 * i as f64 / 59.0);
            let h = 1e-3 * v;
            assert!(g(v + h) > g(v - h), "g' <= 0 at {v}");
            assert!(g(v + h) - 2.0 * g(v) + g(v - h) < 0.0, "g'' >= 0 at {v}");
        }
    }

    #[test]
    fn shannon_capacities() {
        assert_eq!(c_shannon_1q(0.0, 0.0), 0.0);
        close(c_shannon_1q(0.75, 0.0), 1.0, 1e-15);
        close(c_shannon_1q(2.0, 0.0), 3f64.log2(), 1e-15);
        assert_eq!(c_shannon_2q(0.0, 5.0), 0.0);
        close(c_shannon_2q(1.0, 0.0), 1.0, 1e-15);
        close(c_shannon_2q(2.0, 0.0), c_shannon_1q(2.0, 0.0), 1e-15);
        for i in 1..200 {
            let ns = 4.0 * i as f64 / 200.0;
            if ns < 2.0 - 1e-9 {
                assert!(c_shannon_1q(ns, 0.0) > c_shannon_2q(ns, 0.0), "{ns}");
            } else if ns > 2.0 + 1e-9 {
                assert!(c_shannon_1q(ns, 0.0) < c_shannon_2q(ns, 0.0), "{ns}");
            }
        }
    }

    #[test]
    fn holevo_capacity() {
        close(c_holevo(1.0, 0.0), 2.0, 1e-15);
        assert_eq!(c_holevo(0.0, 3.0), 0.0);
        close(c_holevo(1.0, 1.0), 3.0 * 3f64.log2() - 4.0, 1e-12);
        close(c_holevo(1.0, 1.0), 0.754887502163468, 1e-9);
        for i in 0..40 {
            let n = 0.1 * i as f64;
            assert_eq!(c_fock(n), c_holevo(n, 0.0));
        }
        assert_eq!(c_fock(0.0), 0.0);
        close(c_fock(1.0), 2.0, 1e-15);
    }

    #[test]
    fn holevo_dominates_dual_quadrature() {
        for i in 0..=30 {
            let ns = 10f64.powf(-3.0 + 6.0 * i as f64 / 30.0);
            for nn in [0.0, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0] {
                assert!(c_holevo(ns, nn) >= c_shannon_2q(ns, nn) - 1e-12, "{ns} {nn}");
            }
        }
        assert!(c_holevo(10.0, 100.0) - c_shannon_2q(10.0, 100.0) < 0.02);
    }

    #[test]
    fn advantage_tends_to_one_nat() {
        close(holevo_advantage(1e3), LOG2_E - LOG2_E / 2000.0, 5e-4);
        close(holevo_advantage(1e3), 1.4420, 5e-4);
        close(holevo_advantage(1e9), LOG2_E, 1e-8);
        close(holevo_advantage(1.0), 1.0, 1e-15);
    }

    #[test]
    fn photon_information_efficiency() {
        close(pie(c_shannon_1q(1e-6, 0.0), 1e-6).unwrap(), 2.88539, 1e-3);
        close(pie(c_shannon_2q(1e-6, 0.0), 1e-6).unwrap(), LOG2_E, 1e-3);
        close(pie(c_holevo(0.01, 0.0), 0.01).unwrap(), 8.087, 0.02);
        assert!(pie(1.0, 0.0).is_err());

        let (a, b) = pie_shannon_limits(0.0);
        close(a, 2.885390081777927, 1e-12);
        close(b, LOG2_E, 1e-12);
        let (a, b) = pie_shannon_limits(0.5);
        close(a, LOG2_E, 1e-12);
        close(b, 0.9617966939259756, 1e-12);
        let (a, b) = pie_shannon_limits(100.0);
        assert!((a / b - 1.0).abs() < 0.01);
        close(a, LOG2_E / 100.0, 0.01 * LOG2_E / 100.0);
    }

    #[test]
    fn noisy_holevo_ceiling() {
        close(pie_holevo_noisy_limit(1.0).unwrap(), 1.0, 1e-15);
        close(pie_holevo_noisy_limit(1.0 / 3.0).unwrap(), 2.0, 1e-15);
        assert!(matches!(pie_holevo_noisy_limit(0.0), Err(Error::Divergent(_))));
        close(pie(c_holevo(1e-6, 1.0), 1e-6).unwrap(), 1.0, 1e-3);
    }

    #[test]
    fn rates() {
        assert_eq!(rate(1.0, 1e9), 1e9);
        assert_eq!(rate(0.0, 1e9), 0.0);
        let b = LinkBudget::new(2e-12, 1e9, 1.936e14, 3e-19).unwrap();
        let tau = 0.2;
        let (ns, nn) = crate::channel::photons_per_slot_from_budget(&b, tau);
        let from_slots = b.slot_rate * ns * pie_holevo_noisy_limit(nn).unwrap();
        let direct = holevo_rate_limit(&b, tau).unwrap();
        close(from_slots, direct, 1e-9 * direct);
        // photon-starved Holevo rate approaches the ceiling
        let r = rate(c_holevo(ns, nn), b.slot_rate);
        assert!(r <= direct && r > 0.99 * direct, "{r} {direct}");
    }

    #[test]
    fn scheme_labels_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
        }
        assert!("S3".parse::<Scheme>().is_err());
        let p = CapacityPoint::evaluate(Scheme::Holevo, 1.0, 0.0);
        close(p.bits_per_slot, 2.0, 1e-15);
    }

    #[test]
    fn discrete_mi() {
        let bsc = MiProblem::new(
            vec![0.5, 0.5],
            ConditionalLaw::Discrete {
                pmfs: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            },
        )
        .unwrap();
        close(mutual_information(&bsc), 1.0, 1e-15);

        let same = MiProblem::new(
            vec![0.2, 0.3, 0.5],
            ConditionalLaw::Discrete {
                pmfs: vec![vec![0.1, 0.9]; 3],
            },
        )
        .unwrap();
        assert_eq!(mutual_information(&same), 0.0);

        let e = 0.3;
        let bec = MiProblem::new(
            vec![0.5, 0.5],
            ConditionalLaw::Discrete {
                pmfs: vec![vec![1.0 - e, 0.0, e], vec![0.0, 1.0 - e, e]],
            },
        )
        .unwrap();
        close(mutual_information(&bec), 1.0 - e, 1e-15);
    }

    #[test]
    fn identical_gaussian_laws_carry_nothing() {
        let p = MiProblem::new(
            vec![0.5, 0.25, 0.25],
            ConditionalLaw::Gaussian {
                variance: 0.5,
                mixtures: vec![GaussianMixture::single(0.3); 3],
            },
        )
        .unwrap();
        assert!(mutual_information(&p).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_laws_rejected() {
        let bad = MiProblem::new(
            vec![0.5, 0.5],
            ConditionalLaw::Discrete {
                pmfs: vec![vec![0.5, 0.4], vec![0.5, 0.5]],
            },
        );
        assert!(matches!(bad, Err(Error::Unnormalized { .. })));
        let bad = MiProblem::new(
            vec![0.6, 0.5],
            ConditionalLaw::Discrete {
                pmfs: vec![vec![1.0]; 2],
            },
        );
        assert!(bad.is_err());
        let bad = MiProblem::new(
            vec![1.0],
            ConditionalLaw::Gaussian {
                variance: 0.5,
                mixtures: vec![GaussianMixture {
                    components: vec![(0.0, 0.7), (1.0, 0.2)],
                }],
            },
        );
        assert!(bad.is_err());
        let bad = MiProblem::new(
            vec![1.0],
            ConditionalLaw::Hybrid {
                events: vec![vec![0.5, 0.5]],
                refined_event: 2,
                variance: 0.5,
                mixtures: vec![GaussianMixture::single(0.0)],
            },
        );
        assert!(bad.is_err());
    }

    #[test]
    fn bpsk_quadrature_matches_riemann() {
        for ns in [0.01f64, 0.1, 1.0, 3.0] {
            let m = (2.0 * ns).sqrt();
            let quad = mutual_information(&MiProblem::bpsk_homodyne(ns));
            let brute = riemann_mi(&[0.5, 0.5], &[vec![(m, 1.0)], vec![(-m, 1.0)]], 0.5, 1e-3);
            close(quad, brute, 1e-5);
        }
    }

    #[test]
    fn mixture_quadrature_matches_riemann() {
        let px = vec![0.2, 0.5, 0.3];
        let mixes = vec![
            vec![(-1.0, 0.5), (1.5, 0.5)],
            vec![(0.0, 1.0)],
            vec![(2.0, 0.9), (-3.0, 0.1)],
        ];
        let p = MiProblem::new(
            px.clone(),
            ConditionalLaw::Gaussian {
                variance: 0.7,
                mixtures: mixes
                    .iter()
                    .map(|c| GaussianMixture { components: c.clone() })
                    .collect(),
            },
        )
        .unwrap();
        close(mutual_information(&p), riemann_mi(&px, &mixes, 0.7, 1e-3), 1e-5);
    }

    #[test]
    fn hybrid_matches_hand_decomposition() {
        // event 0 refined by a Gaussian readout, event 1 and 2 plain
        let px = vec![0.3, 0.3, 0.4];
        let events = vec![vec![0.9, 0.1, 0.0], vec![0.6, 0.0, 0.4], vec![1.0, 0.0, 0.0]];
        let means = [0.5, -0.5, 0.0];
        let p = MiProblem::new(
            px.clone(),
            ConditionalLaw::Hybrid {
                events: events.clone(),
                refined_event: 0,
                variance: 0.5,
                mixtures: means.iter().map(|&m| GaussianMixture::single(m)).collect(),
            },
        )
        .unwrap();
        // oracle: I = I(X;E) + P(E=0) I(X;Y | E=0)
        let pe: Vec<f64> = (0..3).map(|e| (0..3).map(|x| px[x] * events[x][e]).sum()).collect();
        let mut i_xe = 0.0;
        for x in 0..3 {
            for e in 0..3 {
                let q = events[x][e];
                if q > 0.0 {
                    i_xe += px[x] * q * (q / pe[e]).log2();
                }
            }
        }
        let post: Vec<f64> = (0..3).map(|x| px[x] * events[x][0] / pe[0]).collect();
        let mixes: Vec<Vec<(f64, f64)>> = means.iter().map(|&m| vec![(m, 1.0)]).collect();
        let i_cond = riemann_mi(&post, &mixes, 0.5, 1e-3);
        close(mutual_information(&p), i_xe + pe[0] * i_cond, 1e-6);
    }

    #[test]
    fn bpsk_quadrature_matches_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let est = bpsk_homodyne_mi_monte_carlo(0.1, 1_000_000, &mut rng);
        let quad = bpsk_homodyne_mi(0.1);
        assert!((est.value - quad).abs() < 3.0 * est.std_error, "{est:?} vs {quad}");
    }

    #[test]
    fn bpsk_homodyne_pie_tends_to_two_nats() {
        close(pie(bpsk_homodyne_mi(1e-6), 1e-6).unwrap(), 2.0 * LOG2_E, 1e-4);
        assert_eq!(bpsk_homodyne_mi(0.0), 0.0);
    }

    fn arb_pmf(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, n).prop_filter_map("nonzero", |v| {
            let s: f64 = v.iter().sum();
            (s > 1e-3).then(|| v.iter().map(|x| x / s).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn discrete_mi_bounded(px in arb_pmf(3), a in arb_pmf(4), b in arb_pmf(4), c in arb_pmf(4)) {
            let p = MiProblem::new(px.clone(), ConditionalLaw::Discrete { pmfs: vec![a, b, c] });
            // renormalisation can leave 1e-16 slack
            let p = p.unwrap();
            let mi = mutual_information(&p);
            prop_assert!(mi >= 0.0);
            prop_assert!(mi <= entropy(&px) + 1e-12);
        }

        #[test]
        fn gaussian_mi_bounded(px in arb_pmf(3), means in prop::collection::vec(-3.0f64..3.0, 3), var in 0.1f64..2.0) {
            let p = MiProblem::new(px.clone(), ConditionalLaw::Gaussian {
                variance: var,
                mixtures: means.iter().map(|&m| GaussianMixture::single(m)).collect(),
            }).unwrap();
            let mi = mutual_information(&p);
            prop_assert!(mi >= 0.0);
            prop_assert!(mi <= entropy(&px) + 1e-9);
        }
    }
}
