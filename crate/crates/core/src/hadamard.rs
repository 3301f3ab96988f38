//! BPSK Hadamard words and their joint detection.
//!
//! The `l`-th word of length `M = 2^m` is built from the bits of `l - 1`:
//! bit `i` contributes a factor that alternates between `1` and `(-1)^{b_i}`
//! every `2^i` positions, and the word is the product of all factors. A
//! cascade of time-domain interferometers, each superposing two halves of a
//! block with weights `+-1/sqrt 2`, maps word `l` onto a single pulse in slot
//! `l`, turning the BPSK word into PPM.
//!
//! The extended scheme adds the all-minus word. Words `1` (all plus) and
//! `M + 1` both end up in slot 1, where an I-quadrature homodyne measurement
//! tells them apart; the remaining slots are read out by direct detection.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::detection::{direct_detection_pmf, homodyne_mean};
use crate::error::{invalid, Error, Result};
use crate::infotheory::{mutual_information_with, ConditionalLaw, GaussianMixture, MiOptions, MiProblem};
use crate::ppm::{ppm_mutual_information, PpmParams};

/// Golden-section tolerance on `p1`.
const P1_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardWord {
    order: usize,
    index: usize,
    signs: Vec<i8>,
}

impl HadamardWord {
    pub fn order(&self) -> usize {
        self.order
    }

    /// 1-based word index; `M + 1` denotes the all-minus word.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Slot amplitudes `sqrt(n_s) * signs`.
    pub fn amplitudes(&self, n_s: f64) -> Vec<Complex64> {
        let a = n_s.sqrt();
        self.signs
            .iter()
            .map(|&s| Complex64::new(a * f64::from(s), 0.0))
            .collect()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(order));
    }
    Ok(())
}

/// The `l`-th Hadamard word of length `order` (`1 <= l <= order`).
pub fn hadamard_word(l: usize, order: usize) -> Result<HadamardWord> {
    check_order(order)?;
    if l == 0 || l > order {
        return Err(invalid("l", format!("word index must lie in 1..={order}, got {l}")));
    }
    let bits = l - 1;
    let m = order.trailing_zeros();
    let signs = (0..order)
        .map(|k| {
            let mut s = 1i8;
            for i in 0..m {
                let b_i = (bits >> i) & 1;
                // factor for bit i alternates every 2^i positions
                if b_i == 1 && (k >> i) & 1 == 1 {
                    s = -s;
                }
            }
            s
        })
        .collect();
    Ok(HadamardWord { order, index: l, signs })
}

/// The additional all-minus word, index `order + 1`.
pub fn all_minus_word(order: usize) -> Result<HadamardWord> {
    check_order(order)?;
    Ok(HadamardWord {
        order,
        index: order + 1,
        signs: vec![-1; order],
    })
}

/// Interferometric cascade acting on one word's slot amplitudes.
///
/// Stage `s` (1-based) superposes amplitudes `2^{m-s}` slots apart as
/// `((a + b)/sqrt 2, (a - b)/sqrt 2)`. The map is real orthogonal and
/// symmetric, hence energy preserving and its own inverse.
pub fn cascade_transform(amplitudes: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = amplitudes.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut out = amplitudes.to_vec();
    let mut dist = n / 2;
    while dist >= 1 {
        for block in out.chunks_mut(2 * dist) {
            let (lo, hi) = block.split_at_mut(dist);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = (x + y) * FRAC_1_SQRT_2;
                *b = (x - y) * FRAC_1_SQRT_2;
            }
        }
        dist /= 2;
    }
    Ok(out)
}

/// Mutual information per slot of Hadamard words with cascade and ideal
/// direct detection; identical to `M`-ary PPM.
pub fn hadamard_ppm_mi(order: usize, n_s: f64) -> Result<f64> {
    check_order(order)?;
    Ok(ppm_mutual_information(&PpmParams::new(order as u64, n_s)?))
}

/// Same quantity as [`hadamard_ppm_mi`], computed by propagating every word
/// through [`cascade_transform`] and building the photocount law slot by slot.
///
/// Outcomes: no click, a click in exactly one slot, or clicks in several
/// slots (which the cascade output makes impossible).
pub fn hadamard_ppm_mi_composed(order: usize, n_s: f64) -> Result<f64> {
    check_order(order)?;
    let pmfs = (1..=order)
        .map(|l| {
            let out = cascade_transform(&hadamard_word(l, order)?.amplitudes(n_s))?;
            let dark: Vec<f64> = out.iter().map(|&a| direct_detection_pmf(a, 0)).collect();
            let none: f64 = dark.iter().product();
            let mut row = Vec::with_capacity(order + 2);
            row.push(none);
            for k in 0..order {
                let others: f64 = dark
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, d)| d)
                    .product();
                row.push((1.0 - dark[k]) * others);
            }
            let single: f64 = row.iter().sum();
            row.push((1.0 - single).max(0.0));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let problem = MiProblem::new(vec![1.0 / order as f64; order], ConditionalLaw::Discrete { pmfs })?;
    Ok(mutual_information_with(&problem, &MiOptions::default()) / order as f64)
}

/// Order, received photons per slot and the joint probability `p1` of the
/// two antipodal words (all plus / all minus).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedSchemeParams {
    order: usize,
    n_s: f64,
    p1: f64,
}

impl ExtendedSchemeParams {
    pub fn new(order: usize, n_s: f64, p1: f64) -> Result<Self> {
        check_order(order)?;
        if !(n_s.is_finite() && n_s >= 0.0) {
            return Err(invalid("n_s", format!("must be finite and >= 0, got {n_s}")));
        }
        if !(0.0..=1.0).contains(&p1) {
            return Err(invalid("p1", format!("must lie in [0, 1], got {p1}")));
        }
        Ok(Self { order, n_s, p1 })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_s(&self) -> f64 {
        self.n_s
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    /// Prior over words `1, 2, ..., M, M + 1`.
    pub fn word_probs(&self) -> Vec<f64> {
        let m = self.order;
        let rest = (1.0 - self.p1) / (m - 1) as f64;
        let mut p = vec![rest; m + 1];
        p[0] = self.p1 / 2.0;
        p[m] = self.p1 / 2.0;
        p
    }
}

/// The channel seen by the `(M+1)`-word receiver, as a hybrid law: the
/// discrete event is "no click" (index 0) or "click in slot k" (index
/// `k - 1` for k = 2..M), and the no-click event is refined by the slot-1
/// homodyne outcome.
pub fn extended_scheme_problem(params: &ExtendedSchemeParams) -> Result<MiProblem> {
    let m = params.order;
    let mut words = (1..=m).map(|l| hadamard_word(l, m)).collect::<Result<Vec<_>>>()?;
    words.push(all_minus_word(m)?);

    let mut events = Vec::with_capacity(m + 1);
    let mut mixtures = Vec::with_capacity(m + 1);
    for w in &words {
        let out = cascade_transform(&w.amplitudes(params.n_s))?;
        let dark: Vec<f64> = out[1..].iter().map(|&a| direct_detection_pmf(a, 0)).collect();
        let none: f64 = dark.iter().product();
        let mut row = Vec::with_capacity(m);
        row.push(none);
        for k in 0..dark.len() {
            let others: f64 = dark
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, d)| d)
                .product();
            row.push((1.0 - dark[k]) * others);
        }
        events.push(row);
        mixtures.push(GaussianMixture::single(homodyne_mean(out[0], 0.0)));
    }
    MiProblem::new(
        params.word_probs(),
        ConditionalLaw::Hybrid {
            events,
            refined_event: 0,
            variance: 0.5,
            mixtures,
        },
    )
}

/// Mutual information per slot of the `(M+1)`-word scheme.
pub fn extended_scheme_mi(params: &ExtendedSchemeParams) -> Result<f64> {
    let problem = extended_scheme_problem(params)?;
    let energy = params.order as f64 * params.n_s;
    let opts = MiOptions {
        abs_tol: 1e-11 * energy.min(1.0),
        ..MiOptions::default()
    };
    if energy == 0.0 {
        return Ok(0.0);
    }
    Ok(mutual_information_with(&problem, &opts) / params.order as f64)
}

/// Optimal `p1` and the resulting information per slot and per photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P1Optimum {
    pub p1: f64,
    pub bits_per_slot: f64,
    pub pie: f64,
}

/// Maximises [`extended_scheme_mi`] over `p1` by golden-section search.
///
/// Mutual information is concave in the input law, which is affine in `p1`,
/// so the objective is unimodal on `[0, 1]`.
pub fn optimize_p1(order: usize, n_s: f64) -> Result<P1Optimum> {
    if !(n_s > 0.0) {
        return Err(invalid("n_s", format!("must be > 0, got {n_s}")));
    }
    let f = |p1: f64| extended_scheme_mi(&ExtendedSchemeParams::new(order, n_s, p1)?);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > P1_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for edge in [0.0, 1.0] {
        let v = f(edge)?;
        if v > best.1 {
            best = (edge, v);
        }
    }
    Ok(P1Optimum {
        p1: best.0,
        bits_per_slot: best.1,
        pie: best.1 / n_s,
    })
}
