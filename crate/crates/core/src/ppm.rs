//! Pulse position modulation with ideal direct detection.
//!
//! An `M`-ary PPM frame places all `M n_s` photons of the frame in one of `M`
//! slots. With an ideal detector the only error is an erasure (no photocount
//! in the whole frame), so the frame is an `M`-ary erasure channel with
//! success probability `1 - exp(-M n_s)`.

use std::f64::consts::{E, LN_2};

use crate::error::{invalid, Result};
use crate::infotheory::{ConditionalLaw, MiProblem};
use crate::LOG2_E;

/// Default upper bound on the order searched by [`optimal_ppm_order_exact`].
pub const DEFAULT_M_MAX: u64 = 1 << 24;

/// Log-spaced candidates scanned before local refinement.
const PRESCAN_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpmParams {
    order: u64,
    n_s: f64,
}

impl PpmParams {
    pub fn new(order: u64, n_s: f64) -> Result<Self> {
        if order < 2 {
            return Err(invalid("order", format!("PPM order must be >= 2, got {order}")));
        }
        if !(n_s.is_finite() && n_s >= 0.0) {
            return Err(invalid("n_s", format!("must be finite and >= 0, got {n_s}")));
        }
        Ok(Self { order, n_s })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn n_s(&self) -> f64 {
        self.n_s
    }

    /// Photons carried by the single pulse of a frame.
    pub fn pulse_energy(&self) -> f64 {
        self.order as f64 * self.n_s
    }
}

/// Probability that the pulse yields at least one photocount.
pub fn ppm_click_prob(p: &PpmParams) -> f64 {
    -(-p.pulse_energy()).exp_m1()
}

/// Mutual information per slot, `p_click log2(M) / M`.
pub fn ppm_mutual_information(p: &PpmParams) -> f64 {
    ppm_click_prob(p) * (p.order as f64).log2() / p.order as f64
}

/// Bits per received photon of `M`-ary PPM; tends to `log2 M` as `n_s -> 0`.
pub fn ppm_pie(p: &PpmParams) -> Result<f64> {
    if p.n_s == 0.0 {
        return Err(invalid("n_s", "PPM PIE needs n_s > 0"));
    }
    Ok(ppm_click_prob(p) * (p.order as f64).log2() / p.pulse_energy())
}

/// The frame as an explicit erasure channel: `M` equiprobable inputs and
/// outcomes "pulse seen in slot 1..M" plus a final "erasure" outcome.
pub fn erasure_channel(p: &PpmParams) -> Result<MiProblem> {
    let m = p.order as usize;
    let click = ppm_click_prob(p);
    let pmfs = (0..m)
        .map(|l| {
            let mut row = vec![0.0; m + 1];
            row[l] = click;
            row[m] = 1.0 - click;
            row
        })
        .collect();
    MiProblem::new(vec![1.0 / m as f64; m], ConditionalLaw::Discrete { pmfs })
}

/// Principal branch of the Lambert W function for `x >= 0`.
///
/// Halley iteration on `w e^w - x` from a logarithmic starting point.
pub fn lambert_w(x: f64) -> Result<f64> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(invalid(
            "x",
            format!("Lambert W is implemented for finite x >= 0, got {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < E {
        x.ln_1p()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    Ok(w)
}

/// Continuous-order approximation of the PIE-optimal PPM order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpmOrderApprox {
    pub order: f64,
    /// Set when `n_s >= 1`, where the small-signal expansion behind the
    /// formula no longer applies.
    pub outside_validity: bool,
}

/// `M* ~ (2 / n_s) / W(2e / n_s)`, valid for `n_s << 1`.
pub fn optimal_ppm_order_approx(n_s: f64) -> Result<PpmOrderApprox> {
    if !(n_s > 0.0) {
        return Err(invalid("n_s", format!("must be > 0, got {n_s}")));
    }
    let w = lambert_w(2.0 * E / n_s)?;
    Ok(PpmOrderApprox {
        order: 2.0 / n_s / w,
        outside_validity: n_s >= 1.0,
    })
}

/// PIE at the approximate optimal order,
/// `(W - 2 + 1/W) log2 e` with `W = W(2e / n_s)`.
pub fn ppm_pie_opt_approx(n_s: f64) -> Result<f64> {
    if !(n_s > 0.0) {
        return Err(invalid("n_s", format!("must be > 0, got {n_s}")));
    }
    let w = lambert_w(2.0 * E / n_s)?;
    Ok((w - 2.0 + 1.0 / w) * LOG2_E)
}

/// Integer-optimal PPM order and its PIE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpmOptimum {
    pub order: u64,
    pub pie: f64,
}

fn pie_at(order: u64, n_s: f64) -> f64 {
    let energy = order as f64 * n_s;
    -(-energy).exp_m1() * (order as f64).ln() / (energy * LN_2)
}

/// Exact maximiser of the PPM PIE over orders in `[2, m_max]`, or over powers
/// of two in that range. Ties resolve to the smaller order.
///
/// The integer search prescans log-spaced orders and then scans every order
/// between the neighbours of the best candidate; this relies on the PIE
/// being unimodal in `M` at fixed `n_s`, which holds on every grid tested.
pub fn optimal_ppm_order_exact(n_s: f64, m_max: u64, powers_of_two_only: bool) -> Result<PpmOptimum> {
    if !(n_s > 0.0 && n_s.is_finite()) {
        return Err(invalid("n_s", format!("must be > 0, got {n_s}")));
    }
    if m_max < 2 {
        return Err(invalid("m_max", format!("must be >= 2, got {m_max}")));
    }
    let best_of = |orders: &mut dyn Iterator<Item = u64>| {
        let mut best = PpmOptimum {
            order: 0,
            pie: f64::NEG_INFINITY,
        };
        for m in orders {
            let pie = pie_at(m, n_s);
            if pie > best.pie {
                best = PpmOptimum { order: m, pie };
            }
        }
        best
    };
    if powers_of_two_only {
        let mut it = (1..64).map(|k| 1u64 << k).take_while(|&m| m <= m_max);
        return Ok(best_of(&mut it));
    }

    let span = (m_max as f64 / 2.0).ln();
    let mut grid: Vec<u64> = (0..PRESCAN_POINTS)
        .map(|i| {
            let m = (2.0 * (span * i as f64 / (PRESCAN_POINTS - 1) as f64).exp()).round() as u64;
            m.clamp(2, m_max)
        })
        .collect();
    grid.dedup();
    let coarse = best_of(&mut grid.iter().copied());
    let idx = grid.iter().position(|&m| m == coarse.order).expect("order from grid");
    let lo = grid[idx.saturating_sub(1)];
    let hi = grid[(idx + 1).min(grid.len() - 1)];
    Ok(best_of(&mut (lo..=hi)))
}
