//! The computations behind each subcommand, returning tables.

use optcap::channel::{propagate_sample, ChannelParams};
use optcap::detection::{sample_detection, sample_poisson, DetectionModel, Outcome};
use optcap::fock::chi_bpsk_closed_form;
use optcap::hadamard::optimize_p1;
use optcap::infotheory::{
    bpsk_homodyne_mi, bpsk_homodyne_mi_monte_carlo, c_holevo, c_shannon_1q, c_shannon_2q, Scheme,
};
use optcap::ppm::{optimal_ppm_order_exact, ppm_pie, ppm_pie_opt_approx, PpmParams, DEFAULT_M_MAX};
use optcap::{Complex64, LOG2_E};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::sweep::{SweepSpec, Variable};
use crate::table::{Cell, Table};
use crate::CliError;

/// Orders accepted by the superadditivity command.
pub const SUPERADDITIVITY_ORDERS: [usize; 4] = [2, 4, 8, 16];

/// Smallest sample count accepted by [`validate`].
pub const MIN_VALIDATION_SAMPLES: usize = 100_000;

fn expect_variable(sweep: &SweepSpec, v: Variable) -> Result<(), CliError> {
    sweep.validate()?;
    if sweep.variable != v {
        return Err(CliError::usage(format!(
            "expected a sweep over {v}, got {}",
            sweep.variable
        )));
    }
    Ok(())
}

fn require_positive_ns(values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|&&x| !(x > 0.0)) {
        Some(x) => Err(CliError::usage(format!(
            "photon information efficiency needs n_s > 0, got {x}"
        ))),
        None => Ok(()),
    }
}

fn check_nn(n_n: f64) -> Result<(), CliError> {
    if !(n_n.is_finite() && n_n >= 0.0) {
        return Err(CliError::usage(format!("--nn must be finite and >= 0, got {n_n}")));
    }
    Ok(())
}

/// Long-format capacity table: one row per (n_s, scheme).
pub fn capacity_curves(ns_values: &[f64], n_n: f64, schemes: &[Scheme]) -> Result<Table, CliError> {
    check_nn(n_n)?;
    if let Some(x) = ns_values.iter().find(|&&x| !(x.is_finite() && x >= 0.0)) {
        return Err(CliError::usage(format!("n_s must be finite and >= 0, got {x}")));
    }
    if schemes.is_empty() {
        return Err(CliError::usage("at least one scheme is required"));
    }
    let mut table = Table::new(["n_s", "n_n", "scheme", "bits_per_slot"]);
    let rows: Vec<Vec<Vec<Cell>>> = ns_values
        .par_iter()
        .map(|&ns| {
            schemes
                .iter()
                .map(|s| vec![ns.into(), n_n.into(), s.to_string().into(), s.capacity(ns, n_n).into()])
                .collect()
        })
        .collect();
    for row in rows.into_iter().flatten() {
        table.push(row);
    }
    Ok(table)
}

/// PIE of the capacity limits, of PPM at the requested orders and,
/// optionally, of the approximate and exact PPM optimum.
pub fn pie_curves(sweep: &SweepSpec, n_n: f64, orders: &[u64], approx: bool) -> Result<Table, CliError> {
    expect_variable(sweep, Variable::Ns)?;
    check_nn(n_n)?;
    if let Some(m) = orders.iter().find(|&&m| m < 2 || !m.is_power_of_two()) {
        return Err(CliError::usage(format!(
            "PPM orders must be powers of two >= 2, got {m}"
        )));
    }
    if n_n > 0.0 && (approx || !orders.is_empty()) {
        return Err(CliError::usage("PPM columns model a noiseless channel; use --nn 0"));
    }
    let values = sweep.values();
    require_positive_ns(&values)?;

    let mut columns: Vec<String> = ["n_s", "n_n", "pie_s1", "pie_s2", "pie_holevo"]
        .map(String::from)
        .into();
    columns.extend(orders.iter().map(|m| format!("pie_ppm_{m}")));
    if approx {
        columns.extend(["pie_ppm_opt_approx", "pie_ppm_opt", "ppm_opt_order"].map(String::from));
    }
    let rows = values
        .par_iter()
        .map(|&ns| -> Result<Vec<Cell>, CliError> {
            let mut row: Vec<Cell> = vec![
                ns.into(),
                n_n.into(),
                (c_shannon_1q(ns, n_n) / ns).into(),
                (c_shannon_2q(ns, n_n) / ns).into(),
                (c_holevo(ns, n_n) / ns).into(),
            ];
            for &m in orders {
                row.push(ppm_pie(&PpmParams::new(m, ns)?)?.into());
            }
            if approx {
                let exact = optimal_ppm_order_exact(ns, DEFAULT_M_MAX, false)?;
                row.push(ppm_pie_opt_approx(ns)?.into());
                row.push(exact.pie.into());
                row.push(exact.order.into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(columns);
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Holevo PIE on an (n_s, n_n) grid, n_n varying fastest.
pub fn pie_heatmap(ns_sweep: &SweepSpec, nn_sweep: &SweepSpec) -> Result<Table, CliError> {
    expect_variable(ns_sweep, Variable::Ns)?;
    expect_variable(nn_sweep, Variable::Nn)?;
    let ns_values = ns_sweep.values();
    require_positive_ns(&ns_values)?;
    let nn_values = nn_sweep.values();
    let grid: Vec<(f64, f64)> = ns_values
        .iter()
        .flat_map(|&ns| nn_values.iter().map(move |&nn| (ns, nn)))
        .collect();
    let mut table = Table::new(["n_s", "n_n", "pie_holevo"]);
    let rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|&(ns, nn)| vec![ns.into(), nn.into(), (c_holevo(ns, nn) / ns).into()])
        .collect();
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// PIE of BPSK with homodyne detection and with joint detection (Holevo
/// quantity), against the one-quadrature and Holevo limits.
pub fn bpsk_chi(sweep: &SweepSpec) -> Result<Table, CliError> {
    expect_variable(sweep, Variable::Ns)?;
    let values = sweep.values();
    require_positive_ns(&values)?;
    let mut table = Table::new(["n_s", "pie_homodyne_bpsk", "pie_chi_bpsk", "pie_s1", "pie_holevo"]);
    let rows: Vec<Vec<Cell>> = values
        .par_iter()
        .map(|&ns| {
            vec![
                ns.into(),
                (bpsk_homodyne_mi(ns) / ns).into(),
                (chi_bpsk_closed_form(ns) / ns).into(),
                (c_shannon_1q(ns, 0.0) / ns).into(),
                (c_holevo(ns, 0.0) / ns).into(),
            ]
        })
        .collect();
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Optimised (M+1)-word Hadamard scheme for each order.
pub fn superadditivity(orders: &[usize], n_s: f64) -> Result<Table, CliError> {
    if orders.is_empty() {
        return Err(CliError::usage("at least one order is required"));
    }
    if let Some(m) = orders.iter().find(|m| !SUPERADDITIVITY_ORDERS.contains(m)) {
        return Err(CliError::usage(format!(
            "orders must be taken from {SUPERADDITIVITY_ORDERS:?}, got {m}"
        )));
    }
    if !(n_s > 0.0 && n_s.is_finite()) {
        return Err(CliError::usage(format!("--ns must be finite and > 0, got {n_s}")));
    }
    let rows = orders
        .par_iter()
        .map(|&m| -> Result<Vec<Cell>, CliError> {
            let opt = optimize_p1(m, n_s)?;
            let ppm = ppm_pie(&PpmParams::new(m as u64, n_s)?)?;
            Ok(vec![
                (m as u64).into(),
                n_s.into(),
                opt.p1.into(),
                opt.pie.into(),
                ppm.into(),
                (2.0 * LOG2_E).into(),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new([
        "M",
        "n_s",
        "p1_star",
        "pie_star",
        "ppm_equivalent_pie",
        "ceiling_2log2e",
    ]);
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

struct Check {
    name: &'static str,
    measured: f64,
    expected: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        (self.measured - self.expected).abs() <= self.tolerance
    }
}

pub struct ValidationReport {
    pub table: Table,
    pub passed: usize,
    pub total: usize,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Three standard errors of the sample variance of `n` Gaussian draws.
fn variance_band(var: f64, n: usize) -> f64 {
    3.0 * var * (2.0 / (n as f64 - 1.0)).sqrt()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_check(index: usize, seed: u64, n: usize) -> Vec<Check> {
    let mut rng = rng_for(seed, index as u64);
    let alpha = Complex64::new(0.8, -0.6);
    match index {
        0 => {
            let ys: Vec<f64> = (0..n)
                .map(
                    |_| match sample_detection(DetectionModel::Homodyne { phase: 0.3 }, alpha, &mut rng) {
                        Outcome::Quadrature(q) => q.y,
                        _ => unreachable!("homodyne yields quadratures"),
                    },
                )
                .collect();
            vec![Check {
                name: "homodyne_variance",
                measured: variance(&ys),
                expected: 0.5,
                tolerance: variance_band(0.5, n),
            }]
        }
        1 => {
            let (mut yi, mut yq) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for _ in 0..n {
                if let Outcome::DualQuadrature(d) = sample_detection(DetectionModel::DualHomodyne, alpha, &mut rng) {
                    yi.push(d.y_i);
                    yq.push(d.y_q);
                }
            }
            vec![
                Check {
                    name: "dual_homodyne_variance_i",
                    measured: variance(&yi),
                    expected: 0.5,
                    tolerance: variance_band(0.5, n),
                },
                Check {
                    name: "dual_homodyne_variance_q",
                    measured: variance(&yq),
                    expected: 0.5,
                    tolerance: variance_band(0.5, n),
                },
            ]
        }
        2 | 3 => {
            let (name, mean) = if index == 2 {
                ("poisson_mean_small", alpha.norm_sqr())
            } else {
                ("poisson_mean_large", 45.0)
            };
            let total: u64 = (0..n).map(|_| sample_poisson(mean, &mut rng)).sum();
            vec![Check {
                name,
                measured: total as f64 / n as f64,
                expected: mean,
                tolerance: 3.0 * (mean / n as f64).sqrt(),
            }]
        }
        4 => {
            let n_n = 2.0;
            let params = ChannelParams::new(1.0, n_n).expect("valid channel");
            let (mut re, mut im) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for _ in 0..n {
                let z = propagate_sample(Complex64::new(0.0, 0.0), &params, &mut rng);
                re.push(z.re);
                im.push(z.im);
            }
            let target = n_n / 2.0;
            vec![
                Check {
                    name: "channel_noise_variance_i",
                    measured: variance(&re),
                    expected: target,
                    tolerance: variance_band(target, n),
                },
                Check {
                    name: "channel_noise_variance_q",
                    measured: variance(&im),
                    expected: target,
                    tolerance: variance_band(target, n),
                },
            ]
        }
        5 => {
            let mc = bpsk_homodyne_mi_monte_carlo(0.1, n, &mut rng);
            vec![Check {
                name: "bpsk_homodyne_mi",
                measured: mc.value,
                expected: bpsk_homodyne_mi(0.1),
                tolerance: 3.0 * mc.std_error,
            }]
        }
        _ => Vec::new(),
    }
}

const CHECK_GROUPS: usize = 6;

/// Monte Carlo checks of the samplers against their analytic laws, each on
/// its own ChaCha8 stream derived from `seed`.
pub fn validate(seed: u64, samples: usize) -> Result<ValidationReport, CliError> {
    if samples < MIN_VALIDATION_SAMPLES {
        return Err(CliError::usage(format!(
            "--samples must be at least {MIN_VALIDATION_SAMPLES}, got {samples}"
        )));
    }
    let checks: Vec<Check> = (0..CHECK_GROUPS)
        .into_par_iter()
        .map(|i| run_check(i, seed, samples))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let mut table = Table::new(["check", "measured", "expected", "tolerance", "deviation", "pass"]);
    let mut passed = 0;
    for c in &checks {
        let ok = c.passed();
        passed += usize::from(ok);
        table.push(vec![
            c.name.into(),
            c.measured.into(),
            c.expected.into(),
            c.tolerance.into(),
            (c.measured - c.expected).into(),
            ok.into(),
        ]);
    }
    Ok(ValidationReport {
        table,
        passed,
        total: checks.len(),
    })
}
