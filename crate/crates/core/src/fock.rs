//! Truncated photon-number-basis numerics.
//!
//! Coherent states are expanded as `c_n = exp(-|a|^2/2) a^n / sqrt(n!)` over
//! `n = 0..=cutoff`, with factorials taken through log-gamma so that cutoffs
//! above 170 stay finite. The Holevo quantity of a loss-only coherent-state
//! ensemble is the von Neumann entropy of the averaged output state, since
//! every individual output remains pure.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::channel::{ChannelParams, Constellation};
use crate::detection::{ln_factorial, poisson_ln_pmf};
use crate::error::{invalid, Error, Result};
use crate::infotheory::binary_entropy;

/// Smallest cutoff ever returned by [`choose_cutoff`].
pub const MIN_CUTOFF: usize = 16;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-9;
const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

/// State vector over photon numbers `0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `<self|other>`; both vectors must share a cutoff.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        assert_eq!(self.amplitudes.len(), other.amplitudes.len(), "cutoff mismatch");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Hermitian, unit-trace matrix in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Checks hermiticity (max deviation `1e-12`) and unit trace (`1e-9`).
    /// Positivity is checked when the spectrum is computed.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidDensityMatrix("matrix must be square and nonempty".into()));
        }
        let dev = (&entries - entries.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if !(dev <= HERMITIAN_TOL) {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = entries.trace();
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} differs from 1")));
        }
        Ok(Self { entries })
    }

    /// `sum_x p_x |psi_x><psi_x|`.
    pub fn from_ensemble<'a, I>(states: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a FockVector)>,
    {
        let mut entries: Option<DMatrix<Complex64>> = None;
        for (p, psi) in states {
            let dim = psi.amplitudes.len();
            let m = entries.get_or_insert_with(|| DMatrix::zeros(dim, dim));
            if m.nrows() != dim {
                return Err(invalid("ensemble", "states have different cutoffs"));
            }
            accumulate_projector(m, p, &psi.amplitudes);
        }
        Self::new(entries.ok_or_else(|| invalid("ensemble", "no states"))?)
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Eigenvalues of `(A + A^dagger)/2` with values in `[-1e-10, 0)` clipped
    /// to zero; anything more negative is rejected.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let sym = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(sym);
        eig.eigenvalues
            .iter()
            .map(|&l| {
                if l >= 0.0 {
                    Ok(l)
                } else if l >= -NEGATIVE_EIGEN_TOL {
                    Ok(0.0)
                } else {
                    Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {l:e}")))
                }
            })
            .collect()
    }
}

fn accumulate_projector(m: &mut DMatrix<Complex64>, p: f64, psi: &[Complex64]) {
    let dim = psi.len();
    for j in 0..dim {
        let cj = psi[j].conj() * p;
        if cj == Complex64::new(0.0, 0.0) {
            continue;
        }
        for i in 0..dim {
            m[(i, j)] += psi[i] * cj;
        }
    }
}

/// Smallest admissible cutoff for a coherent state with `mean` photons:
/// `ceil(mean + 10 sqrt(mean + 1) + 10)`.
pub fn required_cutoff(mean: f64) -> usize {
    (mean + 10.0 * (mean + 1.0).sqrt() + 10.0).ceil() as usize
}

/// Truncated coefficients without any admissibility check.
fn coherent_coefficients(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mean = alpha.norm_sqr();
    if mean == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    let (r, theta) = alpha.to_polar();
    let ln_r = r.ln();
    (0..=cutoff)
        .map(|n| {
            let ln_mod = -0.5 * mean + n as f64 * ln_r - 0.5 * ln_factorial(n as u64);
            Complex64::from_polar(ln_mod.exp(), n as f64 * theta)
        })
        .collect()
}

/// Coherent state `|alpha>` truncated at `cutoff` photons.
///
/// Rejects cutoffs below [`required_cutoff`]`(|alpha|^2)`.
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<FockVector> {
    let required = required_cutoff(alpha.norm_sqr());
    if cutoff < required {
        return Err(Error::CutoffTooSmall { cutoff, required });
    }
    Ok(FockVector {
        amplitudes: coherent_coefficients(alpha, cutoff),
    })
}

/// Smallest cutoff `N >= 16` such that a Poisson variable with mean
/// `max_mean_photons` exceeds `N` with probability below `tail_tol`.
pub fn choose_cutoff(max_mean_photons: f64, tail_tol: f64) -> usize {
    assert!(tail_tol > 0.0 && tail_tol < 1.0, "tail_tol must lie in (0, 1)");
    let mean = max_mean_photons.max(0.0);
    if mean == 0.0 {
        return MIN_CUTOFF;
    }
    // Poisson mass beyond mean + 40 sd + 60 is far below any useful tolerance.
    let k_max = (mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize;
    let pmf: Vec<f64> = (0..=k_max).map(|k| poisson_ln_pmf(mean, k as u64).exp()).collect();
    // tails[n] = P(K > n), accumulated from the top to avoid cancellation
    let mut tails = vec![0.0; k_max + 1];
    for n in (0..k_max).rev() {
        tails[n] = tails[n + 1] + pmf[n + 1];
    }
    let n = (0..=k_max).find(|&n| tails[n] < tail_tol).unwrap_or(k_max);
    n.max(MIN_CUTOFF)
}

/// Von Neumann entropy `-Tr(rho log2 rho)` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(rho
        .eigenvalues()?
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum())
}

/// Holevo quantity of a coherent-state ensemble after a loss-only channel.
///
/// Outputs `|sqrt(tau) alpha_x>` are pure, so `chi = S(sum_x p_x rho_x)`.
/// Requires `n_n = 0` and `cutoff >= required_cutoff(tau max|alpha|^2)`.
pub fn holevo_chi(ensemble: &Constellation, params: &ChannelParams, cutoff: usize) -> Result<f64> {
    if params.n_n() != 0.0 {
        return Err(invalid("n_n", "Holevo quantity is implemented for loss-only channels"));
    }
    let scale = params.tau().sqrt();
    let states = ensemble
        .symbols()
        .iter()
        .map(|&(a, p)| Ok((p, coherent_state(a * scale, cutoff)?)))
        .collect::<Result<Vec<_>>>()?;
    if states.iter().filter(|(p, _)| *p > 0.0).count() <= 1 {
        return Ok(0.0);
    }
    let rho = DensityMatrix::from_ensemble(states.iter().map(|(p, s)| (*p, s)))?;
    von_neumann_entropy(&rho)
}

/// Holevo quantity of equiprobable `{|+sqrt n_s>, |-sqrt n_s>}`.
///
/// The mixture has two nonzero eigenvalues `(1 +- |<a|-a>|)/2` with overlap
/// `exp(-2 n_s)`, giving `h2((1 - exp(-2 n_s))/2)`.
pub fn chi_bpsk_closed_form(n_s: f64) -> f64 {
    binary_entropy(-(-2.0 * n_s).exp_m1() / 2.0)
}

/// Gauss-Laguerre nodes and weights for `int_0^inf e^{-t} f(t) dt`
/// (Golub-Welsch). Weights sum to one.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jacobi[(i, i)] = (2 * i + 1) as f64;
        if i + 1 < n {
            jacobi[(i, i + 1)] = (i + 1) as f64;
            jacobi[(i + 1, i)] = (i + 1) as f64;
        }
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Holevo quantity of a polar-grid discretisation of the Gaussian ensemble
/// `alpha ~ CN(0, n_s)` of coherent states.
///
/// `|alpha|^2 = n_s t` with Gauss-Laguerre nodes `t` (the exponential law of
/// `|alpha|^2`) and `angular_nodes` equally spaced phases. Converges to
/// `g(n_s)` under refinement. Fails if `cutoff` leaves more than `1e-9` of
/// the trace outside the truncated space.
pub fn chi_gaussian_discretized(n_s: f64, radial_nodes: usize, angular_nodes: usize, cutoff: usize) -> Result<f64> {
    if radial_nodes < 8 || angular_nodes < 8 {
        return Err(invalid("nodes", "need at least 8 radial and 8 angular nodes"));
    }
    if !(n_s >= 0.0 && n_s.is_finite()) {
        return Err(invalid("n_s", format!("must be >= 0, got {n_s}")));
    }
    if n_s == 0.0 {
        return Ok(0.0);
    }
    let (nodes, weights) = gauss_laguerre(radial_nodes);
    let dim = cutoff + 1;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let phase_weight = 1.0 / angular_nodes as f64;
    for (t, w) in nodes.iter().zip(&weights) {
        let r = (n_s * t).sqrt();
        for k in 0..angular_nodes {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / angular_nodes as f64;
            let psi = coherent_coefficients(Complex64::from_polar(r, theta), cutoff);
            accumulate_projector(&mut m, w * phase_weight, &psi);
        }
    }
    let rho = DensityMatrix::new(m).map_err(|e| match e {
        Error::InvalidDensityMatrix(msg) if msg.contains("trace") => Error::CutoffTooSmall {
            cutoff,
            required: choose_cutoff(n_s * nodes.last().copied().unwrap_or(0.0), 1e-9),
        },
        other => other,
    })?;
    von_neumann_entropy(&rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infotheory::g;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(values: &[f64]) -> DensityMatrix {
        let n = values.len();
        DensityMatrix::new(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(values[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
        .unwrap()
    }

    #[test]
    fn vacuum_and_norm() {
        let v = coherent_state(c(0.0, 0.0), 20).unwrap();
        assert_eq!(v.amplitudes()[0], c(1.0, 0.0));
        assert!(v.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
        for a in [c(0.5, 0.0), c(1.0, -2.0), c(0.0, 6.0), c(14.0, 3.0)] {
            let psi = coherent_state(a, required_cutoff(a.norm_sqr())).unwrap();
            assert!(psi.norm_sqr() >= 1.0 - 1e-12 && psi.norm_sqr() <= 1.0 + 1e-12, "{a}");
        }
    }

    #[test]
    fn coherent_overlap() {
        let a = c(0.5, 0.0);
        let plus = coherent_state(a, 30).unwrap();
        let minus = coherent_state(-a, 30).unwrap();
        assert!((plus.inner(&minus).norm() - (-0.5f64).exp()).abs() < 1e-10);
        // general overlap |<a|b>| = exp(-|a-b|^2/2)
        let b = c(-0.3, 1.1);
        let psi_b = coherent_state(b, 40).unwrap();
        let psi_a = coherent_state(a, 40).unwrap();
        let expect = (-(a - b).norm_sqr() / 2.0).exp();
        assert!((psi_a.inner(&psi_b).norm() - expect).abs() < 1e-12);
    }

    #[test]
    fn cutoff_rules() {
        assert!(matches!(
            coherent_state(c(3.0, 0.0), 20),
            Err(Error::CutoffTooSmall { .. })
        ));
        assert_eq!(choose_cutoff(0.0, 1e-12), 16);
        let n = choose_cutoff(1.0, 1e-12);
        // brute-force tail of Poisson(1)
        let tail = |n: usize| -> f64 { (n as u64 + 1..200).map(|k| poisson_ln_pmf(1.0, k).exp()).sum() };
        assert!(tail(n) < 1e-12);
        if n > MIN_CUTOFF {
            assert!(tail(n - 1) >= 1e-12);
        }
        assert!(choose_cutoff(4.0, 1e-12) >= choose_cutoff(1.0, 1e-12));
        assert!(choose_cutoff(400.0, 1e-12) > 400);
        // large cutoffs stay finite
        let big = coherent_state(c(15.0, 0.0), 400).unwrap();
        assert!(big.amplitudes().iter().all(|a| a.re.is_finite()));
        assert!((big.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let psi = coherent_state(c(0.7, 0.2), 30).unwrap();
        let pure = DensityMatrix::from_ensemble([(1.0, &psi)]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-10);
        assert!((von_neumann_entropy(&diag(&[0.5, 0.5])).unwrap() - 1.0).abs() < 1e-14);
        assert!((von_neumann_entropy(&diag(&[0.75, 0.25])).unwrap() - 0.8112781244591328).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_validation() {
        let non_herm = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(non_herm).is_err());
        let bad_trace = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0)]);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = diag(&[1.5, -0.5]);
        assert!(von_neumann_entropy(&negative).is_err());
        let tiny_negative = diag(&[1.0 + 5e-11, -5e-11]);
        assert!(von_neumann_entropy(&tiny_negative).unwrap().abs() < 1e-8);
    }

    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let z = DMatrix::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        z.qr().q()
    }

    #[test]
    fn entropy_is_basis_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = coherent_state(c(0.6, 0.3), 30).unwrap();
        let b = coherent_state(c(-0.2, 0.9), 30).unwrap();
        let d = coherent_state(c(0.0, -1.0), 30).unwrap();
        let rho = DensityMatrix::from_ensemble([(0.5, &a), (0.3, &b), (0.2, &d)]).unwrap();
        let u = random_unitary(rho.dim(), &mut rng);
        let rotated = &u * rho.entries() * u.adjoint();
        let rotated = (&rotated + rotated.adjoint()) * c(0.5, 0.0);
        let rho2 = DensityMatrix::new(rotated).unwrap();
        let s1 = von_neumann_entropy(&rho).unwrap();
        let s2 = von_neumann_entropy(&rho2).unwrap();
        assert!((s1 - s2).abs() < 1e-9, "{s1} {s2}");
    }

    #[test]
    fn bpsk_chi_matches_closed_form() {
        for ns in [0.01, 0.1, 0.25, 1.0, 4.0] {
            let cutoff = required_cutoff(ns).max(30);
            let chi = holevo_chi(&Constellation::bpsk(ns.sqrt()), &ChannelParams::identity(), cutoff).unwrap();
            assert!((chi - chi_bpsk_closed_form(ns)).abs() < 1e-9, "{ns}: {chi}");
        }
        // h2((1 - e^-0.5)/2), evaluated independently
        assert!((chi_bpsk_closed_form(0.25) - 0.7153491667107217).abs() < 1e-12);
        assert_eq!(chi_bpsk_closed_form(0.0), 0.0);
        assert!((chi_bpsk_closed_form(50.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_with_loss() {
        // tau scales amplitudes before detection
        let loss = ChannelParams::lossy(0.25).unwrap();
        let chi = holevo_chi(&Constellation::bpsk(1.0), &loss, 40).unwrap();
        assert!((chi - chi_bpsk_closed_form(0.25)).abs() < 1e-9);
        let noisy = ChannelParams::new(0.5, 0.1).unwrap();
        assert!(holevo_chi(&Constellation::bpsk(1.0), &noisy, 40).is_err());
        let single = Constellation::new(vec![(c(1.0, 1.0), 1.0)]).unwrap();
        assert_eq!(holevo_chi(&single, &ChannelParams::identity(), 40).unwrap(), 0.0);
    }

    #[test]
    fn bpsk_chi_monotone_and_truncation_stable() {
        let mut prev = 0.0;
        for i in 1..=40 {
            let ns = 0.1 * i as f64;
            let chi = chi_bpsk_closed_form(ns);
            assert!(chi >= prev);
            prev = chi;
        }
        for ns in [0.1, 1.0, 4.0] {
            let n = required_cutoff(ns);
            let a = holevo_chi(&Constellation::bpsk(ns.sqrt()), &ChannelParams::identity(), n).unwrap();
            let b = holevo_chi(&Constellation::bpsk(ns.sqrt()), &ChannelParams::identity(), 2 * n).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn bpsk_beats_homodyne_ceiling_when_photon_starved() {
        let ns = 1e-3;
        assert!(chi_bpsk_closed_form(ns) / ns >= 8.0);
        assert!(chi_bpsk_closed_form(ns) / ns > 2.0 * crate::LOG2_E);
    }

    #[test]
    fn laguerre_rule() {
        let (t, w) = gauss_laguerre(16);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // int t^k e^{-t} = k!
        for k in 0..10 {
            let v: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(k)).sum();
            let f: f64 = (1..=k).map(|i| i as f64).product();
            assert!((v / f - 1.0).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn gaussian_ensemble_approaches_thermal_entropy() {
        assert_eq!(chi_gaussian_discretized(0.0, 8, 8, 20).unwrap(), 0.0);
        for (ns, cutoff) in [(1.0, 45), (0.1, 30)] {
            let coarse = chi_gaussian_discretized(ns, 16, 16, cutoff).unwrap();
            let fine = chi_gaussian_discretized(ns, 32, 32, cutoff).unwrap();
            assert!((fine - g(ns)).abs() < 5e-3, "{ns}: {fine}");
            assert!((fine - coarse).abs() < 5e-3);
        }
        assert!(chi_gaussian_discretized(1.0, 4, 32, 40).is_err());
        assert!(matches!(
            chi_gaussian_discretized(5.0, 16, 16, 10),
            Err(Error::CutoffTooSmall { .. })
        ));
    }
}
