//! Cross-module consistency through the public API.

use optcap::channel::{photons_per_slot_from_budget, received_mean_photons, ChannelParams, Constellation, LinkBudget};
use optcap::fock::{chi_bpsk_closed_form, holevo_chi, required_cutoff};
use optcap::hadamard::{hadamard_ppm_mi_composed, optimize_p1};
use optcap::infotheory::{c_holevo, mutual_information, pie, pie_holevo_noisy_limit, Scheme};
use optcap::ppm::{erasure_channel, optimal_ppm_order_exact, ppm_mutual_information, PpmParams};
use optcap::LOG2_E;

#[test]
fn erasure_channel_agrees_with_closed_form() {
    for (m, ns) in [(2u64, 0.3), (16, 0.01), (64, 1e-3)] {
        let p = PpmParams::new(m, ns).unwrap();
        let mi = mutual_information(&erasure_channel(&p).unwrap()) / m as f64;
        assert!((mi - ppm_mutual_information(&p)).abs() < 1e-12, "M = {m}");
    }
}

#[test]
fn hadamard_cascade_reproduces_ppm() {
    for m in [4usize, 32] {
        let direct = ppm_mutual_information(&PpmParams::new(m as u64, 0.02).unwrap());
        assert!((hadamard_ppm_mi_composed(m, 0.02).unwrap() - direct).abs() < 1e-12);
    }
}

#[test]
fn loss_then_holevo_chi() {
    let alpha = 1.2f64;
    let params = ChannelParams::lossy(0.25).unwrap();
    let nbar = received_mean_photons(alpha * alpha, &params);
    let chi = holevo_chi(&Constellation::bpsk(alpha), &params, required_cutoff(nbar)).unwrap();
    assert!((chi - chi_bpsk_closed_form(nbar)).abs() < 1e-9);
    assert!(chi <= Scheme::Holevo.capacity(nbar, 0.0));
}

#[test]
fn budget_to_noisy_pie() {
    let budget = LinkBudget::new(1e-15, 1e9, 1.936e14, 1e-19).unwrap();
    let (ns, nn) = photons_per_slot_from_budget(&budget, 1.0);
    assert!(ns < 1e-3 * nn);
    let p = pie(c_holevo(ns, nn), ns).unwrap();
    assert!((p - pie_holevo_noisy_limit(nn).unwrap()).abs() < 1e-3 * p);
}

#[test]
fn joint_detection_beats_best_direct_ppm_of_same_order() {
    for m in [2usize, 4, 8] {
        let joint = optimize_p1(m, 1e-3).unwrap();
        let ppm = pie(ppm_mutual_information(&PpmParams::new(m as u64, 1e-3).unwrap()), 1e-3).unwrap();
        assert!(joint.pie > ppm);
        assert!(joint.pie > 2.0 * LOG2_E);
    }
    // but unrestricted-order PPM eventually wins in this regime
    assert!(optimal_ppm_order_exact(1e-3, 1 << 20, false).unwrap().pie > optimize_p1(8, 1e-3).unwrap().pie);
}
