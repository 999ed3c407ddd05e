use graphon_signal::bounds::{
    bhc_deviation, covering_number_log2, generalization_bound, hidden_feature_bound, ln_xi,
    mpnn_lipschitz_constants, multinomial_check, recurrence, recurrence_closed, sampling_bounds,
    xi_inverse, CoveringPreset, GeneralizationParams, HiddenCoeff, Log2, NetworkConstants,
};
use graphon_signal::sampling::LogBase;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Direct evaluation of the signal and kernel coefficients at layer `t`.
fn direct_coefficients(n: &NetworkConstants, r: f64, c: f64) -> (f64, f64) {
    let base = c * n.k * n.l.powi(3) * n.b * n.b;
    let rs: Vec<f64> = (0..n.t)
        .map(|j| if j == 0 { r } else { (base * r).powf((j as f64).exp2()) })
        .collect();
    let a: Vec<f64> = rs
        .iter()
        .map(|&x| 4.0 * n.k * n.d * (n.l.powi(3) * x + n.l * n.l * n.b) + n.l)
        .collect();
    let b: Vec<f64> = rs.iter().map(|&x| 4.0 * n.k * (n.l * n.l * x + n.l * n.b).powi(2)).collect();
    (a.iter().product(), recurrence_closed(&a, &b, 0.0, n.t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn log_space_agrees_with_direct_evaluation(
        k in 1.0f64..4.0, l in 1.0f64..3.0, b in 1.0f64..3.0, r in 1.0f64..3.0,
        t in 1usize..4, d in 1.0f64..5.0,
    ) {
        let net = NetworkConstants { k, l, b, t, d };
        let c = mpnn_lipschitz_constants(&net, r, HiddenCoeff::Four);
        let (signal, kernel) = direct_coefficients(&net, r, 4.0);
        if signal.is_finite() && kernel.is_finite() {
            prop_assert!(rel(c.layers[t].signal.value.unwrap(), signal) <= 1e-9);
            prop_assert!(rel(c.layers[t].kernel.value.unwrap(), kernel) <= 1e-9);
        }
        let h = hidden_feature_bound(k, l, b, r, t, HiddenCoeff::Six);
        let direct = (6.0 * k * l.powi(3) * b * b * r).powf((t as f64).exp2());
        if direct.is_finite() {
            prop_assert!(rel(h.bound.value.unwrap(), direct) <= 1e-9);
        }
    }

    #[test]
    fn log_sum_matches_float_sum(a in 0.0f64..1e6, b in 0.0f64..1e6) {
        prop_assert!(rel(Log2::of(a).add(Log2::of(b)).value(), a + b) <= 1e-9);
        prop_assert!(rel(Log2::of(a).mul(Log2::of(b)).value(), a * b) <= 1e-9);
    }

    #[test]
    fn recurrence_closed_form_matches_iteration(
        a in prop::collection::vec(0.0f64..3.0, 0..8),
        e0 in -2.0f64..2.0,
        seed_b in prop::collection::vec(-2.0f64..2.0, 8),
    ) {
        let b = &seed_b[..a.len()];
        let e = recurrence(&a, b, e0).unwrap();
        for t in 0..=a.len() {
            prop_assert!((recurrence_closed(&a, b, e0, t) - e[t]).abs() <= 1e-9 * e[t].abs().max(1.0));
        }
    }

    #[test]
    fn sampling_bounds_decrease_in_k(k in 2.0f64..1e8, step in 1.0f64..1e4) {
        for base in [LogBase::Two, LogBase::Natural] {
            let lo = sampling_bounds(k, 1.0, Some(3.0), base).unwrap();
            let hi = sampling_bounds(k + step, 1.0, Some(3.0), base).unwrap();
            prop_assert!(hi.cut_distance < lo.cut_distance);
            prop_assert!(hi.quarter_root < lo.quarter_root);
            prop_assert!(hi.simple_graph < lo.simple_graph);
            prop_assert!(hi.signal < lo.signal);
            prop_assert!(hi.mpnn.unwrap() < lo.mpnn.unwrap());
        }
    }

    #[test]
    fn xi_inverse_round_trips(log_n in 0.5f64..40.0, c in 0.5f64..4.0) {
        let n = log_n.exp();
        for preset in [CoveringPreset::Sharp, CoveringPreset::Conservative] {
            let x = xi_inverse(n, c, preset, 1.0).unwrap();
            prop_assert!(rel(ln_xi(x.r, c, preset).exp(), n) <= 1e-6);
            prop_assert!(x.rel_error <= 1e-6);
        }
    }
}

#[test]
fn xi_inverse_at_the_reference_sizes() {
    let mut last = f64::INFINITY;
    for n in [10.0, 1e3, 1e6] {
        let x = xi_inverse(n, 2.0, CoveringPreset::Sharp, 1.0).unwrap();
        assert!(rel(ln_xi(x.r, 2.0, CoveringPreset::Sharp).exp(), n) <= 1e-6);
        assert!(x.r < last);
        assert!(x.ceiling_error >= 0.0);
        last = x.r;
    }
}

#[test]
fn covering_reference_values() {
    assert_eq!(covering_number_log2(1.0, 2.0, CoveringPreset::Sharp).unwrap().log2_kappa, 256.0);
    assert_eq!(covering_number_log2(2.0, 2.0, CoveringPreset::Sharp).unwrap().log2_kappa, 4.0);
    // 9/4 preset: k = ceil(2^4.5) = 23
    assert_eq!(covering_number_log2(1.0, 2.0, CoveringPreset::Conservative).unwrap().log2_kappa, 529.0);
}

#[test]
fn generalization_bound_shrinks_with_more_samples() {
    let mut last = f64::INFINITY;
    for n in [1e2, 1e4, 1e6, 1e8] {
        let g = generalization_bound(&GeneralizationParams {
            n,
            p: 0.05,
            l_e: 2.0,
            l_h: 3.0,
            b_h: 4.0,
            e00: -0.5,
            c: 2.0,
            preset: CoveringPreset::Sharp,
            window: 1.0,
        })
        .unwrap();
        assert!(g.value < last);
        assert_eq!(g.loss_lipschitz, 6.0);
        assert_eq!(g.loss_bound, 10.5);
        last = g.value;
    }
}

#[test]
fn multinomial_deviation_is_rarely_exceeded() {
    let rep = multinomial_check(4, 2000, 0.05, 200, None, 3).unwrap();
    assert_eq!(rep.threshold, bhc_deviation(4, 2000, 0.05));
    assert!(rep.pass, "rate {} allowed {}", rep.rate, rep.allowed);
    let skewed = multinomial_check(3, 500, 0.1, 100, Some(&[0.7, 0.2, 0.1]), 5).unwrap();
    assert!(skewed.pass);
    assert!(multinomial_check(3, 10, 0.1, 10, Some(&[1.0]), 0).is_err());
    assert_eq!(rep, multinomial_check(4, 2000, 0.05, 200, None, 3).unwrap());
}
