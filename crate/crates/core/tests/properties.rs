use ovaplug::datagen::{
    make_crossing_distribution, make_hard_margin_distribution, sample_drift, sample_iid,
    sample_mixing, DriftSchedule, MixingChainSpec,
};
use ovaplug::kernels::gaussian_kernel;
use ovaplug::lpreg::{build_local_system, clip_unit, lp_estimate};
use ovaplug::multipoly::{enumerate_basis, eval_monomial, eval_poly, MultiIndex};
use ovaplug::ova::{argmax_first, LabeledSample, PlugInModel, DEFAULT_GUARD};
use ovaplug::rate::{classify_regime, fit_rate, Setting};
use ovaplug::risk::exceedance;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn points(n: usize, d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n * d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monomial_of_sum_is_product(
        u in prop::collection::vec(-2.0f64..2.0, 3),
        a in prop::collection::vec(0u32..4, 3),
        b in prop::collection::vec(0u32..4, 3),
    ) {
        let (s1, s2) = (MultiIndex::new(a), MultiIndex::new(b));
        let lhs = eval_monomial(&u, &(&s1 + &s2)).unwrap();
        let rhs = eval_monomial(&u, &s1).unwrap() * eval_monomial(&u, &s2).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn polynomial_evaluation_is_linear(
        c1 in prop::collection::vec(-3.0f64..3.0, 10),
        c2 in prop::collection::vec(-3.0f64..3.0, 10),
        t in -2.0f64..2.0,
        u in prop::collection::vec(-1.5f64..1.5, 2),
    ) {
        let basis = enumerate_basis(2, 3).unwrap();
        let mix: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| t * a + b).collect();
        let lhs = eval_poly(&mix, &basis, &u).unwrap();
        let rhs = t * eval_poly(&c1, &basis, &u).unwrap() + eval_poly(&c2, &basis, &u).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10));
    }

    #[test]
    fn clipping_lands_in_unit_interval(v in -1e6f64..1e6) {
        let c = clip_unit(v);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert_eq!(clip_unit(c), c);
    }

    #[test]
    fn estimate_is_translation_invariant(
        xs in points(60, 2),
        ys in prop::collection::vec(0u8..2, 60),
        q in prop::collection::vec(0.2f64..0.8, 2),
        shift in prop::collection::vec(-5.0f64..5.0, 2),
    ) {
        let k = gaussian_kernel(2);
        let basis = enumerate_basis(2, 1).unwrap();
        let ys: Vec<f64> = ys.iter().map(|&y| y as f64).collect();
        let moved: Vec<f64> = xs.chunks(2).flat_map(|p| [p[0] + shift[0], p[1] + shift[1]]).collect();
        let q2 = [q[0] + shift[0], q[1] + shift[1]];
        let a = lp_estimate(&build_local_system(&xs, &ys, &q, 0.4, &basis, &k).unwrap(), DEFAULT_GUARD).unwrap();
        let b = lp_estimate(&build_local_system(&moved, &ys, &q2, 0.4, &basis, &k).unwrap(), DEFAULT_GUARD).unwrap();
        prop_assert_eq!(a.degenerate, b.degenerate);
        prop_assert!((a.raw - b.raw).abs() < 1e-9, "{} vs {}", a.raw, b.raw);
    }

    #[test]
    fn polynomials_are_reproduced(
        d in 1usize..3,
        k in 0u32..3,
        coeffs in prop::collection::vec(-1.0f64..1.0, 10),
        xs in points(200, 2),
        q in prop::collection::vec(0.3f64..0.7, 2),
    ) {
        let basis = enumerate_basis(d, k).unwrap();
        let coeffs = &coeffs[..basis.size()];
        let xs: Vec<f64> = xs.chunks(2).flat_map(|p| p[..d].to_vec()).collect();
        let ys: Vec<f64> = xs.chunks(d).map(|p| eval_poly(coeffs, &basis, p).unwrap()).collect();
        let sys = build_local_system(&xs, &ys, &q[..d], 0.5, &basis, &gaussian_kernel(d)).unwrap();
        let e = lp_estimate(&sys, DEFAULT_GUARD).unwrap();
        prop_assert!(!e.degenerate);
        let truth = eval_poly(coeffs, &basis, &q[..d]).unwrap();
        prop_assert!((e.raw - truth).abs() < 1e-8, "{} vs {}", e.raw, truth);
    }

    #[test]
    fn permuting_labels_permutes_scores(
        xs in points(80, 1),
        labels in prop::collection::vec(1usize..4, 80),
        perm_seed in 0usize..6,
        q in 0.1f64..0.9,
    ) {
        let perms = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
        let perm = perms[perm_seed];
        let sample = LabeledSample::new(1, 3, xs, labels).unwrap();
        let relabelled = sample.relabel(&perm).unwrap();
        let fit = |s| PlugInModel::fit(s, 1.5, 0.3, gaussian_kernel(1), DEFAULT_GUARD).unwrap();
        let (a, b) = (fit(sample), fit(relabelled));
        let sa = a.class_scores(&[q]).unwrap();
        let sb = b.class_scores(&[q]).unwrap();
        for j in 0..3 {
            prop_assert!((sa[j] - sb[perm[j] - 1]).abs() < 1e-12);
        }
        let mut sorted = sa.clone();
        sorted.sort_by(|x, y| y.total_cmp(x));
        if sorted[0] - sorted[1] > 1e-9 {
            prop_assert_eq!(perm[a.predict(&[q]).unwrap() - 1], b.predict(&[q]).unwrap());
        }
    }

    #[test]
    fn eta_stays_in_simplex(
        x in prop::collection::vec(0.0f64..=1.0, 3),
        alpha_inv in 1usize..4,
        m in 2usize..6,
        g0 in 0.01f64..0.9,
        beta in 0.5f64..4.0,
        step in 1usize..10_000,
    ) {
        let alpha = 1.0 / (2 * alpha_inv - 1) as f64;
        let crossing = make_crossing_distribution(3, alpha, beta).unwrap();
        let hard = make_hard_margin_distribution(3, m, g0, beta).unwrap();
        let drift = DriftSchedule::new(&crossing, 0.9 * DriftSchedule::amplitude_cap(&crossing)).unwrap();
        let etas = [
            crossing.eta_vector(&x).unwrap(),
            hard.eta_vector(&x).unwrap(),
            drift.eta_at(&crossing, step, &x).unwrap(),
        ];
        for eta in etas {
            prop_assert!((eta.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(eta.iter().all(|&p| (-1e-12..=1.0 + 1e-12).contains(&p)), "{eta:?}");
        }
    }

    #[test]
    fn rate_fit_ignores_risk_scale(
        risks in prop::collection::vec(1e-4f64..1.0, 5),
        scale in 1e-3f64..1e3,
    ) {
        let ns = [256, 512, 1024, 2048, 4096];
        let a = fit_rate(&ns, &risks).unwrap();
        let scaled: Vec<f64> = risks.iter().map(|r| r * scale).collect();
        let b = fit_rate(&ns, &scaled).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-9);
        prop_assert!((b.intercept - a.intercept - scale.ln()).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&a.r_squared));
    }

    #[test]
    fn exceedance_decreases_in_delta(
        errors in prop::collection::vec(0.0f64..1.0, 30..100),
        d1 in 0.0f64..1.0,
        d2 in 0.0f64..1.0,
    ) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(exceedance(&errors, hi) <= exceedance(&errors, lo));
    }

    #[test]
    fn infinite_c3_mixing_matches_iid(
        alpha in 0.0f64..4.0,
        beta in 0.1f64..5.0,
        d in 1usize..6,
    ) {
        prop_assert_eq!(
            classify_regime(alpha, beta, d, Setting::Mixing, f64::INFINITY),
            classify_regime(alpha, beta, d, Setting::DriftOrIid, f64::INFINITY)
        );
    }

    #[test]
    fn argmax_picks_first_maximum(scores in prop::collection::vec(0u8..4, 1..8)) {
        let s: Vec<f64> = scores.iter().map(|&v| v as f64).collect();
        let j = argmax_first(&s);
        let best = s.iter().copied().fold(f64::MIN, f64::max);
        prop_assert_eq!(s[j - 1], best);
        prop_assert!(s[..j - 1].iter().all(|&v| v < best));
    }

    #[test]
    fn disabled_mechanisms_reproduce_iid(seed in any::<u64>(), n in 1usize..300) {
        let dist = make_crossing_distribution(2, 1.0, 2.0).unwrap();
        let iid = sample_iid(&dist, n, seed);
        prop_assert_eq!(&iid, &sample_iid(&dist, n, seed));
        prop_assert_eq!(&iid, &sample_mixing(&dist, n, &MixingChainSpec::new(0.0).unwrap(), seed));
        prop_assert_eq!(&iid, &sample_drift(&dist, n, &DriftSchedule::new(&dist, 0.0).unwrap(), seed));
    }
}

#[test]
fn basis_size_matches_binomial() {
    for d in 1..=4usize {
        for k in 0..=4u32 {
            let expected = (1..=d).fold(1usize, |acc, i| acc * (k as usize + i) / i);
            assert_eq!(enumerate_basis(d, k).unwrap().size(), expected, "d={d} k={k}");
        }
    }
}
