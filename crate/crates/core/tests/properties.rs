mod support;

use proptest::prelude::*;

use mlcb::confidence::{bounds, interval_width, ConfidenceConfig, Scheme};
use mlcb::domain::{Outcome, Payload};
use mlcb::environments::{perturbed_game_means, ScalarUniform};
use mlcb::experts::{ogd_step, Expert, ExpertSpec, RegretBound};
use mlcb::meta::{select_advisor, select_training_set};
use mlcb::metrics::{topm_regret_increment, BudgetAudit};
use support::{bank_engine, enumerate_best_subset};

fn lcb_vector() -> impl Strategy<Value = (Vec<Option<f64>>, usize)> {
    (1usize..=8).prop_flat_map(|k| {
        (
            prop::collection::vec(prop::option::weighted(0.8, (-16i32..16).prop_map(|q| q as f64 / 8.0)), k),
            1..=k,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn selection_matches_enumeration((lcbs, m) in lcb_vector()) {
        let mut got = select_training_set(&lcbs, m).unwrap();
        got.sort();
        prop_assert_eq!(got, enumerate_best_subset(&lcbs, m));
    }

    #[test]
    fn selection_is_scale_invariant((lcbs, m) in lcb_vector(), ucb_q in prop::collection::vec(0i32..16, 8), c in 1i32..64) {
        let c = c as f64 / 4.0;
        let ucbs: Vec<Option<f64>> = lcbs.iter().zip(&ucb_q).map(|(l, q)| l.map(|_| *q as f64 / 8.0)).collect();
        let set = select_training_set(&lcbs, m).unwrap();
        let adv = select_advisor(&set, &ucbs).unwrap();
        let lcbs_c: Vec<Option<f64>> = lcbs.iter().map(|l| l.map(|v| v * c)).collect();
        let ucbs_c: Vec<Option<f64>> = ucbs.iter().map(|u| u.map(|v| v * c)).collect();
        let set_c = select_training_set(&lcbs_c, m).unwrap();
        prop_assert_eq!(&set_c, &set);
        prop_assert_eq!(select_advisor(&set_c, &ucbs_c).unwrap(), adv);
    }

    #[test]
    fn advisor_has_the_smallest_ucb_among_trained(ucbs in prop::collection::vec(prop::option::of(0.0f64..1.0), 1..8)) {
        let set: Vec<usize> = (0..ucbs.len()).collect();
        let adv = select_advisor(&set, &ucbs).unwrap();
        match ucbs[adv] {
            Some(u) => prop_assert!(ucbs.iter().flatten().all(|v| u <= *v)),
            None => prop_assert!(ucbs.iter().all(Option::is_none) && adv == 0),
        }
    }

    #[test]
    fn width_matches_closed_form(n in 1u64..10_000, beta in 0.0f64..5.0, loss in 0.0f64..1.0, k in 1usize..12, delta in 0.001f64..0.9) {
        let cfg = ConfidenceConfig::new(delta, k);
        let b = RegretBound::Power { beta, alpha: 0.5 };
        let w = bounds(loss, n, &b, &cfg).unwrap().width();
        prop_assert!((w - interval_width(n, &b, &cfg).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn standard_width_shrinks_with_n_and_grows_as_delta_falls(n in 1u64..100_000, d1 in 0.001f64..0.5, k in 1usize..12) {
        let b = RegretBound::Ucb1Anytime { arms: 2, constant: 1.0 };
        let cfg = ConfidenceConfig::new(d1, k);
        let a = interval_width(n, &b, &cfg).unwrap();
        let lcb_gap = |n| {
            let bd = bounds(0.5, n, &RegretBound::Zero, &cfg).unwrap();
            (0.5 - bd.lcb, bd.ucb - 0.5)
        };
        let (l1, u1) = lcb_gap(n);
        let (l2, u2) = lcb_gap(n + 1);
        prop_assert!(l2 <= l1 && u2 <= u1);
        let wider = interval_width(n, &b, &ConfidenceConfig::new(d1 / 2.0, k)).unwrap();
        prop_assert!(wider >= a);
    }

    #[test]
    fn self_normalized_bounds_bracket_the_running_loss(n in 1u64..100_000, loss in 0.0f64..1.0, k in 1usize..12) {
        let cfg = ConfidenceConfig::new(0.1, k).with_scheme(Scheme::SelfNormalized);
        let b = bounds(loss, n, &RegretBound::Zero, &cfg).unwrap();
        prop_assert!(b.lcb <= loss && loss <= b.ucb);
    }

    #[test]
    fn projection_stays_in_ball(w in prop::collection::vec(-3.0f64..3.0, 3), g in prop::collection::vec(-5.0f64..5.0, 3), eta in 0.0f64..2.0, r in 0.1f64..2.0) {
        let center = [0.0; 3];
        let next = ogd_step(&w, &g, eta, &center, r);
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(norm <= r * (1.0 + 1e-12));
        let again = ogd_step(&next, &[0.0; 3], eta, &center, r);
        for (a, b) in again.iter().zip(&next) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn history_is_append_only(xis in prop::collection::vec(0.0f64..1.0, 1..40), init in 0.0f64..1.0) {
        let env = ScalarUniform::new(0.0, 1.0, 0);
        let mut e = Expert::new(0, ExpertSpec::scalar_ogd(0.5, 0.5, init), 0).unwrap();
        let mut meter = Default::default();
        let mut seen: Vec<f64> = Vec::new();
        for (t, xi) in xis.iter().enumerate() {
            let outcome = Outcome { round: t as u64 + 1, payload: Payload::Scalar(*xi) };
            let played = e.realized_loss(&env, &outcome, &mut meter).unwrap();
            let before = e.state().w[0];
            e.train(&played, &outcome).unwrap();
            seen.push(before);
            prop_assert_eq!(e.history().len(), t + 1);
            for (i, s) in seen.iter().enumerate() {
                prop_assert_eq!(e.history().state(i)[0], *s);
            }
            prop_assert!((0.0..=1.0).contains(&e.state().w[0]));
        }
    }

    #[test]
    fn engine_keeps_budget_and_warms_up(
        means in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 1..4), 1..7),
        m_raw in 1usize..7,
        seed in any::<u64>(),
    ) {
        let k = means.len();
        let m = 1 + (m_raw - 1) % k;
        let mut engine = bank_engine(&means, seed, 0.1, 8.0, m);
        let mut audit = BudgetAudit::new(k, m);
        let warmup = k.div_ceil(m);
        for t in 1..=60 {
            let d = engine.step().unwrap();
            prop_assert!(d.training_set.len() <= m && d.training_set.contains(&d.advisor));
            audit.audit(&d, &engine.ledger().counts);
            if t == warmup {
                prop_assert!(engine.ledger().counts.iter().all(|&n| n >= 1));
            }
        }
        prop_assert!(audit.is_clean(), "{:?}", audit.violations);
    }

    #[test]
    fn topm_increments_are_non_negative(optima in prop::collection::vec(0.0f64..1.0, 1..8), pick in any::<u64>(), m_raw in 1usize..8) {
        let k = optima.len();
        let m = 1 + (m_raw - 1) % k;
        let mut set: Vec<usize> = (0..k).collect();
        let mut p = pick;
        for i in (1..k).rev() {
            set.swap(i, (p % (i as u64 + 1)) as usize);
            p /= i as u64 + 1;
        }
        set.truncate(m);
        prop_assert!(topm_regret_increment(&set, Some(&optima), m).unwrap() >= -1e-15);
    }

    #[test]
    fn perturbed_game_first_arms_differ_by_epsilon(k in 2usize..10, eps in 0.0f64..0.333, frac in 0.0f64..1.0, h in 0usize..10) {
        let gap = eps * frac;
        let h = h % k;
        let means = perturbed_game_means(Some(h), k, eps, gap).unwrap();
        for (i, row) in means.iter().enumerate() {
            if i != h {
                prop_assert!((row[0] - means[h][0] - eps).abs() < 1e-12);
            }
        }
        let null = perturbed_game_means(None, k, eps, gap).unwrap();
        prop_assert!(null.iter().all(|r| r == &null[0]));
    }
}
