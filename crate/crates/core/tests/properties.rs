use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steerlab_core::criteria::{Criterion, SteeringVerdict, VerdictSource};
use steerlab_core::discrete::{
    entropic_steering_discrete, spin_inferred_std, werner_closed_form, SpinObservable, TwoQubitState,
};
use steerlab_core::lhs_oracle::{micro_invariants_hold, random_model, sum_slack, LhsDomain, SLACK_TOLERANCE};

proptest! {
    #[test]
    fn lhs_models_never_violate(seed in any::<u64>(), qubit in any::<bool>()) {
        let domain = if qubit { LhsDomain::Qubit } else { LhsDomain::Cv };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, t1, t2) = random_model(&mut rng, domain);
        prop_assert!(sum_slack(&model, t1, t2) >= -SLACK_TOLERANCE);
        prop_assert!(micro_invariants_hold(&model, t1, t2));
    }

    #[test]
    fn relabeling_alice_keeps_inferred_std(p in 0.0f64..=1.0, a in 0.0f64..6.3, b in 0.0f64..6.3) {
        let rho = TwoQubitState::werner(p).unwrap();
        let est = SpinObservable::xz_circle(a).spin_half();
        let flipped = SpinObservable { matrix: -est.matrix, label: "-A".into() };
        let target = SpinObservable::xz_circle(b).spin_half();
        let x = spin_inferred_std(&rho, &target, &est).unwrap();
        let y = spin_inferred_std(&rho, &target, &flipped).unwrap();
        prop_assert!((x - y).abs() < 1e-14);
    }

    #[test]
    fn werner_entropies_match_closed_form(p in 0.0f64..=1.0) {
        let v = entropic_steering_discrete(&TwoQubitState::werner(p).unwrap());
        prop_assert!((v.lhs - werner_closed_form::entropic_sum_bits(p)).abs() < 1e-12);
    }

    #[test]
    fn steerable_iff_ratio_exceeds_one(lhs in 0.01f64..10.0, rhs in 0.01f64..10.0) {
        let lo = SteeringVerdict::lower_bounded(Criterion::Sum, lhs, rhs, VerdictSource::Analytic);
        prop_assert_eq!(lo.steerable, lo.ratio > 1.0 + 1e-12);
        let up = SteeringVerdict::upper_bounded(Criterion::Chsh, lhs, rhs, VerdictSource::MatrixAlgebra);
        prop_assert_eq!(up.steerable, up.ratio > 1.0 + 1e-12);
    }
}
