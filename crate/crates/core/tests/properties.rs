use proptest::prelude::*;
use sns_core::continuous::simulate_continuous;
use sns_core::discrete::kernels::{sample_k_harmonic, sample_k_logarithmic};
use sns_core::discrete::simulate;
use sns_core::events::FluxCounter;
use sns_core::measure::{
    marginal_pmf_table, mixture_density_discrete, moment_profile, sample_exact_discrete, sample_ordered_profile,
    MixtureSpec,
};
use sns_core::occupation::{stats_from_samples, Binning};
use sns_core::run::RunOptions;
use sns_core::verify::{check_stationarity_direct_discrete, check_telescoping_continuous, check_telescoping_discrete, TelescopingMethod};
use sns_core::{ChainParams, DiscreteConfig, RngContract};

fn betas() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..0.8, 0.0f64..0.15).prop_map(|(a, d)| (a, (a + d).min(0.9)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn particles_are_conserved(n in 1usize..6, (ba, bb) in betas(), seed in any::<u64>()) {
        let p = ChainParams::discrete(n, ba, bb).unwrap();
        let mut flux = FluxCounter::new(n, 0.0);
        let run = simulate(&p, None, &RunOptions::new(50.0).burn_in(0.0), &mut RngContract::new(seed).stream(0), &mut [&mut flux]).unwrap();
        prop_assert_eq!(run.final_config.total() as f64, flux.net_a() + flux.net_b());
    }

    #[test]
    fn energy_is_conserved(n in 1usize..5, t_a in 0.5f64..2.0, gap in 0.0f64..2.0, seed in any::<u64>()) {
        let p = ChainParams::continuous(n, t_a, t_a + gap).unwrap();
        let mut flux = FluxCounter::new(n, 0.0);
        let (run, _) = simulate_continuous(&p, 1e-4, None, &RunOptions::new(5.0).burn_in(0.0), &mut RngContract::new(seed).stream(0), &mut [&mut flux]).unwrap();
        let total = run.final_config.total();
        prop_assert!((total - flux.net_a() - flux.net_b()).abs() <= 1e-9 * (1.0 + flux.injected_a + flux.injected_b));
    }

    #[test]
    fn jump_sizes_stay_in_range(occ in 1u64..5000, beta in 0.01f64..0.99, seed in any::<u64>()) {
        let mut rng = RngContract::new(seed).stream(0);
        let k = sample_k_harmonic(occ, &mut rng);
        prop_assert!((1..=occ).contains(&k));
        prop_assert!(sample_k_logarithmic(beta, &mut rng) >= 1);
    }

    #[test]
    fn profiles_are_ordered_and_bounded(n in 1usize..8, (ba, bb) in betas(), seed in any::<u64>()) {
        let spec = MixtureSpec::discrete(ChainParams::discrete(n, ba, bb).unwrap());
        let (lo, hi) = spec.interval();
        let m = sample_ordered_profile(&spec, &mut RngContract::new(seed).stream(0)).into_vec();
        prop_assert!(m.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(m.iter().all(|v| *v >= lo && *v <= hi));
    }

    #[test]
    fn covariances_are_nonnegative(n in 2usize..7, (ba, bb) in betas()) {
        let spec = MixtureSpec::discrete(ChainParams::discrete(n, ba, bb).unwrap());
        let cov = moment_profile(&spec).covariances;
        for x in 0..n {
            for y in 0..n {
                prop_assert!(cov[x][y] >= 0.0);
                prop_assert!((cov[x][y] - cov[y][x]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn marginal_is_a_distribution(n in 1usize..4, x_frac in 0.0f64..1.0, (ba, bb) in betas()) {
        let spec = MixtureSpec::discrete(ChainParams::discrete(n, ba, bb).unwrap());
        let x = 1 + ((n as f64 - 1.0) * x_frac).round() as usize;
        // the tail beyond 400 is below (rho_B / (1 + rho_B))^400 < 1e-10
        let pmf = marginal_pmf_table(&spec, x, 400, 1e-13).unwrap();
        prop_assert!(pmf.iter().all(|p| *p >= 0.0));
        prop_assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let mean: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        prop_assert!((mean - moment_profile(&spec).means[x - 1]).abs() < 1e-8);
    }

    #[test]
    fn density_is_symmetric_only_at_equilibrium(rho in 0.2f64..3.0, a in 0u64..6, b in 0u64..6) {
        let spec = MixtureSpec::discrete(ChainParams::from_densities(2, rho, rho).unwrap());
        let ab = mixture_density_discrete(&spec, &DiscreteConfig::new(vec![a, b]), 1e-14).unwrap().value;
        let ba = mixture_density_discrete(&spec, &DiscreteConfig::new(vec![b, a]), 1e-14).unwrap().value;
        prop_assert!((ab - ba).abs() <= 1e-14);
    }

    #[test]
    fn telescoping_vanishes_at_random_points(
        (ba, bb) in betas(),
        l in proptest::collection::vec(0.0f64..0.99, 2),
        t in proptest::collection::vec(-2.0f64..0.45, 2),
    ) {
        let p = ChainParams::discrete(2, ba, bb).unwrap();
        let r = check_telescoping_discrete(&p, &l, 1e-8, TelescopingMethod::Quadrature).unwrap();
        prop_assert!(r.passed(), "{:?}", r);
        let c = ChainParams::continuous(2, 1.0, 2.0).unwrap();
        let r = check_telescoping_continuous(&c, &t, 1e-8, TelescopingMethod::Quadrature).unwrap();
        prop_assert!(r.passed(), "{:?}", r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn single_site_balance_holds(rho_a in 0.2f64..2.0, gap in 0.0f64..2.0) {
        let p = ChainParams::from_densities(1, rho_a, rho_a + gap).unwrap();
        let r = check_stationarity_direct_discrete(&p, 300, 1e-8).unwrap();
        prop_assert!(r.passed(), "{:?}", r);
    }

    #[test]
    fn merging_replicas_matches_pooling(seed in any::<u64>(), split in 1usize..99) {
        let spec = MixtureSpec::discrete(ChainParams::discrete(3, 0.4, 0.7).unwrap());
        let mut rng = RngContract::new(seed).stream(0);
        let draws: Vec<Vec<f64>> = (0..100)
            .map(|_| sample_exact_discrete(&spec, &mut rng).unwrap().eta.iter().map(|v| *v as f64).collect())
            .collect();
        let part = |s: &[Vec<f64>]| stats_from_samples(3, Binning::Integer, s.iter().map(|d| d.as_slice()), s.len(), 4).unwrap();
        let whole = part(&draws);
        let mut a = part(&draws[..split]);
        let mut b = part(&draws[split..]);
        b.series[0].stream = 1;
        a.merge(&b).unwrap();
        for x in 0..3 {
            prop_assert!((a.mean(x) - whole.mean(x)).abs() < 1e-12);
            prop_assert!((a.variance(x) - whole.variance(x)).abs() < 1e-10);
        }
        prop_assert!((a.covariance(0, 2).unwrap() - whole.covariance(0, 2).unwrap()).abs() < 1e-10);
    }
}
