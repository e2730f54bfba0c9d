use locstat::chains::{glauber_step_ising, hardcore_step, HardcoreState, IsingState};
use locstat::diagnostics::{conditional_score_expectation, score_average, summarize_series, ObservableSpec};
use locstat::exact::{
    divergences, entropy_dissipation, enumerate_ising, glauber_kernel, mlsi_lower_bound, ExactTable, StateKind,
};
use locstat::experiments::oracle::{kernel_identity_residual, random_ising, random_perturbation, random_triangle_free};
use locstat::models::{Graph, InteractionOperator};
use locstat::rng::stream_rng;
use proptest::prelude::*;

fn spins(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1.0 } else { -1.0 }), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn abs_correlation_is_flip_invariant(
        (x, v) in (1usize..40).prop_flat_map(|n| (spins(n), prop::collection::vec(-2.0f64..2.0, n)))
    ) {
        let j = InteractionOperator::zeros(x.len());
        let obs = ObservableSpec::abs_correlation(v);
        let flipped: Vec<f64> = x.iter().map(|s| -s).collect();
        let a = obs.eval(&IsingState::new(&j, x));
        let b = obs.eval(&IsingState::new(&j, flipped));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn summary_windows_are_consistent(
        series in prop::collection::vec(-10.0f64..10.0, 1..300),
        burn in 0.0f64..0.95,
    ) {
        let s = summarize_series("x", &series, burn).unwrap();
        prop_assert_eq!(s.burn_in + s.n_samples, series.len());
        let full = series.iter().sum::<f64>() / series.len() as f64;
        let tail = &series[s.burn_in..];
        let post = tail.iter().sum::<f64>() / tail.len() as f64;
        prop_assert!((s.uniform_time_mean - full).abs() <= 1e-9);
        prop_assert!((s.mean - post).abs() <= 1e-9);
        prop_assert!(s.var >= 0.0);
    }

    #[test]
    fn score_average_is_bounded_by_set_size(seed in any::<u64>(), n in 3usize..60, p in 0.02f64..0.6) {
        let mut rng = stream_rng(seed, 0);
        let g = random_triangle_free(n, p, &mut rng);
        let mut state = HardcoreState::empty(n);
        for _ in 0..20 * n {
            hardcore_step(&g, &mut state, &mut rng);
        }
        prop_assert!(state.is_consistent(&g));
        let bound = 2.0 * g.max_degree() as f64 / n as f64 * state.size() as f64;
        prop_assert!(score_average(&g, &state) <= bound + 1e-9);
    }

    #[test]
    fn conditional_score_exceeds_half_log_degree(d in 4u32..5000, k in 0u32..10_000) {
        let df = d as f64;
        prop_assert!(conditional_score_expectation(k, df) >= 0.5 * df.ln());
    }

    #[test]
    fn ising_caches_track_flips(seed in any::<u64>(), n in 2usize..12, flips in prop::collection::vec(0usize..64, 1..200)) {
        let mut rng = stream_rng(seed, 1);
        let model = random_ising(n, &mut rng);
        let mut state = IsingState::random(&model.j, &mut rng);
        for f in flips {
            state.flip(&model.j, f % n);
        }
        prop_assert!(state.cache_drift(&model.j) <= 1e-10);
        for _ in 0..500 {
            glauber_step_ising(&model, &mut state, &mut rng);
        }
        prop_assert!(state.cache_drift(&model.j) <= 1e-10);
    }

    #[test]
    fn divergence_inequalities(seed in any::<u64>(), n in 1usize..7, sigma in 0.05f64..3.0) {
        let mut rng = stream_rng(seed, 2);
        let pi = enumerate_ising(&random_ising(n, &mut rng)).unwrap();
        let nu = random_perturbation(&pi, sigma, &mut rng);
        let d = divergences(&nu, &pi).unwrap();
        prop_assert!(d.kl >= 0.0 && d.skl >= d.kl);
        prop_assert!((0.0..=1.0).contains(&d.tv));
        prop_assert!(d.hellinger <= d.kl + 1e-12);
        // Pinsker
        prop_assert!(2.0 * d.tv * d.tv <= d.kl + 1e-12);
        prop_assert!((d.ent - d.kl).abs() <= 1e-10 * (1.0 + d.kl));
    }

    #[test]
    fn glauber_kernels_are_reversible(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = stream_rng(seed, 3);
        let pi = enumerate_ising(&random_ising(n, &mut rng)).unwrap();
        let k = glauber_kernel(&pi).unwrap();
        prop_assert!(kernel_identity_residual(&k) <= 1e-12);
    }

    #[test]
    fn mlsi_certificate_bounds_dissipation(seed in any::<u64>(), n in 1usize..6, sigma in 0.1f64..3.0) {
        let mut rng = stream_rng(seed, 4);
        let pi = enumerate_ising(&random_ising(n, &mut rng)).unwrap();
        let k = glauber_kernel(&pi).unwrap();
        let c = mlsi_lower_bound(&k).unwrap();
        let nu = random_perturbation(&pi, sigma, &mut rng);
        let f: Vec<f64> = nu.probs().iter().zip(pi.probs()).map(|(a, b)| a / b).collect();
        let ent = divergences(&nu, &pi).unwrap().ent;
        prop_assert!(entropy_dissipation(&k, &f) >= c * ent - 1e-12);
    }

    #[test]
    fn edge_list_round_trip(seed in any::<u64>(), n in 1usize..50, p in 0.0f64..0.5) {
        let mut rng = stream_rng(seed, 5);
        let g = random_triangle_free(n, p, &mut rng);
        let back = Graph::from_edge_list(&g.to_edge_list(), Some(n)).unwrap();
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }
}

#[test]
fn uniform_table_has_zero_divergence() {
    let pi = ExactTable::uniform(3, StateKind::Spins, (0..8).collect()).unwrap();
    let d = divergences(&pi, &pi).unwrap();
    assert_eq!((d.kl, d.tv), (0.0, 0.0));
    assert!(d.hellinger.abs() < 1e-15);
}
