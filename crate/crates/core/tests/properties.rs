use batopt::analysis::{diversity, rank_sum_test, summarize, wilcoxon_rank_sum, wilcoxon_rank_sum_normal, xpl_xpt, RankSumMethod};
use batopt::assignment::{assignment_cost, brute_force, decode_keys, CostMatrix};
use batopt::benchmarks::{self, rastrigin, sphere};
use batopt::optimizers::{mba_candidate_with_frequency, mba_step, Optimizer};
use batopt::swarm::{draw_frequency, AlgoParams, BatState, Bounds, IncumbentBest};
use batopt::{Algorithm, RngStream, RunConfig};
use proptest::prelude::*;

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true))
}

fn key() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        Just(1.0),
        Just(-0.0),
        Just(f64::MAX),
        Just(f64::MIN),
        0.0..1.0f64,
        -1e300..1e300f64,
    ]
}

proptest! {
    #[test]
    fn decoded_keys_form_a_permutation(keys in prop::collection::vec(key(), 1..24)) {
        let perm = decode_keys(&keys).unwrap();
        prop_assert_eq!(perm.len(), keys.len());
        prop_assert!(is_permutation(&perm));
    }

    #[test]
    fn decoding_ignores_increasing_transforms(
        keys in prop::collection::vec(-50i32..50, 1..16),
        slope in 1i32..1000,
        shift in -1000i32..1000,
    ) {
        let raw: Vec<f64> = keys.iter().map(|&k| k as f64).collect();
        let moved: Vec<f64> = raw.iter().map(|k| slope as f64 * k + shift as f64).collect();
        prop_assert_eq!(decode_keys(&raw).unwrap(), decode_keys(&moved).unwrap());
    }

    #[test]
    fn diversity_is_translation_invariant(
        pts in prop::collection::vec(prop::collection::vec(-100.0..100.0f64, 3), 2..12),
        shift in prop::collection::vec(-1e3..1e3f64, 3),
    ) {
        let moved: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| p.iter().zip(&shift).map(|(x, s)| x + s).collect())
            .collect();
        let a = diversity(&pts).unwrap();
        let b = diversity(&moved).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn diversity_scales_linearly(
        pts in prop::collection::vec(prop::collection::vec(-100.0..100.0f64, 4), 2..12),
        exp in -8i32..8,
        s in 0.01..100.0f64,
    ) {
        let base = diversity(&pts).unwrap();
        let pow2 = 2f64.powi(exp);
        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|x| x * pow2).collect()).collect();
        prop_assert_eq!(diversity(&scaled).unwrap(), base * pow2);

        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|x| x * s).collect()).collect();
        let got = diversity(&scaled).unwrap();
        prop_assert!((got - base * s).abs() <= 1e-12 * (base * s).max(1e-300) * 16.0);
    }

    #[test]
    fn exploration_and_exploitation_sum_to_100(divs in prop::collection::vec(0.0..1e6f64, 1..64)) {
        let series = xpl_xpt(&divs).unwrap();
        for (x, t) in series.xpl.iter().zip(&series.xpt) {
            prop_assert!((x + t - 100.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn rank_sum_is_symmetric(
        a in prop::collection::vec((-20i32..20).prop_map(|v| v as f64 / 4.0), 3..15),
        b in prop::collection::vec((-20i32..20).prop_map(|v| v as f64 / 4.0), 3..15),
    ) {
        let ab = wilcoxon_rank_sum(&a, &b).unwrap();
        let ba = wilcoxon_rank_sum(&b, &a).unwrap();
        prop_assert_eq!(ab.to_bits(), ba.to_bits());
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn exact_and_normal_paths_agree(seed in any::<u64>(), n1 in 8usize..=10, n2 in 8usize..=10) {
        let mut rng = RngStream::from_seed(seed);
        let mut pool: Vec<f64> = (0..n1 + n2).map(|_| rng.unit()).collect();
        pool.sort_by(f64::total_cmp);
        pool.dedup();
        prop_assume!(pool.len() == n1 + n2);
        let mut rng = RngStream::from_seed(seed ^ 0x9e37);
        let (a, b): (Vec<f64>, Vec<f64>) = {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for v in pool {
                if (rng.unit() < 0.5 && a.len() < n1) || b.len() == n2 { a.push(v) } else { b.push(v) }
            }
            (a, b)
        };
        let exact = rank_sum_test(&a, &b).unwrap();
        prop_assert_eq!(exact.method, RankSumMethod::Exact);
        let normal = wilcoxon_rank_sum_normal(&a, &b).unwrap();
        prop_assert!((exact.p_value - normal).abs() <= 0.02, "exact {} normal {}", exact.p_value, normal);
    }

    #[test]
    fn summary_ignores_order(sample in prop::collection::vec(-1e6..1e6f64, 2..40), seed in any::<u64>()) {
        let mut shuffled = sample.clone();
        let mut rng = RngStream::from_seed(seed);
        for i in (1..shuffled.len()).rev() {
            let j = (rng.unit() * (i + 1) as f64) as usize;
            shuffled.swap(i, j.min(i));
        }
        prop_assert_eq!(summarize(&sample).unwrap(), summarize(&shuffled).unwrap());
    }

    #[test]
    fn frequency_stays_in_range(beta in 0.0..=1.0f64, lo in -10.0..10.0f64, width in 1e-6..10.0f64) {
        let hi = lo + width;
        let f = draw_frequency(beta, lo, hi).unwrap();
        prop_assert!(f >= lo && f <= hi, "{} not in [{}, {}]", f, lo, hi);
    }

    #[test]
    fn padding_with_zeros_keeps_separable_values(
        x in prop::collection::vec(-5.12..5.12f64, 1..20),
        pad in 1usize..20,
    ) {
        let mut padded = x.clone();
        padded.extend(std::iter::repeat_n(0.0, pad));
        prop_assert_eq!(sphere(&padded), sphere(&x));
        prop_assert_eq!(rastrigin(&padded), rastrigin(&x));
    }

    #[test]
    fn incumbent_clone_is_a_fixed_point(
        x in prop::collection::vec(-100.0..100.0f64, 1..12),
        v_seed in any::<u64>(),
        f_star in 0.0..2.0f64,
    ) {
        let mut rng = RngStream::from_seed(v_seed);
        let v: Vec<f64> = x.iter().map(|_| rng.uniform(-50.0, 50.0)).collect();
        let incumbent = IncumbentBest { x_star: x.clone(), fitness_star: 0.0, f_star, v_star: v.clone() };
        let bat = bat_at(x.clone(), v, f_star);
        let (_, position) = mba_step(&bat, &incumbent, f_star).unwrap();
        prop_assert_eq!(bits(&position), bits(&x));
    }

    #[test]
    fn mba_candidate_is_clamped_reconstruction(
        seed in any::<u64>(),
        dim in 1usize..10,
        freq in 0.0..2.0f64,
    ) {
        let mut rng = RngStream::from_seed(seed);
        let mut vec_in = |lo: f64, hi: f64| (0..dim).map(|_| rng.uniform(lo, hi)).collect::<Vec<f64>>();
        let bat = bat_at(vec_in(-10.0, 10.0), vec_in(-30.0, 30.0), 1.0);
        let incumbent = IncumbentBest { x_star: vec_in(-10.0, 10.0), fitness_star: 0.0, f_star: 1.3, v_star: vec_in(-30.0, 30.0) };
        let bounds = Bounds::uniform(dim, -10.0, 10.0).unwrap();
        let cand = mba_candidate_with_frequency(&bat, &incumbent, freq, &bounds).unwrap();
        let rebuilt: Vec<f64> = incumbent
            .x_star
            .iter()
            .zip(&cand.velocity)
            .map(|(xs, v)| (xs + v * incumbent.f_star).clamp(-10.0, 10.0))
            .collect();
        prop_assert_eq!(bits(&cand.position), bits(&rebuilt));
    }
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn bat_at(position: Vec<f64>, velocity: Vec<f64>, frequency: f64) -> BatState {
    BatState {
        position,
        velocity,
        frequency,
        loudness: 1.0,
        initial_loudness: 1.0,
        pulse_rate: 0.5,
        base_pulse_rate: 0.5,
        acceptance_count: 0,
        fitness: 0.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn swarm_invariants_hold_every_iteration(
        seed in any::<u64>(),
        mba in any::<bool>(),
        self_improvement in any::<bool>(),
        objective in prop::sample::select(vec!["F1", "F5", "F7", "F9", "F10", "F14", "F17", "F21"]),
    ) {
        let algorithm = if mba { Algorithm::Mba } else { Algorithm::Ba };
        let mut config = RunConfig::new(algorithm, objective);
        config.seed = seed;
        config.population = 12;
        config.iterations = 40;
        if self_improvement {
            config.params.acceptance_mode = "self-improvement".parse().unwrap();
        }
        let dim = match benchmarks::lookup(objective, None).unwrap().dimension() {
            30 => Some(6),
            _ => None,
        };
        let spec = benchmarks::lookup(objective, dim).unwrap();
        let bounds = spec.bounds().clone();
        let params: AlgoParams = config.params.clone();
        let mut opt = Optimizer::new(&config, spec).unwrap();
        let mut last_pulse: Vec<f64> = opt.swarm().bats.iter().map(|b| b.pulse_rate).collect();
        while !opt.is_done() {
            opt.step().unwrap();
            for (i, bat) in opt.swarm().bats.iter().enumerate() {
                prop_assert!(bounds.contains(&bat.position));
                prop_assert!(bat.frequency >= params.f_min && bat.frequency <= params.f_max);
                let expected = params.alpha.powi(bat.acceptance_count as i32) * bat.initial_loudness;
                prop_assert!((bat.loudness - expected).abs() <= 1e-12 * expected.max(f64::MIN_POSITIVE));
                prop_assert!(bat.pulse_rate <= bat.base_pulse_rate);
                if bat.acceptance_count > 0 {
                    prop_assert!(bat.pulse_rate >= last_pulse[i] || last_pulse[i] == bat.base_pulse_rate);
                }
                last_pulse[i] = bat.pulse_rate;
            }
        }
        let history = opt.history().to_vec();
        prop_assert!(history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn same_seed_same_swarm(seed in any::<u64>(), mba in any::<bool>()) {
        let algorithm = if mba { Algorithm::Mba } else { Algorithm::Ba };
        let mut config = RunConfig::new(algorithm, "F7");
        config.seed = seed;
        config.population = 8;
        config.iterations = 15;
        let snapshot = || {
            let spec = benchmarks::lookup("F7", Some(5)).unwrap();
            let mut opt = Optimizer::new(&config, spec).unwrap();
            let mut states = vec![opt.swarm().to_json()];
            while !opt.is_done() {
                opt.step().unwrap();
                states.push(opt.swarm().to_json());
            }
            states
        };
        prop_assert_eq!(snapshot(), snapshot());
    }
}

#[test]
fn unimodal_argmin_beats_random_points() {
    let mut rng = RngStream::from_seed(7);
    for name in ["F1", "F2", "F3", "F4", "F5", "F6"] {
        let spec = benchmarks::lookup(name, None).unwrap();
        let argmin = spec.known_argmin().expect("argmin").to_vec();
        let at_min = spec.evaluate(&argmin, &mut rng).unwrap();
        for _ in 0..10_000 {
            let x = spec.bounds().sample(&mut rng);
            let v = spec.evaluate(&x, &mut rng).unwrap();
            assert!(at_min < v, "{name}: {at_min} not below {v}");
        }
    }
}

#[test]
fn known_argmins_evaluate_to_known_minima() {
    let mut rng = RngStream::from_seed(0);
    for entry in benchmarks::Registry::standard().entries() {
        let spec = entry.default_spec();
        let (Some(x), Some(min)) = (spec.known_argmin(), spec.known_min()) else {
            continue;
        };
        if spec.is_stochastic() {
            continue;
        }
        let v = spec.evaluate(x, &mut rng).unwrap();
        assert!((v - min).abs() <= 1e-9, "{}: {v} vs {min}", spec.name());
    }
}

#[test]
fn schwefel_minimum_at_thirty_dimensions() {
    let spec = benchmarks::lookup("F8", Some(30)).unwrap();
    let x = vec![benchmarks::SCHWEFEL_ARGMIN; 30];
    let v = spec.evaluate(&x, &mut RngStream::from_seed(0)).unwrap();
    assert!((v - -12569.4866).abs() < 1e-3, "{v}");
}

/// Heap's algorithm, kept apart from the lexicographic enumeration used by
/// the library.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

#[test]
fn brute_force_matches_independent_enumeration() {
    let mut rng = RngStream::from_seed(2024);
    for _ in 0..50 {
        let mut cells: Vec<f64> = (1..=25).map(|v| v as f64 * 7.0).collect();
        for i in (1..cells.len()).rev() {
            let j = ((rng.unit() * (i + 1) as f64) as usize).min(i);
            cells.swap(i, j);
        }
        let rows: Vec<Vec<f64>> = cells.chunks(5).map(|c| c.to_vec()).collect();
        let perms = all_permutations(5);
        assert_eq!(perms.len(), 120);
        let (oracle_perm, oracle_total) = perms
            .iter()
            .map(|p| (p.clone(), p.iter().enumerate().map(|(i, &j)| rows[i][j]).sum::<f64>()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
            .unwrap();
        let m = CostMatrix::new(rows).unwrap();
        let best = brute_force(&m).unwrap();
        assert_eq!(best.total_seconds, oracle_total);
        assert_eq!(best.perm, oracle_perm);
        assert_eq!(assignment_cost(&m, &best.perm).unwrap(), best.total_seconds);
    }
}
