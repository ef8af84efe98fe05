use faprop_core::bounds::{bound_curve, theorem2_bound};
use faprop_core::channels::{complementary, random_channel, stinespring, Channel};
use faprop_core::characteristics::{coherent_information, entropy_exchange, mutual_information};
use faprop_core::ensembles::{
    d0_distance, head_weight, holevo_of_ensemble, holevo_quantity_detailed, kantorovich_distance, privacy,
    solve_transport, truncate_ensemble, Ensemble,
};
use faprop_core::gibbs::f_g;
use faprop_core::qcore::random::{random_density, random_density_any_rank, random_simplex_point, seeded};
use faprop_core::qcore::{
    bures_distance, fidelity_norm, h2, partial_trace, purify, relative_entropy, trace_distance, von_neumann_entropy,
    DensityMatrix, Factor,
};
use faprop_core::spectra::{
    majorizes, mixture_grading, pairing_energy, tail_sum, truncate, Grading, Majorization, Spectrum,
};
use proptest::prelude::*;

fn finite_spectrum() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec(0.01f64..1.0, 1..12).prop_map(|w| {
        let s: f64 = w.iter().sum();
        Spectrum::finite_unsorted(w.into_iter().map(|x| x / s).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_renormalizes(spec in finite_spectrum(), r_frac in 0.0f64..1.0) {
        let n = spec.rank().unwrap();
        let r = 1 + ((n - 1) as f64 * r_frac) as usize;
        let t = truncate(&spec, r).unwrap();
        prop_assert_eq!(tail_sum(&t, r), 0.0);
        let c = 1.0 - spec.tail(r);
        for i in 1..=r {
            let expected = spec.eigenvalue(i) / c;
            prop_assert!((t.eigenvalue(i) - expected).abs() <= 1e-12 * expected);
        }
        prop_assert!(matches!(majorizes(&t, &spec, 64), Majorization::Majorizes));
    }

    #[test]
    fn geometric_tails_and_bounds(s in 0.05f64..0.9, r in 1usize..40) {
        let spec = Spectrum::geometric(s).unwrap();
        prop_assert!((spec.tail(r) - s.powi(r as i32)).abs() < 1e-13);
        let e = pairing_energy(&spec, &Grading::linear()).value.unwrap();
        prop_assert!((e - 1.0 / (1.0 - s)).abs() < 1e-9);
        let r0 = (e.floor() as usize) + 1;
        let rs: Vec<usize> = (r0..r0 + 30).collect();
        let curve = bound_curve(&spec, &Grading::linear(), &rs, 1.0, 2f64.ln(), 1.0).unwrap();
        prop_assert!(curve.iter().all(|b| b.y >= 0.0));
    }

    #[test]
    fn mixture_grading_energy(a in finite_spectrum(), b in finite_spectrum()) {
        let g = Grading::linear();
        let m = mixture_grading(&a, &g, &b, &g).unwrap();
        let ea = pairing_energy(&a, &g).value.unwrap();
        let eb = pairing_energy(&b, &g).value.unwrap();
        prop_assert!(m.mixture_energy <= 2.0 * (ea + eb) + 1e-9);
    }

    #[test]
    fn f_g_is_monotone_and_concave(levels in prop::collection::vec(0.0f64..5.0, 2..10), t in 0.05f64..0.95) {
        let mut levels = levels;
        levels.sort_by(f64::total_cmp);
        prop_assume!(levels[levels.len() - 1] - levels[0] > 0.1);
        let g = Grading::explicit(levels.clone()).unwrap();
        let mean = levels.iter().sum::<f64>() / levels.len() as f64;
        let lo = levels[0] + 0.02;
        let e1 = lo + (mean - lo) * t * 0.5;
        let e2 = lo + (mean - lo) * t;
        let (f1, f2) = (f_g(&g, e1).unwrap(), f_g(&g, e2).unwrap());
        let fm = f_g(&g, 0.5 * (e1 + e2)).unwrap();
        prop_assert!(f1.entropy <= f2.entropy + 1e-9);
        prop_assert!(fm.entropy >= 0.5 * (f1.entropy + f2.entropy) - 1e-7);
        prop_assert!(f2.entropy <= (levels.len() as f64).ln() + 1e-12);
        prop_assert!((f2.entropy - (f2.beta * e2 + f2.log_partition)).abs() < 1e-9);
    }

    #[test]
    fn state_distances(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = seeded(seed);
        let rho = random_density_any_rank(d, &mut rng);
        let sigma = random_density_any_rank(d, &mut rng);
        let t = trace_distance(&rho, &sigma).unwrap();
        let f = fidelity_norm(&rho, &sigma).unwrap();
        prop_assert!(f <= 1.0 + 1e-9);
        // Fuchs-van de Graaf
        prop_assert!(1.0 - f <= t + 1e-9);
        prop_assert!(t <= (1.0 - f * f).max(0.0).sqrt() + 1e-7);
        let b = bures_distance(&rho, &sigma).unwrap();
        prop_assert!((0.0..=2f64.sqrt() + 1e-12).contains(&b));
        prop_assert!(relative_entropy(&rho, &sigma).unwrap_or(f64::INFINITY) >= -1e-10);
        let h = von_neumann_entropy(&rho);
        prop_assert!(h >= -1e-12 && h <= (d as f64).ln() + 1e-12);
    }

    #[test]
    fn mixing_with_binary_entropy(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let mut rng = seeded(seed);
        let rho = random_density_any_rank(3, &mut rng);
        let sigma = random_density_any_rank(3, &mut rng);
        let mix = rho.mix(&sigma, p).unwrap();
        let avg = p * von_neumann_entropy(&rho) + (1.0 - p) * von_neumann_entropy(&sigma);
        let gap = von_neumann_entropy(&mix) - avg;
        prop_assert!(gap >= -1e-10);
        prop_assert!(gap <= h2(p).unwrap() + 1e-10);
    }

    #[test]
    fn purification_round_trip(seed in any::<u64>(), d in 1usize..6) {
        let rho = random_density_any_rank(d, &mut seeded(seed));
        let back = partial_trace(&purify(&rho).to_density(), (d, d), Factor::Second).unwrap();
        prop_assert!(trace_distance(&rho, &back).unwrap() < 1e-10);
    }

    #[test]
    fn channel_identities(seed in any::<u64>(), din in 2usize..5, dout in 2usize..5, k in 1usize..4) {
        prop_assume!(dout * k >= din);
        let phi = random_channel(din, dout, k, seed).unwrap();
        prop_assert!(phi.completeness_defect() < 1e-10);
        let mut rng = seeded(seed ^ 0x5eed);
        let rho = random_density_any_rank(din, &mut rng);
        let sigma = random_density_any_rank(din, &mut rng);
        // linearity
        let lhs = phi.apply(&rho.mix(&sigma, 0.3).unwrap()).unwrap();
        let rhs = phi.apply(&rho).unwrap().mix(&phi.apply(&sigma).unwrap(), 0.3).unwrap();
        prop_assert!(trace_distance(&lhs, &rhs).unwrap() < 1e-12);
        // output through the dilation
        let dil = stinespring(&phi);
        let via = DensityMatrix::new(dil.output(rho.matrix())).unwrap();
        prop_assert!((von_neumann_entropy(&via) - von_neumann_entropy(&phi.apply(&rho).unwrap())).abs() < 1e-9);
        // pure inputs: output and environment entropies coincide
        let psi = random_density(din, 1, &mut rng);
        let out = von_neumann_entropy(&phi.apply(&psi).unwrap());
        let env = von_neumann_entropy(&complementary(&phi).apply(&psi).unwrap());
        prop_assert!((out - env).abs() < 1e-8);
    }

    #[test]
    fn information_quantities(seed in any::<u64>(), din in 2usize..4, dout in 2usize..4, k in 1usize..4) {
        prop_assume!(dout * k >= din);
        let phi = random_channel(din, dout, k, seed).unwrap();
        let rho = random_density_any_rank(din, &mut seeded(seed.wrapping_add(1)));
        let h = von_neumann_entropy(&rho);
        let i = mutual_information(&phi, &rho).unwrap();
        let route = h + von_neumann_entropy(&phi.apply(&rho).unwrap()) - entropy_exchange(&phi, &rho).unwrap();
        prop_assert!((i - route).abs() < 1e-8);
        prop_assert!(i >= -1e-9 && i <= 2.0 * h + 1e-9);
        prop_assert!(coherent_information(&phi, &rho).unwrap().abs() <= h + 1e-9);
    }

    #[test]
    fn ensemble_invariants(seed in any::<u64>(), k in 2usize..7, n_frac in 0.0f64..1.0) {
        let mut rng = seeded(seed);
        let p = random_simplex_point(k, &mut rng);
        let mu = Ensemble::new(p.into_iter().map(|w| (w, random_density_any_rank(3, &mut rng))).collect()).unwrap();
        let n = 1 + ((k - 1) as f64 * n_frac) as usize;
        prop_assume!(head_weight(&mu, n) > 1e-9);
        let t = truncate_ensemble(&mu, n).unwrap();
        let d0 = d0_distance(&mu, &t).unwrap();
        prop_assert!((d0 - (1.0 - head_weight(&mu, n))).abs() < 1e-12);
        prop_assert!(kantorovich_distance(&mu, &t).unwrap() <= d0 + 1e-10);
        let phi = random_channel(3, 3, 2, seed).unwrap();
        let rec = holevo_quantity_detailed(&phi, &mu).unwrap();
        prop_assert!((rec.relative_entropy_form - rec.entropy_form).abs() < 1e-8);
        prop_assert!(rec.relative_entropy_form <= holevo_of_ensemble(&mu).unwrap() + 1e-9);
        prop_assert!(privacy(&phi, &mu).unwrap() <= rec.relative_entropy_form + 1e-9);
    }

    #[test]
    fn transport_symmetry(seed in any::<u64>(), m in 1usize..6, n in 1usize..6) {
        let mut rng = seeded(seed);
        let a = random_simplex_point(m, &mut rng);
        let b = random_simplex_point(n, &mut rng);
        let cost: Vec<f64> = (0..m * n).map(|_| rand::Rng::gen_range(&mut rng, 0.0..1.0)).collect();
        let mut transposed = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                transposed[j * m + i] = cost[i * n + j];
            }
        }
        let ab = solve_transport(&a, &b, &cost).unwrap().cost;
        let ba = solve_transport(&b, &a, &transposed).unwrap().cost;
        prop_assert!((ab - ba).abs() < 1e-10);
        let min_cost = cost.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(ab >= min_cost - 1e-12);
    }
}

#[test]
fn output_entropy_gap_below_bound_on_random_rank_states() {
    // random states whose spectrum is a truncated geometric law, in random bases
    let spec = Spectrum::geometric(0.4).unwrap();
    let grad = Grading::linear();
    for seed in 0..30u64 {
        let mut rng = seeded(seed);
        let mut p = spec.head(5);
        p.push(spec.tail(5));
        let rho = faprop_core::qcore::random::random_state_with_spectrum(&p, &mut rng);
        let phi = random_channel(6, 3, 2, seed).unwrap();
        let full = faprop_core::characteristics::output_entropy(&phi, &rho).unwrap();
        for r in 2..6 {
            let b = match theorem2_bound(&spec, &grad, r, 1.0, 2f64.ln(), 1.0) {
                Ok(b) => b,
                Err(_) => continue,
            };
            let (rho_r, _) = faprop_core::ensembles::truncate_state(&rho, r).unwrap();
            let gap = (faprop_core::characteristics::output_entropy(&phi, &rho_r).unwrap() - full).abs();
            assert!(gap <= b.y, "seed {seed} r {r}");
        }
    }
}

#[test]
fn constant_channel_has_no_holevo_information() {
    let mut rng = seeded(3);
    let sigma = random_density(2, 2, &mut rng);
    let c = Channel::constant(&sigma, 3);
    let mu = Ensemble::new(vec![
        (0.2, DensityMatrix::basis_state(3, 0)),
        (0.8, random_density(3, 2, &mut rng)),
    ])
    .unwrap();
    assert!(holevo_quantity_detailed(&c, &mu).unwrap().relative_entropy_form.abs() < 1e-12);
}
