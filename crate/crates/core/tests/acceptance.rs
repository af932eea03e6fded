//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (visible with `--nocapture`).
//!
//! Run with `cargo test -p nlgames-core --test acceptance`.

use nlgames_core::analysis::{
    self, fair_advantage, gisin_curve, gisin_grid, povm_singlet_scan, ScanConfig, SearchConfig,
};
use nlgames_core::game::{average_payoffs, find_pure_nash, GameParams, Player, UtilityTable};
use nlgames_core::nsbox::{
    self, canonical_from_box, chsh, chsh_all_symmetries, is_local, max_chsh_symmetry,
    ns_vertices, payoffs_closed_form, pr_box, pr_d_mixture,
};
use nlgames_core::quantum::{
    box_from_strategy, chsh_max_pure, closed_form_box, example_strategy, random_direction,
    singlet_chsh_strategy, MeasDirection, QuantumStrategy, TwoQubitState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got}, want {want} (tol {tol:e})"
    );
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[test]
fn criterion_01_pure_payoff_table_reproduction() {
    // independent symbolic oracle for the 4x4 grid, row = Alice, col = Bob
    fn symbolic(kappa: f64, tau: f64) -> [[(f64, f64); 4]; 4] {
        let half_k = 3.0 / 16.0 + kappa / 2.0;
        let half_t = 3.0 / 16.0 + tau / 2.0;
        let quarter = 3.0 / 16.0 + (kappa + tau) / 4.0;
        [
            [(0.75, 0.75 * kappa), (0.1875, 0.1875), (11.0 / 16.0, half_k), (0.25, kappa / 4.0)],
            [(0.1875, 0.1875), (0.375, 0.75 * tau), (0.125, tau / 4.0), (7.0 / 16.0, half_t)],
            [(11.0 / 16.0, half_k), (0.125, tau / 4.0), (0.25, kappa / 4.0), (9.0 / 16.0, quarter)],
            [(0.25, kappa / 4.0), (7.0 / 16.0, half_t), (9.0 / 16.0, quarter), (0.125, tau / 4.0)],
        ]
    }

    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..20 {
        let kappa = rng.gen_range(1e-3..=2.0);
        let tau = rng.gen_range(1e-3..=2.0);
        let grid = nlgames_core::game::pure_payoff_table(&GameParams::new(kappa, tau).unwrap());
        let want = symbolic(kappa, tau);
        for i in 0..4 {
            for j in 0..4 {
                assert_close(grid[i][j].f_a, want[i][j].0, 1e-12, "F_A");
                assert_close(grid[i][j].f_b, want[i][j].1, 1e-12, "F_B");
            }
        }
    }
    println!("acceptance 01 (payoff table): PASS - 20 random (kappa,tau), 16 entries at 1e-12");
}

#[test]
fn criterion_02_equilibrium_structure() {
    let report = find_pure_nash(&GameParams::new(0.5, 1.0).unwrap(), 1e-9).unwrap();
    assert_eq!(report.equilibria.len(), 3);
    let mut pairs: Vec<(f64, f64)> = report
        .equilibria
        .iter()
        .map(|e| (e.payoffs.f_a, e.payoffs.f_b))
        .collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let want = [
        (7.0 / 16.0, 11.0 / 16.0),
        (9.0 / 16.0, 9.0 / 16.0),
        (11.0 / 16.0, 7.0 / 16.0),
    ];
    for (got, want) in pairs.iter().zip(want.iter()) {
        assert_close(got.0, want.0, 1e-15, "equilibrium F_A");
        assert_close(got.1, want.1, 1e-15, "equilibrium F_B");
    }

    let report = find_pure_nash(&GameParams::new(2.0, 3.0).unwrap(), 1e-9).unwrap();
    assert_eq!(report.equilibria.len(), 3);
    for e in &report.equilibria {
        assert!(e.payoffs.f_b > e.payoffs.f_a, "all equilibria favor Bob");
    }

    let report = find_pure_nash(&GameParams::new(1.0, 0.5).unwrap(), 1e-9).unwrap();
    assert_eq!(report.equilibria.len(), 1);
    assert_close(report.equilibria[0].payoffs.f_a, 0.75, 1e-15, "F_A");
    assert_close(report.equilibria[0].payoffs.f_b, 0.75, 1e-15, "F_B");

    println!("acceptance 02 (equilibrium structure): PASS - G(1/2,1), G(2,3), G(1,1/2)");
}

#[test]
fn criterion_03_closed_form_payoffs_vs_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let kappa = rng.gen_range(1e-3..=2.0);
        let tau = rng.gen_range(1e-3..=2.0);
        let game = GameParams::new(kappa, tau).unwrap();
        let table = UtilityTable::from_params(&game);
        let b = nsbox::random_box(&mut rng);
        let direct = average_payoffs(&table, &b);
        let closed = payoffs_closed_form(&game, &canonical_from_box(&b));
        worst = worst
            .max((direct.f_a - closed.f_a).abs())
            .max((direct.f_b - closed.f_b).abs());
    }
    assert!(worst <= 1e-12, "worst closed-form deviation {worst:e}");
    println!("acceptance 03 (closed-form payoffs): PASS - 1000 boxes, worst deviation {worst:.2e}");
}

#[test]
fn criterion_04_chsh_landmarks() {
    assert_close(chsh(&canonical_from_box(&pr_box())), 4.0, 1e-15, "PR box CHSH");

    for (k, d) in nsbox::deterministic_boxes().iter().enumerate() {
        for v in chsh_all_symmetries(&canonical_from_box(d)) {
            assert!(v.abs() <= 2.0 + 1e-12, "deterministic box {k} variant {v}");
        }
    }

    let singlet_box = box_from_strategy(&singlet_chsh_strategy());
    assert_close(
        chsh(&canonical_from_box(&singlet_box)),
        2.0 * SQRT2,
        1e-9,
        "singlet optimal CHSH",
    );

    // Werner fair-advantage threshold by bisection on p
    let advantageous = |p: f64| {
        let s = QuantumStrategy {
            state: TwoQubitState::werner(p).unwrap(),
            ..singlet_chsh_strategy()
        };
        fair_advantage(&canonical_from_box(&box_from_strategy(&s))).advantageous
    };
    let (mut lo, mut hi) = (0.5, 1.0);
    assert!(!advantageous(lo) && advantageous(hi));
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if advantageous(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let threshold = 0.5 * (lo + hi);
    assert_close(threshold, 1.0 / SQRT2, 1e-3, "Werner threshold");

    println!(
        "acceptance 04 (CHSH landmarks): PASS - PR 4, deterministic <= 2, singlet 2*sqrt(2), \
         Werner threshold {threshold:.6}"
    );
}

#[test]
fn criterion_05_mixture_family_payoffs() {
    let table = UtilityTable::from_params(&GameParams::new(0.5, 1.0).unwrap());
    for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let p = average_payoffs(&table, &pr_d_mixture(q).unwrap());
        assert_close(p.f_a, 11.0 / 16.0 + q / 16.0, 1e-12, "mixture F_A");
        assert_close(p.f_b, 7.0 / 16.0 + 5.0 * q / 16.0, 1e-12, "mixture F_B");
    }
    println!("acceptance 05 (mixture family): PASS - (11/16 + q/16, 7/16 + 5q/16) at 1e-12");
}

#[test]
#[allow(clippy::approx_constant)] // quoted deviation angles kept verbatim
fn criterion_06_main_example_and_deviation() {
    let game = GameParams::new(0.5, 1.0).unwrap();
    let table = UtilityTable::from_params(&game);
    let strategy = example_strategy(0.9).unwrap();
    let p = average_payoffs(&table, &box_from_strategy(&strategy));
    assert_close(p.f_a, 0.7066, 5e-4, "example F_A");
    assert_close(p.f_b, 0.5163, 5e-4, "example F_B");

    let br = analysis::best_response(&strategy, &game, Player::B, &SearchConfig::default());
    assert!(
        br.best_value >= 0.5213 - 1e-3,
        "Bob's best response {} misses 0.5213",
        br.best_value
    );

    // the quoted deviation angles as a fixed point check
    let deviated = QuantumStrategy {
        bob: [
            MeasDirection::new(0.451517, -1.5708).unwrap(),
            MeasDirection::new(1.25911, 1.5708).unwrap(),
        ],
        ..strategy
    };
    let pd = average_payoffs(&table, &box_from_strategy(&deviated));
    assert_close(pd.f_b, 0.5213, 5e-4, "deviated F_B");
    assert_close(pd.f_a, 0.6981, 5e-4, "deviated F_A");

    println!(
        "acceptance 06 (main example): PASS - payoffs ({:.4}, {:.4}), best response {:.4}, \
         deviated F_A {:.4}",
        p.f_a, p.f_b, br.best_value, pd.f_a
    );
}

#[test]
#[allow(clippy::approx_constant)] // quoted settings kept verbatim
fn criterion_07_social_optimum() {
    let a: f64 = 0.9;
    let game = GameParams::new(0.5, 1.0).unwrap();
    let so = analysis::social_optimum(
        &TwoQubitState::pure(a).unwrap(),
        &game,
        &SearchConfig::default(),
    );
    let bound = 0.75 * (1.0 + 0.5 * (1.0 + 4.0 * a * a * (1.0 - a * a)).sqrt());
    assert_close(so.result.best_value, 1.2266, 1e-3, "social optimum sum");
    assert_close(so.result.best_value, bound, 1e-3, "sum vs CHSH bound");

    // a socially optimal point beating the unfair equilibrium: the quoted
    // settings achieve it, and the search reports one as well
    let table = UtilityTable::from_params(&game);
    let quoted = QuantumStrategy {
        state: TwoQubitState::pure(a).unwrap(),
        alice: [
            MeasDirection::new(0.0, -2.3636).unwrap(),
            MeasDirection::new(-1.5708, 0.777996).unwrap(),
        ],
        bob: [
            MeasDirection::new(-0.6653, -0.7780).unwrap(),
            MeasDirection::new(0.6653, -0.7780).unwrap(),
        ],
        povm: None,
    };
    let pq = average_payoffs(&table, &box_from_strategy(&quoted));
    assert!(pq.f_a >= 0.6978 - 1e-3, "quoted point F_A {}", pq.f_a);
    assert!(pq.f_b >= 0.5288 - 1e-3, "quoted point F_B {}", pq.f_b);
    assert_close(pq.sum(), so.result.best_value, 1e-3, "quoted point is optimal");
    let (_, found) = so
        .beats_unfair_point
        .expect("search should surface an equilibrium-beating maximizer");
    assert!(found.f_a > 11.0 / 16.0 && found.f_b > 7.0 / 16.0);

    println!(
        "acceptance 07 (social optimum): PASS - sum {:.5}, feasible point ({:.4}, {:.4})",
        so.result.best_value, found.f_a, found.f_b
    );
}

#[test]
fn criterion_08_singlet_fair_equilibrium() {
    let game = GameParams::new(0.5, 1.0).unwrap();
    let strategy = singlet_chsh_strategy();
    assert!(analysis::is_quantum_equilibrium(
        &strategy,
        &game,
        1e-4,
        &SearchConfig::default()
    ));
    let p = average_payoffs(
        &UtilityTable::from_params(&game),
        &box_from_strategy(&strategy),
    );
    let want = 3.0 / 8.0 * (1.0 + 2.0 * SQRT2 / 4.0);
    assert_close(p.f_a, want, 1e-6, "fair payoff F_A");
    assert_close(p.f_b, want, 1e-6, "fair payoff F_B");
    assert_close(p.f_a, 0.640165, 1e-6, "fair payoff value");
    println!(
        "acceptance 08 (singlet fair equilibrium): PASS - equilibrium at 1e-4, payoffs {:.6}",
        p.f_a
    );
}

#[test]
fn criterion_09_povm_scan_infeasibility() {
    let base = ScanConfig::default();
    let r = povm_singlet_scan(&base);
    assert!(r.is_empty(), "feasible points at base resolution: {}", r.feasible_count);
    assert!(
        r.max_min_margin < 0.0,
        "margin certificate not strictly negative: {}",
        r.max_min_margin
    );

    let doubled = ScanConfig {
        alpha_step: base.alpha_step / 2.0,
        mu_step: base.mu_step / 2.0,
        bs_step: base.bs_step / 2.0,
        ..base
    };
    let r2 = povm_singlet_scan(&doubled);
    assert!(r2.is_empty(), "verdict changed at double resolution");
    assert!(r2.max_min_margin < 0.0);

    println!(
        "acceptance 09 (POVM scan): PASS - {} + {} points empty, max min-margin {:.6}",
        r.points_scanned, r2.points_scanned, r2.max_min_margin
    );
}

#[test]
fn criterion_10_gisin_curve() {
    let curve = gisin_curve(&gisin_grid(999)).unwrap();
    assert!(
        curve.max_f_a < 11.0 / 16.0,
        "max F_A {} reaches 11/16",
        curve.max_f_a
    );
    for p in &curve.points {
        let want = 0.75 * (1.0 + chsh_max_pure(p.a) / 4.0);
        assert_close(p.f_a + p.f_b, want, 1e-9, "pointwise sum identity");
    }
    println!(
        "acceptance 10 (Gisin curve): PASS - 999 points, max F_A {:.6} < 11/16",
        curve.max_f_a
    );
}

#[test]
fn criterion_11_locality_oracle_equivalence() {
    for (k, v) in ns_vertices().iter().enumerate() {
        let by_lp = is_local(v, 1e-9).is_local;
        let by_chsh = max_chsh_symmetry(&canonical_from_box(v)) <= 2.0 + 1e-9;
        assert_eq!(by_lp, by_chsh, "vertex {k}");
        assert_eq!(by_lp, k < 16, "vertex {k} locality");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut nonlocal = 0u32;
    for trial in 0..1000 {
        let b = nsbox::random_box(&mut rng);
        let by_lp = is_local(&b, 1e-9).is_local;
        let by_chsh = max_chsh_symmetry(&canonical_from_box(&b)) <= 2.0 + 1e-9;
        assert_eq!(by_lp, by_chsh, "random box {trial}");
        nonlocal += u32::from(!by_lp);
    }
    println!(
        "acceptance 11 (locality oracles): PASS - 24 vertices + 1000 boxes ({nonlocal} nonlocal)"
    );
}

#[test]
fn criterion_12_born_rule_vs_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(112);
    let table = UtilityTable::from_params(&GameParams::new(0.5, 1.0).unwrap());
    let mut worst_box: f64 = 0.0;
    let mut worst_payoff: f64 = 0.0;
    for _ in 0..200 {
        let a = rng.gen_range(0.02..0.998);
        let alice = [random_direction(&mut rng), random_direction(&mut rng)];
        let bob = [random_direction(&mut rng), random_direction(&mut rng)];
        let strategy = QuantumStrategy {
            state: TwoQubitState::pure(a).unwrap(),
            alice,
            bob,
            povm: None,
        };
        let born = box_from_strategy(&strategy);
        let closed = closed_form_box(a, &alice, &bob).unwrap();
        for k in 0..16 {
            worst_box = worst_box.max((born.entries()[k] - closed.entries()[k]).abs());
        }
        let engine = average_payoffs(&table, &born);
        let formulas = analysis::projective_payoffs(a, &alice, &bob).unwrap();
        worst_payoff = worst_payoff
            .max((engine.f_a - formulas.f_a).abs())
            .max((engine.f_b - formulas.f_b).abs());
    }
    assert!(worst_box <= 1e-12, "worst box deviation {worst_box:e}");
    assert!(worst_payoff <= 1e-12, "worst payoff deviation {worst_payoff:e}");
    println!(
        "acceptance 12 (Born rule vs closed forms): PASS - 200 strategies, box {worst_box:.2e}, \
         payoffs {worst_payoff:.2e}"
    );
}
