use iddmp::app::{dichotomic_points, emulation_policy, sp2, AppConfig};
use iddmp::ctmdp::{
    apply_action, build_pruned_state_space, enumerate_states, pairs_per_type, CtmdpModel, ModelOptions,
    DEFAULT_STATE_CEILING,
};
use iddmp::dop::{dop_objectives, sp1_sweep, StaticConfig};
use iddmp::exact::{exact_front, ExactConfig};
use iddmp::front::{Provenance, SolutionPoint};
use iddmp::mdp::{
    evaluate_policy, fully_active_policy, policy_gain_by_iteration, solve_average_cost, GainPair, MaintenancePolicy,
    SolveOptions,
};
use iddmp::model::{parse_instance, tightened_copy_bound, ComponentType, Constraint, Design, Instance, PenaltyBasis};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Params {
    p: f64,
    tau: f64,
    usage: f64,
    repair: f64,
    install: f64,
    weight: f64,
}

fn params() -> impl Strategy<Value = Params> {
    (0.5f64..0.99, 0.2f64..5.0, 0.0f64..10.0, 0.0f64..200.0, 1.0f64..4.0, 1.0f64..5.0).prop_map(
        |(p, tau, usage, repair, install, weight)| Params {
            p,
            tau,
            usage,
            repair,
            install,
            weight,
        },
    )
}

fn component(k: usize, t: &Params) -> ComponentType {
    ComponentType {
        label: format!("t{k}"),
        alpha: t.tau * (1.0 - t.p) / t.p,
        tau: t.tau,
        usage_cost: t.usage,
        repair_cost: t.repair,
        install_cost: t.install,
        weight: t.weight,
        catalog_index: k,
    }
}

/// Installation-cost and weight budgets.
fn knapsack_instance(types: &[Params], budgets: (f64, f64)) -> Instance {
    let comps = types.iter().enumerate().map(|(k, t)| component(k, t)).collect();
    let rows = vec![
        Constraint {
            name: "cost".into(),
            coefficients: types.iter().map(|t| t.install).collect(),
            bound: budgets.0,
        },
        Constraint {
            name: "weight".into(),
            coefficients: types.iter().map(|t| t.weight).collect(),
            bound: budgets.1,
        },
    ];
    Instance::new(comps, rows).unwrap()
}

/// One row per type so the copy bound equals `counts[i]`.
fn boxed_instance(types: &[Params], counts: &[u32]) -> Instance {
    let n = types.len();
    let comps = types.iter().enumerate().map(|(k, t)| component(k, t)).collect();
    let rows = (0..n)
        .map(|i| Constraint {
            name: format!("w{i}"),
            coefficients: (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect(),
            bound: counts[i] as f64,
        })
        .collect();
    Instance::new(comps, rows).unwrap()
}

fn fixed_design(types: &[Params], counts: &[u32]) -> (Instance, CtmdpModel) {
    let inst = boxed_instance(types, counts);
    let design = Design::new(inst.copy_bounds().to_vec());
    let model = CtmdpModel::for_design(&inst, &design, ModelOptions::default()).unwrap();
    (inst, model)
}

fn small_design() -> impl Strategy<Value = (Vec<Params>, Vec<u32>)> {
    (1usize..4).prop_flat_map(|n| (prop::collection::vec(params(), n), prop::collection::vec(0u32..4, n)))
}

fn base() -> Instance {
    parse_instance(include_str!("../../../instances/base-6-20")).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_order_and_probabilities(types in prop::collection::vec(params(), 1..6)) {
        let inst = knapsack_instance(&types, (10.0, 12.0));
        let comps = inst.components();
        prop_assert!(comps.windows(2).all(|w| w[0].usage_cost <= w[1].usage_cost));
        for c in comps {
            prop_assert!(c.q() > 0.0 && c.q() < 1.0 && c.ln_q() < 0.0);
        }
    }

    #[test]
    fn looser_budgets_never_lower_copy_bounds(
        types in prop::collection::vec(params(), 1..5),
        b in (1.0f64..15.0, 1.0f64..15.0),
        extra in (0.0f64..10.0, 0.0f64..10.0),
    ) {
        let tight = knapsack_instance(&types, b);
        let loose = knapsack_instance(&types, (b.0 + extra.0, b.1 + extra.1));
        for (t, l) in tight.copy_bounds().iter().zip(loose.copy_bounds()) {
            prop_assert!(t <= l);
        }
    }

    #[test]
    fn tightened_bound_within_knapsack_bound(
        types in prop::collection::vec(params(), 1..5),
        b in (1.0f64..15.0, 1.0f64..15.0),
        epsilon in -20.0f64..0.0,
        delta in 0.0f64..2.0,
        most_expensive in any::<bool>(),
    ) {
        let inst = knapsack_instance(&types, b);
        let basis = if most_expensive { PenaltyBasis::MostExpensive } else { PenaltyBasis::LastCatalogType };
        for i in 0..inst.n_types() {
            let t = tightened_copy_bound(&inst, i, epsilon, delta, basis).unwrap();
            prop_assert!(t.bound <= inst.copy_bounds()[i]);
        }
    }

    #[test]
    fn impulsive_actions_and_rate_conservation((types, counts) in small_design(), interrupt in any::<bool>()) {
        let inst = boxed_instance(&types, &counts);
        let design = Design::new(inst.copy_bounds().to_vec());
        let options = ModelOptions { repair_interruption: interrupt, ..ModelOptions::default() };
        let model = CtmdpModel::for_design(&inst, &design, options).unwrap();
        let comps = inst.components();
        for s in 0..model.n_states() {
            let state = model.state(s);
            let posts = model.action_posts(s);
            prop_assert_eq!(posts[0] as usize, s);
            for &u in posts {
                let u = u as usize;
                let a = model.action_between(s, u);
                prop_assert_eq!(apply_action(&state, &a).unwrap(), model.state(u));
                prop_assert_eq!(model.post_of(s, &a).unwrap(), u);
                prop_assert_eq!(model.action_posts(u)[0] as usize, u);
            }
            let expected: f64 = state
                .rows
                .iter()
                .enumerate()
                .map(|(i, &(r, d))| {
                    let healthy = design.counts[i] - r - d;
                    let mut rate = r as f64 * comps[i].tau + healthy as f64 * comps[i].alpha;
                    if interrupt {
                        rate += r as f64 * comps[i].alpha;
                    }
                    rate
                })
                .sum();
            let total: f64 = model.transitions(s).map(|(_, q)| q).sum();
            prop_assert!((total - expected).abs() <= 1e-12 * expected.max(1.0));
            prop_assert!((model.outflow(s) - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn state_count_law(bounds in prop::collection::vec(0u32..6, 1..4)) {
        let states = enumerate_states(&bounds, DEFAULT_STATE_CEILING).unwrap();
        let law: u64 = bounds.iter().map(|&m| pairs_per_type(m)).product();
        let direct: usize = bounds
            .iter()
            .map(|&m| (0..=m).flat_map(|r| (0..=m - r).map(move |d| (r, d))).count())
            .product();
        prop_assert_eq!(states.len() as u64, law);
        prop_assert_eq!(states.len(), direct);
    }

    #[test]
    fn pruned_space_matches_filtering(
        types in prop::collection::vec(params(), 1..4),
        b in (2.0f64..9.0, 2.0f64..9.0),
    ) {
        let inst = knapsack_instance(&types, b);
        let pruned = build_pruned_state_space(&inst, DEFAULT_STATE_CEILING).unwrap();
        let bounds = inst.copy_bounds();
        let all = enumerate_states(bounds, DEFAULT_STATE_CEILING).unwrap();
        // Copies outside the design count as permanently damaged, so the
        // smallest design admitting a state installs `M - d` copies.
        let filtered: Vec<_> = all
            .into_iter()
            .filter(|s| inst.fits_knapsack(&s.rows.iter().zip(bounds).map(|(&(_, d), &m)| m - d).collect::<Vec<_>>()))
            .collect();
        let mut a = pruned.clone();
        let mut f = filtered.clone();
        a.sort_by(|x, y| x.rows.cmp(&y.rows));
        f.sort_by(|x, y| x.rows.cmp(&y.rows));
        prop_assert_eq!(a, f);
    }

    #[test]
    fn fully_active_closed_form((types, counts) in small_design()) {
        let (inst, model) = fixed_design(&types, &counts);
        let g = evaluate_policy(&model, &fully_active_policy(&model), model.all_healthy()).unwrap();
        let (g_o, ln_g_f) = dop_objectives(&inst, &Design::new(inst.copy_bounds().to_vec()));
        prop_assert!((g.g_o - g_o).abs() <= 1e-9, "{} vs {}", g.g_o, g_o);
        prop_assert!(g.ln_g_f == ln_g_f || (g.ln_g_f - ln_g_f).abs() <= 1e-9, "{} vs {}", g.ln_g_f, ln_g_f);
    }

    #[test]
    fn evaluation_matches_uniformized_iteration((types, counts) in small_design(), p in 0.1f64..1000.0) {
        let (_, model) = fixed_design(&types, &counts);
        let policy = fully_active_policy(&model);
        let exact = evaluate_policy(&model, &policy, model.all_healthy()).unwrap().scalarized(p);
        let options = SolveOptions::default();
        let (iterated, converged) = policy_gain_by_iteration(&model, &policy, p, options);
        // Iteration runs on costs divided by the largest scalarized cost.
        let scale = (0..model.n_states())
            .map(|s| {
                let (o, f) = model.cost_rates(s);
                o + p * f
            })
            .fold(1.0, f64::max);
        prop_assert!(converged);
        prop_assert!((exact - iterated).abs() <= 10.0 * options.tolerance * scale, "{exact} vs {iterated}");
    }

    #[test]
    fn time_rescaling_leaves_gains_unchanged(
        (types, counts) in small_design(),
        m in 0.1f64..20.0,
        p in 0.1f64..1000.0,
    ) {
        let (inst, model) = fixed_design(&types, &counts);
        let scaled_inst = inst.with_rate_multipliers(&vec![m; inst.n_types()]).unwrap();
        let design = Design::new(inst.copy_bounds().to_vec());
        let scaled = CtmdpModel::for_design(&scaled_inst, &design, ModelOptions::default()).unwrap();
        let policy = solve_average_cost(&model, p, SolveOptions::default()).unwrap().policy;
        for pol in [fully_active_policy(&model), policy] {
            let same = MaintenancePolicy::from_posts(&scaled, pol.posts().to_vec()).unwrap();
            let a = evaluate_policy(&model, &pol, model.all_healthy()).unwrap();
            let b = evaluate_policy(&scaled, &same, scaled.all_healthy()).unwrap();
            prop_assert!((a.g_o - b.g_o).abs() <= 1e-9);
            prop_assert!(a.ln_g_f == b.ln_g_f || (a.ln_g_f - b.ln_g_f).abs() <= 1e-9);
        }
    }

    #[test]
    fn nested_emulation(types in prop::collection::vec(params(), 1..4), seeds in prop::collection::vec((1u32..4, 0u32..4), 3)) {
        let n = types.len();
        let outer: Vec<u32> = seeds[..n].iter().map(|s| s.0).collect();
        let inner: Vec<u32> = seeds[..n].iter().map(|s| s.1.min(s.0)).collect();
        let (inst, big) = fixed_design(&types, &outer);
        let inner = Design::new(inst.from_catalog_order(&inner));
        let small = CtmdpModel::for_design(&inst, &inner, ModelOptions::default()).unwrap();
        let a = evaluate_policy(&big, &emulation_policy(&big, &inner).unwrap(), big.all_healthy()).unwrap();
        let b = evaluate_policy(&small, &fully_active_policy(&small), small.all_healthy()).unwrap();
        prop_assert!((a.g_o - b.g_o).abs() <= 1e-8);
        prop_assert!(a.ln_g_f == b.ln_g_f || (a.ln_g_f - b.ln_g_f).abs() <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn optimal_gain_is_monotone_and_concave_in_penalty((types, counts) in small_design()) {
        let (_, model) = fixed_design(&types, &counts);
        let grid: Vec<f64> = (0..16).map(|k| 0.5 * 1.8f64.powi(k)).collect();
        let gains: Vec<f64> = grid
            .iter()
            .map(|&p| {
                let sol = solve_average_cost(&model, p, SolveOptions::default()).unwrap();
                evaluate_policy(&model, &sol.policy, model.all_healthy()).unwrap().scalarized(p)
            })
            .collect();
        let slack = |v: f64| 1e-8 * v.abs().max(1.0);
        for k in 1..grid.len() {
            prop_assert!(gains[k] >= gains[k - 1] - slack(gains[k]));
        }
        for k in 1..grid.len() - 1 {
            let w = (grid[k] - grid[k - 1]) / (grid[k + 1] - grid[k - 1]);
            let chord = (1.0 - w) * gains[k - 1] + w * gains[k + 1];
            prop_assert!(gains[k] >= chord - slack(chord), "p = {}: {} below chord {}", grid[k], gains[k], chord);
        }
    }

    #[test]
    fn sweep_is_strictly_more_reliable(
        types in prop::collection::vec(params(), 1..5),
        b in (3.0f64..14.0, 3.0f64..14.0),
        step in -1.0f64..-0.05,
    ) {
        let inst = knapsack_instance(&types, b);
        let sweep = sp1_sweep(&inst, 0.0, step, StaticConfig::default()).unwrap();
        for w in sweep.windows(2) {
            prop_assert!(w[1].ln_g_f < w[0].ln_g_f);
        }
        for s in &sweep {
            let model = CtmdpModel::for_design(&inst, &s.design, ModelOptions::default()).unwrap();
            let g = evaluate_policy(&model, &fully_active_policy(&model), model.all_healthy()).unwrap();
            prop_assert!((g.g_o - s.g_o).abs() <= 1e-8);
            prop_assert!(g.ln_g_f == s.ln_g_f || (g.ln_g_f - s.ln_g_f).abs() <= 1e-8);
        }
    }

    #[test]
    fn sweep_ends_at_fully_active((types, counts) in small_design()) {
        let (inst, model) = fixed_design(&types, &counts);
        let design = Design::new(inst.copy_bounds().to_vec());
        let fa = evaluate_policy(&model, &fully_active_policy(&model), model.all_healthy()).unwrap();
        let run = sp2(&inst, &design, fa.ln_g_f, &AppConfig::default()).unwrap();
        let last = run.points.last().unwrap();
        prop_assert!((last.g_o - fa.g_o).abs() <= 1e-6);
        prop_assert!(last.ln_g_f == fa.ln_g_f || (last.ln_g_f - fa.ln_g_f).abs() <= 1e-6);
        let first = run.points.first().unwrap();
        prop_assert!(first.penalty.is_some());
        let d = dichotomic_points(&model, &design, Provenance::Exact, SolveOptions::default()).unwrap();
        let last = d.points.last().unwrap();
        prop_assert!((last.g_o - fa.g_o).abs() <= 1e-6);
    }
}

/// Every DS policy of every design, exactly evaluated.
fn all_policy_points(inst: &Instance) -> Vec<GainPair> {
    let mut out = Vec::new();
    inst.visit_feasible(inst.copy_bounds(), |x| {
        let model = CtmdpModel::for_design(inst, &Design::new(x.to_vec()), ModelOptions::default()).unwrap();
        let n = model.n_states();
        let mut digit = vec![0usize; n];
        loop {
            let posts: Vec<u32> = (0..n).map(|s| model.action_posts(s)[digit[s]]).collect();
            let policy = MaintenancePolicy::from_posts(&model, posts).unwrap();
            out.push(evaluate_policy(&model, &policy, model.all_healthy()).unwrap());
            let mut k = 0;
            while k < n {
                digit[k] += 1;
                if digit[k] < model.action_posts(k).len() {
                    break;
                }
                digit[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    });
    out
}

/// Supported points: some weight `w > 0` makes the point a minimizer of
/// `g_o + w g_f` over all points. The flag marks extreme ones, whose interval
/// of such weights has non-empty interior.
fn supported_oracle(points: &[GainPair]) -> Vec<(f64, f64, bool)> {
    let mut out = Vec::new();
    for b in points {
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        let mut dominated = false;
        for x in points {
            let (dx, df) = (x.g_o - b.g_o, b.g_f - x.g_f);
            if df > 0.0 {
                hi = hi.min(dx / df);
            } else if df < 0.0 {
                lo = lo.max(dx / df);
            } else if dx < 0.0 {
                dominated = true;
            }
        }
        if !dominated && lo <= hi * (1.0 + 1e-9) && hi > 0.0 {
            out.push((b.g_o, b.ln_g_f, lo < hi * (1.0 - 1e-6)));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-9 && (a.1 - b.1).abs() <= 1e-9);
    out
}

fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() <= 1e-8 && (a.1 == b.1 || (a.1 - b.1).abs() <= 1e-8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_front_is_the_supported_front(types in prop::collection::vec(params(), 1..3), two in any::<bool>()) {
        let counts: Vec<u32> = if types.len() == 1 { vec![if two { 2 } else { 1 }] } else { vec![1, 1] };
        let inst = boxed_instance(&types, &counts);
        let oracle = supported_oracle(&all_policy_points(&inst));
        let got: Vec<(f64, f64)> = exact_front(&inst, &ExactConfig::default())
            .unwrap()
            .front
            .points
            .iter()
            .map(|p: &SolutionPoint| (p.g_o, p.ln_g_f))
            .collect();
        for &g in &got {
            prop_assert!(oracle.iter().any(|o| close(g, (o.0, o.1))), "{:?} not supported in {:?}", g, oracle);
        }
        for o in oracle.iter().filter(|o| o.2) {
            prop_assert!(got.iter().any(|&g| close(g, (o.0, o.1))), "{:?} missing from {:?}", o, got);
        }
    }
}

#[test]
fn maximal_designs_give_the_same_front() {
    let inst = base();
    let all = exact_front(&inst, &ExactConfig::default()).unwrap();
    let maximal = exact_front(
        &inst,
        &ExactConfig {
            maximal_only: true,
            ..ExactConfig::default()
        },
    )
    .unwrap();
    assert!(maximal.designs < all.designs);
    let a: Vec<(f64, f64)> = all.front.points.iter().map(|p| (p.g_o, p.ln_g_f)).collect();
    let m: Vec<(f64, f64)> = maximal.front.points.iter().map(|p| (p.g_o, p.ln_g_f)).collect();
    assert_eq!(a.len(), m.len(), "{a:?} vs {m:?}");
    for (x, y) in a.iter().zip(&m) {
        assert!((x.0 - y.0).abs() <= 1e-8 && (x.1 - y.1).abs() <= 1e-8, "{a:?} vs {m:?}");
    }
}
