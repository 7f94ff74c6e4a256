//! Average-cost solution of the penalized maintenance problem and exact policy evaluation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ctmdp::CtmdpModel;
use crate::error::{Error, Result};
use crate::linalg::{solve_dense, stationary_gth};

/// Failure probabilities below this are reported with `ln_g_f = -inf`.
pub const LOG_FLOOR: f64 = 1e-300;

/// Uniformization constant as a multiple of the largest outflow.
pub const UNIFORMIZATION_FACTOR: f64 = 1.05;

/// Largest recurrent class solved by dense elimination.
const DENSE_CLASS_LIMIT: usize = 2000;

/// States per parallel chunk in value iteration.
const PAR_THRESHOLD: usize = 4096;

/// A deterministic stationary policy, stored as the post-decision state chosen in every state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MaintenancePolicy {
    posts: Vec<u32>,
}

impl MaintenancePolicy {
    /// Builds a policy from one action per state.
    pub fn from_actions(model: &CtmdpModel, actions: &[Vec<u32>]) -> Result<Self> {
        if actions.len() != model.n_states() {
            return Err(Error::BadPolicy(format!(
                "{} actions for {} states",
                actions.len(),
                model.n_states()
            )));
        }
        let posts = actions
            .iter()
            .enumerate()
            .map(|(s, a)| model.post_of(s, a).map(|p| p as u32))
            .collect::<Result<Vec<_>>>()?;
        Ok(MaintenancePolicy { posts })
    }

    /// Builds a policy from post-decision state ids, checking feasibility.
    pub fn from_posts(model: &CtmdpModel, posts: Vec<u32>) -> Result<Self> {
        if posts.len() != model.n_states() {
            return Err(Error::BadPolicy(format!(
                "{} entries for {} states",
                posts.len(),
                model.n_states()
            )));
        }
        for (s, &p) in posts.iter().enumerate() {
            if !model.action_posts(s).contains(&p) {
                return Err(Error::InfeasibleAction {
                    state: model.state(s).to_string(),
                    action: model.state(p as usize).rows.iter().map(|r| r.0).collect(),
                });
            }
        }
        Ok(MaintenancePolicy { posts })
    }

    pub fn post(&self, state: usize) -> usize {
        self.posts[state] as usize
    }

    pub fn posts(&self) -> &[u32] {
        &self.posts
    }

    pub fn action(&self, model: &CtmdpModel, state: usize) -> Vec<u32> {
        model.action_between(state, self.post(state))
    }

    /// States whose action is non-zero, with that action.
    pub fn nonzero_actions(&self, model: &CtmdpModel) -> Vec<(usize, Vec<u32>)> {
        (0..self.posts.len())
            .filter(|&s| self.post(s) != s)
            .map(|s| (s, self.action(model, s)))
            .collect()
    }

    /// Line-oriented export: `state action` per state.
    pub fn export(&self, model: &CtmdpModel) -> String {
        let mut out = String::new();
        for s in 0..self.posts.len() {
            let a = self.action(model, s);
            let a: Vec<String> = a.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{} ({})\n", model.state(s), a.join(",")));
        }
        out
    }
}

/// Repairs every damaged copy at once.
pub fn fully_active_policy(model: &CtmdpModel) -> MaintenancePolicy {
    let posts = (0..model.n_states())
        .map(|s| {
            *model
                .action_posts(s)
                .last()
                .expect("the zero action is always feasible")
        })
        .collect();
    MaintenancePolicy { posts }
}

/// Long-run operational cost rate and failure probability of a policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPair {
    pub g_o: f64,
    pub g_f: f64,
    pub ln_g_f: f64,
}

impl GainPair {
    pub fn new(g_o: f64, g_f: f64) -> Self {
        let ln_g_f = if g_f < LOG_FLOOR { f64::NEG_INFINITY } else { g_f.ln() };
        GainPair { g_o, g_f, ln_g_f }
    }

    pub fn scalarized(&self, p: f64) -> f64 {
        self.g_o + p * self.g_f
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Span tolerance on successive relative-value differences, applied to costs
    /// normalized by their largest value.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1e-10,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AverageCostSolution {
    pub policy: MaintenancePolicy,
    /// Optimal scalarized gain `g_o + p g_f`.
    pub gain: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Final span of the one-step differences, in unnormalized cost units.
    pub span: f64,
}

/// Relative value iteration on the uniformized model.
///
/// `choices(s)` lists the admissible post-states of state `s`.
fn relative_value_iteration<'c>(
    model: &CtmdpModel,
    cost: &[f64],
    choices: impl Fn(usize) -> &'c [u32] + Sync,
    options: SolveOptions,
) -> (Vec<u32>, f64, bool, usize, f64) {
    let n = model.n_states();
    let lambda = {
        let m = model.max_outflow();
        if m > 0.0 {
            UNIFORMIZATION_FACTOR * m
        } else {
            1.0
        }
    };
    let scale = {
        let m = cost.iter().copied().fold(0.0, f64::max);
        if m > 0.0 {
            m
        } else {
            1.0
        }
    };
    let c: Vec<f64> = cost.iter().map(|v| v / scale).collect();
    let stay: Vec<f64> = (0..n).map(|u| lambda - model.outflow(u)).collect();

    let mut h = vec![0.0; n];
    let mut expect = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut choice = vec![0u32; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut lo = 0.0;
    let mut hi = 0.0;

    let bellman = |s: usize, h: &[f64], expect: &[f64]| -> (f64, u32) {
        let mut best = f64::INFINITY;
        let mut arg = 0u32;
        for &u in choices(s) {
            let u_ = u as usize;
            let v = c[u_] + (expect[u_] + stay[u_] * h[s]) / lambda;
            if best.is_infinite() || v < best - 1e-14 * best.abs().max(1.0) {
                best = v;
                arg = u;
            }
        }
        (best, arg)
    };

    while iterations < options.max_iterations {
        iterations += 1;
        let fill_expect = |u: usize| -> f64 { model.transitions(u).map(|(t, q)| q * h[t]).sum() };
        if n >= PAR_THRESHOLD {
            expect
                .par_iter_mut()
                .enumerate()
                .for_each(|(u, e)| *e = fill_expect(u));
            next.par_iter_mut()
                .zip(choice.par_iter_mut())
                .enumerate()
                .for_each(|(s, (v, a))| {
                    let (b, arg) = bellman(s, &h, &expect);
                    *v = b;
                    *a = arg;
                });
        } else {
            for u in 0..n {
                expect[u] = fill_expect(u);
            }
            for s in 0..n {
                let (b, arg) = bellman(s, &h, &expect);
                next[s] = b;
                choice[s] = arg;
            }
        }
        lo = f64::INFINITY;
        hi = f64::NEG_INFINITY;
        for s in 0..n {
            let d = next[s] - h[s];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let reference = next[0];
        for s in 0..n {
            h[s] = next[s] - reference;
        }
        if hi - lo < options.tolerance {
            converged = true;
            break;
        }
    }
    (choice, scale * 0.5 * (lo + hi), converged, iterations, scale * (hi - lo))
}

/// Minimizes the long-run average of `c^o + p c^f` over deterministic stationary policies.
pub fn solve_average_cost(model: &CtmdpModel, p: f64, options: SolveOptions) -> Result<AverageCostSolution> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "penalty must be non-negative and finite",
        });
    }
    let cost: Vec<f64> = model
        .cost_o_slice()
        .iter()
        .zip(model.cost_f_slice())
        .map(|(o, f)| o + p * f)
        .collect();
    let (posts, gain, converged, iterations, span) =
        relative_value_iteration(model, &cost, |s| model.action_posts(s), options);
    Ok(AverageCostSolution {
        policy: MaintenancePolicy { posts },
        gain,
        converged,
        iterations,
        span,
    })
}

/// Scalarized gain of a fixed policy by value iteration on its uniformized chain.
/// Only meaningful when the policy induces a single recurrent class.
pub fn policy_gain_by_iteration(
    model: &CtmdpModel,
    policy: &MaintenancePolicy,
    p: f64,
    options: SolveOptions,
) -> (f64, bool) {
    let cost: Vec<f64> = model
        .cost_o_slice()
        .iter()
        .zip(model.cost_f_slice())
        .map(|(o, f)| o + p * f)
        .collect();
    let posts = policy.posts();
    let (_, gain, converged, _, _) =
        relative_value_iteration(model, &cost, |s| &posts[s..s + 1], options);
    (gain, converged)
}

/// Exact long-run objectives of `policy` started in `initial`.
///
/// The chain runs on pre-decision states; each state holds the transitions and
/// costs of the post-state its action selects. When several closed classes are
/// reachable, their gains are weighted by absorption probabilities.
pub fn evaluate_policy(model: &CtmdpModel, policy: &MaintenancePolicy, initial: usize) -> Result<GainPair> {
    let n = model.n_states();
    if policy.posts.len() != n {
        return Err(Error::BadPolicy(format!(
            "policy has {} entries for {} states",
            policy.posts.len(),
            n
        )));
    }
    if initial >= n {
        return Err(Error::BadPolicy(format!("initial state {initial} outside the model")));
    }

    // Reachable set and induced adjacency (self-loops dropped).
    let mut local = vec![usize::MAX; n];
    let mut order = vec![initial];
    local[initial] = 0;
    let mut k = 0;
    while k < order.len() {
        let s = order[k];
        k += 1;
        for (t, _) in model.transitions(policy.post(s)) {
            if t != s && local[t] == usize::MAX {
                local[t] = order.len();
                order.push(t);
            }
        }
    }
    let m = order.len();
    let mut start = Vec::with_capacity(m + 1);
    let mut targets = Vec::new();
    let mut rates = Vec::new();
    for &s in &order {
        start.push(targets.len());
        for (t, q) in model.transitions(policy.post(s)) {
            if t != s {
                targets.push(local[t]);
                rates.push(q);
            }
        }
    }
    start.push(targets.len());

    let comp = crate::linalg::strongly_connected(m, &start, &targets);
    let n_comp = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut closed = vec![true; n_comp];
    for v in 0..m {
        for e in start[v]..start[v + 1] {
            if comp[targets[e]] != comp[v] {
                closed[comp[v]] = false;
            }
        }
    }

    let cost_o = model.cost_o_slice();
    let cost_f = model.cost_f_slice();
    let class_gain = |c: usize| -> Result<(f64, f64)> {
        let members: Vec<usize> = (0..m).filter(|&v| comp[v] == c).collect();
        let pi = class_stationary(&members, &comp, c, &start, &targets, &rates)?;
        let mut g_o = 0.0;
        let mut g_f = 0.0;
        for (&v, &w) in members.iter().zip(&pi) {
            let u = policy.post(order[v]);
            g_o += w * cost_o[u];
            g_f += w * cost_f[u];
        }
        Ok((g_o, g_f))
    };

    let closed_ids: Vec<usize> = (0..n_comp).filter(|&c| closed[c]).collect();
    if closed_ids.len() == 1 {
        let (g_o, g_f) = class_gain(closed_ids[0])?;
        return Ok(GainPair::new(g_o, g_f));
    }

    // Absorption probabilities from the initial state via the embedded jump chain.
    let transient: Vec<usize> = (0..m).filter(|&v| !closed[comp[v]]).collect();
    let mut tpos = vec![usize::MAX; m];
    for (k, &v) in transient.iter().enumerate() {
        tpos[v] = k;
    }
    let nt = transient.len();
    let nc = closed_ids.len();
    let cpos = |c: usize| closed_ids.iter().position(|&x| x == c).expect("closed class");
    let mut a = vec![0.0; nt * nt];
    let mut b = vec![0.0; nt * nc];
    for (k, &v) in transient.iter().enumerate() {
        a[k * nt + k] = 1.0;
        let out: f64 = rates[start[v]..start[v + 1]].iter().sum();
        for e in start[v]..start[v + 1] {
            let w = targets[e];
            let pr = rates[e] / out;
            if closed[comp[w]] {
                b[k * nc + cpos(comp[w])] += pr;
            } else {
                a[k * nt + tpos[w]] -= pr;
            }
        }
    }
    solve_dense(nt, &mut a, &mut b, nc).ok_or_else(|| Error::Singular("absorption probabilities".into()))?;
    let row = tpos[0];
    let mut g_o = 0.0;
    let mut g_f = 0.0;
    for (j, &c) in closed_ids.iter().enumerate() {
        let w = b[row * nc + j];
        if w > 0.0 {
            let (o, f) = class_gain(c)?;
            g_o += w * o;
            g_f += w * f;
        }
    }
    Ok(GainPair::new(g_o, g_f))
}

/// Stationary distribution of one closed class, in the order of `members`.
fn class_stationary(
    members: &[usize],
    comp: &[usize],
    c: usize,
    start: &[usize],
    targets: &[usize],
    rates: &[f64],
) -> Result<Vec<f64>> {
    let k = members.len();
    if k == 1 {
        return Ok(vec![1.0]);
    }
    let mut pos = std::collections::HashMap::with_capacity(k);
    for (i, &v) in members.iter().enumerate() {
        pos.insert(v, i);
    }
    if k <= DENSE_CLASS_LIMIT {
        let mut q = vec![0.0; k * k];
        for (i, &v) in members.iter().enumerate() {
            for e in start[v]..start[v + 1] {
                debug_assert_eq!(comp[targets[e]], c);
                q[i * k + pos[&targets[e]]] += rates[e];
            }
        }
        return Ok(stationary_gth(k, &mut q));
    }

    // Gauss-Seidel on the balance equations for large classes.
    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
    let mut out = vec![0.0; k];
    for (i, &v) in members.iter().enumerate() {
        for e in start[v]..start[v + 1] {
            let j = pos[&targets[e]];
            incoming[j].push((i, rates[e]));
            out[i] += rates[e];
        }
    }
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..100_000 {
        let mut change: f64 = 0.0;
        for j in 0..k {
            let v: f64 = incoming[j].iter().map(|&(i, q)| pi[i] * q).sum::<f64>() / out[j];
            if pi[j] > 0.0 {
                change = change.max(((v - pi[j]) / pi[j]).abs());
            } else if v > 0.0 {
                change = 1.0;
            }
            pi[j] = v;
        }
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= total);
        if change < 1e-13 {
            return Ok(pi);
        }
    }
    Err(Error::Singular(format!("stationary iteration on a class of {k} states did not settle")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctmdp::{CtmdpModel, ModelOptions};
    use crate::model::{parse_instance, ComponentType, Constraint, Design, Instance};

    fn table3() -> Instance {
        parse_instance(include_str!("../../../instances/base-6-20")).unwrap()
    }

    fn model(inst: &Instance, counts: &[u32]) -> CtmdpModel {
        CtmdpModel::for_design(inst, &Design::new(counts.to_vec()), ModelOptions::default()).unwrap()
    }

    #[test]
    fn single_component_penalties() {
        let inst = table3();
        let m = model(&inst, &[1, 0, 0, 0]);
        let sol = solve_average_cost(&m, 100.0, SolveOptions::default()).unwrap();
        assert!(sol.converged);
        // Always repair: 0.99 * 1 + 0.01 * 100 operational, plus 100 * 0.01 penalty.
        assert!((sol.gain - 2.99).abs() < 1e-8, "{}", sol.gain);
        let damaged = m.lookup(&[(0, 1), (0, 0), (0, 0), (0, 0)]).unwrap();
        assert_eq!(sol.policy.action(&m, damaged), vec![1, 0, 0, 0]);

        let sol = solve_average_cost(&m, 1.0, SolveOptions::default()).unwrap();
        assert!((sol.gain - 1.0).abs() < 1e-8, "{}", sol.gain);
        assert_eq!(sol.policy.action(&m, damaged), vec![0, 0, 0, 0]);
    }

    #[test]
    fn empty_design_gain_is_penalty() {
        let inst = table3();
        let m = model(&inst, &[0, 0, 0, 0]);
        for p in [0.0, 3.5, 1e6] {
            let sol = solve_average_cost(&m, p, SolveOptions::default()).unwrap();
            assert!((sol.gain - p).abs() <= 1e-9 * p.max(1.0));
        }
        let g = evaluate_policy(&m, &fully_active_policy(&m), 0).unwrap();
        assert_eq!((g.g_o, g.g_f, g.ln_g_f), (0.0, 1.0, 0.0));
    }

    #[test]
    fn two_copies_fully_active_matches_table_row() {
        let inst = table3();
        let m = model(&inst, &[2, 0, 0, 0]);
        let g = evaluate_policy(&m, &fully_active_policy(&m), m.all_healthy()).unwrap();
        assert!((g.g_o - 3.0).abs() < 0.005, "{}", g.g_o);
        assert!((g.ln_g_f - (-9.21)).abs() < 0.005, "{}", g.ln_g_f);
    }

    #[test]
    fn never_repair_absorbs() {
        let inst = table3();
        let m = model(&inst, &[1, 0, 0, 0]);
        let never = MaintenancePolicy::from_actions(&m, &vec![vec![0, 0, 0, 0]; m.n_states()]).unwrap();
        let g = evaluate_policy(&m, &never, m.all_healthy()).unwrap();
        assert_eq!((g.g_o, g.g_f), (0.0, 1.0));
    }

    #[test]
    fn fully_active_actions() {
        let inst = table3();
        let m = model(&inst, &[1, 2, 0, 0]);
        let fa = fully_active_policy(&m);
        let s = m.lookup(&[(1, 0), (0, 2), (0, 0), (0, 0)]).unwrap();
        assert_eq!(fa.action(&m, s), vec![0, 2, 0, 0]);
        let s = m.lookup(&[(0, 1), (1, 1), (0, 0), (0, 0)]).unwrap();
        assert_eq!(fa.action(&m, s), vec![1, 1, 0, 0]);
        assert_eq!(fa.action(&m, m.all_healthy()), vec![0, 0, 0, 0]);
    }

    /// Two-type instance with one copy of the first type and two of the second.
    fn multichain_instance() -> (Instance, CtmdpModel) {
        let t = |label: &str, alpha: f64, tau: f64, c: f64, r: f64| ComponentType {
            label: label.into(),
            alpha,
            tau,
            usage_cost: c,
            repair_cost: r,
            install_cost: 0.0,
            weight: 1.0,
            catalog_index: 0,
        };
        let inst = Instance::new(
            vec![t("1", 0.2, 1.5, 1.0, 7.0), t("2", 0.4, 2.5, 3.0, 11.0)],
            vec![Constraint {
                name: "w".into(),
                coefficients: vec![1.0, 1.0],
                bound: 3.0,
            }],
        )
        .unwrap();
        let m = CtmdpModel::for_design(&inst, &Design::new(vec![1, 2]), ModelOptions::default()).unwrap();
        (inst, m)
    }

    #[test]
    fn two_recurrent_classes_give_different_gains() {
        let (inst, m) = multichain_instance();
        let mut actions = vec![vec![0, 0]; m.n_states()];
        let set = |actions: &mut Vec<Vec<u32>>, rows: [(u32, u32); 2], a: [u32; 2]| {
            actions[m.lookup(&rows).unwrap()] = a.to_vec();
        };
        set(&mut actions, [(0, 1), (0, 2)], [1, 0]);
        set(&mut actions, [(0, 1), (1, 1)], [0, 1]);
        set(&mut actions, [(0, 1), (0, 1)], [0, 1]);
        let policy = MaintenancePolicy::from_actions(&m, &actions).unwrap();

        let c = inst.components();
        let (p1, q1) = (c[0].p(), c[0].q());
        let q2 = c[1].q();

        // Class of type 1 cycling while both type-2 copies stay damaged.
        let a = evaluate_policy(&m, &policy, m.lookup(&[(0, 1), (0, 2)]).unwrap()).unwrap();
        assert!((a.g_f - q1).abs() < 1e-12);
        assert!((a.g_o - (c[0].repair_cost * q1 + c[0].usage_cost * p1)).abs() < 1e-12);

        // Class of the two type-2 copies cycling while type 1 stays damaged.
        let b = evaluate_policy(&m, &policy, m.lookup(&[(0, 1), (1, 0)]).unwrap()).unwrap();
        assert!((b.g_f - q2 * q2).abs() < 1e-12);
        let expect_o = 2.0 * c[1].repair_cost * q2 + c[1].usage_cost * (1.0 - q2 * q2);
        assert!((b.g_o - expect_o).abs() < 1e-12);
        assert!((a.g_f - b.g_f).abs() > 1e-3);
    }

    #[test]
    fn absorption_weights_mix_classes() {
        let (_, m) = multichain_instance();
        // Never repair anything: from all-healthy the chain absorbs in the all-damaged state.
        let never = MaintenancePolicy::from_actions(&m, &vec![vec![0, 0]; m.n_states()]).unwrap();
        let g = evaluate_policy(&m, &never, m.all_healthy()).unwrap();
        assert_eq!((g.g_o, g.g_f), (0.0, 1.0));

        // Repair type 2 only when type 1 is damaged and nothing else is going on:
        // a hand-sized check that the weighted gain lies between the class gains.
        let mut actions = vec![vec![0, 0]; m.n_states()];
        actions[m.lookup(&[(0, 1), (0, 2)]).unwrap()] = vec![1, 0];
        actions[m.lookup(&[(0, 1), (0, 1)]).unwrap()] = vec![0, 1];
        actions[m.lookup(&[(0, 1), (1, 1)]).unwrap()] = vec![0, 1];
        let policy = MaintenancePolicy::from_actions(&m, &actions).unwrap();
        let g = evaluate_policy(&m, &policy, m.all_healthy()).unwrap();
        let a = evaluate_policy(&m, &policy, m.lookup(&[(0, 1), (0, 2)]).unwrap()).unwrap();
        let b = evaluate_policy(&m, &policy, m.lookup(&[(0, 1), (1, 0)]).unwrap()).unwrap();
        let (lo, hi) = (a.g_f.min(b.g_f), a.g_f.max(b.g_f));
        assert!(g.g_f >= lo - 1e-12 && g.g_f <= hi + 1e-12);
    }

    #[test]
    fn iteration_gain_matches_exact_evaluation() {
        let inst = table3();
        for counts in [[1, 1, 0, 0], [0, 2, 1, 0], [3, 0, 0, 0]] {
            let m = model(&inst, &counts);
            let fa = fully_active_policy(&m);
            let g = evaluate_policy(&m, &fa, m.all_healthy()).unwrap();
            let opts = SolveOptions::default();
            let (gain, converged) = policy_gain_by_iteration(&m, &fa, 50.0, opts);
            assert!(converged);
            let scale = m.cost_o_slice().iter().fold(0.0f64, |a, &b| a.max(b)) + 50.0;
            assert!((gain - g.scalarized(50.0)).abs() <= 10.0 * opts.tolerance * scale);
        }
    }

    #[test]
    fn solver_policy_achieves_reported_gain() {
        let inst = table3();
        let m = model(&inst, &[1, 1, 1, 0]);
        let opts = SolveOptions::default();
        for p in [1.0, 30.0, 1e3, 1e6] {
            let sol = solve_average_cost(&m, p, opts).unwrap();
            let g = evaluate_policy(&m, &sol.policy, m.all_healthy()).unwrap();
            let scale = m.cost_o_slice().iter().fold(0.0f64, |a, &b| a.max(b)) + p;
            assert!((g.scalarized(p) - sol.gain).abs() <= opts.tolerance * scale, "p={p}");
        }
    }

    #[test]
    fn rejects_bad_policies() {
        let inst = table3();
        let m = model(&inst, &[1, 0, 0, 0]);
        assert!(MaintenancePolicy::from_actions(&m, &[vec![0, 0, 0, 0]]).is_err());
        let bad = vec![vec![1, 0, 0, 0]; m.n_states()];
        assert!(MaintenancePolicy::from_actions(&m, &bad).is_err());
        assert!(solve_average_cost(&m, -1.0, SolveOptions::default()).is_err());
    }
}
