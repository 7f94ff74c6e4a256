//! The maintenance CTMDP of a design.
//!
//! A state holds, per component type, the number of copies under repair and the
//! number damaged but not yet sent to repair. Actions start repairs and take
//! effect instantly, so the dynamics live on post-decision states: the model
//! stores transitions and cost rates per post-state and, per pre-decision state,
//! the list of post-states reachable by a feasible action.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::strongly_connected;
use crate::model::{Design, Instance};
use crate::numfmt::sig12;

/// Default ceiling on the number of states a model may hold.
pub const DEFAULT_STATE_CEILING: usize = 5_000_000;

/// Per-type (repairing, damaged) counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemState {
    pub rows: Vec<(u32, u32)>,
}

impl fmt::Display for SystemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, (r, d)) in self.rows.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({r},{d})")?;
        }
        write!(f, ")")
    }
}

/// Number of `(repairing, damaged)` pairs with sum at most `m`.
pub fn pairs_per_type(m: u32) -> u64 {
    let m = m as u64;
    (m + 1) * (m + 2) / 2
}

/// All states for per-type copy counts `bounds`, in lexicographic order.
pub fn enumerate_states(bounds: &[u32], ceiling: usize) -> Result<Vec<SystemState>> {
    let radix = Radix::new(bounds, ceiling)?;
    Ok((0..radix.size).map(|code| radix.decode(code)).collect())
}

/// States whose minimal admitting design fits the knapsack rows, built type by type.
pub fn build_pruned_state_space(instance: &Instance, ceiling: usize) -> Result<Vec<SystemState>> {
    let bounds = instance.copy_bounds();
    let rows = instance.constraints();
    // Partial states with the resource use of their minimal designs.
    let mut partial: Vec<(Vec<(u32, u32)>, Vec<f64>)> = vec![(Vec::new(), vec![0.0; rows.len()])];
    for (i, &m) in bounds.iter().enumerate() {
        let mut next = Vec::new();
        for (prefix, used) in &partial {
            for s1 in 0..=m {
                for s2 in 0..=(m - s1) {
                    let x = (m - s2) as f64;
                    let use_next: Vec<f64> = used
                        .iter()
                        .zip(rows)
                        .map(|(u, row)| u + row.coefficients[i] * x)
                        .collect();
                    if use_next
                        .iter()
                        .zip(rows)
                        .all(|(u, row)| *u <= row.bound * (1.0 + 1e-12) + 1e-12)
                    {
                        let mut p = prefix.clone();
                        p.push((s1, s2));
                        next.push((p, use_next));
                    }
                }
            }
            if next.len() > ceiling {
                return Err(Error::StateSpaceTooLarge {
                    count: next.len() as u128,
                    ceiling,
                    bounds: bounds.to_vec(),
                });
            }
        }
        partial = next;
    }
    Ok(partial
        .into_iter()
        .map(|(rows, _)| SystemState { rows })
        .collect())
}

/// `s ⊕ a`: moves `a_i` damaged copies of each type into repair.
pub fn apply_action(state: &SystemState, action: &[u32]) -> Result<SystemState> {
    if action.len() != state.rows.len() || action.iter().zip(&state.rows).any(|(a, r)| *a > r.1) {
        return Err(Error::InfeasibleAction {
            state: state.to_string(),
            action: action.to_vec(),
        });
    }
    Ok(SystemState {
        rows: state
            .rows
            .iter()
            .zip(action)
            .map(|(&(r, d), &a)| (r + a, d - a))
            .collect(),
    })
}

/// Mixed-radix code for states under fixed per-type bounds.
#[derive(Debug, Clone)]
struct Radix {
    bounds: Vec<u32>,
    stride: Vec<u64>,
    size: u64,
}

impl Radix {
    fn new(bounds: &[u32], ceiling: usize) -> Result<Radix> {
        let mut stride = vec![0u64; bounds.len()];
        let mut size: u128 = 1;
        for i in (0..bounds.len()).rev() {
            stride[i] = size as u64;
            size *= pairs_per_type(bounds[i]) as u128;
            if size > ceiling as u128 {
                let total: u128 = bounds.iter().map(|&m| pairs_per_type(m) as u128).product();
                return Err(Error::StateSpaceTooLarge {
                    count: total,
                    ceiling,
                    bounds: bounds.to_vec(),
                });
            }
        }
        Ok(Radix {
            bounds: bounds.to_vec(),
            stride,
            size: size as u64,
        })
    }

    fn pair_index(m: u32, r: u32, d: u32) -> u64 {
        let (m, r, d) = (m as u64, r as u64, d as u64);
        r * (m + 1) - r * r.saturating_sub(1) / 2 + d
    }

    fn encode(&self, rows: &[(u32, u32)]) -> u64 {
        rows.iter()
            .zip(&self.bounds)
            .zip(&self.stride)
            .map(|((&(r, d), &m), &s)| Self::pair_index(m, r, d) * s)
            .sum()
    }

    fn decode(&self, mut code: u64) -> SystemState {
        let mut rows = Vec::with_capacity(self.bounds.len());
        for (&m, &s) in self.bounds.iter().zip(&self.stride) {
            let mut k = code / s;
            code %= s;
            let mut r = 0;
            while k > (m - r) as u64 {
                k -= (m - r) as u64 + 1;
                r += 1;
            }
            rows.push((r, k as u32));
        }
        SystemState { rows }
    }
}

/// Whether the model is tied to one design or spans all knapsack-feasible designs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelScope {
    Design(Design),
    KnapsackPruned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelOptions {
    /// Lets a copy under repair fail back to the damaged pool at its failure rate.
    pub repair_interruption: bool,
    pub state_ceiling: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            repair_interruption: false,
            state_ceiling: DEFAULT_STATE_CEILING,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CtmdpModel {
    scope: ModelScope,
    bounds: Vec<u32>,
    n_types: usize,
    /// Flattened rows: `2 * n_types` entries per state.
    rows: Vec<u32>,
    radix: Radix,
    /// Sorted radix codes when the state set is a strict subset of the radix range.
    codes: Option<Vec<u64>>,
    action_start: Vec<usize>,
    action_post: Vec<u32>,
    trans_start: Vec<usize>,
    trans_target: Vec<u32>,
    trans_rate: Vec<f64>,
    outflow: Vec<f64>,
    cost_o: Vec<f64>,
    cost_f: Vec<f64>,
}

impl CtmdpModel {
    /// Model of a fixed design.
    pub fn for_design(instance: &Instance, design: &Design, options: ModelOptions) -> Result<Self> {
        if design.len() != instance.n_types() {
            return Err(Error::BadDesign {
                design: design.counts.clone(),
                reason: format!("expected {} counts", instance.n_types()),
            });
        }
        let radix = Radix::new(&design.counts, options.state_ceiling)?;
        let states: Vec<SystemState> = (0..radix.size).map(|c| radix.decode(c)).collect();
        Self::build(
            instance,
            ModelScope::Design(design.clone()),
            design.counts.clone(),
            radix,
            states,
            false,
            options,
        )
    }

    /// Model over the knapsack-pruned state space of the instance's copy bounds.
    pub fn knapsack_pruned(instance: &Instance, options: ModelOptions) -> Result<Self> {
        let bounds = instance.copy_bounds().to_vec();
        let radix = Radix::new(&bounds, usize::MAX).expect("unbounded ceiling");
        let states = build_pruned_state_space(instance, options.state_ceiling)?;
        Self::build(
            instance,
            ModelScope::KnapsackPruned,
            bounds,
            radix,
            states,
            true,
            options,
        )
    }

    fn build(
        instance: &Instance,
        scope: ModelScope,
        bounds: Vec<u32>,
        radix: Radix,
        states: Vec<SystemState>,
        pruned: bool,
        options: ModelOptions,
    ) -> Result<Self> {
        let n_types = bounds.len();
        let n = states.len();
        let mut rows = Vec::with_capacity(n * 2 * n_types);
        for s in &states {
            for &(r, d) in &s.rows {
                rows.push(r);
                rows.push(d);
            }
        }
        let codes = if pruned {
            Some(states.iter().map(|s| radix.encode(&s.rows)).collect::<Vec<u64>>())
        } else {
            None
        };
        let mut model = CtmdpModel {
            scope,
            bounds,
            n_types,
            rows,
            radix,
            codes,
            action_start: Vec::with_capacity(n + 1),
            action_post: Vec::new(),
            trans_start: Vec::with_capacity(n + 1),
            trans_target: Vec::new(),
            trans_rate: Vec::new(),
            outflow: Vec::with_capacity(n),
            cost_o: Vec::with_capacity(n),
            cost_f: Vec::with_capacity(n),
        };
        if let Some(codes) = &model.codes {
            debug_assert!(codes.windows(2).all(|w| w[0] < w[1]));
        }

        let comps = instance.components();
        let mut buf = vec![(0u32, 0u32); n_types];
        for id in 0..n {
            model.read_rows(id, &mut buf);

            // Transitions and costs of `id` as a post-decision state.
            model.trans_start.push(model.trans_target.len());
            let mut out = 0.0;
            let mut usage = None;
            let mut repair = 0.0;
            for i in 0..n_types {
                let (r, d) = buf[i];
                let healthy = model.bounds[i] - r - d;
                let c = &comps[i];
                if healthy > 0 {
                    if usage.is_none() {
                        usage = Some(c.usage_cost);
                    }
                    let rate = healthy as f64 * c.alpha;
                    buf[i] = (r, d + 1);
                    model.push_transition(&buf, rate);
                    out += rate;
                }
                if r > 0 {
                    let rate = r as f64 * c.tau;
                    buf[i] = (r - 1, d);
                    model.push_transition(&buf, rate);
                    out += rate;
                    if options.repair_interruption {
                        let rate = r as f64 * c.alpha;
                        buf[i] = (r - 1, d + 1);
                        model.push_transition(&buf, rate);
                        out += rate;
                    }
                }
                buf[i] = (r, d);
                repair += c.repair_cost * r as f64;
            }
            model.outflow.push(out);
            model.cost_o.push(usage.unwrap_or(0.0) + repair);
            model.cost_f.push(if usage.is_none() { 1.0 } else { 0.0 });

            // Feasible actions of `id` as a pre-decision state, lexicographic.
            model.action_start.push(model.action_post.len());
            let damaged: Vec<u32> = buf.iter().map(|&(_, d)| d).collect();
            let mut a = vec![0u32; n_types];
            loop {
                let post: Vec<(u32, u32)> =
                    buf.iter().zip(&a).map(|(&(r, d), &k)| (r + k, d - k)).collect();
                if let Some(pid) = model.lookup(&post) {
                    model.action_post.push(pid as u32);
                }
                // Odometer increment, last type fastest.
                let mut k = n_types;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    if a[k] < damaged[k] {
                        a[k] += 1;
                        break;
                    }
                    a[k] = 0;
                }
                if a.iter().all(|&v| v == 0) {
                    break;
                }
            }
        }
        model.trans_start.push(model.trans_target.len());
        model.action_start.push(model.action_post.len());
        Ok(model)
    }

    fn push_transition(&mut self, rows: &[(u32, u32)], rate: f64) {
        let target = self.lookup(rows).expect("transition target inside the state space");
        self.trans_target.push(target as u32);
        self.trans_rate.push(rate);
    }

    fn read_rows(&self, id: usize, buf: &mut [(u32, u32)]) {
        let base = id * 2 * self.n_types;
        for (i, slot) in buf.iter_mut().enumerate() {
            *slot = (self.rows[base + 2 * i], self.rows[base + 2 * i + 1]);
        }
    }

    /// Dense id of a state, if it belongs to the model.
    pub fn lookup(&self, rows: &[(u32, u32)]) -> Option<usize> {
        if rows.len() != self.n_types
            || rows
                .iter()
                .zip(&self.bounds)
                .any(|(&(r, d), &m)| r as u64 + d as u64 > m as u64)
        {
            return None;
        }
        let code = self.radix.encode(rows);
        match &self.codes {
            None => Some(code as usize),
            Some(codes) => codes.binary_search(&code).ok(),
        }
    }

    pub fn state_id(&self, state: &SystemState) -> Option<usize> {
        self.lookup(&state.rows)
    }

    pub fn state(&self, id: usize) -> SystemState {
        let mut rows = vec![(0, 0); self.n_types];
        self.read_rows(id, &mut rows);
        SystemState { rows }
    }

    pub fn n_states(&self) -> usize {
        self.outflow.len()
    }

    pub fn n_types(&self) -> usize {
        self.n_types
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn scope(&self) -> &ModelScope {
        &self.scope
    }

    /// `(repairing, damaged)` of type `i` in state `id`.
    pub fn row(&self, id: usize, i: usize) -> (u32, u32) {
        let base = id * 2 * self.n_types + 2 * i;
        (self.rows[base], self.rows[base + 1])
    }

    pub fn healthy(&self, id: usize, i: usize) -> u32 {
        let (r, d) = self.row(id, i);
        self.bounds[i] - r - d
    }

    /// Post-decision state ids of the feasible actions of `id`, lexicographic in the action.
    pub fn action_posts(&self, id: usize) -> &[u32] {
        &self.action_post[self.action_start[id]..self.action_start[id + 1]]
    }

    pub fn n_actions_total(&self) -> usize {
        self.action_post.len()
    }

    /// The action that takes `state` to `post`.
    pub fn action_between(&self, state: usize, post: usize) -> Vec<u32> {
        (0..self.n_types)
            .map(|i| self.row(post, i).0 - self.row(state, i).0)
            .collect()
    }

    /// Post-state id reached from `state` by `action`, if feasible in this model.
    pub fn post_of(&self, state: usize, action: &[u32]) -> Result<usize> {
        let s = self.state(state);
        let post = apply_action(&s, action)?;
        self.action_posts(state)
            .iter()
            .map(|&p| p as usize)
            .find(|&p| self.lookup(&post.rows) == Some(p))
            .ok_or_else(|| Error::InfeasibleAction {
                state: s.to_string(),
                action: action.to_vec(),
            })
    }

    pub fn feasible_actions(&self, id: usize) -> Vec<Vec<u32>> {
        self.action_posts(id)
            .iter()
            .map(|&p| self.action_between(id, p as usize))
            .collect()
    }

    /// Outgoing `(target, rate)` pairs of post-state `id`.
    pub fn transitions(&self, id: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.trans_start[id]..self.trans_start[id + 1];
        self.trans_target[r.clone()]
            .iter()
            .zip(&self.trans_rate[r])
            .map(|(&t, &q)| (t as usize, q))
    }

    pub fn outflow(&self, id: usize) -> f64 {
        self.outflow[id]
    }

    pub fn max_outflow(&self) -> f64 {
        self.outflow.iter().copied().fold(0.0, f64::max)
    }

    /// `(c^o, c^f)` of post-state `id`.
    pub fn cost_rates(&self, id: usize) -> (f64, f64) {
        (self.cost_o[id], self.cost_f[id])
    }

    pub(crate) fn cost_o_slice(&self) -> &[f64] {
        &self.cost_o
    }

    pub(crate) fn cost_f_slice(&self) -> &[f64] {
        &self.cost_f
    }

    /// Id of the state with every copy healthy.
    pub fn all_healthy(&self) -> usize {
        self.lookup(&vec![(0, 0); self.n_types]).expect("all-healthy state")
    }

    /// Id of the state with every copy under repair.
    pub fn all_repairing(&self) -> Option<usize> {
        let rows: Vec<(u32, u32)> = self.bounds.iter().map(|&m| (m, 0)).collect();
        self.lookup(&rows)
    }

    /// Text dump: one line per post-state with costs and outgoing rates.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for id in 0..self.n_states() {
            out.push_str(&format!(
                "{id} {} co={} cf={}",
                self.state(id),
                sig12(self.cost_o[id]),
                sig12(self.cost_f[id])
            ));
            for (t, q) in self.transitions(id) {
                out.push_str(&format!(" {t}:{}", sig12(q)));
            }
            out.push('\n');
        }
        out
    }
}

/// Outcome of the structural communication check.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunicationReport {
    /// Id of the state with every copy under repair, when it is distinct from the rest.
    pub all_repairing: Option<usize>,
    /// The all-repairing state has no incoming transition under any action.
    pub all_repairing_transient: bool,
    /// Strongly connected components among the remaining states.
    pub components: usize,
    pub weakly_communicating: bool,
}

/// Checks on the union graph of every state-action transition that the
/// all-repairing state is transient and that all other states communicate.
pub fn check_weakly_communicating(model: &CtmdpModel) -> CommunicationReport {
    let n = model.n_states();
    let all_rep = model.all_repairing().filter(|_| model.bounds.iter().any(|&m| m > 0));

    let mut in_degree_rep = 0usize;
    let mut start = Vec::with_capacity(n + 1);
    let mut targets = Vec::new();
    for s in 0..n {
        start.push(targets.len());
        if Some(s) == all_rep {
            continue;
        }
        let mut seen: Vec<usize> = Vec::new();
        for &p in model.action_posts(s) {
            for (t, _) in model.transitions(p as usize) {
                if Some(t) == all_rep {
                    in_degree_rep += 1;
                    continue;
                }
                if !seen.contains(&t) {
                    seen.push(t);
                }
            }
        }
        targets.extend(seen);
    }
    start.push(targets.len());
    // Count transitions out of the all-repairing state into it too (self-loops are absent).
    let comp = strongly_connected(n, &start, &targets);
    let mut ids: Vec<usize> = (0..n)
        .filter(|&s| Some(s) != all_rep)
        .map(|s| comp[s])
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let components = ids.len();
    let transient = all_rep.is_none() || in_degree_rep == 0;
    CommunicationReport {
        all_repairing: all_rep,
        all_repairing_transient: transient,
        components,
        weakly_communicating: transient && components <= 1,
    }
}
