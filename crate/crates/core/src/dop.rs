//! Static design problem under fully active maintenance.
//!
//! With every damaged copy repaired at once, copies behave as independent
//! two-state processes, so both objectives of a design have closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{tightened_copy_bound, Design, Instance, PenaltyBasis};
use crate::numfmt::sig12;

/// Slack on the log-failure constraint.
pub const EPSILON_SLACK: f64 = 1e-12;

/// Relative tolerance under which two scalarized objectives count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticSolution {
    pub design: Design,
    pub g_o: f64,
    pub ln_g_f: f64,
    /// Set for the empty design.
    pub trivial: bool,
}

impl StaticSolution {
    pub fn evaluate(instance: &Instance, design: Design) -> Self {
        let (g_o, ln_g_f) = dop_objectives(instance, &design);
        StaticSolution {
            trivial: design.is_empty(),
            design,
            g_o,
            ln_g_f,
        }
    }
}

/// `(g_o, ln g_f)` of a design under fully active maintenance.
///
/// Copies are used in order of increasing usage cost; the usage cost of type `i`
/// is paid while some copy of it is healthy and every cheaper copy is not.
pub fn dop_objectives(instance: &Instance, design: &Design) -> (f64, f64) {
    let mut g_o = 0.0;
    let mut ln_g_f: f64 = 0.0;
    for (c, &x) in instance.components().iter().zip(&design.counts) {
        let x = x as f64;
        let q = c.q();
        let all_down = (x * c.ln_q()).exp();
        g_o += c.repair_cost * q * x + c.usage_cost * (1.0 - all_down) * ln_g_f.exp();
        ln_g_f += x * c.ln_q();
    }
    (g_o, ln_g_f)
}

/// Per-slot use and fall-through probabilities.
///
/// Slot `(i, j)` is copy `j` of type `i`, for `j < M_i`. `y[i][j]` is the
/// probability that the slot is installed, healthy and in use; `z[i][j]` that
/// no slot up to and including it is healthy.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityChain {
    pub y: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
}

impl ProbabilityChain {
    /// Probability that the system has no healthy copy.
    pub fn failure(&self) -> f64 {
        self.z
            .iter()
            .rev()
            .find_map(|row| row.last().copied())
            .unwrap_or(1.0)
    }

    /// Operational cost rate rebuilt from the chain.
    pub fn operational_cost(&self, instance: &Instance, design: &Design) -> f64 {
        instance
            .components()
            .iter()
            .zip(&self.y)
            .zip(&design.counts)
            .map(|((c, y), &x)| c.repair_cost * c.q() * x as f64 + c.usage_cost * y.iter().sum::<f64>())
            .sum()
    }
}

pub fn probability_chain_values(instance: &Instance, design: &Design) -> ProbabilityChain {
    let mut z_prev = 1.0;
    let mut y = Vec::with_capacity(instance.n_types());
    let mut z = Vec::with_capacity(instance.n_types());
    for ((c, &m), &x) in instance
        .components()
        .iter()
        .zip(instance.copy_bounds())
        .zip(&design.counts)
    {
        let mut yi = Vec::with_capacity(m as usize);
        let mut zi = Vec::with_capacity(m as usize);
        for j in 0..m.max(x) {
            let installed = if j < x { 1.0 } else { 0.0 };
            let use_prob = z_prev * c.p() * installed;
            let fall = z_prev - use_prob;
            yi.push(use_prob);
            zi.push(fall);
            z_prev = fall;
        }
        y.push(yi);
        z.push(zi);
    }
    ProbabilityChain { y, z }
}

/// Static objective scalarized with failure penalty `penalty`: `g_o + penalty * g_f`.
pub fn penalized_objective(instance: &Instance, design: &Design, penalty: f64) -> f64 {
    let (g_o, ln_g_f) = dop_objectives(instance, design);
    g_o + penalty * ln_g_f.exp()
}

/// Most reliable feasible design; ties go to the lexicographically smallest.
pub fn solve_fdop(instance: &Instance) -> Design {
    let ln_q: Vec<f64> = instance.components().iter().map(|c| c.ln_q()).collect();
    let mut best = f64::INFINITY;
    let mut arg = vec![0; instance.n_types()];
    instance.visit_feasible(instance.copy_bounds(), |x| {
        let v: f64 = x.iter().zip(&ln_q).map(|(&k, l)| k as f64 * l).sum();
        if best.is_infinite() || v < best - TIE_TOLERANCE * best.abs().max(1.0) {
            best = v;
            arg = x.to_vec();
        }
    });
    Design::new(arg)
}

/// Settings of the ε-constrained static problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticConfig {
    /// Failure penalty is `(1 + delta)` times the basis usage cost.
    pub delta: f64,
    pub basis: PenaltyBasis,
    /// Restrict the search with the analytic per-type copy bound.
    pub tightened_bounds: bool,
}

impl Default for StaticConfig {
    fn default() -> Self {
        StaticConfig {
            delta: 0.1,
            basis: PenaltyBasis::default(),
            tightened_bounds: true,
        }
    }
}

impl StaticConfig {
    pub fn penalty(&self, instance: &Instance) -> f64 {
        (1.0 + self.delta) * self.basis.reference_cost(instance)
    }
}

/// Minimizes `g_o + (1+δ) c_ref g_f` over feasible designs with `ln g_f <= epsilon`.
///
/// Ties are broken by smaller `ln g_f`, then by the lexicographically smaller design.
pub fn solve_eps_delta_dop(instance: &Instance, epsilon: f64, config: StaticConfig) -> Result<StaticSolution> {
    if !(config.delta >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: config.delta,
            reason: "must be non-negative",
        });
    }
    if !(epsilon <= 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "must be non-positive",
        });
    }
    let limits: Vec<u32> = if config.tightened_bounds {
        (0..instance.n_types())
            .map(|i| tightened_copy_bound(instance, i, epsilon, config.delta, config.basis).map(|b| b.bound))
            .collect::<Result<_>>()?
    } else {
        instance.copy_bounds().to_vec()
    };
    let penalty = config.penalty(instance);
    let ln_q: Vec<f64> = instance.components().iter().map(|c| c.ln_q()).collect();

    let mut best: Option<(f64, f64, Vec<u32>)> = None;
    let mut design = Design::empty(instance.n_types());
    instance.visit_feasible(&limits, |x| {
        let ln_g_f: f64 = x.iter().zip(&ln_q).map(|(&k, l)| k as f64 * l).sum();
        if ln_g_f > epsilon + EPSILON_SLACK {
            return;
        }
        design.counts.copy_from_slice(x);
        let obj = penalized_objective(instance, &design, penalty);
        let better = match &best {
            None => true,
            Some((b_obj, b_ln, _)) => {
                let tol = TIE_TOLERANCE * b_obj.abs().max(1.0);
                obj < b_obj - tol || (obj <= b_obj + tol && ln_g_f < b_ln - EPSILON_SLACK)
            }
        };
        if better {
            best = Some((obj, ln_g_f, x.to_vec()));
        }
    });
    match best {
        Some((_, _, x)) => Ok(StaticSolution::evaluate(instance, Design::new(x))),
        None => Err(Error::Infeasible { epsilon }),
    }
}

/// The ε-sweep over the static problem.
///
/// Starts at `eps_min` and, after each solve, sets the next target to the
/// solution's `ln g_f + delta_eps`, stopping once the target drops below the
/// most reliable design's `ln g_f`. That design is appended if the sweep did
/// not reach it. Output is in discovery order, without duplicate designs.
pub fn sp1_sweep(
    instance: &Instance,
    eps_min: f64,
    delta_eps: f64,
    config: StaticConfig,
) -> Result<Vec<StaticSolution>> {
    if !(delta_eps < 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta_eps",
            value: delta_eps,
            reason: "must be negative",
        });
    }
    let fdop = StaticSolution::evaluate(instance, solve_fdop(instance));
    let mut out: Vec<StaticSolution> = Vec::new();
    let mut eps = eps_min;
    while eps >= fdop.ln_g_f - EPSILON_SLACK {
        let s = solve_eps_delta_dop(instance, eps, config)?;
        eps = s.ln_g_f + delta_eps;
        if !out.iter().any(|o| o.design == s.design) {
            out.push(s);
        }
    }
    if !out.iter().any(|o| o.design == fdop.design) {
        out.push(fdop);
    }
    Ok(out)
}

/// Usage-plus-failure objective of a set of copies `(type, copy index)`.
///
/// Copies are used in the order `(i, m) < (j, n)` iff `i < j`, or `i = j` and
/// `m < n`; the failure term is `penalty` times the probability that no copy
/// in the set is healthy.
pub fn set_objective(instance: &Instance, elements: &[(usize, u32)], penalty: f64) -> f64 {
    let mut sorted = elements.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let comps = instance.components();
    let mut all_down = 1.0;
    let mut total = 0.0;
    for &(i, _) in &sorted {
        total += comps[i].usage_cost * comps[i].p() * all_down;
        all_down *= comps[i].q();
    }
    total + penalty * all_down
}

/// Tabular text: catalog-ordered design columns, `g_o`, `ln_g_f`, tag.
pub fn format_static_table(instance: &Instance, solutions: &[StaticSolution]) -> String {
    let labels: Vec<String> = instance.catalog_types().into_iter().map(|c| c.label).collect();
    let mut out = format!("{} g_o ln_g_f tag\n", labels.join(" "));
    for s in solutions {
        let counts: Vec<String> = instance
            .catalog_counts(&s.design)
            .iter()
            .map(|c| c.to_string())
            .collect();
        out.push_str(&format!(
            "{} {} {} {}\n",
            counts.join(" "),
            sig12(s.g_o),
            sig12(s.ln_g_f),
            if s.trivial { "trivial" } else { "-" }
        ));
    }
    out
}
