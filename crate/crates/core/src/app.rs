//! Two-stage approximation of the design-and-maintenance Pareto front.
//!
//! Stage one sweeps the static problem under fully active maintenance. Stage
//! two solves penalized maintenance problems on each design that is not nested
//! in another, and the union of both stages is filtered for dominance.

use rayon::prelude::*;

use crate::ctmdp::{CtmdpModel, ModelOptions};
use crate::dop::{sp1_sweep, StaticConfig, StaticSolution};
use crate::error::{Error, Result};
use crate::front::{non_dom_filter, ParetoFront, PolicySpec, Provenance, SolutionPoint, DOMINANCE_TOLERANCE};
use crate::mdp::{evaluate_policy, fully_active_policy, solve_average_cost, GainPair, MaintenancePolicy, SolveOptions};
use crate::model::{Design, Instance};

/// Smallest and largest penalties used by the weighted-sum recursion.
pub const PENALTY_RANGE: (f64, f64) = (1e-9, 1e12);

/// Relative improvement a weighted solve must bring to add a point.
pub const DICHOTOMIC_IMPROVEMENT: f64 = 1e-9;

pub const DICHOTOMIC_MAX_DEPTH: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sp2Mode {
    /// Geometric penalty sweep.
    #[default]
    Sweep,
    /// Weighted-sum recursion between adjacent front points.
    Dichotomic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppConfig {
    pub eps_min: f64,
    pub delta_eps: f64,
    pub static_config: StaticConfig,
    pub p_min: f64,
    pub delta_p: f64,
    pub mode: Sp2Mode,
    /// Cap on penalty levels in sweep mode.
    pub max_levels: usize,
    /// Sweep stops once `ln g_f` is within this of the fully active value.
    pub lfr_match_tolerance: f64,
    pub solve: SolveOptions,
    pub model: ModelOptions,
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig {
            eps_min: 0.0,
            delta_eps: -0.1,
            static_config: StaticConfig::default(),
            p_min: 1.0,
            delta_p: 2.0,
            mode: Sp2Mode::Sweep,
            max_levels: 200,
            lfr_match_tolerance: 1e-9,
            solve: SolveOptions::default(),
            model: ModelOptions::default(),
        }
    }
}

/// Points found for one design, with notes on anything that went wrong.
#[derive(Debug, Clone, Default)]
pub struct Sp2Result {
    pub points: Vec<SolutionPoint>,
    pub diagnostics: Vec<String>,
    pub complete: bool,
}

/// Drops every solution whose design is nested in another listed design.
pub fn non_nested_designs(solutions: &[StaticSolution]) -> Vec<StaticSolution> {
    solutions
        .iter()
        .filter(|s| !solutions.iter().any(|o| s.design.is_nested_in(&o.design)))
        .cloned()
        .collect()
}

struct Solver<'a> {
    model: &'a CtmdpModel,
    design: &'a Design,
    provenance: Provenance,
    solve: SolveOptions,
    diagnostics: Vec<String>,
    complete: bool,
}

impl Solver<'_> {
    fn point(&mut self, p: f64) -> Result<(SolutionPoint, GainPair)> {
        let sol = solve_average_cost(self.model, p, self.solve)?;
        if !sol.converged {
            self.complete = false;
            self.diagnostics.push(format!(
                "p = {p}: value iteration stopped after {} iterations with span {}",
                sol.iterations, sol.span
            ));
        }
        let gain = evaluate_policy(self.model, &sol.policy, self.model.all_healthy())?;
        let spec = PolicySpec::from_policy(self.model, &sol.policy);
        Ok((
            SolutionPoint::from_gain(gain, self.design.clone(), spec, self.provenance, Some(p)),
            gain,
        ))
    }

    fn fully_active(&self) -> Result<(SolutionPoint, GainPair)> {
        let policy = fully_active_policy(self.model);
        let gain = evaluate_policy(self.model, &policy, self.model.all_healthy())?;
        Ok((
            SolutionPoint::from_gain(gain, self.design.clone(), PolicySpec::FullyActive, self.provenance, None),
            gain,
        ))
    }

    fn dichotomic(
        &mut self,
        left: GainPair,
        right: GainPair,
        depth: usize,
        out: &mut Vec<SolutionPoint>,
    ) -> Result<()> {
        if depth >= DICHOTOMIC_MAX_DEPTH {
            self.diagnostics.push("weighted-sum recursion reached its depth cap".into());
            return Ok(());
        }
        let d_o = right.g_o - left.g_o;
        let d_f = left.g_f - right.g_f;
        if !(d_o > 0.0 && d_f > 0.0) {
            return Ok(());
        }
        let p = (d_o / d_f).clamp(PENALTY_RANGE.0, PENALTY_RANGE.1);
        let (pt, gain) = self.point(p)?;
        let on_segment = left.scalarized(p);
        if gain.scalarized(p) < on_segment - DICHOTOMIC_IMPROVEMENT * on_segment.abs().max(1e-300) {
            out.push(pt);
            self.dichotomic(left, gain, depth + 1, out)?;
            self.dichotomic(gain, right, depth + 1, out)?;
        }
        Ok(())
    }
}

/// Supported points of one design between cost-optimal and fully active maintenance.
pub fn dichotomic_points(
    model: &CtmdpModel,
    design: &Design,
    provenance: Provenance,
    solve: SolveOptions,
) -> Result<Sp2Result> {
    let mut s = Solver {
        model,
        design,
        provenance,
        solve,
        diagnostics: Vec::new(),
        complete: true,
    };
    let (lp, lg) = s.point(PENALTY_RANGE.0)?;
    let (rp, rg) = s.fully_active()?;
    let mut out = vec![lp];
    s.dichotomic(lg, rg, 0, &mut out)?;
    out.push(rp);
    Ok(Sp2Result {
        points: out,
        diagnostics: s.diagnostics,
        complete: s.complete,
    })
}

/// Dynamic points of one design.
///
/// `ln_g_f_static` is the design's fully active log failure rate; the sweep
/// stops once it is reached. Both modes end with the fully active point.
pub fn sp2(instance: &Instance, design: &Design, ln_g_f_static: f64, config: &AppConfig) -> Result<Sp2Result> {
    if !(config.p_min > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p_min",
            value: config.p_min,
            reason: "must be positive",
        });
    }
    if !(config.delta_p > 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta_p",
            value: config.delta_p,
            reason: "must exceed 1",
        });
    }
    let model = CtmdpModel::for_design(instance, design, config.model)?;
    if config.mode == Sp2Mode::Dichotomic {
        return dichotomic_points(&model, design, Provenance::Dynamic, config.solve);
    }
    let mut s = Solver {
        model: &model,
        design,
        provenance: Provenance::Dynamic,
        solve: config.solve,
        diagnostics: Vec::new(),
        complete: true,
    };
    let mut points = Vec::new();
    let mut p = config.p_min;
    let mut matched = false;
    for _ in 0..config.max_levels {
        let (pt, gain) = s.point(p)?;
        points.push(pt);
        if gain.ln_g_f <= ln_g_f_static + config.lfr_match_tolerance {
            matched = true;
            break;
        }
        p *= config.delta_p;
    }
    if !matched {
        s.complete = false;
        s.diagnostics.push(format!(
            "design {}: {} penalty levels did not reach the fully active failure rate",
            instance.format_design(design),
            config.max_levels
        ));
    }
    let (fa, _) = s.fully_active()?;
    points.push(fa);
    Ok(Sp2Result {
        points,
        diagnostics: s.diagnostics,
        complete: s.complete,
    })
}

#[derive(Debug, Clone, Default)]
pub struct AppResult {
    pub static_solutions: Vec<StaticSolution>,
    /// Designs passed to the second stage.
    pub selected: Vec<StaticSolution>,
    pub population: Vec<SolutionPoint>,
    pub front: ParetoFront,
    pub diagnostics: Vec<String>,
    pub complete: bool,
}

pub fn static_point(solution: &StaticSolution) -> SolutionPoint {
    SolutionPoint {
        g_o: solution.g_o,
        ln_g_f: solution.ln_g_f,
        design: solution.design.clone(),
        policy: PolicySpec::FullyActive,
        provenance: Provenance::Static,
        penalty: None,
    }
}

pub fn run_app(instance: &Instance, config: &AppConfig) -> Result<AppResult> {
    let static_solutions = sp1_sweep(instance, config.eps_min, config.delta_eps, config.static_config)?;
    let selected = non_nested_designs(&static_solutions);
    let runs: Vec<Result<Sp2Result>> = selected
        .par_iter()
        .map(|s| sp2(instance, &s.design, s.ln_g_f, config))
        .collect();

    let mut population: Vec<SolutionPoint> = static_solutions
        .iter()
        .filter(|s| !selected.iter().any(|t| t.design == s.design))
        .map(static_point)
        .collect();
    let mut diagnostics = Vec::new();
    let mut complete = true;
    for (s, run) in selected.iter().zip(runs) {
        match run {
            Ok(r) => {
                complete &= r.complete;
                diagnostics.extend(r.diagnostics);
                population.extend(r.points);
            }
            Err(e) => {
                complete = false;
                diagnostics.push(format!("design {}: {e}", instance.format_design(&s.design)));
                population.push(static_point(s));
            }
        }
    }
    let front = non_dom_filter(&population, DOMINANCE_TOLERANCE);
    Ok(AppResult {
        static_solutions,
        selected,
        population,
        front,
        diagnostics,
        complete,
    })
}

/// Policy on the model of a larger design that keeps at most `inner` copies of
/// each type alive and repairs nothing beyond that.
pub fn emulation_policy(model: &CtmdpModel, inner: &Design) -> Result<MaintenancePolicy> {
    if inner.len() != model.n_types() || inner.counts.iter().zip(model.bounds()).any(|(a, b)| a > b) {
        return Err(Error::BadDesign {
            design: inner.counts.clone(),
            reason: "not contained in the model's design".into(),
        });
    }
    let actions: Vec<Vec<u32>> = (0..model.n_states())
        .map(|s| {
            (0..model.n_types())
                .map(|i| {
                    let (r, d) = model.row(s, i);
                    let alive = model.healthy(s, i) + r;
                    d.min(inner.counts[i].saturating_sub(alive))
                })
                .collect()
        })
        .collect();
    MaintenancePolicy::from_actions(model, &actions)
}
