//! Exact supported front by enumerating designs and running the weighted-sum
//! recursion on each design's maintenance model. Points that are supported
//! within their own design but not across designs are dropped.

use rayon::prelude::*;

use crate::app::{dichotomic_points, Sp2Result};
use crate::ctmdp::ModelOptions;
use crate::ctmdp::CtmdpModel;
use crate::error::{Error, Result};
use crate::front::{non_dom_filter, supported_points, ParetoFront, Provenance, SolutionPoint};
use crate::mdp::SolveOptions;
use crate::model::{Design, Instance};

pub const DEFAULT_DESIGN_CEILING: usize = 1_000_000;

/// Knapsack-feasible designs in lexicographic order; with `maximal_only`, only
/// those to which no further copy can be added.
pub fn enumerate_feasible_designs(instance: &Instance, maximal_only: bool, ceiling: usize) -> Result<Vec<Design>> {
    let mut out = Vec::new();
    let mut overflow = false;
    instance.visit_feasible(instance.copy_bounds(), |x| {
        if overflow {
            return;
        }
        if maximal_only && is_extendable(instance, x) {
            return;
        }
        if out.len() == ceiling {
            overflow = true;
            return;
        }
        out.push(Design::new(x.to_vec()));
    });
    if overflow {
        let mut count: u128 = 0;
        instance.visit_feasible(instance.copy_bounds(), |x| {
            if !maximal_only || !is_extendable(instance, x) {
                count += 1;
            }
        });
        return Err(Error::DesignSpaceTooLarge { count, ceiling });
    }
    Ok(out)
}

fn is_extendable(instance: &Instance, x: &[u32]) -> bool {
    let mut y = x.to_vec();
    (0..x.len()).any(|i| {
        if y[i] >= instance.copy_bounds()[i] {
            return false;
        }
        y[i] += 1;
        let ok = instance.fits_knapsack(&y);
        y[i] -= 1;
        ok
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactConfig {
    pub maximal_only: bool,
    pub tolerance: f64,
    pub solve: SolveOptions,
    pub model: ModelOptions,
    pub design_ceiling: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            maximal_only: false,
            tolerance: crate::front::DOMINANCE_TOLERANCE,
            solve: SolveOptions::default(),
            model: ModelOptions::default(),
            design_ceiling: DEFAULT_DESIGN_CEILING,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExactResult {
    pub designs: usize,
    pub points: Vec<SolutionPoint>,
    pub front: ParetoFront,
    pub diagnostics: Vec<String>,
    pub complete: bool,
}

pub fn exact_front(instance: &Instance, config: &ExactConfig) -> Result<ExactResult> {
    let designs = enumerate_feasible_designs(instance, config.maximal_only, config.design_ceiling)?;
    let runs: Vec<Result<Sp2Result>> = designs
        .par_iter()
        .map(|d| {
            let model = CtmdpModel::for_design(instance, d, config.model)?;
            dichotomic_points(&model, d, Provenance::Exact, config.solve)
        })
        .collect();
    let mut points = Vec::new();
    let mut diagnostics = Vec::new();
    let mut complete = true;
    for (d, run) in designs.iter().zip(runs) {
        match run {
            Ok(r) => {
                complete &= r.complete;
                diagnostics.extend(r.diagnostics);
                points.extend(r.points);
            }
            Err(e) => {
                complete = false;
                diagnostics.push(format!("design {}: {e}", instance.format_design(d)));
            }
        }
    }
    let front = supported_points(&non_dom_filter(&points, config.tolerance));
    Ok(ExactResult {
        designs: designs.len(),
        points,
        front,
        diagnostics,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_instance, ComponentType, Constraint};

    fn single(bound: f64, extra_zero_row: bool) -> Instance {
        let t = ComponentType {
            label: "a".into(),
            alpha: 0.01 / 0.99,
            tau: 1.0,
            usage_cost: 1.0,
            repair_cost: 100.0,
            install_cost: 1.0,
            weight: 1.0,
            catalog_index: 0,
        };
        let mut rows = vec![Constraint {
            name: "w".into(),
            coefficients: vec![1.0],
            bound,
        }];
        if extra_zero_row {
            rows.push(Constraint {
                name: "z".into(),
                coefficients: vec![1.0],
                bound: 0.0,
            });
        }
        Instance::new(vec![t], rows).unwrap()
    }

    #[test]
    fn design_enumeration_examples() {
        let inst = parse_instance(include_str!("../../../instances/base-6-20")).unwrap();
        let designs = enumerate_feasible_designs(&inst, false, DEFAULT_DESIGN_CEILING).unwrap();
        let mut grid = 0;
        for a in 0..=4u32 {
            for b in 0..=5u32 {
                for c in 0..=4u32 {
                    for d in 0..=5u32 {
                        if 3 * (a + b) + 2 * (c + d) <= 20 && 5 * (a + c) + 4 * (b + d) <= 20 {
                            grid += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(designs.len(), grid);
        assert!(designs.windows(2).all(|w| w[0] < w[1]));

        let one = single(3.0, false);
        let all: Vec<Vec<u32>> = enumerate_feasible_designs(&one, false, 10)
            .unwrap()
            .into_iter()
            .map(|d| d.counts)
            .collect();
        assert_eq!(all, vec![vec![0], vec![1], vec![2], vec![3]]);
        let max: Vec<Vec<u32>> = enumerate_feasible_designs(&one, true, 10)
            .unwrap()
            .into_iter()
            .map(|d| d.counts)
            .collect();
        assert_eq!(max, vec![vec![3]]);
        let zero = enumerate_feasible_designs(&single(3.0, true), false, 10).unwrap();
        assert_eq!(zero, vec![Design::empty(1)]);
        assert!(matches!(
            enumerate_feasible_designs(&one, false, 2),
            Err(Error::DesignSpaceTooLarge { count: 4, ceiling: 2 })
        ));
    }

    #[test]
    fn single_type_bound_one_front() {
        let r = exact_front(&single(1.0, false), &ExactConfig::default()).unwrap();
        assert!(r.complete);
        let v: Vec<(f64, f64)> = r.front.points.iter().map(|p| (p.g_o, p.ln_g_f)).collect();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0], (0.0, 0.0));
        assert!((v[1].0 - 1.99).abs() < 1e-9 && (v[1].1 - 0.01f64.ln()).abs() < 1e-9);
    }
}
