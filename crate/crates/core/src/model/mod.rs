//! Component catalogs, knapsack constraints, designs and copy bounds.
//!
//! An [`Instance`] keeps its component types sorted by ascending usage cost
//! (stable in catalog position). Every design, state and policy in the crate is
//! expressed in that sorted order; [`Instance::to_catalog_order`] and
//! [`Instance::from_catalog_order`] convert at the edges.

mod document;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use document::{parse_instance, write_table_document};

/// Slack applied before taking floors and ceilings of ratios that should be integral.
const ROUNDING_SLACK: f64 = 1e-9;

/// Tolerance used when a document gives both `alpha` and `p` for a type.
pub const RATE_AGREEMENT_TOLERANCE: f64 = 1e-9;

/// One catalog row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentType {
    pub label: String,
    pub alpha: f64,
    pub tau: f64,
    pub usage_cost: f64,
    pub repair_cost: f64,
    pub install_cost: f64,
    pub weight: f64,
    /// Position of this type in the source catalog (0-based).
    pub catalog_index: usize,
}

impl ComponentType {
    /// Steady-state probability that a fully maintained copy is healthy.
    pub fn p(&self) -> f64 {
        self.tau / (self.tau + self.alpha)
    }

    pub fn q(&self) -> f64 {
        self.alpha / (self.tau + self.alpha)
    }

    pub fn ln_q(&self) -> f64 {
        self.alpha.ln() - (self.tau + self.alpha).ln()
    }
}

/// One knapsack row `coefficients · x <= bound`.
///
/// Inside an [`Instance`] the coefficients follow the sorted component order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub coefficients: Vec<f64>,
    pub bound: f64,
}

/// Copy counts per component type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Design {
    pub counts: Vec<u32>,
}

impl Design {
    pub fn new(counts: Vec<u32>) -> Self {
        Design { counts }
    }

    pub fn empty(n: usize) -> Self {
        Design { counts: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Componentwise `self <= other` with at least one strict inequality.
    pub fn is_nested_in(&self, other: &Design) -> bool {
        self.counts.len() == other.counts.len()
            && self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b)
            && self.counts != other.counts
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.counts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Solves `tau / (tau + alpha) = p` for `alpha`.
pub fn derive_failure_rate(p: f64, tau: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidValue {
            what: "reliability p".into(),
            value: p,
            reason: "must lie strictly between 0 and 1",
        });
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidValue {
            what: "repair rate tau".into(),
            value: tau,
            reason: "must be positive and finite",
        });
    }
    Ok(tau * (1.0 - p) / p)
}

/// Which usage cost scales the failure penalty of the static scalarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PenaltyBasis {
    /// Usage cost of the last type in catalog order.
    #[default]
    LastCatalogType,
    /// Largest usage cost over all types.
    MostExpensive,
}

impl PenaltyBasis {
    pub fn reference_cost(self, instance: &Instance) -> f64 {
        match self {
            PenaltyBasis::LastCatalogType => {
                let last = instance.n_types() - 1;
                instance
                    .components
                    .iter()
                    .find(|c| c.catalog_index == last)
                    .map(|c| c.usage_cost)
                    .unwrap_or(0.0)
            }
            PenaltyBasis::MostExpensive => instance.max_usage_cost(),
        }
    }
}

/// Result of [`tightened_copy_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct CopyBound {
    pub bound: u32,
    /// Set when the analytic bound was not applicable and the knapsack bound was used.
    pub warning: Option<String>,
}

/// Problem instance: sorted component types, knapsack rows and per-type copy bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    components: Vec<ComponentType>,
    constraints: Vec<Constraint>,
    copy_bounds: Vec<u32>,
}

impl Instance {
    /// Builds an instance from types and constraint rows given in catalog order.
    ///
    /// `catalog_index` fields are overwritten with the input positions.
    pub fn new(mut types: Vec<ComponentType>, constraints: Vec<Constraint>) -> Result<Self> {
        if types.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        let n = types.len();
        for (k, t) in types.iter_mut().enumerate() {
            t.catalog_index = k;
            validate_type(t)?;
        }
        for row in &constraints {
            if row.coefficients.len() != n {
                return Err(Error::Document(format!(
                    "constraint `{}` has {} coefficients, expected {n}",
                    row.name,
                    row.coefficients.len()
                )));
            }
            for &a in &row.coefficients {
                non_negative(&format!("constraint `{}` coefficient", row.name), a)?;
            }
            non_negative(&format!("constraint `{}` bound", row.name), row.bound)?;
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| types[a].usage_cost.total_cmp(&types[b].usage_cost));
        let components: Vec<ComponentType> = order.iter().map(|&k| types[k].clone()).collect();
        let constraints: Vec<Constraint> = constraints
            .into_iter()
            .map(|row| Constraint {
                coefficients: order.iter().map(|&k| row.coefficients[k]).collect(),
                ..row
            })
            .collect();

        let mut instance = Instance {
            components,
            constraints,
            copy_bounds: vec![0; n],
        };
        for i in 0..n {
            instance.copy_bounds[i] = match instance.knapsack_copy_bound(i) {
                Some(m) => m,
                None => {
                    let penalty = 1.1 * instance.max_usage_cost();
                    analytic_copy_bound(&instance.components[i], penalty, 0.0).ok_or_else(|| {
                        Error::UnboundedComponent {
                            component: instance.components[i].label.clone(),
                        }
                    })?
                }
            };
        }
        Ok(instance)
    }

    /// Reads an instance file in either supported encoding.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        parse_instance(&text)
    }

    pub fn components(&self) -> &[ComponentType] {
        &self.components
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn copy_bounds(&self) -> &[u32] {
        &self.copy_bounds
    }

    pub fn n_types(&self) -> usize {
        self.components.len()
    }

    pub fn max_usage_cost(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.usage_cost)
            .fold(0.0, f64::max)
    }

    /// Component types back in catalog order.
    pub fn catalog_types(&self) -> Vec<ComponentType> {
        let mut types = self.components.clone();
        types.sort_by_key(|c| c.catalog_index);
        types
    }

    /// Constraint rows with coefficients in catalog order.
    pub fn catalog_constraints(&self) -> Vec<Constraint> {
        self.constraints
            .iter()
            .map(|row| Constraint {
                name: row.name.clone(),
                coefficients: self.to_catalog_order(&row.coefficients),
                bound: row.bound,
            })
            .collect()
    }

    /// Rebuilds the instance after editing the catalog-ordered type list.
    pub fn modified(&self, edit: impl FnOnce(&mut [ComponentType])) -> Result<Instance> {
        let mut types = self.catalog_types();
        edit(&mut types);
        Instance::new(types, self.catalog_constraints())
    }

    /// Scales `alpha` and `tau` of each catalog type by the matching multiplier.
    pub fn with_rate_multipliers(&self, multipliers: &[f64]) -> Result<Instance> {
        if multipliers.len() != self.n_types() {
            return Err(Error::Document(format!(
                "{} rate multipliers given for {} component types",
                multipliers.len(),
                self.n_types()
            )));
        }
        for &m in multipliers {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidValue {
                    what: "rate multiplier".into(),
                    value: m,
                    reason: "must be positive and finite",
                });
            }
        }
        self.modified(|types| {
            for (t, &m) in types.iter_mut().zip(multipliers) {
                t.alpha *= m;
                t.tau *= m;
            }
        })
    }

    /// Reorders a catalog-ordered vector into the sorted component order.
    pub fn from_catalog_order<T: Clone>(&self, values: &[T]) -> Vec<T> {
        self.components
            .iter()
            .map(|c| values[c.catalog_index].clone())
            .collect()
    }

    /// Reorders a vector in sorted component order back into catalog order.
    pub fn to_catalog_order<T: Clone>(&self, values: &[T]) -> Vec<T> {
        let mut slots: Vec<Option<T>> = vec![None; values.len()];
        for (c, v) in self.components.iter().zip(values) {
            slots[c.catalog_index] = Some(v.clone());
        }
        slots.into_iter().map(|v| v.expect("permutation")).collect()
    }

    /// Design from catalog-ordered counts, checked against bounds and knapsack rows.
    pub fn design_from_catalog(&self, counts: &[u32]) -> Result<Design> {
        if counts.len() != self.n_types() {
            return Err(Error::BadDesign {
                design: counts.to_vec(),
                reason: format!("expected {} counts", self.n_types()),
            });
        }
        let design = Design::new(self.from_catalog_order(counts));
        self.check_design(&design)?;
        Ok(design)
    }

    pub fn catalog_counts(&self, design: &Design) -> Vec<u32> {
        self.to_catalog_order(&design.counts)
    }

    /// Formats a design in catalog order, e.g. `(1,0,2,0)`.
    pub fn format_design(&self, design: &Design) -> String {
        Design::new(self.catalog_counts(design)).to_string()
    }

    pub fn check_design(&self, design: &Design) -> Result<()> {
        if design.len() != self.n_types() {
            return Err(Error::BadDesign {
                design: design.counts.clone(),
                reason: format!("expected {} counts", self.n_types()),
            });
        }
        if !self.is_feasible(design) {
            return Err(Error::BadDesign {
                design: self.catalog_counts(design),
                reason: "violates a knapsack row or copy bound".into(),
            });
        }
        Ok(())
    }

    /// Knapsack feasibility plus copy bounds.
    pub fn is_feasible(&self, design: &Design) -> bool {
        design.len() == self.n_types()
            && design
                .counts
                .iter()
                .zip(&self.copy_bounds)
                .all(|(x, m)| x <= m)
            && self.fits_knapsack(&design.counts)
    }

    pub fn fits_knapsack(&self, counts: &[u32]) -> bool {
        self.constraints.iter().all(|row| {
            let used: f64 = row
                .coefficients
                .iter()
                .zip(counts)
                .map(|(a, &x)| a * x as f64)
                .sum();
            used <= row.bound * (1.0 + 1e-12) + 1e-12
        })
    }

    /// Visits every knapsack-feasible design with `x_i <= limits[i]` in lexicographic order.
    pub fn visit_feasible(&self, limits: &[u32], mut visit: impl FnMut(&[u32])) {
        let n = self.n_types();
        let mut x = vec![0u32; n];
        let mut used = vec![0.0; self.constraints.len()];
        self.visit_rec(0, limits, &mut x, &mut used, &mut visit);
    }

    fn visit_rec(
        &self,
        i: usize,
        limits: &[u32],
        x: &mut Vec<u32>,
        used: &mut Vec<f64>,
        visit: &mut impl FnMut(&[u32]),
    ) {
        if i == x.len() {
            visit(x);
            return;
        }
        let base = used.clone();
        for k in 0..=limits[i].min(self.copy_bounds[i]) {
            let fits = self.constraints.iter().enumerate().all(|(j, row)| {
                used[j] = base[j] + row.coefficients[i] * k as f64;
                used[j] <= row.bound * (1.0 + 1e-12) + 1e-12
            });
            if !fits {
                break;
            }
            x[i] = k;
            self.visit_rec(i + 1, limits, x, used, visit);
        }
        x[i] = 0;
        used.copy_from_slice(&base);
    }

    /// `floor(min_j b_j / A_ji)` over rows touching type `i`, or `None` if no row does.
    pub fn knapsack_copy_bound(&self, i: usize) -> Option<u32> {
        self.constraints
            .iter()
            .filter(|row| row.coefficients[i] > 0.0)
            .map(|row| floor_slack(row.bound / row.coefficients[i]))
            .min()
    }
}

fn floor_slack(v: f64) -> u32 {
    let f = (v + ROUNDING_SLACK).floor();
    if f <= 0.0 {
        0
    } else if f >= u32::MAX as f64 {
        u32::MAX
    } else {
        f as u32
    }
}

fn ceil_slack(v: f64) -> f64 {
    (v - ROUNDING_SLACK).ceil()
}

fn non_negative(what: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidValue {
            what: what.to_string(),
            value: v,
            reason: "must be non-negative and finite",
        })
    }
}

fn validate_type(t: &ComponentType) -> Result<()> {
    let name = |field: &str| format!("component {} {field}", t.label);
    if !(t.alpha > 0.0 && t.alpha.is_finite()) {
        return Err(Error::InvalidValue {
            what: name("alpha"),
            value: t.alpha,
            reason: "must be positive and finite",
        });
    }
    if !(t.tau > 0.0 && t.tau.is_finite()) {
        return Err(Error::InvalidValue {
            what: name("tau"),
            value: t.tau,
            reason: "must be positive and finite",
        });
    }
    non_negative(&name("usage_cost"), t.usage_cost)?;
    non_negative(&name("repair_cost"), t.repair_cost)?;
    non_negative(&name("install_cost"), t.install_cost)?;
    non_negative(&name("weight"), t.weight)?;
    let q = t.q();
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidValue {
            what: name("steady-state failure probability"),
            value: q,
            reason: "rates give a degenerate reliability",
        });
    }
    Ok(())
}

/// Analytic copy bound for one type under failure penalty coefficient `penalty`
/// and log-failure target `epsilon`. `None` when the bound is infinite.
fn analytic_copy_bound(t: &ComponentType, penalty: f64, epsilon: f64) -> Option<u32> {
    let ln_q = t.ln_q();
    let q = t.q();
    let margin = penalty - t.usage_cost;
    if margin <= 0.0 || t.repair_cost <= 0.0 {
        return None;
    }
    let arg = -q * t.repair_cost / (margin * ln_q);
    let convex = ceil_slack(arg.ln() / ln_q);
    let target = ceil_slack(epsilon / ln_q);
    let b = convex.max(target).max(0.0);
    if !b.is_finite() || b >= u32::MAX as f64 {
        return None;
    }
    Some(b as u32)
}

/// Upper bound on the copies of type `i` in any optimal solution of the
/// ε-constrained static problem with failure penalty `(1+delta)` times the
/// reference usage cost.
///
/// The analytic bound needs the penalty to exceed every usage cost; otherwise
/// the knapsack bound is returned together with a warning.
pub fn tightened_copy_bound(
    instance: &Instance,
    i: usize,
    epsilon: f64,
    delta: f64,
    basis: PenaltyBasis,
) -> Result<CopyBound> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
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
    let knapsack = instance.copy_bounds[i];
    let penalty = (1.0 + delta) * basis.reference_cost(instance);
    let t = &instance.components[i];
    if penalty < instance.max_usage_cost() || penalty <= t.usage_cost {
        return Ok(CopyBound {
            bound: knapsack,
            warning: Some(format!(
                "type {}: failure penalty {penalty} does not exceed every usage cost; using the knapsack bound",
                t.label
            )),
        });
    }
    match analytic_copy_bound(t, penalty, epsilon) {
        Some(b) => Ok(CopyBound {
            bound: b.min(knapsack),
            warning: None,
        }),
        None => Ok(CopyBound {
            bound: knapsack,
            warning: Some(format!(
                "type {}: analytic copy bound is unbounded; using the knapsack bound",
                t.label
            )),
        }),
    }
}
