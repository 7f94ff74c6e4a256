//! Solution points, Pareto filtering, front files and front comparison.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ctmdp::{CtmdpModel, ModelOptions};
use crate::error::{Error, Result};
use crate::mdp::{evaluate_policy, fully_active_policy, GainPair, MaintenancePolicy};
use crate::model::{Design, Instance};
use crate::numfmt::sig12;

/// Absolute dominance tolerance in both objectives.
pub const DOMINANCE_TOLERANCE: f64 = 1e-9;

/// Drift allowed when re-evaluating a stored point.
pub const REVALIDATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Static,
    Dynamic,
    Exact,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Static => "static",
            Provenance::Dynamic => "dynamic",
            Provenance::Exact => "exact",
        })
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(Provenance::Static),
            "dynamic" => Ok(Provenance::Dynamic),
            "exact" => Ok(Provenance::Exact),
            other => Err(Error::Document(format!("unknown provenance `{other}`"))),
        }
    }
}

/// Policy carried by a solution point, independent of any built model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicySpec {
    FullyActive,
    /// Non-zero actions by state id of the design's model; all other states do nothing.
    Sparse(Vec<(usize, Vec<u32>)>),
}

impl PolicySpec {
    pub fn from_policy(model: &CtmdpModel, policy: &MaintenancePolicy) -> Self {
        PolicySpec::Sparse(policy.nonzero_actions(model))
    }

    pub fn to_policy(&self, model: &CtmdpModel) -> Result<MaintenancePolicy> {
        match self {
            PolicySpec::FullyActive => Ok(fully_active_policy(model)),
            PolicySpec::Sparse(actions) => {
                let mut posts: Vec<u32> = (0..model.n_states() as u32).collect();
                for (s, a) in actions {
                    if *s >= model.n_states() {
                        return Err(Error::BadPolicy(format!("state id {s} outside the model")));
                    }
                    posts[*s] = model.post_of(*s, a)? as u32;
                }
                MaintenancePolicy::from_posts(model, posts)
            }
        }
    }

    /// Policy field of a front file: `full`, `none`, or `state:action;...`.
    pub fn encode(&self) -> String {
        match self {
            PolicySpec::FullyActive => "full".into(),
            PolicySpec::Sparse(a) if a.is_empty() => "none".into(),
            PolicySpec::Sparse(a) => a
                .iter()
                .map(|(s, act)| {
                    let v: Vec<String> = act.iter().map(|x| x.to_string()).collect();
                    format!("{s}:{}", v.join(","))
                })
                .collect::<Vec<_>>()
                .join(";"),
        }
    }

    pub fn decode(text: &str) -> Result<Self> {
        match text {
            "full" => return Ok(PolicySpec::FullyActive),
            "none" => return Ok(PolicySpec::Sparse(Vec::new())),
            _ => {}
        }
        let bad = || Error::Document(format!("malformed policy field `{text}`"));
        let mut out = Vec::new();
        for entry in text.split(';') {
            let (s, a) = entry.split_once(':').ok_or_else(bad)?;
            let s: usize = s.parse().map_err(|_| bad())?;
            let a = a
                .split(',')
                .map(|v| v.parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            out.push((s, a));
        }
        Ok(PolicySpec::Sparse(out))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPoint {
    pub g_o: f64,
    pub ln_g_f: f64,
    pub design: Design,
    pub policy: PolicySpec,
    pub provenance: Provenance,
    /// Penalty of the scalarized solve that produced the point, if any.
    pub penalty: Option<f64>,
}

impl SolutionPoint {
    pub fn from_gain(gain: GainPair, design: Design, policy: PolicySpec, provenance: Provenance, penalty: Option<f64>) -> Self {
        SolutionPoint {
            g_o: gain.g_o,
            ln_g_f: gain.ln_g_f,
            design,
            policy,
            provenance,
            penalty,
        }
    }

    /// Re-evaluates the stored policy on a freshly built model of the design.
    pub fn reevaluate(&self, instance: &Instance, options: ModelOptions) -> Result<GainPair> {
        instance.check_design(&self.design)?;
        let model = CtmdpModel::for_design(instance, &self.design, options)?;
        let policy = self.policy.to_policy(&model)?;
        evaluate_policy(&model, &policy, model.all_healthy())
    }
}

fn same_value(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

/// `b` dominates `a`: no worse in both objectives and better in one, beyond `tol`.
pub fn dominates(b: &SolutionPoint, a: &SolutionPoint, tol: f64) -> bool {
    let no_worse = |x: f64, y: f64| x == y || x <= y + tol;
    let better = |x: f64, y: f64| x < y - tol;
    no_worse(b.g_o, a.g_o)
        && no_worse(b.ln_g_f, a.ln_g_f)
        && (better(b.g_o, a.g_o) || better(b.ln_g_f, a.ln_g_f))
}

fn duplicates(a: &SolutionPoint, b: &SolutionPoint, tol: f64) -> bool {
    same_value(a.g_o, b.g_o, tol) && same_value(a.ln_g_f, b.ln_g_f, tol)
}

/// Deterministic preference among duplicate points.
fn precedence(a: &SolutionPoint, b: &SolutionPoint) -> std::cmp::Ordering {
    a.provenance
        .cmp(&b.provenance)
        .then_with(|| a.design.cmp(&b.design))
        .then_with(|| {
            a.penalty
                .unwrap_or(f64::INFINITY)
                .total_cmp(&b.penalty.unwrap_or(f64::INFINITY))
        })
}

/// Non-dominated points in ascending `g_o`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub points: Vec<SolutionPoint>,
}

/// Keeps the points no other point dominates; of each group of duplicates the
/// first by (provenance, design, penalty) survives.
pub fn non_dom_filter(points: &[SolutionPoint], tol: f64) -> ParetoFront {
    let mut ordered: Vec<&SolutionPoint> = points.iter().collect();
    ordered.sort_by(|a, b| precedence(a, b));
    let undominated: Vec<bool> = ordered
        .iter()
        .map(|a| !ordered.iter().any(|b| dominates(b, a, tol)))
        .collect();
    let mut kept: Vec<SolutionPoint> = Vec::new();
    for (k, a) in ordered.iter().enumerate() {
        if !undominated[k] {
            continue;
        }
        if (0..k).any(|j| undominated[j] && duplicates(a, ordered[j], tol)) {
            continue;
        }
        kept.push((*a).clone());
    }
    kept.sort_by(|a, b| a.g_o.total_cmp(&b.g_o).then(b.ln_g_f.total_cmp(&a.ln_g_f)));
    ParetoFront { points: kept }
}

/// Relative slack when testing whether a front point lies above the hull.
pub const HULL_TOLERANCE: f64 = 1e-9;

/// Points of a front that minimize `g_o + w g_f` for some `w > 0`: the lower
/// convex hull in `(g_o, g_f)`, keeping points that lie on a hull edge.
/// `front` must be ascending in `g_o` and descending in `ln_g_f`.
pub fn supported_points(front: &ParetoFront) -> ParetoFront {
    let pts = &front.points;
    let xy: Vec<(f64, f64)> = pts.iter().map(|p| (p.g_o, p.ln_g_f.exp())).collect();
    let mut hull: Vec<usize> = Vec::new();
    for c in 0..pts.len() {
        while hull.len() >= 2 {
            let (a, b) = (xy[hull[hull.len() - 2]], xy[hull[hull.len() - 1]]);
            let lhs = (b.1 - a.1) * (xy[c].0 - a.0);
            let rhs = (xy[c].1 - a.1) * (b.0 - a.0);
            if lhs > rhs + HULL_TOLERANCE * lhs.abs().max(rhs.abs()) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(c);
    }
    ParetoFront {
        points: hull.into_iter().map(|k| pts[k].clone()).collect(),
    }
}

/// Front file: one point per line, design counts in catalog order.
pub fn export_front(instance: &Instance, points: &[SolutionPoint]) -> String {
    let mut out = String::from("# provenance design p g_o ln_g_f policy\n");
    for pt in points {
        out.push_str(&format!(
            "{} {} {} {} {} {}\n",
            pt.provenance,
            instance.format_design(&pt.design),
            pt.penalty.map_or_else(|| "-".to_string(), sig12),
            sig12(pt.g_o),
            sig12(pt.ln_g_f),
            pt.policy.encode()
        ));
    }
    out
}

pub fn parse_front(instance: &Instance, text: &str) -> Result<Vec<SolutionPoint>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { line: k + 1, message };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(err(format!("expected 6 fields, found {}", f.len())));
        }
        let provenance: Provenance = f[0].parse()?;
        let counts = f[1]
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(|v| v.parse::<u32>().map_err(|_| err(format!("bad design `{}`", f[1]))))
            .collect::<Result<Vec<_>>>()?;
        let design = instance.design_from_catalog(&counts)?;
        let num = |s: &str| -> Result<f64> {
            match s {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`"))),
            }
        };
        let penalty = if f[2] == "-" { None } else { Some(num(f[2])?) };
        out.push(SolutionPoint {
            g_o: num(f[3])?,
            ln_g_f: num(f[4])?,
            design,
            policy: PolicySpec::decode(f[5])?,
            provenance,
            penalty,
        });
    }
    Ok(out)
}

/// Re-evaluates every point; returns the indices whose stored values drifted.
pub fn revalidate(instance: &Instance, points: &[SolutionPoint], options: ModelOptions) -> Result<Vec<usize>> {
    let mut bad = Vec::new();
    for (k, pt) in points.iter().enumerate() {
        let g = pt.reevaluate(instance, options)?;
        let ok = same_value(g.g_o, pt.g_o, REVALIDATION_TOLERANCE)
            && same_value(g.ln_g_f, pt.ln_g_f, REVALIDATION_TOLERANCE);
        if !ok {
            bad.push(k);
        }
    }
    Ok(bad)
}

/// Plot data: one block per design, `g_o ln_g_f` per line, blocks separated by blank lines.
pub fn plot_data(instance: &Instance, points: &[SolutionPoint]) -> String {
    let mut designs: Vec<&Design> = points.iter().map(|p| &p.design).collect();
    designs.sort();
    designs.dedup();
    let mut out = String::new();
    for d in designs {
        out.push_str(&format!("# design {}\n", instance.format_design(d)));
        let mut pts: Vec<&SolutionPoint> = points.iter().filter(|p| &p.design == d).collect();
        pts.sort_by(|a, b| a.g_o.total_cmp(&b.g_o));
        for p in pts {
            out.push_str(&format!("{} {}\n", sig12(p.g_o), sig12(p.ln_g_f)));
        }
        out.push_str("\n\n");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchStatus {
    /// A point of the other front lies within tolerance.
    Present,
    /// Some point of the other front dominates this one.
    Dominated,
    /// Neither present nor dominated.
    Absent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub point: SolutionPoint,
    pub status: MatchStatus,
    /// Index in the other front of a dominating point, preferring non-static ones.
    pub dominator: Option<usize>,
    /// Euclidean distance in `(g_o, ln_g_f)` to the nearest point of the other front.
    pub nearest_distance: f64,
    /// Largest relative objective difference to that nearest point.
    pub nearest_relative: f64,
}

/// Compares every point of `subject` against the front `other`.
pub fn compare_fronts(subject: &[SolutionPoint], other: &[SolutionPoint], tol: f64) -> Vec<ComparisonRow> {
    subject
        .iter()
        .map(|a| {
            let dominators: Vec<usize> = (0..other.len()).filter(|&k| dominates(&other[k], a, tol)).collect();
            let dominator = dominators
                .iter()
                .copied()
                .find(|&k| other[k].provenance != Provenance::Static)
                .or_else(|| dominators.first().copied());
            let mut nearest = (f64::INFINITY, f64::INFINITY);
            for b in other {
                let dist = |x: f64, y: f64| if x == y { 0.0 } else { x - y };
                let (dx, dy) = (dist(a.g_o, b.g_o), dist(a.ln_g_f, b.ln_g_f));
                let d = dx.hypot(dy);
                if d < nearest.0 {
                    let rel = |x: f64, y: f64| if x == y { 0.0 } else { (x - y).abs() / x.abs().max(y.abs()).max(1e-300) };
                    nearest = (d, rel(a.g_o, b.g_o).max(rel(a.ln_g_f, b.ln_g_f)));
                }
            }
            let status = if dominator.is_some() {
                MatchStatus::Dominated
            } else if other.iter().any(|b| duplicates(a, b, tol)) {
                MatchStatus::Present
            } else {
                MatchStatus::Absent
            };
            ComparisonRow {
                point: a.clone(),
                status,
                dominator,
                nearest_distance: nearest.0,
                nearest_relative: nearest.1,
            }
        })
        .collect()
}

/// Tabular comparison report.
pub fn format_comparison(instance: &Instance, rows: &[ComparisonRow], other: &[SolutionPoint]) -> String {
    let mut out = String::from("# provenance design g_o ln_g_f status dominator_provenance dominator_design nearest_distance nearest_relative\n");
    for r in rows {
        let status = match r.status {
            MatchStatus::Present => "present",
            MatchStatus::Dominated => "dominated",
            MatchStatus::Absent => "absent",
        };
        let (dp, dd) = match r.dominator {
            Some(k) => (other[k].provenance.to_string(), instance.format_design(&other[k].design)),
            None => ("-".into(), "-".into()),
        };
        out.push_str(&format!(
            "{} {} {} {} {} {} {} {} {}\n",
            r.point.provenance,
            instance.format_design(&r.point.design),
            sig12(r.point.g_o),
            sig12(r.point.ln_g_f),
            status,
            dp,
            dd,
            sig12(r.nearest_distance),
            sig12(r.nearest_relative)
        ));
    }
    out
}
