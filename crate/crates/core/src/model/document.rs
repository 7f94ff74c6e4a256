//! Instance documents: a JSON record form and a line-oriented table form.

use serde::Deserialize;

use super::{derive_failure_rate, ComponentType, Constraint, Instance, RATE_AGREEMENT_TOLERANCE};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDocument {
    components: Vec<JsonComponent>,
    #[serde(default)]
    constraints: Vec<JsonConstraint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonComponent {
    label: Option<String>,
    p: Option<f64>,
    alpha: Option<f64>,
    tau: Option<f64>,
    usage_cost: Option<f64>,
    repair_cost: Option<f64>,
    install_cost: Option<f64>,
    weight: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonConstraint {
    name: String,
    coefficients: Vec<f64>,
    bound: f64,
}

/// Raw per-type fields before validation.
#[derive(Default)]
struct RawComponent {
    label: String,
    p: Option<f64>,
    alpha: Option<f64>,
    tau: Option<f64>,
    usage_cost: Option<f64>,
    repair_cost: Option<f64>,
    install_cost: Option<f64>,
    weight: Option<f64>,
}

impl RawComponent {
    fn resolve(self) -> Result<ComponentType> {
        let missing = |field: &str| Error::MissingField {
            component: self.label.clone(),
            field: field.to_string(),
        };
        let tau = self.tau.ok_or_else(|| missing("tau"))?;
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidValue {
                what: format!("component {} tau", self.label),
                value: tau,
                reason: "must be positive and finite",
            });
        }
        let alpha = match (self.alpha, self.p) {
            (None, None) => return Err(missing("p or alpha")),
            (Some(a), None) => a,
            (None, Some(p)) => derive_failure_rate(p, tau).map_err(|_| Error::InvalidValue {
                what: format!("component {} p", self.label),
                value: p,
                reason: "must lie strictly between 0 and 1",
            })?,
            (Some(a), Some(p)) => {
                derive_failure_rate(p, tau)?;
                let implied = tau / (tau + a);
                if (implied - p).abs() > RATE_AGREEMENT_TOLERANCE {
                    return Err(Error::InvalidValue {
                        what: format!("component {} alpha", self.label),
                        value: a,
                        reason: "disagrees with the given reliability p",
                    });
                }
                a
            }
        };
        Ok(ComponentType {
            alpha,
            tau,
            usage_cost: self.usage_cost.ok_or_else(|| missing("usage_cost"))?,
            repair_cost: self.repair_cost.ok_or_else(|| missing("repair_cost"))?,
            install_cost: self.install_cost.ok_or_else(|| missing("install_cost"))?,
            weight: self.weight.ok_or_else(|| missing("weight"))?,
            catalog_index: 0,
            label: self.label,
        })
    }
}

/// Parses an instance document, detecting the encoding from its first character.
pub fn parse_instance(text: &str) -> Result<Instance> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_table(text)
    }
}

fn parse_json(text: &str) -> Result<Instance> {
    let doc: JsonDocument = serde_json::from_str(text)?;
    let types = doc
        .components
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            RawComponent {
                label: c.label.unwrap_or_else(|| (k + 1).to_string()),
                p: c.p,
                alpha: c.alpha,
                tau: c.tau,
                usage_cost: c.usage_cost,
                repair_cost: c.repair_cost,
                install_cost: c.install_cost,
                weight: c.weight,
            }
            .resolve()
        })
        .collect::<Result<Vec<_>>>()?;
    let constraints = doc
        .constraints
        .into_iter()
        .map(|c| Constraint {
            name: c.name,
            coefficients: c.coefficients,
            bound: c.bound,
        })
        .collect();
    Instance::new(types, constraints)
}

#[derive(PartialEq)]
enum Section {
    None,
    Components,
    Constraints,
}

const COLUMNS: [&str; 8] = [
    "label",
    "p",
    "alpha",
    "tau",
    "usage_cost",
    "repair_cost",
    "install_cost",
    "weight",
];

fn parse_table(text: &str) -> Result<Instance> {
    let mut section = Section::None;
    let mut header: Option<Vec<usize>> = None;
    let mut types = Vec::new();
    let mut constraints = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "[components]" => {
                section = Section::Components;
                continue;
            }
            "[constraints]" => {
                section = Section::Constraints;
                continue;
            }
            _ => {}
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::None => return Err(err("content before any [section] header".into())),
            Section::Components => match &header {
                None => {
                    let mut cols = Vec::new();
                    for f in &fields {
                        let pos = COLUMNS
                            .iter()
                            .position(|c| c == f)
                            .ok_or_else(|| err(format!("unknown column `{f}`")))?;
                        if cols.contains(&pos) {
                            return Err(err(format!("duplicate column `{f}`")));
                        }
                        cols.push(pos);
                    }
                    header = Some(cols);
                }
                Some(cols) => {
                    if fields.len() != cols.len() {
                        return Err(err(format!(
                            "expected {} fields, found {}",
                            cols.len(),
                            fields.len()
                        )));
                    }
                    let mut rc = RawComponent {
                        label: (types.len() + 1).to_string(),
                        ..Default::default()
                    };
                    for (&col, &f) in cols.iter().zip(&fields) {
                        if col == 0 {
                            rc.label = f.to_string();
                            continue;
                        }
                        let v = if f == "-" {
                            None
                        } else {
                            Some(f.parse::<f64>().map_err(|_| {
                                err(format!("`{f}` is not a number for column {}", COLUMNS[col]))
                            })?)
                        };
                        match col {
                            1 => rc.p = v,
                            2 => rc.alpha = v,
                            3 => rc.tau = v,
                            4 => rc.usage_cost = v,
                            5 => rc.repair_cost = v,
                            6 => rc.install_cost = v,
                            _ => rc.weight = v,
                        }
                    }
                    types.push(rc.resolve()?);
                }
            },
            Section::Constraints => {
                if fields.len() < 2 {
                    return Err(err("constraint rows read `name bound coefficients...`".into()));
                }
                let nums = fields[1..]
                    .iter()
                    .map(|f| {
                        f.parse::<f64>()
                            .map_err(|_| err(format!("`{f}` is not a number")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                constraints.push(Constraint {
                    name: fields[0].to_string(),
                    bound: nums[0],
                    coefficients: nums[1..].to_vec(),
                });
            }
        }
    }
    Instance::new(types, constraints)
}

/// Serializes an instance in the table encoding, catalog order, rates as `alpha`.
pub fn write_table_document(instance: &Instance) -> String {
    let mut out = String::from("[components]\nlabel alpha tau usage_cost repair_cost install_cost weight\n");
    for t in instance.catalog_types() {
        out.push_str(&format!(
            "{} {:e} {:e} {:e} {:e} {:e} {:e}\n",
            t.label, t.alpha, t.tau, t.usage_cost, t.repair_cost, t.install_cost, t.weight
        ));
    }
    out.push_str("[constraints]\n");
    for row in instance.catalog_constraints() {
        out.push_str(&format!("{} {:e}", row.name, row.bound));
        for a in row.coefficients {
            out.push_str(&format!(" {a:e}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const JSON: &str = r#"{
        "components": [
            {"label": "1", "p": 0.99, "tau": 1, "usage_cost": 1, "repair_cost": 100, "install_cost": 3, "weight": 5},
            {"label": "2", "alpha": 0.5, "tau": 2, "usage_cost": 0.5, "repair_cost": 10, "install_cost": 3, "weight": 4}
        ],
        "constraints": [{"name": "w", "coefficients": [5, 4], "bound": 20}]
    }"#;

    #[test]
    fn json_round_trip_through_table() {
        let inst = parse_instance(JSON).unwrap();
        assert_eq!(inst.components()[0].label, "2");
        assert_eq!(inst.copy_bounds(), &[5, 4]);
        let again = parse_instance(&write_table_document(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn reliability_column_derives_alpha() {
        let text = "[components]\nlabel p tau usage_cost repair_cost install_cost weight\nx 0.5 2 1 1 1 1\n[constraints]\nw 3 1\n";
        let inst = parse_instance(text).unwrap();
        assert!((inst.components()[0].alpha - 2.0).abs() < 1e-15);
        assert_eq!(inst.copy_bounds(), &[3]);
    }

    #[test]
    fn both_rates_must_agree() {
        let ok = "[components]\nlabel p alpha tau usage_cost repair_cost install_cost weight\nx 0.5 1 1 1 1 1 1\n[constraints]\nw 3 1\n";
        assert!(parse_instance(ok).is_ok());
        let bad = ok.replace("x 0.5 1 1", "x 0.5 1.1 1");
        assert!(parse_instance(&bad).is_err());
    }

    #[test]
    fn malformed_documents() {
        let missing = "[components]\nlabel p tau usage_cost repair_cost install_cost\nx 0.5 1 1 1 1\n";
        assert!(matches!(
            parse_instance(missing),
            Err(Error::MissingField { .. })
        ));
        let dash = "[components]\nlabel p alpha tau usage_cost repair_cost install_cost weight\nx - - 1 1 1 1 1\n";
        assert!(matches!(parse_instance(dash), Err(Error::MissingField { .. })));
        let bad_p = "[components]\nlabel p tau usage_cost repair_cost install_cost weight\nx 1.5 1 1 1 1 1\n";
        assert!(parse_instance(bad_p).is_err());
        let neg = "[components]\nlabel p tau usage_cost repair_cost install_cost weight\nx 0.5 1 -1 1 1 1\n";
        assert!(parse_instance(neg).is_err());
        let tau0 = "[components]\nlabel p tau usage_cost repair_cost install_cost weight\nx 0.5 0 1 1 1 1\n";
        assert!(parse_instance(tau0).is_err());
        assert!(matches!(
            parse_instance("[components]\nlabel p tau usage_cost repair_cost install_cost weight\n"),
            Err(Error::EmptyCatalog)
        ));
        assert!(parse_instance("hello").is_err());
        assert!(parse_instance(r#"{"components": [], "extra": 1}"#).is_err());
    }
}
