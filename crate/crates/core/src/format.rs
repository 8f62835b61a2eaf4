//! Situation and traffic files.
//!
//! Both are TOML documents. A situation file lists agents with either demand
//! data (`demand_lo`, `demand_hi`, `holding_cost`) or order frequencies
//! (`m_lo`, `m_hi`); when both are present the frequencies are used and a
//! warning is raised if they disagree with the demand data.
//!
//! ```toml
//! version = 1
//! ordering_cost = 200.0
//! period_note = "monthly demand"
//!
//! [[agents]]
//! id = "MAD"
//! name = "Madrid-Barajas"
//! demand_lo = 175000.0
//! demand_hi = 325000.0
//! holding_cost = 10.0
//! ```

use std::collections::BTreeMap;

use serde::Serialize;
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::game::AgentSet;
use crate::interval::Interval;
use crate::inventory::{IntervalAgent, IntervalInventorySituation};

pub const FORMAT_VERSION: i64 = 1;

const TOP_KEYS: &[&str] = &["version", "ordering_cost", "period_note", "agents"];
const AGENT_KEYS: &[&str] = &["id", "name", "demand_lo", "demand_hi", "holding_cost", "m_lo", "m_hi"];
const TRAFFIC_KEYS: &[&str] = &[
    "purchase_rate",
    "seasonal_variation",
    "unit_holding_costs",
    "ordering_cost",
    "airports",
];
const AIRPORT_KEYS: &[&str] = &["id", "name", "annual_passengers"];

/// Relative disagreement between supplied and derived frequencies that
/// triggers a warning.
const CONSISTENCY_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Report unknown keys as warnings instead of errors.
    pub lenient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandRecord {
    pub demand: Interval,
    pub holding_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentRecord {
    pub id: String,
    pub name: String,
    pub demand: Option<DemandRecord>,
    pub frequency: Option<Interval>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SituationFile {
    pub version: i64,
    pub ordering_cost: f64,
    pub period_note: String,
    pub agents: Vec<AgentRecord>,
}

/// A parsed situation file and the situation it describes.
#[derive(Debug, Clone)]
pub struct ParsedSituation {
    pub file: SituationFile,
    pub situation: IntervalInventorySituation,
    pub warnings: Vec<String>,
}

/// Parses, validates and builds the situation, computing both validity flags.
pub fn parse_situation(text: &str, opts: ParseOptions) -> Result<ParsedSituation> {
    let (file, mut warnings) = SituationFile::from_toml_str(text, opts)?;
    let (situation, more) = file.to_situation()?;
    warnings.extend(more);
    if !situation.soc_valid() {
        warnings.push("SOC-rule condition fails: the interval SOC-rule is undefined for this situation".into());
    }
    if !situation.shapley_valid() {
        warnings.push("length game is not monotone: the interval Shapley rule is undefined for this situation".into());
    }
    Ok(ParsedSituation {
        file,
        situation,
        warnings,
    })
}

fn parse_toml(text: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| {
        let msg = e.message().to_string();
        let loc = e
            .span()
            .map(|sp| {
                let line = text[..sp.start.min(text.len())].matches('\n').count() + 1;
                format!("line {line}")
            })
            .unwrap_or_else(|| "document".into());
        Error::schema(loc, msg)
    })
}

fn check_keys(table: &Table, allowed: &[&str], path: &str, opts: ParseOptions, warnings: &mut Vec<String>) -> Result<()> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            let at = join(path, key);
            if opts.lenient {
                warnings.push(format!("ignoring unknown field `{at}`"));
            } else {
                return Err(Error::schema(at, "unknown field"));
            }
        }
    }
    Ok(())
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn number(v: &Value, path: &str) -> Result<f64> {
    let x = match v {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        _ => return Err(Error::schema(path, format!("expected a number, found {}", v.type_str()))),
    };
    if !x.is_finite() {
        return Err(Error::schema(path, "number must be finite"));
    }
    Ok(x)
}

fn opt_number(t: &Table, key: &str, path: &str) -> Result<Option<f64>> {
    t.get(key).map(|v| number(v, &join(path, key))).transpose()
}

fn req_number(t: &Table, key: &str, path: &str) -> Result<f64> {
    opt_number(t, key, path)?.ok_or_else(|| Error::schema(join(path, key), "missing field"))
}

fn req_string(t: &Table, key: &str, path: &str) -> Result<String> {
    match t.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Integer(i)) if key == "id" => Ok(i.to_string()),
        Some(v) => Err(Error::schema(join(path, key), format!("expected a string, found {}", v.type_str()))),
        None => Err(Error::schema(join(path, key), "missing field")),
    }
}

fn array_of_tables<'a>(t: &'a Table, key: &str) -> Result<Vec<&'a Table>> {
    match t.get(key) {
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.as_table()
                    .ok_or_else(|| Error::schema(format!("{key}[{i}]"), "expected a table"))
            })
            .collect(),
        Some(v) => Err(Error::schema(key, format!("expected an array of tables, found {}", v.type_str()))),
        None => Err(Error::schema(key, "missing field")),
    }
}

/// Reads a bound pair; both present or both absent.
fn bound_pair(t: &Table, path: &str, lo_key: &str, hi_key: &str) -> Result<Option<(f64, f64)>> {
    match (opt_number(t, lo_key, path)?, opt_number(t, hi_key, path)?) {
        (Some(lo), Some(hi)) => Ok(Some((lo, hi))),
        (None, None) => Ok(None),
        (Some(_), None) => Err(Error::schema(join(path, hi_key), "missing field")),
        (None, Some(_)) => Err(Error::schema(join(path, lo_key), "missing field")),
    }
}

impl SituationFile {
    pub fn from_toml_str(text: &str, opts: ParseOptions) -> Result<(Self, Vec<String>)> {
        let root = parse_toml(text)?;
        let mut warnings = Vec::new();
        check_keys(&root, TOP_KEYS, "", opts, &mut warnings)?;

        let version = match root.get("version") {
            Some(Value::Integer(v)) => *v,
            Some(v) => return Err(Error::schema("version", format!("expected an integer, found {}", v.type_str()))),
            None => return Err(Error::schema("version", "missing field")),
        };
        if version != FORMAT_VERSION {
            return Err(Error::schema("version", format!("unsupported version {version}, expected {FORMAT_VERSION}")));
        }
        let ordering_cost = req_number(&root, "ordering_cost", "")?;
        if ordering_cost <= 0.0 {
            return Err(Error::schema("ordering_cost", "must be positive"));
        }
        let period_note = match root.get("period_note") {
            Some(Value::String(s)) => s.clone(),
            Some(v) => return Err(Error::schema("period_note", format!("expected a string, found {}", v.type_str()))),
            None => String::new(),
        };

        let tables = array_of_tables(&root, "agents")?;
        if tables.is_empty() {
            return Err(Error::schema("agents", "at least one agent is required"));
        }
        let mut agents = Vec::with_capacity(tables.len());
        let mut ids = std::collections::HashSet::new();
        for (k, t) in tables.into_iter().enumerate() {
            let path = format!("agents[{k}]");
            check_keys(t, AGENT_KEYS, &path, opts, &mut warnings)?;
            let id = req_string(t, "id", &path)?;
            if !ids.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            let name = match t.get("name") {
                Some(_) => req_string(t, "name", &path)?,
                None => id.clone(),
            };

            let demand = match bound_pair(t, &path, "demand_lo", "demand_hi")? {
                Some((lo, hi)) => {
                    let holding_cost = req_number(t, "holding_cost", &path)?;
                    if lo > hi {
                        return Err(Error::Bounds { agent: id, field: "demand", lo, hi });
                    }
                    if lo < 0.0 {
                        return Err(Error::schema(join(&path, "demand_lo"), "must be nonnegative"));
                    }
                    if holding_cost <= 0.0 {
                        return Err(Error::schema(join(&path, "holding_cost"), "must be positive"));
                    }
                    Some(DemandRecord {
                        demand: Interval::new(lo, hi)?,
                        holding_cost,
                    })
                }
                None => {
                    if t.contains_key("holding_cost") {
                        return Err(Error::schema(join(&path, "demand_lo"), "missing field"));
                    }
                    None
                }
            };
            let frequency = match bound_pair(t, &path, "m_lo", "m_hi")? {
                Some((lo, hi)) => {
                    if lo > hi {
                        return Err(Error::Bounds { agent: id, field: "m", lo, hi });
                    }
                    if lo < 0.0 {
                        return Err(Error::schema(join(&path, "m_lo"), "must be nonnegative"));
                    }
                    Some(Interval::new(lo, hi)?)
                }
                None => None,
            };
            if demand.is_none() && frequency.is_none() {
                return Err(Error::schema(
                    path,
                    "either demand_lo/demand_hi/holding_cost or m_lo/m_hi is required",
                ));
            }
            agents.push(AgentRecord {
                id,
                name,
                demand,
                frequency,
            });
        }
        Ok((
            SituationFile {
                version,
                ordering_cost,
                period_note,
                agents,
            },
            warnings,
        ))
    }

    /// Builds the situation. Supplied frequencies take precedence over demand
    /// data; disagreements beyond `1e-6` relative are reported as warnings.
    pub fn to_situation(&self) -> Result<(IntervalInventorySituation, Vec<String>)> {
        let a = self.ordering_cost;
        let mut warnings = Vec::new();
        let mut m = Vec::with_capacity(self.agents.len());
        for rec in &self.agents {
            let derived = rec
                .demand
                .map(|d| IntervalAgent::new(d.demand, d.holding_cost).map(|ag| ag.frequency(a)))
                .transpose()?;
            let chosen = match (rec.frequency, derived) {
                (Some(given), Some(derived)) => {
                    let off = |x: f64, y: f64| (x - y).abs() > CONSISTENCY_REL * x.abs().max(y.abs());
                    if off(given.lo(), derived.lo()) || off(given.hi(), derived.hi()) {
                        warnings.push(format!(
                            "agent `{}`: supplied m {given} differs from demand-derived m {derived:.6}; using supplied",
                            rec.id
                        ));
                    }
                    given
                }
                (Some(given), None) => given,
                (None, Some(derived)) => derived,
                (None, None) => unreachable!("checked while parsing"),
            };
            m.push(chosen);
        }
        let agents = AgentSet::new(self.agents.iter().map(|r| r.id.clone()))?;
        Ok((IntervalInventorySituation::new(agents, a, m)?, warnings))
    }

    pub fn names(&self) -> Vec<String> {
        self.agents.iter().map(|r| r.name.clone()).collect()
    }

    /// Canonical TOML: fixed key order, shortest round-trip float formatting.
    pub fn to_toml_string(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            version: i64,
            ordering_cost: f64,
            period_note: &'a str,
            agents: Vec<Agent<'a>>,
        }
        #[derive(Serialize)]
        struct Agent<'a> {
            id: &'a str,
            name: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            demand_lo: Option<f64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            demand_hi: Option<f64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            holding_cost: Option<f64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            m_lo: Option<f64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            m_hi: Option<f64>,
        }
        let doc = Doc {
            version: self.version,
            ordering_cost: self.ordering_cost,
            period_note: &self.period_note,
            agents: self
                .agents
                .iter()
                .map(|r| Agent {
                    id: &r.id,
                    name: &r.name,
                    demand_lo: r.demand.map(|d| d.demand.lo()),
                    demand_hi: r.demand.map(|d| d.demand.hi()),
                    holding_cost: r.demand.map(|d| d.holding_cost),
                    m_lo: r.frequency.map(|m| m.lo()),
                    m_hi: r.frequency.map(|m| m.hi()),
                })
                .collect(),
        };
        toml::to_string(&doc).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Airport {
    pub id: String,
    pub name: String,
    pub annual_passengers: u64,
}

/// Raw passenger statistics from which demand intervals are derived.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficFile {
    pub purchase_rate: f64,
    pub seasonal_variation: f64,
    pub unit_holding_costs: BTreeMap<String, f64>,
    pub ordering_cost: f64,
    pub airports: Vec<Airport>,
}

impl TrafficFile {
    pub fn from_toml_str(text: &str, opts: ParseOptions) -> Result<(Self, Vec<String>)> {
        let root = parse_toml(text)?;
        let mut warnings = Vec::new();
        check_keys(&root, TRAFFIC_KEYS, "", opts, &mut warnings)?;

        let purchase_rate = req_number(&root, "purchase_rate", "")?;
        if !(purchase_rate > 0.0 && purchase_rate <= 1.0) {
            return Err(Error::schema("purchase_rate", "must lie in (0, 1]"));
        }
        let seasonal_variation = req_number(&root, "seasonal_variation", "")?;
        if !(0.0..1.0).contains(&seasonal_variation) {
            return Err(Error::schema("seasonal_variation", "must lie in [0, 1)"));
        }
        let ordering_cost = req_number(&root, "ordering_cost", "")?;
        if ordering_cost <= 0.0 {
            return Err(Error::schema("ordering_cost", "must be positive"));
        }
        let costs = match root.get("unit_holding_costs") {
            Some(Value::Table(t)) => t,
            Some(v) => {
                return Err(Error::schema(
                    "unit_holding_costs",
                    format!("expected a table, found {}", v.type_str()),
                ))
            }
            None => return Err(Error::schema("unit_holding_costs", "missing field")),
        };
        let mut unit_holding_costs = BTreeMap::new();
        for (id, v) in costs {
            let path = format!("unit_holding_costs.{id}");
            let h = number(v, &path)?;
            if h <= 0.0 {
                return Err(Error::schema(path, "must be positive"));
            }
            unit_holding_costs.insert(id.clone(), h);
        }

        let mut airports = Vec::new();
        let mut ids = std::collections::HashSet::new();
        for (k, t) in array_of_tables(&root, "airports")?.into_iter().enumerate() {
            let path = format!("airports[{k}]");
            check_keys(t, AIRPORT_KEYS, &path, opts, &mut warnings)?;
            let id = req_string(t, "id", &path)?;
            if !ids.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            let name = req_string(t, "name", &path)?;
            let annual_passengers = match t.get("annual_passengers") {
                Some(Value::Integer(p)) if *p >= 0 => *p as u64,
                Some(_) => {
                    return Err(Error::schema(
                        join(&path, "annual_passengers"),
                        "expected a nonnegative integer",
                    ))
                }
                None => return Err(Error::schema(join(&path, "annual_passengers"), "missing field")),
            };
            airports.push(Airport {
                id,
                name,
                annual_passengers,
            });
        }
        if airports.is_empty() {
            return Err(Error::schema("airports", "at least one airport is required"));
        }
        Ok((
            TrafficFile {
                purchase_rate,
                seasonal_variation,
                unit_holding_costs,
                ordering_cost,
                airports,
            },
            warnings,
        ))
    }

    /// Monthly demand band for one airport: midpoint
    /// `passengers·rate/12`, widened by `±v` and rounded to the nearest hundred.
    pub fn demand_interval(&self, annual_passengers: u64) -> Interval {
        let mid = annual_passengers as f64 * self.purchase_rate / 12.0;
        let round100 = |x: f64| (x / 100.0).round() * 100.0;
        let lo = round100(mid * (1.0 - self.seasonal_variation));
        let hi = round100(mid * (1.0 + self.seasonal_variation));
        Interval::new(lo, hi).expect("v in [0,1)")
    }

    pub fn ingest(&self) -> Result<SituationFile> {
        let agents = self
            .airports
            .iter()
            .map(|ap| {
                let holding_cost = *self.unit_holding_costs.get(&ap.id).ok_or_else(|| {
                    Error::schema(format!("unit_holding_costs.{}", ap.id), "missing holding cost for airport")
                })?;
                Ok(AgentRecord {
                    id: ap.id.clone(),
                    name: ap.name.clone(),
                    demand: Some(DemandRecord {
                        demand: self.demand_interval(ap.annual_passengers),
                        holding_cost,
                    }),
                    frequency: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SituationFile {
            version: FORMAT_VERSION,
            ordering_cost: self.ordering_cost,
            period_note: format!(
                "monthly demand derived from annual passengers x {} / 12, +/-{}% band, rounded to 100 units",
                self.purchase_rate,
                self.seasonal_variation * 100.0
            ),
            agents,
        })
    }
}
