//! Allocation reports and their table, CSV and JSON renderings.
//!
//! Tables and CSV print currency at two decimals; JSON keeps full precision.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::interval::Interval;
use crate::inventory::IntervalInventorySituation;
use crate::rules::{self, IntervalAllocation};

/// How the Shapley column of a comparison is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ShapleyMode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

impl ShapleyMode {
    pub fn allocate(self, s: &IntervalInventorySituation) -> Result<IntervalAllocation> {
        match self {
            ShapleyMode::Exact => rules::interval_shapley(s),
            ShapleyMode::Sampled { samples, seed } => rules::interval_shapley_sampled(s, samples, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TableStyle {
    pub bold_header: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShareRow {
    pub id: String,
    pub name: String,
    pub share: Interval,
    pub length: f64,
}

/// Shares under a single rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationReport {
    pub rule: String,
    pub rows: Vec<ShareRow>,
    pub total: Interval,
    pub total_length: f64,
}

impl AllocationReport {
    pub fn new(rule: impl Into<String>, s: &IntervalInventorySituation, names: &[String], alloc: &IntervalAllocation) -> Self {
        let rows = s
            .agents()
            .labels()
            .iter()
            .zip(names)
            .zip(alloc.shares())
            .map(|((id, name), &share)| ShareRow {
                id: id.clone(),
                name: name.clone(),
                share,
                length: share.length(),
            })
            .collect();
        let total = alloc.total();
        AllocationReport {
            rule: rule.into(),
            rows,
            total,
            total_length: total.length(),
        }
    }

    pub fn to_table(&self, style: TableStyle) -> String {
        let header = ["agent", "name", "lower", "upper", "length"];
        let mut body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.id.clone(),
                    r.name.clone(),
                    money(r.share.lo()),
                    money(r.share.hi()),
                    money(r.length),
                ]
            })
            .collect();
        body.push(vec![
            "total".into(),
            String::new(),
            money(self.total.lo()),
            money(self.total.hi()),
            money(self.total_length),
        ]);
        let mut out = format!("rule: {}\n", self.rule);
        out.push_str(&render_table(&header, &body, 2, style));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["agent", "name", "lo", "hi", "length"]).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.id.as_str(),
                r.name.as_str(),
                &money(r.share.lo()),
                &money(r.share.hi()),
                &money(r.length),
            ])
            .expect("in-memory write");
        }
        w.write_record([
            "total",
            "",
            &money(self.total.lo()),
            &money(self.total.hi()),
            &money(self.total_length),
        ])
        .expect("in-memory write");
        into_string(w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub id: String,
    pub name: String,
    pub individual: Interval,
    pub soc: Interval,
    pub shapley: Interval,
    /// Shares proportional to `m_i` (not `m_i²`), for comparison with
    /// published tables that use that split.
    pub soc_proportional: Interval,
    #[serde(rename = "L_IC")]
    pub l_ic: f64,
    #[serde(rename = "L_SOC")]
    pub l_soc: f64,
    #[serde(rename = "L_Sh")]
    pub l_sh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTotals {
    pub individual: Interval,
    pub soc: Interval,
    pub shapley: Interval,
    pub soc_proportional: Interval,
    /// `w(N)`.
    pub joint_cost: Interval,
}

/// Individual costs, SOC shares and Shapley shares side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub ordering_cost: f64,
    pub rows: Vec<ComparisonRow>,
    pub totals: ComparisonTotals,
    pub soc_valid: bool,
    pub shapley_valid: bool,
    pub shapley: ShapleyMode,
}

impl ComparisonReport {
    /// Fails if either rule's precondition does not hold.
    pub fn build(s: &IntervalInventorySituation, names: &[String], mode: ShapleyMode) -> Result<Self> {
        let ic = rules::individual_costs(s);
        let soc = rules::interval_soc(s)?;
        let sh = mode.allocate(s)?;
        let prop = rules::proportional_to_frequency(s);
        let rows = (0..s.n())
            .map(|i| ComparisonRow {
                id: s.agents().label(i).to_string(),
                name: names[i].clone(),
                individual: ic[i],
                soc: soc[i],
                shapley: sh[i],
                soc_proportional: prop[i],
                l_ic: ic[i].length(),
                l_soc: soc[i].length(),
                l_sh: sh[i].length(),
            })
            .collect();
        Ok(ComparisonReport {
            ordering_cost: s.ordering_cost(),
            rows,
            totals: ComparisonTotals {
                individual: ic.total(),
                soc: soc.total(),
                shapley: sh.total(),
                soc_proportional: prop.total(),
                joint_cost: s.total_cost(),
            },
            soc_valid: s.soc_valid(),
            shapley_valid: s.shapley_valid(),
            shapley: mode,
        })
    }

    fn total_row(&self) -> [Interval; 3] {
        [self.totals.individual, self.totals.soc, self.totals.shapley]
    }

    pub fn to_table(&self, style: TableStyle) -> String {
        let header = [
            "agent", "name", "individual", "soc", "shapley", "L_IC", "L_SOC", "L_Sh",
        ];
        let row = |id: &str, name: &str, iv: [Interval; 3]| {
            let mut cells = vec![id.to_string(), name.to_string()];
            cells.extend(iv.iter().map(|x| format!("{x:.2}")));
            cells.extend(iv.iter().map(|x| money(x.length())));
            cells
        };
        let mut body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| row(&r.id, &r.name, [r.individual, r.soc, r.shapley]))
            .collect();
        body.push(row("total", "", self.total_row()));

        let mut out = render_table(&header, &body, 2, style);
        let _ = writeln!(out, "\njoint cost w(N) = {:.2}", self.totals.joint_cost);
        match self.shapley {
            ShapleyMode::Exact => {}
            ShapleyMode::Sampled { samples, seed } => {
                let _ = writeln!(out, "shapley estimated from {samples} sampled orders (seed {seed})");
            }
        }
        out.push_str("\nshares proportional to m (not m^2):\n");
        let prop_body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![r.id.clone(), format!("{:.2}", r.soc_proportional), money(r.soc_proportional.length())])
            .chain(std::iter::once(vec![
                "total".into(),
                format!("{:.2}", self.totals.soc_proportional),
                money(self.totals.soc_proportional.length()),
            ]))
            .collect();
        out.push_str(&render_table(&["agent", "share", "length"], &prop_body, 1, style));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "agent", "ic_lo", "ic_hi", "soc_lo", "soc_hi", "sh_lo", "sh_hi", "L_IC", "L_SOC", "L_Sh",
        ])
        .expect("in-memory write");
        let record = |id: &str, iv: [Interval; 3]| {
            let mut cells = vec![id.to_string()];
            for x in iv {
                cells.push(money(x.lo()));
                cells.push(money(x.hi()));
            }
            cells.extend(iv.iter().map(|x| money(x.length())));
            cells
        };
        for r in &self.rows {
            w.write_record(record(&r.id, [r.individual, r.soc, r.shapley]))
                .expect("in-memory write");
        }
        w.write_record(record("total", self.total_row())).expect("in-memory write");
        into_string(w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

pub fn money(x: f64) -> String {
    // avoid printing "-0.00"
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Left-aligns the first `text_cols` columns, right-aligns the rest.
fn render_table(header: &[&str], body: &[Vec<String>], text_cols: usize, style: TableStyle) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (k, (cell, &w)) in cells.zip(&widths).enumerate() {
            if k > 0 {
                s.push_str("  ");
            }
            if k < text_cols {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "{cell:>w$}");
            }
        }
        s.trim_end().to_string()
    };
    let mut out = String::new();
    let head = line(&mut header.iter().copied());
    if style.bold_header {
        let _ = writeln!(out, "\x1b[1m{head}\x1b[0m");
    } else {
        let _ = writeln!(out, "{head}");
    }
    let rule_len: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    let _ = writeln!(out, "{}", "-".repeat(rule_len));
    for (k, row) in body.iter().enumerate() {
        if k + 1 == body.len() && row.first().is_some_and(|c| c == "total") {
            let _ = writeln!(out, "{}", "-".repeat(rule_len));
        }
        let _ = writeln!(out, "{}", line(&mut row.iter().map(String::as_str)));
    }
    out
}
