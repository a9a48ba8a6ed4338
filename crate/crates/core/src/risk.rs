//! Ranking occupations by automated-risk probability and checking the ranking
//! against an external list of declining occupations.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CUTOFF: f64 = 0.69;
pub const DEFAULT_DECLINE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub soc_code: String,
    pub title: String,
    pub probability: f64,
    pub rank: usize,
    pub at_risk: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskTable {
    pub cutoff: f64,
    pub rows: Vec<RiskRow>,
}

impl RiskTable {
    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.at_risk).count()
    }

    pub fn flagged_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.flagged() as f64 / self.rows.len() as f64
        }
    }

    pub fn max_probability(&self) -> Option<f64> {
        self.rows.first().map(|r| r.probability)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["soc_code", "title", "probability", "rank", "at_risk"])?;
        for r in &self.rows {
            w.write_record([
                r.soc_code.as_str(),
                r.title.as_str(),
                &format!("{:.6}", r.probability),
                &r.rank.to_string(),
                if r.at_risk { "true" } else { "false" },
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: "<memory>".into(),
            source: e.into_error(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie strictly between 0 and 1, got {v}")))
    }
}

/// Sorts occupations by descending probability (ties by ascending SOC code)
/// and flags those with probability at or above `cutoff`.
/// `occupations` holds `(soc_code, title)` aligned with `probabilities`.
pub fn rank(probabilities: &[f64], occupations: &[(String, String)], cutoff: f64) -> Result<RiskTable> {
    if probabilities.len() != occupations.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} probabilities for {} occupations",
            probabilities.len(),
            occupations.len()
        )));
    }
    check_unit("cutoff", cutoff)?;
    if let Some(p) = probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::ShapeMismatch(format!("probability {p} outside [0, 1]")));
    }
    let mut order: Vec<usize> = (0..probabilities.len()).collect();
    order.sort_by(|&a, &b| {
        probabilities[b]
            .total_cmp(&probabilities[a])
            .then_with(|| occupations[a].0.cmp(&occupations[b].0))
    });
    let rows = order
        .into_iter()
        .enumerate()
        .map(|(i, k)| RiskRow {
            soc_code: occupations[k].0.clone(),
            title: occupations[k].1.clone(),
            probability: probabilities[k],
            rank: i + 1,
            at_risk: probabilities[k] >= cutoff,
        })
        .collect();
    Ok(RiskTable { cutoff, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecliningEntry {
    pub title: String,
    pub soc_code: Option<String>,
    pub decline: f64,
}

pub fn parse_declining(path: &Path) -> Result<Vec<DecliningEntry>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let file = path.display().to_string();
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let expected = ["title", "soc_code", "decline"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(a, b)| a.trim() != b) {
        return Err(Error::MalformedRow {
            file,
            line: 1,
            reason: format!("expected header {}", expected.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let title = rec.get(0).unwrap_or("").trim().to_string();
        if title.is_empty() {
            return Err(Error::MalformedRow {
                file,
                line,
                reason: "empty title".into(),
            });
        }
        let soc = rec.get(1).unwrap_or("").trim();
        let decline = rec
            .get(2)
            .unwrap_or("")
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::MalformedRow {
                file: file.clone(),
                line,
                reason: format!("decline: {e}"),
            })?;
        out.push(DecliningEntry {
            title,
            soc_code: (!soc.is_empty()).then(|| soc.to_string()),
            decline,
        });
    }
    Ok(out)
}

pub fn write_declining(path: &Path, entries: &[DecliningEntry]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["title", "soc_code", "decline"])?;
    for e in entries {
        w.write_record([e.title.as_str(), e.soc_code.as_deref().unwrap_or(""), &e.decline.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn normalize_title(t: &str) -> String {
    t.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedEntry {
    pub title: String,
    pub soc_code: String,
    pub decline: f64,
    pub probability: f64,
    pub above_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub threshold: f64,
    pub matched: Vec<MatchedEntry>,
    pub unmatched: Vec<DecliningEntry>,
    /// Share of matched entries above the threshold; `None` when nothing matched.
    pub fraction_above: Option<f64>,
}

impl ComparisonReport {
    pub fn is_degenerate(&self) -> bool {
        self.fraction_above.is_none()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["title", "soc_code", "decline", "probability", "above_threshold"])?;
        for m in &self.matched {
            w.write_record([
                m.title.as_str(),
                m.soc_code.as_str(),
                &m.decline.to_string(),
                &format!("{:.6}", m.probability),
                if m.above_threshold { "true" } else { "false" },
            ])?;
        }
        for u in &self.unmatched {
            w.write_record([u.title.as_str(), u.soc_code.as_deref().unwrap_or(""), &u.decline.to_string(), "", ""])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: "<memory>".into(),
            source: e.into_error(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Matches each declining entry by SOC code when given, else by normalized
/// title, and reports the share whose risk exceeds `threshold`.
pub fn compare_declining(table: &RiskTable, declining: &[DecliningEntry], threshold: f64) -> Result<ComparisonReport> {
    check_unit("threshold", threshold)?;
    let by_soc: HashMap<&str, &RiskRow> = table.rows.iter().map(|r| (r.soc_code.as_str(), r)).collect();
    let by_title: HashMap<String, &RiskRow> = table
        .rows
        .iter()
        .map(|r| (normalize_title(&r.title), r))
        .collect();
    let mut matched = Vec::new();
    let mut unmatched = Vec::new();
    for e in declining {
        let hit = match &e.soc_code {
            Some(code) => by_soc.get(code.as_str()).copied(),
            None => by_title.get(&normalize_title(&e.title)).copied(),
        };
        match hit {
            Some(row) => matched.push(MatchedEntry {
                title: e.title.clone(),
                soc_code: row.soc_code.clone(),
                decline: e.decline,
                probability: row.probability,
                above_threshold: row.probability > threshold,
            }),
            None => unmatched.push(e.clone()),
        }
    }
    let fraction_above =
        (!matched.is_empty()).then(|| matched.iter().filter(|m| m.above_threshold).count() as f64 / matched.len() as f64);
    Ok(ComparisonReport {
        threshold,
        matched,
        unmatched,
        fraction_above,
    })
}
