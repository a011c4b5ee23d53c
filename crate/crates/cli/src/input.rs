//! Score tables: CSV with a `label,score` header, or a JSON array of
//! `{"label": ..., "score": ...}` objects. The format is sniffed from the
//! first non-blank character.

use std::collections::HashMap;

use apportion_core::api::MAX_SCORE;
use apportion_core::Entity;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{location}: {message}")]
pub struct InputError {
    pub location: String,
    pub message: String,
}

impl InputError {
    fn at(location: impl Into<String>, message: impl Into<String>) -> Self {
        InputError { location: location.into(), message: message.into() }
    }
}

pub fn parse_table(text: &str) -> Result<Vec<Entity>, InputError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let rows = match text.trim_start().chars().next() {
        None => return Err(InputError::at("input", "no rows")),
        Some('[') => parse_json(text)?,
        Some(_) => parse_csv(text)?,
    };
    if rows.is_empty() {
        return Err(InputError::at("input", "no rows"));
    }
    let mut seen: HashMap<&str, &str> = HashMap::new();
    for (loc, e) in &rows {
        if let Some(first) = seen.insert(&e.label, loc) {
            return Err(InputError::at(loc, format!("duplicate label '{}' (first seen at {first})", e.label)));
        }
    }
    Ok(rows.into_iter().map(|(_, e)| e).collect())
}

fn parse_csv(text: &str) -> Result<Vec<(String, Entity)>, InputError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| InputError::at("line 1", e.to_string()))?
        .clone();
    let header: Vec<String> = headers.iter().map(str::to_ascii_lowercase).collect();
    if header != ["label", "score"] {
        return Err(InputError::at(
            "line 1",
            format!("expected header 'label,score', found '{}'", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            InputError::at(format!("line {line}"), csv_message(&e))
        })?;
        let loc = format!("line {}", record.position().map_or(0, |p| p.line()));
        let label = &record[0];
        if label.is_empty() {
            return Err(InputError::at(loc, "empty label"));
        }
        let score = parse_score(&record[1]).map_err(|m| InputError::at(&loc, m))?;
        rows.push((loc, Entity::new(label, score)));
    }
    Ok(rows)
}

fn csv_message(e: &csv::Error) -> String {
    match e.kind() {
        csv::ErrorKind::UnequalLengths { len, .. } => format!("expected 2 fields, found {len}"),
        _ => e.to_string(),
    }
}

fn parse_score(s: &str) -> Result<u64, String> {
    if s.is_empty() {
        return Err("missing score".into());
    }
    if !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("score '{s}' is not a nonnegative integer"));
    }
    match s.parse::<u64>() {
        Ok(0) => Err("score must be at least 1".into()),
        Ok(v) if v <= MAX_SCORE => Ok(v),
        _ => Err(too_large(s)),
    }
}

fn too_large(s: &str) -> String {
    format!(
        "score {s} exceeds the maximum {MAX_SCORE} (2^63 - 1); divide every score by a common factor, \
         which leaves the allocation unchanged"
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRow {
    label: String,
    score: serde_json::Number,
}

fn parse_json(text: &str) -> Result<Vec<(String, Entity)>, InputError> {
    let rows: Vec<JsonRow> = serde_json::from_str(text)
        .map_err(|e| InputError::at(format!("line {}", e.line()), e.to_string()))?;
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let loc = format!("entry {}", i + 1);
            if row.label.is_empty() {
                return Err(InputError::at(loc, "empty label"));
            }
            let score = json_score(&row.score).map_err(|m| InputError::at(&loc, m))?;
            Ok((loc, Entity::new(row.label, score)))
        })
        .collect()
}

fn json_score(n: &serde_json::Number) -> Result<u64, String> {
    if let Some(v) = n.as_u64() {
        return match v {
            0 => Err("score must be at least 1".into()),
            v if v > MAX_SCORE => Err(too_large(&v.to_string())),
            v => Ok(v),
        };
    }
    match n.as_f64() {
        Some(f) if f.fract() == 0.0 && f >= 1.0 => Err(too_large(&n.to_string())),
        _ => Err(format!("score {n} is not a positive integer")),
    }
}
