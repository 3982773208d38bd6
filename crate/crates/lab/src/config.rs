//! Flat key-value sweep configuration with one section per command.
//!
//! ```text
//! # comment
//! [mean]
//! d = 2
//! x = 1e3, 1e4
//! y = 1e2, 1e3
//! a_mode = all
//! ```
//!
//! Comma-separated values form grid axes; a section expands to the
//! cartesian product of its axes.  Numbers accept scientific notation.

use crate::record::{ParamValue, Params};
use crate::LabError;

/// One parsed section: a command with its grid axes in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub command: String,
    pub axes: Vec<(String, Vec<ParamValue>)>,
}

impl SweepConfig {
    /// Cartesian product of the axes, in row-major file order.
    pub fn grid(&self) -> Vec<Params> {
        let mut points = vec![Params::new()];
        for (key, values) in &self.axes {
            let mut next = Vec::with_capacity(points.len() * values.len());
            for point in &points {
                for v in values {
                    let mut p = point.clone();
                    p.insert(key.clone(), v.clone());
                    next.push(p);
                }
            }
            points = next;
        }
        if self.axes.is_empty() {
            Vec::new()
        } else {
            points
        }
    }
}

/// Parse a config file into its ordered sections.
pub fn parse_config(text: &str) -> Result<Vec<SweepConfig>, LabError> {
    let mut sections: Vec<SweepConfig> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| LabError::Config {
                context: format!("line {lineno}"),
                message: format!("unterminated section header {line:?}"),
            })?;
            let name = name.trim();
            if name.is_empty() {
                return Err(LabError::Config {
                    context: format!("line {lineno}"),
                    message: "empty section name".into(),
                });
            }
            sections.push(SweepConfig {
                command: name.to_string(),
                axes: Vec::new(),
            });
            continue;
        }
        let (key, values) = line.split_once('=').ok_or_else(|| LabError::Config {
            context: format!("line {lineno}"),
            message: format!("expected `key = value`, got {line:?}"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(LabError::Config {
                context: format!("line {lineno}"),
                message: "empty key".into(),
            });
        }
        let section = sections.last_mut().ok_or_else(|| LabError::Config {
            context: format!("line {lineno}"),
            message: format!("key {key:?} appears before any [section]"),
        })?;
        if section.axes.iter().any(|(k, _)| k == key) {
            return Err(LabError::Config {
                context: format!("line {lineno}"),
                message: format!("duplicate key {key:?} in section [{}]", section.command),
            });
        }
        let parsed: Vec<ParamValue> = values
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(ParamValue::parse)
            .collect();
        if parsed.is_empty() {
            return Err(LabError::Config {
                context: format!("line {lineno}"),
                message: format!("key {key:?} has no values"),
            });
        }
        section.axes.push((key.to_string(), parsed));
    }
    Ok(sections)
}
