//! JSON file formats for joint distributions and channels.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use privex_core::{validate_joint, Channel, JointDistribution};
use serde::{Deserialize, Serialize};

/// `{"x_labels": [...], "y_labels": [...], "pxy": [[...], ...]}`, row index = x.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    pub pxy: Vec<Vec<f64>>,
}

impl JointFile {
    pub fn from_joint(j: &JointDistribution) -> Self {
        Self {
            x_labels: j.x_labels().to_vec(),
            y_labels: j.y_labels().to_vec(),
            pxy: j.matrix().to_vec(),
        }
    }

    pub fn into_joint(self) -> privex_core::Result<JointDistribution> {
        validate_joint(self.x_labels, self.y_labels, self.pxy)
    }
}

/// `{"in_labels": [...], "out_labels": [...], "rows": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub in_labels: Vec<String>,
    pub out_labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ChannelFile {
    pub fn from_channel(c: &Channel) -> Self {
        Self {
            in_labels: c.in_labels().to_vec(),
            out_labels: c.out_labels().to_vec(),
            rows: c.rows().to_vec(),
        }
    }

    pub fn into_channel(self) -> privex_core::Result<Channel> {
        Channel::new(self.in_labels, self.out_labels, self.rows)
    }
}

/// Malformed input file: unreadable, not JSON, or the wrong shape.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        InputError(format!("{}:{}:{}: {}", path.display(), e.line(), e.column(), e)).into()
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())).into())
}

pub fn parse_joint(path: &Path, text: &str) -> Result<JointDistribution> {
    let file: JointFile = parse(path, text)?;
    file.into_joint().with_context(|| format!("invalid joint distribution in {}", path.display()))
}

pub fn load_joint(path: &Path) -> Result<JointDistribution> {
    parse_joint(path, &read(path)?)
}

pub fn load_channel(path: &Path) -> Result<Channel> {
    let file: ChannelFile = parse(path, &read(path)?)?;
    file.into_channel().with_context(|| format!("invalid channel in {}", path.display()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
