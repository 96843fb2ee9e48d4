use std::fs;
use std::io::{self, Read};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use sl2h_core::{MatH2, Quaternion};

use crate::{CliError, Result};

/// Parses JSON from `path`, or from stdin when `path` is absent or `-`.
pub fn read_input<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let text = match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    Ok(serde_json::from_str(&text)?)
}

/// `[[qa, qb], [qc, qd]]` or `{"matrix": ...}`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Bare(MatH2),
    Wrapped { matrix: MatH2 },
}

impl MatrixInput {
    pub fn into_matrix(self) -> MatH2 {
        match self {
            MatrixInput::Bare(m) | MatrixInput::Wrapped { matrix: m } => m,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum JorgensenInput {
    Pair {
        #[serde(rename = "S")]
        s: MatH2,
        #[serde(rename = "T")]
        t: MatH2,
    },
    Translation {
        #[serde(rename = "S")]
        s: MatH2,
        mu: Quaternion,
    },
    General {
        lambda: [f64; 2],
        mu: [f64; 2],
        bc_norm: f64,
    },
}
