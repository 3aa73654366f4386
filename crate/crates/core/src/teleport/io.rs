// SPDX-License-Identifier: Apache-2.0

//! Plain-text protocol records.
//!
//! ```text
//! d
//! <d²−1 radians>   × d²   (Alice, α = 0..d²−1)
//! <d²−1 radians>   × d²   (Bob,   α = 0..d²−1)
//! ```
//!
//! Values are written in Rust's shortest round-trip form, so a protocol read
//! back is bit-identical. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;

use super::protocol::Protocol;
use crate::error::{Error, Result};
use crate::qlinalg::ParamVector;

impl Protocol {
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.dim_d());
        for p in self.alice_params().iter().chain(self.bob_params()) {
            let row: Vec<String> = p.values().iter().map(|v| format!("{v:?}")).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty protocol record".into(),
        })?;
        let d: usize = header.parse().map_err(|e| Error::Parse {
            line,
            msg: format!("bad dimension {header:?}: {e}"),
        })?;
        if d < 2 {
            return Err(Error::InvalidDimension { d });
        }
        let mut rows = Vec::with_capacity(2 * d * d);
        for (line, text) in lines {
            let values = text
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|e| Error::Parse {
                        line,
                        msg: format!("bad value {tok:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != d * d - 1 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} values, found {}", d * d - 1, values.len()),
                });
            }
            rows.push(ParamVector::new(d, values)?);
        }
        if rows.len() != 2 * d * d {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected {} parameter rows, found {}", 2 * d * d, rows.len()),
            });
        }
        let bob = rows.split_off(d * d);
        Protocol::new(d, rows, bob)
    }
}
