//! Plain-text QUBO files.
//!
//! ```text
//! # optional comments
//! n 3
//! 0 0 -1.5
//! 0 2 4
//! ```
//!
//! The header gives the variable count; every further line is a 0-based
//! upper-triangular entry `i j value` with `i <= j`.

use std::io::{BufRead, Write};

use super::QuboInstance;
use crate::error::{Error, Result};

pub fn read_qubo<R: BufRead>(reader: R) -> Result<QuboInstance> {
    let mut n: Option<usize> = None;
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |msg: String| Error::Parse { line: lineno, msg };
        match n {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(parse_err(format!("expected header `n <count>`, got `{line}`")));
                }
                let count = fields[1]
                    .parse::<usize>()
                    .map_err(|e| parse_err(format!("bad variable count: {e}")))?;
                n = Some(count);
            }
            Some(count) => {
                if fields.len() != 3 {
                    return Err(parse_err(format!("expected `i j value`, got `{line}`")));
                }
                let i = fields[0]
                    .parse::<usize>()
                    .map_err(|e| parse_err(format!("bad row index: {e}")))?;
                let j = fields[1]
                    .parse::<usize>()
                    .map_err(|e| parse_err(format!("bad column index: {e}")))?;
                let v = fields[2]
                    .parse::<f64>()
                    .map_err(|e| parse_err(format!("bad value: {e}")))?;
                if i > j || j >= count {
                    return Err(parse_err(format!(
                        "entry ({i}, {j}) outside the upper triangle of a {count}-variable instance"
                    )));
                }
                entries.push((i, j, v));
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing `n <count>` header".into(),
    })?;
    QuboInstance::from_upper_entries(n, entries)
}

pub fn write_qubo<W: Write>(q: &QuboInstance, mut out: W) -> std::io::Result<()> {
    writeln!(out, "n {}", q.n())?;
    for (i, j, v) in q.nonzeros() {
        // `{:?}` prints the shortest representation that parses back exactly.
        writeln!(out, "{i} {j} {v:?}")?;
    }
    out.flush()
}
