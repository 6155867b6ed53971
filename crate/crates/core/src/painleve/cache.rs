//! Versioned text format for tables.
//!
//! ```text
//! twtable v1 <x_left> <x_right> <tol> <n_points>
//! <x> <q> <q'> <I_q> <I_q2> <J_q2>      (one row per grid point)
//! ```
//!
//! Numbers use Rust's shortest round-trip formatting, so a reload is
//! bit-identical.

use std::io::{BufRead, Write};

use super::{PainleveSolution, TableParams, TracyWidomTable};
use crate::error::{Error, Result};

const MAGIC: &str = "twtable";
const VERSION: &str = "v1";

/// Cache file name for a parameter set.
pub fn table_file_name(p: &TableParams) -> String {
    format!("twtable_v1_{:?}_{:?}_{:?}_{}.txt", p.x_left, p.x_right, p.tol, p.n_points)
}

pub fn write_table<W: Write>(table: &TracyWidomTable, mut out: W) -> Result<()> {
    let sol = &table.solution;
    let p = &sol.params;
    writeln!(out, "{MAGIC} {VERSION} {:?} {:?} {:?} {}", p.x_left, p.x_right, p.tol, p.n_points)?;
    for i in 0..sol.len() {
        writeln!(
            out,
            "{:?} {:?} {:?} {:?} {:?} {:?}",
            sol.grid[i], sol.q[i], sol.q_prime[i], sol.i_q[i], sol.i_q2[i], sol.j_q2[i]
        )?;
    }
    out.flush()?;
    Ok(())
}

fn bad(line: usize, detail: impl Into<String>) -> Error {
    Error::TableFormat { line, detail: detail.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|e| bad(line, format!("'{tok}': {e}")))
}

pub fn read_table<R: BufRead>(input: R) -> Result<TracyWidomTable> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != MAGIC {
        return Err(bad(1, format!("expected '{MAGIC} {VERSION} x_left x_right tol n_points'")));
    }
    if fields[1] != VERSION {
        return Err(bad(1, format!("unsupported version {}", fields[1])));
    }
    let params = TableParams {
        x_left: parse_f64(fields[2], 1)?,
        x_right: parse_f64(fields[3], 1)?,
        tol: parse_f64(fields[4], 1)?,
        n_points: fields[5].parse().map_err(|e| bad(1, format!("n_points: {e}")))?,
    };
    params.validate().map_err(|e| bad(1, e.to_string()))?;

    let n = params.n_points;
    let mut sol = PainleveSolution {
        params,
        grid: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
        q_prime: Vec::with_capacity(n),
        i_q: Vec::with_capacity(n),
        i_q2: Vec::with_capacity(n),
        j_q2: Vec::with_capacity(n),
    };
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals = line
            .split_whitespace()
            .map(|t| parse_f64(t, lineno))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 6 {
            return Err(bad(lineno, format!("expected 6 columns, found {}", vals.len())));
        }
        sol.grid.push(vals[0]);
        sol.q.push(vals[1]);
        sol.q_prime.push(vals[2]);
        sol.i_q.push(vals[3]);
        sol.i_q2.push(vals[4]);
        sol.j_q2.push(vals[5]);
    }
    if sol.len() != n {
        return Err(bad(n + 2, format!("header promises {n} rows, found {}", sol.len())));
    }
    if sol.grid[0] != params.x_left || sol.grid[n - 1] != params.x_right {
        return Err(bad(2, "grid end points disagree with the header"));
    }
    Ok(TracyWidomTable::new(sol))
}
