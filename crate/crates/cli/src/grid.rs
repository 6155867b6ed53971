//! `start:stop:step` grids and comma lists.

use crate::error::{CliError, CliResult};

/// Relative slack, in steps, for including the endpoint.
const ENDPOINT_SLACK: f64 = 1e-9;

fn num(s: &str, text: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid grid '{text}': '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("invalid grid '{text}': '{s}' is not finite")));
    }
    Ok(v)
}

/// Parses `start:stop:step` (both endpoints included, within floating
/// tolerance) or `a,b,c`.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => {
            let v = text.split(',').map(|s| num(s, text)).collect::<CliResult<Vec<_>>>()?;
            Ok(v)
        }
        3 => {
            let (start, stop, step) = (num(parts[0], text)?, num(parts[1], text)?, num(parts[2], text)?);
            if !(step > 0.0) || stop < start {
                return Err(CliError::Usage(format!(
                    "invalid grid '{text}': need step > 0 and stop >= start"
                )));
            }
            let steps = ((stop - start) / step + ENDPOINT_SLACK).floor();
            if steps > 1e6 {
                return Err(CliError::Usage(format!("invalid grid '{text}': more than 1e6 points")));
            }
            let k = steps as usize;
            // 13 significant digits drop accumulation noise (0.1·3 -> 0.3)
            let mut v: Vec<f64> = (0..=k)
                .map(|i| format!("{:.12e}", start + i as f64 * step).parse().expect("formatted float"))
                .collect();
            if (v[k] - stop).abs() <= ENDPOINT_SLACK * step {
                v[k] = stop;
            }
            Ok(v)
        }
        _ => Err(CliError::Usage(format!("invalid grid '{text}': expected start:stop:step or a,b,c"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_ranges() {
        assert_eq!(parse_grid("1:2.5:0.25").unwrap(), vec![1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5]);
        let g = parse_grid("0:1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(parse_grid("0:0.95:0.1").unwrap().len(), 10);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[7], 0.7);
    }

    #[test]
    fn lists_and_errors() {
        assert_eq!(parse_grid("1, 2,3.5").unwrap(), vec![1.0, 2.0, 3.5]);
        for bad in ["", "1:2", "1:2:0", "2:1:0.5", "a:b:c", "1:2:-1", "1,,2", "1:inf:1"] {
            assert!(matches!(parse_grid(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }
}
