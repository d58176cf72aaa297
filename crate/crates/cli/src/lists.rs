//! Parsers for list-valued flags: `1..64`, `2,3,4`, `0.1:1.2:0.02`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Integers given as comma-separated items, each a value or an inclusive range `a..b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntList(pub Vec<u32>);

/// Reals given as comma-separated items, each a value or a grid `start:stop:step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealList(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListError(String);

impl fmt::Display for ListError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ListError {}

fn err<T>(msg: String) -> Result<T, ListError> {
    Err(ListError(msg))
}

impl FromStr for IntList {
    type Err = ListError;

    fn from_str(s: &str) -> Result<Self, ListError> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim) {
            let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| ListError(format!("'{t}' is not a non-negative integer")));
            if let Some((a, b)) = item.split_once("..") {
                let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
                if b < a {
                    return err(format!("empty range '{item}'"));
                }
                out.extend(a..=b);
            } else {
                out.push(parse(item)?);
            }
        }
        if out.is_empty() {
            return err("empty list".into());
        }
        Ok(IntList(out))
    }
}

/// Round to 12 significant digits so grid points print as typed.
fn tidy(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Points of `start:stop:step`; the count is floor((stop - start)/step + 1e-9) + 1.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, ListError> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return err("grid bounds must be finite".into());
    }
    if step <= 0.0 {
        return err(format!("grid step must be positive, got {step}"));
    }
    if stop < start {
        return err(format!("grid stop {stop} is below start {start}"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return err(format!("grid has {count} points; at most 1000000 allowed"));
    }
    Ok((0..count).map(|k| tidy(start + k as f64 * step)).collect())
}

impl FromStr for RealList {
    type Err = ListError;

    fn from_str(s: &str) -> Result<Self, ListError> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim) {
            let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| ListError(format!("'{t}' is not a number")));
            let parts: Vec<&str> = item.split(':').collect();
            match parts.as_slice() {
                [v] => out.push(parse(v)?),
                [a, b, c] => out.extend(grid(parse(a)?, parse(b)?, parse(c)?)?),
                _ => return err(format!("'{item}' is neither a number nor start:stop:step")),
            }
        }
        if out.is_empty() {
            return err("empty list".into());
        }
        if out.iter().any(|v| !v.is_finite()) {
            return err("list values must be finite".into());
        }
        Ok(RealList(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_ranges() {
        assert_eq!("1..4".parse::<IntList>().unwrap().0, vec![1, 2, 3, 4]);
        assert_eq!("2, 5..6,9".parse::<IntList>().unwrap().0, vec![2, 5, 6, 9]);
        assert_eq!("3..=3".parse::<IntList>().unwrap().0, vec![3]);
        assert!("5..2".parse::<IntList>().is_err());
        assert!("x".parse::<IntList>().is_err());
    }

    #[test]
    fn real_grids() {
        let g = "0.1:1.2:0.02".parse::<RealList>().unwrap().0;
        assert_eq!(g.len(), 56);
        assert_eq!(g[10], 0.3);
        assert_eq!(*g.last().unwrap(), 1.2);
        assert_eq!("0.4:1.0:0.1".parse::<RealList>().unwrap().0, vec![0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]);
        assert_eq!("1.5".parse::<RealList>().unwrap().0, vec![1.5]);
        assert_eq!("2,3,4".parse::<RealList>().unwrap().0, vec![2.0, 3.0, 4.0]);
        assert!("1:0:0.1".parse::<RealList>().is_err());
        assert!("0:1:0".parse::<RealList>().is_err());
        assert!("0:1".parse::<RealList>().is_err());
    }
}
