//! Parsing of numeric grid arguments.
//!
//! A grid is either a comma-separated list (`0.1,0.5,0.9`) or an inclusive
//! range `start:stop:step`. Integer grids also accept `start:stop` with unit
//! step and the keyword `divisors`, resolved against the node count.

use anyhow::{bail, Context, Result};

pub fn parse_f64_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            bail!("range '{text}' must be start:stop:step");
        };
        let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
        if !(step > 0.0) || stop < start {
            bail!("range '{text}' needs step > 0 and stop >= start");
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        // round to the step's decimal resolution so 0.05·3 prints as 0.15
        let scale = 1e12;
        return Ok((0..=count).map(|i| ((start + i as f64 * step) * scale).round() / scale).collect());
    }
    let values = text.split(',').map(number).collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        bail!("empty grid");
    }
    Ok(values)
}

fn number(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().with_context(|| format!("'{}' is not a number", s.trim()))?;
    if !v.is_finite() {
        bail!("'{}' is not finite", s.trim());
    }
    Ok(v)
}

pub fn parse_usize_grid(text: &str, n: usize) -> Result<Vec<usize>> {
    let text = text.trim();
    if text == "divisors" {
        return Ok((1..=n).filter(|k| n.is_multiple_of(*k)).collect());
    }
    let int = |s: &str| -> Result<usize> { s.trim().parse().with_context(|| format!("'{}' is not a count", s.trim())) };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let (start, stop, step) = match parts.as_slice() {
            [a, b] => (int(a)?, int(b)?, 1),
            [a, b, c] => (int(a)?, int(b)?, int(c)?),
            _ => bail!("range '{text}' must be start:stop[:step]"),
        };
        if step == 0 || stop < start {
            bail!("range '{text}' needs step > 0 and stop >= start");
        }
        return Ok((start..=stop).step_by(step).collect());
    }
    text.split(',').map(int).collect()
}

/// Fails unless every value lies in `[0, 1]`.
pub fn check_unit(name: &str, values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        bail!("{name} value {v} outside [0, 1]");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        let g = parse_f64_grid("0:1:0.05").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[3], 0.15);
        assert_eq!(g[20], 1.0);
        assert_eq!(parse_f64_grid("0.2, 0.5").unwrap(), vec![0.2, 0.5]);
        assert!(parse_f64_grid("0:1").is_err());
        assert!(parse_f64_grid("a,b").is_err());
        assert!(parse_f64_grid("1:0:0.1").is_err());
    }

    #[test]
    fn integer_grids() {
        assert_eq!(parse_usize_grid("divisors", 12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(parse_usize_grid("2:8:3", 12).unwrap(), vec![2, 5, 8]);
        assert_eq!(parse_usize_grid("1:3", 12).unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_usize_grid("4,9", 12).unwrap(), vec![4, 9]);
        assert!(parse_usize_grid("x", 12).is_err());
    }

    #[test]
    fn unit_check() {
        assert!(check_unit("tau", &[0.0, 1.0]).is_ok());
        assert!(check_unit("tau", &[1.5]).is_err());
    }
}
