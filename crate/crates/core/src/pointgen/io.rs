//! Line-oriented text dump of a configuration:
//!
//! ```text
//! geometry cycle 10000
//! mode two
//! 0 0.25 red 2
//! 1 1.5 blue 2
//! ```
//!
//! Positions are written as shortest round-trip decimals, so a dump parses
//! back to bit-identical values. On input, positions may also be given as
//! C99 hexadecimal floats (`0x1.8p+1`). Blank lines and `#` comments are
//! ignored. The `mode` line is optional and defaults to two-color.

use std::fmt::Write as _;
use std::path::Path;

use super::{build_configuration, Color, ColorMode, Configuration, Geometry, MarkedPoint};
use crate::error::{Error, Result};

pub fn write_configuration(config: &Configuration) -> String {
    let (kind, param) = config.geometry.header_param();
    let mut out = String::new();
    let _ = writeln!(out, "geometry {kind} {param:?}");
    let _ = writeln!(out, "mode {}", config.mode.as_str());
    for p in &config.points {
        let _ = writeln!(out, "{} {:?} {} {}", p.id, p.position, p.color, p.stubs);
    }
    out
}

pub fn read_configuration(path: impl AsRef<Path>) -> Result<Configuration> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_configuration(&text)
}

pub fn parse_configuration(text: &str) -> Result<Configuration> {
    let mut geometry = None;
    let mut mode = None;
    let mut red = Vec::new();
    let mut blue = Vec::new();
    let mut expected_id = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["geometry", kind, param] => {
                if geometry.is_some() {
                    return Err(Error::parse(lineno, "duplicate geometry header"));
                }
                let value = parse_f64(param).ok_or_else(|| Error::parse(lineno, "bad geometry parameter"))?;
                let g = match *kind {
                    "line" => Geometry::line(value),
                    "cycle" => Geometry::cycle(value),
                    other => return Err(Error::parse(lineno, format!("unknown geometry `{other}`"))),
                };
                geometry = Some(g.map_err(|e| Error::parse(lineno, e.to_string()))?);
            }
            ["mode", m] => {
                mode = Some(m.parse::<ColorMode>().map_err(|e| Error::parse(lineno, e.to_string()))?);
            }
            [id, position, color, stubs] => {
                if geometry.is_none() {
                    return Err(Error::parse(lineno, "point row before geometry header"));
                }
                let id: usize = id.parse().map_err(|_| Error::parse(lineno, "bad id"))?;
                if id != expected_id {
                    return Err(Error::parse(lineno, format!("expected id {expected_id}, found {id}")));
                }
                expected_id += 1;
                let position = parse_f64(position).ok_or_else(|| Error::parse(lineno, "bad position"))?;
                let color: Color = color.parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
                let stubs: u32 = stubs.parse().map_err(|_| Error::parse(lineno, "bad stub count"))?;
                let point = MarkedPoint {
                    id,
                    position,
                    color,
                    stubs,
                };
                match color {
                    Color::Red => red.push(point),
                    Color::Blue => blue.push(point),
                }
            }
            _ => return Err(Error::parse(lineno, format!("unrecognized row `{line}`"))),
        }
    }

    let geometry = geometry.ok_or_else(|| Error::parse(1, "missing geometry header"))?;
    let mode = mode.unwrap_or(ColorMode::TwoColor);
    build_configuration(red, blue, geometry, mode)
}

/// Parses a decimal or C99 hexadecimal float (`[-]0x<hex>[.<hex>]p<exp>`).
pub fn parse_f64(s: &str) -> Option<f64> {
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) else {
        return s.parse().ok();
    };
    let (digits, exponent) = match hex.find(['p', 'P']) {
        Some(at) => (&hex[..at], hex[at + 1..].parse::<i32>().ok()?),
        None => (hex, 0),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut mantissa: u128 = 0;
    let mut scale = exponent;
    for (i, c) in int_part.chars().chain(frac_part.chars()).enumerate() {
        let d = c.to_digit(16)? as u128;
        if mantissa >> 120 != 0 {
            // further digits only matter below the precision of an f64
            if i < int_part.len() {
                scale += 4;
            }
            continue;
        }
        mantissa = mantissa * 16 + d;
        if i >= int_part.len() {
            scale -= 4;
        }
    }
    let value = mantissa as f64 * 2f64.powi(scale);
    Some(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hex_floats_parse() {
        assert_eq!(parse_f64("0x1.8p+1"), Some(3.0));
        assert_eq!(parse_f64("-0x1p-2"), Some(-0.25));
        assert_eq!(parse_f64("0xAp0"), Some(10.0));
        assert_eq!(parse_f64("0x.8p1"), Some(1.0));
        assert_eq!(parse_f64("0x1.921fb54442d18p+1"), Some(std::f64::consts::PI));
        assert_eq!(parse_f64("2.5"), Some(2.5));
        assert_eq!(parse_f64("0xzz"), None);
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(parse_configuration("0 1.0 red 1\n").is_err());
        assert!(parse_configuration("geometry disk 3\n").is_err());
        assert!(parse_configuration("geometry line 5\n1 1.0 red 1\n").is_err());
        assert!(parse_configuration("geometry line 5\n0 1.0 green 1\n").is_err());
        assert!(parse_configuration("geometry line 5\nmode one\n0 1.0 blue 1\n").is_err());
        assert!(parse_configuration("geometry line 0\n").is_err());
    }

    #[test]
    fn comments_and_hex_rows() {
        let text = "# demo\ngeometry cycle 10\n\n0 0x1p0 red 2  # one\n1 3.5 blue 1\n";
        let c = parse_configuration(text).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.position(0), 1.0);
        assert_eq!(c.mode, ColorMode::TwoColor);
        assert!(c.geometry.is_cycle());
    }

    proptest! {
        #[test]
        fn dump_round_trips_exactly(
            raw in proptest::collection::vec((-1.0e6f64..1.0e6, any::<bool>(), 1u32..6), 0..40),
            cycle in any::<bool>(),
        ) {
            let geometry = if cycle { Geometry::cycle(3.0e6).unwrap() } else { Geometry::line(1.0e6).unwrap() };
            let mut red = Vec::new();
            let mut blue = Vec::new();
            for (i, (x, is_red, stubs)) in raw.into_iter().enumerate() {
                let position = if cycle { x + 1.0e6 } else { x };
                let color = if is_red { Color::Red } else { Color::Blue };
                let p = MarkedPoint { id: i, position, color, stubs };
                if is_red { red.push(p) } else { blue.push(p) }
            }
            let config = build_configuration(red, blue, geometry, ColorMode::TwoColor).unwrap();
            let back = parse_configuration(&write_configuration(&config)).unwrap();
            prop_assert_eq!(back, config);
        }
    }
}
