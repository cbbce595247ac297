//! Marked point configurations: geometries, degree laws, sampling and the
//! merged, position-sorted [`Configuration`].

mod io;

pub use io::{parse_configuration, parse_f64, read_configuration, write_configuration};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// The window `[-halfwidth, halfwidth]` of the real line.
    LineWindow { halfwidth: f64 },
    /// The cycle `[0, circumference)` with wraparound distance.
    Cycle { circumference: f64 },
}

impl Geometry {
    pub fn line(halfwidth: f64) -> Result<Self> {
        let g = Geometry::LineWindow { halfwidth };
        g.validate()?;
        Ok(g)
    }

    pub fn cycle(circumference: f64) -> Result<Self> {
        let g = Geometry::Cycle { circumference };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let (name, value) = match *self {
            Geometry::LineWindow { halfwidth } => ("halfwidth", halfwidth),
            Geometry::Cycle { circumference } => ("circumference", circumference),
        };
        if value.is_finite() && value > 0.0 {
            Ok(())
        } else {
            Err(Error::Geometry(format!("{name} must be positive, got {value}")))
        }
    }

    pub fn contains(&self, position: f64) -> bool {
        match *self {
            Geometry::LineWindow { halfwidth } => (-halfwidth..=halfwidth).contains(&position),
            Geometry::Cycle { circumference } => (0.0..circumference).contains(&position),
        }
    }

    pub fn is_cycle(&self) -> bool {
        matches!(self, Geometry::Cycle { .. })
    }

    /// Line distance `|x - y|`, or the shorter arc on the cycle.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let d = (x - y).abs();
        match *self {
            Geometry::LineWindow { .. } => d,
            Geometry::Cycle { circumference } => d.min(circumference - d),
        }
    }

    /// Displacement from `from` to `to` along the shorter way: negative means
    /// `to` lies to the left. On the cycle an exactly antipodal pair returns
    /// `+C/2`; use [`Geometry::is_antipodal`] to detect it.
    pub fn displacement(&self, from: f64, to: f64) -> f64 {
        match *self {
            Geometry::LineWindow { .. } => to - from,
            Geometry::Cycle { circumference } => {
                let forward = (to - from).rem_euclid(circumference);
                if forward <= circumference / 2.0 {
                    forward
                } else {
                    forward - circumference
                }
            }
        }
    }

    pub fn is_antipodal(&self, x: f64, y: f64) -> bool {
        match *self {
            Geometry::LineWindow { .. } => false,
            Geometry::Cycle { circumference } => {
                (x - y).abs() * 2.0 == circumference
            }
        }
    }

    fn header_param(&self) -> (&'static str, f64) {
        match *self {
            Geometry::LineWindow { halfwidth } => ("line", halfwidth),
            Geometry::Cycle { circumference } => ("cycle", circumference),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn as_str(&self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Blue => "blue",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "red" | "R" | "r" => Ok(Color::Red),
            "blue" | "B" | "b" => Ok(Color::Blue),
            other => Err(Error::Configuration(format!("unknown color `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorMode {
    OneColor,
    TwoColor,
}

impl ColorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ColorMode::OneColor => "one",
            ColorMode::TwoColor => "two",
        }
    }
}

impl FromStr for ColorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" | "one-color" | "1" => Ok(ColorMode::OneColor),
            "two" | "two-color" | "2" => Ok(ColorMode::TwoColor),
            other => Err(Error::Configuration(format!("unknown color mode `{other}`"))),
        }
    }
}

/// A probability law on the strictly positive integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeLaw {
    Constant { k: u32 },
    /// `a` with probability `p`, otherwise `b`.
    TwoPoint { a: u32, b: u32, p: f64 },
    /// `Poisson(lambda) + shift`.
    PoissonShift { lambda: f64, shift: u32 },
}

impl DegreeLaw {
    pub fn constant(k: u32) -> Result<Self> {
        let law = DegreeLaw::Constant { k };
        law.validate()?;
        Ok(law)
    }

    pub fn two_point(a: u32, b: u32, p: f64) -> Result<Self> {
        let law = DegreeLaw::TwoPoint { a, b, p };
        law.validate()?;
        Ok(law)
    }

    pub fn poisson_shift(lambda: f64, shift: u32) -> Result<Self> {
        let law = DegreeLaw::PoissonShift { lambda, shift };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DegreeLaw::Constant { k: 0 } => {
                Err(Error::DegreeLaw("constant degree must be at least 1".into()))
            }
            DegreeLaw::TwoPoint { a, b, p } => {
                if a == 0 || a >= b {
                    Err(Error::DegreeLaw(format!("two-point law needs 0 < a < b, got a={a}, b={b}")))
                } else if !(p > 0.0 && p < 1.0) {
                    Err(Error::DegreeLaw(format!("two-point probability must lie in (0,1), got {p}")))
                } else {
                    Ok(())
                }
            }
            DegreeLaw::PoissonShift { lambda, shift } => {
                if !(lambda.is_finite() && lambda >= 0.0) {
                    Err(Error::DegreeLaw(format!("poisson rate must be >= 0, got {lambda}")))
                } else if shift == 0 {
                    Err(Error::DegreeLaw("poisson shift must be at least 1".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DegreeLaw::Constant { k } => k as f64,
            DegreeLaw::TwoPoint { a, b, p } => p * a as f64 + (1.0 - p) * b as f64,
            DegreeLaw::PoissonShift { lambda, shift } => lambda + shift as f64,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match *self {
            DegreeLaw::Constant { k } => k,
            DegreeLaw::TwoPoint { a, b, p } => {
                if rng.random_bool(p) {
                    a
                } else {
                    b
                }
            }
            DegreeLaw::PoissonShift { lambda, shift } => {
                if lambda == 0.0 {
                    return shift;
                }
                let poisson = Poisson::new(lambda).expect("validated rate");
                poisson.sample(rng) as u32 + shift
            }
        }
    }

    /// Short label such as `2 and 3` or `Poisson(2)+1`.
    pub fn label(&self) -> String {
        match *self {
            DegreeLaw::Constant { k } => k.to_string(),
            DegreeLaw::TwoPoint { a, b, p } if p == 0.5 => format!("{a} and {b}"),
            DegreeLaw::TwoPoint { a, b, p } => format!("{a} and {b} (p={p})"),
            DegreeLaw::PoissonShift { lambda, shift } => format!("Poisson({lambda})+{shift}"),
        }
    }
}

impl fmt::Display for DegreeLaw {
    /// The compact form accepted by [`DegreeLaw::from_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DegreeLaw::Constant { k } => write!(f, "const:{k}"),
            DegreeLaw::TwoPoint { a, b, p } => write!(f, "two:{a}:{b}:{p}"),
            DegreeLaw::PoissonShift { lambda, shift } => write!(f, "poisson:{lambda}:{shift}"),
        }
    }
}

impl FromStr for DegreeLaw {
    type Err = Error;

    /// Accepts `const:K` (or a bare `K`), `two:A:B:P` and `poisson:LAMBDA:SHIFT`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::DegreeLaw(format!("cannot parse degree law `{s}`"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            [k] => DegreeLaw::constant(k.parse().map_err(|_| bad())?),
            ["const", k] => DegreeLaw::constant(k.parse().map_err(|_| bad())?),
            ["two", a, b, p] => DegreeLaw::two_point(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
                p.parse().map_err(|_| bad())?,
            ),
            ["poisson", l, shift] => DegreeLaw::poisson_shift(
                l.parse().map_err(|_| bad())?,
                shift.parse().map_err(|_| bad())?,
            ),
            _ => Err(bad()),
        }
    }
}

/// A colored position with a stub budget. `stubs == 0` marks a freshly
/// sampled point whose mark has not been assigned yet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub id: usize,
    pub position: f64,
    pub color: Color,
    pub stubs: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Sampling {
    /// Poisson processes on a line window with these intensities.
    Intensities { red: f64, blue: f64 },
    /// A fixed number of uniform points per color.
    Counts { red: usize, blue: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub geometry: Geometry,
    /// Sorted by position; `points[i].id == i`.
    pub points: Vec<MarkedPoint>,
    pub mode: ColorMode,
    pub sampling: Option<Sampling>,
    /// Two points share an exact position.
    pub collision: bool,
}

impl Configuration {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, id: usize) -> f64 {
        self.points[id].position
    }

    pub fn color(&self, id: usize) -> Color {
        self.points[id].color
    }

    pub fn stubs(&self, id: usize) -> u32 {
        self.points[id].stubs
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.geometry.distance(self.points[a].position, self.points[b].position)
    }

    pub fn count(&self, color: Color) -> usize {
        self.points.iter().filter(|p| p.color == color).count()
    }

    /// Total stubs of (red, blue) points.
    pub fn stub_totals(&self) -> (u64, u64) {
        self.points.iter().fold((0, 0), |(r, b), p| match p.color {
            Color::Red => (r + p.stubs as u64, b),
            Color::Blue => (r, b + p.stubs as u64),
        })
    }

    /// Two-color configurations with one color absent can only yield the
    /// empty matching.
    pub fn missing_color(&self) -> bool {
        self.mode == ColorMode::TwoColor
            && (self.count(Color::Red) == 0 || self.count(Color::Blue) == 0)
    }

    /// Whether the red and blue stub totals balance. When they do not, the
    /// matching is necessarily partial.
    pub fn stubs_balanced(&self) -> bool {
        match self.mode {
            ColorMode::TwoColor => {
                let (r, b) = self.stub_totals();
                r == b
            }
            ColorMode::OneColor => self.stub_totals().0.is_multiple_of(2),
        }
    }
}

/// Poisson process of the given intensity on a line window. Returned points
/// are sorted, carry no marks yet and are numbered in sorted order.
pub fn sample_poisson_line<R: Rng + ?Sized>(
    intensity: f64,
    geometry: Geometry,
    color: Color,
    rng: &mut R,
) -> Result<Vec<MarkedPoint>> {
    let Geometry::LineWindow { halfwidth } = geometry else {
        return Err(Error::Geometry("poisson line sampling needs a line window".into()));
    };
    geometry.validate()?;
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(Error::Configuration(format!("intensity must be positive, got {intensity}")));
    }
    let expected = intensity * 2.0 * halfwidth;
    let count = Poisson::new(expected)
        .map_err(|e| Error::Configuration(format!("poisson mean {expected}: {e}")))?
        .sample(rng) as usize;
    let positions = (0..count).map(|_| rng.random_range(-halfwidth..=halfwidth)).collect();
    Ok(unmarked(positions, color))
}

/// `n` independent uniform points on the cycle, sorted.
pub fn sample_uniform_cycle<R: Rng + ?Sized>(
    n: usize,
    geometry: Geometry,
    color: Color,
    rng: &mut R,
) -> Result<Vec<MarkedPoint>> {
    let Geometry::Cycle { circumference } = geometry else {
        return Err(Error::Geometry("uniform cycle sampling needs a cycle".into()));
    };
    geometry.validate()?;
    if n == 0 {
        return Err(Error::Configuration("cycle sample size must be at least 1".into()));
    }
    let positions = (0..n).map(|_| rng.random_range(0.0..circumference)).collect();
    Ok(unmarked(positions, color))
}

fn unmarked(mut positions: Vec<f64>, color: Color) -> Vec<MarkedPoint> {
    positions.sort_by(f64::total_cmp);
    positions
        .into_iter()
        .enumerate()
        .map(|(id, position)| MarkedPoint {
            id,
            position,
            color,
            stubs: 0,
        })
        .collect()
}

/// Draws each point's stub count independently from `law`, in slice order.
pub fn assign_marks<R: Rng + ?Sized>(points: &mut [MarkedPoint], law: &DegreeLaw, rng: &mut R) {
    for p in points {
        p.stubs = law.sample(rng);
    }
}

/// Merges both colors into a position-sorted configuration with dense ids.
///
/// Exact position ties are ordered red before blue, then by the incoming
/// `id` (the sampling index), and set the `collision` flag.
pub fn build_configuration(
    red: Vec<MarkedPoint>,
    blue: Vec<MarkedPoint>,
    geometry: Geometry,
    mode: ColorMode,
) -> Result<Configuration> {
    geometry.validate()?;
    if mode == ColorMode::OneColor && !blue.is_empty() {
        return Err(Error::Configuration("one-color configuration with blue points".into()));
    }
    let mut points: Vec<MarkedPoint> = Vec::with_capacity(red.len() + blue.len());
    for (color, list) in [(Color::Red, red), (Color::Blue, blue)] {
        for p in list {
            if p.color != color {
                return Err(Error::Configuration(format!(
                    "point {} in the {color} list is colored {}",
                    p.id, p.color
                )));
            }
            if p.stubs == 0 {
                return Err(Error::Configuration(format!("{color} point {} has no stubs", p.id)));
            }
            if !geometry.contains(p.position) {
                return Err(Error::Configuration(format!(
                    "{color} point {} at {} lies outside the geometry",
                    p.id, p.position
                )));
            }
            points.push(p);
        }
    }
    points.sort_by(|x, y| {
        x.position
            .total_cmp(&y.position)
            .then(x.color.cmp(&y.color))
            .then(x.id.cmp(&y.id))
    });
    let collision = points.windows(2).any(|w| w[0].position == w[1].position);
    for (id, p) in points.iter_mut().enumerate() {
        p.id = id;
    }
    let config = Configuration {
        geometry,
        points,
        mode,
        sampling: None,
        collision,
    };
    if collision {
        log::warn!("configuration has coinciding positions");
    }
    if config.missing_color() {
        log::warn!("two-color configuration with an empty color class");
    }
    Ok(config)
}
