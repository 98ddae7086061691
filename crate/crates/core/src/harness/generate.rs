//! Seeded instance families.
//!
//! `polytope` and `ball_box_mix` embed a ball of radius `slack` around a sampled point `p` in
//! every set, so their intersection has nonempty interior and `p` is recorded as the certified
//! interior point. `lines_through_point` draws lines that meet exactly at `p`; its intersection
//! is the single point `p` and has empty interior, so `p` is recorded with slack 0.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{ConvexSet, FeasibilityProblem, Point};
use crate::vecops;

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Polytope {
        num_halfspaces: usize,
        slack: f64,
    },
    BallBoxMix {
        balls: usize,
        boxes: usize,
        slack: f64,
    },
    LinesThroughPoint {
        count: usize,
    },
    Explicit(PathBuf),
}

/// Everything needed to rebuild an instance. The seed fully determines the generated sets.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceSpec {
    pub dim: usize,
    pub generator: Generator,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn polytope(dim: usize, num_halfspaces: usize, slack: f64, seed: u64) -> Self {
        Self {
            dim,
            generator: Generator::Polytope {
                num_halfspaces,
                slack,
            },
            seed,
        }
    }

    pub fn ball_box_mix(dim: usize, balls: usize, boxes: usize, slack: f64, seed: u64) -> Self {
        Self {
            dim,
            generator: Generator::BallBoxMix {
                balls,
                boxes,
                slack,
            },
            seed,
        }
    }

    pub fn lines_through_point(dim: usize, count: usize, seed: u64) -> Self {
        Self {
            dim,
            generator: Generator::LinesThroughPoint { count },
            seed,
        }
    }

    /// Parses the command-line form together with a seed:
    ///
    /// * `polytope:<n>x<halfspaces>:slack=<s>`
    /// * `ball_box_mix:<n>x<balls>+<boxes>:slack=<s>`
    /// * `lines:<n>x<count>`
    /// * `explicit:<path>`
    pub fn parse(text: &str, seed: u64) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("generator spec `{text}`: {why}"));
        let mut parts = text.splitn(2, ':');
        let family = parts.next().unwrap_or_default();
        let rest = parts
            .next()
            .ok_or_else(|| bad("expected `<family>:<shape>`"))?;

        if family == "explicit" {
            return Ok(Self {
                dim: 0,
                generator: Generator::Explicit(PathBuf::from(rest)),
                seed,
            });
        }

        let mut fields = rest.split(':');
        let shape = fields.next().unwrap_or_default();
        let mut slack = None;
        for field in fields {
            match field.split_once('=') {
                Some(("slack", v)) => {
                    slack = Some(v.parse::<f64>().map_err(|_| bad("slack is not a number"))?)
                }
                _ => return Err(bad(&format!("unknown option `{field}`"))),
            }
        }
        let (dim, counts) = shape
            .split_once('x')
            .ok_or_else(|| bad("shape must look like `<dim>x<count>`"))?;
        let dim: usize = dim
            .parse()
            .map_err(|_| bad("dimension is not an integer"))?;
        let count = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| bad(&format!("`{s}` is not a count")))
        };

        let generator = match family {
            "polytope" => Generator::Polytope {
                num_halfspaces: count(counts)?,
                slack: slack.ok_or_else(|| bad("polytope needs slack=<s>"))?,
            },
            "ball_box_mix" | "ballbox" => {
                let (balls, boxes) = counts
                    .split_once('+')
                    .ok_or_else(|| bad("ball_box_mix shape is `<dim>x<balls>+<boxes>`"))?;
                Generator::BallBoxMix {
                    balls: count(balls)?,
                    boxes: count(boxes)?,
                    slack: slack.ok_or_else(|| bad("ball_box_mix needs slack=<s>"))?,
                }
            }
            "lines" | "lines_through_point" => {
                if slack.is_some() {
                    return Err(bad("lines have empty interior and take no slack"));
                }
                Generator::LinesThroughPoint {
                    count: count(counts)?,
                }
            }
            other => return Err(bad(&format!("unknown family `{other}`"))),
        };
        Ok(Self {
            dim,
            generator,
            seed,
        })
    }

    fn validate(&self) -> Result<()> {
        let bad = |why: String| Err(Error::InvalidConfig(format!("instance spec: {why}")));
        if matches!(self.generator, Generator::Explicit(_)) {
            return Ok(());
        }
        if self.dim == 0 {
            return bad("dimension must be positive".into());
        }
        match self.generator {
            Generator::Polytope {
                num_halfspaces,
                slack,
            } => {
                if num_halfspaces == 0 {
                    return bad("polytope needs at least one halfspace".into());
                }
                if !(slack.is_finite() && slack > 0.0) {
                    return bad(format!("slack must be positive, got {slack}"));
                }
            }
            Generator::BallBoxMix {
                balls,
                boxes,
                slack,
            } => {
                if balls + boxes == 0 {
                    return bad("ball_box_mix needs at least one set".into());
                }
                if !(slack.is_finite() && slack > 0.0) {
                    return bad(format!("slack must be positive, got {slack}"));
                }
            }
            Generator::LinesThroughPoint { count } => {
                if count < 2 {
                    return bad(format!(
                        "lines_through_point needs at least 2 lines, got {count}"
                    ));
                }
                if self.dim < 2 {
                    return bad("lines need dimension at least 2".into());
                }
            }
            Generator::Explicit(_) => {}
        }
        Ok(())
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.generator {
            Generator::Polytope {
                num_halfspaces,
                slack,
            } => write!(f, "polytope:{}x{num_halfspaces}:slack={slack}", self.dim),
            Generator::BallBoxMix {
                balls,
                boxes,
                slack,
            } => {
                write!(f, "ball_box_mix:{}x{balls}+{boxes}:slack={slack}", self.dim)
            }
            Generator::LinesThroughPoint { count } => write!(f, "lines:{}x{count}", self.dim),
            Generator::Explicit(path) => write!(f, "explicit:{}", path.display()),
        }
    }
}

impl FromStr for InstanceSpec {
    type Err = Error;

    /// Parses with seed 0.
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, 0)
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v = gaussian(rng, n);
        let norm = vecops::norm(&v);
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn anchor(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Builds the instance described by `spec`.
pub fn generate(spec: &InstanceSpec) -> Result<FeasibilityProblem> {
    spec.validate()?;
    let n = spec.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match &spec.generator {
        Generator::Polytope {
            num_halfspaces,
            slack,
        } => {
            let p = anchor(&mut rng, n);
            let mut sets = Vec::with_capacity(*num_halfspaces);
            for _ in 0..*num_halfspaces {
                let a = loop {
                    let a = gaussian(&mut rng, n);
                    if vecops::norm(&a) > 1e-3 {
                        break a;
                    }
                };
                let norm_a = vecops::norm(&a);
                let margin: f64 = rng.random_range(0.0..1.0);
                let b = vecops::dot(&a, &p) + (slack + margin) * norm_a;
                sets.push(ConvexSet::halfspace(a, b)?);
            }
            FeasibilityProblem::new(sets, Some(Point::new(p)?), Some(*slack))
        }
        Generator::BallBoxMix {
            balls,
            boxes,
            slack,
        } => {
            let p = anchor(&mut rng, n);
            let mut sets = Vec::with_capacity(balls + boxes);
            for _ in 0..*balls {
                let u = unit_vector(&mut rng, n);
                let offset: f64 = rng.random_range(0.0..2.0);
                let center: Vec<f64> = p.iter().zip(&u).map(|(pi, ui)| pi + offset * ui).collect();
                let extra: f64 = rng.random_range(0.25..1.5);
                let radius = vecops::dist(&center, &p) + slack + extra;
                sets.push(ConvexSet::ball(center, radius)?);
            }
            for _ in 0..*boxes {
                let lower = p
                    .iter()
                    .map(|pi| pi - slack - rng.random_range(0.0..2.0))
                    .collect();
                let upper = p
                    .iter()
                    .map(|pi| pi + slack + rng.random_range(0.0..2.0))
                    .collect();
                sets.push(ConvexSet::boxed(lower, upper)?);
            }
            FeasibilityProblem::new(sets, Some(Point::new(p)?), Some(*slack))
        }
        Generator::LinesThroughPoint { count } => {
            let p = anchor(&mut rng, n);
            let mut sets = Vec::with_capacity(*count);
            if n == 2 {
                // Directions spread over [0, pi) with a jitter of a quarter spacing, so any two
                // lines are at least half a spacing apart.
                let spacing = std::f64::consts::PI / *count as f64;
                let phase: f64 = rng.random_range(0.0..spacing);
                for i in 0..*count {
                    let jitter: f64 = rng.random_range(-0.25..0.25) * spacing;
                    let theta = phase + i as f64 * spacing + jitter;
                    let normal = vec![-theta.sin(), theta.cos()];
                    let offset = vecops::dot(&normal, &p);
                    sets.push(ConvexSet::hyperplane(normal, offset)?);
                }
            } else {
                for _ in 0..*count {
                    let d = unit_vector(&mut rng, n);
                    let rows = orthogonal_complement(&d);
                    let rhs = rows.iter().map(|r| vecops::dot(r, &p)).collect();
                    sets.push(ConvexSet::affine(n, rows, rhs)?);
                }
            }
            FeasibilityProblem::new(sets, Some(Point::new(p)?), Some(0.0))
        }
        Generator::Explicit(path) => super::io::load_problem(path),
    }
}

/// Orthonormal basis of the complement of the unit vector `d`, from the rows of the Householder
/// reflector that maps `d` onto a signed coordinate axis.
fn orthogonal_complement(d: &[f64]) -> Vec<Vec<f64>> {
    let n = d.len();
    let sign = if d[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = d.to_vec();
    v[0] += sign;
    let v_sq = vecops::norm_sq(&v);
    (1..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    delta - 2.0 * v[i] * v[j] / v_sq
                })
                .collect()
        })
        .collect()
}

/// A deterministic starting point away from the certified point: `p + 5 g` with `g` standard
/// normal, drawn from a stream separate from the instance's.
pub fn default_start(problem: &FeasibilityProblem, seed: u64) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_57a7_0000_0001);
    let g = gaussian(&mut rng, problem.dim());
    let base = problem
        .interior_point()
        .map(|p| p.as_slice().to_vec())
        .unwrap_or_else(|| vec![0.0; problem.dim()]);
    Point::from_vec_unchecked(base.iter().zip(&g).map(|(b, gi)| b + 5.0 * gi).collect())
}
