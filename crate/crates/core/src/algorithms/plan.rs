use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::validate_weights;

/// Indices in plans are 1-based positions into the problem's set list, `1..=m`.
fn validate_tuples(kind: &str, tuples: &[Vec<usize>], num_sets: usize) -> Result<()> {
    if tuples.is_empty() {
        return Err(Error::InvalidPlan(format!(
            "a {kind} plan needs at least one {kind}"
        )));
    }
    let mut covered = vec![false; num_sets];
    for (t, tuple) in tuples.iter().enumerate() {
        if tuple.len() < 2 {
            return Err(Error::InvalidPlan(format!(
                "{kind} {} has length {}; every {kind} needs at least two sets to form a \
                 2-set Douglas-Rachford operator",
                t + 1,
                tuple.len()
            )));
        }
        for &i in tuple {
            if i == 0 || i > num_sets {
                return Err(Error::InvalidPlan(format!(
                    "{kind} {} refers to set {i}, but indices must lie in 1..={num_sets}",
                    t + 1
                )));
            }
            covered[i - 1] = true;
        }
    }
    let missing: Vec<String> = covered
        .iter()
        .enumerate()
        .filter(|(_, c)| !**c)
        .map(|(i, _)| (i + 1).to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::InvalidPlan(format!(
            "the {kind}s must cover every set index 1..={num_sets} (convergence to a point of the \
             full intersection is only guaranteed when their union is the whole index set); \
             missing: {}",
            missing.join(",")
        )));
    }
    Ok(())
}

fn fmt_tuples(f: &mut fmt::Formatter<'_>, tuples: &[Vec<usize>]) -> fmt::Result {
    for (t, tuple) in tuples.iter().enumerate() {
        if t > 0 {
            f.write_str(";")?;
        }
        let parts: Vec<String> = tuple.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join(","))?;
    }
    Ok(())
}

/// Strings `I_t = (i_1, .., i_gamma)` with one positive weight per string, weights summing to 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StringPlan {
    strings: Vec<Vec<usize>>,
    weights: Vec<f64>,
    num_sets: usize,
}

impl StringPlan {
    pub fn new(strings: Vec<Vec<usize>>, weights: Vec<f64>, num_sets: usize) -> Result<Self> {
        validate_tuples("string", &strings, num_sets)?;
        if weights.len() != strings.len() {
            return Err(Error::InvalidWeights(format!(
                "{} strings but {} weights",
                strings.len(),
                weights.len()
            )));
        }
        validate_weights(&weights)?;
        Ok(Self {
            strings,
            weights,
            num_sets,
        })
    }

    pub fn with_equal_weights(strings: Vec<Vec<usize>>, num_sets: usize) -> Result<Self> {
        let w = 1.0 / strings.len().max(1) as f64;
        let weights = vec![w; strings.len()];
        Self::new(strings, weights, num_sets)
    }

    /// The single string `(1, 2, .., m)`.
    pub fn single_string(num_sets: usize) -> Result<Self> {
        Self::new(vec![(1..=num_sets).collect()], vec![1.0], num_sets)
    }

    pub fn strings(&self) -> &[Vec<usize>] {
        &self.strings
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_sets(&self) -> usize {
        self.num_sets
    }
}

impl fmt::Display for StringPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuples(f, &self.strings)
    }
}

/// Blocks `I_t` with per-block weights `w_l^t` (one per pair operator in the block).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockPlan {
    blocks: Vec<Vec<usize>>,
    weights: Vec<Vec<f64>>,
    num_sets: usize,
}

impl BlockPlan {
    pub fn new(blocks: Vec<Vec<usize>>, weights: Vec<Vec<f64>>, num_sets: usize) -> Result<Self> {
        validate_tuples("block", &blocks, num_sets)?;
        if weights.len() != blocks.len() {
            return Err(Error::InvalidWeights(format!(
                "{} blocks but {} weight lists",
                blocks.len(),
                weights.len()
            )));
        }
        for (t, (block, w)) in blocks.iter().zip(&weights).enumerate() {
            if block.len() != w.len() {
                return Err(Error::InvalidWeights(format!(
                    "block {} has {} sets but {} weights",
                    t + 1,
                    block.len(),
                    w.len()
                )));
            }
            validate_weights(w)
                .map_err(|e| Error::InvalidWeights(format!("block {}: {e}", t + 1)))?;
        }
        Ok(Self {
            blocks,
            weights,
            num_sets,
        })
    }

    pub fn with_equal_weights(blocks: Vec<Vec<usize>>, num_sets: usize) -> Result<Self> {
        let weights = blocks
            .iter()
            .map(|b| vec![1.0 / b.len().max(1) as f64; b.len()])
            .collect();
        Self::new(blocks, weights, num_sets)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn num_sets(&self) -> usize {
        self.num_sets
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

impl fmt::Display for BlockPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuples(f, &self.blocks)
    }
}
