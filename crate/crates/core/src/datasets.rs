//! Bars-and-stripes images and training sets built from them.
//!
//! Pixels are row-major with `1` = white (ON). The visible-state index of a
//! pattern is `sum_i v_i * 2^i`, so pixel 0 is the least significant bit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Side length of the images used throughout.
pub const SIDE: usize = 3;
/// Largest visible layer whose distribution is stored densely.
pub const MAX_DENSE_VISIBLE: usize = 20;

/// A binary image, serialized as a string of `0`/`1` characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(Vec<u8>);

impl Pattern {
    /// Panics if any entry is not 0 or 1.
    pub fn new(pixels: Vec<u8>) -> Self {
        assert!(pixels.iter().all(|&p| p <= 1), "pattern pixels must be 0 or 1");
        Self(pixels)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Visible-state index, pixel 0 as least significant bit.
    pub fn index(&self) -> usize {
        self.0.iter().enumerate().map(|(i, &p)| usize::from(p) << i).sum()
    }

    pub fn from_index(index: usize, n_visible: usize) -> Self {
        Self((0..n_visible).map(|i| ((index >> i) & 1) as u8).collect())
    }

    /// True if every row is constant or every column is constant.
    pub fn is_bars_or_stripes(&self, side: usize) -> bool {
        if self.0.len() != side * side {
            return false;
        }
        let px = |r: usize, c: usize| self.0[r * side + c];
        let rows = (0..side).all(|r| (0..side).all(|c| px(r, c) == px(r, 0)));
        let cols = (0..side).all(|c| (0..side).all(|r| px(r, c) == px(0, c)));
        rows || cols
    }

    /// Multi-line rendering, `#` for white.
    pub fn render(&self, side: usize) -> String {
        self.0
            .chunks(side)
            .map(|row| row.iter().map(|&p| if p == 1 { '#' } else { '.' }).collect::<String>())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &p in &self.0 {
            f.write_str(if p == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::BadPattern(format!("unexpected character {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Pattern)
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn from_lines(side: usize, vertical: bool, lines: &[bool]) -> Pattern {
    let mut pixels = vec![0u8; side * side];
    for r in 0..side {
        for c in 0..side {
            let on = if vertical { lines[c] } else { lines[r] };
            pixels[r * side + c] = u8::from(on);
        }
    }
    Pattern(pixels)
}

/// Draws one image: horizontal or vertical with equal probability, then each
/// row (or column) ON with probability 1/2.
pub fn sample_bars_stripes<R: Rng + ?Sized>(side: usize, rng: &mut R) -> Pattern {
    let vertical = rng.random_bool(0.5);
    let lines: Vec<bool> = (0..side).map(|_| rng.random_bool(0.5)).collect();
    from_lines(side, vertical, &lines)
}

/// All distinct images in a fixed order: horizontal ones first, then the
/// vertical ones not already listed.
pub fn enumerate_distinct(side: usize) -> Vec<Pattern> {
    let mut out: Vec<Pattern> = Vec::with_capacity(2 << side);
    for vertical in [false, true] {
        for mask in 0..(1usize << side) {
            let lines: Vec<bool> = (0..side).map(|i| (mask >> i) & 1 == 1).collect();
            let p = from_lines(side, vertical, &lines);
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Probability that [`sample_bars_stripes`] produces `pattern`.
pub fn generator_probability(pattern: &Pattern, side: usize) -> f64 {
    let per_path = 0.5 * 0.5f64.powi(side as i32);
    if !pattern.is_bars_or_stripes(side) {
        return 0.0;
    }
    let px = pattern.pixels();
    let uniform = px.iter().all(|&p| p == px[0]);
    if uniform {
        2.0 * per_path
    } else {
        per_path
    }
}

/// How a training set is drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetMode {
    /// Subset of the distinct images, without replacement.
    #[default]
    Distinct,
    /// Raw generator draws; duplicates allowed.
    Sampler,
}

/// Training patterns and their empirical distribution over visible states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    patterns: Vec<Pattern>,
    empirical: Vec<f64>,
}

impl DataSet {
    pub fn from_patterns(patterns: Vec<Pattern>) -> Result<Self> {
        let Some(first) = patterns.first() else {
            return Err(Error::InvalidParameter("data set must not be empty".into()));
        };
        let n_visible = first.len();
        if n_visible == 0 || n_visible > MAX_DENSE_VISIBLE {
            return Err(Error::InvalidParameter(format!("pattern length {n_visible} out of range")));
        }
        if patterns.iter().any(|p| p.len() != n_visible) {
            return Err(Error::InvalidParameter("patterns differ in length".into()));
        }
        let mut empirical = vec![0.0; 1 << n_visible];
        let w = 1.0 / patterns.len() as f64;
        for p in &patterns {
            empirical[p.index()] += w;
        }
        Ok(Self { patterns, empirical })
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn empirical(&self) -> &[f64] {
        &self.empirical
    }

    pub fn n_visible(&self) -> usize {
        self.patterns[0].len()
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Distinct patterns in first-seen order.
    pub fn distinct(&self) -> Vec<Pattern> {
        let mut out: Vec<Pattern> = Vec::new();
        for p in &self.patterns {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
        out
    }
}

/// Uniform random subset of `n_patterns` distinct 3x3 images, kept in
/// enumeration order.
pub fn make_training_set<R: Rng + ?Sized>(n_patterns: usize, rng: &mut R) -> Result<DataSet> {
    let all = enumerate_distinct(SIDE);
    if n_patterns == 0 || n_patterns > all.len() {
        return Err(Error::OutOfRange { requested: n_patterns, available: all.len() });
    }
    let mut chosen = rand::seq::index::sample(rng, all.len(), n_patterns).into_vec();
    chosen.sort_unstable();
    DataSet::from_patterns(chosen.into_iter().map(|i| all[i].clone()).collect())
}

/// `n_patterns` raw generator draws.
pub fn make_sampled_set<R: Rng + ?Sized>(n_patterns: usize, rng: &mut R) -> Result<DataSet> {
    if n_patterns == 0 {
        return Err(Error::OutOfRange { requested: 0, available: usize::MAX });
    }
    DataSet::from_patterns((0..n_patterns).map(|_| sample_bars_stripes(SIDE, rng)).collect())
}

pub fn make_dataset<R: Rng + ?Sized>(mode: DatasetMode, n_patterns: usize, rng: &mut R) -> Result<DataSet> {
    match mode {
        DatasetMode::Distinct => make_training_set(n_patterns, rng),
        DatasetMode::Sampler => make_sampled_set(n_patterns, rng),
    }
}
