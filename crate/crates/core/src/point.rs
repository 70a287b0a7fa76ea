//! Points of the marginal spaces and of their product.
//!
//! Equality, hashing and ordering are bitwise on the coordinates. Negative
//! zero is folded into positive zero at construction so that `-0.0` and `0.0`
//! name the same point; every other bit pattern is distinct.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Default)]
pub struct MarginalPoint(Vec<f64>);

impl MarginalPoint {
    /// Panics on non-finite coordinates; use [`MarginalPoint::try_new`] for
    /// untrusted input.
    pub fn new(coords: Vec<f64>) -> Self {
        Self::try_new(coords).expect("marginal point coordinates must be finite")
    }

    pub fn try_new(mut coords: Vec<f64>) -> Result<Self> {
        for c in coords.iter_mut() {
            if !c.is_finite() {
                return Err(Error::Invalid(format!("non-finite coordinate {c}")));
            }
            *c += 0.0;
        }
        Ok(Self(coords))
    }

    pub fn scalar(x: f64) -> Self {
        Self::new(vec![x])
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.0.iter().map(|a| a * s).collect())
    }

    fn bits(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|c| c.to_bits())
    }
}

impl PartialEq for MarginalPoint {
    fn eq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.bits().eq(other.bits())
    }
}

impl Eq for MarginalPoint {}

impl Hash for MarginalPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.len().hash(state);
        for b in self.bits() {
            b.hash(state);
        }
    }
}

impl PartialOrd for MarginalPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MarginalPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| self.0.len().cmp(&other.0.len()))
    }
}

impl fmt::Debug for MarginalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<f64>> for MarginalPoint {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

impl From<f64> for MarginalPoint {
    fn from(x: f64) -> Self {
        Self::scalar(x)
    }
}

impl Serialize for MarginalPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarginalPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Self::try_new(v).map_err(serde::de::Error::custom)
    }
}

/// One point `(x_1, ..., x_N)` of the product space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductPoint {
    parts: Vec<MarginalPoint>,
}

impl ProductPoint {
    pub fn new(parts: Vec<MarginalPoint>) -> Self {
        Self { parts }
    }

    /// One-dimensional marginals given as plain scalars.
    pub fn from_scalars(xs: &[f64]) -> Self {
        Self::new(xs.iter().map(|&x| MarginalPoint::scalar(x)).collect())
    }

    pub fn from_coords(parts: Vec<Vec<f64>>) -> Self {
        Self::new(parts.into_iter().map(MarginalPoint::new).collect())
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[MarginalPoint] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &MarginalPoint {
        &self.parts[i]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(MarginalPoint::dim).collect()
    }

    pub fn translate(&self, z: &ProductPoint) -> Self {
        Self::new(self.parts.iter().zip(&z.parts).map(|(a, b)| a.add(b)).collect())
    }

    /// Scalar coordinates when every marginal is one-dimensional.
    pub fn scalars(&self) -> Option<Vec<f64>> {
        self.parts
            .iter()
            .map(|p| (p.dim() == 1).then(|| p.coords()[0]))
            .collect()
    }
}

impl fmt::Debug for ProductPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("").field(&self.parts).finish()
    }
}
