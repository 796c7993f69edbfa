//! Triangular fuzzy numbers and the arithmetic the rest of the engine is
//! built on.
//!
//! A [`TriFuzzy`] `(a, m, b)` has membership 0 outside `[a, b]`, membership 1
//! at the peak `m`, and linear flanks in between. A sharp value `v` embeds
//! losslessly as the degenerate triangle `(v, v, v)`, so crisp and vague
//! quantities are processed by the same operations. Addition, subtraction,
//! and maximum follow extension-principle interval arithmetic on alpha-cuts;
//! for triangular operands these reduce to the component-wise formulas below.

use core::cmp::Ordering;
use core::fmt;

use serde::de::{self, Deserialize, Deserializer, SeqAccess, Visitor};
use serde::ser::{Serialize, SerializeTuple, Serializer};

/// Errors from constructing or cutting a fuzzy value.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FuzzyError {
    #[error("invalid triangular bounds ({a}, {m}, {b}): need finite a <= m <= b")]
    InvalidBounds { a: f64, m: f64, b: f64 },
    #[error("alpha level {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
}

/// Triangular fuzzy number with support `[a, b]` and peak `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriFuzzy {
    a: f64,
    m: f64,
    b: f64,
}

/// Crisp interval of values with membership >= `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaInterval {
    pub alpha: f64,
    pub lo: f64,
    pub hi: f64,
}

impl TriFuzzy {
    /// Builds a triangular number, rejecting non-finite or unordered bounds.
    pub fn new(a: f64, m: f64, b: f64) -> Result<Self, FuzzyError> {
        if a.is_finite() && m.is_finite() && b.is_finite() && a <= m && m <= b {
            Ok(Self { a, m, b })
        } else {
            Err(FuzzyError::InvalidBounds { a, m, b })
        }
    }

    /// Embeds a sharp value as the degenerate triangle `(v, v, v)`.
    pub fn crisp(v: f64) -> Self {
        debug_assert!(v.is_finite());
        Self { a: v, m: v, b: v }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Peak of the membership function.
    pub fn peak(&self) -> f64 {
        self.m
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_crisp(&self) -> bool {
        self.a == self.b
    }

    /// Width of the support, `b - a`.
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Piecewise-linear membership degree of `x`.
    pub fn membership(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            0.0
        } else if x == self.m {
            1.0
        } else if x < self.m {
            // a < m here, otherwise x == m was hit above
            (x - self.a) / (self.m - self.a)
        } else {
            (self.b - x) / (self.b - self.m)
        }
    }

    /// Component-wise maximum, the standard triangular approximation of the
    /// extension-principle max (whose exact result is not triangular in
    /// general). It matches the interval max on every alpha-cut exactly when
    /// the operands' flank lines do not cross, i.e. when `a1-a2` and `m1-m2`
    /// share a sign and so do `b1-b2` and `m1-m2`; support and core are
    /// always exact.
    pub fn max(self, rhs: Self) -> Self {
        Self {
            a: self.a.max(rhs.a),
            m: self.m.max(rhs.m),
            b: self.b.max(rhs.b),
        }
    }

    /// Centroid of the triangular membership, `(a + m + b) / 3`.
    pub fn centroid(&self) -> f64 {
        (self.a + self.m + self.b) / 3.0
    }

    /// Total preorder used wherever activities are ranked: orders by
    /// centroid; centroids within `eps` fall back to support width (narrower
    /// wins), equal widths compare equal.
    pub fn compare(&self, other: &Self, eps: f64) -> Ordering {
        let (cx, cy) = (self.centroid(), other.centroid());
        if (cx - cy).abs() > eps {
            return if cx < cy {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
        let (wx, wy) = (self.width(), other.width());
        if (wx - wy).abs() > eps {
            // narrower support ranks higher
            if wx < wy {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        } else {
            Ordering::Equal
        }
    }

    /// Interval of values with membership >= `alpha`.
    pub fn alpha_cut(&self, alpha: f64) -> Result<AlphaInterval, FuzzyError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(FuzzyError::AlphaOutOfRange(alpha));
        }
        Ok(AlphaInterval {
            alpha,
            lo: self.a + alpha * (self.m - self.a),
            hi: self.b - alpha * (self.b - self.m),
        })
    }
}

/// Extension-principle sum: `(a1+a2, m1+m2, b1+b2)`.
impl core::ops::Add for TriFuzzy {
    type Output = TriFuzzy;
    fn add(self, rhs: Self) -> Self {
        Self {
            a: self.a + rhs.a,
            m: self.m + rhs.m,
            b: self.b + rhs.b,
        }
    }
}

/// Extension-principle difference: `(a1-b2, m1-m2, b1-a2)`. Spreads widen;
/// vagueness accumulates backward instead of cancelling.
impl core::ops::Sub for TriFuzzy {
    type Output = TriFuzzy;
    fn sub(self, rhs: Self) -> Self {
        Self {
            a: self.a - rhs.b,
            m: self.m - rhs.m,
            b: self.b - rhs.a,
        }
    }
}

impl fmt::Display for TriFuzzy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_crisp() {
            write!(f, "{}", self.m)
        } else {
            write!(f, "({}, {}, {})", self.a, self.m, self.b)
        }
    }
}

/// Crisp projection used when a single number is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Defuzz {
    /// Centroid of the triangle, `(a + m + b) / 3`. The default.
    #[default]
    Centroid,
    /// The peak `m`.
    Peak,
}

impl Defuzz {
    pub fn apply(self, x: &TriFuzzy) -> f64 {
        match self {
            Defuzz::Centroid => x.centroid(),
            Defuzz::Peak => x.peak(),
        }
    }
}

// JSON encoding: a bare number is shorthand for the crisp (v, v, v); the
// general form is the array [a, m, b]. Serialization picks the shortest of
// the two, so values round-trip bit-exactly.

impl Serialize for TriFuzzy {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_crisp() {
            serializer.serialize_f64(self.m)
        } else {
            let mut t = serializer.serialize_tuple(3)?;
            t.serialize_element(&self.a)?;
            t.serialize_element(&self.m)?;
            t.serialize_element(&self.b)?;
            t.end()
        }
    }
}

impl<'de> Deserialize<'de> for TriFuzzy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TriVisitor;

        impl<'de> Visitor<'de> for TriVisitor {
            type Value = TriFuzzy;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or an [a, m, b] triple with a <= m <= b")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<TriFuzzy, E> {
                TriFuzzy::new(v, v, v).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<TriFuzzy, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<TriFuzzy, E> {
                self.visit_f64(v as f64)
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<TriFuzzy, A::Error> {
                let a: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let m: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let b: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(2, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(4, &self));
                }
                TriFuzzy::new(a, m, b).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_any(TriVisitor)
    }
}
