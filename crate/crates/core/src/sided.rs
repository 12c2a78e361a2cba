//! Reals tagged with an approach direction.
//!
//! The map `f_t(x) = -t tanh(t tan x)` is discontinuous at the poles
//! `k*pi + pi/2` of tan, but has well-defined one-sided limits there.
//! A [`SidedReal`] carries the direction from which a value is approached
//! so orbits can pass through poles by taking the correct limit.

use serde::{Deserialize, Serialize};

/// Approach direction of a [`SidedReal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// A plain real value, no limit is taken.
    None,
    /// The value is approached from below (`x^-`).
    FromLeft,
    /// The value is approached from above (`x^+`).
    FromRight,
}

impl Side {
    /// Side after applying a strictly decreasing branch.
    pub fn flip(self) -> Side {
        match self {
            Side::None => Side::None,
            Side::FromLeft => Side::FromRight,
            Side::FromRight => Side::FromLeft,
        }
    }
}

/// A real number together with the direction it is approached from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidedReal {
    pub value: f64,
    pub side: Side,
}

impl SidedReal {
    pub fn new(value: f64, side: Side) -> Self {
        SidedReal { value, side }
    }

    /// A plain value with no approach direction.
    pub fn plain(value: f64) -> Self {
        SidedReal {
            value,
            side: Side::None,
        }
    }

    /// `value^-`, approached from below.
    pub fn from_left(value: f64) -> Self {
        SidedReal {
            value,
            side: Side::FromLeft,
        }
    }

    /// `value^+`, approached from above.
    pub fn from_right(value: f64) -> Self {
        SidedReal {
            value,
            side: Side::FromRight,
        }
    }
}

impl From<f64> for SidedReal {
    fn from(value: f64) -> Self {
        SidedReal::plain(value)
    }
}
