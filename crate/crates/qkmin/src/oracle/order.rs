//! Strict total order on dataset keys.
//!
//! Values may repeat, so comparisons are made on `(value, index)` pairs:
//! lexicographic and therefore a strict total order with deterministic tie
//! breaking by index. The descending direction is the exact reversal of the
//! ascending order, so a "maximum" search is a minimum search under the
//! reversed order.

use std::cmp::Ordering;

/// Direction of the key order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Ascending,
    Descending,
}

/// Comparator over `(value, index)` keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyOrder {
    direction: Direction,
}

impl KeyOrder {
    pub const ASCENDING: KeyOrder = KeyOrder {
        direction: Direction::Ascending,
    };
    pub const DESCENDING: KeyOrder = KeyOrder {
        direction: Direction::Descending,
    };

    pub fn new(direction: Direction) -> Self {
        KeyOrder { direction }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// The reversed order.
    pub fn reversed(&self) -> KeyOrder {
        match self.direction {
            Direction::Ascending => KeyOrder::DESCENDING,
            Direction::Descending => KeyOrder::ASCENDING,
        }
    }

    /// Compares two keys. Values must be non-NaN (datasets enforce this).
    pub fn cmp(&self, a: (f64, usize), b: (f64, usize)) -> Ordering {
        let ascending = a
            .0
            .partial_cmp(&b.0)
            .expect("dataset values are never NaN")
            .then(a.1.cmp(&b.1));
        match self.direction {
            Direction::Ascending => ascending,
            Direction::Descending => ascending.reverse(),
        }
    }

    /// Strict "comes before" test.
    pub fn less(&self, a: (f64, usize), b: (f64, usize)) -> bool {
        self.cmp(a, b) == Ordering::Less
    }
}
