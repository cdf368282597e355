//! The six temporal butterfly types and the timestamp classifier.
//!
//! A butterfly has four edge slots named by their node pair: `E11 = (u1, l1)`,
//! `E21 = (u2, l1)`, `E12 = (u1, l2)`, `E22 = (u2, l2)`. The `E11` edge always
//! comes first, so a type is fixed by the temporal order of the other three.
//! Canonical type indices follow the lexicographic order of those permutations
//! with `E21 < E12 < E22`.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Timestamp;

pub const NUM_TYPES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeSlot {
    E11,
    E21,
    E12,
    E22,
}

use EdgeSlot::*;

/// Temporal order of the last three slots for canonical types `B1..B6`.
pub const CANONICAL_ORDERS: [[EdgeSlot; 3]; NUM_TYPES] = [
    [E21, E12, E22],
    [E21, E22, E12],
    [E12, E21, E22],
    [E12, E22, E21],
    [E22, E21, E12],
    [E22, E12, E21],
];

/// Type index mapping under exchange of the two layers (`E21 <-> E12`).
const TRANSPOSED: [usize; NUM_TYPES] = [2, 3, 0, 1, 5, 4];

/// A canonical butterfly type, stored zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ButterflyType(u8);

impl ButterflyType {
    pub const ALL: [ButterflyType; NUM_TYPES] = [
        ButterflyType(0),
        ButterflyType(1),
        ButterflyType(2),
        ButterflyType(3),
        ButterflyType(4),
        ButterflyType(5),
    ];

    /// From a one-based type number.
    pub fn from_number(n: usize) -> Option<ButterflyType> {
        (1..=NUM_TYPES).contains(&n).then(|| ButterflyType((n - 1) as u8))
    }

    /// One-based type number (`B1` is 1).
    pub fn number(self) -> usize {
        self.0 as usize + 1
    }

    pub fn slot(self) -> usize {
        self.0 as usize
    }

    pub fn slot_order(self) -> [EdgeSlot; 3] {
        CANONICAL_ORDERS[self.slot()]
    }

    /// The type the same instance has after swapping the upper and lower layers.
    pub fn transposed(self) -> ButterflyType {
        ButterflyType(TRANSPOSED[self.slot()] as u8)
    }
}

impl fmt::Display for ButterflyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}", self.number())
    }
}

/// Classifies an instance from the timestamps at slots `E11, E21, E12, E22`.
///
/// Returns `None` unless `E11` is strictly earliest and the other three are
/// pairwise distinct.
#[inline]
pub fn classify(t11: Timestamp, t21: Timestamp, t12: Timestamp, t22: Timestamp) -> Option<ButterflyType> {
    if t11 >= t21 || t11 >= t12 || t11 >= t22 || t21 == t12 || t21 == t22 || t12 == t22 {
        return None;
    }
    let idx = if t21 < t12 {
        if t12 < t22 {
            0
        } else if t21 < t22 {
            1
        } else {
            4
        }
    } else if t21 < t22 {
        2
    } else if t12 < t22 {
        3
    } else {
        5
    };
    Some(ButterflyType(idx))
}

/// Six exact per-type counts, indexed by canonical type.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountVector(pub [u64; NUM_TYPES]);

impl CountVector {
    pub fn zero() -> Self {
        CountVector([0; NUM_TYPES])
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn checked_add(&self, other: &CountVector) -> Option<CountVector> {
        let mut out = [0u64; NUM_TYPES];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.0[i].checked_add(other.0[i])?;
        }
        Some(CountVector(out))
    }

    pub fn try_add_assign(&mut self, other: &CountVector) -> Result<()> {
        *self = self.checked_add(other).ok_or(Error::CountOverflow)?;
        Ok(())
    }

    pub(crate) fn bump(&mut self, ty: ButterflyType) -> Result<()> {
        let c = &mut self.0[ty.slot()];
        *c = c.checked_add(1).ok_or(Error::CountOverflow)?;
        Ok(())
    }

    /// The counts a layer-swapped graph would produce.
    pub fn transposed(&self) -> CountVector {
        let mut out = [0u64; NUM_TYPES];
        for ty in ButterflyType::ALL {
            out[ty.transposed().slot()] = self[ty];
        }
        CountVector(out)
    }

    /// Componentwise `self <= other`.
    pub fn dominated_by(&self, other: &CountVector) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }
}

impl Index<ButterflyType> for CountVector {
    type Output = u64;

    fn index(&self, ty: ButterflyType) -> &u64 {
        &self.0[ty.slot()]
    }
}

impl IndexMut<ButterflyType> for CountVector {
    fn index_mut(&mut self, ty: ButterflyType) -> &mut u64 {
        &mut self.0[ty.slot()]
    }
}

impl fmt::Display for CountVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Maps reported labels to canonical types. Label `i` reports canonical type
/// `perm[i]`, so `"213456"` swaps what is called `B1` and `B2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    perm: [u8; NUM_TYPES],
}

impl Default for Labeling {
    fn default() -> Self {
        Labeling::identity()
    }
}

impl Labeling {
    pub fn identity() -> Self {
        Labeling { perm: [0, 1, 2, 3, 4, 5] }
    }

    /// From one-based canonical type numbers, one per label.
    pub fn new(numbers: [usize; NUM_TYPES]) -> Result<Self> {
        let mut perm = [0u8; NUM_TYPES];
        let mut seen = [false; NUM_TYPES];
        for (i, &n) in numbers.iter().enumerate() {
            let ty = ButterflyType::from_number(n)
                .ok_or_else(|| Error::Config(format!("relabeling entry {n} is not in 1..=6")))?;
            if std::mem::replace(&mut seen[ty.slot()], true) {
                return Err(Error::Config(format!("relabeling repeats type {n}")));
            }
            perm[i] = ty.0;
        }
        Ok(Labeling { perm })
    }

    pub fn canonical_type(&self, label: usize) -> ButterflyType {
        ButterflyType(self.perm[label])
    }

    /// `(label number, slot order)` rows, canonical table with this relabeling applied.
    pub fn table(&self) -> Vec<(usize, [EdgeSlot; 3])> {
        (0..NUM_TYPES)
            .map(|i| (i + 1, self.canonical_type(i).slot_order()))
            .collect()
    }

    pub fn apply(&self, counts: &CountVector) -> CountVector {
        CountVector(std::array::from_fn(|i| counts[self.canonical_type(i)]))
    }

    pub fn apply_real(&self, values: &[f64; NUM_TYPES]) -> [f64; NUM_TYPES] {
        std::array::from_fn(|i| values[self.canonical_type(i).slot()])
    }
}

impl FromStr for Labeling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<usize> = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Config(format!("relabeling `{s}` must be six digits")))?;
        let numbers: [usize; NUM_TYPES] = digits
            .try_into()
            .map_err(|_| Error::Config(format!("relabeling `{s}` must be six digits")))?;
        Labeling::new(numbers)
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.perm {
            write!(f, "{}", p + 1)?;
        }
        Ok(())
    }
}

/// The canonical permutation table.
pub fn permutation_table() -> Vec<(usize, [EdgeSlot; 3])> {
    Labeling::identity().table()
}
