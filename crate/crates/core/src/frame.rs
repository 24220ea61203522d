//! Finite frames of discernment and the subset lattice over them.
//!
//! Subsets are bitmasks: bit `i` is set iff element `i` belongs to the subset.
//! Every set function over a frame of size `n` is stored densely as a slice of
//! length `2^n`, indexed by the mask's integer value.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest frame for which dense maps over the power set are allocated.
pub const MAX_FRAME: usize = 24;

/// Absolute tolerance for sums of masses and transform round trips.
pub const TOL_SUM: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("frame of size {size} exceeds the dense capacity of {max} elements")]
    TooLarge { size: usize, max: usize },
    #[error("a frame needs at least one element")]
    Empty,
    #[error("duplicate frame label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown frame label `{0}`")]
    UnknownLabel(String),
    #[error("set function has {len} entries, expected a power of two no larger than 2^{max}")]
    BadLength { len: usize, max: usize },
    #[error("subset {mask} has elements outside a frame of size {size}")]
    OutOfFrame { mask: SubsetMask, size: usize },
}

/// Ordered, uniquely labelled set of elements (usually records).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    labels: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self, FrameError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(FrameError::Empty);
        }
        if labels.len() > MAX_FRAME {
            return Err(FrameError::TooLarge {
                size: labels.len(),
                max: MAX_FRAME,
            });
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(FrameError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Frame whose labels are the positions `0..size` rendered as decimal strings.
    pub fn indexed(size: usize) -> Result<Self, FrameError> {
        Self::new((0..size).map(|i| i.to_string()))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, element: usize) -> &str {
        &self.labels[element]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Number of subsets, `2^size`.
    pub fn lattice_len(&self) -> usize {
        1usize << self.size()
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.size())
    }

    pub fn subsets(&self) -> Subsets {
        // A constructed frame is always within capacity.
        Subsets::new(self.size()).expect("frame within capacity")
    }

    pub fn subset_from_labels<I, S>(&self, labels: I) -> Result<SubsetMask, FrameError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut mask = SubsetMask::EMPTY;
        for label in labels {
            let label = label.as_ref();
            let i = self
                .position(label)
                .ok_or_else(|| FrameError::UnknownLabel(label.to_owned()))?;
            mask = mask.with(i);
        }
        Ok(mask)
    }

    pub fn subset_labels(&self, mask: SubsetMask) -> Vec<String> {
        mask.elements().map(|i| self.labels[i].clone()).collect()
    }

    pub fn check(&self, mask: SubsetMask) -> Result<(), FrameError> {
        if mask.is_subset_of(self.full()) {
            Ok(())
        } else {
            Err(FrameError::OutOfFrame {
                mask,
                size: self.size(),
            })
        }
    }
}

/// A subset of a frame with at most 64 elements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsetMask(u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub const fn from_bits(bits: u64) -> Self {
        SubsetMask(bits)
    }

    pub fn from_index(index: usize) -> Self {
        SubsetMask(index as u64)
    }

    pub fn full(size: usize) -> Self {
        if size >= 64 {
            SubsetMask(u64::MAX)
        } else {
            SubsetMask((1u64 << size) - 1)
        }
    }

    pub fn singleton(element: usize) -> Self {
        SubsetMask(1u64 << element)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        elements
            .into_iter()
            .fold(SubsetMask::EMPTY, |acc, e| acc.with(e))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Position of this subset in a dense lattice array.
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn contains(self, element: usize) -> bool {
        element < 64 && self.0 & (1u64 << element) != 0
    }

    pub const fn with(self, element: usize) -> Self {
        SubsetMask(self.0 | (1u64 << element))
    }

    pub const fn without(self, element: usize) -> Self {
        SubsetMask(self.0 & !(1u64 << element))
    }

    pub const fn union(self, other: Self) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub const fn intersection(self, other: Self) -> Self {
        SubsetMask(self.0 & other.0)
    }

    pub const fn difference(self, other: Self) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    pub const fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest element, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Elements in increasing order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self` (including `∅` and `self`), in increasing bit order.
    pub fn subsets(self) -> impl Iterator<Item = SubsetMask> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(SubsetMask(cur))
        })
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.elements().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "x{e}")?;
        }
        f.write_str("}")
    }
}

/// Iterator over every subset of a frame in increasing bit-pattern order.
#[derive(Debug, Clone)]
pub struct Subsets {
    next: u64,
    end: u64,
}

impl Subsets {
    fn new(size: usize) -> Result<Self, FrameError> {
        check_size(size)?;
        Ok(Self {
            next: 0,
            end: 1u64 << size,
        })
    }
}

impl Iterator for Subsets {
    type Item = SubsetMask;

    fn next(&mut self) -> Option<SubsetMask> {
        (self.next < self.end).then(|| {
            self.next += 1;
            SubsetMask(self.next - 1)
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Subsets {}

/// Enumerates all `2^size` subsets of a frame of `size` elements. A size of zero
/// yields only the empty set.
pub fn powerset_iter(size: usize) -> Result<Subsets, FrameError> {
    Subsets::new(size)
}

fn check_size(size: usize) -> Result<(), FrameError> {
    if size > MAX_FRAME {
        Err(FrameError::TooLarge {
            size,
            max: MAX_FRAME,
        })
    } else {
        Ok(())
    }
}

/// Number of frame elements for a dense set function of the given length.
pub fn lattice_order(len: usize) -> Result<usize, FrameError> {
    if !len.is_power_of_two() || len > (1 << MAX_FRAME) {
        return Err(FrameError::BadLength {
            len,
            max: MAX_FRAME,
        });
    }
    Ok(len.trailing_zeros() as usize)
}

/// In-place subset-sum sweep: `values[A] <- Σ_{B ⊆ A} values[B]`.
///
/// `values.len()` must be a power of two; this is not rechecked here.
pub fn zeta_in_place(values: &mut [f64]) {
    let len = values.len();
    let mut step = 1;
    while step < len {
        for block in values.chunks_exact_mut(2 * step) {
            let (lo, hi) = block.split_at_mut(step);
            for (l, h) in lo.iter().zip(hi) {
                *h += *l;
            }
        }
        step <<= 1;
    }
}

/// In-place inverse of [`zeta_in_place`].
pub fn mobius_in_place(values: &mut [f64]) {
    let len = values.len();
    let mut step = 1;
    while step < len {
        for block in values.chunks_exact_mut(2 * step) {
            let (lo, hi) = block.split_at_mut(step);
            for (l, h) in lo.iter().zip(hi) {
                *h -= *l;
            }
        }
        step <<= 1;
    }
}

/// In-place superset-sum sweep: `values[A] <- Σ_{B ⊇ A} values[B]`.
pub fn superset_zeta_in_place(values: &mut [f64]) {
    let len = values.len();
    let mut step = 1;
    while step < len {
        for block in values.chunks_exact_mut(2 * step) {
            let (lo, hi) = block.split_at_mut(step);
            for (l, h) in lo.iter_mut().zip(hi.iter()) {
                *l += *h;
            }
        }
        step <<= 1;
    }
}

/// In-place inverse of [`superset_zeta_in_place`].
pub fn superset_mobius_in_place(values: &mut [f64]) {
    let len = values.len();
    let mut step = 1;
    while step < len {
        for block in values.chunks_exact_mut(2 * step) {
            let (lo, hi) = block.split_at_mut(step);
            for (l, h) in lo.iter_mut().zip(hi.iter()) {
                *l -= *h;
            }
        }
        step <<= 1;
    }
}

/// `output[A] = Σ_{B ⊆ A} values[B]` in `O(n·2^n)`.
pub fn zeta_transform(values: &[f64]) -> Result<Vec<f64>, FrameError> {
    lattice_order(values.len())?;
    let mut out = values.to_vec();
    zeta_in_place(&mut out);
    Ok(out)
}

/// `output[A] = Σ_{B ⊆ A} (-1)^{|A|-|B|} values[B]`, the inverse of [`zeta_transform`].
pub fn mobius_transform(values: &[f64]) -> Result<Vec<f64>, FrameError> {
    lattice_order(values.len())?;
    let mut out = values.to_vec();
    mobius_in_place(&mut out);
    Ok(out)
}
