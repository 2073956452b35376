//! Index bookkeeping for `ℓ₂(B^A)`.
//!
//! Coordinates are laid out lexicographically: the first axis of `A` is the
//! most significant digit, symbols run `0..d`. For an axis `a` at position
//! `p`, the coordinates split into `d^(|A|-1)` blocks `x(s)`, one for each
//! assignment `s` of the remaining axes, each holding the `d` coordinates
//! `x_{s ∪ {(a, b)}}` for `b = 0..d`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{check_dims, ComplexVector};

/// The index set `B^A` with ordered axis labels `A` and alphabet `B = {0, …, d−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct TensorIndexSpace {
    axes: Vec<String>,
    alphabet_size: usize,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    axes: Vec<String>,
    alphabet_size: usize,
}

impl TryFrom<RawSpace> for TensorIndexSpace {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        TensorIndexSpace::new(raw.axes, raw.alphabet_size)
    }
}

impl From<TensorIndexSpace> for RawSpace {
    fn from(s: TensorIndexSpace) -> Self {
        RawSpace {
            axes: s.axes,
            alphabet_size: s.alphabet_size,
        }
    }
}

/// Strides of one axis inside the lexicographic layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct AxisLayout {
    /// Number of assignments of the axes before this one.
    pub outer: usize,
    /// Distance between consecutive symbols of this axis.
    pub stride: usize,
    pub alphabet_size: usize,
}

impl AxisLayout {
    pub fn block_count(&self) -> usize {
        self.outer * self.stride
    }

    /// Offset of symbol 0 of block number `block`.
    #[inline]
    pub fn block_base(&self, block: usize) -> usize {
        let o = block / self.stride;
        let i = block % self.stride;
        o * self.stride * self.alphabet_size + i
    }
}

impl TensorIndexSpace {
    pub fn new<S: Into<String>>(axes: Vec<S>, alphabet_size: usize) -> Result<Self> {
        let axes: Vec<String> = axes.into_iter().map(Into::into).collect();
        if axes.is_empty() {
            return Err(Error::InvalidSpace("at least one axis is required".into()));
        }
        if alphabet_size == 0 {
            return Err(Error::InvalidSpace("alphabet size must be positive".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].contains(a) {
                return Err(Error::InvalidSpace(format!("duplicate axis `{a}`")));
            }
        }
        let exp = u32::try_from(axes.len())
            .map_err(|_| Error::InvalidSpace("too many axes".into()))?;
        let dim = alphabet_size
            .checked_pow(exp)
            .ok_or_else(|| Error::InvalidSpace("total dimension overflows".into()))?;
        Ok(TensorIndexSpace {
            axes,
            alphabet_size,
            dim,
        })
    }

    /// Axes labelled by the `2^m` binary strings of length `m`, in lexicographic order.
    pub fn binary_axes(m: u32, alphabet_size: usize) -> Result<Self> {
        if m == 0 || m > 16 {
            return Err(Error::InvalidSpace(format!("level {m} out of range 1..=16")));
        }
        let axes = (0..1usize << m)
            .map(|i| format!("{:0width$b}", i, width = m as usize))
            .collect::<Vec<_>>();
        Self::new(axes, alphabet_size)
    }

    pub fn axes(&self) -> &[String] {
        &self.axes
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// `d^{|A|}`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn position(&self, axis: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a == axis)
            .ok_or_else(|| Error::UnknownAxis(axis.to_string()))
    }

    pub(crate) fn layout_at(&self, pos: usize) -> AxisLayout {
        let d = self.alphabet_size;
        let n = self.axes.len();
        AxisLayout {
            outer: d.pow(pos as u32),
            stride: d.pow((n - 1 - pos) as u32),
            alphabet_size: d,
        }
    }

    pub(crate) fn layout(&self, axis: &str) -> Result<AxisLayout> {
        Ok(self.layout_at(self.position(axis)?))
    }

    /// Number of blocks `x(s)` per axis: `|B|^{|A|−1}`.
    pub fn block_count(&self) -> usize {
        self.dim / self.alphabet_size
    }

    pub fn linearize(&self, t: &FunctionIndex) -> Result<usize> {
        if t.len() != self.axes.len() {
            return Err(Error::PartialIndex(format!(
                "index has {} axes, space has {}",
                t.len(),
                self.axes.len()
            )));
        }
        let mut idx = 0usize;
        for axis in &self.axes {
            let symbol = t
                .get(axis)
                .ok_or_else(|| Error::PartialIndex(format!("axis `{axis}` unassigned")))?;
            if symbol >= self.alphabet_size {
                return Err(Error::SymbolOutOfRange {
                    axis: axis.clone(),
                    symbol,
                    alphabet_size: self.alphabet_size,
                });
            }
            idx = idx * self.alphabet_size + symbol;
        }
        Ok(idx)
    }

    pub fn delinearize(&self, mut idx: usize) -> Result<FunctionIndex> {
        if idx >= self.dim {
            return Err(Error::OutOfRange(format!(
                "linear index {idx} >= dimension {}",
                self.dim
            )));
        }
        let mut symbols = vec![0usize; self.axes.len()];
        for slot in symbols.iter_mut().rev() {
            *slot = idx % self.alphabet_size;
            idx /= self.alphabet_size;
        }
        Ok(FunctionIndex::from_pairs(
            self.axes.iter().cloned().zip(symbols),
        ))
    }

    /// Enumeration of all of `B^{A∖{axis}}` in block order.
    pub fn complement_indices(&self, axis: &str) -> Result<Vec<FunctionIndex>> {
        let pos = self.position(axis)?;
        let others: Vec<&String> = self
            .axes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pos)
            .map(|(_, a)| a)
            .collect();
        let count = self.block_count();
        Ok((0..count)
            .map(|mut block| {
                let mut symbols = vec![0usize; others.len()];
                for slot in symbols.iter_mut().rev() {
                    *slot = block % self.alphabet_size;
                    block /= self.alphabet_size;
                }
                FunctionIndex::from_pairs(others.iter().map(|a| (*a).clone()).zip(symbols))
            })
            .collect())
    }

    /// The block decomposition `x(s)` along `axis`.
    pub fn block_view(&self, x: &ComplexVector, axis: &str) -> Result<BlockView> {
        check_dims(self.dim, x.dim())?;
        let layout = self.layout(axis)?;
        let labels = self.complement_indices(axis)?;
        let blocks = labels
            .into_iter()
            .enumerate()
            .map(|(block, s)| {
                let base = layout.block_base(block);
                let entries = (0..layout.alphabet_size)
                    .map(|b| x.entries()[base + b * layout.stride])
                    .collect();
                (s, ComplexVector::from_vec_unchecked(entries))
            })
            .collect();
        Ok(BlockView {
            axis: axis.to_string(),
            blocks,
        })
    }

    /// Inverse of [`block_view`](Self::block_view).
    pub fn reassemble(&self, view: &BlockView) -> Result<ComplexVector> {
        let layout = self.layout(&view.axis)?;
        if view.blocks.len() != layout.block_count() {
            return Err(Error::DimensionMismatch {
                expected: layout.block_count(),
                got: view.blocks.len(),
            });
        }
        let mut out = vec![num_complex::Complex64::new(0.0, 0.0); self.dim];
        for (block, (_, v)) in view.blocks.iter().enumerate() {
            check_dims(layout.alphabet_size, v.dim())?;
            let base = layout.block_base(block);
            for (b, z) in v.entries().iter().enumerate() {
                out[base + b * layout.stride] = *z;
            }
        }
        Ok(ComplexVector::from_vec_unchecked(out))
    }
}

/// A total assignment of symbols to (a subset of) axis labels.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FunctionIndex {
    assignment: BTreeMap<String, usize>,
}

impl FunctionIndex {
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        FunctionIndex {
            assignment: pairs.into_iter().map(|(a, b)| (a.into(), b)).collect(),
        }
    }

    pub fn get(&self, axis: &str) -> Option<usize> {
        self.assignment.get(axis).copied()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.assignment.iter().map(|(a, &b)| (a.as_str(), b))
    }

    /// `t = s ∪ {(a, b)}` ↦ `(s, b)`.
    pub fn split(&self, axis: &str) -> Result<(FunctionIndex, usize)> {
        let mut rest = self.assignment.clone();
        let b = rest
            .remove(axis)
            .ok_or_else(|| Error::UnknownAxis(axis.to_string()))?;
        Ok((FunctionIndex { assignment: rest }, b))
    }

    /// `(s, a, b)` ↦ `s ∪ {(a, b)}`; `a` must not already be assigned.
    pub fn join(&self, axis: &str, symbol: usize) -> Result<FunctionIndex> {
        if self.assignment.contains_key(axis) {
            return Err(Error::InvalidSpace(format!("axis `{axis}` already assigned")));
        }
        let mut t = self.assignment.clone();
        t.insert(axis.to_string(), symbol);
        Ok(FunctionIndex { assignment: t })
    }
}

/// Blocks `x(s)` of a vector along one axis, in block order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockView {
    pub axis: String,
    pub blocks: Vec<(FunctionIndex, ComplexVector)>,
}

impl BlockView {
    pub fn get(&self, s: &FunctionIndex) -> Option<&ComplexVector> {
        self.blocks.iter().find(|(t, _)| t == s).map(|(_, v)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ab(d: usize) -> TensorIndexSpace {
        TensorIndexSpace::new(vec!["a", "b"], d).unwrap()
    }

    #[test]
    fn linearize_examples() {
        let single = TensorIndexSpace::new(vec!["a"], 3).unwrap();
        assert_eq!(
            single.linearize(&FunctionIndex::from_pairs([("a", 2)])).unwrap(),
            2
        );
        let t = FunctionIndex::from_pairs([("a", 1), ("b", 0)]);
        assert_eq!(ab(2).linearize(&t).unwrap(), 2);

        let s = ab(4);
        for i in 0..16 {
            assert_eq!(s.linearize(&s.delinearize(i).unwrap()).unwrap(), i);
        }
        assert!(s.delinearize(16).is_err());
    }

    #[test]
    fn linearize_errors() {
        let s = ab(2);
        assert!(matches!(
            s.linearize(&FunctionIndex::from_pairs([("a", 2), ("b", 0)])),
            Err(Error::SymbolOutOfRange { .. })
        ));
        assert!(matches!(
            s.linearize(&FunctionIndex::from_pairs([("a", 0)])),
            Err(Error::PartialIndex(_))
        ));
        assert!(matches!(
            s.linearize(&FunctionIndex::from_pairs([("a", 0), ("c", 0)])),
            Err(Error::PartialIndex(_))
        ));
    }

    #[test]
    fn space_validation() {
        assert!(TensorIndexSpace::new(Vec::<String>::new(), 2).is_err());
        assert!(TensorIndexSpace::new(vec!["a", "a"], 2).is_err());
        assert!(TensorIndexSpace::new(vec!["a"], 0).is_err());
        let big: Vec<String> = (0..70).map(|i| i.to_string()).collect();
        assert!(TensorIndexSpace::new(big, 2).is_err());
        let lvl = TensorIndexSpace::binary_axes(2, 3).unwrap();
        assert_eq!(lvl.axes(), &["00", "01", "10", "11"]);
        assert_eq!(lvl.dim(), 81);
    }

    #[test]
    fn split_and_join() {
        let t = FunctionIndex::from_pairs([("a", 0), ("b", 1)]);
        let (s, b) = t.split("a").unwrap();
        assert_eq!(s, FunctionIndex::from_pairs([("b", 1)]));
        assert_eq!(b, 0);
        assert_eq!(s.join("a", 0).unwrap(), t);
        assert!(t.split("c").is_err());
        assert!(t.join("a", 1).is_err());

        let space = TensorIndexSpace::new(vec!["a", "b", "c"], 2).unwrap();
        for i in 0..8 {
            let t = space.delinearize(i).unwrap();
            for axis in space.axes() {
                let (s, b) = t.split(axis).unwrap();
                assert_eq!(s.join(axis, b).unwrap(), t);
                assert_eq!(s.join(axis, b).unwrap().split(axis).unwrap(), (s, b));
            }
        }
    }

    #[test]
    fn block_view_of_basic_vector() {
        let s = ab(3);
        let t = FunctionIndex::from_pairs([("a", 0), ("b", 1)]);
        let x = ComplexVector::basis(9, s.linearize(&t).unwrap()).unwrap();
        let view = s.block_view(&x, "a").unwrap();
        assert_eq!(view.blocks.len(), 3);
        for (label, block) in &view.blocks {
            if *label == FunctionIndex::from_pairs([("b", 1)]) {
                assert_eq!(*block, ComplexVector::basis(3, 0).unwrap());
            } else {
                assert!(block.is_zero());
            }
        }
    }

    #[test]
    fn block_view_layout_along_second_axis() {
        let s = ab(2);
        let x = ComplexVector::new((0..4).map(|i| Complex64::new(i as f64, 0.0)).collect()).unwrap();
        let view = s.block_view(&x, "b").unwrap();
        // Oracle: read coordinates through linearize.
        for a in 0..2 {
            let label = FunctionIndex::from_pairs([("a", a)]);
            let block = view.get(&label).unwrap();
            for b in 0..2 {
                let idx = s
                    .linearize(&FunctionIndex::from_pairs([("a", a), ("b", b)]))
                    .unwrap();
                assert_eq!(block.entries()[b], x.entries()[idx]);
            }
        }
        assert_eq!(view.blocks[0].1.entries()[1].re, 1.0);
        assert_eq!(view.blocks[1].1.entries()[0].re, 2.0);
        assert_eq!(s.reassemble(&view).unwrap(), x);
        assert!(s.block_view(&ComplexVector::zeros(3).unwrap(), "a").is_err());
    }

    #[test]
    fn space_json() {
        let s = ab(4);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"axes":["a","b"],"alphabet_size":4}"#);
        assert_eq!(serde_json::from_str::<TensorIndexSpace>(&json).unwrap(), s);
        assert!(serde_json::from_str::<TensorIndexSpace>(r#"{"axes":[],"alphabet_size":4}"#).is_err());
    }
}
