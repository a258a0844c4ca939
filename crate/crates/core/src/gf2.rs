//! Linear algebra over GF(2) on word-packed bit-vectors.
//!
//! A [`BitVec`] of width `p` is the coefficient vector of a sum of parts
//! `x_1 .. x_p`. [`Gf2Basis`] keeps a span in reduced row-echelon form, with
//! the leading coordinate of each row being its lowest set index, so two bases
//! of the same span compare equal.

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(width: usize) -> usize {
    width.div_ceil(WORD_BITS)
}

/// Fixed-width GF(2) vector. Bits at positions `>= width` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    width: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(width: usize) -> Self {
        BitVec {
            width,
            words: vec![0; words_for(width)],
        }
    }

    pub fn unit(width: usize, index: usize) -> Result<Self> {
        let mut v = Self::zeros(width);
        v.set(index, true)?;
        Ok(v)
    }

    /// Builds a vector with ones at the given 0-based positions.
    /// Repeated indices cancel, as they would in a GF(2) sum.
    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, indices: I) -> Result<Self> {
        let mut v = Self::zeros(width);
        for i in indices {
            v.flip(i)?;
        }
        Ok(v)
    }

    /// Builds a vector from the low `width` bits of a mask (`width <= 64`).
    pub fn from_mask(width: usize, mask: u64) -> Result<Self> {
        if width > WORD_BITS || (width < WORD_BITS && mask >> width != 0) {
            return Err(Error::Dimension {
                expected: width,
                found: WORD_BITS - mask.leading_zeros() as usize,
            });
        }
        let mut v = Self::zeros(width);
        if let Some(w) = v.words.first_mut() {
            *w = mask;
        }
        Ok(v)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.width {
            Err(Error::IndexOutOfRange {
                what: "bit",
                index,
                bound: self.width,
            })
        } else {
            Ok(())
        }
    }

    pub fn get(&self, index: usize) -> bool {
        index < self.width && (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) -> Result<()> {
        self.check_index(index)?;
        let bit = 1u64 << (index % WORD_BITS);
        if value {
            self.words[index / WORD_BITS] |= bit;
        } else {
            self.words[index / WORD_BITS] &= !bit;
        }
        Ok(())
    }

    pub fn flip(&mut self, index: usize) -> Result<()> {
        self.check_index(index)?;
        self.words[index / WORD_BITS] ^= 1u64 << (index % WORD_BITS);
        Ok(())
    }

    pub fn xor_assign(&mut self, other: &BitVec) -> Result<()> {
        if other.width != self.width {
            return Err(Error::Dimension {
                expected: self.width,
                found: other.width,
            });
        }
        self.xor_unchecked(other);
        Ok(())
    }

    fn xor_unchecked(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lowest set index, the leading coordinate in echelon form.
    pub fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Iterates set positions in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    /// True when no bit beyond `width` is set.
    pub fn tail_is_clear(&self) -> bool {
        let used = self.width % WORD_BITS;
        match (used, self.words.last()) {
            (0, _) | (_, None) => true,
            (u, Some(&w)) => w >> u == 0,
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parses a string of `0`/`1` characters, position 0 first.
impl std::str::FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = BitVec::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true)?,
                _ => return Err(Error::Parse(format!("not a bit: {c:?}"))),
            }
        }
        Ok(v)
    }
}

/// A span stored in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Basis {
    width: usize,
    rows: Vec<BitVec>,
    leads: Vec<usize>,
}

impl Gf2Basis {
    pub fn new(width: usize) -> Self {
        Gf2Basis {
            width,
            rows: Vec::new(),
            leads: Vec::new(),
        }
    }

    pub fn from_vectors<'a, I>(width: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a BitVec>,
    {
        let mut basis = Self::new(width);
        for v in vectors {
            basis.insert(v)?;
        }
        Ok(basis)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    fn check_width(&self, v: &BitVec) -> Result<()> {
        if v.width() != self.width {
            Err(Error::Dimension {
                expected: self.width,
                found: v.width(),
            })
        } else {
            Ok(())
        }
    }

    fn reduce(&self, v: &mut BitVec) {
        for (row, &lead) in self.rows.iter().zip(&self.leads) {
            if v.get(lead) {
                v.xor_unchecked(row);
            }
        }
    }

    /// Adds `v` to the span. Returns whether the span grew.
    pub fn insert(&mut self, v: &BitVec) -> Result<bool> {
        self.check_width(v)?;
        let mut v = v.clone();
        self.reduce(&mut v);
        let Some(lead) = v.leading() else {
            return Ok(false);
        };
        for row in &mut self.rows {
            if row.get(lead) {
                row.xor_unchecked(&v);
            }
        }
        let at = self.leads.partition_point(|&l| l < lead);
        self.rows.insert(at, v);
        self.leads.insert(at, lead);
        Ok(true)
    }

    /// Merges every row of `other` into this span.
    pub fn extend(&mut self, other: &Gf2Basis) -> Result<()> {
        for row in &other.rows {
            self.insert(row)?;
        }
        Ok(())
    }

    pub fn contains(&self, v: &BitVec) -> Result<bool> {
        self.check_width(v)?;
        let mut v = v.clone();
        self.reduce(&mut v);
        Ok(v.is_zero())
    }

    /// Whether the unit vector of part `index` lies in the span.
    pub fn spans_unit(&self, index: usize) -> Result<bool> {
        if index >= self.width {
            return Err(Error::IndexOutOfRange {
                what: "part",
                index,
                bound: self.width,
            });
        }
        // In reduced form e_i is in the span iff some row equals e_i.
        Ok(self
            .leads
            .binary_search(&index)
            .map(|at| self.rows[at].count_ones() == 1)
            .unwrap_or(false))
    }

    /// Unit vectors contained in the span, in increasing part order.
    pub fn units(&self) -> Vec<usize> {
        self.rows
            .iter()
            .zip(&self.leads)
            .filter(|(row, _)| row.count_ones() == 1)
            .map(|(_, &lead)| lead)
            .collect()
    }
}

/// GF(2) rank of a family of equal-width vectors.
pub fn rank(vectors: &[BitVec]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    Ok(Gf2Basis::from_vectors(first.width(), vectors)?.rank())
}

/// Echelon basis that remembers which inserted vectors make up each row,
/// so a target in the span can be written as a sum of originals.
#[derive(Clone, Debug)]
pub struct TrackedBasis {
    width: usize,
    sources: usize,
    rows: Vec<(BitVec, BitVec)>,
}

impl TrackedBasis {
    pub fn new(width: usize, capacity: usize) -> Self {
        TrackedBasis {
            width,
            sources: capacity,
            rows: Vec::new(),
        }
    }

    /// Inserts original vector number `source`.
    pub fn insert(&mut self, source: usize, v: &BitVec) -> Result<bool> {
        if v.width() != self.width {
            return Err(Error::Dimension {
                expected: self.width,
                found: v.width(),
            });
        }
        let mut v = v.clone();
        let mut combo = BitVec::unit(self.sources, source)?;
        for (row, row_combo) in &self.rows {
            if let Some(lead) = row.leading() {
                if v.get(lead) {
                    v.xor_unchecked(row);
                    combo.xor_unchecked(row_combo);
                }
            }
        }
        if v.is_zero() {
            return Ok(false);
        }
        let lead = v.leading();
        let at = self.rows.partition_point(|(r, _)| r.leading() < lead);
        self.rows.insert(at, (v, combo));
        Ok(true)
    }

    /// Source indices whose sum equals `target`, if it is in the span.
    pub fn express(&self, target: &BitVec) -> Result<Option<Vec<usize>>> {
        if target.width() != self.width {
            return Err(Error::Dimension {
                expected: self.width,
                found: target.width(),
            });
        }
        let mut v = target.clone();
        let mut combo = BitVec::zeros(self.sources);
        for (row, row_combo) in &self.rows {
            if let Some(lead) = row.leading() {
                if v.get(lead) {
                    v.xor_unchecked(row);
                    combo.xor_unchecked(row_combo);
                }
            }
        }
        Ok(v.is_zero().then(|| combo.ones().collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    #[test]
    fn single_insert() {
        let mut b = Gf2Basis::new(3);
        assert!(b.insert(&bv("001")).unwrap());
        assert_eq!(b.rank(), 1);
    }

    #[test]
    fn dependent_third_insert() {
        let mut b = Gf2Basis::new(3);
        assert!(b.insert(&bv("011")).unwrap());
        assert!(b.insert(&bv("001")).unwrap());
        assert!(!b.insert(&bv("010")).unwrap());
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn width_mismatch() {
        let mut b = Gf2Basis::new(3);
        assert!(matches!(b.insert(&bv("01")), Err(Error::Dimension { .. })));
        assert!(rank(&[bv("01"), bv("011")]).is_err());
    }

    #[test]
    fn unit_not_in_span() {
        // span{110, 011} = {000, 110, 011, 101}
        let b = Gf2Basis::from_vectors(3, &[bv("110"), bv("011")]).unwrap();
        for i in 0..3 {
            assert!(!b.spans_unit(i).unwrap());
        }
        assert!(b.contains(&bv("101")).unwrap());
        assert!(b.spans_unit(3).is_err());
        assert!(!Gf2Basis::new(4).spans_unit(2).unwrap());
    }

    #[test]
    fn rank_basics() {
        assert_eq!(rank(&[]).unwrap(), 0);
        assert_eq!(rank(&[bv("101"), bv("101")]).unwrap(), 1);
    }

    #[test]
    fn canonical_form() {
        let a = Gf2Basis::from_vectors(4, &[bv("1100"), bv("0110")]).unwrap();
        let b = Gf2Basis::from_vectors(4, &[bv("1010"), bv("1100")]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wide_vectors_keep_tail_clear() {
        let mut v = BitVec::zeros(130);
        v.set(129, true).unwrap();
        v.set(64, true).unwrap();
        assert!(v.tail_is_clear());
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![64, 129]);
        assert_eq!(v.leading(), Some(64));
        assert!(v.set(130, true).is_err());
        assert!(BitVec::from_mask(3, 0b1000).is_err());
    }

    #[test]
    fn tracked_express() {
        let mut tb = TrackedBasis::new(3, 3);
        tb.insert(0, &bv("110")).unwrap();
        tb.insert(1, &bv("011")).unwrap();
        assert!(!tb.insert(2, &bv("101")).unwrap());
        assert_eq!(tb.express(&bv("101")).unwrap(), Some(vec![0, 1]));
        assert_eq!(tb.express(&bv("100")).unwrap(), None);
    }
}
