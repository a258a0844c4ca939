//! Steiner systems `S(d, d+1, p)`: generation for `d = 1, 2` and exhaustive
//! validation.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Blocks are 0-based, each sorted, the list sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerSystem {
    p: usize,
    d: usize,
    blocks: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DesignViolation {
    BlockSize { block: Vec<usize> },
    PointOutOfRange { point: usize },
    RepeatedPoint { block: Vec<usize> },
    DuplicateBlock { block: Vec<usize> },
    Overcovered { subset: Vec<usize> },
    Uncovered { subset: Vec<usize> },
}

impl fmt::Display for DesignViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based = |v: &[usize]| v.iter().map(|x| x + 1).collect::<Vec<_>>();
        match self {
            DesignViolation::BlockSize { block } => write!(f, "block {:?} has wrong size", one_based(block)),
            DesignViolation::PointOutOfRange { point } => write!(f, "point {} out of range", point + 1),
            DesignViolation::RepeatedPoint { block } => {
                write!(f, "block {:?} repeats a point", one_based(block))
            }
            DesignViolation::DuplicateBlock { block } => {
                write!(f, "block {:?} listed twice", one_based(block))
            }
            DesignViolation::Overcovered { subset } => {
                write!(f, "subset {:?} lies in more than one block", one_based(subset))
            }
            DesignViolation::Uncovered { subset } => {
                write!(f, "subset {:?} lies in no block", one_based(subset))
            }
        }
    }
}

impl SteinerSystem {
    /// Wraps a block list without validating the design property.
    pub fn from_blocks(p: usize, d: usize, blocks: Vec<Vec<usize>>) -> Self {
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        SteinerSystem { p, d, blocks }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// First violation of "every d-subset lies in exactly one block".
    pub fn validate(&self) -> std::result::Result<(), DesignViolation> {
        let mut seen_blocks = std::collections::HashSet::new();
        for b in &self.blocks {
            if b.len() != self.d + 1 {
                return Err(DesignViolation::BlockSize { block: b.clone() });
            }
            if let Some(&x) = b.iter().find(|&&x| x >= self.p) {
                return Err(DesignViolation::PointOutOfRange { point: x });
            }
            if b.windows(2).any(|w| w[0] == w[1]) {
                return Err(DesignViolation::RepeatedPoint { block: b.clone() });
            }
            if !seen_blocks.insert(b.clone()) {
                return Err(DesignViolation::DuplicateBlock { block: b.clone() });
            }
        }
        let mut cover: HashMap<Vec<usize>, usize> = HashMap::new();
        for b in &self.blocks {
            for sub in b.iter().copied().combinations(self.d) {
                let count = cover.entry(sub.clone()).or_insert(0);
                *count += 1;
                if *count > 1 {
                    return Err(DesignViolation::Overcovered { subset: sub });
                }
            }
        }
        if let Some(sub) = (0..self.p)
            .combinations(self.d)
            .find(|sub| !cover.contains_key(sub))
        {
            return Err(DesignViolation::Uncovered { subset: sub });
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Blocks containing point `x`.
    pub fn blocks_through(&self, x: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.blocks.iter().filter(move |b| b.binary_search(&x).is_ok())
    }
}

/// Generates `S(d, d+1, p)` for the supported families: `d = 1` with even
/// `p` (a perfect matching of the points) and `d = 2` with `p ≡ 1, 3 (mod 6)`
/// (Skolem and Bose triple systems).
pub fn make_steiner(d: usize, p: usize) -> Result<SteinerSystem> {
    let sys = match d {
        1 if p >= 2 && p.is_multiple_of(2) => {
            let blocks = (0..p / 2).map(|i| vec![2 * i, 2 * i + 1]).collect();
            SteinerSystem::from_blocks(p, 1, blocks)
        }
        1 => {
            return Err(Error::Unsupported(format!(
                "S(1,2,{p}) needs an even number of points >= 2"
            )))
        }
        2 if p % 6 == 3 => bose(p),
        2 if p % 6 == 1 => skolem(p),
        2 => {
            return Err(Error::Unsupported(format!(
                "S(2,3,{p}) needs p ≡ 1 or 3 (mod 6)"
            )))
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "only d = 1 and d = 2 are generated; load S({d},{},{p}) from a file",
                d + 1
            )))
        }
    };
    sys.validate()
        .map_err(|v| Error::Internal(format!("generated design invalid: {v}")))?;
    Ok(sys)
}

/// Bose construction, `p = 6n + 3`, points `Z_{2n+1} x Z_3`.
fn bose(p: usize) -> SteinerSystem {
    let v = p / 3;
    let half = v.div_ceil(2); // inverse of 2 modulo odd v
    let op = |x: usize, y: usize| ((x + y) * half) % v;
    let pt = |x: usize, i: usize| x + (i % 3) * v;
    let mut blocks = Vec::new();
    for x in 0..v {
        blocks.push(vec![pt(x, 0), pt(x, 1), pt(x, 2)]);
    }
    for (x, y) in (0..v).tuple_combinations() {
        for i in 0..3 {
            blocks.push(vec![pt(x, i), pt(y, i), pt(op(x, y), i + 1)]);
        }
    }
    SteinerSystem::from_blocks(p, 2, blocks)
}

/// Skolem construction, `p = 6n + 1`, points `Z_{2n} x Z_3` plus one point at
/// infinity (the last index).
fn skolem(p: usize) -> SteinerSystem {
    let n = (p - 1) / 6;
    let v = 2 * n;
    // half-idempotent commutative quasigroup on Z_{2n}
    let op = |x: usize, y: usize| {
        let z = (x + y) % v;
        if z.is_multiple_of(2) {
            z / 2
        } else {
            (z - 1) / 2 + n
        }
    };
    let pt = |x: usize, i: usize| x + (i % 3) * v;
    let inf = p - 1;
    let mut blocks = Vec::new();
    for x in 0..n {
        blocks.push(vec![pt(x, 0), pt(x, 1), pt(x, 2)]);
        for i in 0..3 {
            blocks.push(vec![inf, pt(x + n, i), pt(x, i + 1)]);
        }
    }
    for (x, y) in (0..v).tuple_combinations() {
        for i in 0..3 {
            blocks.push(vec![pt(x, i), pt(y, i), pt(op(x, y), i + 1)]);
        }
    }
    SteinerSystem::from_blocks(p, 2, blocks)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SteinerFile {
    p: usize,
    d: usize,
    blocks: Vec<Vec<usize>>,
}

/// Parses the JSON design format (1-based points) and validates it.
pub fn load_steiner(bytes: &[u8]) -> Result<SteinerSystem> {
    let file: SteinerFile = serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let mut blocks = Vec::with_capacity(file.blocks.len());
    for b in &file.blocks {
        let mut block = Vec::with_capacity(b.len());
        for &x in b {
            if x == 0 || x > file.p {
                return Err(Error::IndexOutOfRange {
                    what: "point",
                    index: x,
                    bound: file.p,
                });
            }
            block.push(x - 1);
        }
        blocks.push(block);
    }
    let sys = SteinerSystem::from_blocks(file.p, file.d, blocks);
    sys.validate()
        .map_err(|v| Error::InvalidDesign(v.to_string()))?;
    Ok(sys)
}

pub fn save_steiner(sys: &SteinerSystem) -> Vec<u8> {
    let file = SteinerFile {
        p: sys.p,
        d: sys.d,
        blocks: sys
            .blocks
            .iter()
            .map(|b| b.iter().map(|x| x + 1).collect())
            .collect(),
    };
    let mut out = serde_json::to_vec(&file).expect("design serializes");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano_by_differences() -> SteinerSystem {
        let blocks = (0..7)
            .map(|s| [1, 2, 4].iter().map(|&x| (x + s) % 7).collect())
            .collect();
        SteinerSystem::from_blocks(7, 2, blocks)
    }

    #[test]
    fn fano_is_valid() {
        let f = fano_by_differences();
        assert_eq!(f.blocks().len(), 7);
        assert!(f.is_valid());
    }

    #[test]
    fn perfect_matching_design() {
        let s = SteinerSystem::from_blocks(6, 1, vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        assert!(s.is_valid());
    }

    #[test]
    fn missing_block_is_reported() {
        let mut blocks = fano_by_differences().blocks().to_vec();
        let removed = blocks.pop().unwrap();
        let s = SteinerSystem::from_blocks(7, 2, blocks);
        match s.validate() {
            Err(DesignViolation::Uncovered { subset }) => {
                assert!(subset.iter().all(|x| removed.contains(x)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generated_block_counts() {
        assert_eq!(make_steiner(2, 7).unwrap().blocks().len(), 7);
        assert_eq!(make_steiner(2, 9).unwrap().blocks().len(), 12);
        assert_eq!(make_steiner(1, 4).unwrap().blocks().len(), 2);
        assert!(matches!(make_steiner(2, 8), Err(Error::Unsupported(_))));
        assert!(matches!(make_steiner(1, 5), Err(Error::Unsupported(_))));
        assert!(matches!(make_steiner(3, 8), Err(Error::Unsupported(_))));
    }

    #[test]
    fn load_checks() {
        let fano = br#"{"p": 7, "d": 2, "blocks": [[1,2,4],[2,3,5],[3,4,6],[4,5,7],[1,5,6],[2,6,7],[1,3,7]]}"#;
        let sys = load_steiner(fano).unwrap();
        assert_eq!(sys.blocks().len(), 7);
        assert_eq!(load_steiner(&save_steiner(&sys)).unwrap(), sys);

        let dup = br#"{"p": 4, "d": 1, "blocks": [[1,2],[1,2],[3,4]]}"#;
        assert!(matches!(load_steiner(dup), Err(Error::InvalidDesign(_))));
        let zero = br#"{"p": 4, "d": 1, "blocks": [[0,1],[2,3]]}"#;
        assert!(load_steiner(zero).is_err());
        let big = br#"{"p": 4, "d": 1, "blocks": [[1,2],[3,5]]}"#;
        assert!(load_steiner(big).is_err());
    }
}
