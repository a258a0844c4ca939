//! The `[t x m, p]` array code: column `j` is the storage of server `j`,
//! each of its `t` cells a GF(2) sum of parts.
//!
//! Parts are 0-based in memory. The JSON file format and all display use
//! 1-based parts `x_1 .. x_p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf2::{BitVec, Gf2Basis};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PirArrayCode {
    p: usize,
    t: usize,
    columns: Vec<Vec<BitVec>>,
}

impl PirArrayCode {
    /// Validates shape: `p, t, m >= 1`, every column has `t` cells of width `p`.
    pub fn new(p: usize, t: usize, columns: Vec<Vec<BitVec>>) -> Result<Self> {
        if p == 0 || t == 0 || columns.is_empty() {
            return Err(Error::InvalidCode(format!(
                "p, t and m must be positive (p={p}, t={t}, m={})",
                columns.len()
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != t {
                return Err(Error::InvalidCode(format!(
                    "column {} has {} cells, expected {t}",
                    j + 1,
                    col.len()
                )));
            }
            if let Some(cell) = col.iter().find(|c| c.width() != p) {
                return Err(Error::Dimension {
                    expected: p,
                    found: cell.width(),
                });
            }
        }
        Ok(PirArrayCode { p, t, columns })
    }

    /// Builds a code from 0-based part lists, one list per cell.
    pub fn from_part_lists(p: usize, t: usize, columns: &[Vec<Vec<usize>>]) -> Result<Self> {
        let cols = columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|cell| {
                        BitVec::from_indices(p, cell.iter().copied()).map_err(|_| {
                            Error::InvalidCode(format!("cell {cell:?} references a part >= p={p}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, t, cols)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[BitVec] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<BitVec>] {
        &self.columns
    }

    /// Cell at 0-based `(row, column)`.
    pub fn cell(&self, row: usize, col: usize) -> &BitVec {
        &self.columns[col][row]
    }

    fn check_column(&self, j: usize) -> Result<()> {
        if j >= self.m() {
            Err(Error::IndexOutOfRange {
                what: "column",
                index: j,
                bound: self.m(),
            })
        } else {
            Ok(())
        }
    }

    /// Basis of the span of every cell in the listed columns.
    pub fn column_span(&self, cols: &[usize]) -> Result<Gf2Basis> {
        let mut basis = Gf2Basis::new(self.p);
        for &j in cols {
            self.check_column(j)?;
            for cell in &self.columns[j] {
                basis.insert(cell)?;
            }
        }
        Ok(basis)
    }

    /// Per-column span bases, in column order.
    pub fn column_bases(&self) -> Vec<Gf2Basis> {
        self.columns
            .iter()
            .map(|col| {
                Gf2Basis::from_vectors(self.p, col).expect("cell widths checked at construction")
            })
            .collect()
    }

    /// Rewrites every column into a spanning set of the same span: each unit
    /// vector of the span as an explicit cell (increasing part order), then
    /// the remaining reduced basis rows, then zero cells up to `t`.
    pub fn normalize_singletons(&self) -> PirArrayCode {
        let columns = self
            .column_bases()
            .into_iter()
            .map(|basis| {
                let mut cells: Vec<BitVec> = basis
                    .units()
                    .into_iter()
                    .map(|i| BitVec::unit(self.p, i).expect("unit index < p"))
                    .collect();
                cells.extend(basis.rows().iter().filter(|r| r.count_ones() > 1).cloned());
                // rank <= t since the span came from t cells
                cells.resize(self.t, BitVec::zeros(self.p));
                cells
            })
            .collect();
        PirArrayCode {
            p: self.p,
            t: self.t,
            columns,
        }
    }

    /// `alpha_i`: number of columns whose span contains `x_i`.
    pub fn singleton_census(&self) -> Vec<usize> {
        let mut alpha = vec![0; self.p];
        for basis in self.column_bases() {
            for i in basis.units() {
                alpha[i] += 1;
            }
        }
        alpha
    }

    /// Parts stored verbatim as a singleton cell, per column.
    pub fn stored_singletons(&self, j: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.columns[j]
            .iter()
            .filter(|c| c.count_ones() == 1)
            .filter_map(BitVec::leading)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Code made of the listed columns only, in the given order.
    pub fn restrict_columns(&self, cols: &[usize]) -> Result<PirArrayCode> {
        for &j in cols {
            self.check_column(j)?;
        }
        let columns: Vec<_> = cols.iter().map(|&j| self.columns[j].clone()).collect();
        PirArrayCode::new(self.p, self.t, columns)
    }

    pub fn stats(&self) -> CodeStats {
        CodeStats {
            p: self.p,
            t: self.t,
            m: self.m(),
            singleton_counts: self.singleton_census(),
        }
    }
}

/// Derived quantities of a code. All ratios are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeStats {
    pub p: usize,
    pub t: usize,
    pub m: usize,
    pub singleton_counts: Vec<usize>,
}

impl CodeStats {
    /// `s = p / t`, the reciprocal of the fraction stored per server.
    pub fn s(&self) -> BigRational {
        ratio(self.p, self.t)
    }

    /// Total stored cells over database size, `t·m/p`.
    pub fn storage_overhead(&self) -> BigRational {
        ratio(self.t * self.m, self.p)
    }

    /// PIR rate `k/m`.
    pub fn rate(&self, k: usize) -> BigRational {
        ratio(k, self.m)
    }

    /// `k / (t·m/p) = s·k/m`.
    pub fn overhead_ratio(&self, k: usize) -> BigRational {
        ratio(k, 1) / self.storage_overhead()
    }
}

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The binary `[7 x 4, 12]` 3-PIR array code used as the reference fixture.
pub fn example_7x4() -> PirArrayCode {
    // rows of the printed array, 1-based parts, columns left to right
    let rows: [[&[usize]; 4]; 7] = [
        [&[1], &[2], &[3], &[1, 2, 3]],
        [&[2], &[3], &[1], &[6]],
        [&[4], &[5], &[4, 5, 6], &[4]],
        [&[5], &[6], &[8], &[9]],
        [&[7], &[7, 8, 9], &[9], &[7]],
        [&[8], &[10], &[11], &[12]],
        [&[10, 11, 12], &[11], &[12], &[10]],
    ];
    let columns: Vec<Vec<Vec<usize>>> = (0..4)
        .map(|j| {
            rows.iter()
                .map(|row| row[j].iter().map(|&x| x - 1).collect())
                .collect()
        })
        .collect();
    PirArrayCode::from_part_lists(12, 7, &columns).expect("fixture is well formed")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCode {
    p: usize,
    t: usize,
    m: usize,
    columns: Vec<Vec<Vec<usize>>>,
    #[serde(default)]
    family: Option<Value>,
}

/// A code file: the code plus optional construction metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeDocument {
    pub code: PirArrayCode,
    pub family: Option<Value>,
}

pub fn load_code(bytes: &[u8]) -> Result<PirArrayCode> {
    load_code_document(bytes).map(|d| d.code)
}

pub fn load_code_document(bytes: &[u8]) -> Result<CodeDocument> {
    let raw: RawCode = serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.columns.len() != raw.m {
        return Err(Error::InvalidCode(format!(
            "declared m={} but {} columns present",
            raw.m,
            raw.columns.len()
        )));
    }
    let mut columns = Vec::with_capacity(raw.m);
    for (j, col) in raw.columns.iter().enumerate() {
        if col.len() != raw.t {
            return Err(Error::InvalidCode(format!(
                "column {} has {} cells, expected t={}",
                j + 1,
                col.len(),
                raw.t
            )));
        }
        let mut cells = Vec::with_capacity(raw.t);
        for cell in col {
            let mut v = BitVec::zeros(raw.p);
            for &part in cell {
                if part == 0 || part > raw.p {
                    return Err(Error::IndexOutOfRange {
                        what: "part",
                        index: part,
                        bound: raw.p,
                    });
                }
                if v.get(part - 1) {
                    return Err(Error::InvalidCode(format!(
                        "column {}: part {part} repeated in a cell",
                        j + 1
                    )));
                }
                v.set(part - 1, true)?;
            }
            cells.push(v);
        }
        columns.push(cells);
    }
    Ok(CodeDocument {
        code: PirArrayCode::new(raw.p, raw.t, columns)?,
        family: raw.family,
    })
}

pub fn save_code(code: &PirArrayCode) -> Vec<u8> {
    save_code_document(code, None)
}

/// Writes one column per line so files stay diffable.
pub fn save_code_document(code: &PirArrayCode, family: Option<&Value>) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"p\": {},\n", code.p));
    out.push_str(&format!("  \"t\": {},\n", code.t));
    out.push_str(&format!("  \"m\": {},\n", code.m()));
    out.push_str("  \"columns\": [\n");
    for (j, col) in code.columns.iter().enumerate() {
        let cells: Vec<String> = col
            .iter()
            .map(|cell| {
                let parts: Vec<String> = cell.ones().map(|i| (i + 1).to_string()).collect();
                format!("[{}]", parts.join(", "))
            })
            .collect();
        out.push_str(&format!("    [{}]", cells.join(", ")));
        out.push_str(if j + 1 < code.m() { ",\n" } else { "\n" });
    }
    out.push_str("  ]");
    if let Some(f) = family {
        out.push_str(",\n  \"family\": ");
        out.push_str(&serde_json::to_string(f).expect("json values serialize"));
    }
    out.push_str("\n}\n");
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::rank;
    use crate::scalar::rational;

    fn parts(v: &BitVec) -> Vec<usize> {
        v.ones().map(|i| i + 1).collect()
    }

    #[test]
    fn fixture_shape() {
        let c = example_7x4();
        assert_eq!((c.p(), c.t(), c.m()), (12, 7, 4));
        assert_eq!(parts(c.cell(0, 3)), vec![1, 2, 3]);
        assert_eq!(parts(c.cell(6, 0)), vec![10, 11, 12]);
        assert_eq!(c.stats().s(), rational(12, 7));
    }

    #[test]
    fn every_fixture_column_has_full_rank() {
        let c = example_7x4();
        for j in 0..4 {
            assert_eq!(rank(c.column(j)).unwrap(), 7, "column {}", j + 1);
        }
    }

    #[test]
    fn column_spans() {
        let c = example_7x4();
        let b = c.column_span(&[1]).unwrap();
        assert_eq!(b.rank(), 7);
        for part in [2, 3, 5, 6, 10, 11] {
            assert!(b.spans_unit(part - 1).unwrap());
        }
        assert!(!b.spans_unit(0).unwrap());
        assert_eq!(c.column_span(&[]).unwrap().rank(), 0);
        assert!(c.column_span(&[2, 3]).unwrap().spans_unit(4).unwrap());
        assert!(c.column_span(&[4]).is_err());
    }

    #[test]
    fn normalize_small_column() {
        let c = PirArrayCode::from_part_lists(2, 2, &[vec![vec![0, 1], vec![1]]]).unwrap();
        let n = c.normalize_singletons();
        assert_eq!(parts(n.cell(0, 0)), vec![1]);
        assert_eq!(parts(n.cell(1, 0)), vec![2]);
    }

    #[test]
    fn normalize_zero_column() {
        let c = PirArrayCode::from_part_lists(3, 2, &[vec![vec![], vec![]]]).unwrap();
        assert_eq!(c.normalize_singletons(), c);
    }

    #[test]
    fn normalize_keeps_fixture_cells() {
        let c = example_7x4();
        let n = c.normalize_singletons();
        for j in 0..4 {
            let mut a = c.column(j).to_vec();
            let mut b = n.column(j).to_vec();
            a.sort();
            b.sort();
            assert_eq!(a, b, "column {}", j + 1);
        }
    }

    #[test]
    fn census() {
        let c = example_7x4();
        let alpha = c.singleton_census();
        assert_eq!(alpha[4], 2);
        assert!(alpha.iter().sum::<usize>() <= c.t() * c.m());

        let ident: Vec<Vec<usize>> = (0..5).map(|i| vec![i]).collect();
        let id = PirArrayCode::from_part_lists(5, 5, &[ident]).unwrap();
        assert_eq!(id.singleton_census(), vec![1; 5]);
    }

    #[test]
    fn overhead_identity() {
        let st = example_7x4().stats();
        assert_eq!(st.storage_overhead(), rational(7, 3));
        assert_eq!(st.rate(3), rational(3, 4));
        assert_eq!(st.overhead_ratio(3), st.s() * st.rate(3));
    }

    #[test]
    fn fixture_round_trip() {
        let c = example_7x4();
        let bytes = save_code(&c);
        let back = load_code(&bytes).unwrap();
        assert_eq!(back, c);
        assert_eq!(save_code(&back), bytes);
    }

    #[test]
    fn load_rejects_bad_documents() {
        let out_of_range = br#"{"p": 2, "t": 1, "m": 1, "columns": [[[3]]]}"#;
        assert!(matches!(
            load_code(out_of_range),
            Err(Error::IndexOutOfRange { .. })
        ));
        let zero = br#"{"p": 2, "t": 1, "m": 1, "columns": [[[0]]]}"#;
        assert!(load_code(zero).is_err());
        let short = br#"{"p": 2, "t": 2, "m": 1, "columns": [[[1]]]}"#;
        assert!(matches!(load_code(short), Err(Error::InvalidCode(_))));
        let wrong_m = br#"{"p": 2, "t": 1, "m": 2, "columns": [[[1]]]}"#;
        assert!(load_code(wrong_m).is_err());
        assert!(matches!(load_code(b"{"), Err(Error::Parse(_))));
    }
}
