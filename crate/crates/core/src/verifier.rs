//! k-PIR verification: exact search on small codes and certificate checks at
//! any size.
//!
//! For a part `x_i` the exact value is the largest number of pairwise
//! disjoint column sets whose spans contain `e_i`. Any such family can be
//! shrunk to inclusion-minimal sets, so the search packs minimal recovery sets.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::PirArrayCode;
use crate::error::{Error, Result};
use crate::gf2::Gf2Basis;

/// Largest `m` for which the enumeration uses column bitmasks.
pub const MASK_LIMIT: usize = 64;
/// Largest `m` for which packing subproblems are memoized.
const MEMO_LIMIT: usize = 24;
/// Largest `m` for which lower-bound mode looks at column pairs.
const PAIR_SCAN_LIMIT: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifierConfig {
    /// Codes with more columns than this get a lower bound only.
    pub exact_limit: usize,
    /// Branch nodes allowed per packing search before giving up exactness.
    pub node_budget: u64,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig {
            exact_limit: 20,
            node_budget: 10_000_000,
        }
    }
}

/// Sorted 0-based column indices.
pub type RecoverySet = Vec<usize>;

fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0, |acc, &c| acc | (1u64 << c))
}

/// Spans of unions of columns, built from per-column bases.
struct SpanOracle<'a> {
    code: &'a PirArrayCode,
    bases: Vec<Gf2Basis>,
}

impl<'a> SpanOracle<'a> {
    fn new(code: &'a PirArrayCode) -> Self {
        SpanOracle {
            code,
            bases: code.column_bases(),
        }
    }

    fn spans(&self, cols: &[usize], part: usize) -> bool {
        if let [c] = cols {
            return self.bases[*c].spans_unit(part).unwrap_or(false);
        }
        let mut basis = Gf2Basis::new(self.code.p());
        for &c in cols {
            basis
                .extend(&self.bases[c])
                .expect("column bases share the code width");
        }
        basis.spans_unit(part).unwrap_or(false)
    }
}

fn check_part(code: &PirArrayCode, part: usize) -> Result<()> {
    if part >= code.p() {
        Err(Error::IndexOutOfRange {
            what: "part",
            index: part,
            bound: code.p(),
        })
    } else {
        Ok(())
    }
}

/// All inclusion-minimal column sets of size `<= max_size` whose span
/// contains part `part`, by increasing size then lexicographically.
pub fn minimal_recovery_sets(
    code: &PirArrayCode,
    part: usize,
    max_size: usize,
) -> Result<Vec<RecoverySet>> {
    check_part(code, part)?;
    if code.m() > MASK_LIMIT {
        return Err(Error::TooLarge(format!(
            "minimal set enumeration supports m <= {MASK_LIMIT}, got {}",
            code.m()
        )));
    }
    minimal_sets_with(&SpanOracle::new(code), part, max_size)
}

fn minimal_sets_with(oracle: &SpanOracle<'_>, part: usize, max_size: usize) -> Result<Vec<RecoverySet>> {
    let m = oracle.code.m();
    // A minimal set contributes linearly independent vectors, so its size is
    // bounded by the dimension.
    let limit = max_size.min(m).min(oracle.code.p());
    let mut found: Vec<RecoverySet> = Vec::new();
    let mut found_masks: Vec<u64> = Vec::new();
    for size in 1..=limit {
        let before = found_masks.len();
        for cols in (0..m).combinations(size) {
            let mask = mask_of(&cols);
            if found_masks[..before].iter().any(|&f| f & !mask == 0) {
                continue;
            }
            if oracle.spans(&cols, part) {
                found_masks.push(mask);
                found.push(cols);
            }
        }
    }
    Ok(found)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Packing {
    pub count: usize,
    pub witness: Vec<RecoverySet>,
    /// False when the node budget ran out before optimality was proven.
    pub exact: bool,
}

struct Packer<'a> {
    masks: Vec<u64>,
    sets: &'a [RecoverySet],
    /// set indices containing each column, in preference order
    by_column: Vec<Vec<usize>>,
    memo: Option<HashMap<u64, usize>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    best: usize,
    best_witness: Vec<usize>,
}

impl<'a> Packer<'a> {
    fn usable_union(&self, avail: u64) -> (u64, usize) {
        let mut union = 0;
        let mut min_size = usize::MAX;
        for (mask, set) in self.masks.iter().zip(self.sets) {
            if mask & !avail == 0 {
                union |= mask;
                min_size = min_size.min(set.len());
            }
        }
        (union, min_size)
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
        }
        !self.exhausted
    }

    /// Memoized exact optimum over the columns in `avail`.
    fn solve_memo(&mut self, avail: u64) -> usize {
        if let Some(&v) = self.memo.as_ref().and_then(|m| m.get(&avail)) {
            return v;
        }
        if !self.tick() {
            return 0;
        }
        let (union, _) = self.usable_union(avail);
        let value = if union == 0 {
            0
        } else {
            let c = union.trailing_zeros() as usize;
            let mut best = self.solve_memo(avail & !(1u64 << c));
            for k in 0..self.by_column[c].len() {
                let s = self.by_column[c][k];
                let mask = self.masks[s];
                if mask & !avail == 0 {
                    best = best.max(1 + self.solve_memo(avail & !mask));
                }
            }
            best
        };
        if !self.exhausted {
            self.memo.as_mut().expect("memo mode").insert(avail, value);
        }
        value
    }

    fn witness_memo(&mut self, mut avail: u64) -> Vec<usize> {
        let mut chosen = Vec::new();
        loop {
            let target = self.solve_memo(avail);
            if target == 0 {
                return chosen;
            }
            let (union, _) = self.usable_union(avail);
            let c = union.trailing_zeros() as usize;
            let pick = self.by_column[c].clone().into_iter().find(|&s| {
                let mask = self.masks[s];
                mask & !avail == 0 && 1 + self.solve_memo(avail & !mask) == target
            });
            match pick {
                Some(s) => {
                    chosen.push(s);
                    avail &= !self.masks[s];
                }
                None => avail &= !(1u64 << c),
            }
        }
    }

    /// Plain branch and bound, used above the memo size limit.
    fn branch(&mut self, avail: u64, chosen: &mut Vec<usize>) {
        if !self.tick() {
            return;
        }
        if chosen.len() > self.best {
            self.best = chosen.len();
            self.best_witness = chosen.clone();
        }
        let (union, min_size) = self.usable_union(avail);
        if union == 0 {
            return;
        }
        let optimistic = chosen.len() + union.count_ones() as usize / min_size;
        if optimistic <= self.best {
            return;
        }
        let c = union.trailing_zeros() as usize;
        for k in 0..self.by_column[c].len() {
            let s = self.by_column[c][k];
            let mask = self.masks[s];
            if mask & !avail == 0 {
                chosen.push(s);
                self.branch(avail & !mask, chosen);
                chosen.pop();
            }
        }
        self.branch(avail & !(1u64 << c), chosen);
    }
}

/// Maximum number of pairwise disjoint sets from `sets` over columns
/// `0..m`, with a witness. Exact unless the node budget is exhausted.
pub fn max_disjoint_packing(sets: &[RecoverySet], m: usize, node_budget: u64) -> Result<Packing> {
    if m > MASK_LIMIT {
        return Err(Error::TooLarge(format!(
            "packing supports m <= {MASK_LIMIT}, got {m}"
        )));
    }
    if let Some(&c) = sets.iter().flatten().find(|&&c| c >= m) {
        return Err(Error::IndexOutOfRange {
            what: "column",
            index: c,
            bound: m,
        });
    }
    // smaller sets first, then lexicographic
    let mut order: Vec<usize> = (0..sets.len()).filter(|&s| !sets[s].is_empty()).collect();
    order.sort_by(|&a, &b| sets[a].len().cmp(&sets[b].len()).then_with(|| sets[a].cmp(&sets[b])));
    let mut by_column = vec![Vec::new(); m];
    for &s in &order {
        for &c in &sets[s] {
            by_column[c].push(s);
        }
    }
    let mut packer = Packer {
        masks: sets.iter().map(|s| mask_of(s)).collect(),
        sets,
        by_column,
        memo: (m <= MEMO_LIMIT).then(HashMap::new),
        nodes: 0,
        budget: node_budget,
        exhausted: false,
        best: 0,
        best_witness: Vec::new(),
    };
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let chosen = if packer.memo.is_some() {
        packer.solve_memo(full);
        if packer.exhausted {
            // fall back to whatever branch and bound finds within a fresh budget
            packer.memo = None;
            packer.exhausted = false;
            packer.nodes = 0;
            packer.branch(full, &mut Vec::new());
            packer.best_witness.clone()
        } else {
            packer.witness_memo(full)
        }
    } else {
        packer.branch(full, &mut Vec::new());
        packer.best_witness.clone()
    };
    let mut witness: Vec<RecoverySet> = chosen.iter().map(|&s| sets[s].clone()).collect();
    witness.sort();
    Ok(Packing {
        count: witness.len(),
        witness,
        exact: !packer.exhausted,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartResult {
    pub part: usize,
    pub max_disjoint: usize,
    pub exact: bool,
    pub witness: Vec<RecoverySet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierReport {
    pub m: usize,
    pub parts: Vec<PartResult>,
}

impl VerifierReport {
    /// `min_i max_disjoint_i`.
    pub fn k(&self) -> usize {
        self.parts.iter().map(|p| p.max_disjoint).min().unwrap_or(0)
    }

    pub fn exact(&self) -> bool {
        self.parts.iter().all(|p| p.exact)
    }

    pub fn rate(&self) -> BigRational {
        crate::scalar::rational(self.k() as i64, self.m as i64)
    }

    /// Certificate claiming `k`, built from the per-part witnesses.
    pub fn certificate(&self) -> RecoveryCertificate {
        RecoveryCertificate {
            claimed_k: self.k(),
            parts: self.parts.iter().map(|p| p.witness.clone()).collect(),
        }
    }
}

/// Largest `k` with the k-PIR property. Exact when `m <= exact_limit` and
/// every packing search finished within budget; otherwise a lower bound from
/// single columns and greedy column pairs.
pub fn exact_k(code: &PirArrayCode, config: &VerifierConfig) -> VerifierReport {
    let oracle = SpanOracle::new(code);
    let exact_mode = code.m() <= config.exact_limit && code.m() <= MASK_LIMIT;
    let parts = (0..code.p())
        .into_par_iter()
        .map(|part| {
            if exact_mode {
                let sets = minimal_sets_with(&oracle, part, code.m()).expect("part in range");
                let packing =
                    max_disjoint_packing(&sets, code.m(), config.node_budget).expect("sets in range");
                PartResult {
                    part,
                    max_disjoint: packing.count,
                    exact: packing.exact,
                    witness: packing.witness,
                }
            } else {
                let witness = greedy_lower_bound(&oracle, part);
                PartResult {
                    part,
                    max_disjoint: witness.len(),
                    exact: false,
                    witness,
                }
            }
        })
        .collect();
    VerifierReport { m: code.m(), parts }
}

fn greedy_lower_bound(oracle: &SpanOracle<'_>, part: usize) -> Vec<RecoverySet> {
    let m = oracle.code.m();
    let mut used = vec![false; m];
    let mut out = Vec::new();
    for (c, slot) in used.iter_mut().enumerate() {
        if oracle.spans(&[c], part) {
            *slot = true;
            out.push(vec![c]);
        }
    }
    if m <= PAIR_SCAN_LIMIT {
        for a in 0..m {
            if used[a] {
                continue;
            }
            for b in a + 1..m {
                if !used[b] && oracle.spans(&[a, b], part) {
                    used[a] = true;
                    used[b] = true;
                    out.push(vec![a, b]);
                    break;
                }
            }
        }
    }
    out.sort();
    out
}

/// Per part, disjoint recovery sets witnessing `claimed_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryCertificate {
    pub claimed_k: usize,
    pub parts: Vec<Vec<RecoverySet>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    PartCount,
    EmptySet,
    ColumnOutOfRange,
    NonDisjoint,
    NonSpanning,
    TooFewSets,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateViolation {
    pub part: Option<usize>,
    pub set_index: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for CertificateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ViolationKind::PartCount => "wrong number of part lists",
            ViolationKind::EmptySet => "empty set",
            ViolationKind::ColumnOutOfRange => "column out of range",
            ViolationKind::NonDisjoint => "non-disjoint",
            ViolationKind::NonSpanning => "non-spanning",
            ViolationKind::TooFewSets => "too few sets",
        };
        write!(f, "{kind}")?;
        if let Some(p) = self.part {
            write!(f, " (part x_{}", p + 1)?;
            if let Some(s) = self.set_index {
                write!(f, ", set {}", s + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Checks every certificate invariant against the code. The first violation
/// in part order is returned.
pub fn check_certificate(
    code: &PirArrayCode,
    cert: &RecoveryCertificate,
) -> std::result::Result<(), CertificateViolation> {
    if cert.parts.len() != code.p() {
        return Err(CertificateViolation {
            part: None,
            set_index: None,
            kind: ViolationKind::PartCount,
        });
    }
    let oracle = SpanOracle::new(code);
    let results: Vec<_> = cert
        .parts
        .par_iter()
        .enumerate()
        .map(|(part, sets)| check_part_sets(&oracle, part, sets, cert.claimed_k))
        .collect();
    results.into_iter().collect()
}

fn check_part_sets(
    oracle: &SpanOracle<'_>,
    part: usize,
    sets: &[RecoverySet],
    claimed_k: usize,
) -> std::result::Result<(), CertificateViolation> {
    let m = oracle.code.m();
    let violation = |set_index, kind| CertificateViolation {
        part: Some(part),
        set_index,
        kind,
    };
    let mut used = vec![false; m];
    for (si, set) in sets.iter().enumerate() {
        if set.is_empty() {
            return Err(violation(Some(si), ViolationKind::EmptySet));
        }
        if set.iter().any(|&c| c >= m) {
            return Err(violation(Some(si), ViolationKind::ColumnOutOfRange));
        }
        for &c in set {
            if std::mem::replace(&mut used[c], true) {
                return Err(violation(Some(si), ViolationKind::NonDisjoint));
            }
        }
        if !oracle.spans(set, part) {
            return Err(violation(Some(si), ViolationKind::NonSpanning));
        }
    }
    if sets.len() < claimed_k {
        return Err(violation(None, ViolationKind::TooFewSets));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    claimed_k: usize,
    parts: Vec<Vec<Vec<usize>>>,
}

/// Parses the certificate format (1-based columns).
pub fn load_certificate(bytes: &[u8]) -> Result<RecoveryCertificate> {
    let file: CertificateFile =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let parts = file
        .parts
        .into_iter()
        .map(|sets| {
            sets.into_iter()
                .map(|set| {
                    set.into_iter()
                        .map(|c| {
                            c.checked_sub(1).ok_or_else(|| {
                                Error::Parse("column indices are 1-based".to_string())
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RecoveryCertificate {
        claimed_k: file.claimed_k,
        parts,
    })
}

/// One part per line.
pub fn save_certificate(cert: &RecoveryCertificate) -> Vec<u8> {
    let mut out = format!("{{\n  \"claimed_k\": {},\n  \"parts\": [\n", cert.claimed_k);
    for (i, sets) in cert.parts.iter().enumerate() {
        let one_based: Vec<Vec<usize>> = sets
            .iter()
            .map(|s| s.iter().map(|c| c + 1).collect())
            .collect();
        out.push_str("    ");
        out.push_str(&serde_json::to_string(&one_based).expect("plain integers serialize"));
        out.push_str(if i + 1 < cert.parts.len() { ",\n" } else { "\n" });
    }
    out.push_str("  ]\n}\n");
    out.into_bytes()
}
