//! Rate bounds for PIR array codes.
//!
//! The closed forms are generic over [`Scalar`]; reports and tables are
//! always computed with exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::constructions::general_plan;
use crate::error::{Error, Result};
use crate::scalar::{format_rational, Scalar};

/// `(s+1)/(2s)`: no code with finite `t` reaches it.
pub fn upper_g_s<T: Scalar>(s: &T) -> T {
    (s.clone() + T::one()) / (T::of(2) * s.clone())
}

/// Upper bound at `s = 1 + d/t`: `((2d+1)t + d²)/((t+d)(2d+1))`.
pub fn upper_g_st<T: Scalar>(t: u64, d: u64) -> T {
    T::ratio((2 * d + 1) * t + d * d, (t + d) * (2 * d + 1))
}

/// Exact value at `t = 1`: `2^(s-1)/(2^s - 1)`.
pub fn single_cell<T: Scalar>(s: u32) -> T {
    let num = BigInt::from(2u32).pow(s - 1);
    let den = BigInt::from(2u32).pow(s) - 1u32;
    T::from_bigint(&num) / T::from_bigint(&den)
}

/// `s/(2s-1)` at `t = s - 1`.
pub fn s_minus_one_cells<T: Scalar>(s: u64) -> T {
    T::ratio(s, 2 * s - 1)
}

/// Two-type family at `s = 1 + d/t`; equals [`upper_g_st`].
pub fn two_type<T: Scalar>(t: u64, d: u64) -> T {
    upper_g_st(t, d)
}

/// `((rt+d)² - t(t-r)) / ((rt+d)(2rt+2d-2t+r))` at `s = r + d/t`.
pub fn mixed_sum<T: Scalar>(r: u64, d: u64, t: u64) -> T {
    let p = T::of(r * t + d);
    let num = p.clone() * p.clone() - T::of(t) * (T::of(t) - T::of(r));
    let den = p * (T::of(2 * r * t + 2 * d + r) - T::of(2 * t));
    num / den
}

/// `(st+t+1)/(s(2t+1))` for integer `s`.
pub fn integer_s<T: Scalar>(s: u64, t: u64) -> T {
    T::ratio(s * t + t + 1, s * (2 * t + 1))
}

/// `(t-c+(t-1)s+1)/(t-c+2(t-1)s+2)`, for `t < s - 1`.
pub fn few_cells<T: Scalar>(c: u64, s: u64, t: u64) -> T {
    T::ratio(t - c + (t - 1) * s + 1, t - c + 2 * (t - 1) * s + 2)
}

/// `(16t²+7t+1)/(24t²+15t+3)` at `s = 3`.
pub fn three_type<T: Scalar>(t: u64) -> T {
    T::ratio(16 * t * t + 7 * t + 1, 24 * t * t + 15 * t + 3)
}

/// `(160t²+45t+3)/(224t²+81t+7)` at `s = 7/3` with `3t` cells.
pub fn seven_thirds_printed<T: Scalar>(t: u64) -> T {
    T::ratio(160 * t * t + 45 * t + 3, 224 * t * t + 81 * t + 7)
}

/// `(160t²+45t+3)/(224t²+77t+7)`: the multi-type rate at `s = 7/3` with `3t` cells.
pub fn seven_thirds<T: Scalar>(t: u64) -> T {
    T::ratio(160 * t * t + 45 * t + 3, 224 * t * t + 77 * t + 7)
}

fn falling(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, j| acc * (n - j))
}

fn layer_product(t: u64, from: u64, to: u64) -> BigInt {
    (from..=to).fold(BigInt::one(), |acc, l| acc * (l * t + 1))
}

/// `β`, `γ` and the multi-type rate `(β+γ)/(β+2γ)` for integer `s, t ≥ 2`.
pub fn beta_gamma(s: u64, t: u64) -> Result<(BigInt, BigInt, BigRational)> {
    if s < 2 || t < 2 {
        return Err(Error::Domain(format!("need s >= 2 and t >= 2, got s={s}, t={t}")));
    }
    let tb = BigInt::from(t);
    let mut beta_sum = BigInt::zero();
    for r in 2..=s {
        beta_sum += falling(s - 1, r - 1) * Pow::pow(&tb, (r - 2) as u32) * layer_product(t, r, s - 1);
    }
    let beta = layer_product(t, 1, s - 1) + BigInt::from(t - 1) * beta_sum;
    let mut gamma = BigInt::zero();
    for r in 1..s {
        gamma += falling(s - 1, r) * Pow::pow(&tb, (r - 1) as u32) * layer_product(t, r, s - 1);
    }
    let rate = BigRational::new(&beta + &gamma, &beta + BigInt::from(2) * &gamma);
    Ok((beta, gamma, rate))
}

pub type Labeled = (String, BigRational);

fn small_int(v: &BigRational) -> Option<u64> {
    if v.is_integer() {
        v.to_integer().to_u64()
    } else {
        None
    }
}

fn parts_of(s: &BigRational, t: u64) -> Option<u64> {
    small_int(&(s * BigRational::from_integer(BigInt::from(t))))
}

/// All lower bounds applicable at `(s, t)`, labeled with their family and
/// parameter instantiation.
pub fn lower_formulas(s: &BigRational, t: u64) -> Vec<Labeled> {
    let mut out: Vec<Labeled> = Vec::new();
    if *s <= BigRational::one() || t == 0 {
        return out;
    }
    let int_s = small_int(s);
    let p = parts_of(s, t);
    if let (Some(si), 1) = (int_s, t) {
        if si <= 1024 {
            out.push((format!("single-cell[s={si}]"), single_cell(si as u32)));
        }
    }
    if let Some(si) = int_s {
        if si >= 3 && t == si - 1 {
            out.push(("s-minus-one-cells".into(), s_minus_one_cells(si)));
        }
    }
    if let Some(p) = p {
        let d = p - t;
        if d >= 1 && d <= t {
            out.push((format!("two-type[d={d}]"), two_type(t, d)));
        }
        let r = p / t;
        let d = p % t;
        if r > 1 && r <= t && d >= 1 && d < t {
            out.push((format!("mixed-sum[r={r} d={d}]"), mixed_sum(r, d, t)));
        }
    }
    if let Some(si) = int_s {
        if si >= 2 && t >= si {
            out.push(("integer-s".into(), integer_s(si, t)));
        }
        if si >= 2 && t >= 2 {
            for c in 1..t.min(64) {
                let (half, full) = (1i128 << (c - 1), 1i128 << c);
                let (c, ti, sv) = (c as i128, t as i128, si as i128);
                let lo = half * ti - half * (c - 2) + 1;
                let hi = full * ti - full * (c - 1);
                if lo <= sv && sv <= hi {
                    out.push((format!("few-cells[c={c}]"), few_cells(c as u64, si, t)));
                }
            }
            if let Ok((_, _, rate)) = beta_gamma(si, t) {
                out.push(("multi-type".into(), rate));
            }
        }
        if si == 3 {
            out.push(("three-type".into(), three_type(t)));
        }
    }
    if *s == BigRational::new(BigInt::from(7), BigInt::from(3)) && t.is_multiple_of(3) {
        out.push((format!("seven-thirds-printed[t={}]", t / 3), seven_thirds_printed(t / 3)));
    }
    if int_s.is_none() && *s > BigRational::from_integer(BigInt::from(2)) && t >= 2 {
        if let Ok(plan) = general_plan(s, t as usize) {
            out.push(("multi-type".into(), plan.rate()));
        }
    }
    out
}

/// All upper bounds at `(s, t)`.
pub fn upper_formulas(s: &BigRational, t: u64) -> Vec<Labeled> {
    let mut out = Vec::new();
    if *s <= BigRational::one() || t == 0 {
        return out;
    }
    out.push(("asymptotic-cap".into(), upper_g_s(s)));
    if let Some(p) = parts_of(s, t) {
        if t >= 2 {
            out.push((format!("fixed-t-cap[d={}]", p - t), upper_g_st(t, p - t)));
        }
        if t == 1 && p <= 1024 {
            out.push((format!("single-cell[s={p}]"), single_cell(p as u32)));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub s: BigRational,
    pub t: u64,
    pub lower: Vec<Labeled>,
    pub upper: Vec<Labeled>,
    pub best_lower: Option<BigRational>,
    pub best_upper: BigRational,
    pub tight: bool,
}

impl BoundReport {
    /// Labels attaining the best lower bound.
    pub fn lower_sources(&self) -> Vec<&str> {
        sources(&self.lower, self.best_lower.as_ref())
    }

    pub fn upper_sources(&self) -> Vec<&str> {
        sources(&self.upper, Some(&self.best_upper))
    }
}

fn sources<'a>(list: &'a [Labeled], best: Option<&BigRational>) -> Vec<&'a str> {
    list.iter()
        .filter(|(_, v)| Some(v) == best)
        .map(|(l, _)| l.as_str())
        .collect()
}

/// Every applicable bound at `(s, t)`. A lower bound above an upper bound is
/// reported as an internal error.
pub fn bound_report(s: &BigRational, t: u64) -> Result<BoundReport> {
    if *s <= BigRational::one() {
        return Err(Error::Domain(format!("need s > 1, got {}", format_rational(s))));
    }
    if t == 0 {
        return Err(Error::Domain("need t >= 1".into()));
    }
    let lower = lower_formulas(s, t);
    let upper = upper_formulas(s, t);
    let best_upper = upper
        .iter()
        .map(|(_, v)| v)
        .min()
        .cloned()
        .expect("the asymptotic cap always applies");
    let best_lower = lower.iter().map(|(_, v)| v).max().cloned();
    if let Some(lo) = &best_lower {
        if *lo > best_upper {
            return Err(Error::Internal(format!(
                "lower bound {} exceeds upper bound {} at s={}, t={t}",
                format_rational(lo),
                format_rational(&best_upper),
                format_rational(s)
            )));
        }
    }
    let tight = best_lower.as_ref() == Some(&best_upper);
    Ok(BoundReport {
        s: s.clone(),
        t,
        lower,
        upper,
        best_lower,
        best_upper,
        tight,
    })
}

/// One report per `(s, t)`, rows ordered by `s_list` then `t`.
pub fn bound_table(s_list: &[BigRational], t_range: std::ops::RangeInclusive<u64>) -> Result<Vec<BoundReport>> {
    let cells: Vec<(BigRational, u64)> = s_list
        .iter()
        .flat_map(|s| t_range.clone().map(move |t| (s.clone(), t)))
        .collect();
    cells
        .par_iter()
        .map(|(s, t)| bound_report(s, *t))
        .collect()
}

pub const CSV_HEADER: &str = "s,t,best_lower,best_upper,tight,lower_sources,upper_sources";

pub fn table_csv(rows: &[BoundReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_rational(&row.s),
            row.t,
            row.best_lower.as_ref().map_or("-".to_string(), format_rational),
            format_rational(&row.best_upper),
            row.tight,
            row.lower_sources().join(";"),
            row.upper_sources().join(";"),
        ));
    }
    out
}
