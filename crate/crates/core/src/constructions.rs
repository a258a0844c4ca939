//! Code families with matching-based recovery certificates.
//!
//! Every family here is a stack of server types. Type 1 stores `t`
//! singletons; type `r > 1` stores `t - 1` singletons plus one cell summing a
//! fixed number of other parts. Each combination of parts appears with a
//! per-type multiplicity. For part `x_i`, consecutive types are joined by a
//! bipartite graph whose edges are pairs of servers that jointly recover
//! `x_i`; perfect matchings of these graphs, together with the singleton
//! occurrences of `x_i`, form the recovery certificate.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::code::PirArrayCode;
use crate::designs::SteinerSystem;
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::matching::{is_regular, max_b_matching, max_matching, Bipartite};
use crate::scalar::format_rational;
use crate::verifier::{RecoveryCertificate, RecoverySet};

pub const DEFAULT_MAX_SERVERS: u64 = 1_000_000;

/// Expanded pairing graphs up to this many edges are matched directly;
/// larger ones go through the capacitated matching on combination shapes.
const EXPAND_EDGE_LIMIT: u64 = 2_000_000;

/// Part masks are `u64`.
const MAX_PARTS: usize = 64;

/// One server layout with its replication count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ServerSpec {
    pub singleton_parts: Vec<usize>,
    pub sum_cells: Vec<Vec<usize>>,
    pub multiplicity: usize,
}

/// Family label and parameters, embedded as `"family"` in code files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Family {
    pub name: String,
    pub s: String,
    pub t: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Number of server types.
    pub r: usize,
    pub eta: Vec<u64>,
}

impl Family {
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("family serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Shape {
    singles: u64,
    sum: u64,
}

impl Shape {
    fn parts(&self) -> u64 {
        self.singles | self.sum
    }
}

#[derive(Clone, Debug)]
struct ServerType {
    shapes: Vec<Shape>,
    multiplicity: usize,
    /// First server index of this type.
    offset: usize,
}

impl ServerType {
    fn server(&self, shape: usize, copy: usize) -> usize {
        self.offset + shape * self.multiplicity + copy
    }
}

/// Server types in emission order.
#[derive(Clone, Debug)]
pub struct Layout {
    p: usize,
    t: usize,
    types: Vec<ServerType>,
}

/// A pairing graph for one part and one pair of consecutive types, with
/// vertices labeled by server index.
#[derive(Clone, Debug)]
pub struct PairingGraph {
    pub graph: Bipartite,
    pub left_servers: Vec<usize>,
    pub right_servers: Vec<usize>,
}

fn bit(i: usize) -> u64 {
    1u64 << i
}

fn mask_to_vec(mask: u64) -> Vec<usize> {
    (0..MAX_PARTS).filter(|&i| mask & bit(i) != 0).collect()
}

fn mask_of(parts: &[usize]) -> u64 {
    parts.iter().fold(0, |m, &i| m | bit(i))
}

/// Does the server pair `(v, u)` recover part `i`, given `i` is absent from
/// `v` and lies in the sum cell of `u`? The rest of `u`'s sum must be
/// cancelled by the singletons of both servers, possibly after adding
/// `v`'s own sum cell.
fn pair_recovers(v: Shape, u: Shape, i: usize) -> bool {
    let rest = u.sum & !bit(i);
    let singles = v.singles | u.singles;
    rest & !singles == 0 || (rest ^ v.sum) & !singles == 0
}

impl Layout {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn m(&self) -> usize {
        self.types
            .iter()
            .map(|ty| ty.shapes.len() * ty.multiplicity)
            .sum()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.types.iter().map(|ty| ty.multiplicity).collect()
    }

    pub fn server_specs(&self) -> Vec<ServerSpec> {
        self.types
            .iter()
            .flat_map(|ty| {
                ty.shapes.iter().map(|s| ServerSpec {
                    singleton_parts: mask_to_vec(s.singles),
                    sum_cells: if s.sum == 0 {
                        Vec::new()
                    } else {
                        vec![mask_to_vec(s.sum)]
                    },
                    multiplicity: ty.multiplicity,
                })
            })
            .collect()
    }

    fn build_code(&self) -> Result<PirArrayCode> {
        let mut columns = Vec::with_capacity(self.m());
        for ty in &self.types {
            for shape in &ty.shapes {
                let mut column = Vec::with_capacity(self.t);
                for i in mask_to_vec(shape.singles) {
                    column.push(BitVec::unit(self.p, i)?);
                }
                if shape.sum != 0 {
                    column.push(BitVec::from_mask(self.p, shape.sum)?);
                }
                if column.len() != self.t {
                    return Err(Error::Internal(format!(
                        "server layout has {} cells, expected {}",
                        column.len(),
                        self.t
                    )));
                }
                for _ in 0..ty.multiplicity {
                    columns.push(column.clone());
                }
            }
        }
        PirArrayCode::new(self.p, self.t, columns)
    }

    /// Unit graph on combination shapes for part `i` between types
    /// `layer` and `layer + 1`.
    fn shape_graph(&self, i: usize, layer: usize) -> Result<(Bipartite, Vec<usize>, Vec<usize>)> {
        let left_ty = &self.types[layer];
        let right_ty = &self.types[layer + 1];
        let left: Vec<usize> = (0..left_ty.shapes.len())
            .filter(|&a| left_ty.shapes[a].parts() & bit(i) == 0)
            .collect();
        let right: Vec<usize> = (0..right_ty.shapes.len())
            .filter(|&b| right_ty.shapes[b].sum & bit(i) != 0)
            .collect();
        let adjacency = left
            .iter()
            .map(|&a| {
                let v = left_ty.shapes[a];
                right
                    .iter()
                    .enumerate()
                    .filter(|&(_, &b)| pair_recovers(v, right_ty.shapes[b], i))
                    .map(|(pos, _)| pos)
                    .collect()
            })
            .collect();
        Ok((Bipartite::from_adjacency(right.len(), adjacency)?, left, right))
    }

    /// The pairing graph for part `i` between types `layer` and `layer + 1`
    /// with every server copy as its own vertex.
    pub fn pairing_graph(&self, i: usize, layer: usize) -> Result<PairingGraph> {
        if i >= self.p {
            return Err(Error::IndexOutOfRange {
                what: "part",
                index: i,
                bound: self.p,
            });
        }
        if layer + 1 >= self.types.len() {
            return Err(Error::IndexOutOfRange {
                what: "layer",
                index: layer,
                bound: self.types.len().saturating_sub(1),
            });
        }
        let (unit, left, right) = self.shape_graph(i, layer)?;
        let (ml, mr) = (self.types[layer].multiplicity, self.types[layer + 1].multiplicity);
        let graph = expand(&unit, ml, mr)?;
        let lt = &self.types[layer];
        let rt = &self.types[layer + 1];
        Ok(PairingGraph {
            graph,
            left_servers: left
                .iter()
                .flat_map(|&a| (0..ml).map(move |c| lt.server(a, c)))
                .collect(),
            right_servers: right
                .iter()
                .flat_map(|&b| (0..mr).map(move |c| rt.server(b, c)))
                .collect(),
        })
    }

    fn part_sets(&self, i: usize) -> Result<Vec<RecoverySet>> {
        let mut sets = Vec::new();
        for ty in &self.types {
            for (a, shape) in ty.shapes.iter().enumerate() {
                if shape.singles & bit(i) != 0 {
                    sets.extend((0..ty.multiplicity).map(|c| vec![ty.server(a, c)]));
                }
            }
        }
        for layer in 0..self.types.len() - 1 {
            let (unit, left, right) = self.shape_graph(i, layer)?;
            let lt = &self.types[layer];
            let rt = &self.types[layer + 1];
            let mut pairs: Vec<RecoverySet> =
                match_layer(&unit, lt.multiplicity, rt.multiplicity)?
                    .into_iter()
                    .map(|((a, ca), (b, cb))| {
                        vec![lt.server(left[a], ca), rt.server(right[b], cb)]
                    })
                    .collect();
            pairs.sort_unstable();
            sets.extend(pairs);
        }
        Ok(sets)
    }

    fn certificate(&self, claimed_k: usize) -> Result<RecoveryCertificate> {
        let parts = (0..self.p)
            .into_par_iter()
            .map(|i| self.part_sets(i))
            .collect::<Result<Vec<_>>>()?;
        for (i, sets) in parts.iter().enumerate() {
            if sets.len() != claimed_k {
                return Err(Error::Internal(format!(
                    "part x_{} has {} recovery sets, predicted {claimed_k}",
                    i + 1,
                    sets.len()
                )));
            }
        }
        Ok(RecoveryCertificate { claimed_k, parts })
    }
}

fn expand(unit: &Bipartite, ml: usize, mr: usize) -> Result<Bipartite> {
    let mut adjacency = Vec::with_capacity(unit.left_count() * ml);
    for a in 0..unit.left_count() {
        let row: Vec<usize> = unit
            .neighbors(a)
            .iter()
            .flat_map(|&b| (0..mr).map(move |c| b * mr + c))
            .collect();
        for _ in 0..ml {
            adjacency.push(row.clone());
        }
    }
    Bipartite::from_adjacency(unit.right_count() * mr, adjacency)
}

type Copy2 = ((usize, usize), (usize, usize));

/// Perfect matching of the blown-up graph, as `((shape, copy), (shape, copy))`.
fn match_layer(unit: &Bipartite, ml: usize, mr: usize) -> Result<Vec<Copy2>> {
    let (l, r) = (unit.left_count(), unit.right_count());
    let left_deg: Vec<usize> = (0..l).map(|a| unit.neighbors(a).len()).collect();
    let right_deg = unit.right_degrees();
    let dl = left_deg.first().copied().unwrap_or(0);
    let dr = right_deg.first().copied().unwrap_or(0);
    let biregular = left_deg.iter().all(|&x| x == dl) && right_deg.iter().all(|&x| x == dr);
    if !biregular || l * ml != r * mr || dl * mr != dr * ml || (l > 0 && dl == 0) {
        return Err(Error::Internal(format!(
            "pairing graph is not regular ({l}x{ml} left, {r}x{mr} right)"
        )));
    }
    let edges = (l * ml) as u64 * (dl * mr) as u64;
    if edges <= EXPAND_EDGE_LIMIT {
        let g = expand(unit, ml, mr)?;
        if !is_regular(&g).regular {
            return Err(Error::Internal("expanded pairing graph is not regular".into()));
        }
        let matching = max_matching(&g);
        if !matching.is_perfect_for(&g) {
            return Err(Error::Internal("regular pairing graph without perfect matching".into()));
        }
        return Ok(matching
            .pairs
            .iter()
            .map(|&(x, y)| ((x / ml, x % ml), (y / mr, y % mr)))
            .collect());
    }
    let triples = max_b_matching(unit, &vec![ml; l], &vec![mr; r])?;
    let total: usize = triples.iter().map(|t| t.2).sum();
    if total != l * ml {
        return Err(Error::Internal("regular pairing graph without perfect matching".into()));
    }
    let mut next_left = vec![0usize; l];
    let mut next_right = vec![0usize; r];
    let mut out = Vec::with_capacity(total);
    for (a, b, count) in triples {
        for _ in 0..count {
            out.push(((a, next_left[a]), (b, next_right[b])));
            next_left[a] += 1;
            next_right[b] += 1;
        }
    }
    Ok(out)
}

/// Counting-only description of a layered family: multiplicities, server
/// count and number of recovery sets per part, without building anything.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredPlan {
    pub p: usize,
    pub t: usize,
    /// Sum-cell size per type; 0 for the all-singleton first type.
    pub sum_sizes: Vec<usize>,
    pub eta: Vec<BigInt>,
    pub m: BigInt,
    pub k: BigInt,
}

impl LayeredPlan {
    pub fn rate(&self) -> BigRational {
        BigRational::new(self.k.clone(), self.m.clone())
    }
}

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

struct TypeCounts {
    combos: BigInt,
    singleton: BigInt,
    absent: BigInt,
    in_sum: BigInt,
}

fn type_counts(p: usize, t: usize, sum_size: usize) -> TypeCounts {
    if sum_size == 0 {
        return TypeCounts {
            combos: binom(p, t),
            singleton: binom(p - 1, t - 1),
            absent: binom(p - 1, t),
            in_sum: BigInt::zero(),
        };
    }
    let free = p - (t - 1);
    TypeCounts {
        combos: binom(p, t - 1) * binom(free, sum_size),
        singleton: if t >= 2 {
            binom(p - 1, t - 2) * binom(free, sum_size)
        } else {
            BigInt::zero()
        },
        absent: binom(p - 1, t - 1) * binom(free - 1, sum_size),
        in_sum: binom(p - 1, t - 1) * binom(free - 1, sum_size - 1),
    }
}

/// Balances multiplicities so that every pairing graph has equal sides,
/// scaled to the smallest positive integers.
pub fn layered_plan(p: usize, t: usize, sum_sizes: &[usize]) -> Result<LayeredPlan> {
    if t < 1 || p <= t {
        return Err(Error::Domain(format!("need 1 <= t < p, got p={p}, t={t}")));
    }
    if sum_sizes.first() != Some(&0)
        || sum_sizes.windows(2).any(|w| w[1] <= w[0])
        || *sum_sizes.last().unwrap() > p - t + 1
        || (sum_sizes.len() > 1 && t < 2)
    {
        return Err(Error::Domain(format!("invalid sum sizes {sum_sizes:?} for p={p}, t={t}")));
    }
    let counts: Vec<TypeCounts> = sum_sizes.iter().map(|&z| type_counts(p, t, z)).collect();
    let mut ratios = vec![BigRational::one()];
    for r in 0..counts.len() - 1 {
        if counts[r + 1].in_sum.is_zero() || counts[r].absent.is_zero() {
            return Err(Error::Domain(format!("type {} has nothing to pair with", r + 1)));
        }
        let next = &ratios[r] * BigRational::new(counts[r].absent.clone(), counts[r + 1].in_sum.clone());
        ratios.push(next);
    }
    let den_lcm = ratios.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: Vec<BigInt> = ratios
        .iter()
        .map(|q| q.numer() * (&den_lcm / q.denom()))
        .collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let eta: Vec<BigInt> = scaled.into_iter().map(|x| x / &g).collect();
    let m = eta.iter().zip(&counts).map(|(e, c)| e * &c.combos).sum();
    let last = counts.len() - 1;
    let k = eta
        .iter()
        .zip(&counts)
        .enumerate()
        .map(|(r, (e, c))| {
            let paired = if r < last { c.absent.clone() } else { BigInt::zero() };
            e * (&c.singleton + paired)
        })
        .sum();
    Ok(LayeredPlan {
        p,
        t,
        sum_sizes: sum_sizes.to_vec(),
        eta,
        m,
        k,
    })
}

/// Sum sizes of the layered family for `s = p/t`: `(r-1)t + 1` for the
/// inner types, and all remaining `p - t + 1` parts for the last one.
fn sum_sizes_for(p: usize, t: usize) -> Vec<usize> {
    let types = p.div_ceil(t);
    let mut sizes = vec![0];
    for r in 2..types {
        sizes.push((r - 1) * t + 1);
    }
    sizes.push(p - t + 1);
    sizes
}

/// Counting plan of the general multi-type family at `s`, `t`
/// (`s·t` must be an integer, `s > 1`).
pub fn general_plan(s: &BigRational, t: usize) -> Result<LayeredPlan> {
    let p = s * BigRational::from_integer(BigInt::from(t));
    if !p.is_integer() || s <= &BigRational::one() || t < 2 {
        return Err(Error::Domain(format!(
            "need s > 1, t >= 2 and integral s·t, got s={}, t={t}",
            format_rational(s)
        )));
    }
    let p = to_usize(&p.to_integer(), "p")?;
    layered_plan(p, t, &sum_sizes_for(p, t))
}

/// A built family: the code, its certificate and the predicted counts.
#[derive(Clone, Debug)]
pub struct ConstructionOutput {
    pub code: PirArrayCode,
    pub certificate: RecoveryCertificate,
    pub predicted_k: usize,
    pub predicted_m: usize,
    pub family: Family,
    pub layout: Layout,
}

impl ConstructionOutput {
    pub fn rate(&self) -> BigRational {
        BigRational::new(BigInt::from(self.predicted_k), BigInt::from(self.predicted_m))
    }

    pub fn s(&self) -> BigRational {
        BigRational::new(BigInt::from(self.code.p()), BigInt::from(self.code.t()))
    }
}

/// Construction entry points with a configurable server cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constructor {
    pub max_servers: u64,
}

impl Default for Constructor {
    fn default() -> Self {
        Constructor {
            max_servers: DEFAULT_MAX_SERVERS,
        }
    }
}

fn shapes_all_singletons(p: usize, t: usize) -> Vec<Shape> {
    (0..p)
        .combinations(t)
        .map(|c| Shape {
            singles: mask_of(&c),
            sum: 0,
        })
        .collect()
}

fn shapes_with_sum(p: usize, t: usize, sum_size: usize) -> Vec<Shape> {
    let mut out = Vec::new();
    for singles in (0..p).combinations(t - 1) {
        let singles = mask_of(&singles);
        let rest: Vec<usize> = (0..p).filter(|&i| singles & bit(i) == 0).collect();
        for sum in rest.into_iter().combinations(sum_size) {
            out.push(Shape {
                singles,
                sum: mask_of(&sum),
            });
        }
    }
    out
}

fn to_usize(v: &BigInt, what: &str) -> Result<usize> {
    v.to_usize()
        .ok_or_else(|| Error::TooLarge(format!("{what} = {v} does not fit in memory")))
}

impl Constructor {
    fn check_cap(&self, m: &BigInt) -> Result<()> {
        if *m > BigInt::from(self.max_servers) {
            return Err(Error::TooLarge(format!(
                "the construction needs m = {m} servers, above the cap of {}",
                self.max_servers
            )));
        }
        Ok(())
    }

    fn layout(p: usize, t: usize, groups: Vec<(Vec<Shape>, usize)>) -> Layout {
        let mut offset = 0;
        let types = groups
            .into_iter()
            .map(|(shapes, multiplicity)| {
                let ty = ServerType {
                    offset,
                    multiplicity,
                    shapes,
                };
                offset += ty.shapes.len() * multiplicity;
                ty
            })
            .collect();
        Layout { p, t, types }
    }

    fn finish(
        &self,
        layout: Layout,
        predicted_m: usize,
        predicted_k: usize,
        family: Family,
    ) -> Result<ConstructionOutput> {
        let code = layout.build_code()?;
        if code.m() != predicted_m {
            return Err(Error::Internal(format!(
                "built {} servers, predicted {predicted_m}",
                code.m()
            )));
        }
        let certificate = layout.certificate(predicted_k)?;
        Ok(ConstructionOutput {
            code,
            certificate,
            predicted_k,
            predicted_m,
            family,
            layout,
        })
    }

    fn build_plan(&self, plan: &LayeredPlan, name: &str, d: Option<usize>) -> Result<ConstructionOutput> {
        self.check_cap(&plan.m)?;
        let (p, t) = (plan.p, plan.t);
        if p > MAX_PARTS {
            return Err(Error::TooLarge(format!("p = {p} exceeds {MAX_PARTS} parts")));
        }
        let eta: Vec<usize> = plan
            .eta
            .iter()
            .map(|e| to_usize(e, "multiplicity"))
            .collect::<Result<_>>()?;
        let groups = plan
            .sum_sizes
            .iter()
            .zip(&eta)
            .map(|(&z, &e)| {
                let shapes = if z == 0 {
                    shapes_all_singletons(p, t)
                } else {
                    shapes_with_sum(p, t, z)
                };
                (shapes, e)
            })
            .collect();
        let family = Family {
            name: name.to_string(),
            s: format_rational(&BigRational::new(BigInt::from(p), BigInt::from(t))),
            t,
            d,
            r: eta.len(),
            eta: eta.iter().map(|&e| e as u64).collect(),
        };
        self.finish(
            Self::layout(p, t, groups),
            to_usize(&plan.m, "m")?,
            to_usize(&plan.k, "k")?,
            family,
        )
    }

    /// Two types on `p = t + d` parts: every `t`-subset as singletons
    /// (`lcm(d,t)/d` copies) and every `(t-1)`-subset plus the sum of the
    /// other `d + 1` parts (`lcm(d,t)/t` copies).
    pub fn construction1(&self, t: usize, d: usize) -> Result<ConstructionOutput> {
        if t < 2 || d < 1 || d > t {
            return Err(Error::Domain(format!(
                "two-type family needs t > 1 and 1 <= d <= t, got t={t}, d={d}"
            )));
        }
        let p = t + d;
        if p > MAX_PARTS {
            return Err(Error::TooLarge(format!("p = {p} exceeds {MAX_PARTS} parts")));
        }
        let theta = d.lcm(&t);
        let (eta_a, eta_b) = (theta / d, theta / t);
        let m = binom(p, t) * eta_a + binom(p, t - 1) * eta_b;
        self.check_cap(&m)?;
        let k = &m - binom(p - 1, t) * eta_a;
        let layout = Self::layout(
            p,
            t,
            vec![
                (shapes_all_singletons(p, t), eta_a),
                (shapes_with_sum(p, t, d + 1), eta_b),
            ],
        );
        let family = Family {
            name: "c1".into(),
            s: format_rational(&BigRational::new(BigInt::from(p), BigInt::from(t))),
            t,
            d: Some(d),
            r: 2,
            eta: vec![eta_a as u64, eta_b as u64],
        };
        self.finish(layout, to_usize(&m, "m")?, to_usize(&k, "k")?, family)
    }

    /// Two types on `p = t + d` parts from a Steiner system `S(d, d+1, p)`:
    /// every `t`-subset as singletons once, and for each block, `d` copies of
    /// the block sum next to the `t - 1` parts outside the block.
    pub fn construction2(&self, t: usize, d: usize, sys: &SteinerSystem) -> Result<ConstructionOutput> {
        if t < 2 || d < 1 {
            return Err(Error::Domain(format!(
                "design family needs t > 1 and d >= 1, got t={t}, d={d}"
            )));
        }
        let p = t + d;
        if sys.p() != p || sys.d() != d {
            return Err(Error::InvalidDesign(format!(
                "need S({d},{},{p}), got S({},{},{})",
                d + 1,
                sys.d(),
                sys.d() + 1,
                sys.p()
            )));
        }
        if p > MAX_PARTS {
            return Err(Error::TooLarge(format!("p = {p} exceeds {MAX_PARTS} parts")));
        }
        sys.validate()
            .map_err(|v| Error::InvalidDesign(v.to_string()))?;
        let all = mask_of(&(0..p).collect::<Vec<_>>());
        let block_shapes: Vec<Shape> = sys
            .blocks()
            .iter()
            .map(|b| {
                let sum = mask_of(b);
                Shape {
                    singles: all & !sum,
                    sum,
                }
            })
            .collect();
        let m = binom(p, t) + BigInt::from(d * block_shapes.len());
        self.check_cap(&m)?;
        let k = &m - binom(p - 1, t);
        let layout = Self::layout(
            p,
            t,
            vec![(shapes_all_singletons(p, t), 1), (block_shapes, d)],
        );
        let family = Family {
            name: "c2".into(),
            s: format_rational(&BigRational::new(BigInt::from(p), BigInt::from(t))),
            t,
            d: Some(d),
            r: 2,
            eta: vec![1, d as u64],
        };
        self.finish(layout, to_usize(&m, "m")?, to_usize(&k, "k")?, family)
    }

    /// Types `T_1..T_s` on `p = s·t` parts.
    pub fn general_construction(&self, s: usize, t: usize) -> Result<ConstructionOutput> {
        if s < 2 || t < 2 {
            return Err(Error::Domain(format!(
                "multi-type family needs s >= 2 and t >= 2, got s={s}, t={t}"
            )));
        }
        let plan = general_plan(&BigRational::from_integer(BigInt::from(s)), t)?;
        self.build_plan(&plan, "general", None)
    }

    /// Non-integer `s = num/den`: the integer-family types up to `T_{⌈s⌉-1}`
    /// and a last type whose sum cell takes all remaining parts. For
    /// `1 < s < 2` this is the two-type family.
    pub fn general_construction_rational(&self, num: u64, den: u64, t: usize) -> Result<ConstructionOutput> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        let s = BigRational::new(BigInt::from(num), BigInt::from(den));
        if s.is_integer() {
            return Err(Error::Domain(format!(
                "s = {} is an integer; use the integer multi-type family",
                format_rational(&s)
            )));
        }
        if s <= BigRational::one() {
            return Err(Error::Domain(format!("need s > 1, got {}", format_rational(&s))));
        }
        let p = &s * BigRational::from_integer(BigInt::from(t));
        if !p.is_integer() {
            return Err(Error::Unsupported(format!(
                "s·t = {} is not an integer number of parts",
                format_rational(&p)
            )));
        }
        if s < BigRational::from_integer(BigInt::from(2)) {
            let d = to_usize(&p.to_integer(), "p")? - t;
            return self.construction1(t, d);
        }
        let plan = general_plan(&s, t)?;
        self.build_plan(&plan, "general-rational", None)
    }
}

pub fn construction1(t: usize, d: usize) -> Result<ConstructionOutput> {
    Constructor::default().construction1(t, d)
}

pub fn construction2(t: usize, d: usize, sys: &SteinerSystem) -> Result<ConstructionOutput> {
    Constructor::default().construction2(t, d, sys)
}

pub fn general_construction(s: usize, t: usize) -> Result<ConstructionOutput> {
    Constructor::default().general_construction(s, t)
}

pub fn general_construction_rational(num: u64, den: u64, t: usize) -> Result<ConstructionOutput> {
    Constructor::default().general_construction_rational(num, den, t)
}
