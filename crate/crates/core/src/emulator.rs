//! In-process retrieval emulation.
//!
//! Each simulated server stores its column evaluated on a concrete database:
//! cell `j` holds the XOR of the parts it sums. A part is reconstructed from
//! any recovery set by finding cells whose GF(2) sum is that part and XORing
//! the words fetched from the servers.

use std::fmt::{Debug, LowerHex};
use std::ops::BitXorAssign;

use num_traits::PrimInt;
use rand::distr::{Distribution, StandardUniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::PirArrayCode;
use crate::error::{Error, Result};
use crate::gf2::{BitVec, TrackedBasis};
use crate::verifier::{check_certificate, RecoveryCertificate};

/// A part value: an element of GF(2^w) stored as a w-bit word, added by XOR.
pub trait Word: PrimInt + BitXorAssign + LowerHex + Debug + Send + Sync + 'static {
    const BITS: u32;
}

macro_rules! word {
    ($($t:ty),*) => {$(
        impl Word for $t {
            const BITS: u32 = <$t>::BITS;
        }
    )*};
}
word!(u8, u16, u32, u64, u128);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Database<W> {
    parts: Vec<W>,
}

impl<W: Word> Database<W> {
    pub fn new(parts: Vec<W>) -> Self {
        Database { parts }
    }

    pub fn zeros(p: usize) -> Self {
        Database {
            parts: vec![W::zero(); p],
        }
    }

    /// Reproducible random database (ChaCha8 seeded by `seed`).
    pub fn random(p: usize, seed: u64) -> Self
    where
        StandardUniform: Distribution<W>,
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Database {
            parts: (0..p).map(|_| StandardUniform.sample(&mut rng)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, i: usize) -> W {
        self.parts[i]
    }

    pub fn parts(&self) -> &[W] {
        &self.parts
    }

    fn combine(&self, cell: &BitVec) -> W {
        cell.ones().fold(W::zero(), |mut acc, i| {
            acc ^= self.parts[i];
            acc
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServerState<W> {
    pub id: usize,
    pub words: Vec<W>,
}

/// Request/response access to stored words.
pub trait WordSource<W> {
    fn get_word(&self, server: usize, cell: usize) -> Result<W>;
}

#[derive(Clone, Debug)]
pub struct Cluster<W> {
    servers: Vec<ServerState<W>>,
}

impl<W: Word> Cluster<W> {
    pub fn servers(&self) -> &[ServerState<W>] {
        &self.servers
    }

    pub fn total_words(&self) -> usize {
        self.servers.iter().map(|s| s.words.len()).sum()
    }
}

impl<W: Word> WordSource<W> for Cluster<W> {
    fn get_word(&self, server: usize, cell: usize) -> Result<W> {
        let state = self.servers.get(server).ok_or(Error::IndexOutOfRange {
            what: "server",
            index: server,
            bound: self.servers.len(),
        })?;
        state.words.get(cell).copied().ok_or(Error::IndexOutOfRange {
            what: "cell",
            index: cell,
            bound: state.words.len(),
        })
    }
}

/// Evaluates every column of `code` on `db`.
pub fn deploy<W: Word>(code: &PirArrayCode, db: &Database<W>) -> Result<Cluster<W>> {
    if db.len() != code.p() {
        return Err(Error::Dimension {
            expected: code.p(),
            found: db.len(),
        });
    }
    let servers = code
        .columns()
        .iter()
        .enumerate()
        .map(|(id, col)| ServerState {
            id,
            words: col.iter().map(|cell| db.combine(cell)).collect(),
        })
        .collect();
    Ok(Cluster { servers })
}

/// The `(server, cell)` words whose XOR is a given part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryRecipe {
    pub part: usize,
    pub cells: Vec<(usize, usize)>,
}

impl RecoveryRecipe {
    pub fn apply<W: Word>(&self, source: &impl WordSource<W>) -> Result<W> {
        let mut acc = W::zero();
        for &(server, cell) in &self.cells {
            acc ^= source.get_word(server, cell)?;
        }
        Ok(acc)
    }
}

/// Solves for `e_part` inside the span of the cells of `set`.
pub fn recovery_recipe(code: &PirArrayCode, part: usize, set: &[usize]) -> Result<RecoveryRecipe> {
    if part >= code.p() {
        return Err(Error::IndexOutOfRange {
            what: "part",
            index: part,
            bound: code.p(),
        });
    }
    let sources: Vec<(usize, usize)> = set
        .iter()
        .flat_map(|&server| (0..code.t()).map(move |cell| (server, cell)))
        .collect();
    if let Some(&(server, _)) = sources.iter().find(|(s, _)| *s >= code.m()) {
        return Err(Error::IndexOutOfRange {
            what: "column",
            index: server,
            bound: code.m(),
        });
    }
    let mut basis = TrackedBasis::new(code.p(), sources.len());
    for (idx, &(server, cell)) in sources.iter().enumerate() {
        basis.insert(idx, code.cell(cell, server))?;
    }
    let target = BitVec::unit(code.p(), part)?;
    let combo = basis.express(&target)?.ok_or_else(|| {
        Error::InvalidCode(format!(
            "columns {:?} do not span x_{}",
            set.iter().map(|c| c + 1).collect::<Vec<_>>(),
            part + 1
        ))
    })?;
    Ok(RecoveryRecipe {
        part,
        cells: combo.into_iter().map(|i| sources[i]).collect(),
    })
}

/// Reconstructs part `part` from set number `set_index` of its certificate list.
pub fn recover_part<W: Word>(
    source: &impl WordSource<W>,
    code: &PirArrayCode,
    cert: &RecoveryCertificate,
    part: usize,
    set_index: usize,
) -> Result<W> {
    let sets = cert.parts.get(part).ok_or(Error::IndexOutOfRange {
        what: "part",
        index: part,
        bound: cert.parts.len(),
    })?;
    let set = sets.get(set_index).ok_or(Error::IndexOutOfRange {
        what: "set",
        index: set_index,
        bound: sets.len(),
    })?;
    recovery_recipe(code, part, set)?.apply(source)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoveryFailure {
    pub part: usize,
    pub set_index: usize,
    pub expected: String,
    pub recovered: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EmulationReport {
    pub recoveries: usize,
    pub failures: Vec<RecoveryFailure>,
}

impl EmulationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: EmulationReport) {
        self.recoveries += other.recoveries;
        self.failures.extend(other.failures);
    }
}

/// Recipes for every certificate set, computed once and reused across
/// databases.
#[derive(Clone, Debug)]
pub struct Emulation<'a> {
    code: &'a PirArrayCode,
    recipes: Vec<Vec<RecoveryRecipe>>,
}

impl<'a> Emulation<'a> {
    /// Fails when the certificate does not hold for the code.
    pub fn prepare(code: &'a PirArrayCode, cert: &RecoveryCertificate) -> Result<Self> {
        check_certificate(code, cert)
            .map_err(|v| Error::InvalidCode(format!("certificate rejected: {v}")))?;
        let recipes = cert
            .parts
            .par_iter()
            .enumerate()
            .map(|(part, sets)| {
                sets.iter()
                    .map(|set| recovery_recipe(code, part, set))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Emulation { code, recipes })
    }

    pub fn recipes(&self) -> &[Vec<RecoveryRecipe>] {
        &self.recipes
    }

    /// Deploys `db` and recovers every part from every certificate set.
    pub fn run<W: Word>(&self, db: &Database<W>) -> Result<EmulationReport> {
        let cluster = deploy(self.code, db)?;
        let mut report = EmulationReport::default();
        for (part, recipes) in self.recipes.iter().enumerate() {
            for (set_index, recipe) in recipes.iter().enumerate() {
                let got = recipe.apply(&cluster)?;
                report.recoveries += 1;
                if got != db.part(part) {
                    report.failures.push(RecoveryFailure {
                        part,
                        set_index,
                        expected: format!("{:#x}", db.part(part)),
                        recovered: format!("{got:#x}"),
                    });
                }
            }
        }
        Ok(report)
    }
}

pub fn emulate_all<W: Word>(
    code: &PirArrayCode,
    cert: &RecoveryCertificate,
    db: &Database<W>,
) -> Result<EmulationReport> {
    Emulation::prepare(code, cert)?.run(db)
}

/// Runs `trials` random databases with seeds `seed, seed + 1, ...`.
pub fn emulate_trials<W: Word>(
    code: &PirArrayCode,
    cert: &RecoveryCertificate,
    seed: u64,
    trials: u64,
) -> Result<EmulationReport>
where
    StandardUniform: Distribution<W>,
{
    let emulation = Emulation::prepare(code, cert)?;
    let reports = (0..trials)
        .into_par_iter()
        .map(|i| emulation.run(&Database::<W>::random(code.p(), seed.wrapping_add(i))))
        .collect::<Result<Vec<_>>>()?;
    let mut total = EmulationReport::default();
    for r in reports {
        total.merge(r);
    }
    Ok(total)
}
