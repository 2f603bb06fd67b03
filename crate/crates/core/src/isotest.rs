//! Graded isomorphism testing.
//!
//! Invariants are compared first. Then generator images are enumerated in a
//! fixed order; each full tuple must kill the relations of `A` and generate
//! `B`. In commutative mode, tuples on small generator subsets are filtered
//! beforehand by the tests listed in [`Stage`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::groebner::{self, GroebnerBasis, IdealHandle, Limits};
use crate::hilbert::{self, HilbertSeries, RationalSeries};
use crate::present::{Mode, PolyDegree, Polynomial, Presentation};
use crate::truncated::{Element, TruncatedAlgebra, DEFAULT_MONOMIAL_CEILING};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsoError {
    #[error("characteristic mismatch: {0} vs {1}")]
    CharacteristicMismatch(u32, u32),
    #[error("mode mismatch: {0} vs {1}")]
    ModeMismatch(Mode, Mode),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
}

/// `w = max(1, max generator degree, max relation degree)`.
pub fn truncation_bound(p: &Presentation) -> u32 {
    1.max(p.generators().max_degree())
        .max(p.max_relation_degree())
}

/// Default engine bound `max(2w, 10)`.
pub fn default_bound(p: &Presentation) -> u32 {
    (2 * truncation_bound(p)).max(10)
}

/// `prod (p^{d_i} - 1)`.
pub fn candidate_space_size(dims: &[usize], p: u32) -> BigUint {
    dims.iter().fold(BigUint::one(), |acc, &d| {
        acc * hilbert::count_nonzero_vectors(d, p)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    QuotientSeries,
    Elimination,
    Annihilator,
    Relations,
    Generation,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::QuotientSeries,
        Stage::Elimination,
        Stage::Annihilator,
        Stage::Relations,
        Stage::Generation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::QuotientSeries => "quotient_series",
            Stage::Elimination => "elimination",
            Stage::Annihilator => "annihilator",
            Stage::Relations => "relations",
            Stage::Generation => "generation",
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsoOptions {
    /// Engine bound; raised to `w` of both presentations if smaller.
    pub max_degree: Option<u32>,
    pub prune: bool,
    pub use_quotient_series: bool,
    pub use_elimination: bool,
    pub use_annihilator: bool,
    pub subset_cap: usize,
    /// Brute force: no invariant or subset pruning beyond the series test,
    /// zero images allowed.
    pub oracle: bool,
    pub monomial_ceiling: u64,
    pub limits: Limits,
    pub max_candidates_per_generator: usize,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions {
            max_degree: None,
            prune: true,
            use_quotient_series: true,
            use_elimination: true,
            use_annihilator: true,
            subset_cap: 3,
            oracle: false,
            monomial_ceiling: DEFAULT_MONOMIAL_CEILING,
            limits: Limits::default(),
            max_candidates_per_generator: 1 << 20,
        }
    }
}

impl IsoOptions {
    pub fn oracle() -> Self {
        IsoOptions {
            prune: false,
            oracle: true,
            ..IsoOptions::default()
        }
    }

    pub fn unpruned() -> Self {
        IsoOptions {
            prune: false,
            ..IsoOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Isomorphic,
    NotIsomorphic,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Isomorphic => "isomorphic",
            Outcome::NotIsomorphic => "not-isomorphic",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reason {
    DimensionMismatch {
        degree: usize,
        a: usize,
        b: usize,
    },
    FiltrationMismatch {
        power: usize,
        a: usize,
        b: usize,
    },
    SeriesMismatch {
        a: String,
        b: String,
    },
    NilradicalSeriesMismatch {
        a: String,
        b: String,
    },
    /// No tuple passed; `emptied_at` names a generator subset whose admissible
    /// image list became empty, with the stage that removed the last candidate.
    SearchExhausted {
        emptied_at: Option<(Vec<String>, Stage)>,
    },
    /// A surjective homomorphism exists but the series are only known to the bound.
    SeriesUnknown {
        bound: u32,
    },
    Resource {
        detail: String,
    },
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::DimensionMismatch { degree, a, b } => {
                write!(f, "dimension mismatch in degree {degree}: {a} vs {b}")
            }
            Reason::FiltrationMismatch { power, a, b } => {
                write!(f, "dim of I^{power} differs: {a} vs {b}")
            }
            Reason::SeriesMismatch { a, b } => write!(f, "series mismatch: {a} vs {b}"),
            Reason::NilradicalSeriesMismatch { a, b } => {
                write!(f, "nilradical quotient series mismatch: {a} vs {b}")
            }
            Reason::SearchExhausted { emptied_at: None } => f.write_str("search exhausted"),
            Reason::SearchExhausted {
                emptied_at: Some((gens, stage)),
            } => write!(
                f,
                "search exhausted (no admissible images for {{{}}} after {})",
                gens.join(", "),
                stage.name()
            ),
            Reason::SeriesUnknown { bound } => write!(
                f,
                "surjective homomorphism found, but the series agree only through degree {bound}"
            ),
            Reason::Resource { detail } => write!(f, "resource limit: {detail}"),
        }
    }
}

fn biguint_as_string<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn biguint_from_string<'de, D: serde::Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statistics {
    #[serde(
        serialize_with = "biguint_as_string",
        deserialize_with = "biguint_from_string"
    )]
    pub candidate_space: BigUint,
    pub enumerated: u64,
    pub pruned_by_stage: BTreeMap<Stage, u64>,
    pub wall_time_ms: u64,
}

impl Default for Statistics {
    fn default() -> Self {
        Statistics {
            candidate_space: BigUint::default(),
            enumerated: 0,
            pruned_by_stage: Stage::ALL.iter().map(|&s| (s, 0)).collect(),
            wall_time_ms: 0,
        }
    }
}

impl Statistics {
    fn bump(&mut self, s: Stage) {
        *self.pruned_by_stage.entry(s).or_insert(0) += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoVerdict {
    pub outcome: Outcome,
    pub reason: Option<Reason>,
    /// Source generator name to image polynomial in the target's generators.
    pub certificate: Option<BTreeMap<String, String>>,
    pub degree_bound: u32,
    pub statistics: Statistics,
    /// Images in source generator order.
    #[serde(skip)]
    pub images: Option<Vec<Polynomial>>,
}

impl IsoVerdict {
    fn new(
        outcome: Outcome,
        reason: Option<Reason>,
        degree_bound: u32,
        statistics: Statistics,
    ) -> Self {
        IsoVerdict {
            outcome,
            reason,
            certificate: None,
            degree_bound,
            statistics,
            images: None,
        }
    }
}

/// Graded-isomorphism invariants computed to a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub generator_degrees: Vec<u32>,
    pub bound: u32,
    pub dims: Vec<usize>,
    pub filtration: Vec<usize>,
    pub series: Option<RationalSeries>,
    pub nilradical_series: Option<HilbertSeries>,
}

impl Fingerprint {
    /// Digest of dims and filtration only.
    pub fn truncated_digest(&self) -> String {
        let v = serde_json::json!({ "bound": self.bound, "dims": self.dims, "filtration": self.filtration });
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }

    /// Digest of every invariant field except the generator degrees.
    pub fn digest(&self) -> String {
        let v = serde_json::json!({
            "bound": self.bound,
            "dims": self.dims,
            "filtration": self.filtration,
            "series": self.series.as_ref().map(|s| s.to_string()),
            "nilradical_series": self.nilradical_series.as_ref().map(|s| s.to_string()),
        });
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }

    /// First invariant that separates the two, if any.
    pub fn difference(&self, other: &Fingerprint) -> Option<Reason> {
        if let Some(r) = self.dims_difference(other) {
            return Some(r);
        }
        for (c, (a, b)) in self.filtration.iter().zip(&other.filtration).enumerate() {
            if a != b {
                return Some(Reason::FiltrationMismatch {
                    power: c + 1,
                    a: *a,
                    b: *b,
                });
            }
        }
        self.series_difference(other)
    }

    fn dims_difference(&self, other: &Fingerprint) -> Option<Reason> {
        let (a, b, n) = self
            .dims
            .iter()
            .zip(&other.dims)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(n, (a, b))| (*a, *b, n))?;
        Some(Reason::DimensionMismatch { degree: n, a, b })
    }

    /// Dims, exact series and nilradical-quotient series; the pair test's
    /// first step. Filtration dims are left to the search.
    pub fn series_difference(&self, other: &Fingerprint) -> Option<Reason> {
        if let Some(r) = self.dims_difference(other) {
            return Some(r);
        }
        if let (Some(a), Some(b)) = (&self.series, &other.series) {
            if a != b {
                return Some(Reason::SeriesMismatch {
                    a: a.to_string(),
                    b: b.to_string(),
                });
            }
        }
        if let (Some(a), Some(b)) = (&self.nilradical_series, &other.nilradical_series) {
            if !hilbert::series_agree(a, b, self.bound.min(other.bound) as usize) {
                return Some(Reason::NilradicalSeriesMismatch {
                    a: a.to_string(),
                    b: b.to_string(),
                });
            }
        }
        None
    }
}

/// Engines for one presentation at a common bound.
#[derive(Debug)]
pub struct Side {
    pub presentation: Presentation,
    pub trunc: TruncatedAlgebra,
    pub relations: Option<IdealHandle>,
    /// Exact series: computed in commutative mode, declared otherwise.
    pub exact: Option<RationalSeries>,
    pub w: u32,
}

impl Side {
    pub fn build(
        p: &Presentation,
        bound: u32,
        opts: &IsoOptions,
    ) -> Result<Result<Side, Reason>, IsoError> {
        let trunc = match TruncatedAlgebra::build_with_ceiling(p, bound, opts.monomial_ceiling) {
            Ok(t) => t,
            Err(e) => {
                return Ok(Err(Reason::Resource {
                    detail: format!("{}: {e}", p.name),
                }))
            }
        };
        let mut relations = None;
        let mut exact = None;
        if p.mode() == Mode::Commutative {
            let h = IdealHandle::new(p.algebra.clone(), p.relations.clone(), None, opts.limits)
                .map_err(|e| IsoError::Inconsistent(e.to_string()))?;
            if let Ok(gb) = h.groebner() {
                if let HilbertSeries::Exact(s) = gb.series() {
                    exact = Some(s);
                }
            }
            relations = Some(h);
        }
        let dims: Vec<num_bigint::BigInt> = trunc.dims().iter().map(|&d| d.into()).collect();
        if let Some(declared) = &p.series {
            let expanded = declared
                .dims(bound as usize)
                .map_err(|e| IsoError::Inconsistent(format!("{}: declared series: {e}", p.name)))?;
            if expanded != dims {
                return Err(IsoError::Inconsistent(format!(
                    "{}: declared series {declared} does not match the computed dimensions",
                    p.name
                )));
            }
            if let Some(s) = &exact {
                if s != declared {
                    return Err(IsoError::Inconsistent(format!(
                        "{}: declared series {declared} differs from computed {s}",
                        p.name
                    )));
                }
            } else {
                exact = Some(declared.clone());
            }
        }
        Ok(Ok(Side {
            presentation: p.clone(),
            trunc,
            relations,
            exact,
            w: truncation_bound(p),
        }))
    }

    fn base_gb(&self) -> Option<&GroebnerBasis> {
        self.relations.as_ref()?.groebner().ok()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let p = &self.presentation;
        let mut degs = p.generators().degrees();
        degs.sort_unstable();
        let nilradical_series = if p.nilradical.is_empty() {
            None
        } else {
            self.nilradical_series()
        };
        Fingerprint {
            generator_degrees: degs,
            bound: self.trunc.bound(),
            dims: self.trunc.dims(),
            filtration: self.trunc.filtration_dims().to_vec(),
            series: self.exact.clone(),
            nilradical_series,
        }
    }

    fn nilradical_series(&self) -> Option<HilbertSeries> {
        let p = &self.presentation;
        match p.mode() {
            Mode::Commutative => {
                let gb = self.base_gb()?;
                let lifted: Vec<_> = p.nilradical.iter().map(|f| gb.ring().lift(f)).collect();
                Some(gb.extend(&lifted, None).ok()?.series())
            }
            Mode::Associative => {
                let mut q = p.clone();
                q.relations.append(&mut q.nilradical);
                let t = TruncatedAlgebra::build(&q, self.trunc.bound()).ok()?;
                Some(HilbertSeries::Truncated(t.series()))
            }
        }
    }
}

/// Invariants of one presentation at bound `bound`.
pub fn fingerprint(p: &Presentation, bound: u32) -> Result<Fingerprint, IsoError> {
    match Side::build(p, bound.max(truncation_bound(p)), &IsoOptions::default())? {
        Ok(s) => Ok(s.fingerprint()),
        Err(r) => Err(IsoError::Inconsistent(r.to_string())),
    }
}

fn check_compatible(a: &Presentation, b: &Presentation) -> Result<(), IsoError> {
    if a.characteristic() != b.characteristic() {
        return Err(IsoError::CharacteristicMismatch(
            a.characteristic(),
            b.characteristic(),
        ));
    }
    if a.mode() != b.mode() {
        return Err(IsoError::ModeMismatch(a.mode(), b.mode()));
    }
    Ok(())
}

/// The common engine bound for a pair.
pub fn pair_bound(a: &Presentation, b: &Presentation, requested: Option<u32>) -> u32 {
    let w = truncation_bound(a).max(truncation_bound(b));
    requested
        .unwrap_or_else(|| default_bound(a).max(default_bound(b)))
        .max(w)
}

/// All vectors of `GF(p)^dim` in lexicographic order, first coordinate most
/// significant.
fn all_vectors(dim: usize, p: u32, nonzero: bool, limit: usize) -> Option<Vec<Vec<u32>>> {
    let total = (p as u128).checked_pow(dim as u32)?;
    if total > limit as u128 {
        return None;
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut v = vec![0u32; dim];
    loop {
        if !nonzero || v.iter().any(|&x| x != 0) {
            out.push(v.clone());
        }
        // increment with the last coordinate fastest
        let mut i = dim;
        loop {
            if i == 0 {
                return Some(out);
            }
            i -= 1;
            v[i] += 1;
            if v[i] < p {
                break;
            }
            v[i] = 0;
        }
    }
}

struct SubsetData {
    quotient: Option<HilbertSeries>,
    eliminated: Option<Vec<Polynomial>>,
    annihilator: Option<HilbertSeries>,
}

struct Search<'a> {
    a: &'a Side,
    b: &'a Side,
    opts: &'a IsoOptions,
    bound: u32,
    cap: u32,
    candidates: Vec<Vec<Element>>,
    image_polys: Vec<Vec<Polynomial>>,
    subset_data: HashMap<Vec<usize>, SubsetData>,
    memo: HashMap<(Vec<usize>, Vec<usize>), bool>,
    stats: Statistics,
    emptied: Option<(Vec<usize>, Stage)>,
}

impl<'a> Search<'a> {
    fn subset_data(&mut self, subset: &[usize]) -> &SubsetData {
        if !self.subset_data.contains_key(subset) {
            let a = self.a;
            let alg = &a.presentation.algebra;
            let gens: Vec<Polynomial> = subset.iter().map(|&i| alg.gen_poly(i)).collect();
            let quotient = if self.opts.use_quotient_series {
                a.base_gb().and_then(|gb| {
                    let lifted: Vec<_> = gens.iter().map(|g| gb.ring().lift(g)).collect();
                    gb.extend(&lifted, None).ok().map(|g| g.series())
                })
            } else {
                None
            };
            let eliminated = match (&a.relations, self.opts.use_elimination) {
                (Some(h), true) => groebner::eliminate(h, subset, Some(self.cap))
                    .ok()
                    .map(|e| e.relations),
                _ => None,
            };
            let annihilator = match (&a.relations, self.opts.use_annihilator) {
                (Some(h), true) => {
                    let f: Vec<(Polynomial, u32)> = subset
                        .iter()
                        .zip(gens)
                        .map(|(&i, g)| (g, alg.generators().degree(i)))
                        .collect();
                    groebner::annihilator(h, &f, self.cap)
                        .ok()
                        .and_then(|ann| ann.quotient_series().ok())
                }
                _ => None,
            };
            self.subset_data.insert(
                subset.to_vec(),
                SubsetData {
                    quotient,
                    eliminated,
                    annihilator,
                },
            );
        }
        &self.subset_data[subset]
    }

    /// Runs the subset tests on one image tuple; the first failing stage.
    fn failing_stage(&mut self, subset: &[usize], choice: &[usize]) -> Option<Stage> {
        let (bound, cap) = (self.bound, self.cap);
        let b = self.b;
        let degrees: Vec<u32> = subset
            .iter()
            .map(|&i| self.a.presentation.generators().degree(i))
            .collect();
        let imgs: Vec<Element> = subset
            .iter()
            .zip(choice)
            .map(|(&i, &c)| self.candidates[i][c].clone())
            .collect();
        let polys: Vec<Polynomial> = subset
            .iter()
            .zip(choice)
            .map(|(&i, &c)| self.image_polys[i][c].clone())
            .collect();
        let m = self.a.presentation.generators().len();
        let data = self.subset_data(subset);

        if let Some(rels) = &data.eliminated {
            let mut full: Vec<Element> = (0..m).map(|_| Element::zero(0, 1)).collect();
            for (&i, e) in subset.iter().zip(&imgs) {
                full[i] = e.clone();
            }
            for r in rels {
                match b.trunc.evaluate(r, &full) {
                    Ok(v) if v.iter().any(|e| !e.is_zero()) => return Some(Stage::Elimination),
                    _ => {}
                }
            }
        }
        if let (Some(qa), Some(gb)) = (&data.quotient, b.base_gb()) {
            let lifted: Vec<_> = polys.iter().map(|g| gb.ring().lift(g)).collect();
            if let Ok(ext) = gb.extend(&lifted, None) {
                if !hilbert::series_agree(qa, &ext.series(), bound as usize) {
                    return Some(Stage::QuotientSeries);
                }
            }
        }
        if let (Some(aa), Some(h)) = (&data.annihilator, &b.relations) {
            let f: Vec<(Polynomial, u32)> = polys.into_iter().zip(degrees).collect();
            if let Ok(ab) = groebner::annihilator(h, &f, cap).and_then(|ann| ann.quotient_series())
            {
                if !hilbert::equal_truncated(aa, &ab, cap as usize) {
                    return Some(Stage::Annihilator);
                }
            }
        }
        None
    }

    fn admissible(&mut self, subset: &[usize], choice: &[usize]) -> bool {
        let key = (subset.to_vec(), choice.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let stage = self.failing_stage(subset, choice);
        if let Some(s) = stage {
            self.stats.bump(s);
        }
        self.memo.insert(key, stage.is_none());
        stage.is_none()
    }

    /// Subsets of `0..=i` containing `i`, of size 2 up to the cap, smaller first.
    fn subsets_ending_at(&self, i: usize, m: usize) -> Vec<Vec<usize>> {
        let cap = self.opts.subset_cap.min(m.saturating_sub(1));
        let mut out = Vec::new();
        for size in 2..=cap {
            if size > i + 1 {
                break;
            }
            let mut comb: Vec<usize> = (0..size - 1).collect();
            loop {
                let mut s = comb.clone();
                s.push(i);
                out.push(s);
                // next (size-1)-combination of 0..i
                let k = size - 1;
                let mut j = k;
                let mut advanced = false;
                while j > 0 {
                    j -= 1;
                    if comb[j] < i - (k - j) {
                        comb[j] += 1;
                        for l in j + 1..k {
                            comb[l] = comb[l - 1] + 1;
                        }
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    break;
                }
            }
        }
        out
    }
}

enum DfsResult {
    Found(Vec<usize>),
    Exhausted,
}

/// Decides `A ≅_g B`. Errors only for incompatible inputs; resource trouble
/// yields an inconclusive verdict.
pub fn graded_isomorphism(
    a: &Presentation,
    b: &Presentation,
    opts: &IsoOptions,
) -> Result<IsoVerdict, IsoError> {
    let start = Instant::now();
    check_compatible(a, b)?;
    let bound = pair_bound(a, b, opts.max_degree);
    let finish = |mut v: IsoVerdict| {
        v.statistics.wall_time_ms = start.elapsed().as_millis() as u64;
        v
    };
    let sa = match Side::build(a, bound, opts)? {
        Ok(s) => s,
        Err(r) => {
            return Ok(finish(IsoVerdict::new(
                Outcome::Inconclusive,
                Some(r),
                bound,
                Statistics::default(),
            )))
        }
    };
    let sb = match Side::build(b, bound, opts)? {
        Ok(s) => s,
        Err(r) => {
            return Ok(finish(IsoVerdict::new(
                Outcome::Inconclusive,
                Some(r),
                bound,
                Statistics::default(),
            )))
        }
    };
    Ok(finish(search(&sa, &sb, bound, opts)))
}

fn search(sa: &Side, sb: &Side, bound: u32, opts: &IsoOptions) -> IsoVerdict {
    let p = sa.presentation.characteristic();
    let gens = sa.presentation.generators();
    let m = gens.len();
    let mut stats = Statistics::default();
    let b_dims: Vec<usize> = (0..m)
        .map(|i| sb.trunc.dim(gens.degree(i)).unwrap_or(0))
        .collect();
    stats.candidate_space = candidate_space_size(&b_dims, p);

    // step 1: invariants
    let (fa, fb) = (sa.fingerprint(), sb.fingerprint());
    let difference = match (&fa.series, &fb.series) {
        (Some(x), Some(y)) if opts.oracle && x != y => Some(Reason::SeriesMismatch {
            a: x.to_string(),
            b: y.to_string(),
        }),
        _ if opts.oracle => fa.dims_difference(&fb),
        _ => fa.series_difference(&fb),
    };
    if let Some(r) = difference {
        return IsoVerdict::new(Outcome::NotIsomorphic, Some(r), bound, stats);
    }

    // step 2: candidate images per generator
    let mut candidates: Vec<Vec<Element>> = Vec::with_capacity(m);
    let mut image_polys: Vec<Vec<Polynomial>> = Vec::with_capacity(m);
    for (i, &dim) in b_dims.iter().enumerate() {
        let d = gens.degree(i);
        let a_is_zero = sa
            .trunc
            .nf_monomial(&sa.presentation.algebra.generator(i))
            .map(|e| e.is_zero())
            .unwrap_or(false);
        let vectors = if a_is_zero && !opts.oracle {
            Some(vec![vec![0; dim]])
        } else {
            all_vectors(dim, p, !opts.oracle, opts.max_candidates_per_generator)
        };
        let Some(vectors) = vectors else {
            return IsoVerdict::new(
                Outcome::Inconclusive,
                Some(Reason::Resource {
                    detail: format!("{p}^{dim} candidate images for generator {}", gens.name(i)),
                }),
                bound,
                stats,
            );
        };
        let elems: Vec<Element> = vectors
            .into_iter()
            .map(|coords| Element { degree: d, coords })
            .collect();
        let polys = elems
            .iter()
            .map(|e| sb.trunc.to_polynomial(e).expect("degree within bound"))
            .collect();
        candidates.push(elems);
        image_polys.push(polys);
    }

    let prune = opts.prune && !opts.oracle && sa.presentation.mode() == Mode::Commutative;
    let cap = (2 * sa.w).min(bound);
    let mut s = Search {
        a: sa,
        b: sb,
        opts,
        bound,
        cap,
        candidates,
        image_polys,
        subset_data: HashMap::new(),
        memo: HashMap::new(),
        stats,
        emptied: None,
    };

    // singletons first; larger subsets are tested lazily during the search
    let mut domains: Vec<Vec<usize>> = Vec::with_capacity(m);
    for i in 0..m {
        let all: Vec<usize> = (0..s.candidates[i].len()).collect();
        if !prune || s.opts.subset_cap == 0 {
            domains.push(all);
            continue;
        }
        let mut keep = Vec::new();
        let mut last = None;
        for c in all {
            match s.failing_stage(&[i], &[c]) {
                None => keep.push(c),
                Some(st) => {
                    s.stats.bump(st);
                    last = Some(st);
                }
            }
        }
        if keep.is_empty() && s.emptied.is_none() {
            s.emptied = last.map(|st| (vec![i], st));
        }
        domains.push(keep);
    }

    let result = if domains.iter().any(|d| d.is_empty()) {
        DfsResult::Exhausted
    } else {
        let mut chosen = Vec::with_capacity(m);
        dfs(&mut s, &domains, &mut chosen, prune)
    };

    let stats = std::mem::take(&mut s.stats);
    match result {
        DfsResult::Exhausted => {
            let emptied_at = s
                .emptied
                .map(|(sub, st)| (sub.iter().map(|&i| gens.name(i).to_string()).collect(), st));
            IsoVerdict::new(
                Outcome::NotIsomorphic,
                Some(Reason::SearchExhausted { emptied_at }),
                bound,
                stats,
            )
        }
        DfsResult::Found(choice) => {
            let images: Vec<Polynomial> = choice
                .iter()
                .enumerate()
                .map(|(i, &c)| s.image_polys[i][c].clone())
                .collect();
            let alg_b = &sb.presentation.algebra;
            let cert: BTreeMap<String, String> = images
                .iter()
                .enumerate()
                .map(|(i, q)| (gens.name(i).to_string(), alg_b.format_poly(q)))
                .collect();
            let exact_equal = matches!((&sa.exact, &sb.exact), (Some(x), Some(y)) if x == y);
            let (outcome, reason) = if exact_equal {
                (Outcome::Isomorphic, None)
            } else if let (Some(x), Some(y)) = (&sa.exact, &sb.exact) {
                // oracle mode reaches here only when series were not compared up front
                (
                    Outcome::NotIsomorphic,
                    Some(Reason::SeriesMismatch {
                        a: x.to_string(),
                        b: y.to_string(),
                    }),
                )
            } else {
                (Outcome::Inconclusive, Some(Reason::SeriesUnknown { bound }))
            };
            let mut v = IsoVerdict::new(outcome, reason, bound, stats);
            v.certificate = Some(cert);
            v.images = Some(images);
            v
        }
    }
}

fn dfs(s: &mut Search, domains: &[Vec<usize>], chosen: &mut Vec<usize>, prune: bool) -> DfsResult {
    let m = domains.len();
    let i = chosen.len();
    let subsets = if prune {
        s.subsets_ending_at(i, m)
    } else {
        Vec::new()
    };
    'next: for &c in &domains[i] {
        chosen.push(c);
        for sub in &subsets {
            let pick: Vec<usize> = sub.iter().map(|&j| chosen[j]).collect();
            if !s.admissible(sub, &pick) {
                chosen.pop();
                continue 'next;
            }
        }
        if i + 1 == m {
            s.stats.enumerated += 1;
            let imgs: Vec<Element> = chosen
                .iter()
                .enumerate()
                .map(|(j, &k)| s.candidates[j][k].clone())
                .collect();
            match relations_vanish(s.a, s.b, &imgs) {
                Ok(true) => {}
                _ => {
                    s.stats.bump(Stage::Relations);
                    chosen.pop();
                    continue;
                }
            }
            match s.b.trunc.generates(&imgs) {
                Ok(true) => return DfsResult::Found(chosen.clone()),
                _ => s.stats.bump(Stage::Generation),
            }
        } else if let DfsResult::Found(t) = dfs(s, domains, chosen, prune) {
            return DfsResult::Found(t);
        }
        chosen.pop();
    }
    DfsResult::Exhausted
}

fn relations_vanish(
    a: &Side,
    b: &Side,
    imgs: &[Element],
) -> Result<bool, crate::truncated::TruncError> {
    for r in &a.presentation.relations {
        if b.trunc.evaluate(r, imgs)?.iter().any(|e| !e.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Parses certificate strings (source generator name to target polynomial).
pub fn parse_certificate(
    a: &Presentation,
    b: &Presentation,
    cert: &BTreeMap<String, String>,
) -> Result<Vec<Polynomial>, IsoError> {
    a.generators()
        .iter()
        .map(|g| {
            let text = cert.get(&g.name).ok_or_else(|| {
                IsoError::InvalidCertificate(format!("no image for generator {}", g.name))
            })?;
            b.algebra
                .parse_poly(text)
                .map_err(|e| IsoError::InvalidCertificate(format!("image of {}: {e}", g.name)))
        })
        .collect()
}

/// Independent re-check of a tuple: degrees match, relations of `A` vanish on
/// the images, the images generate `B`, and the series agree.
pub fn verify_certificate(
    a: &Presentation,
    b: &Presentation,
    images: &[Polynomial],
) -> Result<bool, IsoError> {
    check_compatible(a, b)?;
    let gens = a.generators();
    if images.len() != gens.len() {
        return Ok(false);
    }
    for (i, q) in images.iter().enumerate() {
        match q.degree() {
            PolyDegree::Zero => {}
            PolyDegree::Homogeneous(d) if d == gens.degree(i) => {}
            _ => return Ok(false),
        }
    }
    let bound = pair_bound(a, b, None);
    let opts = IsoOptions::default();
    let (Ok(sa), Ok(sb)) = (Side::build(a, bound, &opts)?, Side::build(b, bound, &opts)?) else {
        return Ok(false);
    };
    let mut imgs = Vec::with_capacity(images.len());
    for (i, q) in images.iter().enumerate() {
        match sb.trunc.element(q, gens.degree(i)) {
            Ok(e) => imgs.push(e),
            Err(_) => return Ok(false),
        }
    }
    if !matches!(relations_vanish(&sa, &sb, &imgs), Ok(true)) {
        return Ok(false);
    }
    if !matches!(sb.trunc.generates(&imgs), Ok(true)) {
        return Ok(false);
    }
    if sa.trunc.dims() != sb.trunc.dims() {
        return Ok(false);
    }
    Ok(match (&sa.exact, &sb.exact) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(text: &str) -> Presentation {
        Presentation::parse(text).unwrap()
    }

    const C2: &str = "algebra C2\nchar 2\nmode commutative\ngen x 1\n";
    const C4: &str = "algebra C4\nchar 2\nmode commutative\ngen x 1\ngen y 2\nrel x^2\n";
    const FREE2: &str = "algebra F\nchar 2\nmode commutative\ngen x 1\ngen y 1\n";

    #[test]
    fn truncation_bounds() {
        assert_eq!(truncation_bound(&pres(C4)), 2);
        assert_eq!(truncation_bound(&pres(C2)), 1);
        let d8 = pres("algebra D8\nchar 2\nmode commutative\ngen x 1\ngen y 1\ngen w 2\nrel x*y\n");
        assert_eq!(truncation_bound(&d8), 2);
    }

    #[test]
    fn candidate_space_examples() {
        let big = candidate_space_size(&[3, 3, 3, 7, 7, 7], 2);
        assert_eq!(
            big,
            BigUint::from(7u32).pow(3) * BigUint::from(127u32).pow(3)
        );
        assert_eq!(candidate_space_size(&[0], 2), BigUint::from(0u32));
    }

    #[test]
    fn identity_certificate_on_free_algebra() {
        let f = pres(FREE2);
        let v = graded_isomorphism(&f, &f, &IsoOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Isomorphic);
        let cert = v.certificate.unwrap();
        assert_eq!(cert["x"], "x");
        assert_eq!(cert["y"], "y");
    }

    #[test]
    fn c2_and_c4_are_separated_by_the_search() {
        let (a, b) = (pres(C2), pres(C4));
        assert_eq!(
            fingerprint(&a, 10).unwrap().dims,
            fingerprint(&b, 10).unwrap().dims
        );
        for opts in [
            IsoOptions::default(),
            IsoOptions::unpruned(),
            IsoOptions::oracle(),
        ] {
            assert_eq!(
                graded_isomorphism(&a, &b, &opts).unwrap().outcome,
                Outcome::NotIsomorphic
            );
            assert_eq!(
                graded_isomorphism(&b, &a, &opts).unwrap().outcome,
                Outcome::NotIsomorphic
            );
        }
    }

    #[test]
    fn eliminated_square_empties_the_singleton_list() {
        let v = graded_isomorphism(&pres(C4), &pres(C2), &IsoOptions::default()).unwrap();
        assert_eq!(
            v.reason,
            Some(Reason::SearchExhausted {
                emptied_at: Some((vec!["x".into()], Stage::Elimination))
            })
        );
        assert_eq!(v.statistics.pruned_by_stage[&Stage::Elimination], 1);
        assert_eq!(v.statistics.candidate_space, BigUint::from(1u32));
    }

    #[test]
    fn certificates_verify() {
        let f = pres(FREE2);
        let p = |s: &str| f.algebra.parse_poly(s).unwrap();
        assert!(verify_certificate(&f, &f, &[p("x"), p("y")]).unwrap());
        assert!(!verify_certificate(&f, &f, &[p("x"), p("x")]).unwrap());
        assert!(verify_certificate(&f, &f, &[p("y"), p("x+y")]).unwrap());
    }

    #[test]
    fn mismatched_characteristic_is_an_error() {
        let a = pres(C2);
        let b = pres("algebra C3\nchar 3\nmode commutative\ngen x 2\n");
        assert!(matches!(
            graded_isomorphism(&a, &b, &IsoOptions::default()),
            Err(IsoError::CharacteristicMismatch(2, 3))
        ));
    }

    #[test]
    fn free_algebra_search_counts() {
        let f = pres(FREE2);
        let opts = IsoOptions::default();
        let bound = pair_bound(&f, &f, None);
        let side = Side::build(&f, bound, &opts).unwrap().unwrap();
        let side2 = Side::build(&f, bound, &opts).unwrap().unwrap();
        let v = search(&side, &side2, bound, &opts);
        assert_eq!(v.outcome, Outcome::Isomorphic);
        let pruned = &v.statistics.pruned_by_stage;
        // every nonzero linear form is admissible; only the first try x -> x, y -> x fails
        assert_eq!(
            pruned[&Stage::QuotientSeries] + pruned[&Stage::Annihilator],
            0
        );
        assert_eq!(pruned[&Stage::Generation], 1);
        assert_eq!(v.statistics.enumerated, 2);
    }

    #[test]
    fn associative_without_series_is_inconclusive() {
        let a = pres("algebra A\nchar 2\nmode associative\ngen x 1\ngen y 1\nrel x*y + y*x\n");
        let v = graded_isomorphism(&a, &a, &IsoOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert!(v.certificate.is_some());
        let with_series = pres("algebra A\nchar 2\nmode associative\ngen x 1\ngen y 1\nrel x*y + y*x\nseries 1 / (1-t)^2\n");
        let v = graded_isomorphism(&with_series, &with_series, &IsoOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Isomorphic);
    }

    #[test]
    fn verdict_json_shape() {
        let v = graded_isomorphism(&pres(C2), &pres(C4), &IsoOptions::default()).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["outcome"], "not-isomorphic");
        assert!(j["statistics"]["candidate_space"].is_string());
        assert!(j["statistics"]["pruned_by_stage"]["quotient_series"].is_u64());
        let back: IsoVerdict = serde_json::from_value(j).unwrap();
        assert_eq!(back.outcome, v.outcome);
    }
}
