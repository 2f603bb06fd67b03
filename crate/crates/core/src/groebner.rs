//! Gröbner bases for graded-commutative algebras over GF(p).
//!
//! Variables carry a parity: odd variables anticommute with each other and
//! square to zero, even ones are central. At odd characteristic the parity of
//! a variable is the parity of its degree; at characteristic 2 everything is
//! even. Ideals are homogeneous, so Buchberger runs one degree at a time and
//! can stop at a degree cap, leaving the remaining critical pairs pending.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::gfp::PrimeField;
use crate::hilbert::{self, HilbertSeries};
use crate::present::{FreeAlgebra, Mode, PolyDegree, Polynomial, PresentError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GbError {
    #[error("Gröbner bases need a graded-commutative algebra")]
    NotCommutative,
    #[error("input polynomial is not homogeneous")]
    Inhomogeneous,
    #[error("{what} exceeded the ceiling of {limit}")]
    ResourceLimit { what: &'static str, limit: usize },
    #[error(transparent)]
    Present(#[from] PresentError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermOrder {
    Degrevlex,
    /// Degrevlex on the `front` variables first, ties broken by degrevlex on
    /// the rest; any monomial involving `front` beats every monomial without.
    Elimination {
        front: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_pairs: usize,
    pub max_basis: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_pairs: 200_000,
            max_basis: 20_000,
        }
    }
}

/// Polynomial ring data: field, weighted degrees, parities, term order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring {
    field: PrimeField,
    degrees: Vec<u32>,
    odd: Vec<bool>,
    order: TermOrder,
    front: Vec<bool>,
}

/// Exponent vector with its order key; the derived order is the term order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    key: Vec<i32>,
    exps: Vec<u16>,
}

impl Term {
    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }
}

/// Terms in descending order with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GPoly {
    terms: Vec<(Term, u32)>,
}

impl GPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Term, u32)] {
        &self.terms
    }

    pub fn leading(&self) -> Option<&(Term, u32)> {
        self.terms.first()
    }
}

impl Ring {
    pub fn new(field: PrimeField, degrees: Vec<u32>, order: TermOrder) -> Self {
        let odd = degrees
            .iter()
            .map(|&d| field.characteristic() != 2 && d % 2 == 1)
            .collect();
        let mut front = vec![false; degrees.len()];
        if let TermOrder::Elimination { front: f } = &order {
            for &i in f {
                front[i] = true;
            }
        }
        Ring {
            field,
            degrees,
            odd,
            order,
            front,
        }
    }

    pub fn for_algebra(alg: &FreeAlgebra, order: TermOrder) -> Result<Self, GbError> {
        if alg.mode() != Mode::Commutative {
            return Err(GbError::NotCommutative);
        }
        Ok(Ring::new(alg.field(), alg.generators().degrees(), order))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn is_exterior(&self, i: usize) -> bool {
        self.odd[i]
    }

    pub fn order(&self) -> &TermOrder {
        &self.order
    }

    fn has_exterior(&self) -> bool {
        self.odd.iter().any(|&o| o)
    }

    pub fn weighted_degree(&self, e: &[u16]) -> u32 {
        e.iter()
            .zip(&self.degrees)
            .map(|(&x, &d)| x as u32 * d)
            .sum()
    }

    fn key(&self, e: &[u16]) -> Vec<i32> {
        let n = e.len();
        let mut key = Vec::with_capacity(n + 2);
        if self.front.iter().any(|&f| f) {
            for block in [true, false] {
                let wdeg: u32 = (0..n)
                    .filter(|&i| self.front[i] == block)
                    .map(|i| e[i] as u32 * self.degrees[i])
                    .sum();
                key.push(wdeg as i32);
                key.extend(
                    (0..n)
                        .rev()
                        .filter(|&i| self.front[i] == block)
                        .map(|i| -(e[i] as i32)),
                );
            }
        } else {
            key.push(self.weighted_degree(e) as i32);
            key.extend(e.iter().rev().map(|&x| -(x as i32)));
        }
        key
    }

    pub fn term(&self, exps: Vec<u16>) -> Term {
        Term {
            key: self.key(&exps),
            exps,
        }
    }

    /// `a * b` as a sign residue and exponent vector; `None` when an odd
    /// variable would be squared.
    pub fn mul_exps(&self, a: &[u16], b: &[u16]) -> Option<(u32, Vec<u16>)> {
        let mut swaps = 0u32;
        let mut odd_in_b = 0u32;
        let mut out = Vec::with_capacity(a.len());
        for i in 0..a.len() {
            let e = a[i] + b[i];
            if self.odd[i] {
                if e >= 2 {
                    return None;
                }
                swaps += a[i] as u32 * odd_in_b;
                odd_in_b += b[i] as u32;
            }
            out.push(e);
        }
        Some((self.field.sign(swaps), out))
    }

    /// Converts an algebra polynomial, padding any extra variables with zero.
    pub fn lift(&self, p: &Polynomial) -> GPoly {
        let mut terms: Vec<(Term, u32)> = p
            .terms()
            .map(|(m, c)| {
                let mut e = m.exponents().expect("commutative monomial").to_vec();
                e.resize(self.nvars(), 0);
                (self.term(e), c)
            })
            .collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        GPoly { terms }
    }

    /// Converts back, keeping the first `alg.ngens()` exponents.
    pub fn lower(&self, alg: &FreeAlgebra, g: &GPoly) -> Polynomial {
        let mut p = Polynomial::zero();
        for (t, c) in &g.terms {
            let e = t.exps[..alg.ngens()].to_vec();
            alg.add_term(&mut p, alg.monomial_from_exponents(e), *c);
        }
        p
    }

    /// `c * m * g`.
    fn mul_monomial(&self, c: u32, m: &[u16], g: &GPoly) -> GPoly {
        let mut terms = Vec::with_capacity(g.terms.len());
        for (t, x) in &g.terms {
            if let Some((s, e)) = self.mul_exps(m, &t.exps) {
                terms.push((self.term(e), self.field.mul(self.field.mul(s, c), *x)));
            }
        }
        // multiplication by a monomial preserves the order of surviving terms
        GPoly { terms }
    }

    fn make_monic(&self, g: &mut GPoly) {
        if let Some(&(_, lc)) = g.terms.first() {
            let inv = self.field.inv(lc);
            for (_, c) in g.terms.iter_mut() {
                *c = self.field.mul(*c, inv);
            }
        }
    }

    /// `x * g` for a single variable.
    fn mul_var(&self, v: usize, g: &GPoly) -> GPoly {
        let mut m = vec![0u16; self.nvars()];
        m[v] = 1;
        self.mul_monomial(1, &m, g)
    }

    /// All exponent vectors of weighted degree `n`, odd exponents at most 1.
    pub fn monomials_of_degree(&self, n: u32) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        let mut e = vec![0u16; self.nvars()];
        self.fill(0, n, &mut e, &mut out);
        out
    }

    fn fill(&self, i: usize, rem: u32, e: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if i == e.len() {
            if rem == 0 {
                out.push(e.clone());
            }
            return;
        }
        let d = self.degrees[i];
        let cap = if self.odd[i] { 1 } else { rem / d };
        for k in 0..=cap.min(rem / d) {
            e[i] = k as u16;
            self.fill(i + 1, rem - k * d, e, out);
        }
        e[i] = 0;
    }
}

fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u16], b: &[u16]) -> Vec<u16> {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

fn diff(a: &[u16], b: &[u16]) -> Vec<u16> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

#[derive(Debug, Clone)]
enum Item {
    Input(GPoly),
    Pair(usize, usize),
    /// `x_var * g`, cancelling the leading term through `x_var^2 = 0`.
    Exterior(usize, usize),
}

#[derive(Debug, Clone)]
struct Pending {
    degree: u32,
    item: Item,
}

/// A monic, interreduced Gröbner basis, possibly only valid through a degree cap.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ring: Ring,
    elems: Vec<GPoly>,
    pending: Vec<Pending>,
    cap: Option<u32>,
    processed: usize,
    limits: Limits,
}

impl GroebnerBasis {
    /// Buchberger completion. With `cap = Some(c)` only critical pairs of
    /// degree at most `c` are processed.
    pub fn compute(
        ring: Ring,
        gens: &[GPoly],
        cap: Option<u32>,
        limits: Limits,
    ) -> Result<Self, GbError> {
        let mut gb = GroebnerBasis {
            ring,
            elems: Vec::new(),
            pending: Vec::new(),
            cap,
            processed: 0,
            limits,
        };
        gb.add_inputs(gens)?;
        gb.run()?;
        Ok(gb)
    }

    /// Adds generators to an existing basis and resumes completion.
    pub fn extend(&self, gens: &[GPoly], cap: Option<u32>) -> Result<Self, GbError> {
        let mut gb = self.clone();
        gb.cap = cap;
        gb.processed = 0;
        gb.add_inputs(gens)?;
        gb.run()?;
        Ok(gb)
    }

    fn add_inputs(&mut self, gens: &[GPoly]) -> Result<(), GbError> {
        for g in gens {
            if g.is_zero() {
                continue;
            }
            let d = self.ring.weighted_degree(&g.terms[0].0.exps);
            if g.terms
                .iter()
                .any(|(t, _)| self.ring.weighted_degree(&t.exps) != d)
            {
                return Err(GbError::Inhomogeneous);
            }
            self.pending.push(Pending {
                degree: d,
                item: Item::Input(g.clone()),
            });
        }
        Ok(())
    }

    fn run(&mut self) -> Result<(), GbError> {
        while let Some(d) = self.pending.iter().map(|p| p.degree).min() {
            if self.cap.is_some_and(|c| d > c) {
                break;
            }
            let (batch, rest): (Vec<Pending>, Vec<Pending>) =
                self.pending.drain(..).partition(|p| p.degree == d);
            self.pending = rest;
            self.processed += batch.len();
            if self.processed > self.limits.max_pairs {
                return Err(GbError::ResourceLimit {
                    what: "critical pairs",
                    limit: self.limits.max_pairs,
                });
            }
            for p in batch {
                let poly = match p.item {
                    Item::Input(g) => g,
                    Item::Pair(i, j) => self.spoly(i, j),
                    Item::Exterior(i, v) => self.ring.mul_var(v, &self.elems[i]),
                };
                let mut r = self.reduce(&poly);
                if r.is_zero() {
                    continue;
                }
                self.ring.make_monic(&mut r);
                self.insert(r)?;
            }
        }
        self.interreduce();
        Ok(())
    }

    fn insert(&mut self, g: GPoly) -> Result<(), GbError> {
        let k = self.elems.len();
        let lm = g.terms[0].0.exps.clone();
        let coprime_ok = !self.ring.has_exterior();
        for (j, h) in self.elems.iter().enumerate() {
            let hl = &h.terms[0].0.exps;
            if coprime_ok && lm.iter().zip(hl).all(|(&a, &b)| a == 0 || b == 0) {
                continue;
            }
            self.pending.push(Pending {
                degree: self.ring.weighted_degree(&lcm(&lm, hl)),
                item: Item::Pair(j, k),
            });
        }
        let deg = self.ring.weighted_degree(&lm);
        for (v, &e) in lm.iter().enumerate() {
            if self.ring.odd[v] && e == 1 {
                self.pending.push(Pending {
                    degree: deg + self.ring.degrees[v],
                    item: Item::Exterior(k, v),
                });
            }
        }
        self.elems.push(g);
        if self.elems.len() > self.limits.max_basis {
            return Err(GbError::ResourceLimit {
                what: "basis size",
                limit: self.limits.max_basis,
            });
        }
        Ok(())
    }

    fn spoly(&self, i: usize, j: usize) -> GPoly {
        let (f, g) = (&self.elems[i], &self.elems[j]);
        let (lf, lg) = (&f.terms[0].0.exps, &g.terms[0].0.exps);
        let l = lcm(lf, lg);
        let (u, v) = (diff(&l, lf), diff(&l, lg));
        // u * lm(f) = su * l, v * lm(g) = sv * l
        let su = self.ring.mul_exps(&u, lf).map(|x| x.0);
        let sv = self.ring.mul_exps(&v, lg).map(|x| x.0);
        match (su, sv) {
            (Some(su), Some(sv)) => {
                let a = self.ring.mul_monomial(su, &u, f);
                let b = self.ring.mul_monomial(sv, &v, g);
                sub(&self.ring, &a, &b)
            }
            _ => GPoly::default(),
        }
    }

    fn find_divisor(&self, e: &[u16], skip: Option<usize>) -> Option<usize> {
        self.elems
            .iter()
            .enumerate()
            .find(|(k, g)| Some(*k) != skip && divides(&g.terms[0].0.exps, e))
            .map(|(k, _)| k)
    }

    fn reduce_skipping(&self, f: &GPoly, skip: Option<usize>) -> GPoly {
        let field = self.ring.field;
        let mut rest: BTreeMap<Term, u32> = f.terms.iter().cloned().collect();
        let mut out = Vec::new();
        while let Some((t, c)) = rest.pop_last() {
            match self.find_divisor(&t.exps, skip) {
                None => out.push((t, c)),
                Some(k) => {
                    let g = &self.elems[k];
                    let q = diff(&t.exps, &g.terms[0].0.exps);
                    let (s, _) = self
                        .ring
                        .mul_exps(&q, &g.terms[0].0.exps)
                        .expect("divisible term is a valid product");
                    // subtract c * s * q * g; its leading term is exactly c * t
                    let factor = field.neg(field.mul(c, s));
                    for (gt, gc) in g.terms.iter().skip(1) {
                        if let Some((s2, e)) = self.ring.mul_exps(&q, &gt.exps) {
                            let add = field.mul(factor, field.mul(s2, *gc));
                            match rest.entry(self.ring.term(e)) {
                                Entry::Vacant(v) => {
                                    v.insert(add);
                                }
                                Entry::Occupied(mut o) => {
                                    let sum = field.add(*o.get(), add);
                                    if sum == 0 {
                                        o.remove();
                                    } else {
                                        *o.get_mut() = sum;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        GPoly { terms: out }
    }

    /// Complete reduction by the basis.
    pub fn reduce(&self, f: &GPoly) -> GPoly {
        self.reduce_skipping(f, None)
    }

    fn interreduce(&mut self) {
        for k in 0..self.elems.len() {
            let g = &self.elems[k];
            let lead = g.terms[0].clone();
            let tail = GPoly {
                terms: g.terms[1..].to_vec(),
            };
            let mut t = self.reduce_skipping(&tail, Some(k));
            t.terms.insert(0, lead);
            self.elems[k] = t;
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn elements(&self) -> &[GPoly] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn leading_exponents(&self) -> Vec<Vec<u16>> {
        self.elems
            .iter()
            .map(|g| g.terms[0].0.exps.clone())
            .collect()
    }

    /// `Some(c)` when the basis is only known to be complete through degree `c`.
    pub fn degree_cap(&self) -> Option<u32> {
        if self.pending.is_empty() {
            None
        } else {
            self.cap
        }
    }

    pub fn is_complete(&self) -> bool {
        self.pending.is_empty()
    }

    /// Monomials of degree `n` outside the leading-monomial ideal; odd
    /// variables appear at most once.
    pub fn standard_monomials(&self, n: u32) -> Vec<Vec<u16>> {
        let lms = self.leading_exponents();
        self.ring
            .monomials_of_degree(n)
            .into_iter()
            .filter(|e| !lms.iter().any(|l| divides(l, e)))
            .collect()
    }

    pub fn contains(&self, f: &GPoly) -> bool {
        self.reduce(f).is_zero()
    }

    pub fn series(&self) -> HilbertSeries {
        hilbert::series_of_quotient(self)
    }
}

fn sub(ring: &Ring, a: &GPoly, b: &GPoly) -> GPoly {
    let f = ring.field;
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() || j < b.terms.len() {
        let ord = match (a.terms.get(i), b.terms.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Less,
        };
        match ord {
            std::cmp::Ordering::Greater => {
                out.push(a.terms[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Less => {
                let (t, c) = &b.terms[j];
                out.push((t.clone(), f.neg(*c)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = f.sub(a.terms[i].1, b.terms[j].1);
                if c != 0 {
                    out.push((a.terms[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    GPoly { terms: out }
}

fn check_homogeneous(polys: &[Polynomial]) -> Result<(), GbError> {
    if polys
        .iter()
        .any(|p| p.degree() == PolyDegree::Inhomogeneous)
    {
        return Err(GbError::Inhomogeneous);
    }
    Ok(())
}

/// Gröbner basis of an ideal of a commutative-mode free algebra.
pub fn groebner(
    alg: &FreeAlgebra,
    ideal: &[Polynomial],
    order: TermOrder,
    cap: Option<u32>,
    limits: Limits,
) -> Result<GroebnerBasis, GbError> {
    check_homogeneous(ideal)?;
    let ring = Ring::for_algebra(alg, order)?;
    let gens: Vec<GPoly> = ideal.iter().map(|p| ring.lift(p)).collect();
    GroebnerBasis::compute(ring, &gens, cap, limits)
}

/// An ideal of a commutative-mode free algebra with a lazily computed
/// degrevlex basis.
#[derive(Debug)]
pub struct IdealHandle {
    algebra: FreeAlgebra,
    gens: Vec<Polynomial>,
    cap: Option<u32>,
    limits: Limits,
    gb: OnceLock<Result<GroebnerBasis, GbError>>,
}

impl IdealHandle {
    pub fn new(
        algebra: FreeAlgebra,
        gens: Vec<Polynomial>,
        cap: Option<u32>,
        limits: Limits,
    ) -> Result<Self, GbError> {
        if algebra.mode() != Mode::Commutative {
            return Err(GbError::NotCommutative);
        }
        check_homogeneous(&gens)?;
        Ok(IdealHandle {
            algebra,
            gens,
            cap,
            limits,
            gb: OnceLock::new(),
        })
    }

    pub fn algebra(&self) -> &FreeAlgebra {
        &self.algebra
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn cap(&self) -> Option<u32> {
        self.cap
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn groebner(&self) -> Result<&GroebnerBasis, GbError> {
        self.gb
            .get_or_init(|| {
                groebner(
                    &self.algebra,
                    &self.gens,
                    TermOrder::Degrevlex,
                    self.cap,
                    self.limits,
                )
            })
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Hilbert series of the quotient by this ideal.
    pub fn quotient_series(&self) -> Result<HilbertSeries, GbError> {
        Ok(self.groebner()?.series())
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial, GbError> {
        let gb = self.groebner()?;
        Ok(gb
            .ring()
            .lower(&self.algebra, &gb.reduce(&gb.ring().lift(f))))
    }
}

/// Relations among the kept generators.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub relations: Vec<Polynomial>,
    pub degree_capped: bool,
}

/// Generators of `ideal ∩ F[keep]` through the degree cap.
pub fn eliminate(
    ideal: &IdealHandle,
    keep: &[usize],
    cap: Option<u32>,
) -> Result<Elimination, GbError> {
    let alg = ideal.algebra();
    let front: Vec<usize> = (0..alg.ngens()).filter(|i| !keep.contains(i)).collect();
    let gb = groebner(
        alg,
        ideal.generators(),
        TermOrder::Elimination {
            front: front.clone(),
        },
        cap,
        ideal.limits(),
    )?;
    let relations = gb
        .elements()
        .iter()
        .filter(|g| front.iter().all(|&i| g.terms[0].0.exps[i] == 0))
        .map(|g| gb.ring().lower(alg, g))
        .collect();
    Ok(Elimination {
        relations,
        degree_capped: gb.degree_cap().is_some(),
    })
}

/// The ideal quotient `(K : <f_1, .., f_k>)` given as generators together with
/// `K`, valid through degree `cap`. Its quotient is `A / Ann_A(<f>)` where
/// `A = F / K`.
///
/// Each `f_i` comes with its nominal degree, so zero elements are allowed.
/// The computation runs in `F[e_1, .., e_{k+1}]` with tags `e_i e_j = 0`: the
/// module `K F^k + F (sum f_i e_i + e_{k+1})` meets `F e_{k+1}` in exactly
/// `(K : f) e_{k+1}`, which elimination of `e_1 .. e_k` reads off.
pub fn annihilator(
    ambient: &IdealHandle,
    f: &[(Polynomial, u32)],
    cap: u32,
) -> Result<IdealHandle, GbError> {
    let alg = ambient.algebra();
    let n = alg.ngens();
    let k = f.len();
    let top = f.iter().map(|(_, d)| *d).max().unwrap_or(0) + 1;
    let mut degrees = alg.generators().degrees();
    for (_, d) in f {
        degrees.push(top - d);
    }
    degrees.push(top);
    let front: Vec<usize> = (n..n + k).collect();
    let ring = Ring::new(alg.field(), degrees, TermOrder::Elimination { front });
    let tag = |i: usize| {
        let mut e = vec![0u16; n + k + 1];
        e[n + i] = 1;
        e
    };
    let mut gens: Vec<GPoly> = Vec::new();
    for rel in ambient.generators() {
        let r = ring.lift(rel);
        for i in 0..k {
            gens.push(ring.mul_monomial(1, &tag(i), &r));
        }
    }
    let mut combo = GPoly {
        terms: vec![(ring.term(tag(k)), 1)],
    };
    for (i, (fi, _)) in f.iter().enumerate() {
        let lifted = ring.lift(fi);
        // f_i e_i: tags sit after every ring variable, so no sign arises
        let mut part = Vec::new();
        for (t, c) in &lifted.terms {
            let mut e = t.exps.clone();
            e[n + i] = 1;
            part.push((ring.term(e), *c));
        }
        part.sort_by(|a, b| b.0.cmp(&a.0));
        combo = sub(&ring, &combo, &GPoly { terms: part });
    }
    gens.push(combo);
    for i in 0..=k {
        for j in i..=k {
            if let Some((_, e)) = ring.mul_exps(&tag(i), &tag(j)) {
                gens.push(GPoly {
                    terms: vec![(ring.term(e), 1)],
                });
            }
        }
    }
    let gb = GroebnerBasis::compute(ring.clone(), &gens, Some(cap + top), ambient.limits())?;
    let mut quotient_gens = ambient.generators().to_vec();
    for g in gb.elements() {
        let lead = &g.terms[0].0.exps;
        if (n..n + k).any(|i| lead[i] != 0) || lead[n + k] != 1 {
            continue;
        }
        if g.terms
            .iter()
            .any(|(t, _)| t.exps[n + k] != 1 || (n..n + k).any(|i| t.exps[i] != 0))
        {
            continue;
        }
        quotient_gens.push(ring.lower(alg, g));
    }
    IdealHandle::new(alg.clone(), quotient_gens, Some(cap), ambient.limits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfp::PrimeField;
    use crate::present::{Generator, GeneratorSet};

    fn alg(p: u32, gens: &[(&str, u32)]) -> FreeAlgebra {
        let gens = GeneratorSet::new(
            gens.iter()
                .map(|&(n, d)| Generator {
                    name: n.to_string(),
                    degree: d,
                })
                .collect(),
        )
        .unwrap();
        FreeAlgebra::new(PrimeField::new(p).unwrap(), Mode::Commutative, gens)
    }

    fn polys(a: &FreeAlgebra, s: &[&str]) -> Vec<Polynomial> {
        s.iter().map(|t| a.parse_poly(t).unwrap()).collect()
    }

    fn gb(a: &FreeAlgebra, s: &[&str]) -> GroebnerBasis {
        groebner(
            a,
            &polys(a, s),
            TermOrder::Degrevlex,
            None,
            Limits::default(),
        )
        .unwrap()
    }

    fn names(a: &FreeAlgebra, g: &GroebnerBasis) -> Vec<String> {
        g.elements()
            .iter()
            .map(|e| a.format_poly(&g.ring().lower(a, e)))
            .collect()
    }

    #[test]
    fn principal_monomial_ideal() {
        let a = alg(2, &[("x", 1)]);
        assert_eq!(names(&a, &gb(&a, &["x^2"])), ["x^2"]);
    }

    #[test]
    fn s_pair_consequence() {
        let a = alg(2, &[("x", 1), ("y", 1)]);
        let g = gb(&a, &["x*y", "x^2+y^2"]);
        assert!(
            names(&a, &g).contains(&"y^3".to_string()),
            "{:?}",
            names(&a, &g)
        );
        // quotient dims 1, 2, 1, 0
        let dims: Vec<usize> = (0..5).map(|n| g.standard_monomials(n).len()).collect();
        assert_eq!(dims, [1, 2, 1, 0, 0]);
        let x3 = g.ring().lift(&a.parse_poly("x^3").unwrap());
        assert!(g.contains(&x3));
    }

    #[test]
    fn exterior_generator_quotient() {
        let a = alg(3, &[("x", 1), ("y", 2)]);
        let g = gb(&a, &["x"]);
        assert_eq!(names(&a, &g), ["x"]);
        let sm = g.standard_monomials(2);
        assert_eq!(sm, vec![vec![0, 1]]);
        assert_eq!(g.standard_monomials(0).len(), 1);
    }

    #[test]
    fn exterior_pairs_are_generated() {
        // in Λ(x, y), <x + y> also contains x*(x + y) = x*y
        let a = alg(3, &[("x", 1), ("y", 1)]);
        let g = gb(&a, &["x+y"]);
        assert_eq!(g.standard_monomials(2).len(), 0);
        assert!(g.contains(&g.ring().lift(&a.parse_poly("x*y").unwrap())));
    }

    #[test]
    fn elimination_examples() {
        let a = alg(2, &[("x", 1), ("y", 1), ("w", 2)]);
        let h = IdealHandle::new(a.clone(), polys(&a, &["x*y"]), None, Limits::default()).unwrap();
        assert!(eliminate(&h, &[0], Some(6)).unwrap().relations.is_empty());

        let a = alg(2, &[("x", 1)]);
        let h = IdealHandle::new(a.clone(), polys(&a, &["x^2"]), None, Limits::default()).unwrap();
        let e = eliminate(&h, &[0], Some(4)).unwrap();
        assert_eq!(e.relations, polys(&a, &["x^2"]));

        let a = alg(2, &[("x", 1), ("y", 1)]);
        let h = IdealHandle::new(a.clone(), polys(&a, &["x+y"]), None, Limits::default()).unwrap();
        assert!(eliminate(&h, &[0], Some(4)).unwrap().relations.is_empty());
        let both = eliminate(&h, &[0, 1], Some(4)).unwrap();
        assert_eq!(both.relations, polys(&a, &["x+y"]));
    }

    fn ann_dims(a: &FreeAlgebra, rels: &[&str], f: &[(&str, u32)], cap: u32) -> Vec<usize> {
        let h = IdealHandle::new(a.clone(), polys(a, rels), None, Limits::default()).unwrap();
        let f: Vec<(Polynomial, u32)> = f
            .iter()
            .map(|&(s, d)| (a.parse_poly(s).unwrap(), d))
            .collect();
        let ann = annihilator(&h, &f, cap).unwrap();
        let g = ann.groebner().unwrap();
        (0..=cap).map(|n| g.standard_monomials(n).len()).collect()
    }

    #[test]
    fn annihilator_examples() {
        // Ann(x) in GF(2)[x]/(x^3) is <x^2>: quotient dims 1, 1, 0, ...
        let a = alg(2, &[("x", 1)]);
        assert_eq!(
            ann_dims(&a, &["x^3"], &[("x", 1)], 6),
            [1, 1, 0, 0, 0, 0, 0]
        );
        // free: Ann(x) = 0, quotient is everything
        assert_eq!(ann_dims(&a, &[], &[("x", 1)], 4), [1, 1, 1, 1, 1]);
        // Λ(x) over GF(3): Ann(x) = <x>
        let a = alg(3, &[("x", 1)]);
        assert_eq!(ann_dims(&a, &[], &[("x", 1)], 3), [1, 0, 0, 0]);
        // annihilator of zero is everything
        let a = alg(2, &[("x", 1)]);
        assert_eq!(ann_dims(&a, &[], &[("0", 1)], 2), [0, 0, 0]);
    }

    #[test]
    fn degree_cap_leaves_pairs_pending() {
        let a = alg(2, &[("x", 1), ("y", 1)]);
        let g = groebner(
            &a,
            &polys(&a, &["x*y", "x^2+y^2"]),
            TermOrder::Degrevlex,
            Some(2),
            Limits::default(),
        )
        .unwrap();
        assert_eq!(g.degree_cap(), Some(2));
        let full = g.extend(&[], None).unwrap();
        assert!(full.is_complete());
        assert_eq!(full.standard_monomials(3).len(), 0);
    }
}
