//! Degree-truncated quotient algebras.
//!
//! For a presentation `F / K` and a bound `D`, the relation space `K_n` is
//! assembled one degree at a time from generator multiples of `K_{n-d_i}`
//! and the degree-`n` relations, then row reduced. Columns are ordered from
//! the largest monomial down, so pivots are the leading monomials of `K_n`
//! and the remaining monomials form the component basis `B_n`.

use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::gfp::{EchelonBasis, Matrix, PrimeField};
use crate::hilbert::TruncatedSeries;
use crate::present::{
    FreeAlgebra, Mode, Monomial, PolyDegree, Polynomial, PresentError, Presentation,
};

pub const DEFAULT_MONOMIAL_CEILING: u64 = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TruncError {
    #[error("degree {degree} exceeds the truncation bound {bound}")]
    BoundExceeded { degree: u32, bound: u32 },
    #[error("degree {degree} has {count} monomials, above the ceiling of {ceiling}")]
    ResourceLimit {
        degree: u32,
        count: u64,
        ceiling: u64,
    },
    #[error("element is not homogeneous")]
    Inhomogeneous,
    #[error("truncation bound must be at least 1")]
    ZeroBound,
    #[error(transparent)]
    Present(#[from] PresentError),
}

/// A homogeneous element: coordinates over the component basis `B_degree`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    pub degree: u32,
    pub coords: Vec<u32>,
}

impl Element {
    pub fn zero(degree: u32, dim: usize) -> Self {
        Element {
            degree,
            coords: vec![0; dim],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

#[derive(Debug)]
struct Component {
    /// All monomials of this degree, ascending.
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// Indices (into `monomials`) of the basis monomials, ascending.
    basis: Vec<usize>,
    /// Normal form of every monomial over the basis.
    nf: Vec<Vec<u32>>,
    /// Span of the normal forms of monomials of length at least 2.
    decomposable: EchelonBasis,
}

impl Component {
    fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Graded components `A_0 .. A_D` of a presented algebra with normal forms
/// and lazily built multiplication tables.
#[derive(Debug)]
pub struct TruncatedAlgebra {
    presentation: Presentation,
    bound: u32,
    comps: Vec<Component>,
    filtration: Vec<usize>,
    /// `tables[i * (D + 1) + j]`: products `B_i x B_j`, row-major over pairs.
    tables: Vec<OnceLock<Vec<Vec<u32>>>>,
}

/// Number of monomials of each degree `0..=bound`, saturating.
pub fn monomial_counts(alg: &FreeAlgebra, bound: u32) -> Vec<u64> {
    let n = bound as usize;
    let mut counts = vec![0u64; n + 1];
    counts[0] = 1;
    match alg.mode() {
        Mode::Commutative => {
            for i in 0..alg.ngens() {
                let d = alg.generators().degree(i) as usize;
                if alg.is_exterior(i) {
                    for k in (d..=n).rev() {
                        counts[k] = counts[k].saturating_add(counts[k - d]);
                    }
                } else {
                    for k in d..=n {
                        counts[k] = counts[k].saturating_add(counts[k - d]);
                    }
                }
            }
        }
        Mode::Associative => {
            for k in 1..=n {
                let mut c = 0u64;
                for i in 0..alg.ngens() {
                    let d = alg.generators().degree(i) as usize;
                    if d <= k {
                        c = c.saturating_add(counts[k - d]);
                    }
                }
                counts[k] = c;
            }
        }
    }
    counts
}

impl TruncatedAlgebra {
    pub fn build(pres: &Presentation, bound: u32) -> Result<Self, TruncError> {
        Self::build_with_ceiling(pres, bound, DEFAULT_MONOMIAL_CEILING)
    }

    pub fn build_with_ceiling(
        pres: &Presentation,
        bound: u32,
        ceiling: u64,
    ) -> Result<Self, TruncError> {
        if bound == 0 {
            return Err(TruncError::ZeroBound);
        }
        let alg = &pres.algebra;
        let field = alg.field();
        let counts = monomial_counts(alg, bound);
        if let Some((n, &c)) = counts.iter().enumerate().find(|(_, &c)| c > ceiling) {
            return Err(TruncError::ResourceLimit {
                degree: n as u32,
                count: c,
                ceiling,
            });
        }
        let mut rels_by_degree: HashMap<u32, Vec<&Polynomial>> = HashMap::new();
        for r in &pres.relations {
            if let PolyDegree::Homogeneous(d) = r.degree() {
                rels_by_degree.entry(d).or_default().push(r);
            }
        }

        let mut comps: Vec<Component> = Vec::with_capacity(bound as usize + 1);
        // relation rows of each degree, as sparse (monomial, coefficient) lists
        let mut kernels: Vec<Vec<Vec<(Monomial, u32)>>> = Vec::with_capacity(bound as usize + 1);
        for n in 0..=bound {
            let monomials = alg.monomials_of_degree(n);
            let len = monomials.len();
            let index: HashMap<Monomial, usize> = monomials
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, m)| (m, i))
                .collect();
            // descending column order: column j holds monomial len - 1 - j
            let col = |i: usize| len - 1 - i;
            let mut echelon = EchelonBasis::new(field, len);
            let push_row = |row: &[(Monomial, u32)], echelon: &mut EchelonBasis| {
                let mut v = vec![0u32; len];
                for (m, c) in row {
                    let j = col(index[m]);
                    v[j] = field.add(v[j], *c);
                }
                echelon.insert(&v);
            };
            for r in rels_by_degree.get(&n).into_iter().flatten() {
                let row: Vec<(Monomial, u32)> = r.terms().map(|(m, c)| (m.clone(), c)).collect();
                push_row(&row, &mut echelon);
            }
            for i in 0..alg.ngens() {
                let d = alg.generators().degree(i);
                if d > n {
                    continue;
                }
                let g = alg.generator(i);
                for krow in &kernels[(n - d) as usize] {
                    if echelon.is_full() {
                        break;
                    }
                    let left = multiply_row(alg, &g, krow, true)?;
                    push_row(&left, &mut echelon);
                    if alg.mode() == Mode::Associative {
                        let right = multiply_row(alg, &g, krow, false)?;
                        push_row(&right, &mut echelon);
                    }
                }
            }
            let span = echelon_rows(&echelon, field, len);
            let (rref, pivots) = span.rref();
            let mut is_pivot = vec![false; len];
            for &p in &pivots {
                is_pivot[p] = true;
            }
            // basis: non-pivot columns, listed in ascending monomial order
            let basis: Vec<usize> = (0..len).filter(|&i| !is_pivot[col(i)]).collect();
            let basis_pos: HashMap<usize, usize> =
                basis.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let mut nf = vec![Vec::new(); len];
            for &i in &basis {
                let mut v = vec![0; basis.len()];
                v[basis_pos[&i]] = 1;
                nf[i] = v;
            }
            let mut krows = Vec::with_capacity(pivots.len());
            for (r, &pc) in pivots.iter().enumerate() {
                let m_idx = col(pc);
                let row = rref.row(r);
                // m + sum row[j] m_j = 0 on the quotient
                let mut v = vec![0; basis.len()];
                let mut sparse = vec![(monomials[m_idx].clone(), 1u32)];
                for (j, &c) in row.iter().enumerate() {
                    if c != 0 && j != pc {
                        let mi = col(j);
                        v[basis_pos[&mi]] = field.neg(c);
                        sparse.push((monomials[mi].clone(), c));
                    }
                }
                nf[m_idx] = v;
                krows.push(sparse);
            }
            kernels.push(krows);
            let mut decomposable = EchelonBasis::new(field, basis.len());
            for (i, m) in monomials.iter().enumerate() {
                if m.length() >= 2 && !decomposable.is_full() {
                    decomposable.insert(&nf[i]);
                }
            }
            comps.push(Component {
                monomials,
                index,
                basis,
                nf,
                decomposable,
            });
        }

        let filtration = filtration_from(&comps, field, bound);
        let slots = (bound as usize + 1) * (bound as usize + 1);
        Ok(TruncatedAlgebra {
            presentation: pres.clone(),
            bound,
            comps,
            filtration,
            tables: (0..slots).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn algebra(&self) -> &FreeAlgebra {
        &self.presentation.algebra
    }

    pub fn field(&self) -> PrimeField {
        self.presentation.algebra.field()
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    fn comp(&self, n: u32) -> Result<&Component, TruncError> {
        self.comps.get(n as usize).ok_or(TruncError::BoundExceeded {
            degree: n,
            bound: self.bound,
        })
    }

    pub fn dim(&self, n: u32) -> Result<usize, TruncError> {
        Ok(self.comp(n)?.dim())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.comps.iter().map(|c| c.dim()).collect()
    }

    pub fn series(&self) -> TruncatedSeries {
        TruncatedSeries::from_dims(&self.dims())
    }

    /// Basis monomials of `A_n`, ascending.
    pub fn component_basis(&self, n: u32) -> Result<Vec<&Monomial>, TruncError> {
        let c = self.comp(n)?;
        Ok(c.basis.iter().map(|&i| &c.monomials[i]).collect())
    }

    /// `dim (I^c)` summed over degrees `1..=D`, for `c = 1..=D`.
    pub fn filtration_dims(&self) -> &[usize] {
        &self.filtration
    }

    pub fn nf_monomial(&self, m: &Monomial) -> Result<Element, TruncError> {
        let c = self.comp(m.degree())?;
        let i = *c.index.get(m).ok_or_else(|| {
            PresentError::Invalid("monomial does not belong to this algebra".into())
        })?;
        Ok(Element {
            degree: m.degree(),
            coords: c.nf[i].clone(),
        })
    }

    /// Normal forms of the homogeneous components, keyed by degree.
    pub fn normal_form(&self, w: &Polynomial) -> Result<Vec<Element>, TruncError> {
        let f = self.field();
        let mut out: Vec<Element> = Vec::new();
        for (d, part) in w.homogeneous_components() {
            let c = self.comp(d)?;
            let mut v = vec![0; c.dim()];
            for (m, coef) in part.terms() {
                let i = *c.index.get(m).ok_or_else(|| {
                    PresentError::Invalid("monomial does not belong to this algebra".into())
                })?;
                f.axpy(&mut v, coef, &c.nf[i]);
            }
            out.push(Element {
                degree: d,
                coords: v,
            });
        }
        Ok(out)
    }

    /// The element represented by a homogeneous polynomial of degree `n`.
    pub fn element(&self, w: &Polynomial, n: u32) -> Result<Element, TruncError> {
        match w.degree() {
            PolyDegree::Zero => Ok(Element::zero(n, self.dim(n)?)),
            PolyDegree::Homogeneous(d) if d == n => Ok(self.normal_form(w)?.remove(0)),
            _ => Err(TruncError::Inhomogeneous),
        }
    }

    pub fn is_zero(&self, w: &Polynomial) -> Result<bool, TruncError> {
        Ok(self.normal_form(w)?.iter().all(|e| e.is_zero()))
    }

    pub fn to_polynomial(&self, e: &Element) -> Result<Polynomial, TruncError> {
        let c = self.comp(e.degree)?;
        let mut p = Polynomial::zero();
        for (k, &i) in c.basis.iter().enumerate() {
            self.algebra()
                .add_term(&mut p, c.monomials[i].clone(), e.coords[k]);
        }
        Ok(p)
    }

    fn table(&self, i: u32, j: u32) -> Result<&Vec<Vec<u32>>, TruncError> {
        let slot = i as usize * (self.bound as usize + 1) + j as usize;
        if let Some(t) = self.tables[slot].get() {
            return Ok(t);
        }
        let (ci, cj) = (self.comp(i)?, self.comp(j)?);
        let ck = self.comp(i + j)?;
        let alg = self.algebra();
        let f = self.field();
        let mut t = Vec::with_capacity(ci.dim() * cj.dim());
        for &u in &ci.basis {
            for &v in &cj.basis {
                let mut row = vec![0; ck.dim()];
                if let Some((s, w)) = alg.multiply(&ci.monomials[u], &cj.monomials[v])? {
                    f.axpy(&mut row, s, &ck.nf[ck.index[&w]]);
                }
                t.push(row);
            }
        }
        Ok(self.tables[slot].get_or_init(|| t))
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element, TruncError> {
        let deg = a.degree + b.degree;
        let dim = self.dim(deg)?;
        let f = self.field();
        let t = self.table(a.degree, b.degree)?;
        let nb = b.coords.len();
        let mut out = vec![0; dim];
        for (i, &x) in a.coords.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coords.iter().enumerate() {
                if y != 0 {
                    f.axpy(&mut out, f.mul(x, y), &t[i * nb + j]);
                }
            }
        }
        Ok(Element {
            degree: deg,
            coords: out,
        })
    }

    pub fn one(&self) -> Element {
        Element {
            degree: 0,
            coords: vec![1],
        }
    }

    /// Image of a homogeneous polynomial over another algebra's generators,
    /// with generator `i` sent to `images[i]`.
    pub fn evaluate(&self, w: &Polynomial, images: &[Element]) -> Result<Vec<Element>, TruncError> {
        let f = self.field();
        let mut powers: HashMap<(usize, u32), Element> = HashMap::new();
        let mut acc: Vec<Element> = Vec::new();
        for (m, c) in w.terms() {
            let mut value = self.one();
            let letters = m.letters();
            let mut k = 0;
            // group consecutive equal letters into powers
            while k < letters.len() {
                let g = letters[k];
                let mut run = 1;
                while k + run < letters.len() && letters[k + run] == g {
                    run += 1;
                }
                let p = self.power(&images[g], g, run as u32, &mut powers)?;
                value = self.mul(&value, &p)?;
                k += run;
            }
            match acc.iter_mut().find(|e| e.degree == value.degree) {
                Some(e) => f.axpy(&mut e.coords, c, &value.coords),
                None => {
                    let mut e = Element::zero(value.degree, value.coords.len());
                    f.axpy(&mut e.coords, c, &value.coords);
                    acc.push(e);
                }
            }
        }
        Ok(acc)
    }

    fn power(
        &self,
        base: &Element,
        g: usize,
        k: u32,
        cache: &mut HashMap<(usize, u32), Element>,
    ) -> Result<Element, TruncError> {
        if let Some(e) = cache.get(&(g, k)) {
            return Ok(e.clone());
        }
        let e = if k == 1 {
            base.clone()
        } else {
            let prev = self.power(base, g, k - 1, cache)?;
            self.mul(&prev, base)?
        };
        cache.insert((g, k), e.clone());
        Ok(e)
    }

    /// Whether the homogeneous elements generate the algebra: in each degree up
    /// to the largest generator degree, they span `A_n` modulo decomposables.
    pub fn generates(&self, imgs: &[Element]) -> Result<bool, TruncError> {
        let top = self.presentation.generators().max_degree();
        for n in 1..=top {
            let c = self.comp(n)?;
            let mut span = c.decomposable.clone();
            for e in imgs.iter().filter(|e| e.degree == n) {
                if e.coords.len() != c.dim() {
                    return Err(TruncError::Inhomogeneous);
                }
                span.insert(&e.coords);
            }
            if !span.is_full() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Dimension of the decomposable part `(I^2)_n`.
    pub fn decomposable_dim(&self, n: u32) -> Result<usize, TruncError> {
        Ok(self.comp(n)?.decomposable.rank())
    }
}

fn multiply_row(
    alg: &FreeAlgebra,
    g: &Monomial,
    row: &[(Monomial, u32)],
    left: bool,
) -> Result<Vec<(Monomial, u32)>, TruncError> {
    let f = alg.field();
    let mut out = Vec::with_capacity(row.len());
    for (m, c) in row {
        let prod = if left {
            alg.multiply(g, m)?
        } else {
            alg.multiply(m, g)?
        };
        if let Some((s, w)) = prod {
            out.push((w, f.mul(s, *c)));
        }
    }
    Ok(out)
}

fn echelon_rows(e: &EchelonBasis, field: PrimeField, len: usize) -> Matrix {
    let rows = e.rows().to_vec();
    Matrix::from_rows(field, len, &rows).expect("rows have the ambient length")
}

fn filtration_from(comps: &[Component], field: PrimeField, bound: u32) -> Vec<usize> {
    let mut totals = vec![0usize; bound as usize + 1];
    for comp in comps.iter().skip(1) {
        let max_len = comp.monomials.iter().map(|m| m.length()).max().unwrap_or(0) as usize;
        let mut by_len: Vec<Vec<usize>> = vec![Vec::new(); max_len + 1];
        for (i, m) in comp.monomials.iter().enumerate() {
            by_len[m.length() as usize].push(i);
        }
        let mut span = EchelonBasis::new(field, comp.dim());
        // ranks for c = max_len down to 1
        let mut rank_at = vec![0usize; max_len + 2];
        for c in (1..=max_len).rev() {
            for &i in &by_len[c] {
                if !span.is_full() {
                    span.insert(&comp.nf[i]);
                }
            }
            rank_at[c] = span.rank();
        }
        for (c, total) in totals.iter_mut().enumerate().skip(1) {
            if c <= max_len {
                *total += rank_at[c];
            }
        }
    }
    totals.into_iter().skip(1).collect()
}
