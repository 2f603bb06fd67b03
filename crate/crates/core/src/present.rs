//! Generators, monomials, polynomials and finite graded presentations.
//!
//! Two modes are supported. In graded-commutative mode a monomial is an
//! exponent vector over the generators in their canonical order, and products
//! pick up the Koszul sign `(-1)^{|x||y|}` for every swap of two odd-degree
//! letters. At odd characteristic odd-degree generators square to zero; at
//! characteristic 2 graded commutativity is plain commutativity. In
//! associative mode a monomial is a word and products concatenate.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::gfp::PrimeField;
use crate::hilbert::RationalSeries;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Commutative,
    Associative,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Commutative => f.write_str("commutative"),
            Mode::Associative => f.write_str("associative"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("mode mismatch: cannot combine {0} and {1} monomials")]
    ModeMismatch(Mode, Mode),
    #[error("{0}")]
    Invalid(String),
}

fn syntax(line: usize, message: impl Into<String>) -> PresentError {
    PresentError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// Generators in canonical order: by degree, ties broken by input position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    gens: Vec<Generator>,
}

impl GeneratorSet {
    pub fn new(input: Vec<Generator>) -> Result<Self, PresentError> {
        let mut seen = HashSet::new();
        for g in &input {
            if g.degree == 0 {
                return Err(PresentError::Invalid(format!(
                    "generator {} has degree 0; degrees must be positive",
                    g.name
                )));
            }
            if !seen.insert(g.name.clone()) {
                return Err(PresentError::Invalid(format!(
                    "duplicate generator {}",
                    g.name
                )));
            }
        }
        let mut gens = input;
        // stable: equal degrees keep input order
        gens.sort_by_key(|g| g.degree);
        if gens.len() > u16::MAX as usize {
            return Err(PresentError::Invalid("too many generators".into()));
        }
        Ok(GeneratorSet { gens })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.gens[i].degree
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.gens.iter().map(|g| g.degree).collect()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.gens[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Generator> {
        self.gens.iter()
    }

    pub fn max_degree(&self) -> u32 {
        self.gens.iter().map(|g| g.degree).max().unwrap_or(0)
    }
}

/// A monomial with its (weighted) degree cached.
///
/// The ordering is the canonical one used throughout: degree first, then
/// reverse lexicographic on exponent vectors (commutative) or lexicographic on
/// words (associative), with the first generator the largest letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Monomial {
    Commutative { degree: u32, exponents: Vec<u16> },
    Associative { degree: u32, word: Vec<u16> },
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        match self {
            Monomial::Commutative { degree, .. } | Monomial::Associative { degree, .. } => *degree,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Monomial::Commutative { .. } => Mode::Commutative,
            Monomial::Associative { .. } => Mode::Associative,
        }
    }

    /// Number of generator letters, counted with multiplicity.
    pub fn length(&self) -> u32 {
        match self {
            Monomial::Commutative { exponents, .. } => exponents.iter().map(|&e| e as u32).sum(),
            Monomial::Associative { word, .. } => word.len() as u32,
        }
    }

    pub fn is_one(&self) -> bool {
        self.degree() == 0
    }

    pub fn exponents(&self) -> Option<&[u16]> {
        match self {
            Monomial::Commutative { exponents, .. } => Some(exponents),
            Monomial::Associative { .. } => None,
        }
    }

    pub fn word(&self) -> Option<&[u16]> {
        match self {
            Monomial::Associative { word, .. } => Some(word),
            Monomial::Commutative { .. } => None,
        }
    }

    /// Generator indices in product order: canonical order for exponent
    /// vectors, letter order for words.
    pub fn letters(&self) -> Vec<usize> {
        match self {
            Monomial::Commutative { exponents, .. } => exponents
                .iter()
                .enumerate()
                .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
                .collect(),
            Monomial::Associative { word, .. } => word.iter().map(|&i| i as usize).collect(),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        match (self, other) {
            (
                Monomial::Commutative { exponents: a, .. },
                Monomial::Commutative { exponents: b, .. },
            ) => {
                for (x, y) in a.iter().zip(b).rev() {
                    if x != y {
                        // the smaller exponent in the last differing slot is the larger monomial
                        return y.cmp(x);
                    }
                }
                a.len().cmp(&b.len())
            }
            (Monomial::Associative { word: a, .. }, Monomial::Associative { word: b, .. }) => {
                for (x, y) in a.iter().zip(b) {
                    if x != y {
                        return y.cmp(x);
                    }
                }
                b.len().cmp(&a.len())
            }
            (Monomial::Commutative { .. }, Monomial::Associative { .. }) => Ordering::Less,
            (Monomial::Associative { .. }, Monomial::Commutative { .. }) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `PolyDegree::Homogeneous(n)` when every term has degree `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyDegree {
    Zero,
    Homogeneous(u32),
    Inhomogeneous,
}

/// Finite GF(p)-linear combination of monomials; zero coefficients are never
/// stored. Coefficients are residues; arithmetic goes through [`FreeAlgebra`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, u32>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn term(m: Monomial, c: u32) -> Self {
        let mut p = Polynomial::zero();
        if c != 0 {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, u32)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    pub fn degree(&self) -> PolyDegree {
        let mut it = self.terms.keys().map(|m| m.degree());
        let Some(first) = it.next() else {
            return PolyDegree::Zero;
        };
        if it.all(|d| d == first) {
            PolyDegree::Homogeneous(first)
        } else {
            PolyDegree::Inhomogeneous
        }
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn homogeneous_components(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, &c) in &self.terms {
            out.entry(m.degree())
                .or_default()
                .terms
                .insert(m.clone(), c);
        }
        out
    }

    fn add_term(&mut self, field: &PrimeField, m: Monomial, c: u32) {
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = field.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }
}

/// The free graded(-commutative) algebra on a generator set over GF(p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeAlgebra {
    field: PrimeField,
    mode: Mode,
    gens: GeneratorSet,
}

impl FreeAlgebra {
    pub fn new(field: PrimeField, mode: Mode, gens: GeneratorSet) -> Self {
        FreeAlgebra { field, mode, gens }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn characteristic(&self) -> u32 {
        self.field.characteristic()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    /// True for odd-degree generators at odd characteristic: they anticommute
    /// and square to zero.
    pub fn is_exterior(&self, i: usize) -> bool {
        self.field.characteristic() != 2 && self.gens.degree(i) % 2 == 1
    }

    pub fn one(&self) -> Monomial {
        match self.mode {
            Mode::Commutative => Monomial::Commutative {
                degree: 0,
                exponents: vec![0; self.gens.len()],
            },
            Mode::Associative => Monomial::Associative {
                degree: 0,
                word: Vec::new(),
            },
        }
    }

    pub fn generator(&self, i: usize) -> Monomial {
        let degree = self.gens.degree(i);
        match self.mode {
            Mode::Commutative => {
                let mut exponents = vec![0; self.gens.len()];
                exponents[i] = 1;
                Monomial::Commutative { degree, exponents }
            }
            Mode::Associative => Monomial::Associative {
                degree,
                word: vec![i as u16],
            },
        }
    }

    pub fn monomial_from_exponents(&self, exponents: Vec<u16>) -> Monomial {
        let degree = exponents
            .iter()
            .enumerate()
            .map(|(i, &e)| e as u32 * self.gens.degree(i))
            .sum();
        Monomial::Commutative { degree, exponents }
    }

    pub fn monomial_from_word(&self, word: Vec<u16>) -> Monomial {
        let degree = word.iter().map(|&i| self.gens.degree(i as usize)).sum();
        Monomial::Associative { degree, word }
    }

    /// Product `u * v`: `Ok(None)` when it vanishes (exterior square),
    /// otherwise the sign residue and the canonical monomial.
    pub fn multiply(
        &self,
        u: &Monomial,
        v: &Monomial,
    ) -> Result<Option<(u32, Monomial)>, PresentError> {
        match (u, v) {
            (
                Monomial::Commutative {
                    degree: du,
                    exponents: a,
                },
                Monomial::Commutative {
                    degree: dv,
                    exponents: b,
                },
            ) if self.mode == Mode::Commutative => {
                let odd_p = self.field.characteristic() != 2;
                let mut swaps = 0u32;
                let mut odd_seen_in_v = 0u32;
                let mut exponents = Vec::with_capacity(a.len());
                for i in 0..a.len() {
                    let e = a[i] + b[i];
                    if odd_p && self.gens.degree(i) % 2 == 1 {
                        if e >= 2 {
                            return Ok(None);
                        }
                        // letters of v with smaller index that are odd must pass a's letter i
                        swaps += a[i] as u32 * odd_seen_in_v;
                        odd_seen_in_v += b[i] as u32;
                    }
                    exponents.push(e);
                }
                Ok(Some((
                    self.field.sign(swaps),
                    Monomial::Commutative {
                        degree: du + dv,
                        exponents,
                    },
                )))
            }
            (
                Monomial::Associative {
                    degree: du,
                    word: a,
                },
                Monomial::Associative {
                    degree: dv,
                    word: b,
                },
            ) if self.mode == Mode::Associative => {
                let mut word = a.clone();
                word.extend_from_slice(b);
                Ok(Some((
                    1,
                    Monomial::Associative {
                        degree: du + dv,
                        word,
                    },
                )))
            }
            _ => {
                let other = if u.mode() != self.mode {
                    u.mode()
                } else {
                    v.mode()
                };
                Err(PresentError::ModeMismatch(self.mode, other))
            }
        }
    }

    /// All canonical monomials of degree `n`, in ascending canonical order.
    pub fn monomials_of_degree(&self, n: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        match self.mode {
            Mode::Commutative => {
                let mut exps = vec![0u16; self.gens.len()];
                self.fill_exponents(0, n, &mut exps, &mut out);
            }
            Mode::Associative => {
                let mut word = Vec::new();
                self.fill_words(n, &mut word, &mut out);
            }
        }
        out.sort();
        out
    }

    fn fill_exponents(
        &self,
        i: usize,
        remaining: u32,
        exps: &mut Vec<u16>,
        out: &mut Vec<Monomial>,
    ) {
        if i == exps.len() {
            if remaining == 0 {
                out.push(self.monomial_from_exponents(exps.clone()));
            }
            return;
        }
        let d = self.gens.degree(i);
        let cap = if self.is_exterior(i) {
            1
        } else {
            remaining / d
        };
        for e in 0..=cap.min(remaining / d) {
            exps[i] = e as u16;
            self.fill_exponents(i + 1, remaining - e * d, exps, out);
        }
        exps[i] = 0;
    }

    fn fill_words(&self, remaining: u32, word: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            out.push(self.monomial_from_word(word.clone()));
            return;
        }
        for i in 0..self.gens.len() {
            let d = self.gens.degree(i);
            if d <= remaining {
                word.push(i as u16);
                self.fill_words(remaining - d, word, out);
                word.pop();
            }
        }
    }

    pub fn constant(&self, c: i64) -> Polynomial {
        Polynomial::term(self.one(), self.field.reduce(c))
    }

    pub fn gen_poly(&self, i: usize) -> Polynomial {
        Polynomial::term(self.generator(i), 1)
    }

    pub fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        let mut out = a.clone();
        for (m, &c) in &b.terms {
            out.add_term(&self.field, m.clone(), c);
        }
        out
    }

    pub fn sub(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        let mut out = a.clone();
        for (m, &c) in &b.terms {
            out.add_term(&self.field, m.clone(), self.field.neg(c));
        }
        out
    }

    pub fn scale(&self, a: &Polynomial, c: u32) -> Polynomial {
        let c = c % self.field.characteristic();
        if c == 0 {
            return Polynomial::zero();
        }
        Polynomial {
            terms: a
                .terms
                .iter()
                .map(|(m, &x)| (m.clone(), self.field.mul(x, c)))
                .collect(),
        }
    }

    pub fn mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PresentError> {
        let mut out = Polynomial::zero();
        for (u, &cu) in &a.terms {
            for (v, &cv) in &b.terms {
                if let Some((s, w)) = self.multiply(u, v)? {
                    out.add_term(&self.field, w, self.field.mul(s, self.field.mul(cu, cv)));
                }
            }
        }
        Ok(out)
    }

    /// Accumulates `c * m` into `p`, merging with an existing term.
    pub fn add_term(&self, p: &mut Polynomial, m: Monomial, c: u32) {
        p.add_term(&self.field, m, c % self.field.characteristic());
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        match m {
            Monomial::Commutative { exponents, .. } => {
                for (i, &e) in exponents.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => parts.push(self.gens.name(i).to_string()),
                        _ => parts.push(format!("{}^{}", self.gens.name(i), e)),
                    }
                }
            }
            Monomial::Associative { word, .. } => {
                let mut k = 0;
                while k < word.len() {
                    let mut run = 1;
                    while k + run < word.len() && word[k + run] == word[k] {
                        run += 1;
                    }
                    let name = self.gens.name(word[k] as usize);
                    if run == 1 {
                        parts.push(name.to_string());
                    } else {
                        parts.push(format!("{name}^{run}"));
                    }
                    k += run;
                }
            }
        }
        parts.join("*")
    }

    /// Renders a polynomial in the file grammar, leading term first.
    pub fn format_poly(&self, p: &Polynomial) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let terms: Vec<String> = p
            .terms
            .iter()
            .rev()
            .map(|(m, &c)| match (c, m.is_one()) {
                (_, true) => c.to_string(),
                (1, false) => self.format_monomial(m),
                _ => format!("{}*{}", c, self.format_monomial(m)),
            })
            .collect();
        terms.join(" + ")
    }

    /// Parses a polynomial over this algebra's generators.
    pub fn parse_poly(&self, text: &str) -> Result<Polynomial, String> {
        PolyParser::new(self, text).parse()
    }
}

struct PolyParser<'a> {
    alg: &'a FreeAlgebra,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> PolyParser<'a> {
    fn new(alg: &'a FreeAlgebra, text: &str) -> Self {
        PolyParser {
            alg,
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u64, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected a number at column {}", start + 1));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<u64>()
            .map_err(|_| format!("number {s} is too large"))
    }

    fn ident(&mut self) -> Result<String, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn parse(mut self) -> Result<Polynomial, String> {
        let alg = self.alg;
        let f = alg.field;
        let mut out = Polynomial::zero();
        let mut negate = false;
        if self.peek() == Some('-') {
            self.pos += 1;
            negate = true;
        } else if self.peek() == Some('+') {
            self.pos += 1;
        }
        loop {
            let (c, m) = self.term()?;
            if let Some(m) = m {
                let c = if negate { f.neg(c) } else { c };
                out.add_term(&f, m, c);
            }
            match self.peek() {
                None => break,
                Some('+') => {
                    self.pos += 1;
                    negate = false;
                }
                Some('-') => {
                    self.pos += 1;
                    negate = true;
                }
                Some(ch) => return Err(format!("unexpected '{ch}' at column {}", self.pos + 1)),
            }
        }
        Ok(out)
    }

    /// One product of factors. `None` when the product vanishes identically.
    fn term(&mut self) -> Result<(u32, Option<Monomial>), String> {
        let alg = self.alg;
        let f = alg.field;
        let mut coeff = 1u32;
        let mut mono = Some(alg.one());
        loop {
            match self.peek() {
                Some(ch) if ch.is_ascii_digit() => {
                    let n = self.number()?;
                    coeff = f.mul(coeff, (n % f.characteristic() as u64) as u32);
                }
                Some(ch) if ch.is_alphabetic() || ch == '_' => {
                    let name = self.ident()?;
                    let idx = alg
                        .gens
                        .index_of(&name)
                        .ok_or_else(|| format!("unknown generator '{name}'"))?;
                    let mut power = 1u64;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        power = self.number()?;
                    }
                    let g = alg.generator(idx);
                    for _ in 0..power {
                        let Some(cur) = mono.take() else { break };
                        match alg.multiply(&cur, &g).map_err(|e| e.to_string())? {
                            Some((s, next)) => {
                                coeff = f.mul(coeff, s);
                                mono = Some(next);
                            }
                            None => mono = None,
                        }
                    }
                }
                Some(ch) => return Err(format!("unexpected '{ch}' at column {}", self.pos + 1)),
                None => return Err("expected a term".into()),
            }
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        if coeff == 0 {
            mono = None;
        }
        Ok((coeff, mono))
    }
}

/// A finite graded presentation `<generators | relations>` plus optional data
/// carried through from the input file.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub name: String,
    pub algebra: FreeAlgebra,
    pub relations: Vec<Polynomial>,
    pub nilradical: Vec<Polynomial>,
    pub series: Option<RationalSeries>,
    pub meta: Vec<(String, String)>,
}

impl Presentation {
    /// Validates relations: homogeneous, positive degree, zero relations dropped.
    pub fn new(
        name: impl Into<String>,
        algebra: FreeAlgebra,
        relations: Vec<Polynomial>,
    ) -> Result<Self, PresentError> {
        let relations = relations
            .into_iter()
            .filter(|r| !r.is_zero())
            .map(|r| match r.degree() {
                PolyDegree::Homogeneous(0) => Err(PresentError::Invalid(
                    "relation of degree 0 would kill the unit".into(),
                )),
                PolyDegree::Inhomogeneous => {
                    Err(PresentError::Invalid("relation is not homogeneous".into()))
                }
                _ => Ok(r),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Presentation {
            name: name.into(),
            algebra,
            relations,
            nilradical: Vec::new(),
            series: None,
            meta: Vec::new(),
        })
    }

    pub fn parse(text: &str) -> Result<Self, PresentError> {
        parse(text)
    }

    pub fn mode(&self) -> Mode {
        self.algebra.mode()
    }

    pub fn characteristic(&self) -> u32 {
        self.algebra.characteristic()
    }

    pub fn generators(&self) -> &GeneratorSet {
        self.algebra.generators()
    }

    pub fn max_relation_degree(&self) -> u32 {
        self.relations
            .iter()
            .filter_map(|r| r.max_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn serialize(&self) -> String {
        let alg = &self.algebra;
        let mut out = String::new();
        out.push_str(&format!("algebra {}\n", self.name));
        out.push_str(&format!("char {}\n", alg.characteristic()));
        out.push_str(&format!("mode {}\n", alg.mode()));
        for g in alg.generators().iter() {
            out.push_str(&format!("gen {} {}\n", g.name, g.degree));
        }
        for r in &self.relations {
            out.push_str(&format!("rel {}\n", alg.format_poly(r)));
        }
        for r in &self.nilradical {
            out.push_str(&format!("nilradical {}\n", alg.format_poly(r)));
        }
        if let Some(s) = &self.series {
            out.push_str(&format!("series {s}\n"));
        }
        for (k, v) in &self.meta {
            out.push_str(&format!("meta {k} {v}\n"));
        }
        out
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses the line-oriented presentation format.
pub fn parse(text: &str) -> Result<Presentation, PresentError> {
    let mut name = None;
    let mut characteristic: Option<(usize, u32)> = None;
    let mut mode = None;
    let mut gens = Vec::new();
    let mut rels = Vec::new();
    let mut nils = Vec::new();
    let mut series = None;
    let mut meta = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        match keyword {
            "algebra" => {
                if name.is_some() {
                    return Err(syntax(lineno, "duplicate 'algebra' line"));
                }
                if !is_identifier(rest) {
                    return Err(syntax(lineno, format!("invalid algebra name '{rest}'")));
                }
                name = Some(rest.to_string());
            }
            "char" => {
                if characteristic.is_some() {
                    return Err(syntax(lineno, "duplicate 'char' line"));
                }
                let p: u32 = rest
                    .parse()
                    .map_err(|_| syntax(lineno, format!("invalid characteristic '{rest}'")))?;
                characteristic = Some((lineno, p));
            }
            "mode" => {
                if mode.is_some() {
                    return Err(syntax(lineno, "duplicate 'mode' line"));
                }
                mode = Some(match rest {
                    "commutative" => Mode::Commutative,
                    "associative" => Mode::Associative,
                    _ => return Err(syntax(lineno, format!("unknown mode '{rest}'"))),
                });
            }
            "gen" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 || !is_identifier(parts[0]) {
                    return Err(syntax(lineno, "expected 'gen <identifier> <degree>'"));
                }
                let degree: u32 = parts[1]
                    .parse()
                    .map_err(|_| syntax(lineno, format!("invalid degree '{}'", parts[1])))?;
                if degree == 0 {
                    return Err(syntax(
                        lineno,
                        format!(
                            "generator {} has degree 0; degrees must be positive",
                            parts[0]
                        ),
                    ));
                }
                if gens
                    .iter()
                    .any(|(_, g): &(usize, Generator)| g.name == parts[0])
                {
                    return Err(syntax(lineno, format!("duplicate generator {}", parts[0])));
                }
                gens.push((
                    lineno,
                    Generator {
                        name: parts[0].to_string(),
                        degree,
                    },
                ));
            }
            "rel" => rels.push((lineno, rest.to_string())),
            "nilradical" => nils.push((lineno, rest.to_string())),
            "series" => {
                if series.is_some() {
                    return Err(syntax(lineno, "duplicate 'series' line"));
                }
                series =
                    Some(RationalSeries::parse(rest).map_err(|e| syntax(lineno, e.to_string()))?);
            }
            "meta" => {
                let (k, v) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| syntax(lineno, "expected 'meta <key> <value>'"))?;
                meta.push((k.to_string(), v.trim().to_string()));
            }
            other => return Err(syntax(lineno, format!("unknown keyword '{other}'"))),
        }
    }

    let name = name.ok_or_else(|| syntax(0, "missing 'algebra' line"))?;
    let (pline, p) = characteristic.ok_or_else(|| syntax(0, "missing 'char' line"))?;
    let field = PrimeField::new(p).map_err(|e| syntax(pline, e.to_string()))?;
    let mode = mode.ok_or_else(|| syntax(0, "missing 'mode' line"))?;
    if gens.is_empty() {
        return Err(syntax(0, "at least one 'gen' line is required"));
    }
    let gens = GeneratorSet::new(gens.into_iter().map(|(_, g)| g).collect())?;
    let algebra = FreeAlgebra::new(field, mode, gens);

    let mut relations = Vec::new();
    for (lineno, text) in rels {
        let r = algebra.parse_poly(&text).map_err(|e| syntax(lineno, e))?;
        match r.degree() {
            PolyDegree::Zero => {}
            PolyDegree::Homogeneous(0) => {
                return Err(syntax(lineno, "relation of degree 0 would kill the unit"));
            }
            PolyDegree::Homogeneous(_) => relations.push(r),
            PolyDegree::Inhomogeneous => {
                let degs: Vec<String> = r
                    .homogeneous_components()
                    .keys()
                    .map(|d| d.to_string())
                    .collect();
                return Err(syntax(
                    lineno,
                    format!("relation is not homogeneous (degrees {})", degs.join(", ")),
                ));
            }
        }
    }
    let mut nilradical = Vec::new();
    for (lineno, text) in nils {
        let r = algebra.parse_poly(&text).map_err(|e| syntax(lineno, e))?;
        match r.degree() {
            PolyDegree::Zero => {}
            PolyDegree::Homogeneous(d) if d > 0 => nilradical.push(r),
            _ => {
                return Err(syntax(
                    lineno,
                    "nilradical generator must be homogeneous of positive degree",
                ))
            }
        }
    }

    Ok(Presentation {
        name,
        algebra,
        relations,
        nilradical,
        series,
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(p: u32, mode: Mode, gens: &[(&str, u32)]) -> FreeAlgebra {
        let gens = GeneratorSet::new(
            gens.iter()
                .map(|&(n, d)| Generator {
                    name: n.to_string(),
                    degree: d,
                })
                .collect(),
        )
        .unwrap();
        FreeAlgebra::new(PrimeField::new(p).unwrap(), mode, gens)
    }

    #[test]
    fn char2_square_is_nonzero() {
        let a = alg(2, Mode::Commutative, &[("x", 1)]);
        let x = a.generator(0);
        let (s, m) = a.multiply(&x, &x).unwrap().unwrap();
        assert_eq!(s, 1);
        assert_eq!(m.exponents().unwrap(), &[2]);
    }

    #[test]
    fn odd_letters_anticommute() {
        let a = alg(3, Mode::Commutative, &[("x", 1), ("y", 1)]);
        let (x, y) = (a.generator(0), a.generator(1));
        let (s, m) = a.multiply(&y, &x).unwrap().unwrap();
        assert_eq!(s, 2);
        assert_eq!(m.exponents().unwrap(), &[1, 1]);
        let (s, _) = a.multiply(&x, &y).unwrap().unwrap();
        assert_eq!(s, 1);
        assert!(a.multiply(&x, &x).unwrap().is_none());
    }

    #[test]
    fn even_letters_commute_at_odd_p() {
        let a = alg(3, Mode::Commutative, &[("x", 1), ("y", 2)]);
        let (x, y) = (a.generator(0), a.generator(1));
        assert_eq!(a.multiply(&y, &x).unwrap().unwrap().0, 1);
        assert!(a.multiply(&y, &y).unwrap().is_some());
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let c = alg(2, Mode::Commutative, &[("x", 1)]);
        let w = alg(2, Mode::Associative, &[("x", 1)]);
        assert!(matches!(
            c.multiply(&c.generator(0), &w.generator(0)),
            Err(PresentError::ModeMismatch(..))
        ));
    }

    #[test]
    fn monomials_of_degree_examples() {
        let a = alg(2, Mode::Commutative, &[("x", 1)]);
        let m = a.monomials_of_degree(3);
        assert_eq!(m.len(), 1);
        assert_eq!(a.format_monomial(&m[0]), "x^3");

        let a = alg(2, Mode::Commutative, &[("x", 1), ("y", 1)]);
        let names: Vec<String> = a
            .monomials_of_degree(2)
            .iter()
            .rev()
            .map(|m| a.format_monomial(m))
            .collect();
        assert_eq!(names, ["x^2", "x*y", "y^2"]);

        let a = alg(3, Mode::Commutative, &[("x", 1), ("y", 2)]);
        let names: Vec<String> = a
            .monomials_of_degree(3)
            .iter()
            .map(|m| a.format_monomial(m))
            .collect();
        assert_eq!(names, ["x*y"]);

        assert_eq!(a.monomials_of_degree(0), vec![a.one()]);
    }

    #[test]
    fn associative_words() {
        let a = alg(2, Mode::Associative, &[("x", 1), ("y", 1)]);
        assert_eq!(a.monomials_of_degree(3).len(), 8);
        let p = a.parse_poly("x*y + y*x").unwrap();
        assert_eq!(p.len(), 2);
        let q = a.parse_poly("x^2*y").unwrap();
        assert_eq!(a.format_poly(&q), "x^2*y");
    }

    #[test]
    fn degrevlex_order_on_degree_two() {
        // x^2 > xy > y^2 > w for x, y of degree 1 and w of degree 2
        let a = alg(2, Mode::Commutative, &[("x", 1), ("y", 1), ("w", 2)]);
        let names: Vec<String> = a
            .monomials_of_degree(2)
            .iter()
            .map(|m| a.format_monomial(m))
            .collect();
        assert_eq!(names, ["w", "y^2", "x*y", "x^2"]);
    }

    #[test]
    fn parse_minimal_file() {
        let p = parse("algebra C2\nchar 2\nmode commutative\ngen x 1\n").unwrap();
        assert_eq!(p.name, "C2");
        assert_eq!(p.generators().len(), 1);
        assert!(p.relations.is_empty());
    }

    #[test]
    fn parse_sorts_generators_by_degree() {
        let p = parse("algebra A\nchar 2\nmode commutative\ngen w 2\ngen x 1\ngen y 1\nrel x*y\n")
            .unwrap();
        let names: Vec<&str> = p.generators().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["x", "y", "w"]);
        assert_eq!(p.algebra.format_poly(&p.relations[0]), "x*y");
    }

    #[test]
    fn parse_rejects_degree_zero_generator() {
        let err = parse("algebra A\nchar 2\nmode commutative\ngen x 0\n").unwrap_err();
        assert!(matches!(err, PresentError::Syntax { line: 4, .. }), "{err}");
    }

    #[test]
    fn parse_rejects_inhomogeneous_relation() {
        let err = parse("algebra A\nchar 2\nmode commutative\ngen x 1\ngen y 2\nrel x^3 + y\n")
            .unwrap_err();
        match err {
            PresentError::Syntax { line, message } => {
                assert_eq!(line, 6);
                assert!(message.contains("homogeneous"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn parse_reduces_coefficients_and_drops_exterior_squares() {
        let p = parse("algebra A\nchar 3\nmode commutative\ngen x 1\ngen y 1\ngen z 2\nrel 4*x*y + 2*y*x + x^2\nrel 7*z^2\n")
            .unwrap();
        // yx = -xy, so 4xy + 2yx = 2xy; x^2 vanishes
        assert_eq!(p.algebra.format_poly(&p.relations[0]), "2*x*y");
        assert_eq!(p.algebra.format_poly(&p.relations[1]), "z^2");
    }

    #[test]
    fn parse_reports_unknown_generator_with_line() {
        let err = parse("algebra A\nchar 2\nmode commutative\ngen x 1\n\nrel x*q\n").unwrap_err();
        assert!(matches!(err, PresentError::Syntax { line: 6, .. }));
    }

    #[test]
    fn parse_rejects_bad_characteristic() {
        assert!(parse("algebra A\nchar 4\nmode commutative\ngen x 1\n").is_err());
    }

    #[test]
    fn serialize_round_trip_with_everything() {
        let text = "algebra Q\nchar 2\nmode commutative\ngen x 1\ngen y 1\ngen e 4\n\
                    rel x^2+x*y+y^2\nrel x^2*y+x*y^2\nnilradical x\nseries 1+2t+2t^2+t^3 / 1-t^4\nmeta smallgroup 8,4\n";
        let p = parse(text).unwrap();
        let again = parse(&p.serialize()).unwrap();
        assert_eq!(p, again);
        assert_eq!(again.meta("smallgroup"), Some("8,4"));
    }

    #[test]
    fn subtraction_and_comments() {
        let p = parse(
            "algebra A # name\nchar 5\nmode commutative\ngen x 2\ngen y 2\nrel x^2 - y^2 # diff\n",
        )
        .unwrap();
        assert_eq!(p.algebra.format_poly(&p.relations[0]), "x^2 + 4*y^2");
    }
}
