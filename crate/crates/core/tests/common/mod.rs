#![allow(dead_code)]

use std::path::PathBuf;

use gradiso::present::{FreeAlgebra, Generator, GeneratorSet, Mode, Polynomial, Presentation};
use gradiso::PrimeField;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn load(dir: &str, file: &str) -> Presentation {
    let text = std::fs::read_to_string(fixture_dir(dir).join(file)).unwrap();
    Presentation::parse(&text).unwrap()
}

pub fn all_fixtures() -> Vec<(String, Presentation)> {
    let mut out = Vec::new();
    let dir = fixture_dir("orders_dividing_8");
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for n in names {
        let p = load("orders_dividing_8", &n);
        out.push((n, p));
    }
    out
}

pub fn free_algebra(p: u32, mode: Mode, degrees: &[u32]) -> FreeAlgebra {
    let names = ["x", "y", "z", "u", "v", "w"];
    let gens = degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| Generator {
            name: names[i].to_string(),
            degree: d,
        })
        .collect();
    FreeAlgebra::new(
        PrimeField::new(p).unwrap(),
        mode,
        GeneratorSet::new(gens).unwrap(),
    )
}

/// Random homogeneous polynomial of degree `n`, possibly zero.
pub fn random_homogeneous<R: Rng>(alg: &FreeAlgebra, n: u32, rng: &mut R) -> Polynomial {
    let p = alg.characteristic();
    let mut out = Polynomial::zero();
    for m in alg.monomials_of_degree(n) {
        if rng.gen_bool(0.5) {
            alg.add_term(&mut out, m, rng.gen_range(1..p));
        }
    }
    out
}

/// Small commutative presentation: p in {2,3}, at most 3 generators of degree
/// at most 2, at most 2 relations of degree at most 4.
pub fn random_presentation<R: Rng>(rng: &mut R, name: &str) -> Presentation {
    let p = if rng.gen_bool(0.5) { 2 } else { 3 };
    random_presentation_in(rng, name, p)
}

pub fn random_presentation_in<R: Rng>(rng: &mut R, name: &str, p: u32) -> Presentation {
    let ngens = rng.gen_range(1..=3);
    let degrees: Vec<u32> = (0..ngens).map(|_| rng.gen_range(1..=2)).collect();
    let alg = free_algebra(p, Mode::Commutative, &degrees);
    let nrels = rng.gen_range(0..=2);
    let mut rels = Vec::new();
    for _ in 0..nrels {
        let d = rng.gen_range(1..=4);
        let r = random_homogeneous(&alg, d, rng);
        if !r.is_zero() {
            rels.push(r);
        }
    }
    Presentation::new(name, alg, rels).unwrap()
}

/// `f(images)` computed in the free algebra.
pub fn substitute(alg: &FreeAlgebra, f: &Polynomial, images: &[Polynomial]) -> Polynomial {
    let mut out = Polynomial::zero();
    for (m, c) in f.terms() {
        let mut prod = alg.constant(1);
        for i in m.letters() {
            prod = alg.mul(&prod, &images[i]).unwrap();
        }
        out = alg.add(&out, &alg.scale(&prod, c));
    }
    out
}

fn invertible_matrix<R: Rng>(n: usize, p: u32, rng: &mut R) -> Vec<Vec<u32>> {
    let field = PrimeField::new(p).unwrap();
    loop {
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(0..p)).collect())
            .collect();
        let m = gradiso::Matrix::from_rows(field, n, &rows).unwrap();
        if m.rank() == n {
            return rows;
        }
    }
}

/// A random graded automorphism of the free algebra: an invertible linear map
/// on the generators of each degree plus decomposable terms.
pub fn random_automorphism<R: Rng>(alg: &FreeAlgebra, rng: &mut R) -> Vec<Polynomial> {
    let p = alg.characteristic();
    let gens = alg.generators();
    let mut images = vec![Polynomial::zero(); gens.len()];
    for d in 1..=gens.max_degree() {
        let idx: Vec<usize> = (0..gens.len()).filter(|&i| gens.degree(i) == d).collect();
        if idx.is_empty() {
            continue;
        }
        let m = invertible_matrix(idx.len(), p, rng);
        for (r, &i) in idx.iter().enumerate() {
            let mut img = Polynomial::zero();
            for (c, &j) in idx.iter().enumerate() {
                if m[r][c] != 0 {
                    img = alg.add(&img, &alg.scale(&alg.gen_poly(j), m[r][c]));
                }
            }
            // decomposable part
            for mono in alg.monomials_of_degree(d) {
                if mono.length() >= 2 && rng.gen_bool(0.5) {
                    alg.add_term(&mut img, mono, rng.gen_range(1..p));
                }
            }
            images[i] = img;
        }
    }
    images
}

/// Same algebra with relations moved by a random automorphism and the
/// generator lines shuffled within the file.
pub fn disguise<R: Rng>(a: &Presentation, name: &str, rng: &mut R) -> Presentation {
    let alg = &a.algebra;
    let phi = random_automorphism(alg, rng);
    let rels: Vec<Polynomial> = a
        .relations
        .iter()
        .map(|r| substitute(alg, r, &phi))
        .collect();
    let moved = Presentation::new(name, alg.clone(), rels).unwrap();
    shuffle_generators(&moved, rng)
}

pub fn shuffle_generators<R: Rng>(a: &Presentation, rng: &mut R) -> Presentation {
    let text = a.serialize();
    let mut gens: Vec<&str> = text.lines().filter(|l| l.starts_with("gen ")).collect();
    gens.shuffle(rng);
    let mut out = String::new();
    let mut it = gens.into_iter();
    for l in text.lines() {
        if l.starts_with("gen ") {
            out.push_str(it.next().unwrap());
        } else {
            out.push_str(l);
        }
        out.push('\n');
    }
    Presentation::parse(&out).unwrap()
}

/// Perturbs one relation by a random term of the same degree.
pub fn perturb<R: Rng>(a: &Presentation, name: &str, rng: &mut R) -> Presentation {
    let alg = &a.algebra;
    let mut rels = a.relations.clone();
    if rels.is_empty() {
        let d = rng.gen_range(1..=4);
        rels.push(random_homogeneous(alg, d, rng));
    } else {
        let k = rng.gen_range(0..rels.len());
        let d = match rels[k].degree() {
            gradiso::present::PolyDegree::Homogeneous(d) => d,
            _ => unreachable!(),
        };
        let extra = random_homogeneous(alg, d, rng);
        rels[k] = alg.add(&rels[k], &extra);
    }
    Presentation::new(name, alg.clone(), rels).unwrap()
}

/// Same generators and relation degrees, fresh random coefficients.
pub fn reshape<R: Rng>(a: &Presentation, name: &str, rng: &mut R) -> Presentation {
    let alg = &a.algebra;
    let rels = a
        .relations
        .iter()
        .map(|r| random_homogeneous(alg, r.max_degree().unwrap(), rng))
        .collect();
    Presentation::new(name, alg.clone(), rels).unwrap()
}

/// Degree-1 generators and low-degree relations: pairs of these often share
/// every numerical invariant.
pub fn random_linear_presentation<R: Rng>(rng: &mut R, name: &str) -> Presentation {
    let p = if rng.gen_bool(0.5) { 2 } else { 3 };
    let ngens = rng.gen_range(2..=3);
    let alg = free_algebra(p, Mode::Commutative, &vec![1; ngens]);
    let nrels = rng.gen_range(1..=2);
    let rels = (0..nrels)
        .map(|_| {
            let d = rng.gen_range(2..=3);
            random_homogeneous(&alg, d, rng)
        })
        .collect();
    Presentation::new(name, alg, rels).unwrap()
}
