//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's linear algebra or enumeration code.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use splicemult::{ResolutionGraph, VertexId};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn load(name: &str) -> ResolutionGraph {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    ResolutionGraph::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn example1() -> ResolutionGraph {
    load("example1.json")
}

pub fn example2() -> ResolutionGraph {
    load("example2.json")
}

pub fn a2() -> ResolutionGraph {
    ResolutionGraph::chain(&[-2, -2]).unwrap()
}

/// `(-I)^{-1}` by plain Gauss-Jordan over the rationals.
pub fn oracle_duals(g: &ResolutionGraph) -> Vec<Vec<Q>> {
    let n = g.len();
    let ids = g.ids();
    let mut a: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        if i == j {
                            Q::from_integer(BigInt::from(-g.weight(ids[i]).unwrap()))
                        } else if g.has_edge(ids[i], ids[j]) {
                            -Q::one()
                        } else {
                            Q::zero()
                        }
                    } else if j - n == i {
                        Q::one()
                    } else {
                        Q::zero()
                    }
                })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("nonsingular");
        a.swap(c, p);
        let inv = Q::one() / a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// `|det I(E)|` as the reciprocal of `det B`.
pub fn oracle_det(g: &ResolutionGraph) -> BigInt {
    let b = oracle_duals(g);
    let n = b.len();
    let mut m = b;
    let mut det = Q::one();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero()).unwrap();
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det = &det * &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            let row = m[c].clone();
            for (x, y) in m[r].iter_mut().zip(row) {
                *x = &*x - &f * y;
            }
        }
    }
    let d = Q::one() / det;
    assert!(d.is_integer());
    d.to_integer()
}

/// `-(Σ a_i E_{ends_i}*) · g` for a dual-coordinate vector `g`.
fn pairing(b: &[Vec<Q>], ends: &[usize], a: &[u64], gen: &[BigInt]) -> Q {
    let mut acc = Q::zero();
    for (&i, &ai) in ends.iter().zip(a) {
        if ai == 0 {
            continue;
        }
        for (j, gj) in gen.iter().enumerate() {
            acc += &b[i][j] * Q::from_integer(gj * BigInt::from(ai));
        }
    }
    -acc
}

pub fn in_monoid(b: &[Vec<Q>], ends: &[usize], a: &[u64], gens: &[Vec<BigInt>]) -> bool {
    gens.iter().all(|g| pairing(b, ends, a, g).is_integer())
}

/// Smallest `k >= 1` with `k E_i*` pairing integrally with every generator.
pub fn oracle_order(b: &[Vec<Q>], ends: &[usize], slot: usize, gens: &[Vec<BigInt>]) -> u64 {
    let mut a = vec![0u64; ends.len()];
    for k in 1.. {
        a[slot] = k;
        if in_monoid(b, ends, &a, gens) {
            return k;
        }
    }
    unreachable!()
}

/// Minimal nonzero members of the congruence monoid, by listing the whole
/// box and comparing every pair. Sorted lexicographically.
pub fn oracle_hilbert_basis(g: &ResolutionGraph, gens: &[Vec<BigInt>]) -> Vec<Vec<u64>> {
    let b = oracle_duals(g);
    let ids = g.ids();
    let ends: Vec<usize> = g
        .ends()
        .iter()
        .map(|e| ids.iter().position(|x| x == e).unwrap())
        .collect();
    let ords: Vec<u64> = (0..ends.len())
        .map(|s| oracle_order(&b, &ends, s, gens))
        .collect();
    let mut members = Vec::new();
    let mut a = vec![0u64; ends.len()];
    'outer: loop {
        if a.iter().any(|&x| x > 0) && in_monoid(&b, &ends, &a, gens) {
            members.push(a.clone());
        }
        for j in (0..a.len()).rev() {
            if a[j] < ords[j] {
                a[j] += 1;
                continue 'outer;
            }
            a[j] = 0;
        }
        break;
    }
    let mut minimal: Vec<Vec<u64>> = members
        .iter()
        .filter(|m| {
            !members
                .iter()
                .any(|o| o != *m && o.iter().zip(m.iter()).all(|(x, y)| x <= y))
        })
        .cloned()
        .collect();
    minimal.sort();
    minimal
}

pub fn box_volume(g: &ResolutionGraph, gens: &[Vec<BigInt>]) -> u64 {
    let b = oracle_duals(g);
    let ids = g.ids();
    let ends: Vec<usize> = g
        .ends()
        .iter()
        .map(|e| ids.iter().position(|x| x == e).unwrap())
        .collect();
    (0..ends.len())
        .map(|s| oracle_order(&b, &ends, s, gens) + 1)
        .product()
}

/// A random weighted tree, or `None` if it is not negative definite.
pub fn random_tree(
    rng: &mut ChaCha8Rng,
    max_vertices: usize,
    abs_weights: std::ops::RangeInclusive<i64>,
) -> Option<ResolutionGraph> {
    let n = rng.gen_range(2..=max_vertices);
    let vertices: Vec<(VertexId, i64)> = (1..=n as VertexId)
        .map(|id| (id, -rng.gen_range(abs_weights.clone())))
        .collect();
    let edges: Vec<(VertexId, VertexId)> = (2..=n as VertexId)
        .map(|v| (rng.gen_range(1..v), v))
        .collect();
    ResolutionGraph::new(&vertices, &edges).ok()
}

pub fn random_dual_vector(rng: &mut ChaCha8Rng, n: usize, max: i64) -> Vec<BigInt> {
    (0..n)
        .map(|_| BigInt::from(rng.gen_range(0..=max)))
        .collect()
}

/// Draw until a valid tree comes up.
pub fn some_tree(
    rng: &mut ChaCha8Rng,
    max_vertices: usize,
    abs_weights: std::ops::RangeInclusive<i64>,
) -> ResolutionGraph {
    loop {
        if let Some(g) = random_tree(rng, max_vertices, abs_weights.clone()) {
            return g;
        }
    }
}
