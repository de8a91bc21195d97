//! Rational cycles, dual cycles and the discriminant group `H = L*/L`.
//!
//! Elements of `L*` are written in dual coordinates: the integer vector `c`
//! stands for `Σ c_v E_v*`. A cycle given in the vertex basis is converted
//! with [`to_dual_coordinates`], which is `c_1`.
//!
//! Group elements are encoded as mixed-radix codes over the nontrivial
//! invariant factors, so subgroups are plain sorted code lists and
//! subgroup equality is element-set equality.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ResolutionGraph, VertexId};
use crate::linalg::{invert_rational_matrix, smith_normal_form, IntMatrix, RatMatrix, Rational};

/// Default cap on `|H|` for element enumeration.
pub const DEFAULT_GROUP_CAP: u64 = 5000;

/// A rational cycle `Σ a_v E_v`, indexed by the vertex ids of one graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QCycle {
    ids: Vec<VertexId>,
    coeffs: Vec<Rational>,
}

impl QCycle {
    pub fn new(ids: Vec<VertexId>, coeffs: Vec<Rational>) -> Self {
        assert_eq!(ids.len(), coeffs.len(), "one coefficient per vertex");
        QCycle { ids, coeffs }
    }

    pub fn zero(g: &ResolutionGraph) -> Self {
        QCycle::new(g.ids().to_vec(), vec![Rational::zero(); g.len()])
    }

    /// `E_v` itself.
    pub fn vertex(g: &ResolutionGraph, v: VertexId) -> Result<Self> {
        let i = g.index_of(v)?;
        let mut c = Self::zero(g);
        c.coeffs[i] = Rational::one();
        Ok(c)
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `M_v(D)`: the coefficient of `E_v`.
    pub fn coefficient(&self, v: VertexId) -> Result<Rational> {
        self.ids
            .binary_search(&v)
            .map(|i| self.coeffs[i].clone())
            .map_err(|_| Error::UnknownVertex(v))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ids == other.ids {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(QCycle::new(self.ids.clone(), coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(QCycle::new(self.ids.clone(), coeffs))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        QCycle::new(
            self.ids.clone(),
            self.coeffs.iter().map(|a| a * k).collect(),
        )
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|a| a.is_integer())
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|a| !a.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Componentwise order `self <= other`.
    pub fn le(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b))
    }

    /// Vertices with nonzero coefficient.
    pub fn support(&self) -> Vec<VertexId> {
        self.ids
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn is_on(&self, g: &ResolutionGraph) -> bool {
        self.ids == g.ids()
    }
}

impl fmt::Display for QCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `B = (-I)^{-1}`; column `b` holds the vertex coefficients of `E_b*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBasis {
    ids: Vec<VertexId>,
    b: RatMatrix,
}

pub fn dual_cycles(g: &ResolutionGraph) -> Result<DualBasis> {
    let b = invert_rational_matrix(&g.intersection_matrix().neg().to_rational())?;
    Ok(DualBasis {
        ids: g.ids().to_vec(),
        b,
    })
}

impl DualBasis {
    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.b
    }

    fn index_of(&self, v: VertexId) -> Result<usize> {
        self.ids
            .binary_search(&v)
            .map_err(|_| Error::UnknownVertex(v))
    }

    /// `M_v(E_w*)`.
    pub fn entry(&self, v: VertexId, w: VertexId) -> Result<&Rational> {
        Ok(self.b.get(self.index_of(v)?, self.index_of(w)?))
    }

    pub fn dual(&self, v: VertexId) -> Result<QCycle> {
        let j = self.index_of(v)?;
        Ok(QCycle::new(self.ids.clone(), self.b.column(j)))
    }

    /// `Σ c_v E_v*` in the vertex basis.
    pub fn expand(&self, dual_coords: &[Rational]) -> Result<QCycle> {
        if dual_coords.len() != self.ids.len() {
            return Err(Error::DimensionMismatch {
                expected: self.ids.len(),
                got: dual_coords.len(),
            });
        }
        Ok(QCycle::new(self.ids.clone(), self.b.mul_vec(dual_coords)))
    }

    pub fn expand_int(&self, dual_coords: &[BigInt]) -> Result<QCycle> {
        let r: Vec<Rational> = dual_coords
            .iter()
            .cloned()
            .map(Rational::from_integer)
            .collect();
        self.expand(&r)
    }

    /// Sum of `counts[k] * E_{vertices[k]}*`.
    pub fn combination(&self, vertices: &[VertexId], counts: &[u64]) -> Result<QCycle> {
        let mut coeffs = vec![Rational::zero(); self.ids.len()];
        for (&v, &a) in vertices.iter().zip(counts) {
            if a == 0 {
                continue;
            }
            let j = self.index_of(v)?;
            let a = Rational::from_integer(BigInt::from(a));
            for (i, c) in coeffs.iter_mut().enumerate() {
                *c += &a * self.b.get(i, j);
            }
        }
        Ok(QCycle::new(self.ids.clone(), coeffs))
    }

    /// `(Σ c_a E_a*) · (Σ d_b E_b*) = -c^T B d`.
    pub fn pair_dual(&self, c: &[BigInt], d: &[BigInt]) -> Rational {
        let mut acc = Rational::zero();
        for (i, ci) in c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, dj) in d.iter().enumerate() {
                if dj.is_zero() {
                    continue;
                }
                acc -= self.b.get(i, j) * Rational::from_integer(ci * dj);
            }
        }
        acc
    }
}

/// `D · D2 = d^T I(E) d2`.
pub fn intersect(g: &ResolutionGraph, d: &QCycle, d2: &QCycle) -> Result<Rational> {
    if !d.is_on(g) || !d2.is_on(g) {
        return Err(Error::GraphMismatch);
    }
    let n = g.len();
    let mut acc = Rational::zero();
    for i in 0..n {
        if d.coeffs[i].is_zero() {
            continue;
        }
        let v = g.ids()[i];
        let mut row = &d2.coeffs[i] * Rational::from_integer(BigInt::from(g.weight(v)?));
        for w in g.neighbors(v)? {
            row += &d2.coeffs[g.index_of(w)?];
        }
        acc += &d.coeffs[i] * row;
    }
    Ok(acc)
}

/// `D · E_v` for every vertex, in id order.
pub fn intersections_with_vertices(g: &ResolutionGraph, d: &QCycle) -> Result<Vec<Rational>> {
    if !d.is_on(g) {
        return Err(Error::GraphMismatch);
    }
    let m = g.intersection_matrix().to_rational();
    Ok(m.mul_vec(&d.coeffs))
}

/// `c_1(D) = Σ (-D·E_v) E_v*`, returned as the coefficient vector.
pub fn to_dual_coordinates(g: &ResolutionGraph, d: &QCycle) -> Result<Vec<Rational>> {
    Ok(intersections_with_vertices(g, d)?
        .into_iter()
        .map(|x| -x)
        .collect())
}

/// The finite abelian group `H = L*/L ≅ ⊕ Z/d_j`.
#[derive(Debug)]
pub struct DiscriminantGroup {
    ids: Vec<VertexId>,
    basis: DualBasis,
    det: BigInt,
    factors: Vec<BigInt>,
    /// rows of the SNF left transform for the nontrivial factors
    projection: IntMatrix,
    /// dual-coordinate vectors of the standard generators
    generators: Vec<Vec<BigInt>>,
    small: Option<SmallGroup>,
    /// vertex indices, ends first
    preferred: Vec<usize>,
    representatives: OnceLock<Vec<Vec<u32>>>,
}

// Machine-word data for enumeration, present when |H| fits in a u64.
#[derive(Debug, Clone)]
struct SmallGroup {
    factors: Vec<u64>,
    order: u64,
    exponent: u64,
    /// `exponent * (g_j · g_l)` reduced into `[0, exponent)`
    pairing: Vec<Vec<u64>>,
}

pub fn discriminant_group(g: &ResolutionGraph, basis: &DualBasis) -> Result<DiscriminantGroup> {
    if basis.ids() != g.ids() {
        return Err(Error::GraphMismatch);
    }
    let i = g.intersection_matrix();
    let snf = smith_normal_form(&i);
    let diag = snf.diagonal();
    let nontrivial: Vec<usize> = (0..diag.len()).filter(|&k| !diag[k].is_one()).collect();
    let factors: Vec<BigInt> = nontrivial.iter().map(|&k| diag[k].clone()).collect();
    if factors.iter().any(Zero::is_zero) {
        return Err(Error::SingularMatrix);
    }
    let n = g.len();
    let projection = IntMatrix::from_fn(nontrivial.len(), n, |r, c| {
        snf.u.get(nontrivial[r], c).clone()
    });
    let u_inv = invert_rational_matrix(&snf.u.to_rational())?;
    let generators: Vec<Vec<BigInt>> = nontrivial
        .iter()
        .map(|&k| {
            u_inv
                .column(k)
                .into_iter()
                .map(|x| x.to_integer())
                .collect()
        })
        .collect();
    let det: BigInt = factors.iter().product();
    debug_assert_eq!(det, i.determinant().abs());

    let small = factors
        .iter()
        .map(|f| f.to_u64())
        .collect::<Option<Vec<u64>>>()
        .and_then(|fs| {
            let order = fs.iter().try_fold(1u64, |acc, &f| acc.checked_mul(f))?;
            let exponent = fs.last().copied().unwrap_or(1);
            let pairing = generators
                .iter()
                .map(|gj| {
                    generators
                        .iter()
                        .map(|gl| {
                            let p =
                                basis.pair_dual(gj, gl) * Rational::from_integer(exponent.into());
                            debug_assert!(p.is_integer());
                            p.to_integer()
                                .mod_floor(&BigInt::from(exponent))
                                .to_u64()
                                .unwrap()
                        })
                        .collect()
                })
                .collect();
            Some(SmallGroup {
                factors: fs,
                order,
                exponent,
                pairing,
            })
        });

    Ok(DiscriminantGroup {
        ids: g.ids().to_vec(),
        basis: basis.clone(),
        det,
        factors,
        projection,
        generators,
        small,
        preferred: g
            .ends()
            .into_iter()
            .chain(g.ids().iter().copied().filter(|&v| !g.is_end(v)))
            .map(|v| g.index_of(v).expect("vertex of g"))
            .collect(),
        representatives: OnceLock::new(),
    })
}

impl DiscriminantGroup {
    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn basis(&self) -> &DualBasis {
        &self.basis
    }

    /// `|H| = |det I(E)|`.
    pub fn order(&self) -> &BigInt {
        &self.det
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn standard_generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    /// Residues in `⊕ Z/d_j` of an element given in dual coordinates.
    pub fn normal_form(&self, dual: &[BigInt]) -> Result<Vec<BigInt>> {
        if dual.len() != self.ids.len() {
            return Err(Error::DimensionMismatch {
                expected: self.ids.len(),
                got: dual.len(),
            });
        }
        Ok(self
            .projection
            .mul_vec(dual)
            .into_iter()
            .zip(&self.factors)
            .map(|(x, d)| x.mod_floor(d))
            .collect())
    }

    /// Enumeration data, if `|H| <= cap`.
    fn small(&self, cap: u64) -> Result<&SmallGroup> {
        match &self.small {
            Some(s) if s.order <= cap => Ok(s),
            _ => Err(Error::cap("discriminant group order", &self.det, cap)),
        }
    }

    /// Order as a machine integer, if it does not exceed `cap`.
    pub fn order_within(&self, cap: u64) -> Result<u64> {
        Ok(self.small(cap)?.order)
    }

    pub fn code_of(&self, dual: &[BigInt]) -> Result<u64> {
        let small = self.small(u64::MAX)?;
        let residues = self.normal_form(dual)?;
        Ok(encode(
            &small.factors,
            residues.iter().map(|r| r.to_u64().unwrap()),
        ))
    }

    pub fn code_of_vertex_dual(&self, v: VertexId, multiple: i64) -> Result<u64> {
        let i = self.basis.index_of(v)?;
        let mut c = vec![BigInt::zero(); self.ids.len()];
        c[i] = BigInt::from(multiple);
        self.code_of(&c)
    }

    pub fn residues_of_code(&self, code: u64) -> Vec<u64> {
        let small = self
            .small
            .as_ref()
            .expect("codes exist only for small groups");
        decode(&small.factors, code)
    }

    /// Some dual-coordinate vector in the class `code` (from the SNF basis).
    pub fn dual_vector(&self, code: u64) -> Vec<BigInt> {
        let residues = self.residues_of_code(code);
        let mut out = vec![BigInt::zero(); self.ids.len()];
        for (r, g) in residues.iter().zip(&self.generators) {
            for (o, x) in out.iter_mut().zip(g) {
                *o += x * BigInt::from(*r);
            }
        }
        out
    }

    pub fn add_codes(&self, a: u64, b: u64) -> u64 {
        let small = self.small.as_ref().expect("small group");
        let (ra, rb) = (decode(&small.factors, a), decode(&small.factors, b));
        encode(
            &small.factors,
            ra.iter()
                .zip(&rb)
                .zip(&small.factors)
                .map(|((x, y), f)| (x + y) % f),
        )
    }

    /// `exponent * (a · b) mod exponent`; zero iff the pairing is integral.
    fn pair_codes_scaled(small: &SmallGroup, a: &[u64], b: &[u64]) -> u64 {
        let n = small.exponent as u128;
        let mut acc: u128 = 0;
        for (j, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (l, y) in b.iter().enumerate() {
                acc = (acc + (*x as u128) * (*y as u128) % n * small.pairing[j][l] as u128) % n;
            }
        }
        acc as u64
    }

    /// `a · b ∈ Q/Z`, in `[0, 1)`.
    pub fn pair_codes(&self, a: u64, b: u64) -> Rational {
        let small = self.small.as_ref().expect("small group");
        let s = Self::pair_codes_scaled(
            small,
            &decode(&small.factors, a),
            &decode(&small.factors, b),
        );
        Rational::new(BigInt::from(s), BigInt::from(small.exponent))
    }

    /// For every element code, a shortest nonnegative dual-coordinate
    /// vector in its class. Words are built from a greedy generating set of
    /// vertex duals, ends first.
    pub fn representatives(&self, cap: u64) -> Result<&[Vec<u32>]> {
        let small = self.small(cap)?;
        Ok(self.representatives.get_or_init(|| {
            let n = self.ids.len();
            let mut steps: Vec<(usize, u64)> = Vec::new();
            let mut span = vec![0u64];
            for &i in &self.preferred {
                let mut c = vec![BigInt::zero(); n];
                c[i] = BigInt::one();
                let code = self.code_of(&c).expect("small group");
                if span.binary_search(&code).is_err() {
                    span = self.closure(&span, code);
                    steps.push((i, code));
                }
            }
            let mut reps: Vec<Option<Vec<u32>>> = vec![None; small.order as usize];
            reps[0] = Some(vec![0; n]);
            let mut queue = VecDeque::from([0u64]);
            while let Some(code) = queue.pop_front() {
                let rep = reps[code as usize].clone().expect("visited");
                for &(i, s) in &steps {
                    let next = self.add_codes(code, s);
                    if reps[next as usize].is_none() {
                        let mut r = rep.clone();
                        r[i] += 1;
                        reps[next as usize] = Some(r);
                        queue.push_back(next);
                    }
                }
            }
            reps.into_iter()
                .map(|r| r.expect("E_v* generate H"))
                .collect()
        }))
    }

    /// Human-readable class representative, e.g. `E1* + 3E3*` or `0`.
    pub fn describe_code(&self, code: u64, cap: u64) -> Result<String> {
        let rep = &self.representatives(cap)?[code as usize];
        let terms: Vec<String> = rep
            .iter()
            .zip(&self.ids)
            .filter(|(c, _)| **c > 0)
            .map(|(&c, v)| {
                if c == 1 {
                    format!("E{v}*")
                } else {
                    format!("{c}E{v}*")
                }
            })
            .collect();
        Ok(if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        })
    }

    fn closure(&self, start: &[u64], extra: u64) -> Vec<u64> {
        // start is a subgroup; <start, extra> = ∪_k (start + k*extra)
        let set: HashSet<u64> = start.iter().copied().collect();
        let mut out = start.to_vec();
        let mut shift = extra;
        while !set.contains(&shift) {
            out.extend(start.iter().map(|&s| self.add_codes(s, shift)));
            shift = self.add_codes(shift, extra);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn generated(&self, codes: &[u64]) -> Vec<u64> {
        codes.iter().fold(vec![0], |acc, &c| {
            if acc.binary_search(&c).is_ok() {
                acc
            } else {
                self.closure(&acc, c)
            }
        })
    }

    /// Greedy generating set of a subgroup: walk the elements by
    /// representative length, then code, keeping those not yet generated.
    fn canonical_generators(&self, elements: &[u64], cap: u64) -> Result<Vec<u64>> {
        let reps = self.representatives(cap)?;
        let mut order: Vec<u64> = elements.to_vec();
        order.sort_by_key(|&c| {
            let rep = &reps[c as usize];
            let word: Vec<u32> = self.preferred.iter().map(|&i| rep[i]).collect();
            (rep.iter().sum::<u32>(), std::cmp::Reverse(word), c)
        });
        let mut gens = Vec::new();
        let mut current = vec![0u64];
        for c in order {
            if current.binary_search(&c).is_err() {
                gens.push(c);
                current = self.closure(&current, c);
            }
        }
        // drop generators the others already produce, latest first
        for k in (0..gens.len()).rev() {
            let mut rest = gens.clone();
            rest.remove(k);
            if self.generated(&rest).len() == current.len() {
                gens = rest;
            }
        }
        Ok(gens)
    }

    fn subgroup_from_elements(&self, elements: Vec<u64>, cap: u64) -> Result<SubgroupData> {
        let gens = self.canonical_generators(&elements, cap)?;
        let reps = self.representatives(cap)?;
        let generators = gens
            .iter()
            .map(|&c| reps[c as usize].iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Ok(self.make_subgroup(generators, elements))
    }

    fn make_subgroup(&self, generators: Vec<Vec<BigInt>>, elements: Vec<u64>) -> SubgroupData {
        let h = self.small.as_ref().expect("small group").order;
        let order = elements.len() as u64;
        SubgroupData {
            ids: self.ids.clone(),
            generators,
            order,
            index: h / order,
            elements,
        }
    }

    pub fn trivial_subgroup(&self) -> Result<SubgroupData> {
        self.small(u64::MAX)?;
        Ok(self.make_subgroup(Vec::new(), vec![0]))
    }

    pub fn whole(&self, cap: u64) -> Result<SubgroupData> {
        let order = self.small(cap)?.order;
        let elements: Vec<u64> = (0..order).collect();
        self.subgroup_from_elements(elements, cap)
    }
}

fn encode(factors: &[u64], residues: impl IntoIterator<Item = u64>) -> u64 {
    let mut code = 0u64;
    for (r, f) in residues.into_iter().zip(factors) {
        code = code * f + r;
    }
    code
}

fn decode(factors: &[u64], mut code: u64) -> Vec<u64> {
    let mut out = vec![0u64; factors.len()];
    for (slot, f) in out.iter_mut().zip(factors).rev() {
        *slot = code % f;
        code /= f;
    }
    out
}

/// A subgroup `H1 ≤ H` with the generators it was specified by.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupData {
    ids: Vec<VertexId>,
    generators: Vec<Vec<BigInt>>,
    order: u64,
    index: u64,
    elements: Vec<u64>,
}

impl SubgroupData {
    /// Generators in dual coordinates (vertex-id order of the group's graph).
    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `|H / H1|`.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Sorted element codes.
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn contains(&self, code: u64) -> bool {
        self.elements.binary_search(&code).is_ok()
    }

    pub fn same_elements(&self, other: &Self) -> bool {
        self.elements == other.elements
    }

    /// Generators transported to a graph obtained by blowups: the pullback
    /// of `Σ c_v E_v*` has the same dual coordinates on old vertices and 0 on
    /// new ones.
    pub fn generators_on(&self, g: &ResolutionGraph) -> Result<Vec<Vec<BigInt>>> {
        self.generators
            .iter()
            .map(|gen| {
                let mut out = vec![BigInt::zero(); g.len()];
                for (&v, c) in self.ids.iter().zip(gen) {
                    if !c.is_zero() {
                        out[g.index_of(v)?] = c.clone();
                    }
                }
                Ok(out)
            })
            .collect()
    }
}

/// The subgroup generated by dual-coordinate vectors.
pub fn subgroup(gens: &[Vec<BigInt>], h: &DiscriminantGroup, cap: u64) -> Result<SubgroupData> {
    h.small(cap)?;
    let codes = gens
        .iter()
        .map(|g| h.code_of(g))
        .collect::<Result<Vec<_>>>()?;
    let elements = h.generated(&codes);
    Ok(h.make_subgroup(gens.to_vec(), elements))
}

/// `Θ(D) ∈ H1^⊥`: `D · g ∈ Z` for every generator `g` of `H1`.
pub fn perp_member(basis: &DualBasis, d: &[BigInt], h1_generators: &[Vec<BigInt>]) -> bool {
    h1_generators
        .iter()
        .all(|g| basis.pair_dual(d, g).is_integer())
}

/// `H1^♭ = {h ∈ H : h · H1 ⊂ Z}`.
pub fn flat_subgroup(h1: &SubgroupData, h: &DiscriminantGroup, cap: u64) -> Result<SubgroupData> {
    let small = h.small(cap)?;
    let gen_residues: Vec<Vec<u64>> = h1
        .generators
        .iter()
        .map(|g| h.code_of(g).map(|c| decode(&small.factors, c)))
        .collect::<Result<_>>()?;
    let elements: Vec<u64> = (0..small.order)
        .filter(|&c| {
            let r = decode(&small.factors, c);
            gen_residues
                .iter()
                .all(|g| DiscriminantGroup::pair_codes_scaled(small, &r, g) == 0)
        })
        .collect();
    h.subgroup_from_elements(elements, cap)
}

/// Subgroup input: each generator is a dual-coordinate vector in
/// ascending vertex-id order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupDocument {
    pub generators: Vec<Vec<i64>>,
}

impl SubgroupDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn vectors(&self, g: &ResolutionGraph) -> Result<Vec<Vec<BigInt>>> {
        self.generators
            .iter()
            .map(|v| {
                if v.len() != g.len() {
                    return Err(Error::DimensionMismatch {
                        expected: g.len(),
                        got: v.len(),
                    });
                }
                Ok(v.iter().map(|&x| BigInt::from(x)).collect())
            })
            .collect()
    }
}

/// Every subgroup of `H` exactly once, sorted by order and then by the
/// sorted element-code list.
pub fn enumerate_subgroups(h: &DiscriminantGroup, cap: u64) -> Result<Vec<SubgroupData>> {
    let small = h.small(cap)?;
    let mut seen: BTreeSet<(u64, Vec<u64>)> = BTreeSet::new();
    let mut queue = VecDeque::from([vec![0u64]]);
    seen.insert((1, vec![0]));
    while let Some(s) = queue.pop_front() {
        for c in 0..small.order {
            if s.binary_search(&c).is_ok() {
                continue;
            }
            let t = h.closure(&s, c);
            if seen.insert((t.len() as u64, t.clone())) {
                queue.push_back(t);
            }
        }
    }
    seen.into_iter()
        .map(|(_, elements)| h.subgroup_from_elements(elements, cap))
        .collect()
}
