//! Monomial cycles `Σ a_i E_i*` over the ends, and the combinatorics built
//! on them: admissible monomials, base points at the ends, Hilbert bases of
//! congruence submonoids, and gcd cycles.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{GraphHistory, ResolutionGraph, VertexId};
use crate::lattice::{DualBasis, QCycle};
use crate::linalg::{invert_rational_matrix, lcm_of_denominators, IntMatrix, Rational};

/// Default cap on the Hilbert-basis search box volume.
pub const DEFAULT_BOX_CAP: u64 = 100_000_000;
/// Default cap on knapsack search nodes.
pub const DEFAULT_SEARCH_CAP: u64 = 10_000_000;

/// Graded-lexicographic order: total degree first, then larger exponents
/// on smaller end ids come first.
pub fn grlex_cmp(a: &[u64], b: &[u64]) -> Ordering {
    let (da, db): (u64, u64) = (a.iter().sum(), b.iter().sum());
    da.cmp(&db).then_with(|| b.cmp(a))
}

fn grlex_key(a: &[u64]) -> (u64, Reverse<Vec<u64>>) {
    (a.iter().sum(), Reverse(a.to_vec()))
}

/// `M_v(D)`.
pub fn coefficient(d: &QCycle, v: VertexId) -> Result<Rational> {
    d.coefficient(v)
}

/// Which current vertex carries each end variable `z_i`; `indices` are the
/// original end ids naming the variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndVariables {
    pub indices: Vec<VertexId>,
    pub vertices: Vec<VertexId>,
}

impl EndVariables {
    pub fn of_graph(g: &ResolutionGraph) -> Self {
        let ends = g.ends();
        EndVariables {
            indices: ends.clone(),
            vertices: ends,
        }
    }

    pub fn from_history(h: &GraphHistory) -> Self {
        EndVariables {
            indices: h.end_indices(),
            vertices: h.end_vertices(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `z_{i1}^{a1} z_{i2}^{a2} ...` rendered with `*` and `^`.
pub fn render_monomial(indices: &[VertexId], exponents: &[u64]) -> String {
    let parts: Vec<String> = indices
        .iter()
        .zip(exponents)
        .filter(|(_, &a)| a > 0)
        .map(|(i, &a)| {
            if a == 1 {
                format!("z{i}")
            } else {
                format!("z{i}^{a}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialCycle {
    exponents: Vec<u64>,
    expansion: QCycle,
}

impl MonomialCycle {
    pub fn new(basis: &DualBasis, ends: &EndVariables, exponents: Vec<u64>) -> Result<Self> {
        if exponents.len() != ends.len() {
            return Err(Error::DimensionMismatch {
                expected: ends.len(),
                got: exponents.len(),
            });
        }
        let expansion = basis.combination(&ends.vertices, &exponents)?;
        Ok(MonomialCycle {
            exponents,
            expansion,
        })
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Vertex-basis expansion on the graph it was built for.
    pub fn expansion(&self) -> &QCycle {
        &self.expansion
    }

    pub fn degree(&self) -> u64 {
        self.exponents.iter().sum()
    }
}

/// All nonnegative integer vectors `a` with `Σ a_k coins_k = target`
/// (coins positive), in graded-lex order.
pub fn knapsack_solutions(coins: &[BigInt], target: &BigInt, cap: u64) -> Result<Vec<Vec<u64>>> {
    assert!(
        coins.iter().all(Signed::is_positive),
        "coins must be positive"
    );
    let mut out = Vec::new();
    let mut current = vec![0u64; coins.len()];
    let mut visited = 0u64;
    fn go(
        k: usize,
        rest: &BigInt,
        coins: &[BigInt],
        current: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        visited: &mut u64,
        cap: u64,
    ) -> Result<()> {
        *visited += 1;
        if *visited > cap {
            return Err(Error::cap("knapsack search nodes", *visited, cap));
        }
        if k == coins.len() {
            if rest.is_zero() {
                out.push(current.clone());
            }
            return Ok(());
        }
        if k + 1 == coins.len() {
            let (q, r) = rest.div_rem(&coins[k]);
            if r.is_zero() {
                current[k] = q
                    .to_u64()
                    .ok_or_else(|| Error::cap("exponent", &q, u64::MAX))?;
                out.push(current.clone());
                current[k] = 0;
            }
            return Ok(());
        }
        let max = (rest / &coins[k])
            .to_u64()
            .ok_or_else(|| Error::cap("exponent", rest, u64::MAX))?;
        for a in 0..=max {
            current[k] = a;
            let next = rest - &coins[k] * BigInt::from(a);
            go(k + 1, &next, coins, current, out, visited, cap)?;
        }
        current[k] = 0;
        Ok(())
    }
    if coins.is_empty() {
        return Ok(if target.is_zero() {
            vec![vec![]]
        } else {
            vec![]
        });
    }
    go(0, target, coins, &mut current, &mut out, &mut visited, cap)?;
    out.sort_by(|a, b| grlex_cmp(a, b));
    Ok(out)
}

/// Whether `target` lies in the numerical semigroup generated by `coins`
/// (positive). Shortest paths over residues mod the smallest coin.
pub fn is_representable(coins: &[u64], target: u64) -> bool {
    let Some(&m) = coins.iter().min() else {
        return target == 0;
    };
    let m = m as usize;
    let mut dist: Vec<Option<u64>> = vec![None; m];
    dist[0] = Some(0);
    let mut heap = BinaryHeap::from([Reverse((0u64, 0usize))]);
    while let Some(Reverse((d, r))) = heap.pop() {
        if dist[r] != Some(d) {
            continue;
        }
        if d > target {
            break;
        }
        for &c in coins {
            let nd = d + c;
            let nr = (r + c as usize % m) % m;
            if dist[nr].is_none_or(|old| nd < old) {
                dist[nr] = Some(nd);
                heap.push(Reverse((nd, nr)));
            }
        }
    }
    dist[target as usize % m].is_some_and(|d| d <= target)
}

/// Scale rationals by the lcm of their denominators.
fn to_common_integers(values: &[&Rational]) -> Vec<BigInt> {
    let l = lcm_of_denominators(values.iter().copied());
    values
        .iter()
        .map(|v| (*v * Rational::from_integer(l.clone())).to_integer())
        .collect()
}

/// Ends `i` whose point `b_i` is a base point: no combination
/// `Σ_{j≠i} a_j M_i(E_j*)` equals `M_i(E_i*)`.
pub fn base_point_set(g: &ResolutionGraph, basis: &DualBasis) -> Result<BTreeSet<VertexId>> {
    let ends = g.ends();
    let mut out = BTreeSet::new();
    for &i in &ends {
        let target = basis.entry(i, i)?;
        let coins: Vec<&Rational> = ends
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| basis.entry(i, j))
            .collect::<Result<_>>()?;
        let mut all = coins.clone();
        all.push(target);
        let ints = to_common_integers(&all);
        let (t, cs) = ints.split_last().expect("target present");
        let t = t
            .to_u64()
            .ok_or_else(|| Error::cap("knapsack target", t, u64::MAX))?;
        let cs: Vec<u64> = cs
            .iter()
            .map(|c| {
                c.to_u64()
                    .ok_or_else(|| Error::cap("knapsack coin", c, u64::MAX))
            })
            .collect::<Result<_>>()?;
        if !is_representable(&cs, t) {
            out.insert(i);
        }
    }
    Ok(out)
}

/// Admissible monomials for one branch of one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchReport {
    pub node: VertexId,
    /// vertex ids of the branch, ascending
    pub branch: Vec<VertexId>,
    /// ends of the graph lying in the branch, ascending
    pub ends: Vec<VertexId>,
    /// exponent vectors over `ends`, graded-lex order; empty means failure
    pub witnesses: Vec<Vec<u64>>,
}

impl BranchReport {
    pub fn satisfied(&self) -> bool {
        !self.witnesses.is_empty()
    }

    /// The monomial used in equation skeletons: smallest largest exponent,
    /// then smallest degree, then graded-lex.
    pub fn preferred(&self) -> Option<&[u64]> {
        self.witnesses
            .iter()
            .min_by(|a, b| {
                let ma = a.iter().max().copied().unwrap_or(0);
                let mb = b.iter().max().copied().unwrap_or(0);
                ma.cmp(&mb).then_with(|| grlex_cmp(a, b))
            })
            .map(Vec::as_slice)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialConditionReport {
    pub branches: Vec<BranchReport>,
}

impl MonomialConditionReport {
    pub fn is_satisfied(&self) -> bool {
        self.branches.iter().all(BranchReport::satisfied)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BranchReport> {
        self.branches.iter().filter(|b| !b.satisfied())
    }
}

/// For each node `v` and branch `C`, every monomial cycle `D` with
/// `D - E_v*` effective, integral and supported on `C`.
///
/// Only ends inside `C` can carry exponents: an end `j` outside `C` is not
/// adjacent to `C`, so `(D - E_v*)·E_j = 0`, while `D·E_j = -a_j` and
/// `E_v*·E_j = 0`, forcing `a_j = 0`. Matching the coefficient at `v` gives
/// the knapsack `Σ a_i M_v(E_i*) = M_v(E_v*)`; each solution is then checked
/// against the full condition.
pub fn monomial_condition(
    g: &ResolutionGraph,
    basis: &DualBasis,
    search_cap: u64,
) -> Result<MonomialConditionReport> {
    let all_ends = g.ends();
    let mut branches = Vec::new();
    for v in g.nodes() {
        let ev = basis.dual(v)?;
        for branch in g.branches(v)? {
            let ends: Vec<VertexId> = all_ends
                .iter()
                .copied()
                .filter(|e| branch.contains(e))
                .collect();
            let target = basis.entry(v, v)?;
            let mut vals: Vec<&Rational> = ends
                .iter()
                .map(|&e| basis.entry(v, e))
                .collect::<Result<_>>()?;
            vals.push(target);
            let ints = to_common_integers(&vals);
            let (t, coins) = ints.split_last().expect("target present");
            let mut witnesses = Vec::new();
            for a in knapsack_solutions(coins, t, search_cap)? {
                let d = basis.combination(&ends, &a)?.sub(&ev)?;
                let off_branch_zero = d
                    .ids()
                    .iter()
                    .zip(d.coefficients())
                    .all(|(id, c)| branch.contains(id) || c.is_zero());
                if d.is_integral() && d.is_effective() && off_branch_zero {
                    witnesses.push(a);
                }
            }
            branches.push(BranchReport {
                node: v,
                branch,
                ends,
                witnesses,
            });
        }
    }
    Ok(MonomialConditionReport { branches })
}

/// The cycle `D = n_i E^×_{w_i} + n E_w*` built on one branch `C` of `w`,
/// where `w_i` is the smallest end in `C` and `E^×_{w_i}` is its dual on
/// the subgraph `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchCycle {
    pub end: VertexId,
    pub n: BigInt,
    pub n_end: BigInt,
    pub cycle: QCycle,
}

pub fn branch_cycle(
    g: &ResolutionGraph,
    basis: &DualBasis,
    w: VertexId,
    branch: &[VertexId],
) -> Result<BranchCycle> {
    let branches = g.branches(w)?;
    let mut sorted = branch.to_vec();
    sorted.sort_unstable();
    if !branches.contains(&sorted) {
        return Err(Error::IndexMismatch);
    }
    let end = *g
        .ends()
        .iter()
        .find(|e| sorted.contains(e))
        .expect("every branch contains an end of the graph");
    // dual of `end` on the induced subgraph
    let k = sorted.len();
    let mut sub = IntMatrix::zeros(k, k);
    for (a, &x) in sorted.iter().enumerate() {
        sub.set(a, a, BigInt::from(g.weight(x)?));
        for (b, &y) in sorted.iter().enumerate() {
            if a != b && g.has_edge(x, y) {
                sub.set(a, b, BigInt::one());
            }
        }
    }
    let inv = invert_rational_matrix(&sub.neg().to_rational())?;
    let col = inv.column(sorted.binary_search(&end).expect("end in branch"));
    let n_end = lcm_of_denominators(&col);
    let attach = g
        .neighbors(w)?
        .into_iter()
        .find(|x| sorted.contains(x))
        .expect("branch is adjacent to w");
    let scale = Rational::from_integer(n_end.clone());
    // E^×·E_w equals the coefficient of E^× at the attaching vertex
    let n = (&col[sorted.binary_search(&attach).expect("attach in branch")] * &scale).to_integer();
    let mut cycle = basis.dual(w)?.scale(&Rational::from_integer(n.clone()));
    let mut coeffs = cycle.coefficients().to_vec();
    for (x, c) in sorted.iter().zip(&col) {
        coeffs[g.index_of(*x)?] += c * &scale;
    }
    cycle = QCycle::new(cycle.ids().to_vec(), coeffs);
    Ok(BranchCycle {
        end,
        n,
        n_end,
        cycle,
    })
}

/// Generators of the monoid `M^{H1}` of monomial cycles pairing integrally
/// with `H1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertBasis {
    ends: EndVariables,
    /// additive order of each `E_i*` against `H1`
    orders: Vec<u64>,
    generators: Vec<MonomialCycle>,
}

impl HilbertBasis {
    pub fn ends(&self) -> &EndVariables {
        &self.ends
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn generators(&self) -> &[MonomialCycle] {
        &self.generators
    }

    pub fn exponent_vectors(&self) -> Vec<Vec<u64>> {
        self.generators
            .iter()
            .map(|m| m.exponents.clone())
            .collect()
    }

    pub fn expansions(&self) -> Vec<QCycle> {
        self.generators
            .iter()
            .map(|m| m.expansion.clone())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// The same exponent vectors expanded on another graph.
    pub fn reexpand(&self, basis: &DualBasis, ends: &EndVariables) -> Result<Self> {
        let generators = self
            .generators
            .iter()
            .map(|m| MonomialCycle::new(basis, ends, m.exponents.clone()))
            .collect::<Result<_>>()?;
        Ok(HilbertBasis {
            ends: ends.clone(),
            orders: self.orders.clone(),
            generators,
        })
    }

    /// Replace the expansions (after a pullback), keeping exponents.
    pub fn with_expansions(&self, ends: &EndVariables, expansions: Vec<QCycle>) -> Self {
        assert_eq!(expansions.len(), self.generators.len());
        HilbertBasis {
            ends: ends.clone(),
            orders: self.orders.clone(),
            generators: self
                .generators
                .iter()
                .zip(expansions)
                .map(|(m, expansion)| MonomialCycle {
                    exponents: m.exponents.clone(),
                    expansion,
                })
                .collect(),
        }
    }
}

/// Residues of `E_i*·g_k` scaled to integers mod `modulus`.
struct PairingResidues {
    modulus: u64,
    /// rows: ends; columns: generators
    rows: Vec<Vec<u64>>,
}

fn pairing_residues(
    basis: &DualBasis,
    ends: &EndVariables,
    h1: &[Vec<BigInt>],
) -> Result<PairingResidues> {
    let n = basis.ids().len();
    let mut pairings: Vec<Vec<Rational>> = Vec::with_capacity(ends.len());
    for &v in &ends.vertices {
        let mut unit = vec![BigInt::zero(); n];
        unit[basis
            .ids()
            .binary_search(&v)
            .map_err(|_| Error::UnknownVertex(v))?] = BigInt::one();
        pairings.push(h1.iter().map(|gen| basis.pair_dual(&unit, gen)).collect());
    }
    let l = lcm_of_denominators(pairings.iter().flatten());
    let modulus = l
        .to_u64()
        .ok_or_else(|| Error::cap("pairing denominator", &l, u64::MAX))?;
    let rows = pairings
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| {
                    (p * Rational::from_integer(l.clone()))
                        .to_integer()
                        .mod_floor(&l)
                        .to_u64()
                        .expect("reduced below modulus")
                })
                .collect()
        })
        .collect();
    Ok(PairingResidues { modulus, rows })
}

/// Hilbert basis of `M^{H1}`: the minimal nonzero members under the
/// componentwise order.
///
/// With `ord_i` the order of `E_i*` against `H1`, every member with
/// `a_i >= ord_i` is a member plus `ord_i e_i`, so all minimal members lie
/// in the box `∏ [0, ord_i]`.
pub fn hilbert_basis(
    basis: &DualBasis,
    ends: &EndVariables,
    h1_generators: &[Vec<BigInt>],
    box_cap: u64,
) -> Result<HilbertBasis> {
    let res = pairing_residues(basis, ends, h1_generators)?;
    let m = res.modulus;
    let orders: Vec<u64> = res
        .rows
        .iter()
        .map(|row| m / row.iter().fold(m, |acc, &r| acc.gcd(&r)))
        .collect();
    let volume = orders
        .iter()
        .try_fold(1u128, |acc, &o| acc.checked_mul(o as u128 + 1));
    match volume {
        Some(v) if v <= box_cap as u128 => {}
        v => {
            let shown = v.map_or_else(|| "overflow".to_string(), |v| v.to_string());
            return Err(Error::cap("Hilbert basis box volume", shown, box_cap));
        }
    }
    let k = ends.len();
    let gens = h1_generators.len();
    let step = |acc: &mut [u64], row: &[u64], times: u64| {
        for (a, r) in acc.iter_mut().zip(row) {
            *a = ((*a as u128 + (*r as u128) * (times as u128)) % m as u128) as u64;
        }
    };

    let mut members: Vec<Vec<u64>> = if k == 0 {
        Vec::new()
    } else {
        (0..=orders[0])
            .into_par_iter()
            .flat_map_iter(|a0| {
                let mut out = Vec::new();
                let mut a = vec![0u64; k];
                a[0] = a0;
                let mut acc = vec![0u64; gens];
                step(&mut acc, &res.rows[0], a0);
                loop {
                    if acc.iter().all(|&x| x == 0) && a.iter().any(|&x| x > 0) {
                        out.push(a.clone());
                    }
                    // odometer over coordinates 1..k
                    let mut j = k;
                    loop {
                        j -= 1;
                        if j == 0 {
                            return out;
                        }
                        if a[j] < orders[j] {
                            a[j] += 1;
                            step(&mut acc, &res.rows[j], 1);
                            break;
                        }
                        step(&mut acc, &res.rows[j], m - a[j] % m);
                        a[j] = 0;
                    }
                }
            })
            .collect()
    };
    members.sort_by_cached_key(|a| grlex_key(a));
    let mut minimal: Vec<Vec<u64>> = Vec::new();
    for a in members {
        if !minimal
            .iter()
            .any(|b| b.iter().zip(&a).all(|(x, y)| x <= y))
        {
            minimal.push(a);
        }
    }
    let generators = minimal
        .into_iter()
        .map(|a| MonomialCycle::new(basis, ends, a))
        .collect::<Result<_>>()?;
    Ok(HilbertBasis {
        ends: ends.clone(),
        orders,
        generators,
    })
}

/// Componentwise minimum: the largest cycle below every member.
pub fn gcd_cycle<'a>(cycles: impl IntoIterator<Item = &'a QCycle>) -> Result<QCycle> {
    let mut it = cycles.into_iter();
    let first = it.next().ok_or(Error::EmptySet)?;
    let mut coeffs = first.coefficients().to_vec();
    for c in it {
        if c.ids() != first.ids() {
            return Err(Error::GraphMismatch);
        }
        for (m, x) in coeffs.iter_mut().zip(c.coefficients()) {
            if x < m {
                *m = x.clone();
            }
        }
    }
    Ok(QCycle::new(first.ids().to_vec(), coeffs))
}

/// One node's part of a Neumann-Wahl system: `δ_v - 2` equations in the
/// `δ_v` chosen admissible monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeEquations {
    pub node: VertexId,
    /// one monomial per branch, as (end id, exponent) pairs with nonzero exponent
    pub monomials: Vec<Vec<(VertexId, u64)>>,
    /// `(δ_v - 2) x δ_v` Vandermonde rows `c_ij = j^(i-1)`
    pub coefficients: Vec<Vec<u64>>,
}

impl NodeEquations {
    pub fn monomial_strings(&self) -> Vec<String> {
        self.monomials
            .iter()
            .map(|m| {
                let (ids, exps): (Vec<_>, Vec<_>) = m.iter().copied().unzip();
                render_monomial(&ids, &exps)
            })
            .collect()
    }
}

impl fmt::Display for NodeEquations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let monos = self.monomial_strings();
        for (i, row) in self.coefficients.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let terms: Vec<String> = row
                .iter()
                .zip(&monos)
                .map(|(c, m)| {
                    if *c == 1 {
                        m.clone()
                    } else {
                        format!("{c}*{m}")
                    }
                })
                .collect();
            write!(f, "node {}: {} = 0", self.node, terms.join(" + "))?;
        }
        Ok(())
    }
}

pub fn neumann_wahl_system(
    g: &ResolutionGraph,
    basis: &DualBasis,
    search_cap: u64,
) -> Result<Vec<NodeEquations>> {
    let report = monomial_condition(g, basis, search_cap)?;
    if let Some(bad) = report.failures().next() {
        return Err(Error::MonomialConditionFails {
            node: bad.node,
            branch_root: bad.branch[0],
        });
    }
    let mut out = Vec::new();
    for v in g.nodes() {
        let monomials: Vec<Vec<(VertexId, u64)>> = report
            .branches
            .iter()
            .filter(|b| b.node == v)
            .map(|b| {
                let chosen = b.preferred().expect("condition satisfied");
                b.ends
                    .iter()
                    .copied()
                    .zip(chosen.iter().copied())
                    .filter(|&(_, a)| a > 0)
                    .collect()
            })
            .collect();
        let delta = monomials.len();
        let coefficients = (0..delta.saturating_sub(2))
            .map(|i| (1..=delta as u64).map(|j| j.pow(i as u32)).collect())
            .collect();
        out.push(NodeEquations {
            node: v,
            monomials,
            coefficients,
        });
    }
    Ok(out)
}
