//! Finite Markov chains with exact rational transition probabilities, and the
//! Gurvits–Ledoux machinery for weak, strong and exact lumping of an arbitrary chain.
//!
//! Nothing here knows about groups except [`transition_from_weight`]; the
//! group-specific tests in [`crate::lumping`] are checked against these.

use std::collections::VecDeque;

use crate::algebra::Weight;
use crate::error::{Error, Result};
use crate::group::CosetDecomposition;
use crate::linalg::{left_kernel, nullspace, Subspace};
use crate::scalar::{Rational, Scalar};

/// Largest state space accepted by the generic oracle.
pub const STATE_CAP: usize = 5_000;

/// A row-stochastic matrix stored as sorted sparse rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<(usize, Rational)>>,
}

impl TransitionMatrix {
    /// From dense rows; entries must be nonnegative and rows must sum to 1.
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let sparse = rows
            .into_iter()
            .map(|r| {
                if r.len() != n {
                    return Err(Error::domain("transition matrix is not square"));
                }
                Ok(r.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_sparse(sparse)
    }

    pub fn from_sparse(mut rows: Vec<Vec<(usize, Rational)>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::domain("empty state space"));
        }
        if n > STATE_CAP {
            return Err(Error::Resource(format!("{n} states exceeds the cap of {STATE_CAP}")));
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|(j, _)| *j);
            let mut total = Rational::zero();
            for (j, c) in row.iter() {
                if *j >= n {
                    return Err(Error::domain(format!("row {i} refers to state {j}")));
                }
                if c.is_negative() {
                    return Err(Error::domain(format!("negative entry in row {i}")));
                }
                total = total.add(c);
            }
            if !total.is_one() {
                return Err(Error::domain(format!("row {i} sums to {total}, not 1")));
            }
            row.retain(|(_, c)| !c.is_zero());
        }
        Ok(TransitionMatrix { rows })
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        match self.rows[i].binary_search_by_key(&j, |(k, _)| *k) {
            Ok(pos) => self.rows[i][pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let n = self.states();
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![Rational::zero(); n];
                for (j, c) in r {
                    d[*j] = c.clone();
                }
                d
            })
            .collect()
    }

    pub fn transpose_entries(&self) -> Vec<Vec<(usize, Rational)>> {
        let mut cols = vec![Vec::new(); self.states()];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in r {
                cols[*j].push((i, c.clone()));
            }
        }
        cols
    }

    /// Row vector times matrix.
    pub fn apply<F: Scalar>(&self, v: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.states()];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, c) in &self.rows[i] {
                out[*j].add_mul(x, &F::from_rational(c));
            }
        }
        out
    }

    fn reachable(adj: &[Vec<(usize, Rational)>]) -> usize {
        let mut seen = vec![false; adj.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for (y, _) in &adj[x] {
                if !seen[*y] {
                    seen[*y] = true;
                    count += 1;
                    queue.push_back(*y);
                }
            }
        }
        count
    }

    /// Strong connectivity of the transition graph.
    pub fn is_irreducible(&self) -> bool {
        let n = self.states();
        Self::reachable(&self.rows) == n && Self::reachable(&self.transpose_entries()) == n
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        let mut sums = vec![Rational::zero(); self.states()];
        for r in &self.rows {
            for (j, c) in r {
                sums[*j] = sums[*j].add(c);
            }
        }
        sums.iter().all(Scalar::is_one)
    }
}

/// `P(x, y) = w(x^-1 y) / w(G)` on group element ids.
pub fn transition_from_weight(w: &Weight) -> TransitionMatrix {
    let g = w.group();
    let total = w.total();
    let terms: Vec<(usize, Rational)> =
        w.support().into_iter().map(|s| (s, w.coeff(s).div(&total).expect("positive total"))).collect();
    let rows = (0..g.order())
        .map(|x| {
            let mut r: Vec<(usize, Rational)> = terms.iter().map(|(s, c)| (g.mul(x, *s), c.clone())).collect();
            r.sort_by_key(|(j, _)| *j);
            r
        })
        .collect();
    TransitionMatrix { rows }
}

/// A probability vector over states.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution(Vec<Rational>);

impl Distribution {
    pub fn new(p: Vec<Rational>) -> Result<Self> {
        if p.iter().any(Rational::is_negative) {
            return Err(Error::domain("negative probability"));
        }
        let total = p.iter().fold(Rational::zero(), |a, b| a.add(b));
        if !total.is_one() {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Distribution(p))
    }

    pub fn uniform(n: usize) -> Self {
        Distribution(vec![Rational::new(1, n as i64); n])
    }

    pub fn point(n: usize, state: usize) -> Self {
        let mut p = vec![Rational::zero(); n];
        p[state] = Rational::one();
        Distribution(p)
    }

    /// Uniform on a nonempty set of states.
    pub fn uniform_on(n: usize, states: &[usize]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::domain("uniform distribution on an empty set"));
        }
        let mut p = vec![Rational::zero(); n];
        for &s in states {
            p[s] = Rational::one();
        }
        let k = p.iter().filter(|c| !c.is_zero()).count();
        let c = Rational::new(1, k as i64);
        Ok(Distribution(p.into_iter().map(|x| x.mul(&c)).collect()))
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| !self.0[i].is_zero()).collect()
    }
}

/// A surjection from states onto lumps `0..lumps`.
#[derive(Clone, Debug, PartialEq)]
pub struct LumpingFunction {
    map: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl LumpingFunction {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let lumps = map.iter().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); lumps];
        for (a, &b) in map.iter().enumerate() {
            members[b].push(a);
        }
        if let Some(b) = members.iter().position(Vec::is_empty) {
            return Err(Error::domain(format!("lump {b} has no states")));
        }
        Ok(LumpingFunction { map, members })
    }

    /// Group element to its coset.
    pub fn from_cosets(decomposition: &CosetDecomposition) -> Self {
        LumpingFunction { map: decomposition.coset_of.clone(), members: decomposition.members.clone() }
    }

    pub fn states(&self) -> usize {
        self.map.len()
    }

    pub fn lumps(&self) -> usize {
        self.members.len()
    }

    pub fn lump_of(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn members(&self, b: usize) -> &[usize] {
        &self.members[b]
    }

    /// `v F`: lump totals.
    pub fn lump_sums<F: Scalar>(&self, v: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.lumps()];
        for (a, x) in v.iter().enumerate() {
            if !x.is_zero() {
                out[self.map[a]] = out[self.map[a]].add(x);
            }
        }
        out
    }

    /// `v Pi_b`: restriction to one lump.
    pub fn restrict<F: Scalar>(&self, v: &[F], b: usize) -> Vec<F> {
        let mut out = vec![F::zero(); v.len()];
        for &a in &self.members[b] {
            out[a] = v[a].clone();
        }
        out
    }
}

fn check_sizes(f: &LumpingFunction, p: &TransitionMatrix) -> Result<()> {
    if f.states() != p.states() {
        return Err(Error::domain(format!("lumping map covers {} states, matrix has {}", f.states(), p.states())));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    MinimalFor,
    Maximal,
    Supplied,
}

/// A subspace of the state vector space closed under `P` and the lump projections.
#[derive(Clone, Debug, PartialEq)]
pub struct GLSpace {
    pub space: Subspace<Rational>,
    pub kind: SpaceKind,
}

impl GLSpace {
    /// `V° = V ∩ ker F`.
    pub fn circ(&self, f: &LumpingFunction) -> Subspace<Rational> {
        circ_of(&self.space, f)
    }
}

/// Intersection of a space with the kernel of the lump-sum map.
pub fn circ_of(space: &Subspace<Rational>, f: &LumpingFunction) -> Subspace<Rational> {
    let images: Vec<Vec<Rational>> = space.basis().iter().map(|v| f.lump_sums(v)).collect();
    let kernel = left_kernel(f.lumps(), &images);
    Subspace::span(
        space.ambient(),
        kernel.basis().iter().map(|c| {
            let mut v = vec![Rational::zero(); space.ambient()];
            for (ci, b) in c.iter().zip(space.basis()) {
                if !ci.is_zero() {
                    for (x, y) in v.iter_mut().zip(b) {
                        x.add_mul(ci, y);
                    }
                }
            }
            v
        }),
    )
}

/// `V(f, P, alpha)`: the smallest space containing each `alpha Pi_b` and closed under `P` and every `Pi_b`.
pub fn minimal_gl_space(f: &LumpingFunction, p: &TransitionMatrix, alpha: &Distribution) -> Result<GLSpace> {
    check_sizes(f, p)?;
    if alpha.len() != p.states() {
        return Err(Error::domain("distribution length does not match the state count"));
    }
    let mut space = Subspace::zero(p.states());
    let mut queue = Vec::new();
    for b in 0..f.lumps() {
        let v = f.restrict(alpha.probabilities(), b);
        if space.insert(&v) {
            queue.push(v);
        }
    }
    while let Some(v) = queue.pop() {
        if space.dim() == space.ambient() {
            break;
        }
        let u = p.apply(&v);
        for b in 0..f.lumps() {
            let piece = f.restrict(&u, b);
            if space.insert(&piece) {
                queue.push(piece);
            }
        }
    }
    Ok(GLSpace { space, kind: SpaceKind::MinimalFor })
}

/// A verdict with a vector witnessing failure.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub certificate: Option<Vec<Rational>>,
}

/// Weak lumping of `MC(alpha, P)`: `V° P F = 0`.
pub fn test_weak_generic(f: &LumpingFunction, p: &TransitionMatrix, alpha: &Distribution) -> Result<Verdict> {
    let v = minimal_gl_space(f, p, alpha)?;
    Ok(stable_verdict(&v.space, f, p))
}

/// Whether `V° P F = 0` for a given space.
pub fn stable_verdict(space: &Subspace<Rational>, f: &LumpingFunction, p: &TransitionMatrix) -> Verdict {
    let circ = circ_of(space, f);
    for v in circ.basis() {
        if f.lump_sums(&p.apply(v)).iter().any(|x| !x.is_zero()) {
            return Verdict { holds: false, certificate: Some(v.clone()) };
        }
    }
    Verdict { holds: true, certificate: None }
}

/// Failure of Dynkin's condition: two states of one lump with different mass into another lump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynkinViolation {
    pub state: usize,
    pub other: usize,
    pub target_lump: usize,
}

/// Dynkin's condition.
pub fn test_strong_generic(f: &LumpingFunction, p: &TransitionMatrix) -> Result<Option<DynkinViolation>> {
    check_sizes(f, p)?;
    let masses: Vec<Vec<Rational>> = (0..p.states())
        .map(|a| {
            let mut m = vec![Rational::zero(); f.lumps()];
            for (y, c) in p.row(a) {
                let b = f.lump_of(*y);
                m[b] = m[b].add(c);
            }
            m
        })
        .collect();
    for b in 0..f.lumps() {
        let first = f.members(b)[0];
        for &a in &f.members(b)[1..] {
            if let Some(c) = (0..f.lumps()).find(|&c| masses[a][c] != masses[first][c]) {
                return Ok(Some(DynkinViolation { state: first, other: a, target_lump: c }));
            }
        }
    }
    Ok(None)
}

/// Exact lumping of `MC(alpha, P)`: every `V Pi_b` has dimension at most 1.
pub fn test_exact_generic(f: &LumpingFunction, p: &TransitionMatrix, alpha: &Distribution) -> Result<Verdict> {
    let v = minimal_gl_space(f, p, alpha)?;
    let circ = v.circ(f);
    let by_dimension = (0..f.lumps()).all(|b| v.space.map(p.states(), |x| f.restrict(x, b)).dim() <= 1);
    debug_assert_eq!(by_dimension, circ.is_zero());
    Ok(Verdict { holds: by_dimension, certificate: circ.basis().first().cloned() })
}

/// Exact solution of `mu P = mu`, `sum mu = 1` for an irreducible chain.
pub fn stationary_distribution(p: &TransitionMatrix) -> Result<Distribution> {
    if !p.is_irreducible() {
        return Err(Error::domain("transition matrix is reducible"));
    }
    let n = p.states();
    if p.is_doubly_stochastic() {
        return Ok(Distribution::uniform(n));
    }
    // columns of P - I are the constraints on mu
    let mut cols: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n]; n];
    for (i, r) in p.rows.iter().enumerate() {
        for (j, c) in r {
            cols[*j][i] = c.clone();
        }
    }
    for (j, col) in cols.iter_mut().enumerate() {
        col[j] = col[j].sub(&Rational::one());
    }
    let kernel = nullspace(n, &cols);
    if kernel.dim() != 1 {
        return Err(Error::Arithmetic(format!("stationary space has dimension {}", kernel.dim())));
    }
    let v = &kernel.basis()[0];
    let total = v.iter().fold(Rational::zero(), |a, b| a.add(b));
    Distribution::new(v.iter().map(|x| x.div(&total).unwrap()).collect())
}

/// A lump-indexed matrix whose rows may be undefined for lumps of zero mass.
#[derive(Clone, Debug, PartialEq)]
pub struct LumpedMatrix {
    pub rows: Vec<Option<Vec<Rational>>>,
}

impl LumpedMatrix {
    pub fn is_fully_defined(&self) -> bool {
        self.rows.iter().all(Option::is_some)
    }

    pub fn dense(&self) -> Option<Vec<Vec<Rational>>> {
        self.rows.iter().cloned().collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&Rational> {
        self.rows[i].as_ref().map(|r| &r[j])
    }
}

/// Pseudo-aggregation `Q(i,j) = sum_{x in i, y in j} mu(x) P(x,y) / mu(i)`.
pub fn lumped_transition_matrix(f: &LumpingFunction, p: &TransitionMatrix, mu: &Distribution) -> Result<LumpedMatrix> {
    check_sizes(f, p)?;
    let m = f.lumps();
    let rows = (0..m)
        .map(|i| {
            let mass = f.members(i).iter().fold(Rational::zero(), |a, &x| a.add(&mu.0[x]));
            if mass.is_zero() {
                return None;
            }
            let mut row = vec![Rational::zero(); m];
            for &x in f.members(i) {
                if mu.0[x].is_zero() {
                    continue;
                }
                for (y, c) in p.row(x) {
                    row[f.lump_of(*y)].add_mul(&mu.0[x], c);
                }
            }
            Some(row.into_iter().map(|q| q.div(&mass).unwrap()).collect())
        })
        .collect();
    Ok(LumpedMatrix { rows })
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// `{v supported on lump b : cond(v)}` where `cond` is linear, given by the images of unit vectors.
fn lump_kernel(f: &LumpingFunction, b: usize, n: usize, image: impl Fn(&[Rational]) -> Vec<Rational>, width: usize) -> Vec<Vec<Rational>> {
    let members = f.members(b);
    let images: Vec<Vec<Rational>> = members.iter().map(|&a| image(&unit(n, a))).collect();
    left_kernel(width, &images)
        .basis()
        .iter()
        .map(|c| {
            let mut v = vec![Rational::zero(); n];
            for (k, &a) in members.iter().enumerate() {
                v[a] = c[k].clone();
            }
            v
        })
        .collect()
}

/// The largest space for which `P` lumps stably with lumped matrix `Q`.
pub fn compute_vmax_generic(f: &LumpingFunction, p: &TransitionMatrix, q: &[Vec<Rational>]) -> Result<GLSpace> {
    check_sizes(f, p)?;
    let n = p.states();
    let m = f.lumps();
    if q.len() != m || q.iter().any(|r| r.len() != m) {
        return Err(Error::domain("lumped matrix has the wrong shape"));
    }
    // v (PF - FQ)
    let defect = |v: &[Rational]| {
        let mut out = f.lump_sums(&p.apply(v));
        let mass = f.lump_sums(v);
        for (b, mb) in mass.iter().enumerate() {
            if !mb.is_zero() {
                for (c, o) in out.iter_mut().enumerate() {
                    o.sub_mul(mb, &q[b][c]);
                }
            }
        }
        out
    };
    let mut space = Subspace::span(n, (0..m).flat_map(|b| lump_kernel(f, b, n, defect, m)));
    let mu = stationary_distribution(p)?;
    let mut steps = 0;
    loop {
        let closed = space.basis().iter().all(|v| space.contains(&p.apply(v)));
        if closed {
            break;
        }
        let current = space.clone();
        let residual = |v: &[Rational]| current.reduce(&p.apply(v));
        let pulled = Subspace::span(n, (0..m).flat_map(|b| lump_kernel(f, b, n, residual, n)));
        space = space.intersect(&pulled)?;
        steps += 1;
        assert!(steps <= n, "maximal space iteration failed to settle");
    }
    if !space.contains(mu.probabilities()) {
        return Err(Error::domain("the stationary chain does not lump weakly with this lumped matrix"));
    }
    Ok(GLSpace { space, kind: SpaceKind::Maximal })
}

/// Exact law of `X_t` given the observed lump sequence `b_0, ..., b_t`.
pub fn conditional_distribution(
    f: &LumpingFunction,
    p: &TransitionMatrix,
    alpha: &Distribution,
    observations: &[usize],
) -> Result<Distribution> {
    check_sizes(f, p)?;
    let mut v = alpha.probabilities().to_vec();
    for (t, &b) in observations.iter().enumerate() {
        if b >= f.lumps() {
            return Err(Error::domain(format!("observation {t} names lump {b}, which does not exist")));
        }
        if t > 0 {
            v = p.apply(&v);
        }
        v = f.restrict(&v, b);
        if v.iter().all(Rational::is_zero) {
            return Err(Error::domain(format!("observation prefix of length {} has probability zero", t + 1)));
        }
    }
    let total = v.iter().fold(Rational::zero(), |a, b| a.add(b));
    Distribution::new(v.into_iter().map(|x| x.div(&total).unwrap()).collect())
}

/// Probability of observing the given lump sequence from `alpha`.
pub fn sequence_probability(f: &LumpingFunction, p: &TransitionMatrix, alpha: &Distribution, observations: &[usize]) -> Rational {
    let mut v = alpha.probabilities().to_vec();
    for (t, &b) in observations.iter().enumerate() {
        if t > 0 {
            v = p.apply(&v);
        }
        v = f.restrict(&v, b);
    }
    v.iter().fold(Rational::zero(), |a, b| a.add(b))
}

/// `P*(x,y) = alpha(y) P(y,x) / alpha(x)` for a stationary `alpha` of full support.
pub fn time_reversal_matrix(p: &TransitionMatrix, alpha: &Distribution) -> Result<TransitionMatrix> {
    let a = alpha.probabilities();
    if a.len() != p.states() {
        return Err(Error::domain("distribution length does not match the state count"));
    }
    if let Some(x) = a.iter().position(Rational::is_zero) {
        return Err(Error::domain(format!("state {x} has zero stationary mass")));
    }
    if p.apply(a) != a {
        return Err(Error::domain("distribution is not stationary"));
    }
    let rows = p
        .transpose_entries()
        .into_iter()
        .enumerate()
        .map(|(x, col)| col.into_iter().map(|(y, c)| (y, a[y].mul(&c).div(&a[x]).unwrap())).collect())
        .collect();
    TransitionMatrix::from_sparse(rows)
}
