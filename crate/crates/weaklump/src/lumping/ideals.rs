//! Minimal and maximal Gurvits–Ledoux ideals, computed inside `C[H]`.

use super::LumpingProblem;
use crate::algebra::{Element, Weight};
use crate::error::{Error, Result};
use crate::linalg::{left_kernel, terms, Subspace};
use crate::markov::Distribution;
use crate::scalar::{Rational, Scalar};

/// An induced left ideal `C[G] U`, held by its part `U` inside `C[H]` (local coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct GLIdeal {
    local: Subspace<Rational>,
    index: usize,
}

impl GLIdeal {
    pub fn local(&self) -> &Subspace<Rational> {
        &self.local
    }

    pub fn dim(&self) -> usize {
        self.index * self.local.dim()
    }

    /// `U° = U ∩ {sum = 0}`, which equals `U (1 - eta_H)` because `eta_H ∈ U`.
    pub fn circ_local(&self) -> Subspace<Rational> {
        let n = self.local.ambient();
        let ones = vec![vec![Rational::one(); n]];
        self.local.intersect(&crate::linalg::nullspace(n, &ones)).expect("same ambient")
    }

    pub fn expand(&self, problem: &LumpingProblem) -> Subspace<Rational> {
        problem.induce(&self.local)
    }

    /// Membership of an element of `C[G]`: every coset piece must lie in `U`.
    pub fn contains(&self, problem: &LumpingProblem, x: &[Rational]) -> bool {
        (0..problem.index()).all(|c| self.local.contains(&problem.local_piece(x, c)))
    }
}

/// Weak lumping verdict with the minimal ideal that decides it.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakVerdict {
    pub holds: bool,
    pub ideal: GLIdeal,
    /// A local vector `u` of the ideal and a coset where `u° w eta_H` is nonzero.
    pub certificate: Option<(Vec<Rational>, usize)>,
}

/// Dimensions of `A_n°` and `B_n°` along the maximal-ideal iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JwTrace {
    pub a_circ: Vec<usize>,
    pub b_circ: Vec<usize>,
}

impl LumpingProblem {
    fn require_irreducible(&self, w: &Weight) -> Result<()> {
        self.check_weight(w)?;
        if !w.is_irreducible() {
            return Err(Error::domain(
                "weight support does not generate the group; use the generic per-distribution test",
            ));
        }
        Ok(())
    }

    /// Smallest left ideal `U` of `C[H]` containing the seeds with every coset piece of `U w` in `U`.
    fn grow(&self, seeds: Vec<Vec<Rational>>, w_terms: &[(usize, Rational)]) -> Subspace<Rational> {
        let mut space = Subspace::zero(self.subgroup.order());
        let mut queue = Vec::new();
        for s in seeds {
            if space.insert(&s) {
                queue.push(s);
            }
        }
        while let Some(u) = queue.pop() {
            if space.dim() == space.ambient() {
                break;
            }
            for i in 0..self.generator_count() {
                let v = self.local_left_mul(i, &u);
                if space.insert(&v) {
                    queue.push(v);
                }
            }
            let product = self.multiply_local(&u, w_terms);
            for c in 0..self.index() {
                let piece = self.local_piece(&product, c);
                if space.insert(&piece) {
                    queue.push(piece);
                }
            }
        }
        space
    }

    /// `L_w`, the minimal Gurvits–Ledoux ideal.
    pub fn compute_lw(&self, w: &Weight) -> Result<GLIdeal> {
        self.require_irreducible(w)?;
        let local = self.grow(vec![self.eta_local()], &terms(w));
        Ok(GLIdeal { local, index: self.index() })
    }

    /// `L_{alpha,w}`: the minimal Gurvits–Ledoux ideal containing `alpha`, with its weak-lumping verdict.
    pub fn compute_l_alpha_w(&self, w: &Weight, alpha: &Distribution) -> Result<WeakVerdict> {
        self.require_irreducible(w)?;
        if alpha.len() != self.group.order() {
            return Err(Error::domain("distribution length is not the group order"));
        }
        let mut seeds: Vec<Vec<Rational>> = (0..self.index()).map(|c| self.local_piece(alpha.probabilities(), c)).collect();
        seeds.push(self.eta_local());
        let local = self.grow(seeds, &terms(w));
        Ok(self.verdict_for(GLIdeal { local, index: self.index() }, w))
    }

    /// First violation of `U° w eta_H = 0`.
    fn circ_violation(&self, ideal: &GLIdeal, w: &Weight) -> Option<(Vec<Rational>, usize)> {
        let t = terms(w);
        for u in ideal.local.basis() {
            let total = u.iter().fold(Rational::zero(), |a, b| a.add(b));
            let eta = self.eta_local::<Rational>();
            let circ: Vec<Rational> = u.iter().zip(&eta).map(|(x, e)| x.sub(&total.mul(e))).collect();
            let product = self.multiply_local(&circ, &t);
            for (c, m) in self.left.members.iter().enumerate() {
                let mass = m.iter().fold(Rational::zero(), |a, &g| a.add(&product[g]));
                if !mass.is_zero() {
                    return Some((u.clone(), c));
                }
            }
        }
        None
    }

    fn verdict_for(&self, ideal: GLIdeal, w: &Weight) -> WeakVerdict {
        let certificate = self.circ_violation(&ideal, w);
        WeakVerdict { holds: certificate.is_none(), ideal, certificate }
    }

    /// Whether the walk lumps weakly for some initial distribution: `L_w (1 - eta_H) w eta_H = 0`.
    pub fn test_weak_weight(&self, w: &Weight) -> Result<WeakVerdict> {
        let lw = self.compute_lw(w)?;
        Ok(self.verdict_for(lw, w))
    }

    /// `{s ∈ S : every coset piece of s w lies in target}`.
    fn pull_back(&self, s: &Subspace<Rational>, target: &Subspace<Rational>, w_terms: &[(usize, Rational)]) -> Subspace<Rational> {
        let n = self.subgroup.order();
        let residuals: Vec<Vec<Rational>> = s
            .basis()
            .iter()
            .map(|v| {
                let product = self.multiply_local(v, w_terms);
                (0..self.index()).flat_map(|c| target.reduce(&self.local_piece(&product, c))).collect()
            })
            .collect();
        let kernel = left_kernel(n * self.index(), &residuals);
        Subspace::span(
            n,
            kernel.basis().iter().map(|coeffs| {
                let mut v = vec![Rational::zero(); n];
                for (c, b) in coeffs.iter().zip(s.basis()) {
                    if !c.is_zero() {
                        for (x, y) in v.iter_mut().zip(b) {
                            x.add_mul(c, y);
                        }
                    }
                }
                v
            }),
        )
    }

    /// `J_w`, the maximal Gurvits–Ledoux ideal, with the dimensions seen along the way.
    pub fn compute_jw(&self, w: &Weight) -> Result<(GLIdeal, JwTrace)> {
        self.require_irreducible(w)?;
        if !self.test_weak_weight(w)?.holds {
            return Err(Error::domain("weight does not lump weakly, so no maximal stable ideal exists"));
        }
        let n = self.subgroup.order();
        let t = terms(w);
        let eta = self.eta_local::<Rational>();
        let ones = vec![vec![Rational::one(); n]];
        let mut a_circ = crate::linalg::nullspace(n, &ones);
        let mut trace = JwTrace { a_circ: vec![a_circ.dim()], b_circ: Vec::new() };
        loop {
            let b_circ = self.pull_back(&a_circ, &a_circ, &t);
            trace.b_circ.push(b_circ.dim());
            let mut b_full = b_circ.clone();
            b_full.insert(&eta);
            let eta_product = self.multiply_local(&eta, &t);
            if (0..self.index()).any(|c| !b_full.contains(&self.local_piece(&eta_product, c))) {
                return Err(Error::domain("eta_H w leaves the candidate ideal; weight does not lump weakly"));
            }
            let next = self.pull_back(&b_circ, &b_full, &t);
            trace.a_circ.push(next.dim());
            if next == a_circ {
                break;
            }
            assert!(next.dim() < a_circ.dim(), "maximal-ideal iteration must shrink");
            a_circ = next;
        }
        let mut local = a_circ;
        local.insert(&eta);
        Ok((GLIdeal { local, index: self.index() }, trace))
    }

    /// Whether `MC(alpha, w)` lumps weakly: `alpha ∈ J_w`. False when `w` does not lump weakly at all.
    pub fn test_weak_distribution(&self, w: &Weight, alpha: &Distribution) -> Result<bool> {
        self.require_irreducible(w)?;
        if alpha.len() != self.group.order() {
            return Err(Error::domain("distribution length is not the group order"));
        }
        if !self.test_weak_weight(w)?.holds {
            return Ok(false);
        }
        let (jw, _) = self.compute_jw(w)?;
        Ok(jw.contains(self, alpha.probabilities()))
    }

    /// `C[G] e` as an ideal in local form, for rational `e` in `C[H]`.
    pub fn ideal_of(&self, e: &Element<Rational>) -> GLIdeal {
        let seed = self.global_to_local(e);
        let mut local = Subspace::zero(self.subgroup.order());
        let mut queue = Vec::new();
        if local.insert(&seed) {
            queue.push(seed);
        }
        while let Some(u) = queue.pop() {
            for i in 0..self.generator_count() {
                let v = self.local_left_mul(i, &u);
                if local.insert(&v) {
                    queue.push(v);
                }
            }
        }
        GLIdeal { local, index: self.index() }
    }
}
