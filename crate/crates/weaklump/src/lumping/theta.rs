//! Dimension of the solution space of the stable-ideal conditions, and the
//! character-subset test for abelian `H`.

use std::collections::HashMap;

use super::LumpingProblem;
use crate::algebra::{characters, CharacterTable, Element};
use crate::error::{Error, Result};
use crate::exec::{self, ExecutionMode};
use crate::linalg::Subspace;
use crate::scalar::{Cyclotomic, Rational, Scalar};

/// Solution-space dimension, total and per double coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaDimension {
    pub total: usize,
    pub per_double_coset: Vec<usize>,
}

fn sparse<F: Scalar>(e: &Element<F>) -> Vec<(usize, F)> {
    e.support().into_iter().map(|g| (g, e.coeff(g).clone())).collect()
}

impl LumpingProblem {
    /// Image of a single group element under `g -> (e g (1-e), (e - eta_H) g eta_H)`.
    fn theta_image<F: Scalar>(
        &self,
        g: usize,
        e: &[(usize, F)],
        e_minus_eta: &[(usize, F)],
        coords: &HashMap<usize, usize>,
    ) -> Vec<F> {
        let size = coords.len();
        let grp = &self.group;
        let mut out = vec![F::zero(); 2 * size];
        // e g - e g e
        let mut eg: Vec<(usize, F)> = e.iter().map(|(h, c)| (grp.mul(*h, g), c.clone())).collect();
        eg.sort_by_key(|(x, _)| *x);
        for (x, c) in &eg {
            out[coords[x]] = out[coords[x]].add(c);
        }
        for (x, c) in &eg {
            for (h, d) in e {
                let y = grp.mul(*x, *h);
                out[coords[&y]].sub_mul(c, d);
            }
        }
        // (e - eta_H) g eta_H
        let scale = F::from_rational(&Rational::new(1, self.subgroup.order() as i64));
        for (h, c) in e_minus_eta {
            let x = grp.mul(*h, g);
            let cs = c.mul(&scale);
            for &k in self.subgroup.members() {
                let y = grp.mul(x, k);
                let slot = &mut out[size + coords[&y]];
                *slot = slot.add(&cs);
            }
        }
        out
    }

    fn theta_block<F: Scalar>(&self, members: &[usize], e: &[(usize, F)], e_minus_eta: &[(usize, F)]) -> usize {
        let coords: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let images: Vec<Vec<F>> = members.iter().map(|&g| self.theta_image(g, e, e_minus_eta, &coords)).collect();
        members.len() - Subspace::span(2 * members.len(), &images).dim()
    }
}

/// Dimension of `{w : e w (1-e) = 0, (e - eta_H) w eta_H = 0}`, split over double cosets.
pub fn theta_dimension<F: Scalar>(problem: &LumpingProblem, e: &Element<F>, mode: ExecutionMode) -> Result<ThetaDimension> {
    if !e.in_e_bullet(problem.subgroup()) {
        return Err(Error::domain("idempotent must lie in C[H], square to itself and satisfy eta_H e = eta_H"));
    }
    let eta = Element::<F>::eta_subgroup(problem.subgroup());
    let e_terms = sparse(e);
    let diff = sparse(&e.try_sub(&eta)?);
    let classes = &problem.double_cosets().members;
    let per = exec::map(mode, classes, |m| problem.theta_block(m, &e_terms, &diff));
    Ok(ThetaDimension { total: per.iter().sum(), per_double_coset: per })
}

/// The same dimension from one rank computation over the whole group, without the split.
pub fn theta_dimension_direct<F: Scalar>(problem: &LumpingProblem, e: &Element<F>) -> Result<usize> {
    if !e.in_e_bullet(problem.subgroup()) {
        return Err(Error::domain("idempotent must lie in C[H], square to itself and satisfy eta_H e = eta_H"));
    }
    let eta = Element::<F>::eta_subgroup(problem.subgroup());
    let g = problem.group();
    let one_minus_e = Element::one(g).try_sub(e)?;
    let diff = e.try_sub(&eta)?;
    let images: Vec<Vec<F>> = (0..g.order())
        .map(|x| {
            let d = Element::<F>::delta(g, x);
            let mut v = e.convolve(&d).unwrap().convolve(&one_minus_e).unwrap().into_coeffs();
            v.extend(diff.convolve(&d).unwrap().convolve(&eta).unwrap().into_coeffs());
            v
        })
        .collect();
    Ok(g.order() - Subspace::span(2 * g.order(), &images).dim())
}

/// Which character subsets the abelian test searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SubsetMode {
    /// Every subset containing the trivial character.
    #[default]
    All,
    /// Only subsets closed under complex conjugation.
    RealOnly,
}

/// Outcome of the abelian test.
#[derive(Clone, Debug)]
pub struct AbelianVerdict {
    pub holds: bool,
    pub table: CharacterTable,
    /// Indices into `table.characters` of the first subset that works.
    pub witness: Option<Vec<usize>>,
    /// `sum_{beta in witness} e_beta`.
    pub idempotent: Option<Element<Cyclotomic>>,
    pub subsets_tried: usize,
}

/// Largest abelian subgroup order the subset search accepts.
pub const ABELIAN_ORDER_CAP: usize = 20;

fn subsets_in_order(n: usize) -> impl Iterator<Item = Vec<usize>> {
    // subsets of {1..n-1}, by size then lexicographically, each with 0 prepended
    (0..n).flat_map(move |k| {
        let mut out = Vec::new();
        let mut combo: Vec<usize> = (1..=k).collect();
        if k <= n.saturating_sub(1) {
            loop {
                let mut p = vec![0];
                p.extend(&combo);
                out.push(p);
                // next combination of size k from 1..n-1
                let mut i = k;
                loop {
                    if i == 0 {
                        return out;
                    }
                    i -= 1;
                    if combo[i] < n - k + i {
                        combo[i] += 1;
                        for j in i + 1..k {
                            combo[j] = combo[j - 1] + 1;
                        }
                        break;
                    }
                }
            }
        }
        out
    })
}

/// Searches for `P ∋ 1` with `<e_beta x e_gamma, w> = 0` for all `beta ∈ P`, `gamma ∉ P or gamma = 1`,
/// `(beta, gamma) != (1, 1)`, and every double coset representative `x`.
pub fn abelian_weak_test(
    problem: &LumpingProblem,
    w: &Element<Rational>,
    subsets: SubsetMode,
    mode: ExecutionMode,
) -> Result<AbelianVerdict> {
    let h = problem.subgroup();
    if !h.is_abelian() {
        return Err(Error::domain("subgroup is not abelian"));
    }
    if h.order() > ABELIAN_ORDER_CAP {
        return Err(Error::Resource(format!("abelian subgroup of order {} exceeds the search cap {ABELIAN_ORDER_CAP}", h.order())));
    }
    let table = characters(h)?;
    let n = table.len();
    let g = problem.group();
    let idempotents: Vec<Vec<(usize, Cyclotomic)>> = (0..n).map(|i| sparse(&table.idempotent(i))).collect();
    let reps = problem.double_cosets().representatives.clone();
    // zero[x][beta][gamma]
    let zero: Vec<Vec<Vec<bool>>> = exec::map(mode, &reps, |&x| {
        (0..n)
            .map(|b| {
                (0..n)
                    .map(|c| {
                        let mut acc = Cyclotomic::zero();
                        for (hb, eb) in &idempotents[b] {
                            let left = g.mul(*hb, x);
                            for (hc, ec) in &idempotents[c] {
                                let y = g.mul(left, *hc);
                                let wy = w.coeff(y);
                                if !wy.is_zero() {
                                    acc.add_mul(&eb.mul(ec).conj(), &Cyclotomic::from_rational(wy));
                                }
                            }
                        }
                        acc.is_zero()
                    })
                    .collect()
            })
            .collect()
    });
    let mut tried = 0;
    for p in subsets_in_order(n) {
        if subsets == SubsetMode::RealOnly && !p.iter().all(|&b| p.contains(&table.conjugate_index(b))) {
            continue;
        }
        tried += 1;
        let inside: Vec<bool> = (0..n).map(|i| p.contains(&i)).collect();
        let ok = zero.iter().all(|z| {
            p.iter().all(|&b| (0..n).filter(|&c| !inside[c] || c == 0).all(|c| (b == 0 && c == 0) || z[b][c]))
        });
        if ok {
            let e = p.iter().fold(Element::zero(g), |acc, &b| &acc + &table.idempotent(b));
            return Ok(AbelianVerdict { holds: true, table, witness: Some(p), idempotent: Some(e), subsets_tried: tried });
        }
    }
    Ok(AbelianVerdict { holds: false, table, witness: None, idempotent: None, subsets_tried: tried })
}
