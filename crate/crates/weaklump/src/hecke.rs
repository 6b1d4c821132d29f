//! Orbital matrices and the Hecke algebra `eta_H C[G] eta_H`.
//!
//! The lumped transition matrices of weakly lumping walks are exactly the
//! stochastic matrices commuting with the action of `G` on `G/H`, and each of
//! those is driven by a weight in the Hecke algebra.

use crate::algebra::{Element, Weight};
use crate::error::{Error, Result};
use crate::lumping::LumpingProblem;
use crate::scalar::{Rational, Scalar};

/// Zero-one matrix of one `G`-orbit on pairs of left cosets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitalMatrix {
    pub double_coset: usize,
    pub entries: Vec<Vec<u8>>,
    /// Ones per row: `|HxH| / |H|`.
    pub row_count: usize,
}

impl OrbitalMatrix {
    pub fn to_rational(&self) -> Vec<Vec<Rational>> {
        self.entries.iter().map(|r| r.iter().map(|&e| Rational::from_int(e as i64)).collect()).collect()
    }
}

/// `M(HxH)` for every double coset, in double coset order.
pub fn orbital_matrices(problem: &LumpingProblem) -> Vec<OrbitalMatrix> {
    let g = problem.group();
    let left = problem.left_cosets();
    let double = problem.double_cosets();
    let m = problem.index();
    let mut out: Vec<OrbitalMatrix> = (0..double.count())
        .map(|d| OrbitalMatrix {
            double_coset: d,
            entries: vec![vec![0; m]; m],
            row_count: double.sizes[d] / problem.subgroup().order(),
        })
        .collect();
    for (a, &ra) in left.representatives.iter().enumerate() {
        let inv = g.inv(ra);
        for (b, &rb) in left.representatives.iter().enumerate() {
            out[double.class_of[g.mul(inv, rb)]].entries[a][b] = 1;
        }
    }
    out
}

/// An element `sum_x c_x eta_H x eta_H`, one coefficient per double coset.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckeElement {
    pub coeffs: Vec<Rational>,
}

impl HeckeElement {
    /// The element of `C[G]`: constant `c_x / |HxH|` on each double coset.
    pub fn to_element(&self, problem: &LumpingProblem) -> Element<Rational> {
        let double = problem.double_cosets();
        let mut e = Element::zero(problem.group());
        for (d, members) in double.members.iter().enumerate() {
            let v = self.coeffs[d].div(&Rational::from_int(double.sizes[d] as i64)).unwrap();
            for &g in members {
                e.set_coeff(g, v.clone());
            }
        }
        e
    }

    /// Common value of the element on `HxH`.
    pub fn value_on(&self, problem: &LumpingProblem, double_coset: usize) -> Rational {
        self.coeffs[double_coset].div(&Rational::from_int(problem.double_cosets().sizes[double_coset] as i64)).unwrap()
    }
}

/// `eta_H w eta_H` in the double coset basis; the coefficient of `eta_H x eta_H` is `w(HxH)`.
pub fn hecke_project(problem: &LumpingProblem, w: &Element<Rational>) -> Result<HeckeElement> {
    if !std::sync::Arc::ptr_eq(w.group(), problem.group()) {
        return Err(Error::domain("element belongs to a different group"));
    }
    Ok(HeckeElement { coeffs: w.class_sums(&problem.double_cosets().members) })
}

/// Product in the double coset basis:
/// `(eta x eta)(eta y eta) = (1/|H|) sum_h eta (x h y) eta`.
pub fn hecke_multiply(problem: &LumpingProblem, a: &HeckeElement, b: &HeckeElement) -> HeckeElement {
    let g = problem.group();
    let double = problem.double_cosets();
    let h = problem.subgroup();
    let n = double.count();
    let scale = Rational::new(1, h.order() as i64);
    let mut coeffs = vec![Rational::zero(); n];
    for (i, ca) in a.coeffs.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.coeffs.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            let c = ca.mul(cb).mul(&scale);
            let (x, y) = (double.representatives[i], double.representatives[j]);
            for &k in h.members() {
                let d = double.class_of[g.mul(g.mul(x, k), y)];
                coeffs[d] = coeffs[d].add(&c);
            }
        }
    }
    HeckeElement { coeffs }
}

/// Result of [`check_q_characterization`].
#[derive(Clone, Debug, PartialEq)]
pub struct QCharacterization {
    pub invariant: bool,
    /// `Q(H, xH)` per double coset, when invariant.
    pub coefficients: Option<Vec<Rational>>,
    /// A Hecke weight whose lumped matrix is `Q`, when invariant.
    pub realizing_weight: Option<HeckeElement>,
    /// First pair of cosets where invariance fails.
    pub violation: Option<(usize, usize)>,
}

/// Whether `Q` is `G`-invariant, `Q(gH, g'H) = Q(kgH, kg'H)`, and if so the weight realizing it.
///
/// The realizing weight is `sum_x m_x Q(H, xH) eta_H x eta_H` with `m_x = |HxH|/|H|`.
pub fn check_q_characterization(problem: &LumpingProblem, q: &[Vec<Rational>]) -> Result<QCharacterization> {
    let m = problem.index();
    if q.len() != m || q.iter().any(|r| r.len() != m) {
        return Err(Error::domain(format!("matrix must be {m} x {m}")));
    }
    for (i, row) in q.iter().enumerate() {
        if row.iter().any(|x| x < &Rational::zero()) {
            return Err(Error::domain(format!("row {i} has a negative entry")));
        }
        if row.iter().fold(Rational::zero(), |a, b| a.add(b)) != Rational::one() {
            return Err(Error::domain(format!("row {i} does not sum to 1")));
        }
    }
    let orbitals = orbital_matrices(problem);
    let left = problem.left_cosets();
    let double = problem.double_cosets();
    let coefficients: Vec<Rational> =
        double.representatives.iter().map(|&x| q[0][left.coset_of[x]].clone()).collect();
    for o in &orbitals {
        for (a, row) in o.entries.iter().enumerate() {
            for (b, &e) in row.iter().enumerate() {
                if e == 1 && q[a][b] != coefficients[o.double_coset] {
                    return Ok(QCharacterization {
                        invariant: false,
                        coefficients: None,
                        realizing_weight: None,
                        violation: Some((a, b)),
                    });
                }
            }
        }
    }
    let weight = HeckeElement {
        coeffs: coefficients
            .iter()
            .zip(&orbitals)
            .map(|(c, o)| c.mul(&Rational::from_int(o.row_count as i64)))
            .collect(),
    };
    Ok(QCharacterization { invariant: true, coefficients: Some(coefficients), realizing_weight: Some(weight), violation: None })
}

/// Lumped matrix of a Hecke weight.
pub fn realized_matrix(problem: &LumpingProblem, w: &HeckeElement) -> Result<Vec<Vec<Rational>>> {
    problem.lumped_matrix(&Weight::new(w.to_element(problem))?)
}

/// Outcome of [`verify_hecke_isomorphism`] on all pairs of basis elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeckeIsomorphism {
    /// `phi(ab) = phi(a) phi(b)` with `phi(eta x eta) = M(HxH)/m_x`.
    pub homomorphism: bool,
    /// `phi(ab) = phi(b) phi(a)`.
    pub anti_homomorphism: bool,
    /// The images are linearly independent.
    pub injective: bool,
}

impl HeckeIsomorphism {
    pub fn holds(&self) -> bool {
        self.homomorphism && self.injective
    }
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let mut out = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j].add_mul(&a[i][k], &b[k][j]);
            }
        }
    }
    out
}

/// Image of a Hecke element under `eta x eta -> M(HxH)/m_x`.
pub fn hecke_image(orbitals: &[OrbitalMatrix], e: &HeckeElement) -> Vec<Vec<Rational>> {
    let n = orbitals[0].entries.len();
    let mut out = vec![vec![Rational::zero(); n]; n];
    for (o, c) in orbitals.iter().zip(&e.coeffs) {
        let s = c.div(&Rational::from_int(o.row_count as i64)).unwrap();
        for (i, row) in o.entries.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x == 1 {
                    out[i][j] = out[i][j].add(&s);
                }
            }
        }
    }
    out
}

/// Checks the map `eta_H x eta_H -> M(HxH)/m_x` on every pair of basis elements.
pub fn verify_hecke_isomorphism(problem: &LumpingProblem) -> HeckeIsomorphism {
    let orbitals = orbital_matrices(problem);
    let n = orbitals.len();
    let basis: Vec<HeckeElement> = (0..n)
        .map(|i| {
            let mut coeffs = vec![Rational::zero(); n];
            coeffs[i] = Rational::one();
            HeckeElement { coeffs }
        })
        .collect();
    let images: Vec<Vec<Vec<Rational>>> = basis.iter().map(|b| hecke_image(&orbitals, b)).collect();
    let mut homomorphism = true;
    let mut anti_homomorphism = true;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let lhs = hecke_image(&orbitals, &hecke_multiply(problem, a, b));
            homomorphism &= lhs == mat_mul(&images[i], &images[j]);
            anti_homomorphism &= lhs == mat_mul(&images[j], &images[i]);
        }
    }
    // orbitals partition the pairs, so distinct images have disjoint supports
    let m = problem.index();
    let mut covered = vec![vec![0u32; m]; m];
    for o in &orbitals {
        for (i, row) in o.entries.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                covered[i][j] += x as u32;
            }
        }
    }
    let injective = covered.iter().all(|r| r.iter().all(|&c| c == 1)) && orbitals.iter().all(|o| o.row_count > 0);
    HeckeIsomorphism { homomorphism, anti_homomorphism, injective }
}
