//! Exact subspaces in reduced row echelon form, and the group-algebra operations on them.

use std::sync::Arc;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::group::{cosets, CosetDecomposition, FiniteGroup, Side, Subgroup};
use crate::scalar::Scalar;

/// A subspace of `F^n` held as the canonical reduced row echelon basis.
///
/// Two subspaces are equal exactly when their bases are equal.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F> {
    ambient: usize,
    rows: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

fn is_zero_vec<F: Scalar>(v: &[F]) -> bool {
    v.iter().all(Scalar::is_zero)
}

impl<F: Scalar> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| {
                let mut r = vec![F::zero(); ambient];
                r[i] = F::one();
                r
            })
            .collect();
        Subspace { ambient, rows, pivots: (0..ambient).collect() }
    }

    pub fn span<I, V>(ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[F]>,
    {
        let mut s = Self::zero(ambient);
        for v in vectors {
            s.insert(v.as_ref());
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_len(&self, v: &[F]) {
        assert_eq!(v.len(), self.ambient, "vector length does not match the ambient dimension");
    }

    /// `v` minus its component along the echelon basis; zero iff `v` lies in the space.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        self.check_len(v);
        let mut r = v.to_vec();
        self.reduce_in_place(&mut r);
        r
    }

    fn reduce_in_place(&self, r: &mut [F]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r[p].is_zero() {
                continue;
            }
            let c = r[p].clone();
            for (x, y) in r.iter_mut().zip(row).skip(p) {
                if !y.is_zero() {
                    x.sub_mul(&c, y);
                }
            }
        }
    }

    pub fn contains(&self, v: &[F]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Adds `v` to the space; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[F]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let lead = r[p].inv().expect("nonzero pivot");
        for x in r.iter_mut().skip(p) {
            if !x.is_zero() {
                *x = x.mul(&lead);
            }
        }
        for row in &mut self.rows {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r).skip(p) {
                if !y.is_zero() {
                    x.sub_mul(&c, y);
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::domain(format!("ambient dimensions {} and {} differ", self.ambient, other.ambient)));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r);
        }
        Ok(s)
    }

    /// Zassenhaus: echelonize `[u | u]` and `[v | 0]`; rows starting in the right half span the meet.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let n = self.ambient;
        let mut big = Subspace::zero(2 * n);
        let mut buf = vec![F::zero(); 2 * n];
        for u in &self.rows {
            buf[..n].clone_from_slice(u);
            buf[n..].clone_from_slice(u);
            big.insert(&buf);
        }
        for v in &other.rows {
            buf[..n].clone_from_slice(v);
            buf[n..].iter_mut().for_each(|x| *x = F::zero());
            big.insert(&buf);
        }
        Ok(Subspace::span(n, big.rows.iter().zip(&big.pivots).filter(|(_, &p)| p >= n).map(|(r, _)| r[n..].to_vec())))
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.rows.iter().all(|r| other.contains(r))
    }

    /// `{x : <v, x> = 0 for all v}` for the inner product that conjugates its first argument.
    pub fn orthogonal_complement(&self) -> Self {
        let conj: Vec<Vec<F>> = self.rows.iter().map(|r| r.iter().map(Scalar::conj).collect()).collect();
        nullspace(self.ambient, &conj)
    }

    /// Image of the basis under a linear map.
    pub fn map<G: Fn(&[F]) -> Vec<F>>(&self, ambient: usize, f: G) -> Self {
        Subspace::span(ambient, self.rows.iter().map(|r| f(r)))
    }
}

/// Right kernel `{x : r . x = 0 for every row r}`.
pub fn nullspace<F: Scalar>(ambient: usize, rows: &[Vec<F>]) -> Subspace<F> {
    let e = Subspace::span(ambient, rows);
    let mut is_pivot = vec![false; ambient];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for f in (0..ambient).filter(|&c| !is_pivot[c]) {
        let mut x = vec![F::zero(); ambient];
        x[f] = F::one();
        for (row, &p) in e.rows.iter().zip(&e.pivots) {
            if !row[f].is_zero() {
                x[p] = row[f].neg();
            }
        }
        basis.push(x);
    }
    Subspace::span(ambient, basis)
}

/// Coefficient vectors `c` with `sum_i c_i v_i = 0`.
pub fn left_kernel<F: Scalar>(ambient: usize, vectors: &[Vec<F>]) -> Subspace<F> {
    let k = vectors.len();
    let mut big = Subspace::zero(ambient + k);
    for (i, v) in vectors.iter().enumerate() {
        assert_eq!(v.len(), ambient);
        let mut row = v.clone();
        row.resize(ambient + k, F::zero());
        row[ambient + i] = F::one();
        big.insert(&row);
    }
    Subspace::span(k, big.rows.iter().zip(&big.pivots).filter(|(_, &p)| p >= ambient).map(|(r, _)| r[ambient..].to_vec()))
}

pub fn rank<F: Scalar>(ambient: usize, vectors: &[Vec<F>]) -> usize {
    Subspace::span(ambient, vectors).dim()
}

/// `s * v` for the i-th group generator `s`.
pub fn left_translate<F: Scalar>(group: &FiniteGroup, generator: usize, v: &[F]) -> Vec<F> {
    let table = group.left_multiplication_by_generator(generator);
    let mut out = vec![F::zero(); v.len()];
    for (x, c) in v.iter().enumerate() {
        if !c.is_zero() {
            out[table[x] as usize] = c.clone();
        }
    }
    out
}

/// `v * w` for a coefficient vector `v` and a sparse list of terms of `w`.
pub fn right_multiply_vector<F: Scalar>(group: &FiniteGroup, v: &[F], w_terms: &[(usize, F)]) -> Vec<F> {
    let mut out = vec![F::zero(); v.len()];
    for (x, a) in v.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (y, b) in w_terms {
            out[group.mul(x, *y)].add_mul(a, b);
        }
    }
    out
}

pub fn terms<F: Scalar>(w: &Element<F>) -> Vec<(usize, F)> {
    w.support().into_iter().map(|g| (g, w.coeff(g).clone())).collect()
}

/// Smallest left ideal of the group algebra containing `seed`.
pub fn left_ideal_closure<F: Scalar>(group: &Arc<FiniteGroup>, seed: &Subspace<F>) -> LeftIdeal<F> {
    assert_eq!(seed.ambient(), group.order());
    let mut space = seed.clone();
    let mut queue: Vec<Vec<F>> = seed.basis().to_vec();
    while let Some(v) = queue.pop() {
        if space.dim() == space.ambient() {
            break;
        }
        for i in 0..group.generators().len() {
            let u = left_translate(group, i, &v);
            if space.insert(&u) {
                queue.push(u);
            }
        }
    }
    LeftIdeal { group: Arc::clone(group), space }
}

/// `span { v w : v in V }`.
pub fn right_multiply_space<F: Scalar>(space: &Subspace<F>, w: &Element<F>) -> Subspace<F> {
    let t = terms(w);
    let g = w.group();
    space.map(space.ambient(), |v| right_multiply_vector(g, v, &t))
}

/// Coset projections `pi_{bH}(V)` for every left coset.
pub fn project_space<F: Scalar>(space: &Subspace<F>, decomposition: &CosetDecomposition) -> Vec<Subspace<F>> {
    decomposition
        .members
        .iter()
        .map(|m| {
            space.map(space.ambient(), |v| {
                let mut out = vec![F::zero(); v.len()];
                for &g in m {
                    out[g] = v[g].clone();
                }
                out
            })
        })
        .collect()
}

/// A left ideal of the group algebra.
#[derive(Clone, Debug)]
pub struct LeftIdeal<F> {
    group: Arc<FiniteGroup>,
    space: Subspace<F>,
}

impl<F: Scalar> PartialEq for LeftIdeal<F> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.space == other.space
    }
}

impl<F: Scalar> LeftIdeal<F> {
    /// Checks closure under left multiplication by the generators.
    pub fn new(group: &Arc<FiniteGroup>, space: Subspace<F>) -> Result<Self> {
        if space.ambient() != group.order() {
            return Err(Error::domain("ambient dimension is not the group order"));
        }
        for v in space.basis() {
            for i in 0..group.generators().len() {
                if !space.contains(&left_translate(group, i, v)) {
                    return Err(Error::domain("space is not closed under left multiplication"));
                }
            }
        }
        Ok(LeftIdeal { group: Arc::clone(group), space })
    }

    /// `C[G] x` for a single element.
    pub fn generated_by(x: &Element<F>) -> Self {
        left_ideal_closure(x.group(), &Subspace::span(x.group().order(), [x.coeffs()]))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn space(&self) -> &Subspace<F> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn contains(&self, x: &Element<F>) -> bool {
        self.space.contains(x.coeffs())
    }

    /// Whether `L = sum_b pi_{bH}(L)` over the left cosets of `h`.
    pub fn is_induced(&self, h: &Subgroup) -> bool {
        let d = cosets(h, Side::Left);
        let total: usize = project_space(&self.space, &d).iter().map(Subspace::dim).sum();
        total == self.space.dim()
    }

    /// `L° = L (1 - eta_H)` for an induced ideal containing `eta_G`.
    pub fn circ(&self, h: &Subgroup) -> Result<Subspace<F>> {
        let eta_g = Element::<F>::eta_subgroup(&Subgroup::whole(&self.group));
        if !self.contains(&eta_g) {
            return Err(Error::domain("ideal does not contain eta_G"));
        }
        if !self.is_induced(h) {
            return Err(Error::domain("ideal is not induced from the subgroup"));
        }
        let one_minus = &Element::one(&self.group) - &Element::eta_subgroup(h);
        Ok(right_multiply_space(&self.space, &one_minus))
    }

    /// `Lw ⊆ L`.
    pub fn is_stable_under(&self, w: &Element<F>) -> bool {
        right_multiply_space(&self.space, w).is_subspace_of(&self.space)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::group::Subgroup;
    use crate::scalar::{Cyclotomic, Rational};
    use crate::shuffles;

    fn qv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    #[test]
    fn echelon_basics() {
        let s = Subspace::span(3, [qv(&[2, 4, 6]), qv(&[1, 2, 3]), qv(&[0, 1, 1])]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.pivots(), &[0, 1]);
        assert_eq!(s.basis()[0], qv(&[1, 0, 1]));
        assert!(s.contains(&qv(&[1, 1, 2])));
        assert!(!s.contains(&qv(&[0, 0, 1])));
        assert_eq!(s.intersect(&s).unwrap(), s);
        let z = Subspace::<Rational>::zero(3);
        assert_eq!(z.orthogonal_complement(), Subspace::full(3));
        assert_eq!(s.orthogonal_complement().orthogonal_complement(), s);
        assert!(s.sum(&Subspace::zero(4)).is_err());
    }

    #[test]
    fn kernels() {
        let rows = vec![qv(&[1, 1, 0]), qv(&[0, 1, 1])];
        let k = nullspace(3, &rows);
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&qv(&[1, -1, 1])));
        let lk = left_kernel(3, &[qv(&[1, 2, 3]), qv(&[2, 4, 6]), qv(&[0, 0, 1])]);
        assert_eq!(lk.dim(), 1);
        assert!(lk.contains(&qv(&[2, -1, 0])));
        assert_eq!(rank(3, &rows), 2);
    }

    #[test]
    fn complex_complement_uses_conjugation() {
        let i = Cyclotomic::zeta_power(4, 1);
        let one = Cyclotomic::one();
        let w = Subspace::span(2, [vec![one.clone(), i.clone()]]);
        let perp = w.orthogonal_complement();
        assert_eq!(perp.dim(), 1);
        let v = &perp.basis()[0];
        let ip = one.conj().mul(&v[0]).add(&i.conj().mul(&v[1]));
        assert!(ip.is_zero());
    }

    #[test]
    fn induced_module_of_middle_swap() {
        let g = shuffles::sym4();
        let t = shuffles::middle_swap_subgroup(&g);
        let h = shuffles::top_card_subgroup(&g);
        let eta_t = Element::<Rational>::eta_subgroup(&t);
        let ideal = LeftIdeal::generated_by(&eta_t);
        assert_eq!(ideal.dim(), 12);
        let translates: Vec<Vec<Rational>> = (0..24).map(|x| Element::delta(&g, x).convolve(&eta_t).unwrap().into_coeffs()).collect();
        assert_eq!(Subspace::span(24, &translates), *ideal.space());
        assert!(ideal.contains(&Element::eta_subgroup(&Subgroup::whole(&g))));
        assert!(ideal.is_induced(&h));
        let left = cosets(&h, Side::Left);
        let local = &project_space(ideal.space(), &left)[0];
        let expected = left_ideal_closure(&g, &Subspace::span(24, [eta_t.coeffs()]));
        let in_h = Subspace::span(24, h.members().iter().map(|&x| Element::delta(&g, x).convolve(&eta_t).unwrap().into_coeffs()));
        assert_eq!(*local, in_h);
        assert_eq!(expected, ideal);
        assert_eq!(ideal.circ(&h).unwrap().dim(), 8);
        let w = shuffles::frustrating_shuffle(&g, &Rational::new(3, 4));
        assert!(ideal.is_stable_under(w.element()));
    }

    #[test]
    fn closures() {
        let g = shuffles::sym4();
        let h = shuffles::top_card_subgroup(&g);
        let eta_g = Element::<Rational>::eta_subgroup(&Subgroup::whole(&g));
        assert_eq!(LeftIdeal::generated_by(&eta_g).dim(), 1);
        let whole = LeftIdeal::generated_by(&Element::<Rational>::one(&g));
        assert_eq!(whole.dim(), 24);
        assert_eq!(whole.circ(&h).unwrap().dim(), 20);
        let eta_h = Element::<Rational>::eta_subgroup(&h);
        let perm = LeftIdeal::generated_by(&eta_h);
        assert!(perm.circ(&h).unwrap().is_zero());
        let ker = LeftIdeal::generated_by(&(&Element::one(&g) - &eta_h));
        assert!(ker.is_induced(&h));
        assert!(LeftIdeal::<Rational>::new(&g, Subspace::zero(24)).unwrap().is_induced(&h));
        let s = Subspace::span(24, [eta_h.coeffs()]);
        assert!(right_multiply_space(&s, &Element::one(&g)) == s);
        assert!(right_multiply_space(&s, &Element::zero(&g)).is_zero());
        assert!(LeftIdeal::new(&g, s).is_err());
    }

    fn random_space(n: usize) -> impl Strategy<Value = Subspace<Rational>> {
        prop::collection::vec(prop::collection::vec(-2i64..3, n), 0..n + 1).prop_map(move |rows| Subspace::span(n, rows.iter().map(|r| qv(r))))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn grassmann_identity(u in random_space(6), v in random_space(6)) {
            let s = u.sum(&v).unwrap();
            let i = u.intersect(&v).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), u.dim() + v.dim());
            prop_assert!(i.is_subspace_of(&u) && i.is_subspace_of(&v));
            prop_assert_eq!(u.orthogonal_complement().dim() + u.dim(), 6);
        }

        #[test]
        fn echelon_form_is_canonical(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 1..5), mix in prop::collection::vec(-2i64..3, 16)) {
            let a = Subspace::span(5, rows.iter().map(|r| qv(r)));
            let mut other: Vec<Vec<Rational>> = Vec::new();
            for (k, _) in rows.iter().enumerate() {
                let mut v = qv(&[0; 5]);
                for (j, r) in rows.iter().enumerate() {
                    let c = Rational::from_int(mix[(k * 4 + j) % 16] + if j == k { 5 } else { 0 });
                    for (x, y) in v.iter_mut().zip(qv(r)) {
                        *x = &*x + &(&c * &y);
                    }
                }
                other.push(v);
            }
            let b = Subspace::span(5, other.iter().rev());
            if b.dim() == a.dim() {
                prop_assert_eq!(a, b);
            } else {
                prop_assert!(b.is_subspace_of(&a));
            }
        }

        #[test]
        fn generator_closure_matches_full_closure(seed in prop::collection::vec(-1i64..2, 24)) {
            let g = shuffles::sym4();
            let v = qv(&seed);
            let ideal = left_ideal_closure(&g, &Subspace::span(24, [v.clone()]));
            let x = Element::from_coeffs(&g, v);
            let brute = Subspace::span(24, (0..24).map(|s| Element::delta(&g, s).convolve(&x).unwrap().into_coeffs()));
            prop_assert_eq!(ideal.space(), &brute);
        }
    }
}
