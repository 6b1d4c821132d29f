//! Group algebra elements with exact coefficients.

mod character;

pub use character::{character_idempotent, characters, CharacterTable};

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{CosetDecomposition, FiniteGroup, Subgroup};
use crate::scalar::{Cyclotomic, Rational, Scalar};

/// A formal combination of group elements, stored densely by element id.
#[derive(Clone)]
pub struct Element<F> {
    group: Arc<FiniteGroup>,
    coeffs: Vec<F>,
}

impl<F: Scalar> Element<F> {
    pub fn zero(group: &Arc<FiniteGroup>) -> Self {
        Element { group: Arc::clone(group), coeffs: vec![F::zero(); group.order()] }
    }

    pub fn one(group: &Arc<FiniteGroup>) -> Self {
        Self::delta(group, 0)
    }

    pub fn delta(group: &Arc<FiniteGroup>, id: usize) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[id] = F::one();
        e
    }

    pub fn from_coeffs(group: &Arc<FiniteGroup>, coeffs: Vec<F>) -> Self {
        assert_eq!(coeffs.len(), group.order(), "coefficient vector length");
        Element { group: Arc::clone(group), coeffs }
    }

    /// Sum of `c * g` over the given terms; repeated elements accumulate.
    pub fn from_terms(group: &Arc<FiniteGroup>, terms: &[(F, usize)]) -> Self {
        let mut e = Self::zero(group);
        for (c, id) in terms {
            e.coeffs[*id] = e.coeffs[*id].add(c);
        }
        e
    }

    /// Uniform average over a nonempty set of elements.
    pub fn eta(group: &Arc<FiniteGroup>, ids: &[usize]) -> Result<Self> {
        let mut set = ids.to_vec();
        set.sort_unstable();
        set.dedup();
        if set.is_empty() {
            return Err(Error::domain("averaging element of an empty set"));
        }
        let c = F::from_rational(&Rational::new(1, set.len() as i64));
        let mut e = Self::zero(group);
        for id in set {
            e.coeffs[id] = c.clone();
        }
        Ok(e)
    }

    pub fn eta_subgroup(h: &Subgroup) -> Self {
        Self::eta(h.group(), h.members()).expect("subgroups are nonempty")
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, id: usize) -> &F {
        &self.coeffs[id]
    }

    pub fn set_coeff(&mut self, id: usize, value: F) {
        self.coeffs[id] = value;
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(F::is_zero)
    }

    pub fn same_group(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group)
    }

    fn check_group(&self, other: &Self) -> Result<()> {
        if self.same_group(other) {
            Ok(())
        } else {
            Err(Error::domain("elements of different groups"))
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        Element { group: Arc::clone(&self.group), coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    pub fn neg(&self) -> Self {
        Element { group: Arc::clone(&self.group), coeffs: self.coeffs.iter().map(F::neg).collect() }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_group(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(Element { group: Arc::clone(&self.group), coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_group(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect();
        Ok(Element { group: Arc::clone(&self.group), coeffs })
    }

    /// `(ab)(g) = sum_x a(x) b(x^-1 g)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_group(other)?;
        let g = &self.group;
        let mut out = vec![F::zero(); g.order()];
        let right: Vec<usize> = other.support();
        for x in self.support() {
            let a = &self.coeffs[x];
            for &y in &right {
                out[g.mul(x, y)].add_mul(a, &other.coeffs[y]);
            }
        }
        Ok(Element { group: Arc::clone(g), coeffs: out })
    }

    /// `x* = sum conj(x(g)) g^-1`.
    pub fn star(&self) -> Self {
        let g = &self.group;
        let mut out = vec![F::zero(); g.order()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out[g.inv(i)] = c.conj();
            }
        }
        Element { group: Arc::clone(g), coeffs: out }
    }

    /// Restriction of the coefficients to one coset.
    pub fn project_coset(&self, coset: usize, decomposition: &CosetDecomposition) -> Self {
        let mut out = Self::zero(&self.group);
        for &g in &decomposition.members[coset] {
            out.coeffs[g] = self.coeffs[g].clone();
        }
        out
    }

    /// `<a, b> = (1/|G|) sum conj(a(g)) b(g)`.
    pub fn inner_product(&self, other: &Self) -> Result<F> {
        self.check_group(other)?;
        let mut acc = F::zero();
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            if !a.is_zero() && !b.is_zero() {
                acc.add_mul(&a.conj(), b);
            }
        }
        Ok(acc.mul(&F::from_rational(&Rational::new(1, self.group.order() as i64))))
    }

    /// Coefficient sum over each coset.
    pub fn coset_sums(&self, decomposition: &CosetDecomposition) -> Vec<F> {
        decomposition
            .members
            .iter()
            .map(|m| m.iter().fold(F::zero(), |acc, &g| acc.add(&self.coeffs[g])))
            .collect()
    }

    /// Sum over each class of a partition given as member lists.
    pub fn class_sums(&self, classes: &[Vec<usize>]) -> Vec<F> {
        classes
            .iter()
            .map(|m| m.iter().fold(F::zero(), |acc, &g| acc.add(&self.coeffs[g])))
            .collect()
    }

    /// Replaces each coefficient by the mean over its coset.
    ///
    /// For left cosets of H this is `x eta_H`; for right cosets it is `eta_H x`.
    pub fn average_over_cosets(&self, decomposition: &CosetDecomposition) -> Self {
        let mut out = Self::zero(&self.group);
        for m in &decomposition.members {
            let total = m.iter().fold(F::zero(), |acc, &g| acc.add(&self.coeffs[g]));
            let mean = total.mul(&F::from_rational(&Rational::new(1, m.len() as i64)));
            for &g in m {
                out.coeffs[g] = mean.clone();
            }
        }
        out
    }

    pub fn total(&self) -> F {
        self.coeffs.iter().fold(F::zero(), |acc, c| acc.add(c))
    }

    pub fn is_idempotent(&self) -> bool {
        self.convolve(self).map(|sq| sq == *self).unwrap_or(false)
    }

    /// Idempotent supported on H with `eta_H e = eta_H`.
    pub fn in_e_bullet(&self, h: &Subgroup) -> bool {
        if !Arc::ptr_eq(&self.group, h.group()) {
            return false;
        }
        if self.support().iter().any(|&g| !h.contains(g)) || !self.is_idempotent() {
            return false;
        }
        let eta = Self::eta_subgroup(h);
        eta.convolve(self).map(|p| p == eta).unwrap_or(false)
    }
}

impl<F: Scalar> PartialEq for Element<F> {
    fn eq(&self, other: &Self) -> bool {
        self.same_group(other) && self.coeffs == other.coeffs
    }
}

impl<F: Scalar> fmt::Display for Element<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let support = self.support();
        if support.is_empty() {
            return write!(f, "0");
        }
        for (i, &g) in support.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}){}", self.coeffs[g], self.group.element(g))?;
        }
        Ok(())
    }
}

impl<F: Scalar> fmt::Debug for Element<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Panics if the operands belong to different groups.
impl<F: Scalar> Mul for &Element<F> {
    type Output = Element<F>;
    fn mul(self, rhs: &Element<F>) -> Element<F> {
        self.convolve(rhs).expect("product of elements of different groups")
    }
}

impl<F: Scalar> Add for &Element<F> {
    type Output = Element<F>;
    fn add(self, rhs: &Element<F>) -> Element<F> {
        self.try_add(rhs).expect("sum of elements of different groups")
    }
}

impl<F: Scalar> Sub for &Element<F> {
    type Output = Element<F>;
    fn sub(self, rhs: &Element<F>) -> Element<F> {
        self.try_sub(rhs).expect("difference of elements of different groups")
    }
}

impl Element<Rational> {
    pub fn promote(&self, order: u32) -> Element<Cyclotomic> {
        Element {
            group: Arc::clone(&self.group),
            coeffs: self.coeffs.iter().map(|c| Cyclotomic::embed(c, order)).collect(),
        }
    }

    pub fn lift<F: Scalar>(&self) -> Element<F> {
        Element { group: Arc::clone(&self.group), coeffs: self.coeffs.iter().map(F::from_rational).collect() }
    }

    /// Nonnegative with at least one positive coefficient.
    pub fn is_weight(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative()) && self.coeffs.iter().any(Rational::is_positive)
    }

    /// A nonnegative element with coefficient sum 1.
    pub fn is_distribution(&self) -> bool {
        self.is_weight() && self.total().is_one()
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.total();
        Ok(self.scale(&t.inv()?))
    }
}

impl Element<Cyclotomic> {
    /// The element with rational coefficients, when all of them are rational.
    pub fn to_rational(&self) -> Option<Element<Rational>> {
        let coeffs = self.coeffs.iter().map(Scalar::to_rational).collect::<Option<Vec<_>>>()?;
        Some(Element { group: Arc::clone(&self.group), coeffs })
    }

    /// The common root-of-unity order of the nonrational coefficients (1 if none).
    pub fn field_order(&self) -> Result<u32> {
        let mut order = 1;
        for c in &self.coeffs {
            if !c.is_rational() {
                if order != 1 && order != c.order() {
                    return Err(Error::domain("coefficients from different cyclotomic fields"));
                }
                order = c.order();
            }
        }
        Ok(order)
    }
}

/// A nonnegative, nonzero element: the driving weight of a random walk.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight(Element<Rational>);

impl Weight {
    pub fn new(element: Element<Rational>) -> Result<Self> {
        if !element.is_weight() {
            return Err(Error::domain("a weight needs nonnegative coefficients, not all zero"));
        }
        Ok(Weight(element))
    }

    pub fn element(&self) -> &Element<Rational> {
        &self.0
    }

    pub fn into_element(self) -> Element<Rational> {
        self.0
    }

    /// Whether the support generates the group.
    pub fn is_irreducible(&self) -> bool {
        self.0.group().is_generating(&self.0.support()).unwrap_or(false)
    }

    /// `w*`, again a weight.
    pub fn star(&self) -> Weight {
        Weight(self.0.star())
    }
}

impl std::ops::Deref for Weight {
    type Target = Element<Rational>;
    fn deref(&self) -> &Element<Rational> {
        &self.0
    }
}

/// Either scalar kind, as read from files.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyElement {
    Rational(Element<Rational>),
    Cyclotomic(Element<Cyclotomic>),
}

impl AnyElement {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        match self {
            AnyElement::Rational(e) => e.group(),
            AnyElement::Cyclotomic(e) => e.group(),
        }
    }

    /// Root-of-unity order of the field the element needs (1 for rationals).
    pub fn field_order(&self) -> Result<u32> {
        match self {
            AnyElement::Rational(_) => Ok(1),
            AnyElement::Cyclotomic(e) => e.field_order(),
        }
    }

    pub fn to_cyclotomic(&self) -> Element<Cyclotomic> {
        match self {
            AnyElement::Rational(e) => e.lift(),
            AnyElement::Cyclotomic(e) => e.clone(),
        }
    }

    pub fn as_rational(&self) -> Option<Element<Rational>> {
        match self {
            AnyElement::Rational(e) => Some(e.clone()),
            AnyElement::Cyclotomic(e) => e.to_rational(),
        }
    }

    /// Convolution with promotion of rationals; distinct fields are a domain error.
    pub fn convolve(&self, other: &AnyElement) -> Result<AnyElement> {
        match (self, other) {
            (AnyElement::Rational(a), AnyElement::Rational(b)) => Ok(AnyElement::Rational(a.convolve(b)?)),
            _ => {
                let (p, q) = (self.field_order()?, other.field_order()?);
                if p != 1 && q != 1 && p != q {
                    return Err(Error::domain(format!("cannot combine cyclotomic orders {p} and {q}")));
                }
                Ok(AnyElement::Cyclotomic(self.to_cyclotomic().convolve(&other.to_cyclotomic())?))
            }
        }
    }
}
