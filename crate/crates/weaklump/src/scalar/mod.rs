//! Exact scalar fields: rationals and cyclotomic extensions.

mod cyclotomic;
mod rational;

pub use cyclotomic::{cyclotomic_polynomial, euler_phi, Cyclotomic, MAX_ORDER};
pub use rational::Rational;

use std::fmt::{Debug, Display};

use crate::error::Result;

/// Field operations needed by the linear algebra and group algebra code.
pub trait Scalar: Clone + PartialEq + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn conj(&self) -> Self;
    /// The value as a rational number, if it is one.
    fn to_rational(&self) -> Option<Rational>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self = self.add(&a.mul(b));
    }

    /// `self -= a * b`
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self = self.sub(&a.mul(b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rational() -> impl Strategy<Value = Rational> {
        prop_oneof![
            (-30i64..30, 1i64..12).prop_map(|(n, d)| Rational::new(n, d)),
            // near the edge of the machine-word fast path
            (any::<i64>(), 1i64..4).prop_map(|(n, d)| Rational::new(n, d)),
        ]
    }

    fn cyclotomic(order: u32) -> impl Strategy<Value = Cyclotomic> {
        prop::collection::vec((-5i64..6, 1i64..4), 0..8).prop_map(move |c| {
            let poly: Vec<Rational> = c.into_iter().map(|(n, d)| Rational::new(n, d)).collect();
            Cyclotomic::from_poly(order, &poly)
        })
    }

    fn field_axioms<S: Scalar>(a: &S, b: &S, c: &S) -> std::result::Result<(), TestCaseError> {
        prop_assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
        prop_assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
        prop_assert_eq!(a.add(b), b.add(a));
        prop_assert_eq!(a.mul(b), b.mul(a));
        prop_assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
        prop_assert!(a.add(&a.neg()).is_zero());
        prop_assert_eq!(a.sub(b), a.add(&b.neg()));
        prop_assert_eq!(a.mul(&S::one()), a.clone());
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
        }
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(a.add(b).conj(), a.conj().add(&b.conj()));
        prop_assert_eq!(a.mul(b).conj(), a.conj().mul(&b.conj()));
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn rationals_form_a_field(a in rational(), b in rational(), c in rational()) {
            field_axioms(&a, &b, &c)?;
        }

        #[test]
        fn cyclotomic_fields_are_fields(
            (a, b, c) in prop::sample::select(vec![3u32, 4, 5, 8, 12])
                .prop_flat_map(|n| (cyclotomic(n), cyclotomic(n), cyclotomic(n)))
        ) {
            field_axioms(&a, &b, &c)?;
        }

        #[test]
        fn zeta_has_the_right_order(n in 1u32..=24, k in 0i64..48) {
            let z = Cyclotomic::zeta_power(n, k);
            let mut p = Cyclotomic::one();
            for _ in 0..n {
                p = p.mul(&z);
            }
            prop_assert!(p.is_one());
            prop_assert!(z.mul(&z.conj()).is_one());
        }
    }
}
