use std::fmt;
use std::sync::OnceLock;

use super::{Rational, Scalar};
use crate::error::{Error, Result};

/// Largest supported root-of-unity order.
pub const MAX_ORDER: u32 = 64;

pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

// Exact division by a monic integer polynomial; coefficients low degree first.
fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

struct Table {
    phi: usize,
    poly: Vec<i64>,
    // powers[m] = x^m mod Phi_n for m < 2n
    powers: Vec<Vec<Rational>>,
}

fn tables() -> &'static [Table] {
    static TABLES: OnceLock<Vec<Table>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut polys: Vec<Vec<i64>> = vec![Vec::new()];
        for n in 1..=MAX_ORDER as usize {
            let mut num = vec![0i64; n + 1];
            num[0] = -1;
            num[n] = 1;
            for d in 1..n {
                if n % d == 0 {
                    num = divide_monic(&num, &polys[d]);
                }
            }
            polys.push(num);
        }
        let mut out = vec![Table { phi: 0, poly: Vec::new(), powers: Vec::new() }];
        for (n, poly) in polys.into_iter().enumerate().skip(1) {
            let phi = poly.len() - 1;
            let mut powers = Vec::with_capacity(2 * n);
            let mut cur = vec![0i64; phi];
            cur[0] = 1;
            for _ in 0..2 * n {
                powers.push(cur.iter().map(|&c| Rational::from_int(c)).collect());
                // multiply by x and reduce the overflow term
                let top = cur[phi - 1];
                for i in (1..phi).rev() {
                    cur[i] = cur[i - 1];
                }
                cur[0] = 0;
                if top != 0 {
                    for i in 0..phi {
                        cur[i] -= top * poly[i];
                    }
                }
            }
            out.push(Table { phi, poly, powers });
        }
        out
    })
}

fn table(order: u32) -> &'static Table {
    assert!(
        (1..=MAX_ORDER).contains(&order),
        "cyclotomic order {order} outside 1..={MAX_ORDER}"
    );
    &tables()[order as usize]
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    table(n).poly.clone()
}

/// Element of Q(zeta_n) in the power basis 1, z, ..., z^(phi(n)-1).
///
/// Order 1 values are plain rationals and combine with any order.
#[derive(Clone)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn embed(q: &Rational, order: u32) -> Self {
        let t = table(order);
        let mut coeffs = vec![Rational::zero(); t.phi];
        coeffs[0] = q.clone();
        Cyclotomic { order, coeffs }
    }

    /// `z^k` where `z = exp(2 pi i / order)`.
    pub fn zeta_power(order: u32, k: i64) -> Self {
        let t = table(order);
        let k = k.rem_euclid(order as i64) as usize;
        Cyclotomic { order, coeffs: t.powers[k].clone() }
    }

    /// Reduces an arbitrary polynomial in `z` (constant term first).
    pub fn from_poly(order: u32, poly: &[Rational]) -> Self {
        let t = table(order);
        let mut coeffs = vec![Rational::zero(); t.phi];
        for (k, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = &t.powers[k % order as usize];
            for (dst, src) in coeffs.iter_mut().zip(p) {
                if !src.is_zero() {
                    dst.add_mul(c, src);
                }
            }
        }
        Cyclotomic { order, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Rational::is_zero)
    }

    fn effective_order(&self) -> u32 {
        if self.is_rational() {
            1
        } else {
            self.order
        }
    }

    fn common_order(&self, other: &Self) -> u32 {
        if self.order == other.order {
            return self.order;
        }
        match (self.effective_order(), other.effective_order()) {
            (1, _) => other.order,
            (_, 1) => self.order,
            (a, b) => panic!("cyclotomic order mismatch: {a} vs {b}"),
        }
    }

    fn lifted(&self, order: u32) -> std::borrow::Cow<'_, Self> {
        if self.order == order {
            std::borrow::Cow::Borrowed(self)
        } else {
            std::borrow::Cow::Owned(Cyclotomic::embed(&self.coeffs[0], order))
        }
    }

    /// Whether `a` and `b` live in compatible fields (equal order or one rational).
    pub fn compatible(a: &Self, b: &Self) -> bool {
        a.order == b.order || a.is_rational() || b.is_rational()
    }

    /// Parses `a + b*z^k + ...` for a given order.
    pub fn parse(s: &str, order: u32) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(Error::domain(format!("cyclotomic order {order} outside 1..={MAX_ORDER}")));
        }
        let bad = |m: &str| Error::parse(0, format!("invalid cyclotomic literal `{s}`: {m}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut poly: Vec<Rational> = Vec::new();
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, term.strip_prefix('+').unwrap_or(term)),
            };
            let (coef, power) = match body.find('z') {
                None => (body, 0usize),
                Some(pos) => {
                    let coef = body[..pos].trim_end_matches('*');
                    let rest = &body[pos + 1..];
                    let power = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .ok_or_else(|| bad("expected `^` after z"))?
                            .parse::<usize>()
                            .map_err(|_| bad("bad exponent"))?
                    };
                    (coef, power)
                }
            };
            let mut c: Rational = if coef.is_empty() {
                Rational::one()
            } else {
                coef.parse().map_err(|_| bad("bad coefficient"))?
            };
            if sign < 0 {
                c = c.neg();
            }
            if poly.len() <= power {
                poly.resize(power + 1, Rational::zero());
            }
            poly[power] = poly[power].add(&c);
        }
        Ok(Cyclotomic::from_poly(order, &poly))
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            self.coeffs == other.coeffs
        } else {
            self.is_rational() && other.is_rational() && self.coeffs[0] == other.coeffs[0]
        }
    }
}

impl Scalar for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic { order: 1, coeffs: vec![Rational::zero()] }
    }

    fn one() -> Self {
        Cyclotomic { order: 1, coeffs: vec![Rational::one()] }
    }

    fn from_rational(q: &Rational) -> Self {
        Cyclotomic { order: 1, coeffs: vec![q.clone()] }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    fn add(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let (a, b) = (self.lifted(n), other.lifted(n));
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.add(y)).collect();
        Cyclotomic { order: n, coeffs }
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let (a, b) = (self.lifted(n), other.lifted(n));
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.sub(y)).collect();
        Cyclotomic { order: n, coeffs }
    }

    fn mul(&self, other: &Self) -> Self {
        if self.order == 1 || other.order == 1 || self.is_rational() || other.is_rational() {
            let (scalar, vector) = if self.is_rational() { (self, other) } else { (other, self) };
            let n = self.common_order(other);
            let v = vector.lifted(n);
            let s = &scalar.coeffs[0];
            return Cyclotomic { order: n, coeffs: v.coeffs.iter().map(|c| c.mul(s)).collect() };
        }
        let n = self.common_order(other);
        let t = table(n);
        let mut buf = vec![Rational::zero(); 2 * t.phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    buf[i + j].add_mul(a, b);
                }
            }
        }
        let mut coeffs: Vec<Rational> = buf[..t.phi].to_vec();
        for (m, c) in buf.iter().enumerate().skip(t.phi) {
            if c.is_zero() {
                continue;
            }
            for (dst, p) in coeffs.iter_mut().zip(&t.powers[m]) {
                if !p.is_zero() {
                    dst.add_mul(c, p);
                }
            }
        }
        Cyclotomic { order: n, coeffs }
    }

    fn neg(&self) -> Self {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(Scalar::neg).collect() }
    }

    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Arithmetic("division by zero".into()));
        }
        if self.is_rational() {
            return Ok(Cyclotomic::embed(&self.coeffs[0].inv()?, self.order));
        }
        // Solve self * y = 1 as a linear system in the power basis.
        let n = self.order;
        let phi = table(n).phi;
        let mut cols: Vec<Vec<Rational>> = (0..phi)
            .map(|j| self.mul(&Cyclotomic::zeta_power(n, j as i64)).coeffs)
            .collect();
        // augmented matrix rows: a[i][j] = cols[j][i]
        let mut a: Vec<Vec<Rational>> = (0..phi)
            .map(|i| {
                let mut row: Vec<Rational> = cols.iter_mut().map(|c| c[i].clone()).collect();
                row.push(if i == 0 { Rational::one() } else { Rational::zero() });
                row
            })
            .collect();
        for col in 0..phi {
            let pivot = (col..phi)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| Error::Arithmetic("singular multiplication map".into()))?;
            a.swap(col, pivot);
            let p = a[col][col].inv()?;
            for v in a[col].iter_mut() {
                *v = v.mul(&p);
            }
            let prow = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, y) in row.iter_mut().zip(&prow) {
                        x.sub_mul(&f, y);
                    }
                }
            }
        }
        Ok(Cyclotomic { order: n, coeffs: a.into_iter().map(|r| r[phi].clone()).collect() })
    }

    fn conj(&self) -> Self {
        let n = self.order as usize;
        let mut poly = vec![Rational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[(n - k) % n] = poly[(n - k) % n].add(c);
        }
        Cyclotomic::from_poly(self.order, &poly)
    }

    fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{k}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.order, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        for n in 1..=MAX_ORDER {
            assert_eq!(cyclotomic_polynomial(n).len() as u32 - 1, euler_phi(n));
        }
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = Cyclotomic::zeta_power(4, 1);
        assert_eq!(i.mul(&i), Cyclotomic::from_rational(&q(-1, 1)));
    }

    #[test]
    fn conjugate_of_quarter_plus_quarter_i() {
        let z = Cyclotomic::parse("1/4 + 1/4*z", 4).unwrap();
        assert_eq!(z.conj(), Cyclotomic::parse("1/4 - 1/4*z", 4).unwrap());
        assert_eq!(z.conj().to_string(), "1/4 - 1/4*z");
    }

    #[test]
    fn zeta_relations_hold() {
        for n in [3u32, 5, 8, 12, 15, 64] {
            let z = Cyclotomic::zeta_power(n, 1);
            let mut p = Cyclotomic::one();
            for _ in 0..n {
                p = p.mul(&z);
            }
            assert!(p.is_one(), "zeta^{n} != 1");
            // Phi_n(z) = 0
            let poly = cyclotomic_polynomial(n);
            let mut acc = Cyclotomic::zero();
            let mut pw = Cyclotomic::one();
            for c in poly {
                acc = acc.add(&pw.mul(&Cyclotomic::from_rational(&Rational::from_int(c))));
                pw = pw.mul(&z);
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn embedding_round_trips() {
        let e = Cyclotomic::embed(&q(1, 4), 4);
        assert_eq!(e.to_rational(), Some(q(1, 4)));
        assert!(Cyclotomic::embed(&Rational::zero(), 4).is_zero());
        assert!(Cyclotomic::embed(&Rational::one(), 4).is_one());
    }

    #[test]
    fn inverse_in_order_five() {
        let z = Cyclotomic::parse("2 - z + 3*z^3", 5).unwrap();
        assert!(z.mul(&z.inv().unwrap()).is_one());
    }

    #[test]
    #[should_panic(expected = "order mismatch")]
    fn distinct_orders_panic() {
        let _ = Cyclotomic::zeta_power(4, 1).add(&Cyclotomic::zeta_power(3, 1));
    }

    #[test]
    fn parse_accepts_signs_and_powers() {
        let a = Cyclotomic::parse("-z^3 + 1/2", 4).unwrap();
        // z^3 = -z in order 4
        assert_eq!(a, Cyclotomic::parse("1/2 + z", 4).unwrap());
        assert!(Cyclotomic::parse("1/2 + y", 4).is_err());
    }
}
