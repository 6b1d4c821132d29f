use std::sync::Arc;

use super::Element;
use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::scalar::{Cyclotomic, Rational, Scalar, MAX_ORDER};

/// Linear characters of an abelian subgroup.
///
/// Character `i` sends the k-th member of H to `z^characters[i][k]` with `z = exp(2 pi i / order)`.
/// Characters are sorted by their exponent vectors, so the trivial character comes first.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub subgroup: Subgroup,
    pub order: u32,
    pub characters: Vec<Vec<u32>>,
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    /// `e_beta = (1/|H|) sum_h beta(h^-1) h`.
    pub fn idempotent(&self, i: usize) -> Element<Cyclotomic> {
        character_idempotent(&self.subgroup, self.order, &self.characters[i]).expect("table characters are valid")
    }

    /// Index of the complex conjugate character.
    pub fn conjugate_index(&self, i: usize) -> usize {
        let m = self.order;
        let conj: Vec<u32> = self.characters[i].iter().map(|&e| (m - e) % m).collect();
        self.characters.iter().position(|c| *c == conj).expect("conjugate character present")
    }
}

fn check_abelian(h: &Subgroup) -> Result<()> {
    if h.is_abelian() {
        Ok(())
    } else {
        Err(Error::domain("subgroup is not abelian"))
    }
}

/// All linear characters of an abelian subgroup.
pub fn characters(h: &Subgroup) -> Result<CharacterTable> {
    check_abelian(h)?;
    let g = h.group();
    let m = h.exponent();
    if m > MAX_ORDER as usize {
        return Err(Error::Resource(format!("subgroup exponent {m} exceeds cyclotomic cap {MAX_ORDER}")));
    }
    let m32 = m as u32;
    // grow K = <g_1, ..., g_j> one generator at a time, extending every character of K
    let mut k_members = vec![0usize];
    let mut chars: Vec<Vec<u32>> = vec![vec![0]];
    let gens: Vec<usize> = if h.generators().is_empty() { h.members().to_vec() } else { h.generators().to_vec() };
    for &s in &gens {
        if k_members.contains(&s) {
            continue;
        }
        let mut r = 1;
        let mut power = s;
        while !k_members.contains(&power) {
            power = g.mul(power, s);
            r += 1;
        }
        let at = k_members.iter().position(|&x| x == power).unwrap();
        let mut new_members = Vec::with_capacity(k_members.len() * r);
        let mut shift = 0usize;
        for _ in 0..r {
            for &k in &k_members {
                let mut y = k;
                for _ in 0..shift {
                    y = g.mul(y, s);
                }
                new_members.push(y);
            }
            shift += 1;
        }
        let mut new_chars = Vec::new();
        for chi in &chars {
            let a = chi[at] as usize;
            for c in 0..m {
                if (r * c) % m != a {
                    continue;
                }
                let mut ext = Vec::with_capacity(new_members.len());
                for i in 0..r {
                    for e in chi {
                        ext.push(((*e as usize + i * c) % m) as u32);
                    }
                }
                new_chars.push(ext);
            }
        }
        k_members = new_members;
        chars = new_chars;
    }
    // reindex by the local order of H
    let mut characters: Vec<Vec<u32>> = chars
        .into_iter()
        .map(|chi| {
            let mut v = vec![0u32; h.order()];
            for (pos, &x) in k_members.iter().enumerate() {
                v[h.local_index(x).expect("member of H")] = chi[pos];
            }
            v
        })
        .collect();
    characters.sort();
    debug_assert_eq!(characters.len(), h.order());
    let _ = Arc::clone(g);
    Ok(CharacterTable { subgroup: h.clone(), order: m32, characters })
}

/// Primitive idempotent of a linear character given by exponents of `z = exp(2 pi i / order)`.
pub fn character_idempotent(h: &Subgroup, order: u32, exponents: &[u32]) -> Result<Element<Cyclotomic>> {
    check_abelian(h)?;
    if exponents.len() != h.order() {
        return Err(Error::domain("character needs one value per subgroup element"));
    }
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::domain(format!("root-of-unity order {order} unsupported")));
    }
    let g = h.group();
    let members = h.members();
    for (i, &a) in members.iter().enumerate() {
        for (j, &b) in members.iter().enumerate() {
            let k = h.local_index(g.mul(a, b)).unwrap();
            if (exponents[i] + exponents[j]) % order != exponents[k] % order {
                return Err(Error::domain("map is not multiplicative"));
            }
        }
    }
    let scale = Rational::new(1, h.order() as i64);
    let mut e = Element::zero(g);
    for (k, &x) in members.iter().enumerate() {
        let value = Cyclotomic::zeta_power(order, -(exponents[k] as i64));
        e.set_coeff(x, value.mul(&Cyclotomic::from_rational(&scale)));
    }
    Ok(e)
}
