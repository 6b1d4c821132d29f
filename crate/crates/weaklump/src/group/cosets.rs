use std::sync::Arc;

use super::{FiniteGroup, Subgroup};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Partition of G into left cosets gH or right cosets Hg.
///
/// Cosets are numbered by their least element id, which is also the representative.
/// For a left coset `members[c][k] = rep * h_k`; for a right coset `members[c][k] = h_k * rep`,
/// where `h_k` is the k-th member of H.
#[derive(Clone, Debug)]
pub struct CosetDecomposition {
    pub side: Side,
    pub coset_of: Vec<usize>,
    pub position: Vec<usize>,
    pub representatives: Vec<usize>,
    pub members: Vec<Vec<usize>>,
}

impl CosetDecomposition {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }
}

pub fn cosets(h: &Subgroup, side: Side) -> CosetDecomposition {
    let g = h.group();
    let n = g.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut position = vec![0; n];
    let mut representatives = Vec::new();
    let mut members = Vec::new();
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let c = representatives.len();
        representatives.push(x);
        let coset: Vec<usize> = h
            .members()
            .iter()
            .map(|&m| match side {
                Side::Left => g.mul(x, m),
                Side::Right => g.mul(m, x),
            })
            .collect();
        for (k, &y) in coset.iter().enumerate() {
            coset_of[y] = c;
            position[y] = k;
        }
        members.push(coset);
    }
    CosetDecomposition { side, coset_of, position, representatives, members }
}

/// Partition of G into double cosets TxH, numbered by least element id.
#[derive(Clone, Debug)]
pub struct DoubleCosetDecomposition {
    pub left_subgroup: Subgroup,
    pub right_subgroup: Subgroup,
    pub class_of: Vec<usize>,
    pub representatives: Vec<usize>,
    pub sizes: Vec<usize>,
    /// Sorted element ids of each class.
    pub members: Vec<Vec<usize>>,
}

pub fn double_cosets(t: &Subgroup, h: &Subgroup) -> Result<DoubleCosetDecomposition> {
    if !t.same_parent(h) {
        return Err(Error::domain("subgroups of different groups"));
    }
    let g: &Arc<FiniteGroup> = h.group();
    let left = cosets(h, Side::Left);
    let n = g.order();
    let mut class_of = vec![usize::MAX; n];
    let mut representatives = Vec::new();
    let mut members = Vec::new();
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        let c = representatives.len();
        representatives.push(x);
        let mut class = Vec::new();
        for &s in t.members() {
            let coset = left.coset_of[g.mul(s, x)];
            if class_of[left.members[coset][0]] == usize::MAX {
                for &y in &left.members[coset] {
                    class_of[y] = c;
                    class.push(y);
                }
            }
        }
        class.sort_unstable();
        members.push(class);
    }
    let sizes = members.iter().map(Vec::len).collect();
    let d = DoubleCosetDecomposition {
        left_subgroup: t.clone(),
        right_subgroup: h.clone(),
        class_of,
        representatives,
        sizes,
        members,
    };
    debug_assert!(d.verify_counting_identity());
    Ok(d)
}

impl DoubleCosetDecomposition {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    /// `|x^-1 T x ∩ H|` for a representative `x` of class `c`.
    pub fn stabilizer_order(&self, c: usize) -> usize {
        let g = self.right_subgroup.group();
        let x = self.representatives[c];
        let xi = g.inv(x);
        self.left_subgroup
            .members()
            .iter()
            .filter(|&&s| self.right_subgroup.contains(g.mul(g.mul(xi, s), x)))
            .count()
    }

    /// Checks `|TxH| |x^-1 T x ∩ H| = |H| |T|` for every class.
    pub fn verify_counting_identity(&self) -> bool {
        let target = self.left_subgroup.order() * self.right_subgroup.order();
        (0..self.count()).all(|c| self.sizes[c] * self.stabilizer_order(c) == target)
    }
}
