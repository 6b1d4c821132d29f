//! Concrete groups and weights used as worked examples: card shuffles on four cards,
//! the bottom-card shuffle on n cards, the dihedral group of order ten and the die.

use std::sync::Arc;

use crate::algebra::{Element, Weight};
use crate::group::{FiniteGroup, Permutation, Subgroup};
use crate::scalar::{Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn weight_from(group: &Arc<FiniteGroup>, terms: &[(Rational, &str)]) -> Weight {
    let terms: Vec<(Rational, usize)> =
        terms.iter().map(|(c, t)| (c.clone(), group.parse_element(t).expect("element of group"))).collect();
    Weight::new(Element::from_terms(group, &terms)).expect("valid weight")
}

pub fn sym4() -> Arc<FiniteGroup> {
    FiniteGroup::symmetric(4)
}

/// Permutations of the cards below the top one: `Sym{2,...,n}`.
pub fn top_card_subgroup(group: &Arc<FiniteGroup>) -> Subgroup {
    Subgroup::stabilizer(group, &[0])
}

/// `Sym{2,3}` inside `Sym_4`.
pub fn middle_swap_subgroup(group: &Arc<FiniteGroup>) -> Subgroup {
    Subgroup::from_generators(group, &[Permutation::parse(group.degree(), "(2,3)").unwrap()]).unwrap()
}

/// Move the card in a uniformly chosen position to the top.
pub fn random_to_top(group: &Arc<FiniteGroup>) -> Weight {
    let c = q(1, 4);
    weight_from(group, &[(c.clone(), "()"), (c.clone(), "(1,2)"), (c.clone(), "(1,2,3)"), (c, "(1,2,3,4)")])
}

/// Move the top card to a uniformly chosen position.
pub fn top_to_random(group: &Arc<FiniteGroup>) -> Weight {
    let c = q(1, 4);
    weight_from(group, &[(c.clone(), "()"), (c.clone(), "(1,2)"), (c.clone(), "(1,3,2)"), (c, "(1,4,3,2)")])
}

/// `(1-l) id + (l/3) ((1,4)(2,3) + (1,4,3) + (1,4,2,3))`, weakly but not strongly or exactly lumping.
pub fn frustrating_shuffle(group: &Arc<FiniteGroup>, lambda: &Rational) -> Weight {
    let third = lambda * &q(1, 3);
    let stay = &Rational::from_int(1) - lambda;
    let mut terms = vec![(third.clone(), "(1,4)(2,3)"), (third.clone(), "(1,4,3)"), (third, "(1,4,2,3)")];
    if !stay.is_zero() {
        terms.push((stay, "()"));
    }
    weight_from(group, &terms)
}

/// The time reversal of [`frustrating_shuffle`].
pub fn frustrating_shuffle_reversed(group: &Arc<FiniteGroup>, lambda: &Rational) -> Weight {
    frustrating_shuffle(group, lambda).star()
}

/// Remove the bottom card, insert it under a uniformly chosen card, then move the top card
/// to the bottom. Returns `Sym_n` and the weight.
pub fn bottom_card_shuffle(n: usize) -> (Arc<FiniteGroup>, Weight) {
    assert!(n >= 3);
    let group = FiniteGroup::symmetric(n);
    let mut terms = Vec::new();
    for k in 0..n - 1 {
        // insert under the card in position k (0-based), then rotate top to bottom
        let insert: Vec<u32> = (0..n)
            .map(|j| {
                if j == n - 1 {
                    (k + 1) as u32
                } else if j <= k {
                    j as u32
                } else {
                    (j + 1) as u32
                }
            })
            .collect();
        let rotate: Vec<u32> = (0..n).map(|j| if j == 0 { (n - 1) as u32 } else { (j - 1) as u32 }).collect();
        let g = Permutation::from_images(insert).unwrap().then(&Permutation::from_images(rotate).unwrap());
        terms.push((q(1, (n - 1) as i64), group.id_of(&g).unwrap()));
    }
    let w = Weight::new(Element::from_terms(&group, &terms)).unwrap();
    (group, w)
}

/// Cards fixed in the top and bottom positions: `Stab(1) ∩ Stab(n)`.
pub fn top_and_bottom_subgroup(group: &Arc<FiniteGroup>) -> Subgroup {
    Subgroup::stabilizer(group, &[0, group.degree() - 1])
}

/// Dihedral group of order 10 generated by the rotation and the reflection `(2,5)(3,4)`.
pub fn dihedral10() -> Arc<FiniteGroup> {
    let gens = [Permutation::parse(5, "(1,2,3,4,5)").unwrap(), Permutation::parse(5, "(2,5)(3,4)").unwrap()];
    FiniteGroup::generate(5, &gens).unwrap()
}

pub fn dihedral_reflection_subgroup(group: &Arc<FiniteGroup>) -> Subgroup {
    Subgroup::from_generators(group, &[Permutation::parse(5, "(2,5)(3,4)").unwrap()]).unwrap()
}

/// Rotations of a die about the vertical axis, as permutations of the cube diagonals.
pub fn die_subgroup(group: &Arc<FiniteGroup>) -> Subgroup {
    Subgroup::from_generators(group, &[Permutation::parse(4, "(1,2,3,4)").unwrap()]).unwrap()
}

/// The die weight that lumps weakly to the top face without lumping strongly or exactly.
pub fn die_weight(group: &Arc<FiniteGroup>) -> Weight {
    weight_from(
        group,
        &[
            (q(2, 12), "(1,2)"),
            (q(1, 12), "(1,4,2,3)"),
            (q(1, 12), "(1,3,4)"),
            (q(2, 12), "(2,4,3)"),
            (q(3, 12), "(3,4)"),
            (q(3, 12), "(1,4,2)"),
        ],
    )
}
