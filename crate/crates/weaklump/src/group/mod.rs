//! Permutation groups, subgroups, cosets and double cosets.

mod cosets;
mod perm;

pub use cosets::{cosets, double_cosets, CosetDecomposition, DoubleCosetDecomposition, Side};
pub use perm::Permutation;

use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};

pub const DEFAULT_ORDER_CAP: usize = 20_000;

/// A finite permutation group with its elements enumerated.
///
/// Element ids follow lexicographic one-line order, so the identity is id 0.
pub struct FiniteGroup {
    degree: usize,
    elements: Vec<Permutation>,
    index: HashMap<Vec<u32>, usize>,
    generators: Vec<usize>,
    inverses: Vec<usize>,
    // left_by_generator[i][g] = id of generators[i] * g
    left_by_generator: Vec<Vec<u32>>,
}

thread_local! {
    static SCRATCH: RefCell<Vec<u32>> = const { RefCell::new(Vec::new()) };
}

impl FiniteGroup {
    pub fn generate(degree: usize, generators: &[Permutation]) -> Result<Arc<Self>> {
        Self::generate_with_cap(degree, generators, DEFAULT_ORDER_CAP)
    }

    pub fn generate_with_cap(degree: usize, generators: &[Permutation], cap: usize) -> Result<Arc<Self>> {
        for g in generators {
            if g.degree() != degree {
                return Err(Error::domain(format!("generator {g} has degree {} not {degree}", g.degree())));
            }
        }
        let id = Permutation::identity(degree);
        let mut seen: HashMap<Permutation, ()> = HashMap::new();
        seen.insert(id.clone(), ());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for s in generators {
                let y = x.then(s);
                if !seen.contains_key(&y) {
                    if seen.len() >= cap {
                        return Err(Error::Resource(format!("group order exceeds cap {cap}")));
                    }
                    seen.insert(y.clone(), ());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Permutation> = seen.into_keys().collect();
        elements.sort();
        let index: HashMap<Vec<u32>, usize> =
            elements.iter().enumerate().map(|(i, p)| (p.images().to_vec(), i)).collect();
        let inverses = elements.iter().map(|p| index[p.inverse().images()]).collect();
        let gen_ids: Vec<usize> = generators.iter().map(|g| index[g.images()]).collect();
        let mut group = FiniteGroup {
            degree,
            elements,
            index,
            generators: gen_ids,
            inverses,
            left_by_generator: Vec::new(),
        };
        group.left_by_generator = group
            .generators
            .iter()
            .map(|&s| (0..group.order()).map(|g| group.mul(s, g) as u32).collect())
            .collect();
        Ok(Arc::new(group))
    }

    /// The full symmetric group on `degree` points.
    pub fn symmetric(degree: usize) -> Arc<Self> {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Permutation::from_cycles(degree, &[vec![0, 1]]).unwrap());
            let long: Vec<u32> = (0..degree as u32).collect();
            gens.push(Permutation::from_cycles(degree, &[long]).unwrap());
        }
        Self::generate(degree, &gens).expect("symmetric group within cap")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> &Permutation {
        &self.elements[id]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn id_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p.images()).copied()
    }

    /// Id of an element given in 1-based cycle notation.
    pub fn parse_element(&self, text: &str) -> Result<usize> {
        let p = Permutation::parse(self.degree, text)?;
        self.id_of(&p).ok_or_else(|| Error::domain(format!("{p} is not in the group")))
    }

    /// Id of the product `a * b` (apply `a` first).
    pub fn mul(&self, a: usize, b: usize) -> usize {
        SCRATCH.with(|buf| {
            let mut buf = buf.borrow_mut();
            self.elements[a].then_into(&self.elements[b], &mut buf);
            self.index[&buf[..]]
        })
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// Table of `g -> generators[i] * g`.
    pub fn left_multiplication_by_generator(&self, i: usize) -> &[u32] {
        &self.left_by_generator[i]
    }

    /// Sorted ids of the subgroup generated by `ids`.
    pub fn closure(&self, ids: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order()];
        inside[0] = true;
        let mut found = vec![0usize];
        let mut head = 0;
        while head < found.len() {
            let x = found[head];
            head += 1;
            for &s in ids {
                let y = self.mul(x, s);
                if !inside[y] {
                    inside[y] = true;
                    found.push(y);
                }
            }
        }
        found.sort_unstable();
        found
    }

    /// Whether `support` generates the whole group.
    pub fn is_generating(&self, support: &[usize]) -> Result<bool> {
        if support.is_empty() {
            return Err(Error::domain("empty support"));
        }
        Ok(self.closure(support).len() == self.order())
    }
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(degree {}, order {})", self.degree, self.order())
    }
}

/// Subgroup of an enumerated group, stored as its sorted element ids.
#[derive(Clone)]
pub struct Subgroup {
    group: Arc<FiniteGroup>,
    members: Vec<usize>,
    local: Vec<u32>,
    generators: Vec<usize>,
}

const ABSENT: u32 = u32::MAX;

impl Subgroup {
    pub fn from_generators(group: &Arc<FiniteGroup>, generators: &[Permutation]) -> Result<Self> {
        let ids = generators
            .iter()
            .map(|p| {
                group
                    .id_of(p)
                    .ok_or_else(|| Error::domain(format!("generator {p} is not in the group")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_ids(group, &ids))
    }

    pub fn from_ids(group: &Arc<FiniteGroup>, generators: &[usize]) -> Self {
        let members = group.closure(generators);
        Self::from_members(group, members, generators.to_vec())
    }

    fn from_members(group: &Arc<FiniteGroup>, members: Vec<usize>, generators: Vec<usize>) -> Self {
        let mut local = vec![ABSENT; group.order()];
        for (k, &m) in members.iter().enumerate() {
            local[m] = k as u32;
        }
        Subgroup { group: Arc::clone(group), members, local, generators }
    }

    pub fn whole(group: &Arc<FiniteGroup>) -> Self {
        Self::from_members(group, (0..group.order()).collect(), group.generators().to_vec())
    }

    pub fn trivial(group: &Arc<FiniteGroup>) -> Self {
        Self::from_members(group, vec![0], Vec::new())
    }

    /// Pointwise stabiliser of the given 0-based points.
    pub fn stabilizer(group: &Arc<FiniteGroup>, points: &[usize]) -> Self {
        let members: Vec<usize> = (0..group.order())
            .filter(|&g| points.iter().all(|&p| group.element(g).image(p) == p))
            .collect();
        let generators = members.clone();
        Self::from_members(group, members, generators)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn contains(&self, id: usize) -> bool {
        self.local[id] != ABSENT
    }

    /// Position of `id` inside `members`.
    pub fn local_index(&self, id: usize) -> Option<usize> {
        let k = self.local[id];
        (k != ABSENT).then_some(k as usize)
    }

    pub fn same_parent(&self, other: &Subgroup) -> bool {
        Arc::ptr_eq(&self.group, &other.group)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.same_parent(other) && self.members.iter().all(|&m| other.contains(m))
    }

    /// `x H x^-1`.
    pub fn conjugate(&self, x: usize) -> Subgroup {
        let g = &self.group;
        let xi = g.inv(x);
        let mut members: Vec<usize> = self.members.iter().map(|&h| g.mul(g.mul(x, h), xi)).collect();
        members.sort_unstable();
        let generators = self.generators.iter().map(|&h| g.mul(g.mul(x, h), xi)).collect();
        Self::from_members(g, members, generators)
    }

    pub fn intersect(&self, other: &Subgroup) -> Result<Subgroup> {
        if !self.same_parent(other) {
            return Err(Error::domain("subgroups of different groups"));
        }
        let members: Vec<usize> = self.members.iter().copied().filter(|&m| other.contains(m)).collect();
        let generators = members.clone();
        Ok(Self::from_members(&self.group, members, generators))
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.group;
        let gens = if self.generators.is_empty() { &self.members } else { &self.generators };
        gens.iter().all(|&a| gens.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        let g = &self.group;
        let mut lcm = 1usize;
        for &m in &self.members {
            let mut k = 1;
            let mut x = m;
            while x != 0 {
                x = g.mul(x, m);
                k += 1;
            }
            lcm = num_integer::lcm(lcm, k);
        }
        lcm
    }
}

impl std::fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subgroup(order {} in {:?})", self.order(), self.group)
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.same_parent(other) && self.members == other.members
    }
}
