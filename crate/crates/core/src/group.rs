//! Finite permutation groups with stable element ids.
//!
//! Elements are numbered in breadth-first discovery order from the generator
//! list (right multiplication), so id 0 is always the identity and the
//! numbering is a deterministic function of the generator list.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use bitvec::vec::BitVec;

use crate::error::{Error, Result};
use crate::perm::Perm;

/// Default cap on the order of any enumerated group.
pub const DEFAULT_ORDER_CAP: usize = 100_000;

const TABLE_LIMIT: usize = 1024;

static NEXT_GROUP_UID: AtomicU64 = AtomicU64::new(1);

pub type ElementId = usize;

pub struct FiniteGroup {
    uid: u64,
    degree: usize,
    generators: Vec<Perm>,
    gen_ids: Vec<ElementId>,
    elements: Vec<Perm>,
    index: HashMap<Perm, ElementId>,
    inverses: Vec<ElementId>,
    // (parent, generator) in the BFS tree; unused for the identity
    parent: Vec<(ElementId, usize)>,
    right_gen: Vec<Vec<u32>>,
    right_gen_inv: Vec<Vec<u32>>,
    table: OnceLock<Vec<u32>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("degree", &self.degree)
            .field("order", &self.elements.len())
            .field("generators", &self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

impl FiniteGroup {
    /// Enumerates the group generated by `generators` (all of equal degree).
    pub fn enumerate(generators: &[Perm], cap: usize) -> Result<Arc<FiniteGroup>> {
        let first = generators
            .first()
            .ok_or_else(|| Error::contract("a group needs at least one generator"))?;
        let degree = first.degree();
        for g in generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        let identity = Perm::identity(degree);
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::new();
        index.insert(identity, 0);
        let mut parent = vec![(0, 0)];
        let ngen = generators.len();
        let mut right_gen: Vec<Vec<u32>> = vec![Vec::new(); ngen];
        let mut cursor = 0;
        while cursor < elements.len() {
            for (k, gen) in generators.iter().enumerate() {
                let prod = elements[cursor].then(gen);
                let id = match index.get(&prod) {
                    Some(&id) => id,
                    None => {
                        let id = elements.len();
                        if id >= cap {
                            return Err(Error::ResourceCap {
                                what: "group order",
                                cap,
                            });
                        }
                        index.insert(prod.clone(), id);
                        elements.push(prod);
                        parent.push((cursor, k));
                        id
                    }
                };
                right_gen[k].push(id as u32);
            }
            cursor += 1;
        }
        let order = elements.len();
        let mut right_gen_inv = vec![vec![0u32; order]; ngen];
        for k in 0..ngen {
            for g in 0..order {
                right_gen_inv[k][right_gen[k][g] as usize] = g as u32;
            }
        }
        let inverses = elements.iter().map(|p| index[&p.inverse()]).collect();
        let gen_ids = generators.iter().map(|g| index[g]).collect();
        Ok(Arc::new(FiniteGroup {
            uid: NEXT_GROUP_UID.fetch_add(1, Ordering::Relaxed),
            degree,
            generators: generators.to_vec(),
            gen_ids,
            elements,
            index,
            inverses,
            parent,
            right_gen,
            right_gen_inv,
            table: OnceLock::new(),
        }))
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Element ids of the generators, in generator order.
    pub fn generator_ids(&self) -> &[ElementId] {
        &self.gen_ids
    }

    pub fn element(&self, id: ElementId) -> &Perm {
        &self.elements[id]
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn id_of(&self, p: &Perm) -> Option<ElementId> {
        self.index.get(p).copied()
    }

    pub fn identity(&self) -> ElementId {
        0
    }

    pub fn inv(&self, g: ElementId) -> ElementId {
        self.inverses[g]
    }


    /// `g · gen_k`.
    pub fn mul_gen(&self, g: ElementId, k: usize) -> ElementId {
        self.right_gen[k][g] as usize
    }

    /// `g · gen_k^{-1}`.
    pub fn mul_gen_inv(&self, g: ElementId, k: usize) -> ElementId {
        self.right_gen_inv[k][g] as usize
    }

    fn table(&self) -> Option<&Vec<u32>> {
        let n = self.order();
        if n > TABLE_LIMIT {
            return None;
        }
        Some(self.table.get_or_init(|| {
            // a·b = (a·b')·gen_k for b = b'·gen_k, so rows fill in BFS order of b.
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                let row = a * n;
                t[row] = a as u32;
                for b in 1..n {
                    let (pb, k) = self.parent[b];
                    let prev = t[row + pb] as usize;
                    t[row + b] = self.right_gen[k][prev];
                }
            }
            t
        }))
    }

    pub fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        match self.table() {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.index[&self.elements[a].then(&self.elements[b])],
        }
    }

    /// `h^{-1} g h`.
    pub fn conj(&self, g: ElementId, h: ElementId) -> ElementId {
        self.mul(self.mul(self.inv(h), g), h)
    }

    pub fn pow(&self, g: ElementId, exponent: i64) -> ElementId {
        let base = if exponent < 0 { self.inv(g) } else { g };
        let mut acc = self.identity();
        for _ in 0..exponent.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn element_order(&self, g: ElementId) -> usize {
        let mut acc = g;
        let mut n = 1;
        while acc != 0 {
            acc = self.mul(acc, g);
            n += 1;
        }
        n
    }

    /// `{h^{-1} g h : h ∈ G}`, computed as the orbit under the generators.
    pub fn conjugacy_class(self: &Arc<Self>, g: ElementId) -> ElementSet {
        let mut set = ElementSet::empty(self);
        set.insert(g);
        let mut queue = VecDeque::from([g]);
        while let Some(x) = queue.pop_front() {
            for k in 0..self.gen_ids.len() {
                // gen^{-1} x gen
                let y = self.mul_gen(self.mul(self.inv(self.gen_ids[k]), x), k);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set
    }

    /// Conjugacy classes, ordered by their smallest element id.
    pub fn conjugacy_classes(self: &Arc<Self>) -> Vec<ElementSet> {
        let mut covered = ElementSet::empty(self);
        let mut out = Vec::new();
        for g in 0..self.order() {
            if covered.contains(g) {
                continue;
            }
            let class = self.conjugacy_class(g);
            covered.union_with(&class);
            out.push(class);
        }
        out
    }

    /// Smallest conjugation-invariant set containing `set`.
    pub fn class_closure(self: &Arc<Self>, set: &ElementSet) -> Result<ElementSet> {
        self.check_owns(set)?;
        let mut out = ElementSet::empty(self);
        for g in set.iter() {
            if !out.contains(g) {
                out.union_with(&self.conjugacy_class(g));
            }
        }
        Ok(out)
    }

    /// Subgroup generated by `set`.
    pub fn subgroup_generated(self: &Arc<Self>, set: &ElementSet) -> Result<ElementSet> {
        self.check_owns(set)?;
        let gens: Vec<ElementId> = set.iter().collect();
        let mut out = ElementSet::empty(self);
        out.insert(0);
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &s in &gens {
                let y = self.mul(x, s);
                if out.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Ok(out)
    }

    /// Smallest normal subgroup containing `seeds`.
    pub fn normal_closure(self: &Arc<Self>, seeds: &ElementSet) -> Result<ElementSet> {
        let closed = self.class_closure(seeds)?;
        self.subgroup_generated(&closed)
    }

    pub fn is_subgroup(self: &Arc<Self>, set: &ElementSet) -> Result<bool> {
        self.check_owns(set)?;
        if !set.contains(0) {
            return Ok(false);
        }
        let members: Vec<_> = set.iter().collect();
        for &a in &members {
            for &b in &members {
                if !set.contains(self.mul(a, b)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_conjugation_stable(self: &Arc<Self>, set: &ElementSet) -> Result<bool> {
        self.check_owns(set)?;
        for g in set.iter() {
            for k in 0..self.gen_ids.len() {
                let y = self.mul_gen(self.mul(self.inv(self.gen_ids[k]), g), k);
                if !set.contains(y) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_normal_subgroup(self: &Arc<Self>, set: &ElementSet) -> Result<bool> {
        Ok(self.is_subgroup(set)? && self.is_conjugation_stable(set)?)
    }

    /// Realizes a subgroup as a group in its own right.
    ///
    /// Returns the subgroup and the embedding `sub id ↦ ambient id`.
    pub fn subgroup_as_group(self: &Arc<Self>, set: &ElementSet) -> Result<(Arc<FiniteGroup>, Vec<ElementId>)> {
        if !self.is_subgroup(set)? {
            return Err(Error::contract("element set is not a subgroup"));
        }
        // Greedy generating set in id order.
        let mut gens = Vec::new();
        let mut reached = ElementSet::empty(self);
        reached.insert(0);
        for g in set.iter() {
            if !reached.contains(g) {
                gens.push(g);
                reached = self.subgroup_generated(&ElementSet::from_ids(self, gens.iter().copied())?)?;
            }
        }
        let perms: Vec<Perm> = if gens.is_empty() {
            vec![Perm::identity(self.degree)]
        } else {
            gens.iter().map(|&g| self.elements[g].clone()).collect()
        };
        let sub = FiniteGroup::enumerate(&perms, self.order().max(1))?;
        let embedding = sub
            .elements()
            .iter()
            .map(|p| self.index[p])
            .collect();
        Ok((sub, embedding))
    }

    /// The quotient by a normal subgroup, realized as the right-regular
    /// permutation action on cosets.
    pub fn coset_group(self: &Arc<Self>, normal: &ElementSet) -> Result<CosetGroup> {
        if !self.is_normal_subgroup(normal)? {
            return Err(Error::contract("element set is not a normal subgroup"));
        }
        let n = self.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut count = 0;
        for g in 0..n {
            if coset_of[g] != usize::MAX {
                continue;
            }
            for h in normal.iter() {
                coset_of[self.mul(g, h)] = count;
            }
            count += 1;
        }
        let coset_reps = {
            let mut reps = vec![usize::MAX; count];
            for g in (0..n).rev() {
                reps[coset_of[g]] = g;
            }
            reps
        };
        let gens: Vec<Perm> = (0..self.gen_ids.len())
            .map(|k| {
                let images = (0..count)
                    .map(|c| coset_of[self.mul_gen(coset_reps[c], k)] as u32)
                    .collect();
                Perm::from_images(images)
            })
            .collect::<Result<_>>()?;
        let quotient = FiniteGroup::enumerate(&gens, n)?;
        let mut projection = vec![0usize; n];
        for g in 1..n {
            let (p, k) = self.parent[g];
            projection[g] = quotient.mul_gen(projection[p], k);
        }
        Ok(CosetGroup {
            quotient,
            projection,
            coset_reps,
        })
    }

    pub(crate) fn check_owns(&self, set: &ElementSet) -> Result<()> {
        if set.group.uid == self.uid {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }
}

/// `G/N` as a permutation group together with the projection `G → G/N`.
#[derive(Debug, Clone)]
pub struct CosetGroup {
    pub quotient: Arc<FiniteGroup>,
    /// Element id in `G` to element id in the quotient.
    pub projection: Vec<ElementId>,
    /// Smallest element id of `G` in each coset, indexed by coset (point) number.
    pub coset_reps: Vec<ElementId>,
}

/// A subset of a finite group, stored as a bitset over element ids.
#[derive(Clone)]
pub struct ElementSet {
    group: Arc<FiniteGroup>,
    members: BitVec,
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl PartialEq for ElementSet {
    fn eq(&self, other: &Self) -> bool {
        self.group.uid == other.group.uid && self.members == other.members
    }
}

impl Eq for ElementSet {}

impl ElementSet {
    pub fn empty(group: &Arc<FiniteGroup>) -> Self {
        ElementSet {
            group: Arc::clone(group),
            members: BitVec::repeat(false, group.order()),
        }
    }

    pub fn full(group: &Arc<FiniteGroup>) -> Self {
        ElementSet {
            group: Arc::clone(group),
            members: BitVec::repeat(true, group.order()),
        }
    }

    pub fn singleton(group: &Arc<FiniteGroup>, g: ElementId) -> Self {
        let mut s = Self::empty(group);
        s.insert(g);
        s
    }

    pub fn from_ids(group: &Arc<FiniteGroup>, ids: impl IntoIterator<Item = ElementId>) -> Result<Self> {
        let mut s = Self::empty(group);
        for id in ids {
            if id >= group.order() {
                return Err(Error::contract(format!("element id {id} out of range")));
            }
            s.insert(id);
        }
        Ok(s)
    }

    pub fn from_perms<'a>(group: &Arc<FiniteGroup>, perms: impl IntoIterator<Item = &'a Perm>) -> Result<Self> {
        let mut s = Self::empty(group);
        for p in perms {
            let id = group
                .id_of(p)
                .ok_or_else(|| Error::contract(format!("{p} is not an element of the group")))?;
            s.insert(id);
        }
        Ok(s)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn contains(&self, g: ElementId) -> bool {
        self.members.get(g).map(|b| *b).unwrap_or(false)
    }

    /// Returns `true` if `g` was not already present.
    pub fn insert(&mut self, g: ElementId) -> bool {
        let was = self.members[g];
        self.members.set(g, true);
        !was
    }

    /// Returns `true` if `g` was present.
    pub fn remove(&mut self, g: ElementId) -> bool {
        let was = self.members[g];
        self.members.set(g, false);
        was
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.not_any()
    }

    /// Member ids in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.members.iter_ones()
    }

    fn same_group(&self, other: &ElementSet) -> Result<()> {
        if self.group.uid == other.group.uid {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn union_with(&mut self, other: &ElementSet) {
        debug_assert_eq!(self.group.uid, other.group.uid);
        self.members |= other.members.as_bitslice();
    }

    pub fn union(&self, other: &ElementSet) -> Result<ElementSet> {
        self.same_group(other)?;
        let mut out = self.clone();
        out.union_with(other);
        Ok(out)
    }

    pub fn is_subset(&self, other: &ElementSet) -> Result<bool> {
        self.same_group(other)?;
        Ok(self.iter().all(|g| other.contains(g)))
    }

    /// `{a·b : a ∈ self, b ∈ other}`.
    pub fn product(&self, other: &ElementSet) -> Result<ElementSet> {
        self.same_group(other)?;
        let g = &self.group;
        let mut out = ElementSet::empty(g);
        let rhs: Vec<_> = other.iter().collect();
        for a in self.iter() {
            for &b in &rhs {
                out.insert(g.mul(a, b));
            }
        }
        Ok(out)
    }

    /// `{g·x : x ∈ self}`.
    pub fn left_translate(&self, g: ElementId) -> ElementSet {
        let grp = &self.group;
        let mut out = ElementSet::empty(grp);
        for x in self.iter() {
            out.insert(grp.mul(g, x));
        }
        out
    }

    /// Members rendered in cycle notation, in id order.
    pub fn to_perm_strings(&self) -> Vec<String> {
        self.iter().map(|g| self.group.element(g).to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str, d: usize) -> Perm {
        Perm::parse_cycles(s, d).unwrap()
    }

    fn s3() -> Arc<FiniteGroup> {
        FiniteGroup::enumerate(&[perm("(0 1)", 3), perm("(0 2)", 3)], DEFAULT_ORDER_CAP).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let c2 = FiniteGroup::enumerate(&[perm("(0 1)", 2)], 10).unwrap();
        assert_eq!(c2.order(), 2);
        assert_eq!(s3().order(), 6);
        let c5 = FiniteGroup::enumerate(&[perm("(0 1 2 3 4)", 5)], 10).unwrap();
        assert_eq!(c5.order(), 5);
        assert!(c5.element(0).is_identity());
    }

    #[test]
    fn enumeration_errors() {
        assert!(FiniteGroup::enumerate(&[], 10).is_err());
        assert!(matches!(
            FiniteGroup::enumerate(&[perm("(0 1)", 2), perm("(0 1)", 3)], 10),
            Err(Error::DegreeMismatch { .. })
        ));
        let r = FiniteGroup::enumerate(&[perm("(0 1 2 3 4)", 5), perm("(0 1)", 5)], 100);
        assert_eq!(r.unwrap_err(), Error::ResourceCap { what: "group order", cap: 100 });
    }

    #[test]
    fn table_and_direct_multiplication_agree() {
        let g = s3();
        for a in 0..6 {
            for b in 0..6 {
                let direct = g.id_of(&g.element(a).then(g.element(b))).unwrap();
                assert_eq!(g.mul(a, b), direct);
            }
            assert_eq!(g.mul(a, g.inv(a)), 0);
        }
    }

    #[test]
    fn classes_in_s3() {
        let g = s3();
        assert_eq!(g.conjugacy_class(0).len(), 1);
        let t = g.id_of(&perm("(0 1)", 3)).unwrap();
        let class = g.conjugacy_class(t);
        let expected: Vec<String> = vec!["(0 1)".into(), "(0 2)".into(), "(1 2)".into()];
        let mut got = class.to_perm_strings();
        got.sort();
        assert_eq!(got, expected);
        // brute force conjugation by all elements
        let brute = ElementSet::from_ids(&g, (0..6).map(|h| g.conj(t, h))).unwrap();
        assert_eq!(brute, class);
        let c3 = g.id_of(&perm("(0 1 2)", 3)).unwrap();
        assert_eq!(g.conjugacy_class(c3).len(), 2);
        let classes = g.conjugacy_classes();
        assert_eq!(classes.iter().map(|c| c.len()).sum::<usize>(), 6);
    }

    #[test]
    fn set_products_in_s3() {
        let g = s3();
        let t = g.id_of(&perm("(0 1)", 3)).unwrap();
        let tt = g.conjugacy_class(t);
        let id = ElementSet::singleton(&g, 0);
        assert_eq!(id.product(&tt).unwrap(), tt);
        let sq = tt.product(&tt).unwrap();
        let mut got = sq.to_perm_strings();
        got.sort();
        assert_eq!(got, vec!["()", "(0 1 2)", "(0 2 1)"]);
        let full = ElementSet::full(&g);
        assert_eq!(full.product(&full).unwrap(), full);
        let other = s3();
        assert_eq!(
            tt.product(&ElementSet::full(&other)).unwrap_err(),
            Error::GroupMismatch
        );
    }

    #[test]
    fn normal_closures_in_s3() {
        let g = s3();
        assert_eq!(g.normal_closure(&ElementSet::empty(&g)).unwrap().len(), 1);
        let c3 = g.id_of(&perm("(0 1 2)", 3)).unwrap();
        assert_eq!(g.normal_closure(&ElementSet::singleton(&g, c3)).unwrap().len(), 3);
        let t = g.id_of(&perm("(0 1)", 3)).unwrap();
        assert_eq!(g.normal_closure(&ElementSet::singleton(&g, t)).unwrap().len(), 6);
    }

    #[test]
    fn coset_groups() {
        let c6 = FiniteGroup::enumerate(&[perm("(0 1 2 3 4 5)", 6)], 100).unwrap();
        let trivial = ElementSet::singleton(&c6, 0);
        assert_eq!(c6.coset_group(&trivial).unwrap().quotient.order(), 6);
        let gen = c6.generator_ids()[0];
        let n2 = ElementSet::from_ids(&c6, [0, c6.pow(gen, 3)]).unwrap();
        let q = c6.coset_group(&n2).unwrap();
        assert_eq!(q.quotient.order(), 3);
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(
                    q.projection[c6.mul(a, b)],
                    q.quotient.mul(q.projection[a], q.projection[b])
                );
            }
        }
        assert_eq!(c6.coset_group(&ElementSet::full(&c6)).unwrap().quotient.order(), 1);
        let g = s3();
        let t = g.id_of(&perm("(0 1)", 3)).unwrap();
        assert!(g.coset_group(&ElementSet::from_ids(&g, [0, t]).unwrap()).is_err());
    }

    #[test]
    fn subgroup_realization() {
        let g = s3();
        let c3 = g.id_of(&perm("(0 1 2)", 3)).unwrap();
        let a3 = g.subgroup_generated(&ElementSet::singleton(&g, c3)).unwrap();
        let (sub, emb) = g.subgroup_as_group(&a3).unwrap();
        assert_eq!(sub.order(), 3);
        assert_eq!(emb[0], 0);
        let (triv, _) = g.subgroup_as_group(&ElementSet::singleton(&g, 0)).unwrap();
        assert_eq!(triv.order(), 1);
    }
}
