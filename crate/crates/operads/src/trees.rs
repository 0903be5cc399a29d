//! Reduced trees with labeled leaves: the combinatorial basis of the free
//! operads on generator modules with trivial arities 0 and 1.
//!
//! A tree is *reduced* when every vertex has at least two ingoing edges.
//! Trees are stored non-planar with a fixed canonical planar embedding: at
//! every vertex the children are ordered by their minimal descendant leaf
//! label, and vertices are listed in depth-first pre-order of that embedding.
//! Stored values are therefore in bijection with isomorphism classes, and no
//! rewriting is needed at read time.

use crate::error::{Error, Result};
use crate::perm::Perm;
use std::collections::BTreeMap;
use std::fmt;

/// A child slot of a vertex: either a leaf (1-based label) or a sub-vertex
/// (index into the vertex list).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Slot {
    Leaf(u32),
    Sub(u32),
}

/// A reduced tree with `arity` labeled leaves. `verts[0]` is the root; the
/// vertex list is in depth-first pre-order of the canonical embedding.
///
/// The unit tree (one leaf, no vertices) is represented by an empty vertex
/// list and arity 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedTree {
    pub arity: usize,
    pub verts: Vec<Vec<Slot>>,
}

impl ReducedTree {
    pub fn unit() -> Self {
        ReducedTree { arity: 1, verts: Vec::new() }
    }

    /// The corolla with `r` inputs labeled `1..=r`.
    pub fn corolla(r: usize) -> Self {
        assert!(r >= 2);
        ReducedTree { arity: r, verts: vec![(1..=r as u32).map(Slot::Leaf).collect()] }
    }

    pub fn is_unit(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn vertex_arity(&self, v: usize) -> usize {
        self.verts[v].len()
    }

    /// Minimal leaf label below each slot.
    fn slot_min(&self, s: Slot) -> u32 {
        match s {
            Slot::Leaf(l) => l,
            Slot::Sub(v) => self.verts[v as usize].iter().map(|&c| self.slot_min(c)).min().unwrap(),
        }
    }

    /// Whether children at every vertex are sorted by minimal descendant and
    /// vertices appear in DFS pre-order.
    pub fn is_canonical(&self) -> bool {
        if self.is_unit() {
            return true;
        }
        for ch in &self.verts {
            let mins: Vec<u32> = ch.iter().map(|&c| self.slot_min(c)).collect();
            if mins.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
        }
        // DFS pre-order check
        let mut order = Vec::new();
        let mut stack = vec![0u32];
        while let Some(v) = stack.pop() {
            order.push(v as usize);
            for &c in self.verts[v as usize].iter().rev() {
                if let Slot::Sub(w) = c {
                    stack.push(w);
                }
            }
        }
        order == (0..self.verts.len()).collect::<Vec<_>>()
    }

    /// Nested-parenthesis serialization with leaf labels, e.g. `(1,(2,3))`.
    /// The unit tree prints as `1`.
    pub fn serialize(&self) -> String {
        fn slot(t: &ReducedTree, s: Slot, out: &mut String) {
            match s {
                Slot::Leaf(l) => out.push_str(&l.to_string()),
                Slot::Sub(v) => vertex(t, v as usize, out),
            }
        }
        fn vertex(t: &ReducedTree, v: usize, out: &mut String) {
            out.push('(');
            for (k, &c) in t.verts[v].iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                slot(t, c, out);
            }
            out.push(')');
        }
        if self.is_unit() {
            return "1".to_string();
        }
        let mut s = String::new();
        vertex(self, 0, &mut s);
        s
    }

    /// Rebuild in canonical form, recording at each (old) vertex the
    /// permutation applied to its children: `transform[v]` maps new child
    /// position (0-based) to old child position. Vertices are renumbered to
    /// DFS pre-order; the returned map gives old vertex index per new index.
    pub fn canonical_form(&self) -> (ReducedTree, Vec<Perm>, Vec<usize>) {
        if self.is_unit() {
            return (self.clone(), Vec::new(), Vec::new());
        }
        // sort children of each vertex by minimal descendant leaf
        let mut transforms: Vec<Perm> = Vec::with_capacity(self.verts.len());
        let mut sorted_children: Vec<Vec<Slot>> = Vec::with_capacity(self.verts.len());
        for ch in &self.verts {
            let mut order: Vec<usize> = (0..ch.len()).collect();
            order.sort_by_key(|&k| self.slot_min(ch[k]));
            transforms.push(Perm::from_images(order.clone()));
            sorted_children.push(order.iter().map(|&k| ch[k]).collect());
        }
        // renumber vertices in DFS pre-order over the sorted embedding
        let mut new_index = vec![usize::MAX; self.verts.len()];
        let mut vertex_order = Vec::new();
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            new_index[v] = vertex_order.len();
            vertex_order.push(v);
            for &c in sorted_children[v].iter().rev() {
                if let Slot::Sub(w) = c {
                    stack.push(w as usize);
                }
            }
        }
        let verts = vertex_order
            .iter()
            .map(|&old| {
                sorted_children[old]
                    .iter()
                    .map(|&c| match c {
                        Slot::Leaf(l) => Slot::Leaf(l),
                        Slot::Sub(w) => Slot::Sub(new_index[w as usize] as u32),
                    })
                    .collect()
            })
            .collect();
        let canonical = ReducedTree { arity: self.arity, verts };
        let transforms_by_new: Vec<Perm> =
            vertex_order.iter().map(|&old| transforms[old].clone()).collect();
        (canonical, transforms_by_new, vertex_order)
    }

    /// Graft `inner` into leaf `slot` (1-based) of `self`, with the operadic
    /// leaf relabeling: inner's leaves occupy `slot .. slot+arity(inner)-1`,
    /// later leaves of `self` shift up. The result stays canonical when both
    /// inputs are canonical.
    pub fn graft(&self, slot: usize, inner: &ReducedTree) -> Result<ReducedTree> {
        if slot < 1 || slot > self.arity {
            return Err(Error::SlotOutOfRange { slot, arity: self.arity });
        }
        if inner.is_unit() {
            return Ok(self.clone());
        }
        if self.is_unit() {
            return Ok(inner.clone());
        }
        let shift = (inner.arity - 1) as u32;
        let n_outer = self.verts.len();

        // Outer vertices keep indices (relabeled), inner vertices appended
        // then the whole thing is re-sorted to DFS order below.
        let mut verts: Vec<Vec<Slot>> = self
            .verts
            .iter()
            .map(|ch| {
                ch.iter()
                    .map(|&c| match c {
                        Slot::Leaf(l) if (l as usize) == slot => Slot::Sub(n_outer as u32),
                        Slot::Leaf(l) if (l as usize) > slot => Slot::Leaf(l + shift),
                        Slot::Leaf(l) => Slot::Leaf(l),
                        Slot::Sub(v) => Slot::Sub(v),
                    })
                    .collect()
            })
            .collect();
        for ch in &inner.verts {
            verts.push(
                ch.iter()
                    .map(|&c| match c {
                        Slot::Leaf(l) => Slot::Leaf(l + slot as u32 - 1),
                        Slot::Sub(v) => Slot::Sub(v + n_outer as u32),
                    })
                    .collect(),
            );
        }
        let rough = ReducedTree { arity: self.arity + inner.arity - 1, verts };
        // child order is preserved by the monotone relabeling; only the DFS
        // numbering needs recomputing
        let (canon, transforms, _) = rough.canonical_form();
        debug_assert!(transforms.iter().all(|p| p.is_identity()), "graft broke child order");
        Ok(canon)
    }

    /// Locate a leaf: returns `(vertex index, 0-based child position)`.
    pub fn leaf_slot_of(&self, leaf: usize) -> Option<(usize, usize)> {
        for (v, ch) in self.verts.iter().enumerate() {
            for (k, &c) in ch.iter().enumerate() {
                if c == Slot::Leaf(leaf as u32) {
                    return Some((v, k));
                }
            }
        }
        None
    }

    /// Relabel leaves through `map` (1-based in, 1-based out) without
    /// re-canonicalizing.
    pub fn relabel_leaves(&self, map: impl Fn(usize) -> usize) -> ReducedTree {
        let verts = self
            .verts
            .iter()
            .map(|ch| {
                ch.iter()
                    .map(|&c| match c {
                        Slot::Leaf(l) => Slot::Leaf(map(l as usize) as u32),
                        s => s,
                    })
                    .collect()
            })
            .collect();
        ReducedTree { arity: self.arity, verts }
    }
}

impl fmt::Debug for ReducedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

/// A basis-element decoration: per-vertex generator block reference.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Decoration {
    pub degree: i64,
    pub index: u32,
}

/// A reduced tree whose vertices carry generator-basis decorations, indexed
/// parallel to `shape.verts`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecoratedTree {
    pub shape: ReducedTree,
    pub decorations: Vec<Decoration>,
}

impl DecoratedTree {
    pub fn total_degree(&self) -> i64 {
        self.decorations.iter().map(|d| d.degree).sum()
    }

    pub fn arity(&self) -> usize {
        self.shape.arity
    }
}

impl fmt::Debug for DecoratedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.shape.serialize())?;
        write!(f, "@[")?;
        for (k, d) in self.decorations.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}:{}", d.degree, d.index)?;
        }
        write!(f, "]")
    }
}

/// All canonical reduced trees with `l` labeled leaves whose vertex arities
/// lie in `allowed`, in deterministic order: by vertex count, then by
/// lexicographic canonical serialization.
pub fn enumerate_shapes(l: usize, allowed: &[usize]) -> Result<Vec<ReducedTree>> {
    if l < 2 {
        return Err(Error::Invalid(format!(
            "shape enumeration needs arity >= 2, got {l}; arities 0 and 1 are fixed"
        )));
    }
    if allowed.iter().any(|&a| a < 2) {
        return Err(Error::Invalid("vertex arities must be >= 2".into()));
    }
    let mut allowed = allowed.to_vec();
    allowed.sort_unstable();
    allowed.dedup();

    let leaves: Vec<u32> = (1..=l as u32).collect();
    let mut out = build_on(&leaves, &allowed);
    out.sort_by_key(|t| (t.vertex_count(), t.serialize()));
    Ok(out)
}

/// Canonical trees on an arbitrary sorted leaf set (recursion helper).
fn build_on(leaves: &[u32], allowed: &[usize]) -> Vec<ReducedTree> {
    let mut out = Vec::new();
    if leaves.len() < 2 {
        return out;
    }
    for &r in allowed {
        if r > leaves.len() {
            continue;
        }
        for blocks in partitions_into(leaves, r) {
            // every block of size one is a leaf; larger blocks recurse
            let mut child_sets: Vec<Vec<ReducedTree>> = Vec::with_capacity(r);
            let mut ok = true;
            for b in &blocks {
                if b.len() == 1 {
                    child_sets.push(vec![]); // marker for direct leaf
                } else {
                    let subs = build_on(b, allowed);
                    if subs.is_empty() {
                        ok = false;
                        break;
                    }
                    child_sets.push(subs);
                }
            }
            if !ok {
                continue;
            }
            // cartesian product over child alternatives
            let mut combos: Vec<Vec<Option<ReducedTree>>> = vec![Vec::new()];
            for (bi, set) in child_sets.iter().enumerate() {
                let mut next = Vec::new();
                for c in combos {
                    if blocks[bi].len() == 1 {
                        let mut c2 = c.clone();
                        c2.push(None);
                        next.push(c2);
                    } else {
                        for t in set {
                            let mut c2 = c.clone();
                            c2.push(Some(t.clone()));
                            next.push(c2);
                        }
                    }
                }
                combos = next;
            }
            for combo in combos {
                out.push(assemble(&blocks, &combo));
            }
        }
    }
    out
}

/// Assemble a canonical tree from root blocks (sorted by min) and child trees.
fn assemble(blocks: &[Vec<u32>], children: &[Option<ReducedTree>]) -> ReducedTree {
    let arity: usize = blocks.iter().map(|b| b.len()).sum();
    let mut verts: Vec<Vec<Slot>> = vec![Vec::new()];
    let mut root_children: Vec<Slot> = Vec::with_capacity(blocks.len());
    for (b, c) in blocks.iter().zip(children) {
        match c {
            None => root_children.push(Slot::Leaf(b[0])),
            Some(t) => {
                let base = verts.len() as u32;
                root_children.push(Slot::Sub(base));
                // subtree leaves already carry their real labels
                for ch in &t.verts {
                    verts.push(
                        ch.iter()
                            .map(|&s| match s {
                                Slot::Leaf(k) => Slot::Leaf(k),
                                Slot::Sub(v) => Slot::Sub(v + base),
                            })
                            .collect(),
                    );
                }
            }
        }
    }
    verts[0] = root_children;
    let rough = ReducedTree { arity, verts };
    // blocks are ordered by minimum and subtrees canonical, but vertex
    // numbering needs the DFS pass
    let (canon, transforms, _) = rough.canonical_form();
    debug_assert!(transforms.iter().all(|p| p.is_identity()));
    canon
}

/// Unordered partitions of a sorted set into `r` nonempty blocks, each block
/// sorted, blocks ordered by their minima. Deterministic order.
fn partitions_into(set: &[u32], r: usize) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    if set.len() < r || r == 0 {
        return out;
    }
    // place elements one at a time; first element of each block is its min
    fn rec(rest: &[u32], blocks: &mut Vec<Vec<u32>>, r: usize, out: &mut Vec<Vec<Vec<u32>>>) {
        if rest.is_empty() {
            if blocks.len() == r {
                out.push(blocks.clone());
            }
            return;
        }
        let x = rest[0];
        let tail = &rest[1..];
        // join an existing block
        for i in 0..blocks.len() {
            blocks[i].push(x);
            rec(tail, blocks, r, out);
            blocks[i].pop();
        }
        // open a new block (blocks stay ordered by min since x is increasing)
        if blocks.len() < r {
            blocks.push(vec![x]);
            rec(tail, blocks, r, out);
            blocks.pop();
        }
    }
    let mut blocks = Vec::new();
    rec(set, &mut blocks, r, &mut out);
    // keep only partitions where every block is nonempty (guaranteed) and
    // sizes permit reduced subtrees later; ordering is deterministic
    out
}

/// Count of unordered binary trees with `l` labeled leaves: `(2l-3)!!`.
pub fn double_factorial_count(l: usize) -> u64 {
    if l < 2 {
        return if l == 1 { 1 } else { 0 };
    }
    let mut acc: u64 = 1;
    let mut k: i64 = 2 * l as i64 - 3;
    while k > 1 {
        acc *= k as u64;
        k -= 2;
    }
    acc
}

/// Group a list of decorated trees by total degree, preserving order.
pub fn group_by_degree(trees: Vec<DecoratedTree>) -> BTreeMap<i64, Vec<DecoratedTree>> {
    let mut map: BTreeMap<i64, Vec<DecoratedTree>> = BTreeMap::new();
    for t in trees {
        map.entry(t.total_degree()).or_default().push(t);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corolla_counts() {
        let shapes = enumerate_shapes(2, &[2]).unwrap();
        assert_eq!(shapes.len(), 1);
        assert_eq!(shapes[0].serialize(), "(1,2)");
    }

    #[test]
    fn three_leaf_binary() {
        let shapes = enumerate_shapes(3, &[2]).unwrap();
        let ser: Vec<String> = shapes.iter().map(|t| t.serialize()).collect();
        assert_eq!(shapes.len(), 3);
        assert_eq!(ser, vec!["((1,2),3)", "((1,3),2)", "(1,(2,3))"]);
    }

    #[test]
    fn three_leaf_with_ternary() {
        // 3 binary + the 3-corolla
        let shapes = enumerate_shapes(3, &[2, 3]).unwrap();
        assert_eq!(shapes.len(), 4);
        assert_eq!(shapes[0].serialize(), "(1,2,3)"); // fewest vertices first
    }

    #[test]
    fn binary_counts_match_double_factorial() {
        for l in 2..=5 {
            let shapes = enumerate_shapes(l, &[2]).unwrap();
            assert_eq!(shapes.len() as u64, double_factorial_count(l), "l = {l}");
            assert!(shapes.iter().all(|t| t.is_canonical()));
            // duplicate-free
            let mut dedup = shapes.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), shapes.len());
        }
    }

    #[test]
    fn every_vertex_is_reduced() {
        for l in 2..=5 {
            for t in enumerate_shapes(l, &[2, 3, 4]).unwrap() {
                assert!(t.verts.iter().all(|ch| ch.len() >= 2));
            }
        }
    }

    #[test]
    fn rejects_small_arity() {
        assert!(enumerate_shapes(1, &[2]).is_err());
        assert!(enumerate_shapes(3, &[1]).is_err());
    }

    #[test]
    fn canonical_form_idempotent_and_records_swaps() {
        // 2-corolla with swapped children
        let t = ReducedTree { arity: 2, verts: vec![vec![Slot::Leaf(2), Slot::Leaf(1)]] };
        let (c, tr, _) = t.canonical_form();
        assert_eq!(c.serialize(), "(1,2)");
        assert_eq!(tr.len(), 1);
        assert!(!tr[0].is_identity());
        let (c2, tr2, _) = c.canonical_form();
        assert_eq!(c, c2);
        assert!(tr2.iter().all(|p| p.is_identity()));
    }

    #[test]
    fn canonical_form_two_swaps() {
        // binary 3-tree with both vertices misordered: (3,(2,1)) reversed
        let t = ReducedTree {
            arity: 3,
            verts: vec![vec![Slot::Leaf(3), Slot::Sub(1)], vec![Slot::Leaf(2), Slot::Leaf(1)]],
        };
        let (c, tr, _) = t.canonical_form();
        assert_eq!(c.serialize(), "((1,2),3)");
        assert_eq!(tr.iter().filter(|p| !p.is_identity()).count(), 2);
    }

    #[test]
    fn graft_examples() {
        let y2 = ReducedTree::corolla(2);
        // Y2 into slot 1 of Y2: the left comb
        let t = y2.graft(1, &y2).unwrap();
        assert_eq!(t.serialize(), "((1,2),3)");
        // unit grafts are no-ops
        assert_eq!(y2.graft(2, &ReducedTree::unit()).unwrap(), y2);
        assert_eq!(ReducedTree::unit().graft(1, &y2).unwrap(), y2);
        // Y3 into slot 2 of Y2: leaves {2,3,4} under the inner corolla
        let y3 = ReducedTree::corolla(3);
        let t = y2.graft(2, &y3).unwrap();
        assert_eq!(t.arity, 4);
        assert_eq!(t.serialize(), "(1,(2,3,4))");
        // out of range
        assert!(y2.graft(3, &y2).is_err());
    }

    #[test]
    fn graft_shape_associativity() {
        let y2 = ReducedTree::corolla(2);
        let y3 = ReducedTree::corolla(3);
        // sequential axiom at shape level: (T ∘_i S) ∘_{i+j-1} R = T ∘_i (S ∘_j R)
        let lhs = y2.graft(1, &y3).unwrap().graft(2, &y2).unwrap();
        let rhs = y2.graft(1, &y3.graft(2, &y2).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        // parallel: slots disjoint commute (after index shift)
        let a = y2.graft(1, &y2).unwrap(); // arity 3
        let lhs = a.graft(3, &y3).unwrap();
        let rhs = {
            let first = a.graft(3, &y3).unwrap();
            first
        };
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn serialization_unit() {
        assert_eq!(ReducedTree::unit().serialize(), "1");
    }
}
