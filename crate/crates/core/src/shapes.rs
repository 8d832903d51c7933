//! Shape multicategories and their groupoid enrichment by decorated trees.
//!
//! Objects are pairs of matchings on the `m` side, pairs on the `n` side,
//! or triples `(v, a, b)` standing for `a ∪ T_v ∪ b̄` for a fixed tangle `T`.
//! Between any two objects there is at most one multimorphism.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::below;
use crate::planar::{enumerate_matchings, Bits, Matching};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("sources do not chain to the target")]
    NoMorphism,
    #[error("tree inputs do not match: {0}")]
    Mismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ShapeObject {
    PairM { a: Matching, b: Matching },
    PairN { a: Matching, b: Matching },
    Triple { v: Bits, a: Matching, b: Matching },
}

impl ShapeObject {
    /// Left and right end matchings.
    pub fn ends(&self) -> (&Matching, &Matching) {
        match self {
            ShapeObject::PairM { a, b } | ShapeObject::PairN { a, b } | ShapeObject::Triple { a, b, .. } => (a, b),
        }
    }

    pub fn is_triple(&self) -> bool {
        matches!(self, ShapeObject::Triple { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShapeMultimorphism {
    pub sources: Vec<ShapeObject>,
    pub target: ShapeObject,
}

fn chains(objs: &[ShapeObject], first: &Matching, last: &Matching) -> bool {
    let mut cur = first;
    for o in objs {
        let (a, b) = o.ends();
        if a != cur {
            return false;
        }
        cur = b;
    }
    cur == last
}

impl ShapeMultimorphism {
    pub fn new(sources: Vec<ShapeObject>, target: ShapeObject) -> Result<Self, ShapeError> {
        let (a, b) = target.ends();
        if !chains(&sources, a, b) {
            return Err(ShapeError::NoMorphism);
        }
        let ok = match &target {
            ShapeObject::PairM { .. } => sources.iter().all(|s| matches!(s, ShapeObject::PairM { .. })),
            ShapeObject::PairN { .. } => sources.iter().all(|s| matches!(s, ShapeObject::PairN { .. })),
            ShapeObject::Triple { v: w, .. } => {
                let t: Vec<usize> = (0..sources.len()).filter(|&i| sources[i].is_triple()).collect();
                t.len() == 1 && {
                    let k = t[0];
                    let ShapeObject::Triple { v, .. } = &sources[k] else { unreachable!() };
                    below(v, w)
                        && sources[..k].iter().all(|s| matches!(s, ShapeObject::PairM { .. }))
                        && sources[k + 1..].iter().all(|s| matches!(s, ShapeObject::PairN { .. }))
                }
            }
        };
        if ok {
            Ok(ShapeMultimorphism { sources, target })
        } else {
            Err(ShapeError::NoMorphism)
        }
    }

    pub fn identity(obj: &ShapeObject) -> Self {
        ShapeMultimorphism { sources: vec![obj.clone()], target: obj.clone() }
    }

    /// Index of the triple among the sources, if any.
    pub fn triple_index(&self) -> Option<usize> {
        self.sources.iter().position(|s| s.is_triple())
    }

    /// Left chain, right chain and cube arrow of a tangle-shaped morphism.
    pub fn tangle_data(&self) -> Option<(Vec<Matching>, Bits, Bits, Vec<Matching>)> {
        let k = self.triple_index()?;
        let ShapeObject::Triple { v, a, b } = &self.sources[k] else { unreachable!() };
        let ShapeObject::Triple { v: w, .. } = &self.target else { unreachable!() };
        let mut left: Vec<Matching> = self.sources[..k].iter().map(|s| s.ends().0.clone()).collect();
        left.push(a.clone());
        let mut right = vec![b.clone()];
        right.extend(self.sources[k + 1..].iter().map(|s| s.ends().1.clone()));
        Some((left, v.clone(), w.clone(), right))
    }

    /// The matching chain of a pair-shaped morphism (a stump gives one entry).
    pub fn arc_chain(&self) -> Vec<Matching> {
        let mut seq = vec![self.target.ends().0.clone()];
        seq.extend(self.sources.iter().map(|s| s.ends().1.clone()));
        seq
    }
}

/// A decorated rooted plane tree. `Leaf` is the single-edge identity tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tree {
    Leaf(ShapeObject),
    Node { mor: ShapeMultimorphism, children: Vec<Tree> },
}

impl Tree {
    pub fn output(&self) -> &ShapeObject {
        match self {
            Tree::Leaf(o) => o,
            Tree::Node { mor, .. } => &mor.target,
        }
    }

    pub fn leaves(&self) -> Vec<ShapeObject> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<ShapeObject>) {
        match self {
            Tree::Leaf(o) => out.push(o.clone()),
            Tree::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn num_vertices(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node { children, .. } => 1 + children.iter().map(Tree::num_vertices).sum::<usize>(),
        }
    }

    /// Checks that every vertex decoration matches its incident edges.
    pub fn validate(&self) -> Result<(), ShapeError> {
        if let Tree::Node { mor, children } = self {
            if mor.sources.len() != children.len() {
                return Err(ShapeError::Mismatch("arity".into()));
            }
            for (s, c) in mor.sources.iter().zip(children) {
                if s != c.output() {
                    return Err(ShapeError::Mismatch(format!("{s:?} vs {:?}", c.output())));
                }
                c.validate()?;
            }
            ShapeMultimorphism::new(mor.sources.clone(), mor.target.clone())?;
        }
        Ok(())
    }

    /// Canonical serialization (nested records, preorder).
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("trees serialize")
    }
}

pub fn basic_tree(mor: &ShapeMultimorphism) -> Tree {
    Tree::Node { mor: mor.clone(), children: mor.sources.iter().cloned().map(Tree::Leaf).collect() }
}

/// Glues `children` onto the leaves of `parent`, in order.
pub fn graft(children: &[Tree], parent: &Tree) -> Result<Tree, ShapeError> {
    let mut it = children.iter();
    let out = graft_rec(&mut it, parent)?;
    if it.next().is_some() {
        return Err(ShapeError::Mismatch("too many children".into()));
    }
    Ok(out)
}

fn graft_rec<'a>(it: &mut impl Iterator<Item = &'a Tree>, t: &Tree) -> Result<Tree, ShapeError> {
    match t {
        Tree::Leaf(o) => {
            let c = it.next().ok_or_else(|| ShapeError::Mismatch("too few children".into()))?;
            if c.output() != o {
                return Err(ShapeError::Mismatch(format!("{o:?} vs {:?}", c.output())));
            }
            Ok(c.clone())
        }
        Tree::Node { mor, children } => Ok(Tree::Node {
            mor: mor.clone(),
            children: children.iter().map(|c| graft_rec(it, c)).collect::<Result<_, _>>()?,
        }),
    }
}

/// The unique composite of a tree.
pub fn flatten(t: &Tree) -> ShapeMultimorphism {
    ShapeMultimorphism::new(t.leaves(), t.output().clone()).expect("valid tree flattens")
}

/// The unique 2-morphism between trees with the same composite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeOfTree {
    pub from: Tree,
    pub to: Tree,
}

impl ChangeOfTree {
    pub fn new(from: Tree, to: Tree) -> Result<Self, ShapeError> {
        if flatten(&from) != flatten(&to) {
            return Err(ShapeError::NoMorphism);
        }
        Ok(ChangeOfTree { from, to })
    }
}

/// Possible targets of a block of consecutive sources. `pos` is the cut
/// position, used for an empty block.
fn block_targets(sources: &[ShapeObject], lo: usize, hi: usize, target: &ShapeObject) -> Vec<ShapeObject> {
    let triple_at = sources.iter().position(|s| s.is_triple());
    if lo == hi {
        let (m, right) = match (lo, triple_at) {
            (0, _) if sources.is_empty() => (target.ends().0.clone(), matches!(target, ShapeObject::PairN { .. })),
            (p, Some(k)) if p > k => (sources[p - 1].ends().1.clone(), true),
            (p, _) if p < sources.len() => (sources[p].ends().0.clone(), matches!(sources[p], ShapeObject::PairN { .. })),
            (p, _) => (sources[p - 1].ends().1.clone(), matches!(sources[p - 1], ShapeObject::PairN { .. })),
        };
        return vec![if right {
            ShapeObject::PairN { a: m.clone(), b: m }
        } else {
            ShapeObject::PairM { a: m.clone(), b: m }
        }];
    }
    let block = &sources[lo..hi];
    let (a, b) = (block[0].ends().0.clone(), block[hi - lo - 1].ends().1.clone());
    match block.iter().find(|s| s.is_triple()) {
        Some(ShapeObject::Triple { v, .. }) => {
            let ShapeObject::Triple { v: w, .. } = target else { return vec![] };
            cube_between(v, w).into_iter().map(|u| ShapeObject::Triple { v: u, a: a.clone(), b: b.clone() }).collect()
        }
        _ => match &block[0] {
            ShapeObject::PairN { .. } => vec![ShapeObject::PairN { a, b }],
            _ => vec![ShapeObject::PairM { a, b }],
        },
    }
}

/// All `u` with `v <= u <= w`, in lexicographic order.
pub fn cube_between(v: &[u8], w: &[u8]) -> Vec<Bits> {
    let mut out = vec![Vec::new()];
    for (x, y) in v.iter().zip(w) {
        out = out.into_iter().flat_map(|p| (*x..=*y).map(move |b| [p.clone(), vec![b]].concat())).collect();
    }
    out
}

/// Ways to cut `0..len` into `r` consecutive (possibly empty) blocks.
fn cuts(len: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return if len == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    fn rec(len: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            let mut c = cur.clone();
            c.push(len);
            out.push(c);
            return;
        }
        let last = *cur.last().unwrap();
        for p in last..=len {
            cur.push(p);
            rec(len, r, cur, out);
            cur.pop();
        }
    }
    rec(len, r, &mut cur, &mut out);
    out
}

fn trees_rec(sources: &[ShapeObject], target: &ShapeObject, budget: usize) -> Vec<Tree> {
    let mut out = Vec::new();
    if sources.len() == 1 && &sources[0] == target {
        out.push(Tree::Leaf(target.clone()));
    }
    if budget == 0 {
        return out;
    }
    // each empty block costs a vertex, so the arity is bounded
    for r in 0..=sources.len() + budget - 1 {
        for cut in cuts(sources.len(), r) {
            let empties = cut.windows(2).filter(|w| w[0] == w[1]).count();
            if empties > budget - 1 {
                continue;
            }
            let opts: Vec<Vec<ShapeObject>> =
                cut.windows(2).map(|w| block_targets(sources, w[0], w[1], target)).collect();
            for choice in product(&opts) {
                if ShapeMultimorphism::new(choice.clone(), target.clone()).is_err() {
                    continue;
                }
                let mor = ShapeMultimorphism { sources: choice.clone(), target: target.clone() };
                let mut partial: Vec<(Vec<Tree>, usize)> = vec![(vec![], budget - 1)];
                for (i, t) in choice.iter().enumerate() {
                    let block = &sources[cut[i]..cut[i + 1]];
                    let mut next = Vec::new();
                    for (kids, left) in &partial {
                        for sub in trees_rec(block, t, *left) {
                            let used = sub.num_vertices();
                            let mut k = kids.clone();
                            k.push(sub);
                            next.push((k, left - used));
                        }
                    }
                    partial = next;
                }
                out.extend(partial.into_iter().map(|(children, _)| Tree::Node { mor: mor.clone(), children }));
            }
        }
    }
    out
}

fn product<T: Clone>(opts: &[Vec<T>]) -> Vec<Vec<T>> {
    opts.iter().fold(vec![vec![]], |acc, o| {
        acc.into_iter().flat_map(|p| o.iter().map(move |x| [p.clone(), vec![x.clone()]].concat())).collect()
    })
}

/// All trees composing to `mor` with at most `max_vertices` internal
/// vertices, sorted by canonical serialization.
pub fn enumerate_trees(mor: &ShapeMultimorphism, max_vertices: usize) -> Vec<Tree> {
    let mut out: Vec<Tree> =
        trees_rec(&mor.sources, &mor.target, max_vertices).into_iter().filter(|t| !matches!(t, Tree::Leaf(_))).collect();
    out.sort_by_cached_key(|t| (t.num_vertices(), t.canonical()));
    out.dedup();
    out
}

/// All objects of the shape multicategory for sizes `m`, `n` and
/// `ncross` crossings.
pub fn enumerate_objects(m: usize, n: usize, ncross: Option<usize>) -> Vec<ShapeObject> {
    let (bm, bn) = (enumerate_matchings(m), enumerate_matchings(n));
    let mut out = Vec::new();
    for a in &bm {
        for b in &bm {
            out.push(ShapeObject::PairM { a: a.clone(), b: b.clone() });
        }
    }
    if let Some(nc) = ncross {
        for a in &bn {
            for b in &bn {
                out.push(ShapeObject::PairN { a: a.clone(), b: b.clone() });
            }
        }
        for v in cube_between(&vec![0; nc], &vec![1; nc]) {
            for a in &bm {
                for b in &bn {
                    out.push(ShapeObject::Triple { v: v.clone(), a: a.clone(), b: b.clone() });
                }
            }
        }
    }
    out
}

/// All pair-chain morphisms with `k` inputs among `n`-arc matchings.
pub fn enumerate_arc_morphisms(n: usize, k: usize) -> Vec<ShapeMultimorphism> {
    let ms = enumerate_matchings(n);
    let mut seqs: Vec<Vec<Matching>> = ms.iter().map(|a| vec![a.clone()]).collect();
    for _ in 0..k {
        seqs = seqs.into_iter().flat_map(|s| ms.iter().map(move |m| [s.clone(), vec![m.clone()]].concat())).collect();
    }
    seqs.into_iter().map(|s| arc_morphism(&s)).collect()
}

/// The pair-chain morphism `(a0,a1),...,(a_{k-1},a_k) -> (a0,a_k)`; a
/// single matching gives the stump.
pub fn arc_morphism(seq: &[Matching]) -> ShapeMultimorphism {
    let sources = seq.windows(2).map(|w| ShapeObject::PairM { a: w[0].clone(), b: w[1].clone() }).collect();
    let target = ShapeObject::PairM { a: seq[0].clone(), b: seq.last().unwrap().clone() };
    ShapeMultimorphism { sources, target }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(p: &[usize]) -> Matching {
        Matching::new(p.to_vec()).unwrap()
    }

    fn pm(a: &Matching, b: &Matching) -> ShapeObject {
        ShapeObject::PairM { a: a.clone(), b: b.clone() }
    }

    #[test]
    fn basic_trees() {
        let (a, b) = (m(&[2, 1, 4, 3]), m(&[4, 3, 2, 1]));
        let id = ShapeMultimorphism::identity(&pm(&a, &b));
        assert_eq!(basic_tree(&id).leaves(), vec![pm(&a, &b)]);
        let stump = arc_morphism(&[a.clone()]);
        let t = basic_tree(&stump);
        assert!(t.leaves().is_empty());
        assert_eq!(t.num_vertices(), 1);
        let tri = arc_morphism(&[a.clone(), b.clone(), a.clone(), b.clone()]);
        assert_eq!(basic_tree(&tri).leaves().len(), 3);
        assert_eq!(flatten(&basic_tree(&tri)), tri);
    }

    #[test]
    fn grafting() {
        let (a, b) = (m(&[2, 1, 4, 3]), m(&[4, 3, 2, 1]));
        let two = basic_tree(&arc_morphism(&[a.clone(), b.clone(), a.clone()]));
        let ids: Vec<Tree> = two.leaves().into_iter().map(Tree::Leaf).collect();
        assert_eq!(graft(&ids, &two).unwrap(), two);
        let c1 = basic_tree(&arc_morphism(&[a.clone(), a.clone(), b.clone()]));
        let c2 = basic_tree(&arc_morphism(&[b.clone(), b.clone(), a.clone()]));
        let g = graft(&[c1.clone(), c2.clone()], &two).unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.leaves().len(), 4);
        assert!(graft(&[c2, c1], &two).is_err());
        // stumps as children
        let s = basic_tree(&arc_morphism(&[a.clone()]));
        let gs = graft(&[s.clone(), Tree::Leaf(pm(&a, &b))], &basic_tree(&arc_morphism(&[a.clone(), a.clone(), b.clone()])))
            .unwrap();
        assert_eq!(flatten(&gs), ShapeMultimorphism::identity(&pm(&a, &b)));
    }

    #[test]
    fn tangle_arrows_compose() {
        let (a, b) = (m(&[2, 1]), m(&[2, 1]));
        let tr = |v: &[u8]| ShapeObject::Triple { v: v.to_vec(), a: a.clone(), b: b.clone() };
        let lo = basic_tree(&ShapeMultimorphism::new(vec![tr(&[0, 0])], tr(&[0, 1])).unwrap());
        let hi = basic_tree(&ShapeMultimorphism::new(vec![tr(&[0, 1])], tr(&[1, 1])).unwrap());
        let g = graft(&[lo], &hi).unwrap();
        assert_eq!(flatten(&g), ShapeMultimorphism::new(vec![tr(&[0, 0])], tr(&[1, 1])).unwrap());
    }

    #[test]
    fn existence_is_cube_order() {
        let a = m(&[2, 1]);
        let cube = cube_between(&[0, 0, 0], &[1, 1, 1]);
        for v in &cube {
            for w in &cube {
                let brute = v.iter().zip(w).all(|(x, y)| x <= y);
                let r = ShapeMultimorphism::new(
                    vec![ShapeObject::Triple { v: v.clone(), a: a.clone(), b: a.clone() }],
                    ShapeObject::Triple { v: w.clone(), a: a.clone(), b: a.clone() },
                );
                assert_eq!(r.is_ok(), brute);
            }
        }
        // mixed kinds never chain
        assert!(ShapeMultimorphism::new(vec![ShapeObject::PairN { a: a.clone(), b: a.clone() }], pm(&a, &a)).is_err());
    }

    #[test]
    fn enumeration_small() {
        let a = m(&[2, 1]);
        let mor = arc_morphism(&[a.clone(), a.clone(), a.clone()]);
        assert_eq!(enumerate_trees(&mor, 1), vec![basic_tree(&mor)]);
        assert!(enumerate_trees(&mor, 0).is_empty());
        // oracle: with two vertices the root is binary with one unary child
        // (two ways), ternary with one stump (three positions), or unary on top
        // of the basic corolla
        let two = enumerate_trees(&mor, 2);
        let mut shapes: Vec<String> = two
            .iter()
            .map(|t| match t {
                Tree::Node { children, .. } => children
                    .iter()
                    .map(|c| match c {
                        Tree::Leaf(_) => "l".to_string(),
                        Tree::Node { children, .. } => format!("n{}", children.len()),
                    })
                    .collect::<Vec<_>>()
                    .join(","),
                Tree::Leaf(_) => unreachable!(),
            })
            .collect();
        shapes.sort();
        assert_eq!(shapes, vec!["l,l", "l,l,n0", "l,n0,l", "l,n1", "n0,l,l", "n1,l", "n2"]);
        for t in &two {
            t.validate().unwrap();
            assert_eq!(flatten(t), mor);
        }
    }

    #[test]
    fn tangle_enumeration_respects_cube() {
        let a = m(&[2, 1]);
        let mor = ShapeMultimorphism::new(
            vec![pm(&a, &a), ShapeObject::Triple { v: vec![0, 0], a: a.clone(), b: a.clone() }],
            ShapeObject::Triple { v: vec![1, 1], a: a.clone(), b: a.clone() },
        )
        .unwrap();
        let ts = enumerate_trees(&mor, 2);
        for t in &ts {
            t.validate().unwrap();
            assert_eq!(flatten(t), mor);
        }
        // a unary vertex above the basic one may stop at any of the four cube points
        assert!(ts.len() > 4);
    }

    fn arb_tree() -> impl Strategy<Value = Tree> {
        let ms = enumerate_matchings(2);
        let seqs = proptest::collection::vec(0..ms.len(), 1..4);
        (seqs, 1usize..3, any::<u64>()).prop_map(move |(s, budget, pick)| {
            let seq: Vec<Matching> = s.iter().map(|&i| ms[i].clone()).collect();
            let all = enumerate_trees(&arc_morphism(&seq), budget);
            all[(pick % all.len() as u64) as usize].clone()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn graft_laws(p in arb_tree(), seed in any::<u64>()) {
            // unit
            let ids: Vec<Tree> = p.leaves().into_iter().map(Tree::Leaf).collect();
            prop_assert_eq!(&graft(&ids, &p).unwrap(), &p);
            prop_assert_eq!(&graft(&[p.clone()], &Tree::Leaf(p.output().clone())).unwrap(), &p);
            // associativity: pick children then grandchildren
            let kids: Vec<Tree> = p.leaves().iter().enumerate().map(|(i, o)| {
                let (a, b) = o.ends();
                let mid = if (seed >> i) & 1 == 1 { a.clone() } else { b.clone() };
                basic_tree(&arc_morphism(&[a.clone(), mid, b.clone()]))
            }).collect();
            let grand: Vec<Tree> = kids.iter().flat_map(|k| k.leaves()).map(|o| {
                let (a, b) = o.ends();
                basic_tree(&arc_morphism(&[a.clone(), b.clone()]))
            }).collect();
            let left = graft(&grand, &graft(&kids, &p).unwrap()).unwrap();
            let kids2: Vec<Tree> = {
                let mut it = grand.iter();
                kids.iter().map(|k| {
                    let n = k.leaves().len();
                    let g: Vec<Tree> = it.by_ref().take(n).cloned().collect();
                    graft(&g, k).unwrap()
                }).collect()
            };
            let right = graft(&kids2, &p).unwrap();
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(left.output(), p.output());
            let gl: Vec<ShapeObject> = grand.iter().flat_map(|g| g.leaves()).collect();
            prop_assert_eq!(left.leaves(), gl);
        }
    }
}
