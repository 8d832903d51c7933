//! The Frobenius algebra `A = R[X]/X²`, the arc algebra product computed by
//! replaying frame sweeps, and a Bar-Natan normal form for dotted
//! cobordisms over F2.
//!
//! A circle label is a `bool`: `false` is `1`, `true` is `X` (a dot).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::frames::{build_arc_frame, Event};
use crate::linalg::Matrix;
use crate::planar::{circles, Matching, UnionFind};
use crate::ring::{Ring, F2};

/// A basis element of `Disks(a, b)`: one label per circle of `a ∪ b̄`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiskElement {
    pub a: Matching,
    pub b: Matching,
    pub dots: Vec<bool>,
}

impl DiskElement {
    pub fn new(a: Matching, b: Matching, dots: Vec<bool>) -> Self {
        assert_eq!(dots.len(), circles(&a, &b).len(), "one label per circle");
        DiskElement { a, b, dots }
    }

    /// The idempotent `1_a`.
    pub fn unit(a: &Matching) -> Self {
        DiskElement { a: a.clone(), b: a.clone(), dots: vec![false; a.n()] }
    }
}

/// A linear combination of disk elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Cob<R: Ring> {
    pub terms: BTreeMap<DiskElement, R>,
}

impl<R: Ring> Cob<R> {
    pub fn zero() -> Self {
        Cob { terms: BTreeMap::new() }
    }

    pub fn basis(e: DiskElement) -> Self {
        Cob { terms: BTreeMap::from([(e, R::one())]) }
    }

    pub fn add_term(&mut self, e: DiskElement, c: R) {
        let v = *self.terms.get(&e).unwrap_or(&R::zero()) + c;
        if v.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn add(&self, other: &Cob<R>) -> Cob<R> {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: R) -> Cob<R> {
        let mut out = Cob::zero();
        for (e, c) in &self.terms {
            out.add_term(e.clone(), *c * s);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Linear combination of labelings of an ordered circle list.
pub type DotVec<R> = BTreeMap<Vec<bool>, R>;

type State = BTreeMap<u32, bool>;

fn push<R: Ring>(out: &mut BTreeMap<State, R>, s: State, c: R) {
    let v = *out.get(&s).unwrap_or(&R::zero()) + c;
    if v.is_zero() {
        out.remove(&s);
    } else {
        out.insert(s, v);
    }
}

/// Applies one event to a labelled state.
fn step<R: Ring>(e: &Event, x: &BTreeMap<State, R>) -> BTreeMap<State, R> {
    let mut out = BTreeMap::new();
    for (s, c) in x {
        let mut s = s.clone();
        match *e {
            Event::Merge { a, b, out: o } => {
                let (la, lb) = (s.remove(&a).expect("merge input"), s.remove(&b).expect("merge input"));
                if !(la && lb) {
                    s.insert(o, la || lb);
                    push(&mut out, s, *c);
                }
            }
            Event::Split { input, out: [o1, o2] } => {
                if s.remove(&input).expect("split input") {
                    s.insert(o1, true);
                    s.insert(o2, true);
                    push(&mut out, s, *c);
                } else {
                    let mut s2 = s.clone();
                    s.insert(o1, false);
                    s.insert(o2, true);
                    s2.insert(o1, true);
                    s2.insert(o2, false);
                    push(&mut out, s, *c);
                    push(&mut out, s2, *c);
                }
            }
            Event::Birth { out: o } => {
                s.insert(o, false);
                push(&mut out, s, *c);
            }
            Event::Death { input } => {
                if s.remove(&input).expect("death input") {
                    push(&mut out, s, *c);
                }
            }
            Event::Dot { circle } => {
                let l = s.get_mut(&circle).expect("dotted circle");
                if !*l {
                    *l = true;
                    push(&mut out, s, *c);
                }
            }
        }
    }
    out
}

/// Runs the events on `x` (labels of `inputs`, in order) and reads the
/// result off `outputs`.
pub fn act_events<R: Ring>(events: &[Event], inputs: &[u32], outputs: &[u32], x: &DotVec<R>) -> DotVec<R> {
    let mut cur: BTreeMap<State, R> = BTreeMap::new();
    for (labels, c) in x {
        assert_eq!(labels.len(), inputs.len());
        let s: State = inputs.iter().copied().zip(labels.iter().copied()).collect();
        push(&mut cur, s, *c);
    }
    for e in events {
        cur = step(e, &cur);
    }
    let mut res = DotVec::new();
    for (s, c) in cur {
        assert_eq!(s.len(), outputs.len(), "dangling circles after events");
        let labels: Vec<bool> = outputs.iter().map(|o| s[o]).collect();
        let v = *res.get(&labels).unwrap_or(&R::zero()) + c;
        if v.is_zero() {
            res.remove(&labels);
        } else {
            res.insert(labels, v);
        }
    }
    res
}

pub fn dots_index(d: &[bool]) -> usize {
    d.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub fn index_dots(idx: usize, n: usize) -> Vec<bool> {
    (0..n).map(|k| (idx >> (n - 1 - k)) & 1 == 1).collect()
}

/// Matrix of an event list: columns are input labelings, rows output ones.
pub fn events_matrix<R: Ring>(events: &[Event], inputs: &[u32], outputs: &[u32]) -> Matrix<R> {
    let (ni, no) = (inputs.len(), outputs.len());
    let mut m = Matrix::zeros(1 << no, 1 << ni);
    for col in 0..1usize << ni {
        let x = DotVec::from([(index_dots(col, ni), R::one())]);
        for (labels, c) in act_events(events, inputs, outputs, &x) {
            m.set(dots_index(&labels), col, c);
        }
    }
    m
}

/// The dotted cobordism given by a sweep acting on disk elements: each
/// element must live on the input circles in order.
pub fn act_cobordism<R: Ring>(
    events: &[Event],
    inputs: &[u32],
    outputs: &[u32],
    target: (&Matching, &Matching),
    x: &[(Vec<bool>, R)],
) -> Cob<R> {
    let dv: DotVec<R> = x.iter().cloned().collect();
    let mut out = Cob::zero();
    for (labels, c) in act_events(events, inputs, outputs, &dv) {
        out.add_term(DiskElement { a: target.0.clone(), b: target.1.clone(), dots: labels }, c);
    }
    out
}

/// All `2^#circles` basis elements of `Disks(a, b)`.
pub fn bimodule_generators(a: &Matching, b: &Matching) -> Vec<DiskElement> {
    let k = circles(a, b).len();
    (0..1usize << k).map(|i| DiskElement { a: a.clone(), b: b.clone(), dots: index_dots(i, k) }).collect()
}

/// Product of basis elements along a chain; zero when neighbouring
/// matchings do not agree.
pub fn multiply_n<R: Ring>(xs: &[DiskElement]) -> Cob<R> {
    assert!(!xs.is_empty());
    if xs.windows(2).any(|w| w[0].b != w[1].a) {
        return Cob::zero();
    }
    let mut seq = vec![xs[0].a.clone()];
    seq.extend(xs.iter().map(|x| x.b.clone()));
    let f = build_arc_frame(&seq).expect("valid chain");
    let sd = f.saddle_decompose();
    let inputs: Vec<u32> = sd.inputs.iter().flatten().copied().collect();
    let labels: Vec<bool> = xs.iter().flat_map(|x| x.dots.iter().copied()).collect();
    act_cobordism(&sd.events, &inputs, &sd.outputs, (&seq[0], seq.last().unwrap()), &[(labels, R::one())])
}

/// Structure constants of the product on a chain of matchings: columns
/// are tuples of input basis elements (first factor most significant).
pub fn multiply_matrix(seq: &[Matching]) -> Matrix<i64> {
    let f = build_arc_frame(seq).expect("valid chain");
    let sd = f.saddle_decompose();
    let inputs: Vec<u32> = sd.inputs.iter().flatten().copied().collect();
    events_matrix(&sd.events, &inputs, &sd.outputs)
}

pub fn multiply<R: Ring>(x: &DiskElement, y: &DiskElement) -> Cob<R> {
    multiply_n(&[x.clone(), y.clone()])
}

/// Bilinear extension of the product.
pub fn multiply_cob<R: Ring>(x: &Cob<R>, y: &Cob<R>) -> Cob<R> {
    let mut out = Cob::zero();
    for (a, ca) in &x.terms {
        for (b, cb) in &y.terms {
            out = out.add(&multiply::<R>(a, b).scale(*ca * *cb));
        }
    }
    out
}

/// Value of a closed connected surface of genus `g` carrying `dots` dots.
pub fn closed_value(genus: usize, dots: usize) -> i64 {
    match (genus, dots) {
        (0, 1) => 1,
        (1, 0) => 2,
        _ => 0,
    }
}

/// One connected piece of a dotted cobordism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CobComponent {
    pub ins: Vec<usize>,
    pub outs: Vec<usize>,
    pub genus: usize,
    pub dots: usize,
}

/// A dotted cobordism described by its topology alone.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CobDescriptor {
    pub n_in: usize,
    pub n_out: usize,
    pub components: Vec<CobComponent>,
}

/// Topology of an event list: components, genus and dots.
pub fn describe(events: &[Event], inputs: &[u32], outputs: &[u32]) -> CobDescriptor {
    let mut ids: Vec<u32> = inputs.iter().chain(outputs.iter()).copied().collect();
    for e in events {
        ids.extend(e.consumed());
        ids.extend(e.produced());
        if let Event::Dot { circle } = e {
            ids.push(*circle);
        }
    }
    ids.sort();
    ids.dedup();
    let ix = |c: u32| ids.binary_search(&c).unwrap();
    let mut uf = UnionFind::new(ids.len());
    let mut chi_of: Vec<(usize, i64, usize)> = Vec::new(); // (circle, chi, dots)
    for e in events {
        let touched: Vec<u32> = e.consumed().into_iter().chain(e.produced()).collect();
        for w in touched.windows(2) {
            uf.union(ix(w[0]), ix(w[1]));
        }
        let (chi, dots) = match e {
            Event::Merge { .. } | Event::Split { .. } => (-1, 0),
            Event::Birth { .. } | Event::Death { .. } => (1, 0),
            Event::Dot { .. } => (0, 1),
        };
        let anchor = match e {
            Event::Dot { circle } => *circle,
            _ => touched[0],
        };
        chi_of.push((ix(anchor), chi, dots));
    }
    let mut roots: Vec<usize> = (0..ids.len()).map(|k| uf.find(k)).collect();
    roots.sort();
    roots.dedup();
    let mut comps: Vec<(i64, usize, Vec<usize>, Vec<usize>)> = vec![(0, 0, vec![], vec![]); roots.len()];
    let pos = |uf: &mut UnionFind, k: usize| roots.binary_search(&uf.find(k)).unwrap();
    for (k, chi, dots) in chi_of {
        let p = pos(&mut uf, k);
        comps[p].0 += chi;
        comps[p].1 += dots;
    }
    for (i, c) in inputs.iter().enumerate() {
        let p = pos(&mut uf, ix(*c));
        comps[p].2.push(i);
    }
    for (i, c) in outputs.iter().enumerate() {
        let p = pos(&mut uf, ix(*c));
        comps[p].3.push(i);
    }
    let components = comps
        .into_iter()
        .map(|(chi, dots, ins, outs)| {
            let b = (ins.len() + outs.len()) as i64;
            let twice = 2 - chi - b;
            assert!(twice >= 0 && twice % 2 == 0, "surface with chi {chi} and {b} boundary circles");
            CobComponent { ins, outs, genus: (twice / 2) as usize, dots }
        })
        .collect();
    CobDescriptor { n_in: inputs.len(), n_out: outputs.len(), components }
}

/// Bar-Natan normal form over F2: every component is neck-cut into disks,
/// handles become two dots (zero mod 2), two dots on a sheet vanish, and a
/// sheet carrying one dot in total feeds `X` to all its outgoing disks.
pub fn reduce_f2(d: &CobDescriptor) -> Matrix<F2> {
    let mut m = Matrix::zeros(1 << d.n_out, 1 << d.n_in);
    for col in 0..1usize << d.n_in {
        let ins = index_dots(col, d.n_in);
        // list of partial output labelings with coefficient (over F2, a set with parity)
        let mut acc: BTreeMap<Vec<Option<bool>>, bool> = BTreeMap::from([(vec![None; d.n_out], true)]);
        for c in &d.components {
            let total = c.dots + c.ins.iter().filter(|&&i| ins[i]).count();
            let mut next: BTreeMap<Vec<Option<bool>>, bool> = BTreeMap::new();
            let mut put = |l: Vec<Option<bool>>| {
                let e = next.entry(l).or_insert(false);
                *e = !*e;
            };
            if c.genus > 0 || total > 1 {
                acc.clear();
                break;
            }
            for (lab, on) in &acc {
                if !on {
                    continue;
                }
                if c.outs.is_empty() {
                    if total == 1 {
                        put(lab.clone());
                    }
                } else if total == 1 {
                    let mut l = lab.clone();
                    c.outs.iter().for_each(|&o| l[o] = Some(true));
                    put(l);
                } else {
                    for &free in &c.outs {
                        let mut l = lab.clone();
                        c.outs.iter().for_each(|&o| l[o] = Some(o != free));
                        put(l);
                    }
                }
            }
            acc = next;
        }
        for (lab, on) in acc {
            if on {
                let labels: Vec<bool> = lab.iter().map(|x| x.expect("every output labelled")).collect();
                m.add_at(dots_index(&labels), col, F2::ONE);
            }
        }
    }
    m
}

/// Whether two formal sums of dotted cobordisms agree after Bar-Natan
/// reduction over F2.
pub fn check_barnatan_f2(lhs: &[CobDescriptor], rhs: &[CobDescriptor]) -> bool {
    let shape = lhs.first().or(rhs.first()).map(|d| (d.n_in, d.n_out));
    let Some((ni, no)) = shape else { return true };
    let mut total = Matrix::<F2>::zeros(1 << no, 1 << ni);
    for d in lhs.iter().chain(rhs) {
        assert_eq!((d.n_in, d.n_out), (ni, no), "terms with different boundary");
        total = total.add(&reduce_f2(d));
    }
    total.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::enumerate_matchings;

    fn m(p: &[usize]) -> Matching {
        Matching::new(p.to_vec()).unwrap()
    }

    /// Oracle: the Frobenius algebra written out as structure constants.
    fn frob_mul(x: bool, y: bool) -> Option<bool> {
        match (x, y) {
            (true, true) => None,
            (a, b) => Some(a || b),
        }
    }

    #[test]
    fn one_arc_products() {
        let a = m(&[2, 1]);
        let one = DiskElement::new(a.clone(), a.clone(), vec![false]);
        let x = DiskElement::new(a.clone(), a.clone(), vec![true]);
        assert_eq!(multiply::<i64>(&one, &one), Cob::basis(one.clone()));
        assert_eq!(multiply::<i64>(&one, &x), Cob::basis(x.clone()));
        assert!(multiply::<i64>(&x, &x).is_zero());
        for (p, q) in [(false, false), (false, true), (true, true)] {
            let l = DiskElement::new(a.clone(), a.clone(), vec![p]);
            let r = DiskElement::new(a.clone(), a.clone(), vec![q]);
            let want = frob_mul(p, q).map(|d| Cob::basis(DiskElement::new(a.clone(), a.clone(), vec![d])));
            assert_eq!(multiply::<i64>(&l, &r), want.unwrap_or_default());
        }
    }

    #[test]
    fn two_arc_examples() {
        let (a, b) = (m(&[2, 1, 4, 3]), m(&[4, 3, 2, 1]));
        let one_ab = DiskElement::new(a.clone(), b.clone(), vec![false]);
        let one_ba = DiskElement::new(b.clone(), a.clone(), vec![false]);
        let got = multiply::<i64>(&one_ab, &one_ba);
        let mut want = Cob::zero();
        want.add_term(DiskElement::new(a.clone(), a.clone(), vec![true, false]), 1);
        want.add_term(DiskElement::new(a.clone(), a.clone(), vec![false, true]), 1);
        assert_eq!(got, want);
        let triple = multiply_n::<i64>(&[one_ab.clone(), one_ba, one_ab]);
        assert_eq!(triple, Cob::basis(DiskElement::new(a.clone(), b.clone(), vec![true])).scale(2));
    }

    fn basis(n: usize) -> Vec<DiskElement> {
        let ms = enumerate_matchings(n);
        let mut out = Vec::new();
        for a in &ms {
            for b in &ms {
                out.extend(bimodule_generators(a, b));
            }
        }
        out
    }

    #[test]
    fn dimension_of_h2() {
        assert_eq!(basis(2).len(), 12);
        assert_eq!(basis(1).len(), 2);
    }

    #[test]
    fn associative_and_nonnegative() {
        for n in 1..=3 {
            let bs = basis(n);
            for x in &bs {
                for y in bs.iter().filter(|y| y.a == x.b) {
                    let xy = multiply::<i64>(x, y);
                    assert!(xy.terms.values().all(|&c| c > 0));
                    for z in bs.iter().filter(|z| z.a == y.b) {
                        let l = multiply_cob(&xy, &Cob::basis(z.clone()));
                        let r = multiply_cob(&Cob::basis(x.clone()), &multiply::<i64>(y, z));
                        assert_eq!(l, r, "{x:?} {y:?} {z:?}");
                        assert_eq!(l, multiply_n::<i64>(&[x.clone(), y.clone(), z.clone()]));
                    }
                }
            }
        }
    }

    #[test]
    fn units() {
        for x in basis(3) {
            assert_eq!(multiply::<i64>(&DiskElement::unit(&x.a), &x), Cob::basis(x.clone()));
            assert_eq!(multiply::<i64>(&x, &DiskElement::unit(&x.b)), Cob::basis(x.clone()));
        }
    }

    #[test]
    fn barnatan_examples() {
        let tube = CobDescriptor {
            n_in: 1,
            n_out: 1,
            components: vec![CobComponent { ins: vec![0], outs: vec![0], genus: 0, dots: 0 }],
        };
        let cut = |d_in, d_out| CobDescriptor {
            n_in: 1,
            n_out: 1,
            components: vec![
                CobComponent { ins: vec![0], outs: vec![], genus: 0, dots: d_in },
                CobComponent { ins: vec![], outs: vec![0], genus: 0, dots: d_out },
            ],
        };
        assert!(check_barnatan_f2(&[tube.clone()], &[cut(1, 0), cut(0, 1)]));
        assert!(!check_barnatan_f2(&[tube], &[cut(1, 0)]));
        let sphere = |dots| CobDescriptor {
            n_in: 0,
            n_out: 0,
            components: vec![CobComponent { ins: vec![], outs: vec![], genus: 0, dots }],
        };
        let one = CobDescriptor { n_in: 0, n_out: 0, components: vec![] };
        assert!(check_barnatan_f2(&[sphere(0)], &[]));
        assert!(check_barnatan_f2(&[sphere(1)], &[one]));
        assert!(check_barnatan_f2(&[sphere(2)], &[]));
    }

    #[test]
    fn normal_form_matches_replay() {
        // every arc-algebra product: Frobenius replay vs topological reduction
        let ms = enumerate_matchings(2);
        for a in &ms {
            for b in &ms {
                for c in &ms {
                    for d in &ms {
                        let f = build_arc_frame(&[a.clone(), b.clone(), c.clone(), d.clone()]).unwrap();
                        let sd = f.saddle_decompose();
                        let ins: Vec<u32> = sd.inputs.iter().flatten().copied().collect();
                        let direct: Matrix<F2> = events_matrix(&sd.events, &ins, &sd.outputs);
                        assert_eq!(direct, reduce_f2(&describe(&sd.events, &ins, &sd.outputs)));
                    }
                }
            }
        }
    }
}
