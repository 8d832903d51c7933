//! Independent oracles for the integration tests. Nothing here calls into
//! the cube or TQFT code of the library; only the parser is shared.
#![allow(dead_code)]

use arcalg::planar::{Slice, SliceWord};

/// Brute-force count of non-crossing perfect matchings of 2n points:
/// every fixed-point-free involution, filtered for crossing chords.
pub fn brute_matchings(n: usize) -> usize {
    fn go(pair: &mut Vec<usize>, out: &mut usize) {
        let Some(p) = pair.iter().position(|&x| x == usize::MAX) else {
            let crossing = (0..pair.len()).any(|i| {
                let j = pair[i];
                (0..pair.len()).any(|k| {
                    let l = pair[k];
                    i < j && k < l && i < k && k < j && j < l
                })
            });
            if !crossing {
                *out += 1;
            }
            return;
        };
        for q in p + 1..pair.len() {
            if pair[q] == usize::MAX {
                pair[p] = q;
                pair[q] = p;
                go(pair, out);
                pair[p] = usize::MAX;
                pair[q] = usize::MAX;
            }
        }
    }
    let mut out = 0;
    go(&mut vec![usize::MAX; 2 * n], &mut out);
    out
}

struct Uf(Vec<usize>);

impl Uf {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// Endpoints `(level, position)`, flattened; circles of one resolution.
struct Resolution {
    circle_of: Vec<usize>,
    count: usize,
}

fn widths(t: &SliceWord) -> Vec<usize> {
    let mut w = vec![t.left];
    for s in &t.slices {
        let cur = *w.last().unwrap();
        w.push(match *s {
            Slice::Id { .. } | Slice::Cross { .. } => cur,
            Slice::Cup { .. } => cur + 2,
            Slice::Cap { .. } => cur - 2,
        });
    }
    w
}

fn resolution(t: &SliceWord, w: &[usize], offs: &[usize], v: &[u8]) -> Resolution {
    let total = offs[w.len()];
    let id = |s: usize, p: usize| offs[s] + p - 1;
    let mut uf = Uf((0..total).collect());
    for (s, sl) in t.slices.iter().enumerate() {
        let wd = w[s];
        let straight = |uf: &mut Uf, p: usize, q: usize| uf.union(id(s, p), id(s + 1, q));
        match *sl {
            Slice::Id { .. } => (1..=wd).for_each(|p| straight(&mut uf, p, p)),
            Slice::Cup { i } => {
                (1..=wd).for_each(|p| straight(&mut uf, p, if p < i { p } else { p + 2 }));
                uf.union(id(s + 1, i), id(s + 1, i + 1));
            }
            Slice::Cap { i } => {
                uf.union(id(s, i), id(s, i + 1));
                (1..=wd).filter(|&p| p != i && p != i + 1).for_each(|p| straight(&mut uf, p, if p < i { p } else { p - 2 }));
            }
            Slice::Cross { i, c } => {
                (1..=wd).filter(|&p| p != i && p != i + 1).for_each(|p| straight(&mut uf, p, p));
                if v[c - 1] == 0 {
                    straight(&mut uf, i, i);
                    straight(&mut uf, i + 1, i + 1);
                } else {
                    uf.union(id(s, i), id(s, i + 1));
                    uf.union(id(s + 1, i), id(s + 1, i + 1));
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..total).map(|x| uf.find(x)).collect();
    let mut uniq = roots.clone();
    uniq.sort();
    uniq.dedup();
    for r in roots.iter_mut() {
        *r = uniq.binary_search(r).unwrap();
    }
    Resolution { circle_of: roots, count: uniq.len() + t.closed_loops }
}

/// A sparse F2 matrix as rows of bitsets.
fn rank_f2(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, |r| r.len() * 64);
    for c in 0..cols {
        let (w, b) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & b != 0 {
                row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
            }
        }
        rank += 1;
    }
    rank
}

pub struct KhOracle {
    pub chain_dim: usize,
    pub homology_dim: usize,
    pub d_squared_zero: bool,
}

/// Total F2 Khovanov homology of a closed diagram, straight from the cube:
/// states are subsets of circles carrying `x`, merge `m` and split `delta`
/// written out by hand.
pub fn kh_oracle(t: &SliceWord) -> KhOracle {
    assert_eq!((t.left, t.right), (0, 0));
    let w = widths(t);
    let mut offs = vec![0];
    for &x in &w {
        offs.push(offs.last().unwrap() + x);
    }
    let ncross = t.slices.iter().filter(|s| matches!(s, Slice::Cross { .. })).count();
    let res: Vec<Resolution> = (0..1usize << ncross)
        .map(|bits| {
            let v: Vec<u8> = (0..ncross).map(|c| (bits >> c & 1) as u8).collect();
            resolution(t, &w, &offs, &v)
        })
        .collect();
    // global column index of (vertex, state)
    let mut start = vec![0usize];
    for r in &res {
        start.push(start.last().unwrap() + (1usize << r.count));
    }
    let total = *start.last().unwrap();
    let cross_at: Vec<(usize, usize)> = {
        let mut v = vec![(0, 0); ncross];
        for (s, sl) in t.slices.iter().enumerate() {
            if let Slice::Cross { i, c } = *sl {
                v[c - 1] = (s, i);
            }
        }
        v
    };
    // d as a map from global index to the set of global indices hit
    let mut d: Vec<Vec<usize>> = vec![Vec::new(); total];
    for from in 0..res.len() {
        for (c, &(s, i)) in cross_at.iter().enumerate() {
            if from >> c & 1 == 1 {
                continue;
            }
            let to = from | 1 << c;
            let (r0, r1) = (&res[from], &res[to]);
            let p = offs[s] + i - 1;
            let (a0, b0) = (r0.circle_of[p], r0.circle_of[p + 1]);
            // after the change the two sides of the saddle are the cap at
            // level s and the cup at level s + 1
            let (a1, b1) = (r1.circle_of[p], r1.circle_of[offs[s + 1] + i - 1]);
            // every other circle is matched through any of its endpoints
            let mut image = vec![usize::MAX; r0.count];
            for q in 0..r0.circle_of.len() {
                image[r0.circle_of[q]] = r1.circle_of[q];
            }
            let loops0 = r0.count - t.closed_loops;
            let loops1 = r1.count - t.closed_loops;
            for k in 0..t.closed_loops {
                image[loops0 + k] = loops1 + k;
            }
            for st in 0..1usize << r0.count {
                let mut base = 0usize;
                for k in 0..r0.count {
                    if k != a0 && k != b0 && st >> k & 1 == 1 {
                        base |= 1 << image[k];
                    }
                }
                let (xa, xb) = (st >> a0 & 1, st >> b0 & 1);
                let outs: Vec<usize> = if a0 != b0 {
                    // merge
                    match xa + xb {
                        0 => vec![base],
                        1 => vec![base | 1 << a1],
                        _ => vec![],
                    }
                } else if xa == 1 {
                    vec![base | 1 << a1 | 1 << b1]
                } else {
                    vec![base | 1 << a1, base | 1 << b1]
                };
                d[start[from] + st].extend(outs.into_iter().map(|o| start[to] + o));
            }
        }
    }
    let words = total.div_ceil(64);
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(total);
    for src in &d {
        let mut row = vec![0u64; words];
        for &t in src {
            row[t / 64] ^= 1 << (t % 64);
        }
        rows.push(row);
    }
    let d_squared_zero = d.iter().all(|outs| {
        let mut acc = vec![0u64; words];
        for &m in outs {
            acc.iter_mut().zip(&rows[m]).for_each(|(x, y)| *x ^= y);
        }
        acc.iter().all(|&x| x == 0)
    });
    let r = rank_f2(rows);
    KhOracle { chain_dim: total, homology_dim: total - 2 * r, d_squared_zero }
}
