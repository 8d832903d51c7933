//! The Burnside multicategory: correspondences (set-valued matrices) with
//! strictly associative multicomposition, and their signed variant.
//!
//! A token is a sorted list of atoms, each placed at a tree address. A
//! composite token keeps the outer atoms, moves each inner token under the
//! address of the leaf it was plugged into, and records the intermediate
//! row on that leaf as an edge atom. Identity correspondences carry a flag
//! and contribute nothing, so composition is strict on the nose.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::ring::Ring;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BurnsideError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a bijection at entry {0:?}")]
    NotBijective(Key),
    #[error("sign not preserved at entry {0:?}")]
    SignChanged(Key),
}

/// Entry address: (row, one column index per source).
pub type Key = (usize, Vec<usize>);
pub type Sign = i8;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AtomKind {
    Edge,
    Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub path: Vec<u32>,
    pub kind: AtomKind,
    pub vals: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Token(pub Vec<Atom>);

impl Token {
    pub fn vertex(vals: Vec<u32>) -> Self {
        Token(vec![Atom { path: vec![], kind: AtomKind::Vertex, vals }])
    }

    fn normalize(mut self) -> Self {
        self.0.sort();
        self
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|a| {
                let p: Vec<String> = a.path.iter().map(|x| x.to_string()).collect();
                let v: Vec<String> = a.vals.iter().map(|x| x.to_string()).collect();
                let k = if a.kind == AtomKind::Edge { 'e' } else { 'v' };
                format!("{k}[{}]{}", p.join("."), v.join(","))
            })
            .collect();
        write!(f, "<{}>", parts.join(";"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub sources: Vec<usize>,
    pub target: usize,
    pub entries: BTreeMap<Key, BTreeSet<Token>>,
    /// Set only on identity correspondences and composites of them.
    pub identity: bool,
    /// Tree address of each input.
    pub leaf_paths: Vec<Vec<u32>>,
}

impl Correspondence {
    /// A one-vertex correspondence; empty entries may be omitted.
    pub fn basic(sources: Vec<usize>, target: usize, entries: BTreeMap<Key, BTreeSet<Token>>) -> Self {
        let leaf_paths = (0..sources.len() as u32).map(|i| vec![i]).collect();
        let entries = entries.into_iter().filter(|(_, s)| !s.is_empty()).collect();
        let c = Correspondence { sources, target, entries, identity: false, leaf_paths };
        c.check_keys().expect("entry keys in range");
        c
    }

    fn check_keys(&self) -> Result<(), BurnsideError> {
        for (z, xs) in self.entries.keys() {
            if *z >= self.target || xs.len() != self.sources.len() || xs.iter().zip(&self.sources).any(|(x, s)| x >= s)
            {
                return Err(BurnsideError::Shape(format!("key {:?} out of range", (z, xs))));
            }
        }
        Ok(())
    }

    pub fn entry(&self, key: &Key) -> Option<&BTreeSet<Token>> {
        self.entries.get(key)
    }

    pub fn cardinality(&self, key: &Key) -> usize {
        self.entries.get(key).map_or(0, |s| s.len())
    }

    pub fn num_columns(&self) -> usize {
        self.sources.iter().product()
    }
}

pub fn identity_correspondence(x: usize) -> Correspondence {
    let entries = (0..x).map(|i| ((i, vec![i]), BTreeSet::from([Token::default()]))).collect();
    Correspondence { sources: vec![x], target: x, entries, identity: true, leaf_paths: vec![vec![]] }
}

fn prefixed<'a>(p: &[u32], t: &'a Token) -> impl Iterator<Item = Atom> + 'a {
    let p = p.to_vec();
    t.0.iter().map(move |a| Atom { path: [p.clone(), a.path.clone()].concat(), kind: a.kind, vals: a.vals.clone() })
}

/// Composite token from an outer token and one `(row, token)` per input.
fn assemble(outer: &Correspondence, inner: &[Correspondence], t: &Token, parts: &[(usize, &Token)]) -> Token {
    let mut atoms = t.0.clone();
    for (i, (y, ti)) in parts.iter().enumerate() {
        let p = &outer.leaf_paths[i];
        if !outer.identity && !inner[i].identity {
            atoms.push(Atom { path: p.clone(), kind: AtomKind::Edge, vals: vec![*y as u32] });
        }
        atoms.extend(prefixed(p, ti));
    }
    Token(atoms).normalize()
}

/// Visits every element of the composite: its key, the outer token, the
/// inner `(row, token)` pieces and the assembled token.
fn for_each_composite(
    outer: &Correspondence,
    inner: &[Correspondence],
    mut f: impl FnMut(&Key, &Key, &[Key], &Token, &[(usize, &Token)], Token),
) -> Result<(), BurnsideError> {
    if inner.len() != outer.sources.len() {
        return Err(BurnsideError::Shape(format!("{} inputs for arity {}", inner.len(), outer.sources.len())));
    }
    for (i, c) in inner.iter().enumerate() {
        if c.target != outer.sources[i] {
            return Err(BurnsideError::Shape(format!("input {i}: target {} vs {}", c.target, outer.sources[i])));
        }
    }
    let by_row: Vec<BTreeMap<usize, Vec<(&Key, &BTreeSet<Token>)>>> = inner
        .iter()
        .map(|c| {
            let mut m: BTreeMap<usize, Vec<_>> = BTreeMap::new();
            for (k, s) in &c.entries {
                m.entry(k.0).or_default().push((k, s));
            }
            m
        })
        .collect();
    for (okey, otoks) in &outer.entries {
        let (z, ys) = okey;
        let mut combos: Vec<Vec<(&Key, &BTreeSet<Token>)>> = vec![vec![]];
        for (i, y) in ys.iter().enumerate() {
            let Some(opts) = by_row[i].get(y) else {
                combos.clear();
                break;
            };
            combos = combos.into_iter().flat_map(|c| opts.iter().map(move |o| [c.clone(), vec![*o]].concat())).collect();
        }
        for combo in combos {
            let key: Key = (*z, combo.iter().flat_map(|(k, _)| k.1.iter().copied()).collect());
            let ikeys: Vec<Key> = combo.iter().map(|(k, _)| (*k).clone()).collect();
            let mut tok_lists: Vec<Vec<(usize, &Token)>> = vec![vec![]];
            for (i, (_, toks)) in combo.iter().enumerate() {
                tok_lists = tok_lists
                    .into_iter()
                    .flat_map(|c| toks.iter().map(move |t| [c.clone(), vec![(ys[i], t)]].concat()))
                    .collect();
            }
            for t in otoks {
                for parts in &tok_lists {
                    let tok = assemble(outer, inner, t, parts);
                    f(&key, okey, &ikeys, t, parts, tok);
                }
            }
        }
    }
    Ok(())
}

fn composite_shell(outer: &Correspondence, inner: &[Correspondence]) -> Correspondence {
    let leaf_paths = outer
        .leaf_paths
        .iter()
        .zip(inner)
        .flat_map(|(p, c)| c.leaf_paths.iter().map(move |q| [p.clone(), q.clone()].concat()))
        .collect();
    Correspondence {
        sources: inner.iter().flat_map(|c| c.sources.iter().copied()).collect(),
        target: outer.target,
        entries: BTreeMap::new(),
        identity: outer.identity && inner.iter().all(|c| c.identity),
        leaf_paths,
    }
}

/// Multicomposition `outer ∘ (inner_1, ..., inner_m)`.
pub fn compose(outer: &Correspondence, inner: &[Correspondence]) -> Result<Correspondence, BurnsideError> {
    let mut out = composite_shell(outer, inner);
    let mut entries: BTreeMap<Key, BTreeSet<Token>> = BTreeMap::new();
    for_each_composite(outer, inner, |key, _, _, _, _, tok| {
        let fresh = entries.entry(key.clone()).or_default().insert(tok);
        debug_assert!(fresh, "composite tokens are distinct");
    })?;
    out.entries = entries;
    Ok(out)
}

/// Integer (or F2) matrix of entry cardinalities; columns are source tuples
/// in mixed radix with the first source most significant.
pub fn linearize<R: Ring>(a: &Correspondence) -> Matrix<R> {
    let mut m = Matrix::zeros(a.target, a.num_columns());
    for ((z, xs), toks) in &a.entries {
        m.add_at(*z, column_index(&a.sources, xs), R::from_i64(toks.len() as i64));
    }
    m
}

pub fn column_index(sizes: &[usize], xs: &[usize]) -> usize {
    xs.iter().zip(sizes).fold(0, |acc, (x, s)| acc * s + x)
}

pub fn column_tuple(sizes: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        out[k] = idx % sizes[k];
        idx /= sizes[k];
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedCorrespondence {
    pub corr: Correspondence,
    pub signs: BTreeMap<Key, BTreeMap<Token, Sign>>,
}

impl SignedCorrespondence {
    /// Every token signed `+1`.
    pub fn plus(corr: Correspondence) -> Self {
        let signs = corr.entries.iter().map(|(k, s)| (k.clone(), s.iter().map(|t| (t.clone(), 1)).collect())).collect();
        SignedCorrespondence { corr, signs }
    }

    pub fn sign(&self, key: &Key, t: &Token) -> Sign {
        self.signs[key][t]
    }

    /// Sign shared by all tokens of an entry, if it is constant.
    pub fn entry_sign(&self, key: &Key) -> Option<Sign> {
        let s: BTreeSet<Sign> = self.signs.get(key)?.values().copied().collect();
        (s.len() == 1).then(|| *s.iter().next().unwrap())
    }
}

pub fn signed_compose(
    outer: &SignedCorrespondence,
    inner: &[SignedCorrespondence],
) -> Result<SignedCorrespondence, BurnsideError> {
    let base: Vec<Correspondence> = inner.iter().map(|c| c.corr.clone()).collect();
    let mut corr = composite_shell(&outer.corr, &base);
    let mut signs: BTreeMap<Key, BTreeMap<Token, Sign>> = BTreeMap::new();
    for_each_composite(&outer.corr, &base, |key, okey, ikeys, t, parts, tok| {
        let s = parts.iter().zip(ikeys).zip(inner).fold(outer.sign(okey, t), |acc, (((_, ti), ik), c)| acc * c.sign(ik, ti));
        signs.entry(key.clone()).or_default().insert(tok, s);
    })?;
    corr.entries = signs.iter().map(|(k, m)| (k.clone(), m.keys().cloned().collect())).collect();
    Ok(SignedCorrespondence { corr, signs })
}

/// Signed cardinalities.
pub fn linearize_signed<R: Ring>(a: &SignedCorrespondence) -> Matrix<R> {
    let mut m = Matrix::zeros(a.corr.target, a.corr.num_columns());
    for ((z, xs), toks) in &a.signs {
        let v: i64 = toks.values().map(|&s| s as i64).sum();
        m.add_at(*z, column_index(&a.corr.sources, xs), R::from_i64(v));
    }
    m
}

/// A 2-morphism: per-entry bijections between tokens.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntrywiseBijection {
    pub from: Correspondence,
    pub to: Correspondence,
    pub map: BTreeMap<Key, BTreeMap<Token, Token>>,
}

impl EntrywiseBijection {
    pub fn new(
        from: Correspondence,
        to: Correspondence,
        map: BTreeMap<Key, BTreeMap<Token, Token>>,
    ) -> Result<Self, BurnsideError> {
        let b = EntrywiseBijection { from, to, map };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), BurnsideError> {
        if self.from.sources != self.to.sources || self.from.target != self.to.target {
            return Err(BurnsideError::Shape("bijection between different shapes".into()));
        }
        let keys: BTreeSet<&Key> = self.from.entries.keys().chain(self.to.entries.keys()).collect();
        for k in keys {
            let (src, dst) = (self.from.entries.get(k), self.to.entries.get(k));
            let m = self.map.get(k);
            let n = src.map_or(0, |s| s.len());
            if n != dst.map_or(0, |s| s.len()) || m.map_or(0, |m| m.len()) != n {
                return Err(BurnsideError::NotBijective(k.clone()));
            }
            if let (Some(src), Some(dst), Some(m)) = (src, dst, m) {
                let img: BTreeSet<&Token> = m.values().collect();
                if m.keys().any(|t| !src.contains(t)) || img.len() != n || img.iter().any(|t| !dst.contains(*t)) {
                    return Err(BurnsideError::NotBijective(k.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn identity(a: &Correspondence) -> Self {
        let map = a.entries.iter().map(|(k, s)| (k.clone(), s.iter().map(|t| (t.clone(), t.clone())).collect())).collect();
        EntrywiseBijection { from: a.clone(), to: a.clone(), map }
    }

    pub fn apply(&self, key: &Key, t: &Token) -> &Token {
        &self.map[key][t]
    }

    /// Vertical composite: `self` first, then `next`.
    pub fn then(&self, next: &EntrywiseBijection) -> Result<EntrywiseBijection, BurnsideError> {
        if self.to != next.from {
            return Err(BurnsideError::Shape("vertical composition of unrelated bijections".into()));
        }
        let map = self
            .map
            .iter()
            .map(|(k, m)| (k.clone(), m.iter().map(|(a, b)| (a.clone(), next.apply(k, b).clone())).collect()))
            .collect();
        Ok(EntrywiseBijection { from: self.from.clone(), to: next.to.clone(), map })
    }

    pub fn inverse(&self) -> EntrywiseBijection {
        let map =
            self.map.iter().map(|(k, m)| (k.clone(), m.iter().map(|(a, b)| (b.clone(), a.clone())).collect())).collect();
        EntrywiseBijection { from: self.to.clone(), to: self.from.clone(), map }
    }

    /// Whether signs are preserved between two signings of the ends.
    pub fn preserves_signs(&self, from: &SignedCorrespondence, to: &SignedCorrespondence) -> Result<(), BurnsideError> {
        for (k, m) in &self.map {
            if m.iter().any(|(a, b)| from.sign(k, a) != to.sign(k, b)) {
                return Err(BurnsideError::SignChanged(k.clone()));
            }
        }
        Ok(())
    }
}

/// Horizontal multicomposition `g * (f_1 × ... × f_m)`.
pub fn hcompose_bijections(
    g: &EntrywiseBijection,
    fs: &[EntrywiseBijection],
) -> Result<EntrywiseBijection, BurnsideError> {
    let from_inner: Vec<Correspondence> = fs.iter().map(|f| f.from.clone()).collect();
    let to_inner: Vec<Correspondence> = fs.iter().map(|f| f.to.clone()).collect();
    let from = compose(&g.from, &from_inner)?;
    let to = compose(&g.to, &to_inner)?;
    let mut map: BTreeMap<Key, BTreeMap<Token, Token>> = BTreeMap::new();
    for_each_composite(&g.from, &from_inner, |key, okey, ikeys, t, parts, tok| {
        let t2 = g.apply(okey, t);
        let parts2: Vec<(usize, &Token)> =
            parts.iter().zip(ikeys).zip(fs).map(|(((y, ti), ik), f)| (*y, f.apply(ik, ti))).collect();
        map.entry(key.clone()).or_default().insert(tok, assemble(&g.to, &to_inner, t2, &parts2));
    })?;
    EntrywiseBijection::new(from, to, map)
}

/// Random small correspondences for law checks.
pub mod random {
    use super::*;
    use rand::Rng;

    pub fn correspondence(rng: &mut impl Rng, sources: &[usize], target: usize, max_entry: usize) -> Correspondence {
        let ncols: usize = sources.iter().product();
        let mut entries = BTreeMap::new();
        for z in 0..target {
            for c in 0..ncols {
                let k = rng.gen_range(0..=max_entry);
                let toks: BTreeSet<Token> = (0..k as u32).map(|i| Token::vertex(vec![i, rng.gen_range(0..3)])).collect();
                entries.insert((z, column_tuple(sources, c)), toks);
            }
        }
        Correspondence::basic(sources.to_vec(), target, entries)
    }

    pub fn signed(rng: &mut impl Rng, sources: &[usize], target: usize, max_entry: usize) -> SignedCorrespondence {
        let corr = correspondence(rng, sources, target, max_entry);
        let signs = corr
            .entries
            .iter()
            .map(|(k, s)| (k.clone(), s.iter().map(|t| (t.clone(), if rng.gen_bool(0.5) { 1 } else { -1 })).collect()))
            .collect();
        SignedCorrespondence { corr, signs }
    }

    fn sizes(rng: &mut impl Rng, k: usize) -> Vec<usize> {
        (0..k).map(|_| rng.gen_range(1..=2)).collect()
    }

    /// Outer piece, one layer on its inputs, then a layer on every input of
    /// that composite; some pieces are identities.
    pub fn signed_triple(
        rng: &mut impl Rng,
    ) -> (SignedCorrespondence, Vec<SignedCorrespondence>, Vec<SignedCorrespondence>) {
        fn pick(rng: &mut impl Rng, src: &[usize], t: usize) -> SignedCorrespondence {
            if src.len() == 1 && src[0] == t && rng.gen_bool(0.3) {
                SignedCorrespondence::plus(identity_correspondence(t))
            } else {
                signed(rng, src, t, 2)
            }
        }
        let k = rng.gen_range(1..=2);
        let mid = sizes(rng, k);
        let a = pick(rng, &mid, 2);
        let bs: Vec<SignedCorrespondence> = mid
            .iter()
            .map(|&t| {
                let k = rng.gen_range(0..=2);
                let s = sizes(rng, k);
                pick(rng, &s, t)
            })
            .collect();
        let leaves: Vec<usize> = bs.iter().flat_map(|b| b.corr.sources.clone()).collect();
        let cs = leaves
            .iter()
            .map(|&t| {
                let k = rng.gen_range(0..=2);
                let s = sizes(rng, k);
                pick(rng, &s, t)
            })
            .collect();
        (a, bs, cs)
    }

    /// A random entrywise permutation of `a` (tokens renamed).
    pub fn bijection(rng: &mut impl Rng, a: &Correspondence) -> EntrywiseBijection {
        use rand::seq::SliceRandom;
        let mut to = a.clone();
        let salt = rng.gen_range(10..1000u32);
        if !a.identity {
            for s in to.entries.values_mut() {
                *s = s.iter().map(|t| rename(t, salt)).collect();
            }
        }
        let mut map = BTreeMap::new();
        for (k, s) in &a.entries {
            let mut img: Vec<Token> = to.entries[k].iter().cloned().collect();
            img.shuffle(rng);
            map.insert(k.clone(), s.iter().cloned().zip(img).collect());
        }
        EntrywiseBijection { from: a.clone(), to, map }
    }

    fn rename(t: &Token, salt: u32) -> Token {
        Token(t.0.iter().map(|a| Atom { vals: [a.vals.clone(), vec![salt]].concat(), ..a.clone() }).collect())
    }
}

/// Instances and failures per law of a randomized sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub seed: u64,
    pub laws: BTreeMap<String, (usize, usize)>,
    pub pass: bool,
}

impl LawReport {
    fn record(&mut self, law: &str, ok: bool) {
        let e = self.laws.entry(law.to_string()).or_default();
        e.0 += 1;
        e.1 += usize::from(!ok);
    }
}

fn kron(x: &Matrix<i64>, y: &Matrix<i64>) -> Matrix<i64> {
    let mut m = Matrix::zeros(x.rows() * y.rows(), x.cols() * y.cols());
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            for k in 0..y.rows() {
                for l in 0..y.cols() {
                    m.set(i * y.rows() + k, j * y.cols() + l, x.get(i, j) * y.get(k, l));
                }
            }
        }
    }
    m
}

/// Strict associativity and unitality of (signed) composition, and
/// functoriality of (signed) linearization, on `per_law` random instances each.
pub fn law_sweep(seed: u64, per_law: usize) -> LawReport {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut rep = LawReport { seed, ..Default::default() };
    let split = |cs: &[SignedCorrespondence], bs: &[SignedCorrespondence]| {
        let mut it = cs.iter();
        bs.iter().map(|b| it.by_ref().take(b.corr.sources.len()).cloned().collect::<Vec<_>>()).collect::<Vec<_>>()
    };
    let unsigned = |v: &[SignedCorrespondence]| v.iter().map(|x| x.corr.clone()).collect::<Vec<_>>();
    for _ in 0..per_law {
        let (a, bs, cs) = random::signed_triple(&mut rng);
        let groups = split(&cs, &bs);
        // associativity
        let (ua, ubs, ucs) = (a.corr.clone(), unsigned(&bs), unsigned(&cs));
        let ok = (|| -> Result<bool, BurnsideError> {
            let left = compose(&compose(&ua, &ubs)?, &ucs)?;
            let bc = bs.iter().zip(&groups).map(|(b, g)| compose(&b.corr, &unsigned(g))).collect::<Result<Vec<_>, _>>()?;
            Ok(left == compose(&ua, &bc)?)
        })();
        rep.record("associativity", ok.unwrap_or(false));
        let ok = (|| -> Result<bool, BurnsideError> {
            let left = signed_compose(&signed_compose(&a, &bs)?, &cs)?;
            let bc = bs.iter().zip(&groups).map(|(b, g)| signed_compose(b, g)).collect::<Result<Vec<_>, _>>()?;
            Ok(left == signed_compose(&a, &bc)?)
        })();
        rep.record("signed associativity", ok.unwrap_or(false));
        // unitality
        let ids: Vec<Correspondence> = ua.sources.iter().map(|&s| identity_correspondence(s)).collect();
        let ok = compose(&identity_correspondence(ua.target), &[ua.clone()]).ok() == Some(ua.clone())
            && compose(&ua, &ids).ok() == Some(ua.clone());
        rep.record("unitality", ok);
        let sids: Vec<SignedCorrespondence> = ids.into_iter().map(SignedCorrespondence::plus).collect();
        let sid = SignedCorrespondence::plus(identity_correspondence(ua.target));
        let ok = signed_compose(&sid, &[a.clone()]).ok() == Some(a.clone()) && signed_compose(&a, &sids).ok() == Some(a.clone());
        rep.record("signed unitality", ok);
        // linearization against the Kronecker product of the inner matrices
        let ok = (|| -> Result<bool, BurnsideError> {
            let mut inner = Matrix::<i64>::identity(1);
            let mut sinner = Matrix::<i64>::identity(1);
            for b in &bs {
                inner = kron(&inner, &linearize(&b.corr));
                sinner = kron(&sinner, &linearize_signed(b));
            }
            let c = signed_compose(&a, &bs)?;
            let plain = linearize::<i64>(&c.corr) == linearize(&ua).mul(&inner);
            let signed = linearize_signed::<i64>(&c) == linearize_signed(&a).mul(&sinner);
            rep.record("signed linearize functoriality", signed);
            Ok(plain)
        })();
        rep.record("linearize functoriality", ok.unwrap_or(false));
    }
    rep.pass = rep.laws.values().all(|&(_, f)| f == 0);
    rep
}
