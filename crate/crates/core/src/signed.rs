//! Signed lift for weight sequences over {0, 1, 2}.
//!
//! A web basis element is reduced to its underlying matching on the
//! 1-labelled points. Signs are not derived here: each nonempty entry of a
//! basic correspondence takes the single sign handed out by a [`SignOracle`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::burnside::{linearize, linearize_signed, signed_compose, BurnsideError, Key, Sign, SignedCorrespondence};
use crate::linalg::Matrix;
use crate::phi::{
    phi_basic, phi_to_basic, verify_multifunctor, MultifunctorReport, PhiContext, PhiError, VerifyBounds,
};
use crate::planar::{circles, enumerate_matchings, Matching};
use crate::shapes::{arc_morphism, enumerate_trees, ShapeMultimorphism, ShapeObject, Tree};
use crate::tqft::index_dots;

#[derive(Debug, Error)]
pub enum SignedError {
    #[error("weight entries must lie in {{0, 1, 2}}: {0:?}")]
    BadWeight(Vec<u8>),
    #[error("unbalanced weight {0}")]
    Unbalanced(String),
    #[error("no sign for entry {0}")]
    MissingSign(String),
    #[error("sign table value {1} at {0} is not +1 or -1")]
    BadSign(String, i64),
    #[error("object {0} is not a pair of web basis elements")]
    NotWeb(String),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Burnside(#[from] BurnsideError),
    #[error("sign table: {0}")]
    Io(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeightSeq(pub Vec<u8>);

impl WeightSeq {
    pub fn new(k: Vec<u8>) -> Result<Self, SignedError> {
        if k.iter().any(|&x| x > 2) {
            return Err(SignedError::BadWeight(k));
        }
        Ok(WeightSeq(k))
    }

    /// Parses `1,1,0,2` or `1102`.
    pub fn parse(s: &str) -> Result<Self, SignedError> {
        let bad = || SignedError::BadWeight(s.bytes().collect());
        let digits: Vec<u8> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse::<u8>().map_err(|_| bad())).collect::<Result<_, _>>()?
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad)).collect::<Result<_, _>>()?
        };
        WeightSeq::new(digits)
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&x| x == 1).count()
    }

    pub fn is_balanced(&self) -> bool {
        self.ones() % 2 == 0
    }

    pub fn p(&self) -> usize {
        self.ones() / 2
    }

    pub fn m(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum::<usize>() / 2
    }

    fn balanced_p(&self) -> Result<usize, SignedError> {
        if !self.is_balanced() {
            return Err(SignedError::Unbalanced(self.to_string()));
        }
        Ok(self.p())
    }
}

impl std::fmt::Display for WeightSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WebBasisElement {
    pub weight: WeightSeq,
    pub matching: Matching,
}

/// One web per crossingless matching of the 1-labelled points, in matching
/// order.
pub fn web_basis(k: &WeightSeq) -> Result<Vec<WebBasisElement>, SignedError> {
    let p = k.balanced_p()?;
    Ok(enumerate_matchings(p).into_iter().map(|matching| WebBasisElement { weight: k.clone(), matching }).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SignOracle {
    Trivial,
    /// `"weight|columns|row" -> ±1`, see [`entry_name`].
    Table(BTreeMap<String, i64>),
}

impl SignOracle {
    pub fn load(path: &Path) -> Result<Self, SignedError> {
        let text = std::fs::read_to_string(path).map_err(|e| SignedError::Io(e.to_string()))?;
        let table: BTreeMap<String, i64> = serde_json::from_str(&text).map_err(|e| SignedError::Io(e.to_string()))?;
        Ok(SignOracle::Table(table))
    }

    pub fn sign(&self, name: &str) -> Result<Sign, SignedError> {
        match self {
            SignOracle::Trivial => Ok(1),
            SignOracle::Table(t) => match t.get(name) {
                Some(1) => Ok(1),
                Some(-1) => Ok(-1),
                Some(&v) => Err(SignedError::BadSign(name.into(), v)),
                None => Err(SignedError::MissingSign(name.into())),
            },
        }
    }
}

fn web_index(basis: &[Matching], m: &Matching, obj: &ShapeObject) -> Result<usize, SignedError> {
    basis.iter().position(|x| x == m).ok_or_else(|| SignedError::NotWeb(format!("{obj:?}")))
}

/// `i-j:bits`, with `x` for a dotted circle.
fn element_name(basis: &[Matching], obj: &ShapeObject, x: usize) -> Result<String, SignedError> {
    let ShapeObject::PairM { a, b } = obj else {
        return Err(SignedError::NotWeb(format!("{obj:?}")));
    };
    let k = circles(a, b).len();
    let bits: String = index_dots(x, k).into_iter().map(|d| if d { 'x' } else { '1' }).collect();
    Ok(format!("{}-{}:{}", web_index(basis, a, obj)?, web_index(basis, b, obj)?, bits))
}

/// Canonical `weight|columns|row` name of an entry.
pub fn entry_name(k: &WeightSeq, mor: &ShapeMultimorphism, key: &Key) -> Result<String, SignedError> {
    let basis = enumerate_matchings(k.balanced_p()?);
    let cols = mor
        .sources
        .iter()
        .zip(&key.1)
        .map(|(o, &x)| element_name(&basis, o, x))
        .collect::<Result<Vec<_>, _>>()?
        .join(",");
    Ok(format!("{k}|{cols}|{}", element_name(&basis, &mor.target, key.0)?))
}

fn is_identity(mor: &ShapeMultimorphism) -> bool {
    mor.sources.len() == 1 && mor.sources[0] == mor.target
}

/// The basic correspondence with each nonempty entry signed by the oracle.
/// Identity morphisms stay all plus.
pub fn phi_signed_basic(
    k: &WeightSeq,
    mor: &ShapeMultimorphism,
    oracle: &SignOracle,
) -> Result<SignedCorrespondence, SignedError> {
    k.balanced_p()?;
    let corr = phi_basic(&PhiContext::arcs(), mor)?;
    let mut out = SignedCorrespondence::plus(corr);
    if is_identity(mor) {
        return Ok(out);
    }
    for (key, toks) in out.signs.iter_mut() {
        let s = oracle.sign(&entry_name(k, mor, key)?)?;
        toks.values_mut().for_each(|v| *v = s);
    }
    Ok(out)
}

/// Composite of a tree of basic signed correspondences.
pub fn phi_signed_tree(k: &WeightSeq, t: &Tree, oracle: &SignOracle) -> Result<SignedCorrespondence, SignedError> {
    match t {
        Tree::Leaf(o) => Ok(phi_signed_basic(k, &ShapeMultimorphism::identity(o), oracle)?),
        Tree::Node { mor, children } => {
            let inner = children.iter().map(|c| phi_signed_tree(k, c, oracle)).collect::<Result<Vec<_>, _>>()?;
            Ok(signed_compose(&phi_signed_basic(k, mor, oracle)?, &inner)?)
        }
    }
}

/// Every entry name an oracle must cover for morphisms with at most
/// `max_inputs` sources.
pub fn required_entries(k: &WeightSeq, bounds: &VerifyBounds) -> Result<Vec<String>, SignedError> {
    fn walk(t: &Tree, seen: &mut BTreeMap<String, ShapeMultimorphism>) {
        if let Tree::Node { mor, children } = t {
            seen.entry(serde_json::to_string(mor).unwrap()).or_insert_with(|| mor.clone());
            children.iter().for_each(|c| walk(c, seen));
        }
    }
    let p = k.balanced_p()?;
    let mut mors: BTreeMap<String, ShapeMultimorphism> = BTreeMap::new();
    for n_in in 0..=bounds.max_inputs.max(2) {
        for mor in crate::shapes::enumerate_arc_morphisms(p, n_in) {
            if n_in <= bounds.max_inputs {
                for t in enumerate_trees(&mor, bounds.max_vertices) {
                    walk(&t, &mut mors);
                }
            }
            mors.entry(serde_json::to_string(&mor).unwrap()).or_insert(mor);
        }
    }
    let mut out = std::collections::BTreeSet::new();
    for mor in mors.values() {
        if is_identity(mor) {
            continue;
        }
        for key in phi_basic(&PhiContext::arcs(), mor)?.entries.keys() {
            out.insert(entry_name(k, mor, key)?);
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedReport {
    /// the unsigned sweep on the underlying matchings
    pub unsigned: MultifunctorReport,
    pub signed: MultifunctorReport,
    pub pass: bool,
}

/// Signed multiplication `H(a,b) x H(b,c) -> H(a,c)` as a matrix.
fn signed_product(k: &WeightSeq, a: &Matching, b: &Matching, c: &Matching, oracle: &SignOracle) -> Result<Matrix<i64>, SignedError> {
    Ok(linearize_signed(&phi_signed_basic(k, &arc_morphism(&[a.clone(), b.clone(), c.clone()]), oracle)?))
}

fn column(m: &Matrix<i64>, j: usize) -> Vec<i64> {
    (0..m.rows()).map(|i| m.get(i, j)).collect()
}

/// Associativity of the oracle-signed algebra over every basis triple;
/// returns the first failing triple by name.
fn check_associativity(k: &WeightSeq, oracle: &SignOracle, rep: &mut MultifunctorReport) -> Result<(), SignedError> {
    let basis = enumerate_matchings(k.balanced_p()?);
    let dim = |a: &Matching, b: &Matching| 1usize << circles(a, b).len();
    let mut prod: BTreeMap<(usize, usize, usize), Matrix<i64>> = BTreeMap::new();
    let n = basis.len();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                prod.insert((i, j, l), signed_product(k, &basis[i], &basis[j], &basis[l], oracle)?);
            }
        }
    }
    let name = |i: usize, j: usize, x: usize| {
        element_name(&basis, &ShapeObject::PairM { a: basis[i].clone(), b: basis[j].clone() }, x).unwrap()
    };
    for (a, b, c, d) in (0..n).flat_map(|a| (0..n).flat_map(move |b| (0..n).flat_map(move |c| (0..n).map(move |d| (a, b, c, d))))) {
        let (dab, dbc, dcd, dac, dbd) =
            (dim(&basis[a], &basis[b]), dim(&basis[b], &basis[c]), dim(&basis[c], &basis[d]), dim(&basis[a], &basis[c]), dim(&basis[b], &basis[d]));
        let (m_abc, m_acd, m_bcd, m_abd) = (&prod[&(a, b, c)], &prod[&(a, c, d)], &prod[&(b, c, d)], &prod[&(a, b, d)]);
        for x in 0..dab {
            for y in 0..dbc {
                let xy = column(m_abc, x * dbc + y);
                for z in 0..dcd {
                    // (xy)z and x(yz) in H(a,d)
                    let mut left = vec![0i64; m_acd.rows()];
                    for (u, &cu) in xy.iter().enumerate().filter(|(_, c)| **c != 0) {
                        for (r, v) in column(m_acd, u * dcd + z).into_iter().enumerate() {
                            left[r] += cu * v;
                        }
                    }
                    let yz = column(m_bcd, y * dcd + z);
                    let mut right = vec![0i64; m_abd.rows()];
                    for (u, &cu) in yz.iter().enumerate().filter(|(_, c)| **c != 0) {
                        for (r, v) in column(m_abd, x * dbd + u).into_iter().enumerate() {
                            right[r] += cu * v;
                        }
                    }
                    let ok = left == right;
                    let _ = dac;
                    rep.record_str(
                        "associativity",
                        || format!("triple ({}, {}, {})", name(a, b, x), name(b, c, y), name(c, d, z)),
                        Ok(ok),
                    );
                }
            }
        }
    }
    Ok(())
}

/// Constant signs on composite entries, sign-preserving change-of-tree
/// bijections and associativity of the signed algebra, next to the unsigned
/// sweep on the underlying matchings.
pub fn verify_signed_multifunctor(k: &WeightSeq, oracle: &SignOracle, bounds: &VerifyBounds) -> Result<SignedReport, SignedError> {
    let p = k.balanced_p()?;
    let unsigned = verify_multifunctor(p, &VerifyBounds { tangles: false, ..bounds.clone() });
    let ctx = PhiContext::arcs();
    let mut rep = MultifunctorReport::default();
    for n_in in 0..=bounds.max_inputs {
        for mor in crate::shapes::enumerate_arc_morphisms(p, n_in) {
            let basic = phi_signed_basic(k, &mor, oracle);
            for t in enumerate_trees(&mor, bounds.max_vertices) {
                let composite = phi_signed_tree(k, &t, oracle);
                let r = composite.as_ref().map_err(|e| e.to_string()).map(|c| c.corr.entries.keys().all(|key| c.entry_sign(key).is_some()));
                rep.record_str("sign-constant", || t.canonical(), r);
                let r = (|| -> Result<bool, String> {
                    let c = composite.as_ref().map_err(|e| e.to_string())?;
                    let b = basic.as_ref().map_err(|e| e.to_string())?;
                    let g = phi_to_basic(&ctx, &t).map_err(|e| e.to_string())?;
                    Ok(g.from == c.corr && g.preserves_signs(c, b).is_ok())
                })();
                rep.record_str("sign-preserving", || t.canonical(), r);
            }
        }
    }
    check_associativity(k, oracle, &mut rep)?;
    let signed = rep.finished();
    let pass = unsigned.pass && signed.pass;
    Ok(SignedReport { unsigned, signed, pass })
}

/// Signed structure constants equal the oracle sign times the unsigned ones.
pub fn linearizes_to_unsigned(k: &WeightSeq, mor: &ShapeMultimorphism, oracle: &SignOracle) -> Result<bool, SignedError> {
    let s = phi_signed_basic(k, mor, oracle)?;
    let u = linearize::<i64>(&s.corr);
    let l = linearize_signed::<i64>(&s);
    for (key, _) in &s.signs {
        let col = crate::burnside::column_index(&s.corr.sources, &key.1);
        let sign = s.entry_sign(key).unwrap_or(0) as i64;
        if l.get(key.0, col) != sign * u.get(key.0, col) {
            return Ok(false);
        }
    }
    Ok(true)
}
