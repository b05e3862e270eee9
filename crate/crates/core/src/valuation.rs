//! Min-plus evaluation shared by both constructions.
//!
//! A valuation is stored additively: `val = -log|·|`. Coefficients are
//! generic elements of the base field known only through their valuation,
//! so no cancellation between terms is modeled.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, Q};

/// Reserved symbol for the uniformizer; always weighs 1.
pub const PI_SYMBOL: &str = "pi";

/// An element of `ℚ ∪ {+∞}`; `+∞` is the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientVal {
    Finite(Q),
    Infinite,
}

impl CoefficientVal {
    pub fn finite(&self) -> Option<Q> {
        match self {
            CoefficientVal::Finite(q) => Some(*q),
            CoefficientVal::Infinite => None,
        }
    }

    pub fn parse(s: &str) -> Result<CoefficientVal> {
        match s.trim() {
            "inf" | "+inf" | "∞" => Ok(CoefficientVal::Infinite),
            other => parse_q(other).map(CoefficientVal::Finite),
        }
    }
}

impl Ord for CoefficientVal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CoefficientVal::Finite(a), CoefficientVal::Finite(b)) => a.cmp(b),
            (CoefficientVal::Finite(_), CoefficientVal::Infinite) => Ordering::Less,
            (CoefficientVal::Infinite, CoefficientVal::Finite(_)) => Ordering::Greater,
            (CoefficientVal::Infinite, CoefficientVal::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for CoefficientVal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CoefficientVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientVal::Finite(q) => f.write_str(&format_q(q)),
            CoefficientVal::Infinite => f.write_str("inf"),
        }
    }
}

/// A Laurent polynomial with generic coefficients of prescribed valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    alphabet: Vec<String>,
    terms: BTreeMap<Vec<i64>, Q>,
}

impl LaurentPoly {
    pub fn new(alphabet: Vec<String>) -> LaurentPoly {
        LaurentPoly { alphabet, terms: BTreeMap::new() }
    }

    pub fn constant(v: CoefficientVal) -> LaurentPoly {
        let mut p = LaurentPoly::new(Vec::new());
        p.add_term(Vec::new(), v).expect("empty exponent vector fits the empty alphabet");
        p
    }

    /// Adds `c · x^exps`. A zero coefficient is dropped; repeating an
    /// exponent vector is an error.
    pub fn add_term(&mut self, exps: Vec<i64>, coefficient: CoefficientVal) -> Result<()> {
        if exps.len() != self.alphabet.len() {
            return Err(Error::InvalidArgument(format!(
                "exponent vector of length {} for an alphabet of {}",
                exps.len(),
                self.alphabet.len()
            )));
        }
        let CoefficientVal::Finite(v) = coefficient else { return Ok(()) };
        if self.terms.contains_key(&exps) {
            return Err(Error::InvalidArgument(format!("exponent vector {exps:?} repeated")));
        }
        self.terms.insert(exps, v);
        Ok(())
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Formal product; coinciding exponents keep the smaller coefficient
    /// valuation (generic coefficients do not cancel).
    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        if self.alphabet != other.alphabet {
            return Err(Error::InvalidArgument("product of polynomials over different alphabets".into()));
        }
        let mut out = LaurentPoly::new(self.alphabet.clone());
        for (ea, va) in &self.terms {
            for (eb, vb) in &other.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let v = va + vb;
                out.terms.entry(e).and_modify(|w| *w = (*w).min(v)).or_insert(v);
            }
        }
        Ok(out)
    }

    /// Multiset union of terms, merging coinciding exponents as in [`mul`](Self::mul).
    pub fn union(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        if self.alphabet != other.alphabet {
            return Err(Error::InvalidArgument("union of polynomials over different alphabets".into()));
        }
        let mut out = self.clone();
        for (e, v) in &other.terms {
            out.terms.entry(e.clone()).and_modify(|w| *w = (*w).min(*v)).or_insert(*v);
        }
        Ok(out)
    }

    /// Reorders the alphabet by `perm` (new position `p` takes old symbol
    /// `perm[p]`), permuting exponent vectors to match.
    pub fn permute_alphabet(&self, perm: &[usize]) -> LaurentPoly {
        let alphabet = perm.iter().map(|&p| self.alphabet[p].clone()).collect();
        let terms = self
            .terms
            .iter()
            .map(|(e, v)| (perm.iter().map(|&p| e[p]).collect(), *v))
            .collect();
        LaurentPoly { alphabet, terms }
    }
}

/// Additive weights on a set of coordinate symbols, plus the uniformizer,
/// whose weight is pinned to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialValuation {
    alphabet: Vec<String>,
    weights: Vec<Q>,
    index: HashMap<String, usize>,
}

impl MonomialValuation {
    pub fn new(entries: impl IntoIterator<Item = (String, Q)>) -> Result<MonomialValuation> {
        let mut v = MonomialValuation { alphabet: Vec::new(), weights: Vec::new(), index: HashMap::new() };
        for (s, w) in entries {
            if s == PI_SYMBOL {
                return Err(Error::InvalidArgument(format!("{PI_SYMBOL} is reserved for the uniformizer")));
            }
            if v.index.insert(s.clone(), v.alphabet.len()).is_some() {
                return Err(Error::InvalidArgument(format!("symbol {s} repeated")));
            }
            v.alphabet.push(s);
            v.weights.push(w);
        }
        Ok(v)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn pi_weight(&self) -> Q {
        Q::one()
    }

    pub fn weight(&self, symbol: &str) -> Option<Q> {
        if symbol == PI_SYMBOL {
            return Some(self.pi_weight());
        }
        self.index.get(symbol).map(|&i| self.weights[i])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Q)> {
        self.alphabet.iter().map(String::as_str).zip(self.weights.iter().copied())
    }

    /// Weight of `x^exps` over the symbols `alphabet`.
    pub fn monomial_weight(&self, alphabet: &[String], exps: &[i64]) -> Result<Q> {
        let mut total = Q::zero();
        for (s, &e) in alphabet.iter().zip(exps) {
            let w = self
                .weight(s)
                .ok_or_else(|| Error::InvalidArgument(format!("symbol {s} is not in the valuation's alphabet")))?;
            total += w * Q::from_integer(e);
        }
        Ok(total)
    }

    /// `min` over terms of coefficient valuation plus monomial weight;
    /// `+∞` for the zero polynomial.
    pub fn evaluate(&self, f: &LaurentPoly) -> Result<CoefficientVal> {
        for s in f.alphabet() {
            if self.weight(s).is_none() {
                return Err(Error::InvalidArgument(format!("symbol {s} is not in the valuation's alphabet")));
            }
        }
        let mut best = CoefficientVal::Infinite;
        for (exps, v) in f.terms() {
            let val = CoefficientVal::Finite(v + self.monomial_weight(f.alphabet(), exps)?);
            best = best.min(val);
        }
        Ok(best)
    }
}

pub fn evaluate(v: &MonomialValuation, f: &LaurentPoly) -> Result<CoefficientVal> {
    v.evaluate(f)
}

pub fn monomial_weight(v: &MonomialValuation, alphabet: &[String], exps: &[i64]) -> Result<Q> {
    v.monomial_weight(alphabet, exps)
}

/// Checks every three-term Plücker relation `u_ij u_kl = u_ik u_jl - u_il u_jk`
/// against the weights, for every quadruple and every choice of the left
/// pair.
///
/// With the section weights `w(u_kl) = ½(d_kl - d_ij)` the consistent
/// reading is the max-attained-twice rule: the left sum is at most the
/// larger right sum, with equality whenever the right sums differ.
pub fn relation_consistency(v: &MonomialValuation, n: usize) -> Result<bool> {
    let w = |a: usize, b: usize| -> Result<Q> {
        let s = crate::tropical::plucker_symbol(a.min(b), a.max(b));
        v.weight(&s).ok_or_else(|| Error::InvalidArgument(format!("missing Plücker weight {s}")))
    };
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    let quad = [i, j, k, l];
                    for (a, b, c, d) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
                        let (p, q_, r, s) = (quad[a], quad[b], quad[c], quad[d]);
                        let left = w(p, q_)? + w(r, s)?;
                        let b1 = w(p, r)? + w(q_, s)?;
                        let b2 = w(p, s)? + w(q_, r)?;
                        let ok = if b1 != b2 { left == b1.max(b2) } else { left <= b1 };
                        if !ok {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Wire form: `{"alphabet": ["u","v"], "terms": [{"exps": [1,0], "vK": "3/2"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub alphabet: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<i64>,
    #[serde(rename = "vK")]
    pub v_k: String,
}

impl PolyJson {
    pub fn to_poly(&self) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::new(self.alphabet.clone());
        for t in &self.terms {
            p.add_term(t.exps.clone(), CoefficientVal::parse(&t.v_k)?)?;
        }
        Ok(p)
    }

    pub fn from_poly(p: &LaurentPoly) -> PolyJson {
        PolyJson {
            alphabet: p.alphabet().to_vec(),
            terms: p.terms().map(|(e, v)| TermJson { exps: e.clone(), v_k: format_q(v) }).collect(),
        }
    }

    pub fn parse(s: &str) -> Result<LaurentPoly> {
        serde_json::from_str::<PolyJson>(s)?.to_poly()
    }
}
