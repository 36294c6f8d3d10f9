use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, Zero};

use crate::error::{Error, Result};
use crate::symalg::{lie_bracket, PolyVectorField};

/// A bracket word `w ∈ {1,…,k}^d`, letters stored 1-based.
///
/// `X_(j) = X_j` and `X_(w,j) = [X_w, X_j]`, so a word encodes the
/// right-appended (left-nested) bracket `[[[X_{w1}, X_{w2}], X_{w3}], …]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>, k: usize) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l > k) {
            return Err(Error::LetterOutOfRange { letter: bad, k });
        }
        Ok(Word(letters))
    }

    pub fn letter(j: usize) -> Self {
        Word(vec![j])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn appended(&self, j: usize) -> Word {
        let mut v = self.0.clone();
        v.push(j);
        Word(v)
    }

    /// Drops the last letter; `None` for single letters.
    pub fn split_last(&self) -> Option<(Word, usize)> {
        if self.0.len() < 2 {
            return None;
        }
        let (last, init) = self.0.split_last().unwrap();
        Some((Word(init.to_vec()), *last))
    }

    pub fn degree(&self, k: usize) -> Result<Degree> {
        word_degree(self, k)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded-lex: shorter words first, then lexicographic.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Letter multiplicities of a word or word tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree(Vec<u32>);

impl Degree {
    pub fn zero(k: usize) -> Self {
        Degree(vec![0; k])
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        Degree(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn plus(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `Π_j base_j^{deg_j}`.
    pub fn monomial(&self, base: &[f64]) -> f64 {
        self.0.iter().zip(base).map(|(&e, b)| b.powi(e as i32)).product()
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub fn word_degree(w: &Word, k: usize) -> Result<Degree> {
    let mut counts = vec![0u32; k];
    for &l in w.letters() {
        if l == 0 || l > k {
            return Err(Error::LetterOutOfRange { letter: l, k });
        }
        counts[l - 1] += 1;
    }
    Ok(Degree(counts))
}

/// Computes `X_w` directly from the recursion, without memoisation.
pub fn word_field_uncached(generators: &[PolyVectorField], w: &Word) -> Result<PolyVectorField> {
    let k = generators.len();
    let first = w.letters()[0];
    if first == 0 || first > k {
        return Err(Error::LetterOutOfRange { letter: first, k });
    }
    let mut acc = generators[first - 1].clone();
    for &l in &w.letters()[1..] {
        if l == 0 || l > k {
            return Err(Error::LetterOutOfRange { letter: l, k });
        }
        acc = lie_bracket(&acc, &generators[l - 1])?;
    }
    Ok(acc)
}

/// A binary bracket tree over generator indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BracketTree {
    Leaf(usize),
    Bracket(Box<BracketTree>, Box<BracketTree>),
}

impl BracketTree {
    pub fn leaf(j: usize) -> Self {
        BracketTree::Leaf(j)
    }

    pub fn bracket(a: BracketTree, b: BracketTree) -> Self {
        BracketTree::Bracket(Box::new(a), Box::new(b))
    }

    pub fn max_leaf(&self) -> usize {
        match self {
            BracketTree::Leaf(j) => *j,
            BracketTree::Bracket(a, b) => a.max_leaf().max(b.max_leaf()),
        }
    }

    /// The bracket evaluated symbolically on the given generators.
    pub fn evaluate(&self, generators: &[PolyVectorField]) -> Result<PolyVectorField> {
        match self {
            BracketTree::Leaf(j) => generators
                .get(j.wrapping_sub(1))
                .cloned()
                .ok_or(Error::LetterOutOfRange { letter: *j, k: generators.len() }),
            BracketTree::Bracket(a, b) => lie_bracket(&a.evaluate(generators)?, &b.evaluate(generators)?),
        }
    }
}

impl fmt::Display for BracketTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketTree::Leaf(j) => write!(f, "X{j}"),
            BracketTree::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// Integer combination of words, kept sorted by word with no zero entries.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WordCombination {
    terms: BTreeMap<Word, BigInt>,
}

impl WordCombination {
    pub fn single(w: Word) -> Self {
        let mut c = WordCombination::default();
        c.add(w, BigInt::from(1));
        c
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Word)>) -> Self {
        let mut c = WordCombination::default();
        for (coef, w) in terms {
            c.add(w, BigInt::from(coef));
        }
        c
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &Word)> {
        self.terms.iter().map(|(w, c)| (c, w))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&mut self, w: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    fn add_scaled(&mut self, other: &WordCombination, factor: &BigInt) {
        for (w, c) in &other.terms {
            self.add(w.clone(), c * factor);
        }
    }

    fn appended(&self, j: usize) -> WordCombination {
        WordCombination { terms: self.terms.iter().map(|(w, c)| (w.appended(j), c.clone())).collect() }
    }

    /// `Σ c · X_w` evaluated on the given generators.
    pub fn evaluate(&self, generators: &[PolyVectorField]) -> Result<PolyVectorField> {
        let n = generators.first().map(PolyVectorField::dim).ok_or(Error::EmptyCatalog)?;
        let mut acc = PolyVectorField::zero(n);
        for (w, c) in &self.terms {
            let f = word_field_uncached(generators, w)?;
            acc = acc.try_add(&f.scale(&BigRational::from_integer(c.clone())))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for WordCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let neg = c < &BigInt::zero();
            let mag = if neg { -c } else { c.clone() };
            let sign = match (i, neg) {
                (0, true) => "-".to_string(),
                (0, false) => String::new(),
                (_, true) => " - ".to_string(),
                (_, false) => " + ".to_string(),
            };
            if mag == BigInt::from(1) {
                write!(f, "{sign}X{w}")?;
            } else {
                write!(f, "{sign}{mag}*X{w}")?;
            }
        }
        Ok(())
    }
}

/// `[X_u, X_v]` as a word combination: Jacobi peels the last letter of `v`,
/// `[A, [B, X_j]] = [[A, B], X_j] − [[A, X_j], B]`.
fn bracket_words(u: &Word, v: &Word) -> WordCombination {
    match v.split_last() {
        None => WordCombination::single(u.appended(v.letters()[0])),
        Some((head, j)) => {
            let mut out = bracket_words(u, &head).appended(j);
            let neg = bracket_words(&u.appended(j), &head);
            out.add_scaled(&neg, &BigInt::from(-1));
            out
        }
    }
}

/// Rewrites an arbitrary bracket tree as an integer combination of words.
pub fn expand_bracket(t: &BracketTree) -> WordCombination {
    match t {
        BracketTree::Leaf(j) => WordCombination::single(Word(vec![*j])),
        BracketTree::Bracket(a, b) => {
            let ea = expand_bracket(a);
            let eb = expand_bracket(b);
            let mut out = WordCombination::default();
            for (u, cu) in &ea.terms {
                for (v, cv) in &eb.terms {
                    out.add_scaled(&bracket_words(u, v), &(cu * cv));
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symalg::parse_polynomial;

    fn w(l: &[usize]) -> Word {
        Word(l.to_vec())
    }

    #[test]
    fn degrees() {
        assert_eq!(word_degree(&w(&[1, 2, 1]), 2).unwrap().counts(), &[2, 1]);
        assert_eq!(word_degree(&w(&[3]), 3).unwrap().counts(), &[0, 0, 1]);
        assert_eq!(
            word_degree(&w(&[1, 2, 3, 4]), 4).unwrap(),
            word_degree(&w(&[4, 3, 2, 1]), 4).unwrap()
        );
        assert!(matches!(word_degree(&w(&[1, 3]), 2), Err(Error::LetterOutOfRange { letter: 3, k: 2 })));
    }

    #[test]
    fn word_validation() {
        assert!(Word::new(vec![], 2).is_err());
        assert!(Word::new(vec![0], 2).is_err());
        assert!(Word::new(vec![1, 2], 2).is_ok());
    }

    #[test]
    fn word_order_is_graded_lex() {
        let mut v = vec![w(&[2, 1]), w(&[2]), w(&[1, 1, 1]), w(&[1, 2]), w(&[1])];
        v.sort();
        assert_eq!(v, vec![w(&[1]), w(&[2]), w(&[1, 2]), w(&[2, 1]), w(&[1, 1, 1])]);
    }

    #[test]
    fn four_letter_identity() {
        let t = BracketTree::bracket(
            BracketTree::bracket(BracketTree::leaf(1), BracketTree::leaf(2)),
            BracketTree::bracket(BracketTree::leaf(3), BracketTree::leaf(4)),
        );
        let expected = WordCombination::from_terms([(-1, w(&[1, 2, 4, 3])), (1, w(&[1, 2, 3, 4]))]);
        assert_eq!(expand_bracket(&t), expected);
        assert_eq!(expand_bracket(&t).to_string(), "X(1,2,3,4) - X(1,2,4,3)");
    }

    #[test]
    fn base_cases() {
        assert_eq!(expand_bracket(&BracketTree::leaf(3)), WordCombination::single(w(&[3])));
        let t = BracketTree::bracket(
            BracketTree::bracket(BracketTree::leaf(2), BracketTree::leaf(1)),
            BracketTree::leaf(2),
        );
        assert_eq!(expand_bracket(&t), WordCombination::single(w(&[2, 1, 2])));
    }

    #[test]
    fn recursion_examples_on_tao_wright_pair() {
        let n = 2;
        let f = |c: [&str; 2]| {
            PolyVectorField::new(c.iter().map(|s| parse_polynomial(s, n).unwrap()).collect()).unwrap()
        };
        let gens = vec![f(["1", "0"]), f(["1", "x1"])];
        assert_eq!(word_field_uncached(&gens, &w(&[1, 2])).unwrap(), f(["0", "1"]));
        assert!(word_field_uncached(&gens, &w(&[1, 2, 2])).unwrap().is_zero());
    }
}
