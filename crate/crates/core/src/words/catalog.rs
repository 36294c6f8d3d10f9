use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigRational, Zero};
use rayon::prelude::*;

use super::word::{word_degree, Degree, Word};
use crate::error::{Error, Result};
use crate::symalg::{determinant, lie_bracket, EchelonBasis, FloatPoly, PolyVectorField, Polynomial};

/// Truncation of the (infinite) word set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogCaps {
    /// Longest word kept in the catalog.
    pub max_word_len: usize,
    /// Upper bound on every component of a tuple degree (and hence of a word
    /// degree). `None` means no per-letter cap beyond the word length.
    pub per_letter: Option<u32>,
    /// Abort tuple enumeration above this many candidate tuples.
    pub max_tuples: usize,
}

impl Default for CatalogCaps {
    fn default() -> Self {
        CatalogCaps { max_word_len: 3, per_letter: None, max_tuples: 50_000 }
    }
}

impl CatalogCaps {
    pub fn with_word_len(max_word_len: usize) -> Self {
        CatalogCaps { max_word_len, ..Default::default() }
    }

    fn admits(&self, d: &Degree) -> bool {
        match self.per_letter {
            Some(c) => d.counts().iter().all(|&e| e <= c),
            None => true,
        }
    }
}

/// Per-letter cap `⌈d/ε⌉` for a spanning tuple of total degree `d`.
pub fn letter_cap(total_degree: u32, eps: &BigRational) -> Result<u32> {
    if eps <= &BigRational::zero() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let q = BigRational::from_integer(total_degree.into()) / eps;
    let c = q.ceil().to_integer();
    u32::try_from(c).map_err(|_| Error::Precondition("letter cap overflows".into()))
}

/// The generator fields together with every word field `X_w` within the caps.
#[derive(Clone, Debug)]
pub struct Catalog {
    n: usize,
    k: usize,
    generators: Vec<PolyVectorField>,
    caps: CatalogCaps,
    words: Vec<Word>,
    fields: BTreeMap<Word, PolyVectorField>,
}

/// Outcome of a Hörmander span check at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HormanderReport {
    pub spans: bool,
    pub rank: usize,
    pub dimension: usize,
    /// Independent words found greedily in catalog order; `n` of them when
    /// `spans` holds.
    pub witness: Vec<Word>,
    pub max_word_len: usize,
}

/// An `n`-tuple of words with its degree and determinant `λ_I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordTuple {
    pub words: Vec<Word>,
    pub degree: Degree,
    pub lambda: Polynomial,
    /// `λ_I(point) ≠ 0` at the enumeration point.
    pub nonvanishing: bool,
}

impl WordTuple {
    fn order_key(&self) -> (usize, Vec<usize>, Vec<usize>) {
        let concat: Vec<usize> = self.words.iter().flat_map(|w| w.letters().iter().copied()).collect();
        (concat.len(), concat, self.words.iter().map(Word::len).collect())
    }

    pub fn label(&self) -> String {
        let ws: Vec<String> = self.words.iter().map(|w| w.to_string()).collect();
        format!("({})", ws.join(","))
    }
}

/// Graded-lex order on concatenated words, ties broken by word lengths.
pub fn tuple_order(a: &WordTuple, b: &WordTuple) -> Ordering {
    a.order_key().cmp(&b.order_key())
}

fn binomial(m: usize, r: usize) -> u128 {
    if r > m {
        return 0;
    }
    let r = r.min(m - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let mut i = r;
        while i > 0 && idx[i - 1] == i - 1 + m - r {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl Catalog {
    pub fn new(generators: Vec<PolyVectorField>, caps: CatalogCaps) -> Result<Self> {
        let k = generators.len();
        let n = generators.first().map(PolyVectorField::dim).ok_or(Error::EmptyCatalog)?;
        if let Some(bad) = generators.iter().find(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.dim() });
        }
        if caps.max_word_len == 0 {
            return Err(Error::Precondition("word-length cap must be at least 1".into()));
        }
        let mut fields = BTreeMap::new();
        let mut words = Vec::new();
        let mut frontier: Vec<Word> = Vec::new();
        for j in 1..=k {
            let w = Word::letter(j);
            if caps.admits(&word_degree(&w, k)?) {
                fields.insert(w.clone(), generators[j - 1].clone());
                frontier.push(w);
            }
        }
        words.extend(frontier.iter().cloned());
        for _len in 2..=caps.max_word_len {
            let mut next = Vec::new();
            for w in &frontier {
                let base = fields[w].clone();
                for j in 1..=k {
                    let ext = w.appended(j);
                    if !caps.admits(&word_degree(&ext, k)?) {
                        continue;
                    }
                    // a zero field stays zero under further brackets, but it is
                    // still recorded so every in-cap word resolves
                    let f = if base.is_zero() {
                        PolyVectorField::zero(n)
                    } else {
                        lie_bracket(&base, &generators[j - 1])?
                    };
                    fields.insert(ext.clone(), f);
                    next.push(ext);
                }
            }
            next.sort();
            words.extend(next.iter().cloned());
            frontier = next;
        }
        Ok(Catalog { n, k, generators, caps, words, fields })
    }

    /// Builds a catalog capped at `max_word_len`, finds a spanning tuple `I₀`
    /// at `point`, and applies the per-letter cap `⌈deg(I₀)/ε⌉`.
    pub fn truncated(
        generators: Vec<PolyVectorField>,
        max_word_len: usize,
        eps: &BigRational,
        point: &[BigRational],
    ) -> Result<Self> {
        let base = Catalog::new(generators, CatalogCaps::with_word_len(max_word_len))?;
        let report = base.hormander_check(point)?;
        if !report.spans {
            return Ok(base);
        }
        let d: u32 = report
            .witness
            .iter()
            .map(|w| word_degree(w, base.k).map(|d| d.total()))
            .sum::<Result<u32>>()?;
        let cap = letter_cap(d, eps)?;
        let caps = CatalogCaps { per_letter: Some(cap), ..base.caps.clone() };
        Catalog::new(base.generators, caps)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn caps(&self) -> &CatalogCaps {
        &self.caps
    }

    pub fn generators(&self) -> &[PolyVectorField] {
        &self.generators
    }

    /// All catalog words in graded-lex order.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Words whose field is not identically zero.
    pub fn nonzero_words(&self) -> Vec<&Word> {
        self.words.iter().filter(|w| !self.fields[*w].is_zero()).collect()
    }

    /// `X_w`, looked up from the memoised recursion.
    pub fn word_field(&self, w: &Word) -> Result<&PolyVectorField> {
        for &l in w.letters() {
            if l == 0 || l > self.k {
                return Err(Error::LetterOutOfRange { letter: l, k: self.k });
            }
        }
        self.fields.get(w).ok_or_else(|| Error::CapExceeded { word: w.to_string() })
    }

    /// Exact rank test of `{X_w(point)}` over the catalog.
    pub fn hormander_check(&self, point: &[BigRational]) -> Result<HormanderReport> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: point.len() });
        }
        let mut basis = EchelonBasis::default();
        let mut witness = Vec::new();
        for w in &self.words {
            let f = &self.fields[w];
            if f.is_zero() {
                continue;
            }
            let v = f.evaluate(point)?;
            if basis.insert(&v) {
                witness.push(w.clone());
                if basis.rank() == self.n {
                    break;
                }
            }
        }
        Ok(HormanderReport {
            spans: basis.rank() == self.n,
            rank: basis.rank(),
            dimension: self.n,
            witness,
            max_word_len: self.caps.max_word_len,
        })
    }

    /// Number of candidate tuples (sorted `n`-subsets of nonzero words).
    pub fn tuple_count_estimate(&self) -> u128 {
        binomial(self.nonzero_words().len(), self.n)
    }

    /// Every sorted `n`-tuple of distinct nonzero catalog words whose degree
    /// respects the per-letter cap, with exact `λ_I` and its nonvanishing
    /// flag at `point`. Tuples with a repeated word (λ ≡ 0) and tuples that
    /// differ only by order are skipped.
    pub fn enumerate_tuples(&self, point: &[BigRational]) -> Result<Vec<WordTuple>> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: point.len() });
        }
        let estimate = self.tuple_count_estimate();
        if estimate > self.caps.max_tuples as u128 {
            return Err(Error::TooManyTuples { estimate, limit: self.caps.max_tuples });
        }
        let words = self.nonzero_words();
        let degrees: Vec<Degree> = words.iter().map(|w| word_degree(w, self.k)).collect::<Result<_>>()?;
        let combos = combinations(words.len(), self.n);
        let mut tuples: Vec<WordTuple> = combos
            .par_iter()
            .filter_map(|idx| {
                let degree = idx.iter().fold(Degree::zero(self.k), |acc, &i| acc.plus(&degrees[i]));
                if !self.caps.admits(&degree) {
                    return None;
                }
                let cols: Vec<PolyVectorField> = idx.iter().map(|&i| self.fields[words[i]].clone()).collect();
                Some(determinant(&cols).and_then(|lambda| {
                    let nonvanishing = !lambda.evaluate(point)?.is_zero();
                    Ok(WordTuple {
                        words: idx.iter().map(|&i| words[i].clone()).collect(),
                        degree,
                        lambda,
                        nonvanishing,
                    })
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        tuples.sort_by(tuple_order);
        Ok(tuples)
    }
}

/// Floating copies of the `λ_I` for repeated evaluation of `Λ`.
#[derive(Clone, Debug)]
pub struct CompiledTuples {
    degrees: Vec<Degree>,
    lambdas: Vec<FloatPoly>,
}

impl CompiledTuples {
    pub fn new(tuples: &[WordTuple]) -> Self {
        CompiledTuples {
            degrees: tuples.iter().map(|t| t.degree.clone()).collect(),
            lambdas: tuples.iter().map(|t| t.lambda.compile()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Entries `(scale)^{deg I} λ_I(x)`.
    pub fn entries(&self, x: &[f64], scale: &[f64]) -> Vec<f64> {
        self.degrees
            .iter()
            .zip(&self.lambdas)
            .map(|(d, l)| d.monomial(scale) * l.eval(x))
            .collect()
    }

    /// Sup-norm of the entries.
    pub fn norm(&self, x: &[f64], scale: &[f64]) -> f64 {
        self.entries(x, scale).into_iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `Λ_{Kδ}(x₀) = ((Kδ)^{deg I} λ_I(x₀))_I` with its sup-norm and the selected
/// maximising tuple `I_{x₀}`.
#[derive(Clone, Debug)]
pub struct LambdaVector {
    pub x0: Vec<f64>,
    pub delta: Vec<f64>,
    pub k_scale: f64,
    /// `(tuple, value)` in tuple order.
    pub entries: Vec<(WordTuple, f64)>,
    pub norm: f64,
    /// Index into `entries` of `I_{x₀}`; the first (graded-lex smallest) maximiser.
    pub argmax: usize,
}

impl LambdaVector {
    pub fn compute(tuples: &[WordTuple], x0: &[f64], delta: &[f64], k_scale: f64) -> Result<Self> {
        if tuples.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        if delta.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::Precondition("radii must be positive".into()));
        }
        if !(k_scale >= 1.0) {
            return Err(Error::Precondition("K must be at least 1".into()));
        }
        let k = tuples[0].degree.counts().len();
        if delta.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: delta.len() });
        }
        let n = tuples[0].lambda.nvars();
        if x0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x0.len() });
        }
        let scale: Vec<f64> = delta.iter().map(|d| d * k_scale).collect();
        let compiled = CompiledTuples::new(tuples);
        let values = compiled.entries(x0, &scale);
        let mut argmax = 0;
        let mut norm = f64::NEG_INFINITY;
        for (i, v) in values.iter().enumerate() {
            if v.abs() > norm {
                norm = v.abs();
                argmax = i;
            }
        }
        Ok(LambdaVector {
            x0: x0.to_vec(),
            delta: delta.to_vec(),
            k_scale,
            entries: tuples.iter().cloned().zip(values).collect(),
            norm,
            argmax,
        })
    }

    pub fn selected(&self) -> &WordTuple {
        &self.entries[self.argmax].0
    }
}
