//! The Newton polytope `P = conv{deg I : λ_I(0) ≠ 0} + ℝ^k_{≥0}` and its exact
//! membership, interior and separation queries.

pub mod lp;

use std::fmt;

use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::words::{Catalog, WordTuple};
use lp::{maximize, Constraint, LpOutcome, Relation};

/// Where the generator set came from, for reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapRecord {
    pub max_word_len: usize,
    pub per_letter: Option<u32>,
}

/// Upward-closed convex hull of finitely many integer `k`-vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolytope {
    k: usize,
    generators: Vec<Vec<u32>>,
    minimal: Vec<Vec<u32>>,
    cap: Option<CapRecord>,
}

/// `a ∈ (0,∞)^k` with `a·b < 1 − margin` and `a·g > 1 + margin` on `P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingFunctional {
    pub a: Vec<BigRational>,
    pub margin: BigRational,
}

impl SeparatingFunctional {
    pub fn apply(&self, v: &[BigRational]) -> BigRational {
        self.a.iter().zip(v).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        use num::ToPrimitive;
        self.a.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

fn to_rat(g: &[u32]) -> Vec<BigRational> {
    g.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

/// Lower bounds tried in turn for the positive-entry constraint `a_i ≥ η`.
const ETA_LADDER: [(i64, i64); 4] = [(1, 1_000), (1, 1_000_000), (1, 1_000_000_000), (1, 1_000_000_000_000)];

impl NewtonPolytope {
    pub fn empty(k: usize) -> Self {
        NewtonPolytope { k, generators: Vec::new(), minimal: Vec::new(), cap: None }
    }

    pub fn from_generators(k: usize, generators: Vec<Vec<u32>>) -> Result<Self> {
        if let Some(bad) = generators.iter().find(|g| g.len() != k) {
            return Err(Error::ArityMismatch { expected: k, found: bad.len() });
        }
        let mut generators = generators;
        generators.sort();
        generators.dedup();
        let minimal = minimal_generators(k, &generators);
        Ok(NewtonPolytope { k, generators, minimal, cap: None })
    }

    /// Generators are the degrees of the tuples flagged nonvanishing.
    pub fn from_tuples(k: usize, tuples: &[WordTuple]) -> Result<Self> {
        let gens: Vec<Vec<u32>> = tuples.iter().filter(|t| t.nonvanishing).map(|t| t.degree.counts().to_vec()).collect();
        if gens.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        NewtonPolytope::from_generators(k, gens)
    }

    pub fn with_cap(mut self, cap: CapRecord) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    pub fn minimal_generators(&self) -> &[Vec<u32>] {
        &self.minimal
    }

    pub fn cap(&self) -> Option<&CapRecord> {
        self.cap.as_ref()
    }

    /// Minimal generators in lex order.
    pub fn vertices(&self) -> Result<Vec<Vec<u32>>> {
        if self.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        Ok(self.minimal.clone())
    }

    fn check_arity(&self, b: &[BigRational]) -> Result<()> {
        if b.len() != self.k {
            return Err(Error::ArityMismatch { expected: self.k, found: b.len() });
        }
        Ok(())
    }

    /// `b ∈ P`, by exact LP feasibility of `Σ μ_g g ≤ b`, `μ` convex.
    pub fn contains(&self, b: &[BigRational]) -> Result<bool> {
        self.check_arity(b)?;
        Ok(hull_contains(self.k, &self.minimal, b))
    }

    /// `t* = max{t : b − t𝟙 ∈ P}`; `None` for the empty polytope.
    pub fn interior_margin(&self, b: &[BigRational]) -> Result<Option<BigRational>> {
        self.check_arity(b)?;
        if self.minimal.is_empty() {
            return Ok(None);
        }
        let m = self.minimal.len();
        // variables: μ_1..μ_m, t⁺, t⁻
        let mut cons = Vec::with_capacity(self.k + 1);
        for i in 0..self.k {
            let mut row: Vec<BigRational> = self.minimal.iter().map(|g| BigRational::from_integer(g[i].into())).collect();
            row.push(BigRational::one());
            row.push(-BigRational::one());
            cons.push(Constraint::new(row, Relation::Le, b[i].clone()));
        }
        let mut sum = vec![BigRational::one(); m];
        sum.extend([BigRational::zero(), BigRational::zero()]);
        cons.push(Constraint::new(sum, Relation::Eq, BigRational::one()));
        let mut obj = vec![BigRational::zero(); m];
        obj.extend([BigRational::one(), -BigRational::one()]);
        match maximize(&obj, &cons) {
            LpOutcome::Optimal { value, .. } => Ok(Some(value)),
            other => Err(Error::Numerical(format!("interior LP ended as {other:?}"))),
        }
    }

    /// `b` lies in the interior of `P` (`t* > 0`).
    pub fn interior_contains(&self, b: &[BigRational]) -> Result<bool> {
        Ok(self.interior_margin(b)?.is_some_and(|t| t.is_positive()))
    }

    /// Finds `a > 0` with `a·b < 1 < a·g` for every generator `g`.
    pub fn separating_functional(&self, b: &[BigRational]) -> Result<SeparatingFunctional> {
        self.check_arity(b)?;
        if self.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        if self.contains(b)? {
            return Err(Error::NotSeparable);
        }
        for (num, den) in ETA_LADDER {
            let eta = BigRational::new(num.into(), den.into());
            if let Some(sep) = self.separate_with_floor(b, &eta) {
                if self.verify_separation(b, &sep) {
                    return Ok(sep);
                }
            }
        }
        Err(Error::NotSeparable)
    }

    /// Separation rows over the variables `(a, s)`: `a·b + e_b s ≤ 1`,
    /// `a·g − e_g s ≥ 1` for minimal `g`, and `a_i ≥ η`.
    fn separation_rows(&self, b: &[BigRational], eta: &BigRational, margin: Option<&BigRational>) -> Vec<Constraint> {
        let k = self.k;
        // with a fixed margin the s column is unused and the margin moves to the rhs
        let (sb, sg, rb, rg) = match margin {
            None => (BigRational::one(), -BigRational::one(), BigRational::one(), BigRational::one()),
            Some(m) => (BigRational::zero(), BigRational::zero(), BigRational::one() - m, BigRational::one() + m),
        };
        let mut cons = Vec::new();
        let mut row = b.to_vec();
        row.push(sb);
        cons.push(Constraint::new(row, Relation::Le, rb));
        for g in &self.minimal {
            let mut row = to_rat(g);
            row.push(sg.clone());
            cons.push(Constraint::new(row, Relation::Ge, rg.clone()));
        }
        for i in 0..k {
            let mut row = vec![BigRational::zero(); k + 1];
            row[i] = BigRational::one();
            cons.push(Constraint::new(row, Relation::Ge, eta.clone()));
        }
        cons
    }

    /// Two stages: the largest margin `ε*` of `a·b + ε ≤ 1`, `a·g − ε ≥ 1`,
    /// `a_i ≥ η`; then, holding margin `3ε*/4`, the `a` maximising `min_i a_i`
    /// (entries at most the largest stage-one entry) so no radius `δ₀^{a_i}`
    /// is needlessly close to 1. Reports margin `ε*/2` so both inequalities
    /// stay strict.
    fn separate_with_floor(&self, b: &[BigRational], eta: &BigRational) -> Option<SeparatingFunctional> {
        let k = self.k;
        let mut obj = vec![BigRational::zero(); k];
        obj.push(BigRational::one());
        let (best, first) = match maximize(&obj, &self.separation_rows(b, eta, None)) {
            LpOutcome::Optimal { value, x } if value.is_positive() => (value, x),
            _ => return None,
        };
        // entries capped by the stage-one optimum, which stays feasible
        let cap = first[..k].iter().max().cloned().unwrap_or_else(BigRational::one);
        let held = &best * BigRational::new(3.into(), 4.into());
        let mut cons = self.separation_rows(b, eta, Some(&held));
        for i in 0..k {
            let mut row = vec![BigRational::zero(); k + 1];
            row[i] = BigRational::one();
            row[k] = -BigRational::one();
            cons.push(Constraint::new(row, Relation::Ge, BigRational::zero()));
            let mut row = vec![BigRational::zero(); k + 1];
            row[i] = BigRational::one();
            cons.push(Constraint::new(row, Relation::Le, cap.clone()));
        }
        match maximize(&obj, &cons) {
            LpOutcome::Optimal { x, .. } => {
                let margin = best / BigRational::from_integer(2.into());
                Some(SeparatingFunctional { a: x[..k].to_vec(), margin })
            }
            _ => None,
        }
    }

    fn verify_separation(&self, b: &[BigRational], sep: &SeparatingFunctional) -> bool {
        let one = BigRational::one();
        sep.a.iter().all(|x| x.is_positive())
            && sep.apply(b) < &one - &sep.margin
            && self.generators.iter().all(|g| sep.apply(&to_rat(g)) > &one + &sep.margin)
    }

    /// Plain-text form: `k=<k> cap=<cap>` then one generator per line.
    pub fn to_text(&self) -> String {
        let cap = self.cap.as_ref().map(|c| c.max_word_len.to_string()).unwrap_or_else(|| "none".into());
        let mut s = format!("k={} cap={}\n", self.k, cap);
        for g in &self.minimal {
            let parts: Vec<String> = g.iter().map(|x| x.to_string()).collect();
            s.push_str(&parts.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::parse("missing header"))?;
        let mut k = None;
        let mut cap = None;
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("k", v)) => k = Some(v.parse::<usize>().map_err(|_| Error::parse("bad k").at_line(hline + 1))?),
                Some(("cap", "none")) => cap = None,
                Some(("cap", v)) => {
                    cap = Some(v.parse::<usize>().map_err(|_| Error::parse("bad cap").at_line(hline + 1))?)
                }
                _ => return Err(Error::parse(format!("unexpected header token '{tok}'")).at_line(hline + 1)),
            }
        }
        let k = k.ok_or_else(|| Error::parse("header lacks k=").at_line(hline + 1))?;
        let mut gens = Vec::new();
        for (i, line) in lines {
            let g: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse("bad generator entry").at_line(i + 1))?;
            if g.len() != k {
                return Err(Error::parse(format!("generator has {} entries, expected {k}", g.len())).at_line(i + 1));
            }
            gens.push(g);
        }
        let mut p = NewtonPolytope::from_generators(k, gens)?;
        p.cap = cap.map(|c| CapRecord { max_word_len: c, per_letter: None });
        Ok(p)
    }
}

impl fmt::Display for NewtonPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self
            .minimal
            .iter()
            .map(|g| format!("({})", g.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{{{}}}", vs.join(", "))
    }
}

/// Builds `P` from the catalog's tuples that are nonvanishing at `point`.
pub fn build_polytope(catalog: &Catalog, point: &[BigRational]) -> Result<NewtonPolytope> {
    let tuples = catalog.enumerate_tuples(point)?;
    let cap = CapRecord { max_word_len: catalog.caps().max_word_len, per_letter: catalog.caps().per_letter };
    Ok(NewtonPolytope::from_tuples(catalog.arity(), &tuples)?.with_cap(cap))
}

fn hull_contains(k: usize, gens: &[Vec<u32>], b: &[BigRational]) -> bool {
    if gens.is_empty() {
        return false;
    }
    if gens.iter().any(|g| g.iter().zip(b).all(|(&gi, bi)| BigRational::from_integer(gi.into()) <= *bi)) {
        return true;
    }
    let m = gens.len();
    let mut cons = Vec::with_capacity(k + 1);
    for i in 0..k {
        let row: Vec<BigRational> = gens.iter().map(|g| BigRational::from_integer(g[i].into())).collect();
        cons.push(Constraint::new(row, Relation::Le, b[i].clone()));
    }
    cons.push(Constraint::new(vec![BigRational::one(); m], Relation::Eq, BigRational::one()));
    matches!(maximize(&vec![BigRational::zero(); m], &cons), LpOutcome::Optimal { .. })
}

/// Drops every generator lying in the polytope of the remaining ones.
fn minimal_generators(k: usize, sorted: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut keep: Vec<Vec<u32>> = sorted.to_vec();
    let mut i = 0;
    while i < keep.len() {
        let g = keep[i].clone();
        let others: Vec<Vec<u32>> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, h)| h.clone()).collect();
        if hull_contains(k, &others, &to_rat(&g)) {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    keep
}
