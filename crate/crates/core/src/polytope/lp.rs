//! Dense two-phase simplex over exact rationals, with Bland's rule.
//!
//! Instances here are tiny (a few hundred columns, `k + 1` rows), so a dense
//! tableau of `BigRational` is fast enough and never rounds.

use num::{BigRational, One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub rel: Relation,
    pub rhs: BigRational,
}

impl Constraint {
    pub fn new(coeffs: Vec<BigRational>, rel: Relation, rhs: BigRational) -> Self {
        Constraint { coeffs, rel, rhs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<BigRational>, value: BigRational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<BigRational>>, // each row has `cols + 1` entries, last = rhs
    obj: Vec<BigRational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the current objective row. `allowed`
    /// masks columns that may enter. Returns false if unbounded.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.cols).find(|&j| allowed[j] && self.obj[j].is_negative());
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Maximises `objective · x` subject to `constraints` and `x ≥ 0`.
pub fn maximize(objective: &[BigRational], constraints: &[Constraint]) -> LpOutcome {
    let nv = objective.len();
    let m = constraints.len();
    // normalise to non-negative right-hand sides
    let mut rows: Vec<(Vec<BigRational>, Relation, BigRational)> = constraints
        .iter()
        .map(|c| {
            assert_eq!(c.coeffs.len(), nv, "constraint width differs from objective");
            if c.rhs.is_negative() {
                let rel = match c.rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), rel, -c.rhs.clone())
            } else {
                (c.coeffs.clone(), c.rel, c.rhs.clone())
            }
        })
        .collect();

    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = nv + n_slack + n_art;
    let art_start = nv + n_slack;

    let mut t_rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut s = nv;
    let mut a = art_start;
    for (coeffs, rel, rhs) in rows.drain(..) {
        let mut row = vec![BigRational::zero(); cols + 1];
        row[..nv].clone_from_slice(&coeffs);
        row[cols] = rhs;
        match rel {
            Relation::Le => {
                row[s] = BigRational::one();
                basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -BigRational::one();
                s += 1;
                row[a] = BigRational::one();
                basis.push(a);
                a += 1;
            }
            Relation::Eq => {
                row[a] = BigRational::one();
                basis.push(a);
                a += 1;
            }
        }
        t_rows.push(row);
    }

    let mut t = Tableau { rows: t_rows, obj: vec![BigRational::zero(); cols + 1], basis, cols };

    if n_art > 0 {
        // phase 1: maximise −Σ artificials
        for j in art_start..cols {
            t.obj[j] = BigRational::one();
        }
        for i in 0..m {
            if t.basis[i] >= art_start {
                let row = t.rows[i].clone();
                for (v, rv) in t.obj.iter_mut().zip(&row) {
                    *v -= rv;
                }
            }
        }
        let all = vec![true; cols];
        t.optimize(&all);
        if t.obj[cols].is_negative() {
            return LpOutcome::Infeasible;
        }
        // drive remaining (zero-valued) artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art_start {
                match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        // redundant row
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    // phase 2
    t.obj = vec![BigRational::zero(); cols + 1];
    for (j, c) in objective.iter().enumerate() {
        t.obj[j] = -c.clone();
    }
    for i in 0..t.rows.len() {
        let b = t.basis[i];
        if !t.obj[b].is_zero() {
            let f = t.obj[b].clone();
            let row = t.rows[i].clone();
            for (v, rv) in t.obj.iter_mut().zip(&row) {
                *v -= &f * rv;
            }
        }
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < art_start).collect();
    if !t.optimize(&allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![BigRational::zero(); nv];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < nv {
            x[b] = t.rows[i][cols].clone();
        }
    }
    let value = objective.iter().zip(&x).fold(BigRational::zero(), |acc, (c, v)| acc + c * v);
    LpOutcome::Optimal { x, value }
}
