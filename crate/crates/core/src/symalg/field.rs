use std::fmt;

use num::{BigRational, Zero};

use super::polynomial::{FloatPoly, Polynomial};
use crate::error::{Error, Result};

/// Polynomial vector field `Σ_i c_i(x) ∂_i` on ℝⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyVectorField {
    components: Vec<Polynomial>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.len();
        if let Some(bad) = components.iter().find(|c| c.nvars() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.nvars() });
        }
        Ok(PolyVectorField { components })
    }

    pub fn zero(n: usize) -> Self {
        PolyVectorField { components: vec![Polynomial::zero(n); n] }
    }

    /// The coordinate field `∂_{i+1}`.
    pub fn coordinate(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, bound: n });
        }
        let mut comps = vec![Polynomial::zero(n); n];
        comps[i] = Polynomial::one(n);
        Ok(PolyVectorField { components: comps })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    fn check_dim(&self, other: &PolyVectorField) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        self.check_dim(other)?;
        Ok(PolyVectorField {
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        self.check_dim(other)?;
        Ok(PolyVectorField {
            components: self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &BigRational) -> PolyVectorField {
        PolyVectorField { components: self.components.iter().map(|p| p.scale(c)).collect() }
    }

    /// Directional derivative `X(f) = Σ_i X_i ∂_i f`.
    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        if f.nvars() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: f.nvars() });
        }
        let mut acc = Polynomial::zero(self.dim());
        for (i, xi) in self.components.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let d = f.partial_derivative(i)?;
            if !d.is_zero() {
                acc = &acc + &(xi * &d);
            }
        }
        Ok(acc)
    }

    pub fn evaluate(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        self.components.iter().map(|c| c.evaluate(x)).collect()
    }

    pub fn evaluate_f64(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.evaluate_f64(x)).collect()
    }

    pub fn compile(&self) -> CompiledField {
        CompiledField { components: self.components.iter().map(Polynomial::compile).collect() }
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Lie bracket `[X, Y]`, component `j` equal to `Σ_i (X_i ∂_i Y_j − Y_i ∂_i X_j)`.
pub fn lie_bracket(x: &PolyVectorField, y: &PolyVectorField) -> Result<PolyVectorField> {
    x.check_dim(y)?;
    let components = (0..x.dim())
        .map(|j| Ok(&x.apply(y.component(j))? - &y.apply(x.component(j))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyVectorField { components })
}

/// Determinant of the `n × n` matrix whose columns are the given fields.
pub fn determinant(fields: &[PolyVectorField]) -> Result<Polynomial> {
    let n = fields.first().map(PolyVectorField::dim).ok_or(Error::EmptyCatalog)?;
    if fields.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: fields.len() });
    }
    if let Some(bad) = fields.iter().find(|f| f.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.dim() });
    }
    // entry (row i, column j) = component i of field j
    let cols: Vec<Vec<&Polynomial>> = fields.iter().map(|f| f.components.iter().collect()).collect();
    Ok(laplace_det(n, &cols))
}

/// Laplace expansion over row subsets, memoised by bitmask. `cols[j][i]` is
/// the entry in row `i`, column `j`; every row is assumed to have `n` entries.
pub(crate) fn laplace_det(nvars: usize, cols: &[Vec<&Polynomial>]) -> Polynomial {
    let m = cols.len();
    if m == 0 {
        return Polynomial::one(nvars);
    }
    let rows = cols[0].len();
    debug_assert_eq!(rows, m);
    // minors[mask] = det of the submatrix on the rows in `mask` and the
    // first popcount(mask) columns.
    let full = 1usize << rows;
    let mut minors: Vec<Option<Polynomial>> = vec![None; full];
    minors[0] = Some(Polynomial::one(nvars));
    for mask in 1..full {
        let c = mask.count_ones() as usize - 1;
        let col = &cols[c];
        let mut acc = Polynomial::zero(nvars);
        // expand along the last column `c`; sign by position of row in mask
        let mut pos = 0;
        for r in 0..rows {
            if mask & (1 << r) == 0 {
                continue;
            }
            let entry = col[r];
            let sub = minors[mask & !(1 << r)].as_ref().unwrap();
            if !entry.is_zero() && !sub.is_zero() {
                let term = entry * sub;
                // row r is at position `pos` among the selected rows; the
                // cofactor sign for (pos, c) is (-1)^(pos + c)
                if (pos + c) % 2 == 0 {
                    acc = &acc + &term;
                } else {
                    acc = &acc - &term;
                }
            }
            pos += 1;
        }
        minors[mask] = Some(acc);
    }
    minors[full - 1].take().unwrap()
}

/// Polynomial map ℝⁿ → ℝⁿ⁻¹.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    components: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.len() + 1;
        if let Some(bad) = components.iter().find(|c| c.nvars() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.nvars() });
        }
        Ok(PolyMap { components })
    }

    /// Dimension of the source space.
    pub fn source_dim(&self) -> usize {
        self.components.len() + 1
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn evaluate(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        self.components.iter().map(|c| c.evaluate(x)).collect()
    }

    /// `π(0) = 0`.
    pub fn is_normalized(&self) -> bool {
        self.components.iter().all(|c| c.constant_term().is_zero())
    }

    /// Rows of the Jacobian matrix.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|c| (0..self.source_dim()).map(|i| c.partial_derivative(i).unwrap()).collect())
            .collect()
    }

    /// `Dπ · X` as a vector of polynomials.
    pub fn push_forward(&self, x: &PolyVectorField) -> Result<Vec<Polynomial>> {
        if x.dim() != self.source_dim() {
            return Err(Error::DimensionMismatch { expected: self.source_dim(), found: x.dim() });
        }
        self.components.iter().map(|c| x.apply(c)).collect()
    }

    pub fn compile(&self) -> CompiledMap {
        CompiledMap {
            source_dim: self.source_dim(),
            components: self.components.iter().map(Polynomial::compile).collect(),
            jacobian: self.jacobian().iter().map(|row| row.iter().map(Polynomial::compile).collect()).collect(),
        }
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Field tangent to the fibres of `π`: `X_i = (−1)^{i+1} det(J without column i)`
/// (1-based `i`), i.e. the generalised cross product of the Jacobian rows.
pub fn kernel_field(pi: &PolyMap) -> Result<PolyVectorField> {
    let n = pi.source_dim();
    let jac = pi.jacobian();
    let mut components = Vec::with_capacity(n);
    for omit in 0..n {
        let cols: Vec<Vec<&Polynomial>> = (0..n)
            .filter(|&c| c != omit)
            .map(|c| jac.iter().map(|row| &row[c]).collect())
            .collect();
        let minor = laplace_det(n, &cols);
        components.push(if omit % 2 == 0 { minor } else { -&minor });
    }
    PolyVectorField::new(components)
}

/// Floating copy of a vector field.
#[derive(Clone, Debug)]
pub struct CompiledField {
    components: Vec<FloatPoly>,
}

impl CompiledField {
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(x);
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }
}

/// Floating copy of a polynomial map together with its Jacobian.
#[derive(Clone, Debug)]
pub struct CompiledMap {
    source_dim: usize,
    components: Vec<FloatPoly>,
    jacobian: Vec<Vec<FloatPoly>>,
}

impl CompiledMap {
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(x);
        }
    }

    pub fn jacobian_at(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jacobian.iter().map(|row| row.iter().map(|p| p.eval(x)).collect()).collect()
    }
}

/// Exact rank of a rational matrix given as rows.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut basis = EchelonBasis::default();
    rows.iter().filter(|r| basis.insert(r)).count()
}

/// Incrementally maintained reduced row basis over ℚ.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl EchelonBasis {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v`; returns whether it was independent of the current span.
    pub fn insert(&mut self, v: &[BigRational]) -> bool {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let f = v[*pivot].clone() / &row[*pivot];
                for (a, b) in v.iter_mut().zip(row) {
                    *a -= &f * b;
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symalg::parse_polynomial;

    fn field(n: usize, comps: &[&str]) -> PolyVectorField {
        PolyVectorField::new(comps.iter().map(|c| parse_polynomial(c, n).unwrap()).collect()).unwrap()
    }

    #[test]
    fn constant_fields_commute() {
        let d1 = PolyVectorField::coordinate(2, 0).unwrap();
        let d2 = PolyVectorField::coordinate(2, 1).unwrap();
        assert!(lie_bracket(&d1, &d2).unwrap().is_zero());
    }

    #[test]
    fn bracket_of_tao_wright_pair() {
        // [∂1, ∂1 + x1 ∂2] = ∂2
        let x1 = field(2, &["1", "0"]);
        let x2 = field(2, &["1", "x1"]);
        assert_eq!(lie_bracket(&x1, &x2).unwrap(), field(2, &["0", "1"]));
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let a = PolyVectorField::coordinate(2, 0).unwrap();
        let b = PolyVectorField::coordinate(3, 0).unwrap();
        assert!(matches!(lie_bracket(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn kernel_of_coordinate_projection() {
        let pi = PolyMap::new(vec![parse_polynomial("x1", 2).unwrap()]).unwrap();
        let x = kernel_field(&pi).unwrap();
        assert_eq!(x, field(2, &["0", "-1"]));
    }

    #[test]
    fn kernel_of_moment_curve_map() {
        // π(x1, x2, t) = (x1 - t, x2 - t^2)  ->  ∂1 + 2t ∂2 + ∂t
        let pi = PolyMap::new(vec![
            parse_polynomial("x1 - x3", 3).unwrap(),
            parse_polynomial("x2 - x3^2", 3).unwrap(),
        ])
        .unwrap();
        let x = kernel_field(&pi).unwrap();
        assert_eq!(x, field(3, &["1", "2*x3", "1"]));
        assert!(pi.push_forward(&x).unwrap().iter().all(Polynomial::is_zero));
    }

    #[test]
    fn determinant_examples() {
        let d1 = PolyVectorField::coordinate(2, 0).unwrap();
        let d2 = PolyVectorField::coordinate(2, 1).unwrap();
        assert_eq!(determinant(&[d1.clone(), d2]).unwrap(), Polynomial::one(2));
        let x2 = field(2, &["1", "x1"]);
        assert_eq!(determinant(&[d1, x2.clone()]).unwrap(), parse_polynomial("x1", 2).unwrap());
        assert!(determinant(&[x2.clone(), x2]).unwrap().is_zero());
    }

    #[test]
    fn determinant_count_mismatch() {
        let d1 = PolyVectorField::coordinate(3, 0).unwrap();
        assert!(matches!(determinant(&[d1.clone(), d1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn determinant_3x3_matches_sarrus() {
        let a = field(3, &["x1", "2", "x2"]);
        let b = field(3, &["1", "x3", "0"]);
        let c = field(3, &["x2", "1", "3"]);
        let det = determinant(&[a.clone(), b.clone(), c.clone()]).unwrap();
        // columns a, b, c; rows = components
        let m = |f: &PolyVectorField, i: usize| f.component(i).clone();
        let (a0, a1, a2) = (m(&a, 0), m(&a, 1), m(&a, 2));
        let (b0, b1, b2) = (m(&b, 0), m(&b, 1), m(&b, 2));
        let (c0, c1, c2) = (m(&c, 0), m(&c, 1), m(&c, 2));
        let plus = &(&(&(&a0 * &b1) * &c2) + &(&(&b0 * &c1) * &a2)) + &(&(&c0 * &a1) * &b2);
        let minus = &(&(&(&c0 * &b1) * &a2) + &(&(&b0 * &a1) * &c2)) + &(&(&a0 * &c1) * &b2);
        assert_eq!(det, &plus - &minus);
    }

    #[test]
    fn rank_over_rationals() {
        let r = |v: &[i64]| v.iter().map(|&x| BigRational::from_integer(x.into())).collect::<Vec<_>>();
        assert_eq!(rational_rank(&[r(&[1, 0]), r(&[2, 0])]), 1);
        assert_eq!(rational_rank(&[r(&[1, 0, 0]), r(&[0, 1, 0]), r(&[1, 1, 1])]), 3);
    }
}
