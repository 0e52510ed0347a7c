//! Fraction-free elimination over the coefficient algebra and pointwise numeric linear algebra.

use crate::sample::SampleSet;
use crate::scalar::{Scalar, ZERO_TOL};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Relative singular-value cutoff for numeric ranks.
pub const RANK_TOL: f64 = 1e-8;
/// Residual coefficients below this fraction of their row's peak coefficient are rounding noise.
pub const ELIMINATION_REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("pivot {0} is not invertible in the coefficient algebra")]
    NonUnitPivot(String),
}

/// Result of a reduced row-echelon pass.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub rows: Vec<Vec<Scalar>>,
    /// `(row, column)` of each pivot, in elimination order.
    pub pivots: Vec<(usize, usize)>,
    /// False when some pivot vanishes at a sample point.
    pub safe: bool,
    /// Largest coefficient magnitude each row held during elimination.
    pub peaks: Vec<f64>,
}

/// Pivot preference: nonvanishing samples, unit, fewer terms, earlier column, earlier row.
type PivotKey = (usize, bool, isize, isize, isize);

/// Reduced row echelon form with pivots restricted to the first `eligible` columns.
///
/// Unit pivots are normalised to one; other pivots clear their column fraction-free.
pub fn reduce(mut rows: Vec<Vec<Scalar>>, eligible: usize, samples: &SampleSet) -> Elimination {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut safe = true;
    let nrows = rows.len();
    let row_peak = |row: &[Scalar]| row.iter().map(Scalar::max_coeff).fold(0.0, f64::max);
    let mut peaks: Vec<f64> = rows.iter().map(|r| row_peak(r)).collect();
    loop {
        let mut best: Option<(PivotKey, usize, usize)> = None;
        for r in 0..nrows {
            if pivots.iter().any(|&(pr, _)| pr == r) {
                continue;
            }
            for c in 0..eligible {
                let v = &rows[r][c];
                if v.is_zero() {
                    continue;
                }
                let key = (
                    samples.nonvanishing_count(v),
                    v.is_unit(),
                    -(v.num_terms() as isize),
                    -(c as isize),
                    -(r as isize),
                );
                if best.as_ref().is_none_or(|(k, _, _)| key > *k) {
                    best = Some((key, r, c));
                }
            }
        }
        let Some((key, pr, pc)) = best else { break };
        if key.0 < samples.len() {
            safe = false;
        }
        if rows[pr][pc].is_unit() {
            let inv = rows[pr][pc].inverse().expect("units are invertible");
            rows[pr] = rows[pr].iter().map(|a| a * &inv).collect();
            rows[pr][pc] = Scalar::one();
        }
        let pivot_row = rows[pr].clone();
        let p = pivot_row[pc].clone();
        let unit = p == Scalar::one();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == pr || row[pc].is_zero() {
                continue;
            }
            let a = row[pc].clone();
            for (slot, pv) in row.iter_mut().zip(&pivot_row) {
                let scaled = if unit { slot.clone() } else { &p * &*slot };
                *slot = if pv.is_zero() {
                    scaled
                } else {
                    scaled - &a * pv
                };
            }
            row[pc] = Scalar::zero();
            peaks[r] = peaks[r].max(row_peak(row));
        }
        pivots.push((pr, pc));
    }
    Elimination {
        rows,
        pivots,
        safe,
        peaks,
    }
}

/// Denominator-free kernel basis of `matrix` (columns are unknowns).
pub fn kernel(matrix: Vec<Vec<Scalar>>, samples: &SampleSet) -> (Vec<Vec<Scalar>>, bool) {
    let ncols = matrix.first().map_or(0, Vec::len);
    let red = reduce(matrix, ncols, samples);
    let pivot_cols: Vec<usize> = red.pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let involved: Vec<(usize, usize)> = red
            .pivots
            .iter()
            .copied()
            .filter(|&(r, _)| !red.rows[r][free].is_zero())
            .collect();
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = involved
            .iter()
            .map(|&(r, c)| red.rows[r][c].clone())
            .product_or_one();
        for &(r, c) in &involved {
            let others = involved
                .iter()
                .filter(|&&(r2, _)| r2 != r)
                .map(|&(r2, c2)| red.rows[r2][c2].clone())
                .product_or_one();
            v[c] = -(&red.rows[r][free] * &others);
        }
        basis.push(v);
    }
    (basis, red.safe)
}

trait ProductOrOne {
    fn product_or_one(self) -> Scalar;
}

impl<I: Iterator<Item = Scalar>> ProductOrOne for I {
    fn product_or_one(self) -> Scalar {
        self.fold(Scalar::one(), |acc, x| acc * x)
    }
}

/// Outcome of solving `columns * c = target` symbolically.
#[derive(Debug, Clone)]
pub struct Solve {
    /// Entries of the target column left in rows without a pivot; all zero iff solvable.
    pub residual: Vec<Scalar>,
    /// Peak coefficient magnitude of each residual's row.
    pub scales: Vec<f64>,
    pub safe: bool,
}

impl Solve {
    pub fn consistent(&self) -> bool {
        self.residual
            .iter()
            .zip(&self.scales)
            .all(|(r, &scale)| r.max_coeff() <= (ELIMINATION_REL_TOL * scale).max(ZERO_TOL))
    }
}

/// Symbolic consistency of `sum c_j columns[j] = target`.
pub fn solve(columns: &[Vec<Scalar>], target: &[Scalar], samples: &SampleSet) -> Solve {
    let k = columns.len();
    let rows: Vec<Vec<Scalar>> = (0..target.len())
        .map(|r| {
            columns
                .iter()
                .map(|c| c[r].clone())
                .chain([target[r].clone()])
                .collect()
        })
        .collect();
    let red = reduce(rows, k, samples);
    let free: Vec<usize> = (0..target.len())
        .filter(|r| !red.pivots.iter().any(|&(pr, _)| pr == *r))
        .collect();
    Solve {
        residual: free.iter().map(|&r| red.rows[r][k].clone()).collect(),
        scales: free.iter().map(|&r| red.peaks[r]).collect(),
        safe: red.safe,
    }
}

/// Exact inverse, requiring every pivot to be invertible.
pub fn invert(
    matrix: &[Vec<Scalar>],
    samples: &SampleSet,
) -> Result<Vec<Vec<Scalar>>, LinalgError> {
    let n = matrix.len();
    let rows: Vec<Vec<Scalar>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .cloned()
                .chain((0..n).map(|j| {
                    if i == j {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                }))
                .collect()
        })
        .collect();
    let red = reduce(rows, n, samples);
    if red.pivots.len() < n {
        return Err(LinalgError::Singular);
    }
    let mut inv = vec![Vec::new(); n];
    for &(r, c) in &red.pivots {
        let p = &red.rows[r][c];
        if *p != Scalar::one() {
            return Err(LinalgError::NonUnitPivot(p.to_string()));
        }
        inv[c] = red.rows[r][n..].to_vec();
    }
    Ok(inv)
}

fn to_matrix(columns: &[Vec<Complex64>], nrows: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(nrows, columns.len(), |r, c| columns[c][r])
}

/// Numeric rank of a set of column vectors.
pub fn numeric_rank(columns: &[Vec<Complex64>]) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let m = to_matrix(columns, columns[0].len());
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let cutoff = RANK_TOL * top.max(1.0);
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Orthonormal basis of the column span.
pub fn column_space(columns: &[Vec<Complex64>], nrows: usize) -> Vec<DVector<Complex64>> {
    if columns.is_empty() {
        return Vec::new();
    }
    let svd = to_matrix(columns, nrows).svd(true, false);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = RANK_TOL * top.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff)
        .map(|(i, _)| u.column(i).into_owned())
        .collect()
}

/// Distance from `target` to the column span, scaled by `max(1, |target|)`.
pub fn numeric_residual(columns: &[Vec<Complex64>], target: &[Complex64]) -> f64 {
    let t = DVector::from_column_slice(target);
    let mut r = t.clone();
    for q in column_space(columns, target.len()) {
        let coeff = q.dotc(&t);
        r -= q * coeff;
    }
    r.norm() / t.norm().max(1.0)
}

/// Orthonormal basis of the null space of `rows` (each row a linear functional).
pub fn numeric_nullspace(rows: &[Vec<Complex64>], ncols: usize) -> Vec<DVector<Complex64>> {
    if rows.is_empty() {
        return (0..ncols)
            .map(|i| {
                DVector::from_fn(ncols, |r, _| {
                    if r == i {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
    }
    let m = DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]);
    // the null space of M is the orthogonal complement of the row space, i.e. of span(conj rows)
    let adj = m.adjoint();
    let cols: Vec<Vec<Complex64>> = (0..adj.ncols())
        .map(|c| adj.column(c).iter().cloned().collect())
        .collect();
    let range = column_space(&cols, ncols);
    let mut basis: Vec<DVector<Complex64>> = range.clone();
    let mut out = Vec::new();
    for i in 0..ncols {
        let mut v = DVector::from_fn(ncols, |r, _| {
            if r == i {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        for q in &basis {
            let c = q.dotc(&v);
            v -= q * c;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            let v = v / Complex64::new(norm, 0.0);
            basis.push(v.clone());
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::FrameModel;

    fn samples() -> SampleSet {
        SampleSet::halton(
            &FrameModel::coordinate("m", &[("t", true), ("x", false)]),
            20,
        )
    }

    fn re(x: f64) -> Scalar {
        Scalar::real(x)
    }

    fn mat_vec(m: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
        m.iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    #[test]
    fn kernel_of_constraints() {
        let s = samples();
        let x = Scalar::var("x");
        let m = vec![
            vec![re(1.0), x.clone(), re(0.0), re(2.0)],
            vec![re(0.0), re(0.0), x.clone(), re(1.0)],
        ];
        let (basis, safe) = kernel(m.clone(), &s);
        assert!(safe);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(mat_vec(&m, v).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn vanishing_pivot_marks_unsafe() {
        let s = samples();
        let c = Scalar::cos("t", 2.0 * std::f64::consts::PI);
        let (basis, safe) = kernel(vec![vec![c.clone(), re(0.0)]], &s);
        assert_eq!(basis.len(), 1);
        assert!(!safe);
        let (_, safe) = kernel(
            vec![vec![c, Scalar::var("x") * Scalar::var("x") + re(1.0)]],
            &s,
        );
        assert!(safe);
    }

    #[test]
    fn solve_and_invert() {
        let s = samples();
        let x = Scalar::var("x");
        let cols = vec![
            vec![re(1.0), x.clone(), re(0.0)],
            vec![re(0.0), re(1.0), re(1.0)],
        ];
        let target = vec![re(2.0), &x * 2.0 + re(3.0), re(3.0)];
        assert!(solve(&cols, &target, &s).consistent());
        let bad = vec![re(2.0), x.clone(), re(3.0)];
        assert!(!solve(&cols, &bad, &s).consistent());

        let m = vec![vec![re(1.0), x.clone()], vec![re(0.0), re(2.0)]];
        let inv = invert(&m, &s).unwrap();
        for j in 0..2 {
            let col: Vec<Scalar> = (0..2).map(|i| inv[i][j].clone()).collect();
            let e = mat_vec(&m, &col);
            for (i, v) in e.iter().enumerate() {
                assert_eq!(*v, if i == j { re(1.0) } else { re(0.0) });
            }
        }
        assert_eq!(
            invert(&[vec![x.clone()]], &s),
            Err(LinalgError::NonUnitPivot("x".into()))
        );
        assert_eq!(invert(&[vec![re(0.0)]], &s), Err(LinalgError::Singular));
    }

    #[test]
    fn numeric_routines() {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        let cols = vec![
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 2.0), c(0.0, 0.0)],
        ];
        assert_eq!(numeric_rank(&cols), 1);
        assert!(numeric_residual(&cols, &[c(3.0, 0.0), c(0.0, 3.0), c(0.0, 0.0)]) < 1e-12);
        assert!(
            (numeric_residual(&cols, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]) - 1.0).abs() < 1e-12
        );
        let null = numeric_nullspace(&[vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]], 3);
        assert_eq!(null.len(), 2);
        for v in &null {
            assert!((v[0] + c(0.0, 1.0) * v[1]).norm() < 1e-12);
        }
    }
}
