//! Tridiagonal systems with one extra entry in each corner.
//!
//! Collocation produces matrices of the shape
//!
//! ```text
//! | d0 u0 c_top                  |
//! | l0 d1 u1                     |
//! |    l1 d2 u2                  |
//! |          ...                 |
//! |       l_{n-3} d_{n-2} u_{n-2}|
//! |   c_bottom   l_{n-2} d_{n-1} |
//! ```
//!
//! where `c_top` sits at `(0, 2)` and `c_bottom` at `(n-1, n-3)`. Both
//! corners are absorbed inside the forward sweep: the top corner only
//! touches row 1's super-diagonal slot, and the bottom corner is cleared
//! with the already-reduced row `n-3` before the last pivot.

use thiserror::Error;

/// Pivots at or below this magnitude abort elimination.
pub const PIVOT_EPS: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("zero pivot {pivot:e} at row {row}")]
    ZeroPivot { row: usize, pivot: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular matrix (pivot column {column})")]
    Singular { column: usize },
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerTridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub corner_top: f64,
    pub corner_bottom: f64,
    pub rhs: Vec<f64>,
}

impl CornerTridiagonalSystem {
    /// All-zero system of size `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            sub: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            sup: vec![0.0; n.saturating_sub(1)],
            corner_top: 0.0,
            corner_bottom: 0.0,
            rhs: vec![0.0; n],
        }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Writes a three-entry row `(left, centre, right)` starting at column
    /// `row - 1`; rows 0 and `n-1` spill into the corner slots.
    pub fn set_row(&mut self, row: usize, entries: [f64; 3], rhs: f64) {
        let n = self.size();
        let [left, centre, right] = entries;
        if row == 0 {
            self.diag[0] = left;
            self.sup[0] = centre;
            self.corner_top = right;
        } else if row == n - 1 {
            self.corner_bottom = left;
            self.sub[n - 2] = centre;
            self.diag[n - 1] = right;
        } else {
            self.sub[row - 1] = left;
            self.diag[row] = centre;
            self.sup[row] = right;
        }
        self.rhs[row] = rhs;
    }

    pub fn validate(&self) -> Result<(), LinalgError> {
        let n = self.size();
        if n < 4 {
            return Err(LinalgError::Dimension(format!("size {n} < 4")));
        }
        if self.sub.len() != n - 1 || self.sup.len() != n - 1 || self.rhs.len() != n {
            return Err(LinalgError::Dimension(format!(
                "n = {n}: sub {}, sup {}, rhs {}",
                self.sub.len(),
                self.sup.len(),
                self.rhs.len()
            )));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.diag) || !finite(&self.sub) || !finite(&self.sup) {
            return Err(LinalgError::NonFinite("matrix"));
        }
        if !(self.corner_top.is_finite() && self.corner_bottom.is_finite()) {
            return Err(LinalgError::NonFinite("corner"));
        }
        if !finite(&self.rhs) {
            return Err(LinalgError::NonFinite("right-hand side"));
        }
        Ok(())
    }

    /// Row-major dense copy of the matrix.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.sup[i];
                m[i + 1][i] = self.sub[i];
            }
        }
        m[0][2] += self.corner_top;
        m[n - 1][n - 3] += self.corner_bottom;
        m
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        let mut y: Vec<f64> = (0..n).map(|i| self.diag[i] * x[i]).collect();
        for i in 0..n - 1 {
            y[i] += self.sup[i] * x[i + 1];
            y[i + 1] += self.sub[i] * x[i];
        }
        y[0] += self.corner_top * x[2];
        y[n - 1] += self.corner_bottom * x[n - 3];
        y
    }

    /// `max_i |(A x - rhs)_i|`.
    pub fn residual_inf(&self, x: &[f64]) -> f64 {
        self.apply(x)
            .iter()
            .zip(&self.rhs)
            .map(|(ax, r)| (ax - r).abs())
            .fold(0.0, f64::max)
    }
}

fn pivot(row: usize, value: f64) -> Result<f64, LinalgError> {
    if value.abs() > PIVOT_EPS {
        Ok(value)
    } else {
        Err(LinalgError::ZeroPivot { row, pivot: value })
    }
}

/// Thomas elimination without pivoting, extended for the two corners.
pub fn solve(system: &CornerTridiagonalSystem) -> Result<Vec<f64>, LinalgError> {
    system.validate()?;
    let n = system.size();

    // After the sweep row i reads x_i + upper[i] x_{i+1} = reduced[i];
    // row 0 additionally carries `top_extra * x_2`.
    let mut upper = vec![0.0; n];
    let mut reduced = vec![0.0; n];

    let d0 = pivot(0, system.diag[0])?;
    upper[0] = system.sup[0] / d0;
    let top_extra = system.corner_top / d0;
    reduced[0] = system.rhs[0] / d0;

    // Row 1: clearing column 0 with row 0 also hits column 2.
    let l = system.sub[0];
    let d1 = pivot(1, system.diag[1] - l * upper[0])?;
    upper[1] = (system.sup[1] - l * top_extra) / d1;
    reduced[1] = (system.rhs[1] - l * reduced[0]) / d1;

    for i in 2..n - 1 {
        let l = system.sub[i - 1];
        let d = pivot(i, system.diag[i] - l * upper[i - 1])?;
        upper[i] = system.sup[i] / d;
        reduced[i] = (system.rhs[i] - l * reduced[i - 1]) / d;
    }

    // Last row: clear the corner at column n-3 using reduced row n-3, then
    // the sub-diagonal at column n-2 using reduced row n-2.
    let mut last_sub = system.sub[n - 2];
    let mut last_diag = system.diag[n - 1];
    let mut last_rhs = system.rhs[n - 1];
    let cb = system.corner_bottom;
    last_sub -= cb * upper[n - 3];
    last_rhs -= cb * reduced[n - 3];
    last_diag -= last_sub * upper[n - 2];
    last_rhs -= last_sub * reduced[n - 2];
    let dl = pivot(n - 1, last_diag)?;

    let mut x = vec![0.0; n];
    x[n - 1] = last_rhs / dl;
    for i in (0..n - 1).rev() {
        x[i] = reduced[i] - upper[i] * x[i + 1];
    }
    x[0] -= top_extra * x[2];
    Ok(x)
}

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve_oracle(matrix: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = rhs.len();
    if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
        return Err(LinalgError::Dimension(format!(
            "matrix is not {n}x{n}"
        )));
    }
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let (p, max) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if max <= PIVOT_EPS {
            return Err(LinalgError::Singular { column: col });
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            let (upper, lower) = a.split_at_mut(r);
            for (dst, src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst -= factor * src;
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = (i + 1..n).map(|c| a[i][c] * x[c]).sum();
        x[i] = (b[i] - tail) / a[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let mut sys = CornerTridiagonalSystem::zeros(6);
        sys.diag.iter_mut().for_each(|d| *d = 1.0);
        sys.rhs = vec![1.0, -2.0, 3.5, 0.0, 7.0, 1e-3];
        assert_eq!(solve(&sys).unwrap(), sys.rhs);
    }

    #[test]
    fn four_by_four_laplacian() {
        let sys = CornerTridiagonalSystem {
            sub: vec![-1.0; 3],
            diag: vec![2.0; 4],
            sup: vec![-1.0; 3],
            corner_top: 0.0,
            corner_bottom: 0.0,
            rhs: vec![1.0, 0.0, 0.0, 1.0],
        };
        let x = solve(&sys).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn corners_are_honoured() {
        let mut sys = CornerTridiagonalSystem::zeros(5);
        sys.set_row(0, [4.0, 1.0, 1.0], 0.0);
        for r in 1..4 {
            sys.set_row(r, [1.0, 4.0, 1.0], 0.0);
        }
        sys.set_row(4, [1.0, 1.0, 4.0], 0.0);
        let truth = [1.0, -2.0, 0.5, 3.0, -1.0];
        sys.rhs = sys.apply(&truth);
        let x = solve(&sys).unwrap();
        for (a, b) in x.iter().zip(truth) {
            assert!((a - b).abs() < 1e-13);
        }
        let dense = sys.to_dense();
        assert_eq!(dense[0][2], 1.0);
        assert_eq!(dense[4][2], 1.0);
    }

    #[test]
    fn symmetric_boundary_rows_need_no_pivoting() {
        // Dirichlet-like first row proportional in shape to row 1.
        let mut sys = CornerTridiagonalSystem::zeros(6);
        sys.set_row(0, [1.0, 4.0, 1.0], 1.0);
        for r in 1..5 {
            sys.set_row(r, [0.9, 4.5, 0.9], 1.0);
        }
        sys.set_row(5, [1.0, 4.0, 1.0], 1.0);
        let x = solve(&sys).unwrap();
        let oracle = dense_solve_oracle(&sys.to_dense(), &sys.rhs).unwrap();
        for (a, b) in x.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn singular_first_row_reports_row_zero() {
        let mut sys = CornerTridiagonalSystem::zeros(5);
        sys.diag.iter_mut().for_each(|d| *d = 1.0);
        sys.diag[0] = 0.0;
        assert_eq!(
            solve(&sys).unwrap_err(),
            LinalgError::ZeroPivot { row: 0, pivot: 0.0 }
        );
    }

    #[test]
    fn dimension_errors() {
        let mut sys = CornerTridiagonalSystem::zeros(5);
        sys.rhs.pop();
        assert!(matches!(solve(&sys), Err(LinalgError::Dimension(_))));
        assert!(matches!(
            solve(&CornerTridiagonalSystem::zeros(3)),
            Err(LinalgError::Dimension(_))
        ));
    }

    #[test]
    fn oracle_small_cases() {
        let x = dense_solve_oracle(&[vec![2.0, 1.0], vec![1.0, 3.0]], &[3.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        let id = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert_eq!(dense_solve_oracle(&id, &[4.0, 5.0, 6.0]).unwrap(), vec![4.0, 5.0, 6.0]);
        assert!(matches!(
            dense_solve_oracle(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 1.0]),
            Err(LinalgError::Singular { column: 1 })
        ));
    }
}
