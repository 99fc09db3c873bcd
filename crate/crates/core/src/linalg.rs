//! Exact linear algebra over the field of rational functions.
//!
//! Entries are converted to [`RatFun`] over a shared [`AtomTable`]; function
//! applications count as independent indeterminates.

use num_rational::BigRational;
use num_traits::Zero;
use crate::symkernel::{canonicalize, gcd, AtomTable, DivisionByZero, Expr, Poly, RatFun};

/// A matrix of expressions converted over one atom table.
#[derive(Clone, Debug)]
pub struct RatMatrix {
    pub table: AtomTable,
    pub rows: Vec<Vec<RatFun>>,
    pub ncols: usize,
}

/// Outcome of fraction-free elimination.
#[derive(Clone, Debug)]
pub struct RankInfo {
    pub rank: usize,
    /// Original indices of the rows that carried a pivot.
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    /// Pivots that are not constants; the rank can drop where they vanish.
    pub degenerate: Vec<Expr>,
}

impl RatMatrix {
    pub fn from_exprs(vars: &[&str], rows: &[Vec<Expr>], ncols: usize) -> Result<RatMatrix, DivisionByZero> {
        let canon: Vec<Vec<Expr>> = rows
            .iter()
            .map(|r| r.iter().map(crate::symkernel::try_canonicalize).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let table = AtomTable::with_vars(vars, canon.iter().flatten());
        let rows = canon
            .iter()
            .map(|r| r.iter().map(|e| table.to_ratfun(e)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        Ok(RatMatrix { table, rows, ncols })
    }

    pub fn nvars(&self) -> usize {
        self.table.len()
    }

    fn poly_rows(&self) -> Vec<Vec<Poly>> {
        self.rows
            .iter()
            .map(|row| {
                let mut l = Poly::one(self.nvars());
                for e in row {
                    if !e.den.is_one() {
                        let g = gcd(&l, &e.den);
                        l = l.mul(&e.den.div_exact(&g).expect("gcd divides"));
                    }
                }
                row.iter()
                    .map(|e| e.num.mul(&l.div_exact(&e.den).expect("lcm is a multiple")))
                    .collect()
            })
            .collect()
    }

    /// Bareiss elimination. Pivot rows are chosen with the smallest original
    /// index, so the reported pivot rows are the greedy basis in input order.
    pub fn rank_info(&self) -> RankInfo {
        let mut m = self.poly_rows();
        let nrows = m.len();
        let mut order: Vec<usize> = (0..nrows).collect();
        let mut prev = Poly::one(self.nvars());
        let mut r = 0;
        let mut pivot_rows = Vec::new();
        let mut pivot_cols = Vec::new();
        let mut degenerate = Vec::new();
        for c in 0..self.ncols {
            if r == nrows {
                break;
            }
            let pick = (r..nrows).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| order[i]);
            let Some(p) = pick else { continue };
            m.swap(r, p);
            order.swap(r, p);
            for i in r + 1..nrows {
                for j in c + 1..self.ncols {
                    let v = m[r][c].mul(&m[i][j]).sub(&m[i][c].mul(&m[r][j]));
                    m[i][j] = v.div_exact(&prev).expect("Bareiss division is exact");
                }
                m[i][c] = Poly::zero(self.nvars());
            }
            prev = m[r][c].clone();
            if !prev.is_constant() {
                degenerate.push(self.table.poly_to_expr(&prev.primitive()));
            }
            pivot_rows.push(order[r]);
            pivot_cols.push(c);
            r += 1;
        }
        RankInfo {
            rank: r,
            pivot_rows,
            pivot_cols,
            degenerate,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank_info().rank
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Vec<Vec<RatFun>>, Vec<usize>) {
        let mut m = self.rows.clone();
        let nrows = m.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == nrows {
                break;
            }
            let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].inv().expect("nonzero pivot");
            for j in 0..self.ncols {
                m[r][j] = m[r][j].mul(&inv);
            }
            for i in 0..nrows {
                if i == r || m[i][c].is_zero() {
                    continue;
                }
                let f = m[i][c].clone();
                for j in 0..self.ncols {
                    if !m[r][j].is_zero() {
                        m[i][j] = m[i][j].sub(&f.mul(&m[r][j]));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.truncate(r);
        (m, pivots)
    }

    /// Basis of `{a : M a = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<RatFun>> {
        let (m, pivots) = self.rref();
        let n = self.nvars();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![RatFun::zero(n); self.ncols];
                v[f] = RatFun::one(n);
                for (row, &pc) in m.iter().zip(&pivots) {
                    v[pc] = row[f].neg();
                }
                v
            })
            .collect()
    }

    pub fn to_expr(&self, r: &RatFun) -> Expr {
        self.table.to_expr(r)
    }
}

/// Solves the square system `M a = b` over the rational-function field.
pub fn solve(vars: &[&str], m: &[Vec<Expr>], b: &[Expr]) -> Result<Option<Vec<Expr>>, DivisionByZero> {
    let n = m.len();
    let rows: Vec<Vec<Expr>> = m
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mat = RatMatrix::from_exprs(vars, &rows, n + 1)?;
    let (red, pivots) = mat.rref();
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return Ok(None);
    }
    Ok(Some(red.iter().map(|row| canonicalize(&mat.to_expr(&row[n]))).collect()))
}

/// Solves a consistent, possibly overdetermined system over `Q`; `None` when
/// it is inconsistent or underdetermined.
pub fn solve_rational(rows: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut r = 0;
    for c in 0..ncols {
        let p = (r..m.len()).find(|&i| !m[i][c].is_zero())?;
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=ncols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        r += 1;
    }
    if m[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    Some(m[..ncols].iter().map(|row| row[ncols].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::parse;

    fn m(rows: &[&[&str]]) -> Vec<Vec<Expr>> {
        rows.iter().map(|r| r.iter().map(|s| parse(s).unwrap()).collect()).collect()
    }

    #[test]
    fn symbolic_rank() {
        let rows = m(&[&["x", "y"], &["x^2", "x*y"], &["1", "0"]]);
        let mat = RatMatrix::from_exprs(&["x", "y"], &rows, 2).unwrap();
        let info = mat.rank_info();
        assert_eq!(info.rank, 2);
        assert_eq!(info.pivot_rows, vec![0, 2]);
    }

    #[test]
    fn nullspace_of_dependent_columns() {
        let rows = m(&[&["x", "x*y", "1"], &["1", "y", "0"]]);
        let mat = RatMatrix::from_exprs(&["x", "y"], &rows, 3).unwrap();
        let ns = mat.nullspace();
        assert_eq!(ns.len(), 1);
        for row in &mat.rows {
            let mut acc = RatFun::zero(mat.nvars());
            for (a, v) in row.iter().zip(&ns[0]) {
                acc = acc.add(&a.mul(v));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn linear_solve() {
        let a = m(&[&["1", "1"], &["x", "-x"]]);
        let b = vec![parse("2*y").unwrap(), parse("0").unwrap()];
        let s = solve(&["x", "y"], &a, &b).unwrap().unwrap();
        assert_eq!(s, vec![parse("y").unwrap(), parse("y").unwrap()]);
    }
}
