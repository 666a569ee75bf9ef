//! Dense matrices over a finite field with Gaussian elimination.

use crate::field::{Fe, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Fe>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Append columns of `other` on the right.
    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        out
    }

    pub fn mul_vec(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, f: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv_nz(self.get(r, c));
            for j in c..self.cols {
                let v = f.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.clone().rref(f).len()
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column,
    /// with a 1 in that free column.
    pub fn kernel(&self, f: &Field) -> Vec<Vec<Fe>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let mut is_pivot = vec![None; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![Fe::ZERO; self.cols];
            v[free] = Fe::ONE;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(m.get(r, free));
            }
            basis.push(v);
        }
        basis
    }
}

/// Reduced row echelon basis of the span of `vectors` (zero rows dropped).
pub fn row_space_rref(f: &Field, vectors: Vec<Vec<Fe>>) -> Vec<Vec<Fe>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut m = Matrix::from_rows(vectors);
    let rank = m.rref(f).len();
    (0..rank).map(|r| m.row(r).to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn kernel_of_rank_deficient_matrix() {
        let f = make_field(7, 1).unwrap();
        let m = Matrix::from_rows(vec![vec![Fe(1), Fe(2), Fe(3)], vec![Fe(2), Fe(4), Fe(6)]]);
        assert_eq!(m.rank(&f), 1);
        let k = m.kernel(&f);
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(m.mul_vec(&f, &v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn rref_is_canonical() {
        let f = make_field(13, 1).unwrap();
        let a = row_space_rref(&f, vec![vec![Fe(1), Fe(2), Fe(0)], vec![Fe(0), Fe(1), Fe(5)]]);
        let b = row_space_rref(&f, vec![vec![Fe(1), Fe(3), Fe(5)], vec![Fe(2), Fe(5), Fe(5)]]);
        assert_eq!(a, b);
    }
}
