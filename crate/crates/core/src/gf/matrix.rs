use super::field::{Elem, Field};

/// Dense row-major matrix over GF(2^q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Self {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// `dst_row ^= c * src_row`.
    fn row_mul_add(&mut self, f: &Field, dst: usize, src: usize, c: Elem) {
        let cols = self.cols;
        let (lo, hi) = self.data.split_at_mut(dst.max(src) * cols);
        let (d, s) = if dst > src {
            (&mut hi[..cols], &lo[src * cols..src * cols + cols])
        } else {
            (&mut lo[dst * cols..dst * cols + cols], &hi[..cols])
        };
        f.mul_add_slice(d, s, c);
    }

    /// Row vector `x` times this matrix.
    pub fn left_mul_vec(&self, f: &Field, x: &[Elem]) -> Vec<Elem> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            f.mul_add_slice(&mut out, self.row(r), xr);
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination, `None` if singular.
    pub fn inverse(&self, f: &Field) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col) != 0)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let scale = f.inv(a.get(col, col));
            f.scale_slice(&mut a.data[col * n..(col + 1) * n], scale);
            f.scale_slice(&mut inv.data[col * n..(col + 1) * n], scale);
            for r in 0..n {
                let c = a.get(r, col);
                if r != col && c != 0 {
                    a.row_mul_add(f, r, col, c);
                    inv.row_mul_add(f, r, col, c);
                }
            }
        }
        Some(inv)
    }
}

/// Row-echelon rank.
pub fn rank_gf(f: &Field, m: &Matrix) -> usize {
    let mut a = m.clone();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(pivot) = (rank..a.rows).find(|&r| a.get(r, col) != 0) else {
            continue;
        };
        a.swap_rows(rank, pivot);
        let inv = f.inv(a.get(rank, col));
        for r in rank + 1..a.rows {
            let c = a.get(r, col);
            if c != 0 {
                a.row_mul_add(f, r, rank, f.mul(c, inv));
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field::field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, n: usize, q: u32) -> Matrix {
        let mask = ((1u32 << q) - 1) as u16;
        Matrix::from_rows(
            (0..n)
                .map(|_| (0..n).map(|_| rng.random::<u16>() & mask).collect())
                .collect(),
        )
    }

    #[test]
    fn identity_rank() {
        let f = field(8).unwrap();
        assert_eq!(rank_gf(f, &Matrix::identity(5)), 5);
    }

    #[test]
    fn repeated_rows_rank_one() {
        let f = field(8).unwrap();
        let m = Matrix::from_rows(vec![vec![3, 7, 9]; 4]);
        assert_eq!(rank_gf(f, &m), 1);
        assert_eq!(rank_gf(f, &Matrix::zeros(3, 3)), 0);
    }

    #[test]
    fn random_square_is_full_rank() {
        let f = field(8).unwrap();
        let full = (0..100u64)
            .filter(|&seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rank_gf(f, &random(&mut rng, 16, 8)) == 16
            })
            .count();
        assert!(full >= 99, "{full} of 100 full rank");
    }

    #[test]
    fn inverse_round_trip() {
        let f = field(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random(&mut rng, 6, 16);
        let inv = m.inverse(f).unwrap();
        for r in 0..6 {
            let unit: Vec<Elem> = (0..6).map(|c| (c == r) as Elem).collect();
            assert_eq!(inv.left_mul_vec(f, m.row(r)), unit);
            assert_eq!(m.left_mul_vec(f, inv.row(r)), unit);
        }
        let singular = Matrix::from_rows(vec![vec![1, 2], vec![1, 2]]);
        assert!(singular.inverse(f).is_none());
    }
}
