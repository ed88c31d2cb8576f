use std::sync::Arc;

use super::{Matroid, MatroidError};
use crate::field::FieldSpec;
use crate::mask::{SubsetMask, MAX_GROUND_SIZE};

/// The column matroid of a matrix over GF(q).
///
/// The matrix as given is kept for export. Rank queries run against a
/// row-reduced copy with exactly `rank` rows; over GF(2) with at most 64
/// rows the columns are additionally packed into words.
#[derive(Clone, Debug)]
pub struct LinearMatroid {
    field: Arc<FieldSpec>,
    rows: Vec<Vec<u8>>,
    n: usize,
    dim: usize,
    columns: Vec<Vec<u8>>,
    packed: Option<Vec<u64>>,
}

impl LinearMatroid {
    pub fn new(field: Arc<FieldSpec>, rows: Vec<Vec<u8>>) -> Result<Self, MatroidError> {
        let n = rows.first().map_or(0, Vec::len);
        Self::with_size(field, rows, n)
    }

    /// Like [`new`](Self::new), with the column count given explicitly so that
    /// matrices with zero rows still carry a ground set.
    pub fn with_size(field: Arc<FieldSpec>, rows: Vec<Vec<u8>>, n: usize) -> Result<Self, MatroidError> {
        if n > MAX_GROUND_SIZE {
            return Err(MatroidError::SizeLimit { size: n, limit: MAX_GROUND_SIZE });
        }
        let q = field.order();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatroidError::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x as usize >= q) {
                return Err(MatroidError::InvalidMatrix(format!("entry {bad} in row {i} is not in GF({q})")));
            }
        }
        let reduced = row_reduce(&field, &rows, n);
        let dim = reduced.len();
        let columns: Vec<Vec<u8>> = (0..n).map(|j| reduced.iter().map(|r| r[j]).collect()).collect();
        let packed = (q == 2 && dim <= 64).then(|| {
            columns
                .iter()
                .map(|c| c.iter().enumerate().fold(0u64, |acc, (i, &x)| acc | ((x as u64) << i)))
                .collect()
        });
        Ok(LinearMatroid { field, rows, n, dim, columns, packed })
    }

    /// Builds from column vectors of length `dim`.
    pub fn from_columns(field: Arc<FieldSpec>, dim: usize, columns: &[Vec<u8>]) -> Result<Self, MatroidError> {
        let rows = (0..dim).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        Self::with_size(field, rows, columns.len())
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// The matrix rows as supplied at construction.
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Column `j` of the supplied matrix.
    pub fn column(&self, j: usize) -> Vec<u8> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Restriction to `keep`, as a new matrix with those columns in order.
    pub fn restrict(&self, keep: &SubsetMask) -> LinearMatroid {
        let rows = self
            .rows
            .iter()
            .map(|r| keep.iter().map(|j| r[j]).collect())
            .collect();
        LinearMatroid::with_size(self.field.clone(), rows, keep.len()).expect("restriction of a valid matrix")
    }

    fn rank_packed(&self, packed: &[u64], set: &SubsetMask) -> usize {
        // XOR basis keyed by lowest set bit.
        let mut by_pivot = [0u64; 64];
        let mut rank = 0;
        for e in set.iter() {
            let mut v = packed[e];
            while v != 0 {
                let p = v.trailing_zeros() as usize;
                if by_pivot[p] == 0 {
                    by_pivot[p] = v;
                    rank += 1;
                    break;
                }
                v ^= by_pivot[p];
            }
            if rank == self.dim {
                break;
            }
        }
        rank
    }

    /// Echelon basis of the columns in `set`: rows normalized to a leading 1.
    fn echelon(&self, set: &SubsetMask) -> (Vec<Vec<u8>>, Vec<usize>) {
        let f = &*self.field;
        let mut basis: Vec<Vec<u8>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        let mut buf = vec![0u8; self.dim];
        for e in set.iter() {
            buf.copy_from_slice(&self.columns[e]);
            reduce(f, &mut buf, &basis, &pivots);
            if let Some(p) = buf.iter().position(|&x| x != 0) {
                let s = f.inv(buf[p]);
                for x in buf.iter_mut() {
                    *x = f.mul(*x, s);
                }
                basis.push(buf.clone());
                pivots.push(p);
                if basis.len() == self.dim {
                    break;
                }
            }
        }
        (basis, pivots)
    }
}

fn reduce(f: &FieldSpec, v: &mut [u8], basis: &[Vec<u8>], pivots: &[usize]) {
    for (row, &p) in basis.iter().zip(pivots) {
        let c = v[p];
        if c != 0 {
            let factor = f.neg(c);
            for (x, &b) in v.iter_mut().zip(row) {
                if b != 0 {
                    *x = f.add(*x, f.mul(factor, b));
                }
            }
        }
    }
}

/// Nonzero rows of a row echelon form of `rows`.
fn row_reduce(f: &FieldSpec, rows: &[Vec<u8>], n: usize) -> Vec<Vec<u8>> {
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let mut out = Vec::new();
    for col in 0..n {
        let Some(pos) = m.iter().position(|r| r[col] != 0) else {
            continue;
        };
        let mut pivot = m.swap_remove(pos);
        let s = f.inv(pivot[col]);
        for x in pivot.iter_mut() {
            *x = f.mul(*x, s);
        }
        for r in m.iter_mut() {
            let c = r[col];
            if c != 0 {
                let factor = f.neg(c);
                for (x, &b) in r.iter_mut().zip(&pivot) {
                    *x = f.add(*x, f.mul(factor, b));
                }
            }
        }
        out.push(pivot);
    }
    out
}

impl Matroid for LinearMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn rank(&self, set: &SubsetMask) -> usize {
        if self.dim == 0 {
            return 0;
        }
        match &self.packed {
            Some(p) => self.rank_packed(p, set),
            None => self.echelon(set).0.len(),
        }
    }

    fn full_rank(&self) -> usize {
        self.dim
    }

    fn closure(&self, set: &SubsetMask) -> SubsetMask {
        let (basis, pivots) = self.echelon(set);
        if basis.len() == self.dim {
            return self.ground_set();
        }
        let f = &*self.field;
        let mut out = set.clone();
        let mut buf = vec![0u8; self.dim];
        for e in 0..self.n {
            if set.contains(e) {
                continue;
            }
            buf.copy_from_slice(&self.columns[e]);
            reduce(f, &mut buf, &basis, &pivots);
            if buf.iter().all(|&x| x == 0) {
                out.insert(e);
            }
        }
        out
    }
}
