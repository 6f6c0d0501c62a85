//! Dense linear algebra over the prime field `F_p`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) && p < (1 << 31) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Primes in increasing order starting at 2.
pub fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&p| is_prime(p))
}

fn inverse(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// Row-major matrix with entries in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
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
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>], p: u64) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| x % p).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Applies the matrix to each row of `basis` viewed as a column vector;
    /// the images come back as rows.
    pub fn apply_rows(&self, basis: &Matrix, p: u64) -> Matrix {
        debug_assert_eq!(basis.cols, self.cols);
        let mut out = Matrix::zeros(basis.rows, self.rows);
        for b in 0..basis.rows {
            let v = basis.row(b);
            for r in 0..self.rows {
                let row = self.row(r);
                let mut acc = 0u64;
                for (x, y) in row.iter().zip(v) {
                    acc = (acc + x * y) % p;
                }
                out.set(b, r, acc);
            }
        }
        out
    }

    /// Stacks `self` above `other` (same column count).
    pub fn stack(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn rank(&self, p: u64) -> usize {
        let mut m = self.clone();
        m.row_reduce(p)
    }

    /// In-place reduced row-echelon form; returns the rank.
    pub fn row_reduce(&mut self, p: u64) -> usize {
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if pivot != rank {
                for c in 0..self.cols {
                    self.data.swap(pivot * self.cols + c, rank * self.cols + c);
                }
            }
            let inv = inverse(self.get(rank, col), p);
            for c in 0..self.cols {
                let v = self.get(rank, c) * inv % p;
                self.set(rank, c, v);
            }
            for r in 0..self.rows {
                if r == rank {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..self.cols {
                    let v = (self.get(r, c) + p - factor * self.get(rank, c) % p) % p;
                    self.set(r, c, v);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Gaussian binomial `[n choose k]_q`: the number of `k`-dimensional subspaces
/// of `F_q^n`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    num / den
}

/// All `k`-dimensional subspaces of `F_p^n`, each as its reduced row-echelon
/// basis (a `k × n` matrix), enumerated by pivot set and free entries.
pub fn subspaces(n: usize, k: usize, p: u64) -> Vec<Matrix> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // free slots: (row, col) with col > pivot[row] and col not a pivot
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let piv = &pivots;
                ((piv[r] + 1)..n)
                    .filter(move |c| !piv.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut values = vec![0u64; free.len()];
        loop {
            let mut m = Matrix::zeros(k, n);
            for (r, &c) in pivots.iter().enumerate() {
                m.set(r, c, 1);
            }
            for (&(r, c), &v) in free.iter().zip(&values) {
                m.set(r, c, v);
            }
            out.push(m);
            // odometer
            let mut i = 0;
            while i < values.len() {
                values[i] += 1;
                if values[i] < p {
                    break;
                }
                values[i] = 0;
                i += 1;
            }
            if i == values.len() {
                break;
            }
        }
        // next combination of pivot columns
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pivots[i] < n - k + i {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}
