use num_traits::Float;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};


use super::RngStream;
use crate::C64;

/// Dense column-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: alloc::vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Builds a matrix from its columns; all columns must have equal length.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
        Self {
            rows,
            cols: columns.len(),
            data: columns.iter().flatten().copied().collect(),
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// i.i.d. CN(0, `variance`) entries, drawn column by column.
    pub fn gaussian(rows: usize, cols: usize, variance: f64, rng: &mut RngStream) -> Self {
        let mut m = Self::zeros(rows, cols);
        rng.fill_complex_gaussian(&mut m.data, variance);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&mut self, c: f64) {
        for z in &mut self.data {
            *z *= c;
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let dst = j * self.rows;
            for k in 0..self.cols {
                let b = rhs[(k, j)];
                if b == C64::new(0.0, 0.0) {
                    continue;
                }
                for (o, a) in out.data[dst..dst + self.rows].iter_mut().zip(self.col(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^T x` (plain transpose, no conjugation).
    pub fn transpose_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.rows, x.len());
        (0..self.cols).map(|j| dot(self.col(j), x)).collect()
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[j * self.rows + i]
    }
}

/// `a^T b`.
#[inline]
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a^H b`.
#[inline]
pub fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[inline]
pub fn norm(a: &[C64]) -> f64 {
    Float::sqrt(norm_sqr(a))
}
