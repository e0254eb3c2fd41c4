use std::ops::{Index, IndexMut};

use num_traits::Zero;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }
}

impl<T> Matrix<T> {
    /// Builds a matrix from its rows; `None` if the rows are not square.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(Matrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Matrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: PartialEq> Matrix<T> {
    /// First position `(i, j)` with `i < j` where `m[i][j] != m[j][i]`.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.dim)
            .flat_map(|i| (i + 1..self.dim).map(move |j| (i, j)))
            .find(|&(i, j)| self[(i, j)] != self[(j, i)])
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry().is_none()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}
