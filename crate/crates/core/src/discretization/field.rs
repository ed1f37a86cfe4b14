use std::sync::Arc;

use crate::discretization::Grid;
use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Real samples on the nodes of a [`Grid`].
#[derive(Debug, Clone)]
pub struct Field<T> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn new(grid: Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite field value".into()));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: Arc<Grid<T>>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<Grid<T>>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![T::zero(); n] }
    }

    /// Samples `f(x, |x|)` at every node, including the Dirichlet layer.
    pub fn from_fn(grid: Arc<Grid<T>>, f: impl Fn([T; 3], T) -> T) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i), grid.radius()[i])).collect();
        Self { grid, values }
    }

    /// Samples a radial profile `f(|x|)`.
    pub fn radial_fn(grid: Arc<Grid<T>>, f: impl Fn(T) -> T) -> Self {
        let values = grid.radius().iter().map(|&r| f(r)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same values with the Dirichlet layer set to zero.
    pub fn with_dirichlet(mut self) -> Self {
        for (v, &f) in self.values.iter_mut().zip(self.grid.free()) {
            if !f {
                *v = T::zero();
            }
        }
        self
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `max_i |u_i|`.
    pub fn sup_norm(&self) -> T {
        crate::real::max_abs(&self.values)
    }

    /// Discrete `L^2` norm.
    pub fn l2_norm(&self) -> T {
        let w = self.grid.weights();
        self.values.iter().zip(w).map(|(&v, &wi)| wi * v * v).sum::<T>().sqrt()
    }

    /// Converts into another precision on a freshly built grid of the same shape.
    pub fn cast<U: Real>(&self) -> Result<Field<U>> {
        let g = &self.grid;
        let k: U = lit(crate::real::to_f64(g.k()));
        let grid = match g.kind() {
            super::GridKind::Radial => Grid::radial(k, g.n())?,
            super::GridKind::Box3d => Grid::box3d(k, g.n())?,
        };
        let values = self.values.iter().map(|&v| lit(crate::real::to_f64(v))).collect();
        Ok(Field { grid: Arc::new(grid), values })
    }
}
