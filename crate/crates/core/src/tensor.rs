//! Dense m-way arrays in row-major order.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, DENSE_CAP};

/// A dense m-way array of `f64` with row-major layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Result<Self> {
        let size = checked_size(shape)?;
        Ok(Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; size],
        })
    }

    pub fn from_data(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let size = checked_size(shape)?;
        if data.len() != size {
            return Err(Error::InvalidPermutation(alloc::format!(
                "data length {} does not match shape product {}",
                data.len(),
                size
            )));
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    /// Builds the tensor entry by entry from a multi-index function.
    pub fn build(shape: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = Tensor::zeros(shape)?;
        let mut idx = vec![0usize; shape.len()];
        for flat in 0..t.data.len() {
            t.data[flat] = f(&idx);
            increment(&mut idx, shape);
        }
        Ok(t)
    }

    pub fn arity(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut flat = 0;
        for (i, &k) in idx.iter().enumerate() {
            debug_assert!(k < self.shape[i]);
            flat = flat * self.shape[i] + k;
        }
        flat
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let flat = self.flat_index(idx);
        self.data[flat] = value;
    }

    /// Iterates over all multi-indices paired with values.
    pub fn iter_indexed(&self) -> IndexedIter<'_> {
        IndexedIter {
            tensor: self,
            idx: vec![0; self.shape.len()],
            flat: 0,
        }
    }

    /// Sum of entrywise products. Shapes must match.
    pub fn dot(&self, other: &Tensor) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Pushforward under the cyclic index shift: the entry at
    /// `(i_0, ..., i_{m-1})` moves to `(i_1, ..., i_{m-1}, i_0)`.
    pub fn cyclic_shift(&self) -> Result<Tensor> {
        if self.shape.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::HeterogeneousSupports {
                sizes: self.shape.clone(),
            });
        }
        let mut out = Tensor::zeros(&self.shape)?;
        let mut target = vec![0usize; self.arity()];
        for (idx, v) in self.iter_indexed() {
            let m = idx.len();
            for k in 0..m {
                target[k] = idx[(k + 1) % m];
            }
            let flat = out.flat_index(&target);
            out.data[flat] = v;
        }
        Ok(out)
    }

    pub fn check_finite(&self) -> Result<()> {
        for (i, &v) in self.data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { index: i, value: v });
            }
        }
        Ok(())
    }
}

pub struct IndexedIter<'a> {
    tensor: &'a Tensor,
    idx: Vec<usize>,
    flat: usize,
}

impl<'a> Iterator for IndexedIter<'a> {
    type Item = (Vec<usize>, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.flat >= self.tensor.data.len() {
            return None;
        }
        let item = (self.idx.clone(), self.tensor.data[self.flat]);
        increment(&mut self.idx, &self.tensor.shape);
        self.flat += 1;
        Some(item)
    }
}

fn increment(idx: &mut [usize], shape: &[usize]) {
    for ax in (0..idx.len()).rev() {
        idx[ax] += 1;
        if idx[ax] < shape[ax] {
            return;
        }
        idx[ax] = 0;
    }
}

fn checked_size(shape: &[usize]) -> Result<usize> {
    let mut size = 1usize;
    for &s in shape {
        size = size.checked_mul(s).ok_or(Error::SizeCapExceeded {
            size: usize::MAX,
            cap: DENSE_CAP,
        })?;
    }
    if size > DENSE_CAP {
        return Err(Error::SizeCapExceeded {
            size,
            cap: DENSE_CAP,
        });
    }
    Ok(size)
}
