use serde_json::Value;

use crate::ring::{RingError, Scalar};

/// Dense rank-k array of Scalars, axis 0 most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    pub d: u32,
    pub rank: usize,
    pub data: Vec<Scalar>,
}

impl Tensor {
    pub fn zeros(d: u32, rank: usize) -> Self {
        Tensor { d, rank, data: vec![Scalar::zero(d); (d as usize).pow(rank as u32)] }
    }

    pub fn from_scalar(s: Scalar) -> Self {
        Tensor { d: s.d(), rank: 0, data: vec![s] }
    }

    /// The basis tensor |i₀ i₁ …⟩.
    pub fn basis(d: u32, idx: &[u32]) -> Self {
        let mut t = Self::zeros(d, idx.len());
        let pos = t.offset(idx);
        t.data[pos] = Scalar::one(d);
        t
    }

    pub fn from_fn(d: u32, rank: usize, mut f: impl FnMut(&[u32]) -> Scalar) -> Self {
        let mut t = Self::zeros(d, rank);
        for pos in 0..t.data.len() {
            t.data[pos] = f(&t.index(pos));
        }
        t
    }

    pub fn offset(&self, idx: &[u32]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.d as usize + i as usize)
    }

    pub fn index(&self, mut pos: usize) -> Vec<u32> {
        let mut idx = vec![0; self.rank];
        for k in (0..self.rank).rev() {
            idx[k] = (pos % self.d as usize) as u32;
            pos /= self.d as usize;
        }
        idx
    }

    pub fn get(&self, idx: &[u32]) -> &Scalar {
        &self.data[self.offset(idx)]
    }

    /// The single entry of a rank-0 tensor.
    pub fn scalar(&self) -> Scalar {
        assert_eq!(self.rank, 0, "scalar() on a rank-{} tensor", self.rank);
        self.data[0].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.is_zero())
    }

    pub fn scale(&self, s: &Scalar) -> Tensor {
        Tensor { d: self.d, rank: self.rank, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// New axis i is old axis `order[i]`.
    pub fn permute_axes(&self, order: &[usize]) -> Tensor {
        Tensor::from_fn(self.d, self.rank, |idx| {
            let mut old = vec![0; self.rank];
            for (i, &o) in order.iter().enumerate() {
                old[o] = idx[i];
            }
            self.get(&old).clone()
        })
    }

    /// Entrywise product.
    pub fn hadamard_product(&self, other: &Tensor) -> Tensor {
        Tensor { d: self.d, rank: self.rank, data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect() }
    }

    /// Matrix entry with the first `n_in` axes as column index and the rest as row.
    pub fn matrix_entry(&self, n_in: usize, row: usize, col: usize) -> &Scalar {
        let n_out = self.rank - n_in;
        &self.data[col * (self.d as usize).pow(n_out as u32) + row]
    }

    /// The q with q·self = other, checked on every entry.
    pub fn proportional(&self, other: &Tensor) -> Option<Scalar> {
        if self.rank != other.rank || self.d != other.d {
            return None;
        }
        let q = match self.data.iter().position(|s| !s.is_zero()) {
            Some(p) => self.data[p].proportional(&other.data[p])?,
            None => return other.is_zero().then(|| Scalar::one(self.d)),
        };
        self.data.iter().zip(&other.data).all(|(a, b)| &(a * &q) == b).then_some(q)
    }

    /// Sum of two tensors; fails if an entry mixes half-power parities.
    pub fn checked_add(&self, other: &Tensor) -> Result<Tensor, RingError> {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.checked_add(b)).collect::<Result<_, _>>()?;
        Ok(Tensor { d: self.d, rank: self.rank, data })
    }

    /// Nested JSON arrays by axis, Scalar objects at the leaves.
    pub fn to_json(&self) -> Value {
        fn build(t: &Tensor, prefix: &mut Vec<u32>) -> Value {
            if prefix.len() == t.rank {
                return serde_json::to_value(t.get(prefix)).expect("scalar serializes");
            }
            let mut out = Vec::new();
            for i in 0..t.d {
                prefix.push(i);
                out.push(build(t, prefix));
                prefix.pop();
            }
            Value::Array(out)
        }
        build(self, &mut Vec::new())
    }
}
