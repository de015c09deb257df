//! Operators on tensor-product spaces.
//!
//! Basis convention: slot 0 is the leftmost tensor factor and the most
//! significant digit of a flat basis index, so `|q0 q1 ... >` has index
//! `q0 * (d1 * d2 ...) + q1 * (d2 ...) + ...`.
//!
//! Permutation convention: `perm[old] = new`. The factor that sits at slot
//! `old` in the input sits at slot `perm[old]` in the output.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, MAX_DIM};

/// Ordered local dimensions of the tensor factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("no subsystems".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidShape(format!("local dimension {d} < 2")));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&t| t <= MAX_DIM);
        match total {
            Some(_) => Ok(Self { dims }),
            None => Err(Error::DimensionCap {
                dim: dims.iter().fold(1usize, |a, &d| a.saturating_mul(d)),
                cap: MAX_DIM,
            }),
        }
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Self {
        Self::new(vec![2; n]).expect("qubit shape within cap")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    pub fn repeat(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidShape("zero copies".into()));
        }
        Self::new(self.dims.repeat(k))
    }

    /// Place values of each digit, slot 0 most significant.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for s in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * self.dims[s + 1];
        }
        strides
    }

    /// Mixed-radix digits of a flat index.
    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.dims.len()];
        for s in (0..self.dims.len()).rev() {
            digits[s] = index % self.dims[s];
            index /= self.dims[s];
        }
        digits
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&q, &d)| acc * d + q)
    }

    fn check_slots(&self, slots: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.dims.len()];
        for &s in slots {
            if s >= self.dims.len() {
                return Err(Error::SlotOutOfRange {
                    slot: s,
                    slots: self.dims.len(),
                });
            }
            if seen[s] {
                return Err(Error::SlotCollision(s));
            }
            seen[s] = true;
        }
        Ok(())
    }
}

/// A dense operator tagged with the shape of its tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteOperator {
    matrix: ComplexMatrix,
    shape: SubsystemShape,
}

impl MultipartiteOperator {
    pub fn new(matrix: ComplexMatrix, shape: SubsystemShape) -> Result<Self> {
        if matrix.dim() != shape.total_dim() {
            return Err(Error::DimensionMismatch {
                op: "tag shape",
                left: matrix.dim(),
                right: shape.total_dim(),
            });
        }
        Ok(Self { matrix, shape })
    }

    pub fn qubits(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidShape(format!("{dim} is not a qubit register")));
        }
        let n = dim.trailing_zeros() as usize;
        Self::new(matrix, SubsystemShape::qubits(n))
    }

    pub fn identity(shape: SubsystemShape) -> Self {
        Self {
            matrix: ComplexMatrix::identity(shape.total_dim()),
            shape,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn num_slots(&self) -> usize {
        self.shape.len()
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.kron(&other.matrix),
            shape: self.shape.concat(&other.shape)?,
        })
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
            shape: self.shape.clone(),
        }
    }

    /// The `k`-fold tensor power; the output shape is `k` concatenated
    /// copies of the input shape.
    pub fn tensor_power(&self, k: usize) -> Result<Self> {
        let shape = self.shape.repeat(k)?;
        let mut matrix = self.matrix.clone();
        for _ in 1..k {
            matrix = matrix.kron(&self.matrix);
        }
        Ok(Self { matrix, shape })
    }

    /// Moves the factor at slot `old` to slot `perm[old]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let n = self.shape.len();
        if perm.len() != n {
            return Err(Error::InvalidPermutation(format!(
                "length {} for {} slots",
                perm.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidPermutation(format!(
                    "{perm:?} is not a bijection on 0..{n}"
                )));
            }
            seen[p] = true;
        }
        let mut new_dims = vec![0; n];
        for (old, &new) in perm.iter().enumerate() {
            new_dims[new] = self.shape.dims[old];
        }
        let new_shape = SubsystemShape::new(new_dims)?;
        let new_strides = new_shape.strides();

        let dim = self.matrix.dim();
        let index_map: Vec<usize> = (0..dim)
            .map(|idx| {
                self.shape
                    .decode(idx)
                    .iter()
                    .enumerate()
                    .map(|(old, &q)| q * new_strides[perm[old]])
                    .sum()
            })
            .collect();

        let mut out = ComplexMatrix::zeros(dim);
        for r in 0..dim {
            for col in 0..dim {
                out[(index_map[r], index_map[col])] = self.matrix[(r, col)];
            }
        }
        Ok(Self {
            matrix: out,
            shape: new_shape,
        })
    }

    /// Places `self` on `slots` of `full_shape` (in the order given) and the
    /// identity everywhere else.
    pub fn embed(&self, slots: &[usize], full_shape: &SubsystemShape) -> Result<Self> {
        if slots.len() != self.shape.len() {
            return Err(Error::InvalidShape(format!(
                "{} slots given for a {}-slot operator",
                slots.len(),
                self.shape.len()
            )));
        }
        full_shape.check_slots(slots)?;
        for (&slot, &local) in slots.iter().zip(&self.shape.dims) {
            let full = full_shape.dims[slot];
            if local != full {
                return Err(Error::SlotDimMismatch { slot, local, full });
            }
        }
        let rest: Vec<usize> = (0..full_shape.len()).filter(|s| !slots.contains(s)).collect();
        let padded = if rest.is_empty() {
            self.clone()
        } else {
            let rest_shape = SubsystemShape::new(rest.iter().map(|&s| full_shape.dims[s]).collect())?;
            self.kron(&Self::identity(rest_shape))?
        };
        let perm: Vec<usize> = slots.iter().chain(&rest).copied().collect();
        padded.permute_subsystems(&perm)
    }

    /// Traces out `traced_slots`; remaining slots keep their relative order.
    pub fn partial_trace(&self, traced_slots: &[usize]) -> Result<Self> {
        self.shape.check_slots(traced_slots)?;
        if traced_slots.len() == self.shape.len() {
            return Err(Error::TraceAllSlots);
        }
        if traced_slots.is_empty() {
            return Ok(self.clone());
        }
        let kept: Vec<usize> = (0..self.shape.len()).filter(|s| !traced_slots.contains(s)).collect();
        let kept_shape = SubsystemShape::new(kept.iter().map(|&s| self.shape.dims[s]).collect())?;
        let traced_shape = SubsystemShape::new(traced_slots.iter().map(|&s| self.shape.dims[s]).collect())?;

        let dim = self.matrix.dim();
        let mut kept_idx = vec![0; dim];
        let mut traced_idx = vec![0; dim];
        for idx in 0..dim {
            let digits = self.shape.decode(idx);
            kept_idx[idx] = kept_shape.encode(&kept.iter().map(|&s| digits[s]).collect::<Vec<_>>());
            traced_idx[idx] = traced_shape.encode(&traced_slots.iter().map(|&s| digits[s]).collect::<Vec<_>>());
        }

        let mut out = ComplexMatrix::zeros(kept_shape.total_dim());
        for r in 0..dim {
            for col in 0..dim {
                if traced_idx[r] == traced_idx[col] {
                    out[(kept_idx[r], kept_idx[col])] += self.matrix[(r, col)];
                }
            }
        }
        Ok(Self {
            matrix: out,
            shape: kept_shape,
        })
    }

    /// Transposes the row and column digits of `transposed_slots` only.
    pub fn partial_transpose(&self, transposed_slots: &[usize]) -> Result<Self> {
        self.shape.check_slots(transposed_slots)?;
        let strides = self.shape.strides();
        let dim = self.matrix.dim();
        let digits: Vec<Vec<usize>> = (0..dim).map(|i| self.shape.decode(i)).collect();
        let mut out = ComplexMatrix::zeros(dim);
        for r in 0..dim {
            for col in 0..dim {
                let (mut r2, mut c2) = (r, col);
                for &s in transposed_slots {
                    let (qr, qc) = (digits[r][s], digits[col][s]);
                    r2 = r2 - qr * strides[s] + qc * strides[s];
                    c2 = c2 - qc * strides[s] + qr * strides[s];
                }
                out[(r2, c2)] = self.matrix[(r, col)];
            }
        }
        Ok(Self {
            matrix: out,
            shape: self.shape.clone(),
        })
    }

    /// Checks Hermiticity, unit trace, and positivity within `tol`.
    pub fn validate_density(&self, tol: f64) -> Result<()> {
        let dev = self.matrix.hermiticity_deviation();
        if dev > tol {
            return Err(Error::InvalidState(format!("not Hermitian ({dev:.3e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = self.matrix.min_eigenvalue()?;
        if min < -tol.max(1e-9) {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).expect("square").re
    }
}
