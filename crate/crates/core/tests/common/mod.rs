//! Index-loop reference implementations and random instance generators.
#![allow(dead_code)]

use entwit::linalg::{c, ComplexMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Digits of `index` in the mixed radix `dims`, slot 0 most significant.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

pub fn index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let entries = (0..n * n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::from_entries(entries).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let m = random_matrix(rng, n);
    m.add(&m.adjoint()).unwrap().scale_real(0.5)
}

/// Random density matrix `G G^dagger / Tr`.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n);
    let m = g.matmul(&g.adjoint()).unwrap();
    let tr = m.trace().re;
    m.scale_real(1.0 / tr)
}

pub fn random_dims<R: Rng>(rng: &mut R, max_slots: usize) -> Vec<usize> {
    let n = rng.random_range(1..=max_slots);
    (0..n).map(|_| rng.random_range(2..=3)).collect()
}

pub fn random_subset<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.random_bool(0.5)).collect()
}

/// Fisher-Yates permutation of `0..n`.
pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

fn get(m: &ComplexMatrix, r: usize, col: usize) -> Complex64 {
    m.entries()[r * m.dim() + col]
}

/// Slot `k` of the input becomes slot `perm[k]` of the output.
pub fn permute_oracle(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> ComplexMatrix {
    let n = dims.len();
    let mut new_dims = vec![0; n];
    for k in 0..n {
        new_dims[perm[k]] = dims[k];
    }
    let dim = m.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for col in 0..dim {
            let (dr, dc) = (digits(r, dims), digits(col, dims));
            let mut nr = vec![0; n];
            let mut nc = vec![0; n];
            for k in 0..n {
                nr[perm[k]] = dr[k];
                nc[perm[k]] = dc[k];
            }
            out[index(&nr, &new_dims) * dim + index(&nc, &new_dims)] = get(m, r, col);
        }
    }
    ComplexMatrix::from_entries(out).unwrap()
}

/// `local` acting on `slots` of `full_dims`, identity elsewhere.
pub fn embed_oracle(
    local: &ComplexMatrix,
    local_dims: &[usize],
    slots: &[usize],
    full_dims: &[usize],
) -> ComplexMatrix {
    let dim: usize = full_dims.iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for col in 0..dim {
            let (dr, dc) = (digits(r, full_dims), digits(col, full_dims));
            let spectator_equal = (0..full_dims.len())
                .filter(|k| !slots.contains(k))
                .all(|k| dr[k] == dc[k]);
            if !spectator_equal {
                continue;
            }
            let lr: Vec<usize> = slots.iter().map(|&s| dr[s]).collect();
            let lc: Vec<usize> = slots.iter().map(|&s| dc[s]).collect();
            out[r * dim + col] = get(local, index(&lr, local_dims), index(&lc, local_dims));
        }
    }
    ComplexMatrix::from_entries(out).unwrap()
}

/// Sum over matching digits of the traced slots.
pub fn partial_trace_oracle(m: &ComplexMatrix, dims: &[usize], traced: &[usize]) -> ComplexMatrix {
    let kept: Vec<usize> = (0..dims.len()).filter(|k| !traced.contains(k)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kd: usize = kept_dims.iter().product();
    let td: usize = traced_dims.iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); kd * kd];
    for r in 0..kd {
        for col in 0..kd {
            let (kr, kc) = (digits(r, &kept_dims), digits(col, &kept_dims));
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..td {
                let tdig = digits(t, &traced_dims);
                let mut fr = vec![0; dims.len()];
                let mut fc = vec![0; dims.len()];
                for (i, &k) in kept.iter().enumerate() {
                    fr[k] = kr[i];
                    fc[k] = kc[i];
                }
                for (i, &k) in traced.iter().enumerate() {
                    fr[k] = tdig[i];
                    fc[k] = tdig[i];
                }
                acc += get(m, index(&fr, dims), index(&fc, dims));
            }
            out[r * kd + col] = acc;
        }
    }
    ComplexMatrix::from_entries(out).unwrap()
}

/// Row and column digits of `slots` exchanged.
pub fn partial_transpose_oracle(m: &ComplexMatrix, dims: &[usize], slots: &[usize]) -> ComplexMatrix {
    let dim = m.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for col in 0..dim {
            let (mut dr, mut dc) = (digits(r, dims), digits(col, dims));
            for &s in slots {
                std::mem::swap(&mut dr[s], &mut dc[s]);
            }
            out[index(&dr, dims) * dim + index(&dc, dims)] = get(m, r, col);
        }
    }
    ComplexMatrix::from_entries(out).unwrap()
}
