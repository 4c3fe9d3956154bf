//! Gamma matrices `γ^1, ..., γ^d` of size `2^{⌊d/2⌋}` with exact Gaussian
//! integer entries, built recursively in the dimension.

use crate::error::{LabError, Result};
use num_complex::Complex;
use std::ops::Mul;

pub type Gaussian = Complex<i64>;

/// A square matrix over the Gaussian integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    pub n: usize,
    pub data: Vec<Gaussian>,
}

impl ExactMatrix {
    pub fn zeros(n: usize) -> Self {
        ExactMatrix { n, data: vec![Gaussian::new(0, 0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Gaussian::new(1, 0);
        }
        m
    }

    pub fn from_rows(rows: &[&[Gaussian]]) -> Self {
        let n = rows.len();
        ExactMatrix { n, data: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> Gaussian {
        self.data[i * self.n + j]
    }

    pub fn scale(&self, c: Gaussian) -> Self {
        ExactMatrix { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        ExactMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    /// `[[a, b], [c, d]]` from four blocks of equal size.
    pub fn blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let k = a.n;
        let mut m = Self::zeros(2 * k);
        for i in 0..k {
            for j in 0..k {
                m.data[i * 2 * k + j] = a.get(i, j);
                m.data[i * 2 * k + j + k] = b.get(i, j);
                m.data[(i + k) * 2 * k + j] = c.get(i, j);
                m.data[(i + k) * 2 * k + j + k] = d.get(i, j);
            }
        }
        m
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == Gaussian::new(0, 0)))
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;

    fn mul(self, o: &ExactMatrix) -> ExactMatrix {
        let n = self.n;
        let mut m = ExactMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Gaussian::new(0, 0) {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * o.get(k, j);
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaSet {
    pub d: usize,
    pub matrices: Vec<ExactMatrix>,
}

impl GammaSet {
    pub fn size(&self) -> usize {
        self.matrices[0].n
    }

    /// Checks `γ^i γ^j + γ^j γ^i = 2δ^{ij} I` for every pair, exactly.
    pub fn anticommutation_holds(&self) -> bool {
        let n = self.size();
        let two_id = ExactMatrix::identity(n).scale(Gaussian::new(2, 0));
        let zero = ExactMatrix::zeros(n);
        for (i, a) in self.matrices.iter().enumerate() {
            for (j, b) in self.matrices.iter().enumerate() {
                let s = (a * b).add(&(b * a));
                if s != if i == j { two_id.clone() } else { zero.clone() } {
                    return false;
                }
            }
        }
        true
    }
}

/// `γ^j_d`: for even `d` the blocks `[[0, iγ^j_{d-1}], [-iγ^j_{d-1}, 0]]`
/// (`j < d`) and `[[0, I], [I, 0]]`; for odd `d` the matrices of `d - 1` and
/// `γ^d = (-i)^{(d-1)/2} γ^1 ⋯ γ^{d-1}`. The case `d = 2` starts from the
/// scalar `γ^1_1 = 1`.
pub fn gamma_matrices(d: usize) -> Result<GammaSet> {
    if !(2..=10).contains(&d) {
        return Err(LabError::InvalidParameter(format!("gamma matrices are built for 2 <= d <= 10, got {d}")));
    }
    let i = Gaussian::new(0, 1);
    let mut current = vec![ExactMatrix::identity(1)];
    for dim in 2..=d {
        if dim % 2 == 0 {
            let k = current[0].n;
            let z = ExactMatrix::zeros(k);
            let id = ExactMatrix::identity(k);
            let mut next: Vec<ExactMatrix> = current
                .iter()
                .map(|g| ExactMatrix::blocks(&z, &g.scale(i), &g.scale(-i), &z))
                .collect();
            next.push(ExactMatrix::blocks(&z, &id, &id, &z));
            current = next;
        } else {
            let mut prod = ExactMatrix::identity(current[0].n);
            for g in &current {
                prod = &prod * g;
            }
            let phase = (0..(dim - 1) / 2).fold(Gaussian::new(1, 0), |acc, _| acc * -i);
            current.push(prod.scale(phase));
        }
    }
    Ok(GammaSet { d, matrices: current })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> Gaussian {
        Gaussian::new(re, im)
    }

    #[test]
    fn low_dimensional_examples() {
        let s = gamma_matrices(2).unwrap();
        assert_eq!(s.matrices[0], ExactMatrix::from_rows(&[&[g(0, 0), g(0, 1)], &[g(0, -1), g(0, 0)]]));
        assert_eq!(s.matrices[1], ExactMatrix::from_rows(&[&[g(0, 0), g(1, 0)], &[g(1, 0), g(0, 0)]]));
        let s = gamma_matrices(3).unwrap();
        assert_eq!(s.matrices[2], ExactMatrix::from_rows(&[&[g(1, 0), g(0, 0)], &[g(0, 0), g(-1, 0)]]));
        assert!(gamma_matrices(1).is_err() && gamma_matrices(11).is_err());
    }

    #[test]
    fn anticommutation_and_sizes() {
        for d in 2..=10 {
            let s = gamma_matrices(d).unwrap();
            assert_eq!(s.matrices.len(), d);
            assert_eq!(s.size(), 1 << (d / 2));
            assert!(s.anticommutation_holds(), "d = {d}");
            if d % 2 == 1 {
                let top = &s.matrices[d - 1];
                assert!(top.is_diagonal());
                assert!((0..top.n).all(|k| top.get(k, k) == g(1, 0) || top.get(k, k) == g(-1, 0)));
            }
        }
    }
}
