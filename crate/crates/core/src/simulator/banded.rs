//! Banded matrix storage and LU factorization with partial pivoting.

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals. Rows store
/// `kl` extra columns on the right for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let lo = i as isize - self.kl as isize;
        let off = j as isize - lo;
        (off >= 0 && (off as usize) < self.width).then(|| i * self.width + off as usize)
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.n || j >= self.n {
            return 0.0;
        }
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)`, which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            i < self.n && j < self.n && self.in_band(i, j),
            "entry ({i}, {j}) outside the band"
        );
        let s = self.slot(i, j).expect("in-band slot");
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (a, b) = (i.saturating_sub(self.kl), (i + self.ku).min(self.n - 1));
                (a..=b).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Factorizes in place; the result solves `A x = b`.
    pub fn factorize(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut pivots = vec![0usize; n];
        let mut lower = vec![0.0; n * kl.max(1)];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for r in k + 1..=last_row {
                let v = self.get(r, k).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Numeric(format!(
                    "singular band matrix at column {k}"
                )));
            }
            pivots[k] = p;
            if p != k {
                for c in k..=last_col {
                    let (sk, sp) = (
                        self.slot(k, c).expect("pivot row slot"),
                        self.slot(p, c).expect("pivot row slot"),
                    );
                    self.data.swap(sk, sp);
                }
            }
            let pivot = self.get(k, k);
            for r in k + 1..=last_row {
                let sr = self.slot(r, k).expect("sub-diagonal slot");
                let f = self.data[sr] / pivot;
                self.data[sr] = 0.0;
                lower[k * kl + (r - k - 1)] = f;
                if f != 0.0 {
                    for c in k + 1..=last_col {
                        let v = self.get(k, c);
                        if v != 0.0 {
                            let s = self.slot(r, c).expect("fill-in slot");
                            self.data[s] -= f * v;
                        }
                    }
                }
            }
        }
        Ok(BandLu {
            u: self,
            lower,
            pivots,
        })
    }
}

/// LU factors of a [`BandMatrix`].
#[derive(Debug, Clone)]
pub struct BandLu {
    u: BandMatrix,
    lower: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl, ku) = (self.u.n, self.u.kl, self.u.ku);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                x[r] -= self.lower[k * kl + (r - k - 1)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for c in k + 1..=(k + ku + kl).min(n - 1) {
                acc -= self.u.get(k, c) * x[c];
            }
            x[k] = acc / self.u.get(k, k);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    use super::*;

    fn random_band(n: usize, kl: usize, ku: usize, vals: &[f64]) -> BandMatrix {
        let mut m = BandMatrix::zeros(n, kl, ku);
        let mut it = vals.iter().cycle();
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                m.add(i, j, *it.next().unwrap());
            }
        }
        m
    }

    proptest! {
        #[test]
        fn solve_matches_dense_lu(
            n in 1usize..40, kl in 0usize..6, ku in 0usize..6,
            vals in prop::collection::vec(-1.0f64..1.0, 64),
            rhs in prop::collection::vec(-1.0f64..1.0, 40)
        ) {
            let m = random_band(n, kl, ku, &vals);
            let dense = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
            let b = DVector::from_column_slice(&rhs[..n]);
            let Some(reference) = dense.clone().lu().solve(&b) else { return Ok(()); };
            prop_assume!(dense.clone().svd(false, false).singular_values.min() > 1e-6);
            let x = m.factorize().unwrap().solve(&rhs[..n]);
            for i in 0..n {
                prop_assert!((x[i] - reference[i]).abs() <= 1e-8 * (1.0 + reference.amax()), "{} vs {}", x[i], reference[i]);
            }
        }
    }

    #[test]
    fn needs_pivoting() {
        // Zero leading diagonal entry forces a row swap.
        let mut m = BandMatrix::zeros(3, 1, 1);
        for (i, j, v) in [
            (0, 1, 1.0),
            (1, 0, 2.0),
            (1, 1, 1.0),
            (1, 2, 1.0),
            (2, 1, 1.0),
            (2, 2, 3.0),
        ] {
            m.add(i, j, v);
        }
        let b = m.mul_vec(&[1.0, 2.0, 3.0]);
        let x = m.factorize().unwrap().solve(&b);
        for (a, e) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - e).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_is_reported() {
        let m = BandMatrix::zeros(4, 1, 1);
        assert!(m.factorize().is_err());
    }
}
