//! Chebyshev–Lobatto collocation on `[-1, 1]`: nodes, differentiation
//! matrices, the values-to-coefficients cosine transform and barycentric
//! interpolation.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Nodes `l_j = cos(jπ/n)`, `j = 0..=n`, with first and second derivative matrices.
#[derive(Debug, Clone)]
pub struct ChebGrid {
    n: usize,
    points: Vec<f64>,
    d1: DenseMatrix<f64>,
    d2: DenseMatrix<f64>,
}

impl ChebGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDegree(n));
        }
        let points = lobatto_points(n);
        let d1 = first_derivative_matrix(n);
        let mut d2 = d1.matmul(&d1);
        negative_sum_diagonal(&mut d2);
        Ok(ChebGrid { n, points, d1, d2 })
    }

    /// Polynomial degree; the grid has `n + 1` points.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn d1(&self) -> &DenseMatrix<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &DenseMatrix<f64> {
        &self.d2
    }

    /// Barycentric interpolation of nodal `values` at `l` in `[-1, 1]`.
    pub fn eval_at(&self, values: &[C64], l: f64) -> Result<C64> {
        if !(-1.0..=1.0).contains(&l) {
            return Err(Error::OutOfInterval(l));
        }
        self.eval_complex(values, C64::new(l, 0.0))
    }

    /// Evaluates the interpolating polynomial at a complex argument.
    ///
    /// Off the real interval this is the analytic continuation of the
    /// interpolant; callers are responsible for staying close to `[-1, 1]`.
    pub fn eval_complex(&self, values: &[C64], l: C64) -> Result<C64> {
        self.check_len(values.len())?;
        let mut num = C64::new(0.0, 0.0);
        let mut den = C64::new(0.0, 0.0);
        for (j, (&xj, &fj)) in self.points.iter().zip(values).enumerate() {
            let diff = l - xj;
            if diff.re == 0.0 && diff.im == 0.0 {
                return Ok(fj);
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == self.n {
                w *= 0.5;
            }
            let t = diff.inv() * w;
            num += t * fj;
            den += t;
        }
        Ok(num / den)
    }

    /// Chebyshev coefficients of the interpolant through nodal `values`.
    pub fn to_coeffs(&self, values: &[C64]) -> Result<ChebCoeffs> {
        self.check_len(values.len())?;
        let n = self.n;
        let cos_table = cos_table(n);
        let coeffs = (0..=n)
            .map(|m| {
                let pm = if m == 0 || m == n { 2.0 } else { 1.0 };
                let sum: C64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let pj = if j == 0 || j == n { 0.5 } else { 1.0 };
                        v * (pj * cos_table[(m * j) % (2 * n)])
                    })
                    .sum();
                sum * (2.0 / (n as f64 * pm))
            })
            .collect();
        Ok(ChebCoeffs { coeffs })
    }

    /// Nodal values of `Σ c_m T_m`.
    pub fn from_coeffs(&self, coeffs: &ChebCoeffs) -> Result<Vec<C64>> {
        self.check_len(coeffs.coeffs.len())?;
        let n = self.n;
        let cos_table = cos_table(n);
        Ok((0..=n)
            .map(|j| {
                coeffs
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, &c)| c * cos_table[(m * j) % (2 * n)])
                    .sum()
            })
            .collect())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                actual: len,
            });
        }
        Ok(())
    }
}

/// `cos(kπ/n)` for `k = 0..2n`, built from the symmetric sine form so that
/// `cos(π/2)` and friends come out exact.
fn cos_table(n: usize) -> Vec<f64> {
    (0..2 * n)
        .map(|k| {
            let k = k as f64;
            (PI * (n as f64 - 2.0 * k) / (2.0 * n as f64)).sin()
        })
        .collect()
}

fn lobatto_points(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| (PI * (n as f64 - 2.0 * j as f64) / (2.0 * n as f64)).sin())
        .collect()
}

fn first_derivative_matrix(n: usize) -> DenseMatrix<f64> {
    let np1 = n + 1;
    let nf = n as f64;
    let c = |i: usize| {
        let base = if i == 0 || i == n { 2.0 } else { 1.0 };
        if i % 2 == 0 {
            base
        } else {
            -base
        }
    };
    let mut d = DenseMatrix::from_fn(np1, np1, |i, j| {
        if i == j {
            return 0.0;
        }
        // l_i − l_j = 2 sin((i+j)π/2n) sin((j−i)π/2n)
        let diff = 2.0
            * ((i + j) as f64 * PI / (2.0 * nf)).sin()
            * ((j as f64 - i as f64) * PI / (2.0 * nf)).sin();
        c(i) / c(j) / diff
    });
    negative_sum_diagonal(&mut d);
    d
}

fn negative_sum_diagonal(d: &mut DenseMatrix<f64>) {
    for i in 0..d.rows() {
        let off = compensated_sum(d.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
        d[(i, i)] = -off;
    }
}

/// Neumaier summation.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChebCoeffs {
    pub coeffs: Vec<C64>,
}

impl ChebCoeffs {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn abs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Clenshaw evaluation of `Σ c_m T_m(l)`.
    pub fn eval(&self, l: f64) -> C64 {
        let mut b1 = C64::new(0.0, 0.0);
        let mut b2 = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * l) - b2;
            b2 = b1;
            b1 = b0;
        }
        match self.coeffs.first() {
            Some(&c0) => c0 + b1 * l - b2,
            None => C64::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayDiagnostic {
    /// Smallest `m` with `max_{k≥m} |c_k| ≤ 10·floor`.
    pub saturation_index: usize,
    /// Largest `|c_k|` over the trailing 10% of the coefficients.
    pub floor: f64,
}

pub fn decay_diagnostic(coeffs: &ChebCoeffs) -> DecayDiagnostic {
    let a = coeffs.abs();
    if a.is_empty() {
        return DecayDiagnostic {
            saturation_index: 0,
            floor: 0.0,
        };
    }
    let tail = ((a.len() as f64) * 0.1).ceil().max(1.0) as usize;
    let floor = a[a.len() - tail..].iter().copied().fold(0.0, f64::max);
    let threshold = 10.0 * floor;
    let mut saturation_index = a.len();
    let mut running = 0.0f64;
    for m in (0..a.len()).rev() {
        running = running.max(a[m]);
        if running <= threshold {
            saturation_index = m;
        } else {
            break;
        }
    }
    DecayDiagnostic {
        saturation_index,
        floor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn real(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn points_small_grids() {
        let g = ChebGrid::new(2).unwrap();
        assert_eq!(g.points(), &[1.0, 0.0, -1.0]);
        let g = ChebGrid::new(7).unwrap();
        assert_eq!(g.points()[0], 1.0);
        assert_eq!(g.points()[7], -1.0);
        assert!(g.points().windows(2).all(|w| w[0] > w[1]));
        assert_eq!(ChebGrid::new(0).unwrap_err(), Error::InvalidDegree(0));
    }

    #[test]
    fn degree_one_matrix() {
        let g = ChebGrid::new(1).unwrap();
        assert_eq!(g.d1().as_slice(), &[0.5, -0.5, 0.5, -0.5]);
    }

    #[test]
    fn cubic_derivative_exact() {
        let g = ChebGrid::new(8).unwrap();
        let u: Vec<f64> = g.points().iter().map(|l| l * l * l).collect();
        let du = g.d1().mul_vec(&u);
        for (d, l) in du.iter().zip(g.points()) {
            assert!((d - 3.0 * l * l).abs() <= 1e-12);
        }
    }

    #[test]
    fn row_sums_vanish() {
        for n in [1, 2, 4, 8, 16, 20, 32] {
            let g = ChebGrid::new(n).unwrap();
            for i in 0..=n {
                let s: f64 = g.d1().row(i).iter().sum();
                assert!(s.abs() <= 1e-13, "n={n} row {i}: {s}");
            }
        }
    }

    #[test]
    fn row_sums_vanish_to_rounding_for_large_n() {
        for n in [64, 128, 256, 512] {
            let g = ChebGrid::new(n).unwrap();
            for d in [g.d1(), g.d2()] {
                for i in 0..=n {
                    let row = d.row(i);
                    let s = compensated_sum(row.iter().copied());
                    let scale: f64 = row.iter().map(|x| x.abs()).sum();
                    assert!(s.abs() <= f64::EPSILON * scale, "n={n} row {i}: {s} vs {scale}");
                }
            }
        }
    }

    #[test]
    fn transform_examples() {
        let g = ChebGrid::new(8).unwrap();
        let t3: Vec<f64> = g.points().iter().map(|l| 4.0 * l * l * l - 3.0 * l).collect();
        let c = g.to_coeffs(&real(&t3)).unwrap();
        for (m, cm) in c.coeffs.iter().enumerate() {
            let expected = if m == 3 { 1.0 } else { 0.0 };
            assert!((cm - expected).norm() <= 1e-14, "m={m}: {cm}");
        }
        let ones = g.to_coeffs(&real(&[1.0; 9])).unwrap();
        assert!((ones.coeffs[0] - 1.0).norm() <= 1e-15);
        assert!(ones.coeffs[1..].iter().all(|c| c.norm() <= 1e-15));
        assert!(g.to_coeffs(&real(&[1.0; 4])).is_err());
    }

    #[test]
    fn exp_coefficients_and_clenshaw() {
        let g = ChebGrid::new(20).unwrap();
        let vals: Vec<f64> = g.points().iter().map(|l| l.exp()).collect();
        let c = g.to_coeffs(&real(&vals)).unwrap();
        assert!(c.coeffs[20].norm() <= 1e-15);
        let back = g.from_coeffs(&c).unwrap();
        for (b, v) in back.iter().zip(&vals) {
            assert!((b - v).norm() <= 1e-13 * v.abs());
        }
        for k in 0..50 {
            let l = -1.0 + 2.0 * (k as f64 + 0.37) / 50.0;
            assert!((c.eval(l) - l.exp()).norm() <= 1e-13);
        }
    }

    #[test]
    fn barycentric_examples() {
        let g = ChebGrid::new(6).unwrap();
        let sq: Vec<f64> = g.points().iter().map(|l| l * l).collect();
        assert!((g.eval_at(&real(&sq), 0.5).unwrap() - 0.25).norm() <= 1e-14);
        for (k, &p) in g.points().iter().enumerate() {
            assert_eq!(g.eval_at(&real(&sq), p).unwrap(), C64::new(sq[k], 0.0));
        }
        assert_eq!(g.eval_at(&real(&sq), 1.5), Err(Error::OutOfInterval(1.5)));

        let g = ChebGrid::new(20).unwrap();
        let e: Vec<f64> = g.points().iter().map(|l| l.exp()).collect();
        assert!((g.eval_at(&real(&e), 0.3).unwrap() - 0.3f64.exp()).norm() <= 1e-13);
    }

    #[test]
    fn decay_examples() {
        let mut unit = vec![C64::new(0.0, 0.0); 11];
        unit[0] = C64::new(1.0, 0.0);
        let d = decay_diagnostic(&ChebCoeffs { coeffs: unit });
        assert_eq!(d, DecayDiagnostic { saturation_index: 1, floor: 0.0 });

        let geo: Vec<C64> = (0..=60).map(|k| C64::new(0.5f64.powi(k), 0.0)).collect();
        let d = decay_diagnostic(&ChebCoeffs { coeffs: geo });
        assert_eq!(d.floor, 0.5f64.powi(54));
        assert_eq!(d.saturation_index, 51);

        let flat = vec![C64::new(0.3, 0.0); 17];
        let d = decay_diagnostic(&ChebCoeffs { coeffs: flat });
        assert_eq!(d, DecayDiagnostic { saturation_index: 0, floor: 0.3 });
    }

    #[test]
    fn smooth_function_decays_superalgebraically() {
        let g = ChebGrid::new(40).unwrap();
        let vals: Vec<f64> = g.points().iter().map(|l| l.exp()).collect();
        let c = g.to_coeffs(&real(&vals)).unwrap();
        for n in 15..=30 {
            assert!(c.coeffs[n].norm() < (n as f64).powi(-8), "n={n}");
        }
    }

    proptest! {
        #[test]
        fn differentiation_exact_on_polynomials(
            n in 2usize..64,
            seed in proptest::collection::vec(-1.0f64..1.0, 65),
        ) {
            let g = ChebGrid::new(n).unwrap();
            let coeffs = ChebCoeffs { coeffs: seed[..=n].iter().map(|&c| C64::new(c, 0.0)).collect() };
            // Derivative coefficients via the standard backward recurrence.
            let mut dc = vec![C64::new(0.0, 0.0); n + 2];
            for k in (0..n).rev() {
                dc[k] = dc[k + 2] + coeffs.coeffs[k + 1] * (2.0 * (k + 1) as f64);
            }
            dc[0] *= 0.5;
            let dpoly = ChebCoeffs { coeffs: dc[..=n].to_vec() };
            let u = g.from_coeffs(&coeffs).unwrap();
            let du = g.d1().mul_vec(&u);
            let tol = 1e-11 * (n * n) as f64;
            for (j, &l) in g.points().iter().enumerate() {
                prop_assert!((du[j] - dpoly.eval(l)).norm() <= tol);
            }
        }

        #[test]
        fn transform_round_trip(vals in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5..200)) {
            let n = vals.len() - 1;
            let g = ChebGrid::new(n).unwrap();
            let v: Vec<C64> = vals.iter().map(|&(a, b)| C64::new(a, b)).collect();
            let back = g.from_coeffs(&g.to_coeffs(&v).unwrap()).unwrap();
            let scale = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
            for (a, b) in back.iter().zip(&v) {
                prop_assert!((a - b).norm() <= 1e-13 * scale.max(1e-300));
            }
        }
    }
}
