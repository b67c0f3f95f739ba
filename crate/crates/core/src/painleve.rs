//! Painlevé I on the middle segments, the regularized remainder equation on
//! the compactified end segments, and the large-`z` asymptotic series.
//!
//! With `w = σ√(z/3)`, `v = Ω − w` and `s = z^{-1/2}`, Painlevé I
//! `Ω'' = 3Ω² − z` becomes
//!
//! ```text
//! (s⁷/4)·v_ss + (3/4)·s⁶·v_s − 2σ√3·v = 3s·v² + σ/(4√3)·s⁴
//! ```
//!
//! which is singular at `s = 0`; no condition is imposed there, the
//! collocation row at that node reduces to `−2σ√3·v = 0`.
//!
//! Residuals use the convention `F = LHS − RHS`.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::chebyshev::ChebGrid;
use crate::complex_line::{DomainLayout, LineSpec, Side, Sigma};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Number of series terms used for the initial iterate by default.
pub const DEFAULT_SERIES_TERMS: usize = 6;

/// `Ω(z) ~ σ√(z/3) + Σ_{k=1..K} a_k z^{-(5k-1)/2}`.
///
/// The coefficients are real for either sign of `σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSeries {
    pub sigma: Sigma,
    pub coeffs: Vec<f64>,
}

/// Exponent `p_k = −(5k − 1)/2` of the `k`-th correction term.
fn exponent(k: usize) -> f64 {
    -(5.0 * k as f64 - 1.0) / 2.0
}

impl AsymptoticSeries {
    /// Order-by-order matching of the ansatz in powers of `z^{-1/2}`.
    ///
    /// Inserting the ansatz in `V'' + w'' − 6wV − 3V² = 0` (with `V = Ω − w`)
    /// every term lands on a power `z^{p_m + 1/2}`, giving
    /// `2√3σ·a_m = a_{m−1}·p_{m−1}(p_{m−1} − 1) − 3·Σ_{i+j=m} a_i a_j`
    /// for `m ≥ 2` and `a_1 = −1/24`.
    pub fn new(sigma: Sigma, terms: usize) -> Self {
        let sg = sigma.value();
        let mut a = Vec::with_capacity(terms);
        for m in 1..=terms {
            let mut rhs = if m == 1 {
                -sg / (4.0 * SQRT3)
            } else {
                let p = exponent(m - 1);
                a[m - 2] * p * (p - 1.0)
            };
            for i in 1..m {
                rhs -= 3.0 * a[i - 1] * a[m - i - 1];
            }
            a.push(rhs / (2.0 * SQRT3 * sg));
        }
        AsymptoticSeries { sigma, coeffs: a }
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Sum of the correction terms, with `r = z^{-1/2}` already computed.
    fn corrections(&self, r: C64) -> C64 {
        // z^{-(5k-1)/2} = r^{5k-1}
        let r5 = r.powu(5);
        let mut pow = r.powu(4);
        let mut sum = C64::new(0.0, 0.0);
        for &a in &self.coeffs {
            sum += pow * a;
            pow *= r5;
        }
        sum
    }

    /// Truncated series on the principal branch of `√z`.
    pub fn eval(&self, z: C64) -> Result<C64> {
        if z.norm() == 0.0 {
            return Err(Error::ZeroZ);
        }
        let root = z.sqrt();
        let leading = root * (self.sigma.value() / SQRT3);
        Ok(leading + self.corrections(root.inv()))
    }

    /// The correction part `Ω − σ√(z/3)` as a function of `s = z^{-1/2}`.
    pub fn remainder_in_s(&self, s: C64) -> C64 {
        self.corrections(s)
    }

    /// Painlevé I residual `Ω_K'' − 3Ω_K² + z` of the `K`-term truncation.
    ///
    /// The orders through `z^{-(5K+1)/2}` cancel identically by construction
    /// of the coefficients, so only the tail orders `m = K+1..=2K` are summed;
    /// the leading one is `z^{-(5K+3)/2}`.
    pub fn truncation_residual(&self, z: C64) -> Result<C64> {
        if z.norm() == 0.0 {
            return Err(Error::ZeroZ);
        }
        let k = self.terms();
        let r = z.sqrt().inv();
        let a = |i: usize| self.coeffs[i - 1];
        let mut total = C64::new(0.0, 0.0);
        for m in k + 1..=(2 * k).max(k + 1) {
            let mut d = 0.0;
            if m - 1 <= k && m >= 2 {
                let p = exponent(m - 1);
                d += a(m - 1) * p * (p - 1.0);
            }
            if m == 1 {
                d -= self.sigma.value() / (4.0 * SQRT3);
            }
            for i in 1..m {
                let j = m - i;
                if i <= k && j <= k {
                    d -= 3.0 * a(i) * a(j);
                }
            }
            // z^{p_m + 1/2} = r^{5m-2}
            total += r.powu(5 * m as u32 - 2) * d;
        }
        Ok(total)
    }
}

/// Collocation operator for an unbounded end segment in the variable `s`.
#[derive(Debug, Clone)]
pub struct EndDomainOperator {
    pub side: Side,
    pub s_edge: C64,
    pub grid: Arc<ChebGrid>,
    /// `s_j = s_edge·(1 + l_j)/2`; node 0 is the junction, the last node is `s = 0`.
    pub s_values: Vec<C64>,
    pub d1_s: DenseMatrix<C64>,
    pub d2_s: DenseMatrix<C64>,
}

impl EndDomainOperator {
    pub fn new(line: &LineSpec, layout: &DomainLayout, side: Side, grid: Arc<ChebGrid>) -> Result<Self> {
        let s_edge = line.s_edge(layout, side)?;
        let s_values = grid
            .points()
            .iter()
            .map(|&l| s_edge * (0.5 * (1.0 + l)))
            .collect();
        let ds = C64::new(2.0, 0.0) / s_edge;
        let d1_s = grid.d1().scaled(ds);
        let d2_s = grid.d2().scaled(ds * ds);
        Ok(EndDomainOperator {
            side,
            s_edge,
            grid,
            s_values,
            d1_s,
            d2_s,
        })
    }

    pub fn len(&self) -> usize {
        self.s_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_values.is_empty()
    }

    /// Index of the node at `s = 0`.
    pub fn infinity_node(&self) -> usize {
        self.len() - 1
    }

    fn check(&self, v: &[C64]) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: v.len(),
            });
        }
        Ok(())
    }

    pub fn residual(&self, v: &[C64], sigma: Sigma) -> Result<Vec<C64>> {
        self.check(v)?;
        let sg = sigma.value();
        let vs = self.d1_s.mul_vec_centered(v);
        let vss = self.d2_s.mul_vec_centered(v);
        Ok(self
            .s_values
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                let s2 = s * s;
                let s4 = s2 * s2;
                let s6 = s4 * s2;
                s6 * s * vss[j] * 0.25 + s6 * vs[j] * 0.75 - v[j] * (2.0 * sg * SQRT3)
                    - s * v[j] * v[j] * 3.0
                    - s4 * (sg / (4.0 * SQRT3))
            })
            .collect())
    }

    pub fn jacobian(&self, v: &[C64], sigma: Sigma) -> Result<DenseMatrix<C64>> {
        self.check(v)?;
        let n = self.len();
        let sg = sigma.value();
        let mut jac = DenseMatrix::zeros(n, n);
        for (i, &s) in self.s_values.iter().enumerate() {
            let s6 = s.powu(6);
            let c2 = s6 * s * 0.25;
            let c1 = s6 * 0.75;
            let row = jac.row_mut(i);
            if s.norm() != 0.0 {
                for ((out, &a2), &a1) in row.iter_mut().zip(self.d2_s.row(i)).zip(self.d1_s.row(i)) {
                    *out = c2 * a2 + c1 * a1;
                }
            }
            row[i] -= C64::new(2.0 * sg * SQRT3, 0.0) + s * v[i] * 6.0;
        }
        Ok(jac)
    }

    /// `dΩ/dx = a·dΩ/dz` at `node`, using `ds/dz = −s³/2`.
    pub fn domega_dx(&self, v: &[C64], sigma: Sigma, line: &LineSpec, node: usize) -> Result<C64> {
        self.check(v)?;
        if node >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: node,
                len: self.len(),
            });
        }
        let vs: C64 = self.d1_s.row(node).iter().zip(v).map(|(&d, &x)| d * x).sum();
        Ok(line.a * dz_from_vs(vs, self.s_values[node], sigma))
    }

    /// Coefficients of `∂(dΩ/dx at node)/∂v_k`.
    pub fn domega_dx_gradient(&self, line: &LineSpec, node: usize) -> Vec<C64> {
        let s = self.s_values[node];
        let f = -line.a * s * s * s * 0.5;
        self.d1_s.row(node).iter().map(|&d| f * d).collect()
    }
}

/// `dΩ/dz = −(s³/2)·v_s + σ·s/(2√3)`.
fn dz_from_vs(vs: C64, s: C64, sigma: Sigma) -> C64 {
    -(s * s * s) * vs * 0.5 + s * (sigma.value() / (2.0 * SQRT3))
}

/// Collocation operator for a finite middle segment `[x_a, x_b]`.
#[derive(Debug, Clone)]
pub struct MiddleDomainOperator {
    pub x_a: f64,
    pub x_b: f64,
    pub grid: Arc<ChebGrid>,
    /// Node 0 sits at `x_b`, the last node at `x_a`.
    pub x_values: Vec<f64>,
    pub z_values: Vec<C64>,
    pub d1_z: DenseMatrix<C64>,
    pub d2_z: DenseMatrix<C64>,
}

impl MiddleDomainOperator {
    pub fn new(line: &LineSpec, layout: &DomainLayout, k: usize, grid: Arc<ChebGrid>) -> Result<Self> {
        let (x_a, x_b) = layout.middle_bounds(k)?;
        let x_values: Vec<f64> = grid
            .points()
            .iter()
            .map(|&l| x_a * 0.5 * (1.0 - l) + x_b * 0.5 * (1.0 + l))
            .collect();
        let z_values = x_values.iter().map(|&x| line.z_of_x(x)).collect();
        let dz = C64::new(2.0, 0.0) / (line.a * (x_b - x_a));
        let d1_z = grid.d1().scaled(dz);
        let d2_z = grid.d2().scaled(dz * dz);
        Ok(MiddleDomainOperator {
            x_a,
            x_b,
            grid,
            x_values,
            z_values,
            d1_z,
            d2_z,
        })
    }

    pub fn len(&self) -> usize {
        self.z_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z_values.is_empty()
    }

    /// `d/dx = (2/(x_b − x_a))·d/dl`.
    pub fn dx_scale(&self) -> f64 {
        2.0 / (self.x_b - self.x_a)
    }

    fn check(&self, omega: &[C64]) -> Result<()> {
        if omega.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: omega.len(),
            });
        }
        Ok(())
    }

    pub fn residual(&self, omega: &[C64]) -> Result<Vec<C64>> {
        self.check(omega)?;
        let w2 = self.d2_z.mul_vec_centered(omega);
        Ok(w2
            .iter()
            .zip(omega)
            .zip(&self.z_values)
            .map(|((&d2, &w), &z)| d2 - w * w * 3.0 + z)
            .collect())
    }

    pub fn jacobian(&self, omega: &[C64]) -> Result<DenseMatrix<C64>> {
        self.check(omega)?;
        let mut jac = self.d2_z.clone();
        for (i, &w) in omega.iter().enumerate() {
            jac[(i, i)] -= w * 6.0;
        }
        Ok(jac)
    }

    /// `dΩ/dx` at `node`.
    pub fn domega_dx(&self, omega: &[C64], node: usize) -> Result<C64> {
        self.check(omega)?;
        if node >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: node,
                len: self.len(),
            });
        }
        let d1 = self.grid.d1().row(node);
        let sum: C64 = d1.iter().zip(omega).map(|(&d, &w)| w * d).sum();
        Ok(sum * self.dx_scale())
    }

    pub fn domega_dx_gradient(&self, node: usize) -> Vec<C64> {
        let f = self.dx_scale();
        self.grid
            .d1()
            .row(node)
            .iter()
            .map(|&d| C64::new(d * f, 0.0))
            .collect()
    }
}

/// `Ω = v + σ/(s√3)`, i.e. `v + σ√(z/3)` with `z = 1/s²`.
pub fn omega_from_v(v: C64, s: C64, sigma: Sigma) -> Result<C64> {
    if s.norm() == 0.0 {
        return Err(Error::InfiniteZ);
    }
    Ok(v + s.inv() * (sigma.value() / SQRT3))
}

/// `v = Ω − σ/(s√3)`.
pub fn v_from_omega(omega: C64, s: C64, sigma: Sigma) -> Result<C64> {
    if s.norm() == 0.0 {
        return Err(Error::InfiniteZ);
    }
    Ok(omega - s.inv() * (sigma.value() / SQRT3))
}

/// `dΩ/dx` on an end segment from `v_s` at the point `s`.
pub fn domega_dx_from_vs(vs: C64, s: C64, sigma: Sigma, line: &LineSpec) -> C64 {
    line.a * dz_from_vs(vs, s, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn small_layout() -> DomainLayout {
        DomainLayout::three_domain(-10.0, 10.0, 12, 16, 12).unwrap()
    }

    fn end_op(side: Side, n: usize) -> EndDomainOperator {
        let line = LineSpec::imaginary_axis();
        let layout = DomainLayout::three_domain(-10.0, 10.0, n, 16, n).unwrap();
        EndDomainOperator::new(&line, &layout, side, Arc::new(ChebGrid::new(n).unwrap())).unwrap()
    }

    fn mid_op(n: usize) -> MiddleDomainOperator {
        let line = LineSpec::near_stokes();
        let layout = DomainLayout::three_domain(-10.0, 10.0, 12, n, 12).unwrap();
        MiddleDomainOperator::new(&line, &layout, 0, Arc::new(ChebGrid::new(n).unwrap())).unwrap()
    }

    fn random_state(n: usize, seed: u64) -> Vec<C64> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * std::f64::consts::FRAC_1_SQRT_2)
            .collect()
    }

    fn max_col_error(
        jac: &DenseMatrix<C64>,
        u: &[C64],
        f: impl Fn(&[C64]) -> Vec<C64>,
    ) -> f64 {
        let eps = 1e-7;
        let mut worst = 0.0f64;
        for j in 0..u.len() {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[j] += eps;
            dn[j] -= eps;
            let (fp, fm) = (f(&up), f(&dn));
            for i in 0..u.len() {
                let fd = (fp[i] - fm[i]) / (2.0 * eps);
                worst = worst.max((fd - jac[(i, j)]).norm());
            }
        }
        worst
    }

    #[test]
    fn first_coefficient_is_minus_one_over_24() {
        for sigma in [Sigma::Plus, Sigma::Minus] {
            let a = AsymptoticSeries::new(sigma, 1);
            assert!((a.coeffs[0] + 1.0 / 24.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn eval_examples() {
        let empty = AsymptoticSeries { sigma: Sigma::Plus, coeffs: vec![] };
        assert!((empty.eval(c(3.0, 0.0)).unwrap() - 1.0).norm() <= 1e-15);
        let one = AsymptoticSeries::new(Sigma::Plus, 1);
        let z = c(0.0, 10.0);
        let expected = (z / 3.0).sqrt() - z.powi(-2) / 24.0;
        assert!((one.eval(z).unwrap() - expected).norm() <= 1e-15);
        assert_eq!(one.eval(c(0.0, 0.0)), Err(Error::ZeroZ));
        let six = AsymptoticSeries::new(Sigma::Minus, 6);
        for z in [c(2.0, 3.0), c(-4.0, 1.5), c(0.5, -7.0)] {
            let lhs = six.eval(z).unwrap().conj();
            let rhs = six.eval(z.conj()).unwrap();
            assert!((lhs - rhs).norm() <= 1e-15 * lhs.norm());
        }
    }

    #[test]
    fn truncation_residual_leading_order() {
        // K = 1: leading tail coefficient is a_1·6 − 3a_1² at z^{-4}.
        let one = AsymptoticSeries::new(Sigma::Plus, 1);
        let a1 = -1.0 / 24.0;
        let z = c(0.0, 1e4);
        let r = one.truncation_residual(z).unwrap();
        let leading = z.powi(-4) * (6.0 * a1 - 3.0 * a1 * a1);
        assert!((r - leading).norm() <= 1e-12 * leading.norm());
    }

    #[test]
    fn middle_residual_examples() {
        let op = mid_op(24);
        let zero = vec![c(0.0, 0.0); op.len()];
        assert_eq!(op.residual(&zero).unwrap(), op.z_values);
        let k = c(0.3, -0.2);
        let cst = vec![k; op.len()];
        for (f, z) in op.residual(&cst).unwrap().iter().zip(&op.z_values) {
            assert!((f - (z - k * k * 3.0)).norm() <= 1e-9);
        }
        assert!(op.residual(&zero[1..]).is_err());
    }

    #[test]
    fn middle_residual_of_leading_term_matches_second_derivative() {
        // On the imaginary axis the leading term √(z/3) is analytic along the
        // segment; with F = Ω'' − 3Ω² + z its residual is w'' = −σ/(4√3)·z^{-3/2}.
        let line = LineSpec::imaginary_axis();
        let layout = DomainLayout::three_domain(2.0, 10.0, 12, 48, 12).unwrap();
        let op = MiddleDomainOperator::new(&line, &layout, 0, Arc::new(ChebGrid::new(48).unwrap())).unwrap();
        let w: Vec<C64> = op.z_values.iter().map(|z| (z / 3.0).sqrt()).collect();
        let f = op.residual(&w).unwrap();
        for (fi, z) in f.iter().zip(&op.z_values) {
            let expected = -z.powf(-1.5) / (4.0 * SQRT3);
            assert!((fi - expected).norm() <= 1e-9, "{fi} vs {expected}");
        }
    }

    #[test]
    fn middle_operator_scaling() {
        let op = mid_op(20);
        let z2: Vec<C64> = op.z_values.iter().map(|z| z * z).collect();
        for d in op.d2_z.mul_vec(&z2) {
            assert!((d - 2.0).norm() <= 1e-11);
        }
    }

    #[test]
    fn middle_jacobian_checks() {
        let op = mid_op(16);
        let zero = vec![c(0.0, 0.0); op.len()];
        assert_eq!(op.jacobian(&zero).unwrap(), op.d2_z);
        let u = random_state(op.len(), 1);
        let jac = op.jacobian(&u).unwrap();
        assert!(max_col_error(&jac, &u, |w| op.residual(w).unwrap()) <= 1e-6);
        let shift = c(0.25, 0.5);
        let shifted: Vec<C64> = u.iter().map(|w| w + shift).collect();
        let jac2 = op.jacobian(&shifted).unwrap();
        for i in 0..op.len() {
            assert!((jac2[(i, i)] - (jac[(i, i)] - shift * 6.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn end_operator_invariants() {
        for side in [Side::Left, Side::Right] {
            let op = end_op(side, 20);
            assert_eq!(op.s_values[op.infinity_node()], c(0.0, 0.0));
            assert_eq!(op.s_values[0], op.s_edge);
            for d in op.d1_s.mul_vec(&op.s_values) {
                assert!((d - 1.0).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn end_residual_examples() {
        let op = end_op(Side::Right, 16);
        for sigma in [Sigma::Plus, Sigma::Minus] {
            let sg = sigma.value();
            let zero = vec![c(0.0, 0.0); op.len()];
            for (f, s) in op.residual(&zero, sigma).unwrap().iter().zip(&op.s_values) {
                assert!((f + s.powu(4) * (sg / (4.0 * SQRT3))).norm() <= 1e-15);
            }
            let u = random_state(op.len(), 9);
            let f = op.residual(&u, sigma).unwrap();
            let last = op.infinity_node();
            assert_eq!(f[last], -(u[last] * (2.0 * sg * SQRT3)));
        }
    }

    #[test]
    fn end_residual_of_first_series_term_is_high_order() {
        // v = a_1 s⁴ leaves a residual that starts at s⁹.
        let op = end_op(Side::Right, 24);
        let a1 = -1.0 / 24.0;
        let v: Vec<C64> = op.s_values.iter().map(|s| s.powu(4) * a1).collect();
        let f = op.residual(&v, Sigma::Plus).unwrap();
        for (fi, s) in f.iter().zip(&op.s_values) {
            // Exact: (s⁷/4)·12a_1 s² + (3/4)s⁶·4a_1 s³ − 3a_1² s⁹ = (6a_1 − 3a_1²) s⁹
            let exact = s.powu(9) * (6.0 * a1 - 3.0 * a1 * a1);
            assert!((fi - exact).norm() <= 1e-12, "{fi} vs {exact}");
        }
    }

    #[test]
    fn end_jacobian_checks() {
        for side in [Side::Left, Side::Right] {
            let op = end_op(side, 14);
            let u = random_state(op.len(), 4);
            for sigma in [Sigma::Plus, Sigma::Minus] {
                let jac = op.jacobian(&u, sigma).unwrap();
                assert!(max_col_error(&jac, &u, |v| op.residual(v, sigma).unwrap()) <= 1e-6);
            }
            let zero = vec![c(0.0, 0.0); op.len()];
            let jac0 = op.jacobian(&zero, Sigma::Plus).unwrap();
            let last = op.infinity_node();
            for j in 0..op.len() {
                let expected = if j == last { c(-2.0 * SQRT3, 0.0) } else { c(0.0, 0.0) };
                assert_eq!(jac0[(last, j)], expected);
            }
            let jp = op.jacobian(&u, Sigma::Plus).unwrap();
            let jm = op.jacobian(&u, Sigma::Minus).unwrap();
            for i in 0..op.len() {
                let s = op.s_values[i];
                for j in 0..op.len() {
                    let mut expected = (op.d2_s[(i, j)] * s.powu(7) * 0.25 + op.d1_s[(i, j)] * s.powu(6) * 0.75) * 2.0;
                    if i == j {
                        expected -= s * u[i] * 12.0;
                    }
                    assert!((jp[(i, j)] + jm[(i, j)] - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
                }
            }
        }
    }

    #[test]
    fn omega_from_v_examples() {
        let s = c(1.0 / 3f64.sqrt(), 0.0);
        assert!((omega_from_v(c(0.0, 0.0), s, Sigma::Plus).unwrap() - 1.0).norm() <= 1e-15);
        let w = omega_from_v(c(5.0, 0.0), c(1.0, 0.0), Sigma::Minus).unwrap();
        assert!((w - (5.0 - 1.0 / SQRT3)).norm() <= 1e-15);
        assert_eq!(omega_from_v(c(1.0, 0.0), c(0.0, 0.0), Sigma::Plus), Err(Error::InfiniteZ));
    }

    #[test]
    fn omega_from_series_remainder_matches_eval() {
        let series = AsymptoticSeries::new(Sigma::Plus, 6);
        let line = LineSpec::near_stokes();
        for k in 0..20 {
            let x = -30.0 + 3.1 * k as f64 + 0.05;
            let z = line.z_of_x(x);
            let s = z.sqrt().inv();
            let omega = omega_from_v(series.remainder_in_s(s), s, Sigma::Plus).unwrap();
            let direct = series.eval(z).unwrap();
            assert!((omega - direct).norm() <= 1e-14 * direct.norm());
        }
    }

    #[test]
    fn junction_derivative_examples() {
        let line = LineSpec::imaginary_axis();
        let op = end_op(Side::Right, 16);
        let zero = vec![c(0.0, 0.0); op.len()];
        let d = op.domega_dx(&zero, Sigma::Plus, &line, 0).unwrap();
        let s_edge = c(0.0, 10.0).sqrt().inv();
        assert!((d - C64::i() * s_edge / (2.0 * SQRT3)).norm() <= 1e-15);
        let dm = op.domega_dx(&zero, Sigma::Minus, &line, 0).unwrap();
        assert!((d + dm).norm() <= 1e-16);
        assert!(op.domega_dx(&zero, Sigma::Plus, &line, 99).is_err());
    }

    #[test]
    fn junction_derivative_matches_finite_difference() {
        // v(s) = sin(s) + s²: smooth test function sampled on the end grid.
        let line = LineSpec::imaginary_axis();
        let layout = small_layout();
        let op = EndDomainOperator::new(&line, &layout, Side::Left, Arc::new(ChebGrid::new(24).unwrap())).unwrap();
        let vfun = |s: C64| s.sin() + s * s;
        let v: Vec<C64> = op.s_values.iter().map(|&s| vfun(s)).collect();
        let d = op.domega_dx(&v, Sigma::Plus, &line, 0).unwrap();
        let omega_at = |x: f64| {
            let s = line.sqrt_between(x, x).unwrap().inv();
            omega_from_v(vfun(s), s, Sigma::Plus).unwrap()
        };
        let h = 1e-5;
        let fd = (omega_at(layout.x_l + h) - omega_at(layout.x_l - h)) / (2.0 * h);
        assert!((d - fd).norm() <= 1e-6, "{d} vs {fd}");
    }
}
