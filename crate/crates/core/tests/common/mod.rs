//! Oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, ToPrimitive, Zero};
use num_complex::Complex64 as C64;
use ode_solvers::{Dop853, System, Vector5};
use tritronquee::{DomainLayout, LineSpec, SolveState};

pub fn imaginary_axis() -> (LineSpec, DomainLayout) {
    (LineSpec::imaginary_axis(), DomainLayout::three_domain(-10.0, 10.0, 20, 256, 20).unwrap())
}

pub fn near_stokes() -> (LineSpec, DomainLayout) {
    (LineSpec::near_stokes(), DomainLayout::three_domain(-10.0, 10.0, 20, 256, 256).unwrap())
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// `p + q·√3` with rational `p`, `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Q3 {
    pub p: BigRational,
    pub q: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Q3 {
    pub fn zero() -> Self {
        Q3 { p: BigRational::zero(), q: BigRational::zero() }
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Q3 { p: rat(n, d), q: BigRational::zero() }
    }

    pub fn sqrt3_times(n: i64, d: i64) -> Self {
        Q3 { p: BigRational::zero(), q: rat(n, d) }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Q3 { p: &self.p * r, q: &self.q * r }
    }

    pub fn to_f64(&self) -> f64 {
        self.p.to_f64().unwrap() + self.q.to_f64().unwrap() * 3f64.sqrt()
    }
}

impl Add for &Q3 {
    type Output = Q3;
    fn add(self, o: &Q3) -> Q3 {
        Q3 { p: &self.p + &o.p, q: &self.q + &o.q }
    }
}

impl Sub for &Q3 {
    type Output = Q3;
    fn sub(self, o: &Q3) -> Q3 {
        Q3 { p: &self.p - &o.p, q: &self.q - &o.q }
    }
}

impl Mul for &Q3 {
    type Output = Q3;
    fn mul(self, o: &Q3) -> Q3 {
        let three = rat(3, 1);
        Q3 {
            p: &self.p * &o.p + three * &self.q * &o.q,
            q: &self.p * &o.q + &self.q * &o.p,
        }
    }
}

impl Neg for &Q3 {
    type Output = Q3;
    fn neg(self) -> Q3 {
        Q3 { p: -&self.p, q: -&self.q }
    }
}

/// Finite Laurent series in `r = z^{-1/2}` with exact coefficients.
#[derive(Debug, Clone, Default)]
pub struct Laurent {
    pub terms: BTreeMap<i64, Q3>,
}

impl Laurent {
    pub fn monomial(power: i64, c: Q3) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(power, c);
        }
        Laurent { terms }
    }

    pub fn coeff(&self, power: i64) -> Q3 {
        self.terms.get(&power).cloned().unwrap_or_else(Q3::zero)
    }

    fn insert_add(&mut self, power: i64, c: Q3) {
        let entry = self.terms.entry(power).or_insert_with(Q3::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&power);
        }
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (&k, c) in &o.terms {
            out.insert_add(k, c.clone());
        }
        out
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (&i, a) in &self.terms {
            for (&j, b) in &o.terms {
                out.insert_add(i + j, a * b);
            }
        }
        out
    }

    pub fn scale(&self, r: &BigRational) -> Laurent {
        let mut out = Laurent::default();
        for (&k, c) in &self.terms {
            out.insert_add(k, c.scale(r));
        }
        out
    }

    /// `d²/dz²` using `d/dz r^n = −(n/2)·r^{n+2}`.
    pub fn d2z(&self) -> Laurent {
        let mut out = Laurent::default();
        for (&n, c) in &self.terms {
            out.insert_add(n + 4, c.scale(&rat(n * (n + 2), 4)));
        }
        out
    }

    pub fn lowest_power(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Evaluation with `r = z^{-1/2}` on the principal branch.
    pub fn eval(&self, z: C64) -> C64 {
        let r = z.sqrt().inv();
        self.terms.iter().map(|(&k, c)| r.powi(k as i32) * c.to_f64()).sum()
    }
}

/// `Ω'' − 3Ω² + z` for a Laurent series `Ω`.
pub fn pi_residual(omega: &Laurent) -> Laurent {
    let z = Laurent::monomial(-2, Q3::rational(1, 1));
    omega.d2z().add(&omega.mul(omega).scale(&rat(-3, 1))).add(&z)
}

/// Exact coefficients `a_1..a_K` obtained by cancelling the lowest order of
/// the residual one term at a time, and the `K`-term truncation itself.
pub fn exact_series(sigma: i64, k_max: usize) -> (Vec<Q3>, Laurent) {
    let mut omega = Laurent::monomial(-1, Q3::sqrt3_times(sigma, 3));
    let mut coeffs = Vec::new();
    // Linearising −3Ω² about σ√(z/3) puts a_k·r^{5k−1} at order r^{5k−2} with
    // factor −2√3σ, so a_k = c·σ√3/6 for the residual coefficient c.
    let inv_factor = Q3::sqrt3_times(sigma, 6);
    for k in 1..=k_max as i64 {
        let res = pi_residual(&omega);
        let target = 5 * k - 2;
        assert!(
            res.lowest_power().is_some_and(|p| p >= target),
            "orders below r^{target} do not cancel at step {k}"
        );
        let a = &res.coeff(target) * &inv_factor;
        omega = omega.add(&Laurent::monomial(5 * k - 1, a.clone()));
        coeffs.push(a);
    }
    (coeffs, omega)
}

/// Least-squares slope of `log|y|` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// PI along `z = a·x + b` as an autonomous real system in
/// `(Re Ω, Im Ω, Re dΩ/dx, Im dΩ/dx, x)`.
struct LineSystem {
    a: C64,
    b: C64,
    /// +1 integrates towards increasing `x`, −1 towards decreasing `x`.
    dir: f64,
}

impl System<f64, Vector5<f64>> for LineSystem {
    fn system(&self, _t: f64, y: &Vector5<f64>, dy: &mut Vector5<f64>) {
        let w = C64::new(y[0], y[1]);
        let z = self.a * y[4] + self.b;
        let pp = self.a * self.a * (w * w * 3.0 - z);
        dy[0] = self.dir * y[2];
        dy[1] = self.dir * y[3];
        dy[2] = self.dir * pp.re;
        dy[3] = self.dir * pp.im;
        dy[4] = self.dir;
    }
}

/// Integrates PI from `x0` with data `(Ω, dΩ/dx)` over `|x − x0| ≤ length`
/// in direction `dir`, returning `(x, Ω, dΩ/dx)` every `step`.
pub fn integrate_ivp(line: &LineSpec, x0: f64, data: (C64, C64), dir: f64, length: f64, step: f64) -> Vec<(f64, C64, C64)> {
    let sys = LineSystem { a: line.a, b: line.b, dir };
    let (w, p) = data;
    let y0 = Vector5::new(w.re, w.im, p.re, p.im, x0);
    let mut stepper = Dop853::new(sys, 0.0, length, step, y0, 1e-13, 1e-13);
    stepper.integrate().expect("integration succeeds");
    stepper
        .y_out()
        .iter()
        .map(|y| (y[4], C64::new(y[0], y[1]), C64::new(y[2], y[3])))
        .collect()
}

pub fn sup_abs(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn max_v(state: &SolveState, side: tritronquee::Side) -> f64 {
    sup_abs(state.end_values(side))
}
