//! Straight lines `z = a·x + b`, the sector check for their two infinite
//! directions, branch-consistent square roots and the maps from the
//! reference interval `[-1, 1]` onto each domain.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Half-opening of the pole-free sector `|arg z| < 4π/5`.
pub const SECTOR_HALF_ANGLE: f64 = 4.0 * PI / 5.0;

/// Sign of the leading asymptotic term `σ√(z/3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sigma {
    Plus,
    Minus,
}

impl Sigma {
    pub fn value(self) -> f64 {
        match self {
            Sigma::Plus => 1.0,
            Sigma::Minus => -1.0,
        }
    }

    pub fn from_sign(sign: i32) -> Option<Self> {
        match sign {
            1 => Some(Sigma::Plus),
            -1 => Some(Sigma::Minus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One infinite direction of the line that falls outside the sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorViolation {
    /// `Right` for `x → +∞` (direction `a`), `Left` for `x → −∞` (direction `−a`).
    pub direction: Side,
    /// Argument of the direction, in `(−π, π]`.
    pub arg: f64,
}

impl std::fmt::Display for SectorViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.direction {
            Side::Right => "arg(a)",
            Side::Left => "arg(-a)",
        };
        write!(
            f,
            "{name} = {:.6} ({:.4}π) is not inside (-4π/5, 4π/5)",
            self.arg,
            self.arg / PI
        )
    }
}

/// The line `z = a·x + b` together with the asymptotic branch `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSpec {
    pub a: C64,
    pub b: C64,
    pub sigma: Sigma,
    pub allow_outside_sector: bool,
}

/// Argument reduced to `(−π, π]`; `atan2` returns `−π` for `(−1, −0.0)`.
fn reduced_arg(w: C64) -> f64 {
    let t = w.arg();
    if t <= -PI {
        t + 2.0 * PI
    } else {
        t
    }
}

impl LineSpec {
    /// Builds a line and rejects it if `a = 0` or a direction leaves the sector.
    pub fn new(a: C64, b: C64, sigma: Sigma) -> Result<Self> {
        Self::build(a, b, sigma, false)
    }

    /// Like [`LineSpec::new`] but without the sector check.
    pub fn new_unchecked_sector(a: C64, b: C64, sigma: Sigma) -> Result<Self> {
        Self::build(a, b, sigma, true)
    }

    fn build(a: C64, b: C64, sigma: Sigma, allow_outside_sector: bool) -> Result<Self> {
        if a.norm() == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::ZeroDirection);
        }
        let line = LineSpec {
            a,
            b,
            sigma,
            allow_outside_sector,
        };
        if !allow_outside_sector {
            if let Err(violations) = line.validate() {
                let msg = violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ");
                return Err(Error::SectorViolation(msg));
            }
        }
        Ok(line)
    }

    /// The imaginary axis `z = i·x` with `σ = −1`, which on the principal
    /// branch selects the solution that is pole-free in `|arg z| < 4π/5`.
    pub fn imaginary_axis() -> Self {
        LineSpec {
            a: C64::i(),
            b: C64::new(0.0, 0.0),
            sigma: Sigma::Minus,
            allow_outside_sector: false,
        }
    }

    /// The line through the origin at angle `4π/5 − 0.05`, `σ = −1`.
    pub fn near_stokes() -> Self {
        LineSpec {
            a: C64::from_polar(1.0, SECTOR_HALF_ANGLE - 0.05),
            b: C64::new(0.0, 0.0),
            sigma: Sigma::Minus,
            allow_outside_sector: false,
        }
    }

    /// Checks both infinite directions against the sector, ignoring the override.
    pub fn validate(&self) -> std::result::Result<(), Vec<SectorViolation>> {
        let mut violations = Vec::new();
        for (direction, w) in [(Side::Right, self.a), (Side::Left, -self.a)] {
            let arg = reduced_arg(w);
            if arg.abs() >= SECTOR_HALF_ANGLE {
                violations.push(SectorViolation { direction, arg });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn z_of_x(&self, x: f64) -> C64 {
        self.a * x + self.b
    }

    /// Parameter `t` where the line meets the real axis, if it does so transversally.
    fn real_axis_crossing(&self) -> Option<f64> {
        (self.a.im != 0.0).then(|| -self.b.im / self.a.im)
    }

    fn on_cut(z: C64) -> bool {
        z.im == 0.0 && z.re < 0.0
    }

    /// Whether `a·t + b` touches the closed negative real axis for `t` in `[lo, hi]`.
    fn segment_touches_cut(&self, lo: f64, hi: f64) -> bool {
        if let Some(t0) = self.real_axis_crossing() {
            if t0 >= lo && t0 <= hi {
                let z0 = self.z_of_x(t0);
                return z0.re <= 0.0;
            }
            false
        } else if self.b.im == 0.0 {
            // Line along the real axis.
            let (r0, r1) = (self.z_of_x(lo).re, self.z_of_x(hi).re);
            r0.min(r1) <= 0.0
        } else {
            false
        }
    }

    /// Principal `√(a·x + b)` after checking that the segment between
    /// `anchor` and `x` does not cross the branch cut.
    pub fn sqrt_between(&self, anchor: f64, x: f64) -> Result<C64> {
        let z = self.z_of_x(x);
        if z.norm() == 0.0 {
            return Err(Error::ZeroArgument { x });
        }
        let (lo, hi) = if anchor <= x { (anchor, x) } else { (x, anchor) };
        if Self::on_cut(z) || self.segment_touches_cut(lo, hi) {
            return Err(Error::BranchCutCrossed {
                from: anchor,
                to: x,
            });
        }
        Ok(z.sqrt())
    }

    /// Principal `√(a·x + b)`, continuous along the segment from the nearest
    /// junction of `layout` to `x`.
    pub fn sqrt_branch(&self, layout: &DomainLayout, x: f64) -> Result<C64> {
        let anchor = layout.nearest_junction(x);
        self.sqrt_between(anchor, x)
    }

    /// `s` at the junction of the end domain on `side`.
    pub fn s_edge(&self, layout: &DomainLayout, side: Side) -> Result<C64> {
        let x = match side {
            Side::Left => layout.x_l,
            Side::Right => layout.x_r,
        };
        Ok(self.sqrt_between(x, x)?.inv())
    }

    /// `s = s_edge·(1 + l)/2`; `l = −1` is the point at infinity.
    pub fn s_of_l_end(&self, layout: &DomainLayout, side: Side, l: f64) -> Result<C64> {
        Ok(self.s_edge(layout, side)? * (0.5 * (1.0 + l)))
    }

    /// Checks that each unbounded end segment stays clear of `z = 0` and of
    /// the branch cut, so that `s = 1/√z` is finite and continuous on it.
    pub fn check_layout(&self, layout: &DomainLayout) -> Result<()> {
        for x in [layout.x_l, layout.x_r] {
            if self.z_of_x(x).norm() == 0.0 {
                return Err(Error::ZeroArgument { x });
            }
        }
        let zero_at = {
            // Parameter where a·t + b = 0, if the line passes through the origin.
            let t = -(self.b / self.a);
            (t.im.abs() <= 1e-15 * t.re.abs().max(1.0)).then_some(t.re)
        };
        if let Some(t) = zero_at {
            if t < layout.x_l || t > layout.x_r {
                return Err(Error::InvalidLayout(format!(
                    "the line passes through z = 0 at x = {t}, inside an unbounded end domain"
                )));
            }
        }
        let cut = |lo: f64, hi: f64| -> bool {
            if let Some(t0) = self.real_axis_crossing() {
                t0 >= lo && t0 <= hi && self.z_of_x(t0).re <= 0.0
            } else {
                self.b.im == 0.0
            }
        };
        if cut(f64::NEG_INFINITY, layout.x_l) {
            return Err(Error::BranchCutCrossed {
                from: f64::NEG_INFINITY,
                to: layout.x_l,
            });
        }
        if cut(layout.x_r, f64::INFINITY) {
            return Err(Error::BranchCutCrossed {
                from: layout.x_r,
                to: f64::INFINITY,
            });
        }
        Ok(())
    }
}

/// Partition of the real parameter axis into an unbounded left end domain,
/// one or more middle subdomains, and an unbounded right end domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainLayout {
    pub x_l: f64,
    pub x_r: f64,
    pub n_end_left: usize,
    pub n_middle: Vec<usize>,
    pub n_end_right: usize,
    pub middle_splits: Vec<f64>,
}

pub const MIN_DEGREE: usize = 4;

impl DomainLayout {
    pub fn new(
        x_l: f64,
        x_r: f64,
        n_end_left: usize,
        n_middle: Vec<usize>,
        n_end_right: usize,
        middle_splits: Vec<f64>,
    ) -> Result<Self> {
        let layout = DomainLayout {
            x_l,
            x_r,
            n_end_left,
            n_middle,
            n_end_right,
            middle_splits,
        };
        layout.validate()?;
        Ok(layout)
    }

    /// Single middle domain, as in the three-domain setup.
    pub fn three_domain(x_l: f64, x_r: f64, n_left: usize, n_middle: usize, n_right: usize) -> Result<Self> {
        Self::new(x_l, x_r, n_left, vec![n_middle], n_right, Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidLayout(msg));
        if !(self.x_l.is_finite() && self.x_r.is_finite()) || self.x_l >= self.x_r {
            return bad(format!("need finite x_l < x_r, got x_l = {}, x_r = {}", self.x_l, self.x_r));
        }
        if self.n_middle.is_empty() {
            return bad("at least one middle subdomain is required".into());
        }
        if self.middle_splits.len() + 1 != self.n_middle.len() {
            return bad(format!(
                "{} middle subdomains need {} splits, got {}",
                self.n_middle.len(),
                self.n_middle.len() - 1,
                self.middle_splits.len()
            ));
        }
        let degrees = std::iter::once(self.n_end_left)
            .chain(self.n_middle.iter().copied())
            .chain(std::iter::once(self.n_end_right));
        for n in degrees {
            if n < MIN_DEGREE {
                return bad(format!("every domain needs degree >= {MIN_DEGREE}, got {n}"));
            }
        }
        let mut prev = self.x_l;
        for &t in &self.middle_splits {
            if !(t > prev && t < self.x_r) {
                return bad(format!("middle splits must increase strictly inside (x_l, x_r): {t}"));
            }
            prev = t;
        }
        Ok(())
    }

    pub fn num_middle(&self) -> usize {
        self.n_middle.len()
    }

    /// Interior junction abscissas in increasing order, `x_l` and `x_r` included.
    pub fn junctions(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.middle_splits.len() + 2);
        out.push(self.x_l);
        out.extend_from_slice(&self.middle_splits);
        out.push(self.x_r);
        out
    }

    pub fn nearest_junction(&self, x: f64) -> f64 {
        self.junctions()
            .into_iter()
            .min_by(|p, q| (p - x).abs().total_cmp(&(q - x).abs()))
            .unwrap_or(self.x_l)
    }

    /// Endpoints `[x_a, x_b]` of middle subdomain `k`.
    pub fn middle_bounds(&self, k: usize) -> Result<(f64, f64)> {
        let m = self.num_middle();
        if k >= m {
            return Err(Error::IndexOutOfRange { index: k, len: m });
        }
        let j = self.junctions();
        Ok((j[k], j[k + 1]))
    }

    /// `x = x_a(1 − l)/2 + x_b(1 + l)/2` on middle subdomain `k`.
    pub fn x_of_l_middle(&self, k: usize, l: f64) -> Result<f64> {
        let (xa, xb) = self.middle_bounds(k)?;
        Ok(xa * 0.5 * (1.0 - l) + xb * 0.5 * (1.0 + l))
    }
}
