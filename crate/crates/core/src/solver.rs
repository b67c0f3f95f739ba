//! Global collocation system over all domains and its Newton solve.
//!
//! Unknowns are concatenated left to right along the line: the remainder `v`
//! on the left end domain, `Ω` on each middle subdomain, then `v` on the
//! right end domain. Each block contributes its collocation rows. At every
//! junction two rows are overwritten by the C¹ conditions in `x`: value
//! continuity takes the junction row of the end block (or of the left block
//! between two middle subdomains), derivative continuity takes the junction
//! row of the neighbouring middle block.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::chebyshev::{decay_diagnostic, ChebCoeffs, ChebGrid, DecayDiagnostic};
use crate::complex_line::{DomainLayout, LineSpec, Side};
use crate::dense::{DenseMatrix, LuFactors};
use crate::error::{Error, Result};
use crate::painleve::{
    domega_dx_from_vs, omega_from_v, AsymptoticSeries, EndDomainOperator, MiddleDomainOperator,
    DEFAULT_SERIES_TERMS,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Halve the Newton step while the residual norm grows.
    pub damping: bool,
    pub max_halvings: usize,
    pub series_terms: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-10,
            max_iterations: 25,
            damping: true,
            max_halvings: 10,
            series_terms: DEFAULT_SERIES_TERMS,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    EndLeft,
    Middle(usize),
    EndRight,
}

impl DomainKind {
    /// `I`, `II` (or `II_1`, `II_2`, ... when the middle is split) and `III`.
    pub fn label(self, num_middle: usize) -> String {
        match self {
            DomainKind::EndLeft => "I".into(),
            DomainKind::EndRight => "III".into(),
            DomainKind::Middle(_) if num_middle == 1 => "II".into(),
            DomainKind::Middle(k) => format!("II_{}", k + 1),
        }
    }
}

/// Source term added to the right-hand side of Painlevé I.
pub type Forcing = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

enum Block<'a> {
    End(&'a EndDomainOperator),
    Middle(&'a MiddleDomainOperator),
}

/// Operators for every domain of a line/layout pair.
#[derive(Clone)]
pub struct Discretization {
    line: LineSpec,
    layout: DomainLayout,
    left: EndDomainOperator,
    middles: Vec<MiddleDomainOperator>,
    right: EndDomainOperator,
    offsets: Vec<usize>,
    forcing: Option<Forcing>,
}

impl fmt::Debug for Discretization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Discretization")
            .field("line", &self.line)
            .field("layout", &self.layout)
            .field("offsets", &self.offsets)
            .field("forced", &self.forcing.is_some())
            .finish()
    }
}

impl Discretization {
    pub fn new(line: &LineSpec, layout: &DomainLayout) -> Result<Self> {
        layout.validate()?;
        if !line.allow_outside_sector {
            if let Err(v) = line.validate() {
                let msg = v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
                return Err(Error::SectorViolation(msg));
            }
        }
        line.check_layout(layout)?;

        let mut grids: HashMap<usize, Arc<ChebGrid>> = HashMap::new();
        let mut grid = |n: usize| -> Result<Arc<ChebGrid>> {
            if let Some(g) = grids.get(&n) {
                return Ok(g.clone());
            }
            let g = Arc::new(ChebGrid::new(n)?);
            grids.insert(n, g.clone());
            Ok(g)
        };
        let left = EndDomainOperator::new(line, layout, Side::Left, grid(layout.n_end_left)?)?;
        let middles = layout
            .n_middle
            .iter()
            .enumerate()
            .map(|(k, &n)| MiddleDomainOperator::new(line, layout, k, grid(n)?))
            .collect::<Result<Vec<_>>>()?;
        let right = EndDomainOperator::new(line, layout, Side::Right, grid(layout.n_end_right)?)?;

        let mut offsets = vec![0];
        let sizes = std::iter::once(left.len())
            .chain(middles.iter().map(|m| m.len()))
            .chain(std::iter::once(right.len()));
        for n in sizes {
            offsets.push(offsets.last().unwrap() + n);
        }
        Ok(Discretization {
            line: *line,
            layout: layout.clone(),
            left,
            middles,
            right,
            offsets,
            forcing: None,
        })
    }

    /// Adds `f(z)` to the right-hand side of Painlevé I on every domain.
    ///
    /// On end domains the term enters as `s·f(1/s²)`, which is taken as zero
    /// at `s = 0`; `f` must therefore decay faster than `√z`.
    pub fn with_forcing(mut self, f: Forcing) -> Self {
        self.forcing = Some(f);
        self
    }

    pub fn line(&self) -> &LineSpec {
        &self.line
    }

    pub fn layout(&self) -> &DomainLayout {
        &self.layout
    }

    pub fn num_unknowns(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn num_blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Block start indices, with the total length appended.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn kind(&self, block: usize) -> DomainKind {
        if block == 0 {
            DomainKind::EndLeft
        } else if block == self.num_blocks() - 1 {
            DomainKind::EndRight
        } else {
            DomainKind::Middle(block - 1)
        }
    }

    pub fn label(&self, block: usize) -> String {
        self.kind(block).label(self.middles.len())
    }

    pub fn end_operator(&self, side: Side) -> &EndDomainOperator {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn middle_operator(&self, k: usize) -> Option<&MiddleDomainOperator> {
        self.middles.get(k)
    }

    fn block(&self, i: usize) -> Block<'_> {
        match self.kind(i) {
            DomainKind::EndLeft => Block::End(&self.left),
            DomainKind::EndRight => Block::End(&self.right),
            DomainKind::Middle(k) => Block::Middle(&self.middles[k]),
        }
    }

    fn grid(&self, i: usize) -> &ChebGrid {
        match self.block(i) {
            Block::End(op) => &op.grid,
            Block::Middle(op) => &op.grid,
        }
    }

    fn slice<'u>(&self, u: &'u [C64], i: usize) -> &'u [C64] {
        &u[self.offsets[i]..self.offsets[i + 1]]
    }

    fn check_len(&self, u: &[C64]) -> Result<()> {
        if u.len() != self.num_unknowns() {
            return Err(Error::DimensionMismatch {
                expected: self.num_unknowns(),
                actual: u.len(),
            });
        }
        Ok(())
    }

    /// `v = 0` on the end domains and, on the middle domains, the straight
    /// line in `x` between the truncated series at `x_l` and at `x_r`.
    pub fn initial_iterate(&self, series_terms: usize) -> Result<Vec<C64>> {
        let series = AsymptoticSeries::new(self.line.sigma, series_terms);
        let (xl, xr) = (self.layout.x_l, self.layout.x_r);
        self.line.sqrt_between(xl, xl)?;
        self.line.sqrt_between(xr, xr)?;
        let wl = series.eval(self.line.z_of_x(xl))?;
        let wr = series.eval(self.line.z_of_x(xr))?;
        let mut u = vec![C64::new(0.0, 0.0); self.num_unknowns()];
        for (k, op) in self.middles.iter().enumerate() {
            let off = self.offsets[k + 1];
            for (j, &x) in op.x_values.iter().enumerate() {
                let t = (x - xl) / (xr - xl);
                u[off + j] = wl * (1.0 - t) + wr * t;
            }
        }
        Ok(u)
    }

    fn forcing_rows(&self, i: usize) -> Option<Vec<C64>> {
        let f = self.forcing.as_ref()?;
        Some(match self.block(i) {
            Block::End(op) => op
                .s_values
                .iter()
                .map(|&s| {
                    if s.norm() == 0.0 {
                        C64::new(0.0, 0.0)
                    } else {
                        s * f((s * s).inv())
                    }
                })
                .collect(),
            Block::Middle(op) => op.z_values.iter().map(|&z| f(z)).collect(),
        })
    }

    /// Ω and the gradient of Ω with respect to the block unknowns at `node`.
    fn junction_value(&self, i: usize, u: &[C64], node: usize) -> Result<(C64, Vec<(usize, C64)>)> {
        let off = self.offsets[i];
        let blk = self.slice(u, i);
        let one = C64::new(1.0, 0.0);
        match self.block(i) {
            Block::End(op) => Ok((
                omega_from_v(blk[node], op.s_values[node], self.line.sigma)?,
                vec![(off + node, one)],
            )),
            Block::Middle(_) => Ok((blk[node], vec![(off + node, one)])),
        }
    }

    /// dΩ/dx and its gradient with respect to the block unknowns at `node`.
    fn junction_derivative(&self, i: usize, u: &[C64], node: usize) -> Result<(C64, Vec<(usize, C64)>)> {
        let off = self.offsets[i];
        let blk = self.slice(u, i);
        let (value, grad) = match self.block(i) {
            Block::End(op) => (
                op.domega_dx(blk, self.line.sigma, &self.line, node)?,
                op.domega_dx_gradient(&self.line, node),
            ),
            Block::Middle(op) => (op.domega_dx(blk, node)?, op.domega_dx_gradient(node)),
        };
        Ok((value, grad.into_iter().enumerate().map(|(k, g)| (off + k, g)).collect()))
    }

    /// Node of block `i` that touches its right neighbour (`right = true`)
    /// or its left neighbour.
    fn edge_node(&self, i: usize, right: bool) -> usize {
        match self.kind(i) {
            DomainKind::EndLeft | DomainKind::EndRight => 0,
            DomainKind::Middle(k) => {
                if right {
                    0
                } else {
                    self.middles[k].len() - 1
                }
            }
        }
    }

    /// Junction `j` joins blocks `j` and `j + 1`. Returns
    /// (value row, derivative row) as global row indices.
    fn junction_rows(&self, j: usize) -> (usize, usize) {
        let (lb, rb) = (j, j + 1);
        let lnode = self.offsets[lb] + self.edge_node(lb, true);
        let rnode = self.offsets[rb] + self.edge_node(rb, false);
        if self.kind(rb) == DomainKind::EndRight {
            (rnode, lnode)
        } else {
            (lnode, rnode)
        }
    }

    fn assemble_impl(&self, u: &[C64], with_jacobian: bool) -> Result<(Vec<C64>, Option<DenseMatrix<C64>>)> {
        self.check_len(u)?;
        let n = self.num_unknowns();
        let sigma = self.line.sigma;
        let mut f = Vec::with_capacity(n);
        let mut jac = with_jacobian.then(|| DenseMatrix::zeros(n, n));
        for i in 0..self.num_blocks() {
            let blk = self.slice(u, i);
            let mut rows = match self.block(i) {
                Block::End(op) => op.residual(blk, sigma)?,
                Block::Middle(op) => op.residual(blk)?,
            };
            if let Some(src) = self.forcing_rows(i) {
                for (r, g) in rows.iter_mut().zip(src) {
                    *r -= g;
                }
            }
            f.extend(rows);
            if let Some(jac) = jac.as_mut() {
                let local = match self.block(i) {
                    Block::End(op) => op.jacobian(blk, sigma)?,
                    Block::Middle(op) => op.jacobian(blk)?,
                };
                jac.set_block(self.offsets[i], self.offsets[i], &local);
            }
        }

        for j in 0..self.num_blocks() - 1 {
            let (lb, rb) = (j, j + 1);
            let (ln, rn) = (self.edge_node(lb, true), self.edge_node(rb, false));
            let (value_row, deriv_row) = self.junction_rows(j);

            let (wl, gl) = self.junction_value(lb, u, ln)?;
            let (wr, gr) = self.junction_value(rb, u, rn)?;
            f[value_row] = wl - wr;
            let (dl, hl) = self.junction_derivative(lb, u, ln)?;
            let (dr, hr) = self.junction_derivative(rb, u, rn)?;
            f[deriv_row] = dl - dr;

            if let Some(jac) = jac.as_mut() {
                for (row, plus, minus) in [(value_row, &gl, &gr), (deriv_row, &hl, &hr)] {
                    jac.row_mut(row).fill(C64::new(0.0, 0.0));
                    for &(c, g) in plus.iter() {
                        jac[(row, c)] += g;
                    }
                    for &(c, g) in minus.iter() {
                        jac[(row, c)] -= g;
                    }
                }
            }
        }
        Ok((f, jac))
    }

    /// Residual and Jacobian of the junction-coupled system at `u`.
    pub fn assemble(&self, u: &[C64]) -> Result<(Vec<C64>, DenseMatrix<C64>)> {
        let (f, jac) = self.assemble_impl(u, true)?;
        Ok((f, jac.expect("jacobian requested")))
    }

    pub fn residual(&self, u: &[C64]) -> Result<Vec<C64>> {
        Ok(self.assemble_impl(u, false)?.0)
    }

    /// Global indices of the rows overwritten by junction conditions,
    /// as `(value_row, derivative_row)` per junction.
    pub fn replaced_rows(&self) -> Vec<(usize, usize)> {
        (0..self.num_blocks() - 1).map(|j| self.junction_rows(j)).collect()
    }

    /// Largest ODE residual on a finer grid of degree `⌈3n/2⌉` per domain,
    /// sampled at the interior nodes, from the interpolant of `u`.
    pub fn refined_ode_residual(&self, u: &[C64]) -> Result<f64> {
        self.check_len(u)?;
        let sigma = self.line.sigma;
        let mut worst = 0.0f64;
        for i in 0..self.num_blocks() {
            let grid = self.grid(i);
            let coeffs = grid.to_coeffs(self.slice(u, i))?;
            let fine_n = (3 * grid.degree()).div_ceil(2);
            let fine = Arc::new(ChebGrid::new(fine_n)?);
            let mut padded = coeffs.coeffs.clone();
            padded.resize(fine_n + 1, C64::new(0.0, 0.0));
            let fine_vals = fine.from_coeffs(&ChebCoeffs { coeffs: padded })?;
            let rows = match self.kind(i) {
                DomainKind::EndLeft | DomainKind::EndRight => {
                    let side = if self.kind(i) == DomainKind::EndLeft { Side::Left } else { Side::Right };
                    let op = EndDomainOperator::new(&self.line, &self.layout, side, fine.clone())?;
                    let mut r = op.residual(&fine_vals, sigma)?;
                    if let Some(f) = self.forcing.as_ref() {
                        for (ri, &s) in r.iter_mut().zip(&op.s_values) {
                            if s.norm() != 0.0 {
                                *ri -= s * f((s * s).inv());
                            }
                        }
                    }
                    r
                }
                DomainKind::Middle(k) => {
                    let op = MiddleDomainOperator::new(&self.line, &self.layout, k, fine.clone())?;
                    let mut r = op.residual(&fine_vals)?;
                    if let Some(f) = self.forcing.as_ref() {
                        for (ri, &z) in r.iter_mut().zip(&op.z_values) {
                            *ri -= f(z);
                        }
                    }
                    r
                }
            };
            let interior = &rows[1..rows.len() - 1];
            worst = interior.iter().map(|r| r.norm()).fold(worst, f64::max);
        }
        Ok(worst)
    }
}

fn add_linear(mut f: Vec<C64>, jac: &DenseMatrix<C64>, lo: &[C64]) -> Vec<C64> {
    if lo.iter().any(|x| x.re != 0.0 || x.im != 0.0) {
        for (fi, ji) in f.iter_mut().zip(jac.mul_vec(lo)) {
            *fi += ji;
        }
    }
    f
}

/// `(hi, lo) − step·delta` renormalised so that `lo` holds the rounding error of `hi`.
fn double_word_step(hi: &[C64], lo: &[C64], delta: &[C64], step: f64) -> (Vec<C64>, Vec<C64>) {
    hi.iter()
        .zip(lo)
        .zip(delta)
        .map(|((&h, &l), &d)| {
            let y = l - d * step;
            let (re, re_err) = two_sum(h.re, y.re);
            let (im, im_err) = two_sum(h.im, y.im);
            (C64::new(re, im), C64::new(re_err, im_err))
        })
        .unzip()
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn sup_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

/// Concatenated unknowns together with the operators that give them meaning.
#[derive(Debug, Clone)]
pub struct SolveState {
    disc: Arc<Discretization>,
    values: Vec<C64>,
    /// Low-order part of the iterate: the state is `values + correction`,
    /// with each correction below one ulp of its value.
    correction: Vec<C64>,
    /// d/dl of every block, used for off-grid derivatives.
    dl: Vec<Vec<C64>>,
}

impl SolveState {
    pub fn new(disc: Arc<Discretization>, values: Vec<C64>) -> Result<Self> {
        disc.check_len(&values)?;
        let dl = (0..disc.num_blocks())
            .map(|i| disc.grid(i).d1().mul_vec(disc.slice(&values, i)))
            .collect();
        let correction = vec![C64::new(0.0, 0.0); values.len()];
        Ok(SolveState { disc, values, correction, dl })
    }

    /// State `values + correction`, as carried by the Newton iteration.
    pub fn with_correction(disc: Arc<Discretization>, values: Vec<C64>, correction: Vec<C64>) -> Result<Self> {
        disc.check_len(&correction)?;
        let mut state = SolveState::new(disc, values)?;
        state.correction = correction;
        Ok(state)
    }

    pub fn correction(&self) -> &[C64] {
        &self.correction
    }

    /// Residual of the full system at `values + correction`, linearised in
    /// the correction.
    pub fn residual(&self) -> Result<Vec<C64>> {
        let (f, jac) = self.disc.assemble(&self.values)?;
        Ok(add_linear(f, &jac, &self.correction))
    }

    pub fn discretization(&self) -> &Arc<Discretization> {
        &self.disc
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn offsets(&self) -> &[usize] {
        self.disc.offsets()
    }

    pub fn num_blocks(&self) -> usize {
        self.disc.num_blocks()
    }

    pub fn block(&self, i: usize) -> &[C64] {
        self.disc.slice(&self.values, i)
    }

    /// Remainder `v` at the nodes of the end domain on `side`.
    pub fn end_values(&self, side: Side) -> &[C64] {
        match side {
            Side::Left => self.block(0),
            Side::Right => self.block(self.num_blocks() - 1),
        }
    }

    /// Chebyshev coefficients of block `i`.
    pub fn coefficients(&self, i: usize) -> Result<ChebCoeffs> {
        self.disc.grid(i).to_coeffs(self.block(i))
    }

    /// Block index and local coordinate `l` for parameter `x`.
    fn locate(&self, x: f64) -> Result<(usize, C64, Option<C64>)> {
        let d = &self.disc;
        let layout = &d.layout;
        if !x.is_finite() {
            return Err(Error::InvalidConfig(format!("cannot evaluate at x = {x}")));
        }
        let end = |side: Side, block: usize| -> Result<(usize, C64, Option<C64>)> {
            let op = d.end_operator(side);
            let edge = match side {
                Side::Left => layout.x_l,
                Side::Right => layout.x_r,
            };
            let s = d.line.sqrt_between(edge, x)?.inv();
            let mut l = s / op.s_edge * 2.0 - 1.0;
            if l.im.abs() <= 1e-14 {
                l = C64::new(l.re.clamp(-1.0, 1.0), 0.0);
            }
            Ok((block, l, Some(s)))
        };
        if x < layout.x_l {
            return end(Side::Left, 0);
        }
        if x > layout.x_r {
            return end(Side::Right, d.num_blocks() - 1);
        }
        for (k, op) in d.middles.iter().enumerate() {
            if x <= op.x_b || k + 1 == d.middles.len() {
                let l = ((2.0 * x - op.x_a - op.x_b) / (op.x_b - op.x_a)).clamp(-1.0, 1.0);
                return Ok((k + 1, C64::new(l, 0.0), None));
            }
        }
        unreachable!("layout always has a middle domain")
    }

    /// `(Ω, dΩ/dx)` at parameter `x` on the line.
    pub fn evaluate(&self, x: f64) -> Result<(C64, C64)> {
        let (i, l, s) = self.locate(x)?;
        let grid = self.disc.grid(i);
        let value = grid.eval_complex(self.block(i), l)?;
        let dvalue = grid.eval_complex(&self.dl[i], l)?;
        match (self.disc.block(i), s) {
            (Block::End(op), Some(s)) => {
                let vs = dvalue * (2.0 / op.s_edge);
                let sigma = self.disc.line.sigma;
                Ok((omega_from_v(value, s, sigma)?, domega_dx_from_vs(vs, s, sigma, &self.disc.line)))
            }
            (Block::Middle(op), _) => Ok((value, dvalue * op.dx_scale())),
            _ => unreachable!("end blocks always carry s"),
        }
    }

    /// Remainder `v` on the end domain `side` at local coordinate `l`.
    pub fn end_remainder(&self, side: Side, l: f64) -> Result<C64> {
        let i = match side {
            Side::Left => 0,
            Side::Right => self.num_blocks() - 1,
        };
        self.disc.grid(i).eval_at(self.block(i), l)
    }

    /// Value and derivative mismatches at every junction, recomputed from
    /// the block values on both sides.
    pub fn junction_mismatches(&self) -> Result<Vec<JunctionMismatch>> {
        let d = &self.disc;
        let xs = d.layout.junctions();
        (0..d.num_blocks() - 1)
            .map(|j| {
                let (lb, rb) = (j, j + 1);
                let (ln, rn) = (d.edge_node(lb, true), d.edge_node(rb, false));
                let (wl, _) = d.junction_value(lb, &self.values, ln)?;
                let (wr, _) = d.junction_value(rb, &self.values, rn)?;
                let (dl, _) = d.junction_derivative(lb, &self.values, ln)?;
                let (dr, _) = d.junction_derivative(rb, &self.values, rn)?;
                Ok(JunctionMismatch {
                    x: xs[j],
                    value_mismatch: (wl - wr).norm(),
                    deriv_mismatch: (dl - dr).norm(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionMismatch {
    pub x: f64,
    pub value_mismatch: f64,
    pub deriv_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpectrum {
    pub label: String,
    pub kind: DomainKind,
    pub coeffs: ChebCoeffs,
    pub diagnostic: DecayDiagnostic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Sup-norm of the residual for the initial iterate and after every step.
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    /// Total number of step halvings over the whole solve.
    pub damping_halvings: usize,
    pub junctions: Vec<JunctionMismatch>,
    pub coeff_spectra: Vec<DomainSpectrum>,
    /// 1-norm condition estimate of the Jacobian at the final iterate.
    pub jacobian_condition: f64,
    /// ODE residual of the interpolant on a 1.5× refined grid.
    pub refined_ode_residual: f64,
}

/// Starting state for [`newton_solve`].
pub fn initial_iterate(line: &LineSpec, layout: &DomainLayout, series_terms: usize) -> Result<SolveState> {
    let disc = Arc::new(Discretization::new(line, layout)?);
    let u = disc.initial_iterate(series_terms)?;
    SolveState::new(disc, u)
}

/// Residual and Jacobian of the full system at `state`.
pub fn assemble(line: &LineSpec, layout: &DomainLayout, state: &SolveState) -> Result<(Vec<C64>, DenseMatrix<C64>)> {
    let d = state.discretization();
    if d.line() != line || d.layout() != layout {
        return Err(Error::InvalidConfig("state was built for a different line or layout".into()));
    }
    d.assemble(state.values())
}

/// `(Ω, dΩ/dx)` of a solved state at parameter `x_star`.
pub fn evaluate_solution(state: &SolveState, line: &LineSpec, layout: &DomainLayout, x_star: f64) -> Result<(C64, C64)> {
    let d = state.discretization();
    if d.line() != line || d.layout() != layout {
        return Err(Error::InvalidConfig("state was built for a different line or layout".into()));
    }
    state.evaluate(x_star)
}

/// Newton iteration for the tritronquée solution on `line`.
///
/// Returns the final state together with its report; a solve that runs out
/// of iterations is reported with `converged = false` rather than an error.
pub fn newton_solve(line: &LineSpec, layout: &DomainLayout, config: &SolverConfig) -> Result<(SolveState, SolveReport)> {
    config.validate()?;
    let disc = Arc::new(Discretization::new(line, layout)?);
    let u0 = disc.initial_iterate(config.series_terms)?;
    newton_from(disc, u0, config)
}

/// Newton iteration on an existing discretization from a given start.
///
/// The iterate is carried as `hi + lo` with `lo` below one ulp of `hi`, and
/// the residual is evaluated as `F(hi) + J(hi)·lo`, so rounding of the nodal
/// values does not put a floor under the residual.
pub fn newton_from(disc: Arc<Discretization>, u: Vec<C64>, config: &SolverConfig) -> Result<(SolveState, SolveReport)> {
    config.validate()?;
    disc.check_len(&u)?;
    let mut hi = u;
    let mut lo = vec![C64::new(0.0, 0.0); hi.len()];
    let (mut f, mut jac) = disc.assemble(&hi)?;
    let mut norm = sup_norm(&f);
    let mut history = vec![norm];
    let mut iterations = 0;
    let mut halvings = 0;

    while !(norm <= config.tolerance) && iterations < config.max_iterations && norm.is_finite() {
        let lu = LuFactors::factor(&jac).map_err(|e| match e {
            Error::SingularMatrix { column, .. } => Error::SingularJacobian { iteration: iterations, column },
            other => other,
        })?;
        let delta = lu.solve(&f)?;
        let mut step = 1.0;
        let (mut trial_hi, mut trial_lo) = double_word_step(&hi, &lo, &delta, step);
        let mut trial_norm = sup_norm(&add_linear(disc.residual(&trial_hi)?, &jac, &trial_lo));
        if config.damping {
            let mut k = 0;
            while !(trial_norm <= norm) && k < config.max_halvings {
                step *= 0.5;
                (trial_hi, trial_lo) = double_word_step(&hi, &lo, &delta, step);
                trial_norm = sup_norm(&add_linear(disc.residual(&trial_hi)?, &jac, &trial_lo));
                k += 1;
            }
            halvings += k;
        }
        hi = trial_hi;
        lo = trial_lo;
        iterations += 1;
        let (fh, jh) = disc.assemble(&hi)?;
        f = add_linear(fh, &jh, &lo);
        jac = jh;
        norm = sup_norm(&f);
        history.push(norm);
    }

    let converged = norm <= config.tolerance;
    let jacobian_condition = match LuFactors::factor(&jac) {
        Ok(lu) => jac.norm_one() * lu.inverse_norm_one_estimate()?,
        Err(_) => f64::INFINITY,
    };
    let state = SolveState::with_correction(disc.clone(), hi, lo)?;
    let coeff_spectra = (0..disc.num_blocks())
        .map(|i| {
            let coeffs = state.coefficients(i)?;
            let diagnostic = decay_diagnostic(&coeffs);
            Ok(DomainSpectrum {
                label: disc.label(i),
                kind: disc.kind(i),
                coeffs,
                diagnostic,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = SolveReport {
        converged,
        iterations,
        residual_history: history,
        final_residual: norm,
        damping_halvings: halvings,
        junctions: state.junction_mismatches()?,
        coeff_spectra,
        jacobian_condition,
        refined_ode_residual: disc.refined_ode_residual(state.values())?,
    };
    Ok((state, report))
}
