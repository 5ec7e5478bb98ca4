//! Two-variable SMO for box-constrained QPs with one sum constraint:
//!
//! ```text
//! minimize   ½ cᵀGc + qᵀc
//! subject to l ≤ c ≤ u,  Σc = s
//! ```
//!
//! Each step picks the maximal violating pair (first-order selection) and
//! moves along `e_i − e_j`, so the sum constraint is preserved exactly.

use serde::{Deserialize, Serialize};

use crate::error::{OccError, Result};
use crate::kernel::GramMatrix;

/// A QP instance. The Gram matrix is borrowed so grid searches can share it
/// between cells.
#[derive(Debug, Clone)]
pub struct BoxQp<'a> {
    pub gram: &'a GramMatrix,
    pub linear: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub sum_target: f64,
}

impl<'a> BoxQp<'a> {
    /// Problem with the same bounds for every variable.
    pub fn uniform(gram: &'a GramMatrix, lower: f64, upper: f64, sum_target: f64) -> Self {
        let n = gram.n();
        BoxQp {
            gram,
            linear: vec![0.0; n],
            lower: vec![lower; n],
            upper: vec![upper; n],
            sum_target,
        }
    }

    pub fn n(&self) -> usize {
        self.gram.n()
    }

    pub fn check_feasible(&self) -> Result<()> {
        let n = self.n();
        for (name, v) in [
            ("linear term", &self.linear),
            ("lower bounds", &self.lower),
            ("upper bounds", &self.upper),
        ] {
            if v.len() != n {
                return Err(OccError::InfeasibleQp(format!(
                    "{name} has length {}, expected {n}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(OccError::InfeasibleQp(format!("{name} not finite")));
            }
        }
        if !self.sum_target.is_finite() {
            return Err(OccError::InfeasibleQp("sum target not finite".into()));
        }
        if let Some(i) = (0..n).find(|&i| self.lower[i] > self.upper[i]) {
            return Err(OccError::InfeasibleQp(format!(
                "lower bound {} exceeds upper bound {} at {i}",
                self.lower[i], self.upper[i]
            )));
        }
        let lo: f64 = self.lower.iter().sum();
        let hi: f64 = self.upper.iter().sum();
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if self.sum_target < lo - slack || self.sum_target > hi + slack {
            return Err(OccError::InfeasibleQp(format!(
                "sum target {} outside [{lo}, {hi}]",
                self.sum_target
            )));
        }
        Ok(())
    }

    /// ½cᵀGc + qᵀc.
    pub fn objective(&self, c: &[f64]) -> f64 {
        0.5 * self.gram.quad_form(c) + dot(&self.linear, c)
    }

    /// Gc + q computed from scratch.
    pub fn gradient(&self, c: &[f64]) -> Vec<f64> {
        let mut g = self.gram.mul_vec(c);
        for (gi, qi) in g.iter_mut().zip(&self.linear) {
            *gi += qi;
        }
        g
    }

    /// Feasible starting point: every variable clamped towards zero, then
    /// the remaining sum is filled in index order.
    pub fn initial_point(&self) -> Vec<f64> {
        let mut c: Vec<f64> = (0..self.n())
            .map(|i| 0.0f64.clamp(self.lower[i], self.upper[i]))
            .collect();
        let mut rest = self.sum_target - c.iter().sum::<f64>();
        for i in 0..c.len() {
            if rest == 0.0 {
                break;
            }
            let room = if rest > 0.0 {
                self.upper[i] - c[i]
            } else {
                self.lower[i] - c[i]
            };
            let step = if rest > 0.0 {
                rest.min(room)
            } else {
                rest.max(room)
            };
            c[i] += step;
            rest -= step;
        }
        c
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tolerance: f64,
    /// `None` means `min(10_000·n, 10_000_000)`.
    pub max_iterations: Option<usize>,
    pub shrinking: bool,
    /// Assert descent on every step and re-check the maintained gradient
    /// every 1000 steps.
    #[serde(default = "default_debug_checks")]
    pub debug_checks: bool,
    /// Keep the objective after every step in the solution.
    #[serde(default)]
    pub record_trace: bool,
}

fn default_debug_checks() -> bool {
    cfg!(debug_assertions)
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-6,
            max_iterations: None,
            shrinking: false,
            debug_checks: default_debug_checks(),
            record_trace: false,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        SolverConfig {
            tolerance,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(OccError::Domain(format!(
                "solver tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(OccError::Domain("max_iterations must be positive".into()));
        }
        Ok(())
    }

    pub fn iteration_limit(&self, n: usize) -> usize {
        self.max_iterations
            .unwrap_or_else(|| n.saturating_mul(10_000).min(10_000_000))
            .max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpSolution {
    pub coeffs: Vec<f64>,
    pub dual_objective: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Multiplier of the sum constraint.
    pub rho: f64,
    /// Gradient Gc + q at the solution.
    pub gradient: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<f64>>,
}

/// Maximum KKT violation of `coeffs`: the smallest `v` such that some
/// multiplier ρ has `g_i ≥ ρ − v` for every variable below its upper bound
/// and `g_i ≤ ρ + v` for every variable above its lower bound.
pub fn kkt_residual(qp: &BoxQp, coeffs: &[f64]) -> f64 {
    let g = qp.gradient(coeffs);
    let (up, low) = extremes(qp, coeffs, &g, None);
    pair_gap(up, low)
}

fn pair_gap(up: Option<(usize, f64)>, low: Option<(usize, f64)>) -> f64 {
    match (up, low) {
        (Some((_, gi)), Some((_, gj))) => ((gj - gi) / 2.0).max(0.0),
        _ => 0.0,
    }
}

/// (argmin g over variables that can grow, argmax g over variables that can
/// shrink); lowest index wins ties.
fn extremes(
    qp: &BoxQp,
    c: &[f64],
    g: &[f64],
    active: Option<&[usize]>,
) -> (Option<(usize, f64)>, Option<(usize, f64)>) {
    let mut up: Option<(usize, f64)> = None;
    let mut low: Option<(usize, f64)> = None;
    let mut visit = |i: usize| {
        if c[i] < qp.upper[i] && up.is_none_or(|(_, v)| g[i] < v) {
            up = Some((i, g[i]));
        }
        if c[i] > qp.lower[i] && low.is_none_or(|(_, v)| g[i] > v) {
            low = Some((i, g[i]));
        }
    };
    match active {
        Some(idx) => idx.iter().copied().for_each(&mut visit),
        None => (0..c.len()).for_each(&mut visit),
    }
    (up, low)
}

/// Outcome of one [`Smo::step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// A pair was updated.
    Moved {
        i: usize,
        j: usize,
    },
    Converged,
}

/// Incremental SMO state, exposed so tests can inspect every iterate.
pub struct Smo<'q, 'g> {
    qp: &'q BoxQp<'g>,
    cfg: SolverConfig,
    c: Vec<f64>,
    g: Vec<f64>,
    objective: f64,
    iterations: usize,
    active: Vec<usize>,
    shrink_counter: usize,
    trace: Option<Vec<f64>>,
}

impl<'q, 'g> Smo<'q, 'g> {
    pub fn new(qp: &'q BoxQp<'g>, cfg: &SolverConfig) -> Result<Self> {
        qp.check_feasible()?;
        let start = qp.initial_point();
        Self::with_start(qp, cfg, start)
    }

    /// Starts from a caller-supplied feasible point.
    pub fn with_start(qp: &'q BoxQp<'g>, cfg: &SolverConfig, start: Vec<f64>) -> Result<Self> {
        cfg.validate()?;
        qp.check_feasible()?;
        let n = qp.n();
        if start.len() != n {
            return Err(OccError::InfeasibleQp(format!(
                "start point has length {}, expected {n}",
                start.len()
            )));
        }
        if (0..n).any(|i| !(start[i] >= qp.lower[i] && start[i] <= qp.upper[i])) {
            return Err(OccError::InfeasibleQp("start point outside the box".into()));
        }
        let sum: f64 = start.iter().sum();
        if (sum - qp.sum_target).abs() > 1e-10 * (1.0 + qp.sum_target.abs()) {
            return Err(OccError::InfeasibleQp(format!(
                "start point sums to {sum}, expected {}",
                qp.sum_target
            )));
        }
        let g = qp.gradient(&start);
        let objective = 0.5
            * start
                .iter()
                .zip(&g)
                .zip(&qp.linear)
                .map(|((c, g), q)| c * (g + q))
                .sum::<f64>();
        let trace = cfg.record_trace.then(|| vec![objective]);
        Ok(Smo {
            qp,
            cfg: cfg.clone(),
            c: start,
            g,
            objective,
            iterations: 0,
            active: (0..n).collect(),
            shrink_counter: n.min(1000),
            trace,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Maintained gradient Gc + q. Entries of shrunk variables may be stale
    /// until the solver reactivates them.
    pub fn gradient(&self) -> &[f64] {
        &self.g
    }

    /// Objective value maintained from the gradient, ½cᵀ(g + q).
    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    fn refresh_objective(&mut self) {
        self.objective = 0.5
            * self
                .c
                .iter()
                .zip(&self.g)
                .zip(&self.qp.linear)
                .map(|((c, g), q)| c * (g + q))
                .sum::<f64>();
    }

    fn reconstruct_gradient(&mut self) {
        self.g = self.qp.gradient(&self.c);
    }

    fn unshrink(&mut self) {
        if self.active.len() < self.c.len() {
            self.reconstruct_gradient();
            self.active = (0..self.c.len()).collect();
        }
    }

    fn shrink(&mut self, gi: f64, gj: f64) {
        let (qp, c, g) = (self.qp, &self.c, &self.g);
        self.active.retain(|&k| {
            let at_lower = c[k] <= qp.lower[k];
            let at_upper = c[k] >= qp.upper[k];
            // A variable stuck at a bound whose gradient lies beyond the
            // current violating pair cannot enter the next pair.
            !((at_lower && g[k] > gj) || (at_upper && g[k] < gi))
        });
    }

    /// Performs one pair update, or reports convergence.
    pub fn step(&mut self) -> Step {
        let tol = self.cfg.tolerance;
        let (up, low) = extremes(self.qp, &self.c, &self.g, Some(&self.active));
        let gap = pair_gap(up, low);
        if gap <= tol {
            if self.active.len() < self.c.len() {
                self.unshrink();
                return self.step();
            }
            return Step::Converged;
        }
        let ((i, gi), (j, gj)) = (up.unwrap(), low.unwrap());

        if self.cfg.shrinking {
            self.shrink_counter -= 1;
            if self.shrink_counter == 0 {
                self.shrink_counter = self.c.len().min(1000);
                self.shrink(gi, gj);
            }
        }

        let gram = self.qp.gram;
        let curv = gram.get(i, i) + gram.get(j, j) - 2.0 * gram.get(i, j);
        let room_i = self.qp.upper[i] - self.c[i];
        let room_j = self.c[j] - self.qp.lower[j];
        let limit = room_i.min(room_j);
        let t = if curv > 1e-12 {
            ((gj - gi) / curv).min(limit)
        } else {
            limit
        };

        let old_i = self.c[i];
        let old_j = self.c[j];
        if t >= room_i {
            self.c[i] = self.qp.upper[i];
        } else {
            self.c[i] = old_i + t;
        }
        if t >= room_j {
            self.c[j] = self.qp.lower[j];
        } else {
            self.c[j] = old_j - t;
        }
        let di = self.c[i] - old_i;
        let dj = self.c[j] - old_j;

        let predicted = di * gi
            + dj * gj
            + 0.5 * (di * di * gram.get(i, i) + dj * dj * gram.get(j, j))
            + di * dj * gram.get(i, j);

        let (ri, rj) = (gram.row(i), gram.row(j));
        if self.active.len() == self.c.len() {
            for (k, gk) in self.g.iter_mut().enumerate() {
                *gk += ri[k] * di + rj[k] * dj;
            }
        } else {
            for &k in &self.active {
                self.g[k] += ri[k] * di + rj[k] * dj;
            }
        }

        let before = self.objective;
        self.objective += predicted;
        self.iterations += 1;

        if self.cfg.debug_checks {
            let scale = 1e-12 * (1.0 + before.abs());
            assert!(
                predicted <= scale,
                "SMO step {} increased the objective by {predicted:e}",
                self.iterations
            );
            if self.iterations.is_multiple_of(1000) {
                self.check_gradient();
            }
        }
        if self.iterations.is_multiple_of(1000) {
            self.refresh_objective();
        }
        if let Some(trace) = &mut self.trace {
            trace.push(self.objective);
        }
        Step::Moved { i, j }
    }

    fn check_gradient(&self) {
        let fresh = self.qp.gradient(&self.c);
        let scale = self
            .g
            .iter()
            .chain(self.qp.gram.as_slice())
            .fold(1.0f64, |m, v| m.max(v.abs()));
        for &k in &self.active {
            let err = (fresh[k] - self.g[k]).abs();
            assert!(
                err <= 1e-8 * scale,
                "maintained gradient drifted by {err:e} at {k}"
            );
        }
    }

    /// Iterates until convergence or the iteration limit.
    pub fn run(mut self) -> QpSolution {
        let limit = self.cfg.iteration_limit(self.c.len());
        while self.iterations < limit {
            if self.step() == Step::Converged {
                return self.finish_with(true);
            }
        }
        self.finish()
    }

    /// Packages the current iterate as a solution.
    pub fn finish(self) -> QpSolution {
        let converged = kkt_residual(self.qp, &self.c) <= self.cfg.tolerance;
        self.finish_with(converged)
    }

    fn finish_with(mut self, converged: bool) -> QpSolution {
        self.unshrink();
        self.reconstruct_gradient();
        self.refresh_objective();
        let qp = self.qp;
        let (up, low) = extremes(qp, &self.c, &self.g, None);
        let residual = pair_gap(up, low);
        let rho = multiplier(qp, &self.c, &self.g);
        QpSolution {
            dual_objective: self.objective,
            kkt_residual: residual,
            iterations: self.iterations,
            converged,
            rho,
            gradient: self.g,
            coeffs: self.c,
            trace: self.trace,
        }
    }
}

/// Sum-constraint multiplier: mean gradient over free variables, or the
/// midpoint of the admissible interval when every variable sits at a bound.
fn multiplier(qp: &BoxQp, c: &[f64], g: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for k in 0..c.len() {
        let at_lower = c[k] <= qp.lower[k];
        let at_upper = c[k] >= qp.upper[k];
        match (at_lower, at_upper) {
            (false, false) => {
                sum += g[k];
                count += 1;
            }
            (true, false) => hi = hi.min(g[k]),
            (false, true) => lo = lo.max(g[k]),
            (true, true) => {}
        }
    }
    if count > 0 {
        return sum / count as f64;
    }
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => 0.0,
    }
}

/// Solves `qp`. Hitting the iteration limit is not an error: the partial
/// solution comes back with `converged == false`.
pub fn solve(qp: &BoxQp, cfg: &SolverConfig) -> Result<QpSolution> {
    Ok(Smo::new(qp, cfg)?.run())
}
