//! Bounded-variable revised primal simplex with an explicit basis inverse.
//!
//! Every row `i` gets a logical variable `r_i = a_i . x` whose bounds encode
//! the relation and right-hand side, so the system is `A x - r = 0` and all
//! feasibility questions become bound questions. Phase 1 minimizes the sum
//! of bound violations of the basic variables starting from any basis, which
//! is what lets a solved instance be re-solved after bound changes or added
//! rows without starting over.
//!
//! Pricing uses Devex reference weights; after a long run of degenerate
//! pivots it switches to Bland's smallest-index rule until progress resumes.

use crate::error::{Error, Result};
use crate::lp::model::{LpModel, Relation};

/// Primal feasibility tolerance.
pub const EPS_FEAS: f64 = 1e-7;
/// Reduced-cost optimality tolerance.
pub const EPS_OPT: f64 = 1e-9;
const EPS_PIVOT: f64 = 1e-9;
const BLAND_AFTER: usize = 500;
const PERTURBATION: f64 = 1e-6;
const REFACTOR_EVERY: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Branch-and-bound stopped at its node limit; values hold the incumbent if any.
    NodeLimit,
    /// The simplex iteration cap was hit.
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective of `values`; `f64::INFINITY` when there are no values.
    pub objective: f64,
    pub values: Vec<f64>,
}

impl LpSolution {
    pub(crate) fn without_values(status: LpStatus) -> Self {
        LpSolution { status, objective: f64::INFINITY, values: Vec::new() }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves a pure LP. Models with integer variables are rejected.
pub fn simplex_solve(model: &LpModel) -> Result<LpSolution> {
    Ok(Simplex::new(model)?.solve())
}

/// A warm-startable simplex over a fixed set of columns.
#[derive(Clone, Debug)]
pub struct Simplex {
    nv: usize,
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    /// Basis position per column, `usize::MAX` when nonbasic.
    pos: Vec<usize>,
    /// `B^-1`, column-major: entry `(p, c)` lives at `c * m + p`.
    binv: Vec<f64>,
    pivots_since_refactor: usize,
    /// Total pivots over the lifetime of this solver.
    pub pivots: usize,
}

fn logical_bounds(rel: Relation, rhs: f64) -> (f64, f64) {
    match rel {
        Relation::Le => (f64::NEG_INFINITY, rhs),
        Relation::Ge => (rhs, f64::INFINITY),
        Relation::Eq => (rhs, rhs),
    }
}

fn resting_value(lo: f64, hi: f64) -> f64 {
    if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        0.0
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Gauss-Jordan inverse of the row-major `n x n` matrix `a` (destroyed).
fn invert_dense(a: &mut [f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let mut arow = vec![0.0; n];
    let mut irow = vec![0.0; n];
    for c in 0..n {
        let piv = (c..n).max_by(|&r1, &r2| a[r1 * n + c].abs().total_cmp(&a[r2 * n + c].abs()))?;
        if a[piv * n + c].abs() < 1e-11 {
            return None;
        }
        if piv != c {
            for k in 0..n {
                a.swap(piv * n + k, c * n + k);
                inv.swap(piv * n + k, c * n + k);
            }
        }
        let d = 1.0 / a[c * n + c];
        for k in 0..n {
            a[c * n + k] *= d;
            inv[c * n + k] *= d;
        }
        arow.copy_from_slice(&a[c * n..(c + 1) * n]);
        irow.copy_from_slice(&inv[c * n..(c + 1) * n]);
        for r in 0..n {
            let f = a[r * n + c];
            if r == c || f == 0.0 {
                continue;
            }
            axpy(&mut a[r * n..(r + 1) * n], -f, &arow);
            axpy(&mut inv[r * n..(r + 1) * n], -f, &irow);
        }
    }
    Some(inv)
}

impl Simplex {
    pub fn new(model: &LpModel) -> Result<Self> {
        model.check().map_err(Error::LpUsage)?;
        if model.num_integer() > 0 {
            return Err(Error::LpUsage("model has integer variables; relax it first".into()));
        }
        let nv = model.variables.len();
        let m = model.constraints.len();
        let mut cols = vec![Vec::new(); nv];
        let mut lo = Vec::with_capacity(nv + m);
        let mut hi = Vec::with_capacity(nv + m);
        for v in &model.variables {
            lo.push(v.lower);
            hi.push(v.upper);
        }
        for (i, c) in model.constraints.iter().enumerate() {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(c.row.len());
            for &(j, a) in &c.row {
                match row.iter_mut().find(|(k, _)| *k == j) {
                    Some(e) => e.1 += a,
                    None => row.push((j, a)),
                }
            }
            for (j, a) in row {
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
            let (l, h) = logical_bounds(c.relation, c.rhs);
            lo.push(l);
            hi.push(h);
        }
        let mut cost = vec![0.0; nv + m];
        for &(j, c) in &model.objective {
            cost[j] += c;
        }
        let mut x: Vec<f64> = (0..nv).map(|j| resting_value(lo[j], hi[j])).collect();
        x.extend(std::iter::repeat_n(0.0, m));
        let mut s = Simplex {
            nv,
            m,
            cols,
            cost,
            lo,
            hi,
            x,
            basis: Vec::new(),
            pos: Vec::new(),
            binv: Vec::new(),
            pivots_since_refactor: 0,
            pivots: 0,
        };
        s.slack_basis();
        Ok(s)
    }

    /// Makes every logical basic (`B = -I`); structurals keep their values, clamped to bounds.
    fn slack_basis(&mut self) {
        let (nv, m) = (self.nv, self.m);
        self.basis = (nv..nv + m).collect();
        self.pos = vec![usize::MAX; nv + m];
        for (p, &j) in self.basis.iter().enumerate() {
            self.pos[j] = p;
        }
        for j in 0..nv {
            if !(self.lo[j]..=self.hi[j]).contains(&self.x[j]) {
                self.x[j] = resting_value(self.lo[j], self.hi[j]);
            }
        }
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = -1.0;
        }
        self.pivots_since_refactor = 0;
    }

    pub fn num_variables(&self) -> usize {
        self.nv
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lo[j], self.hi[j])
    }

    /// Changes the bounds of structural variable `j`; the next [`solve`](Self::solve)
    /// starts from the current basis.
    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        assert!(j < self.nv, "structural variable index");
        self.rebound(j, lo, hi);
    }

    /// Changes the right-hand side range of row `i` to `lo <= a_i x <= hi`.
    pub fn set_row_bounds(&mut self, i: usize, lo: f64, hi: f64) {
        assert!(i < self.m, "row index");
        self.rebound(self.nv + i, lo, hi);
    }

    /// Replaces the objective; the current basis stays primal feasible.
    pub fn set_objective(&mut self, objective: &[(usize, f64)]) {
        self.cost[..self.nv].fill(0.0);
        for &(j, c) in objective {
            self.cost[j] += c;
        }
    }

    fn rebound(&mut self, j: usize, lo: f64, hi: f64) {
        let nonbasic = self.pos[j] == usize::MAX;
        let at_upper = nonbasic && self.x[j] == self.hi[j] && self.hi[j] != self.lo[j];
        self.lo[j] = lo;
        self.hi[j] = hi;
        if nonbasic {
            self.x[j] = if at_upper && hi.is_finite() { hi } else { resting_value(lo, hi) };
        }
    }

    /// Appends a row; its logical variable enters the basis.
    pub fn add_constraint(&mut self, row: &[(usize, f64)], relation: Relation, rhs: f64) {
        let m = self.m;
        let m1 = m + 1;
        let row: Vec<(usize, f64)> = row.iter().copied().filter(|&(_, a)| a != 0.0).collect();
        // New inverse: [[B^-1, 0], [u, -1]] with u = a_B^T B^-1.
        let mut binv = vec![0.0; m1 * m1];
        for c in 0..m {
            let col = &self.binv[c * m..(c + 1) * m];
            binv[c * m1..c * m1 + m].copy_from_slice(col);
            binv[c * m1 + m] = row
                .iter()
                .filter(|&&(j, _)| self.pos[j] != usize::MAX)
                .map(|&(j, a)| a * col[self.pos[j]])
                .sum();
        }
        binv[m * m1 + m] = -1.0;
        self.binv = binv;

        for &(j, a) in &row {
            self.cols[j].push((m, a));
        }
        let (l, h) = logical_bounds(relation, rhs);
        self.lo.push(l);
        self.hi.push(h);
        self.cost.push(0.0);
        let activity = row.iter().map(|&(j, a)| a * self.x[j]).sum();
        self.x.push(activity);
        self.pos.push(m);
        self.basis.push(self.nv + m);
        self.m = m1;
    }

    /// Column `j` of `[A | -I]` as a sparse list.
    fn column(&self, j: usize) -> std::borrow::Cow<'_, [(usize, f64)]> {
        if j < self.nv {
            std::borrow::Cow::Borrowed(&self.cols[j])
        } else {
            std::borrow::Cow::Owned(vec![(j - self.nv, -1.0)])
        }
    }

    fn binv_col(&self, c: usize) -> &[f64] {
        &self.binv[c * self.m..(c + 1) * self.m]
    }

    fn recompute_basics(&mut self) {
        let m = self.m;
        let mut v = vec![0.0; m];
        for j in 0..self.nv + m {
            if self.pos[j] != usize::MAX || self.x[j] == 0.0 {
                continue;
            }
            let xj = self.x[j];
            if j < self.nv {
                for &(i, a) in &self.cols[j] {
                    v[i] += a * xj;
                }
            } else {
                v[j - self.nv] -= xj;
            }
        }
        let mut xb = vec![0.0; m];
        for (c, &vc) in v.iter().enumerate() {
            if vc != 0.0 {
                axpy(&mut xb, -vc, self.binv_col(c));
            }
        }
        for (p, &b) in self.basis.iter().enumerate() {
            self.x[b] = xb[p];
        }
    }

    /// Recomputes `B^-1` from scratch; falls back to the slack basis if singular.
    ///
    /// Logical columns are unit vectors, so only the block of structural
    /// columns restricted to the rows whose logicals are nonbasic is inverted.
    fn refactor(&mut self) {
        let m = self.m;
        let mut row_pos = vec![usize::MAX; m];
        let mut structural = Vec::new();
        for (p, &j) in self.basis.iter().enumerate() {
            if j >= self.nv {
                row_pos[j - self.nv] = p;
            } else {
                structural.push(p);
            }
        }
        let free_rows: Vec<usize> = (0..m).filter(|&i| row_pos[i] == usize::MAX).collect();
        let s = free_rows.len();
        debug_assert_eq!(s, structural.len());
        let mut free_idx = vec![usize::MAX; m];
        for (t, &i) in free_rows.iter().enumerate() {
            free_idx[i] = t;
        }
        let mut k = vec![0.0; s * s];
        for (u, &p) in structural.iter().enumerate() {
            for &(i, a) in &self.cols[self.basis[p]] {
                if free_idx[i] != usize::MAX {
                    k[free_idx[i] * s + u] = a;
                }
            }
        }
        let Some(kinv) = invert_dense(&mut k, s) else {
            self.slack_basis();
            return;
        };
        let mut binv = vec![0.0; m * m];
        for (t, &c) in free_rows.iter().enumerate() {
            let col = &mut binv[c * m..(c + 1) * m];
            for (u, &p) in structural.iter().enumerate() {
                col[p] = kinv[u * s + t];
            }
        }
        for (u, &p) in structural.iter().enumerate() {
            for &(i, a) in &self.cols[self.basis[p]] {
                let target = row_pos[i];
                if target == usize::MAX {
                    continue;
                }
                for (t, &c) in free_rows.iter().enumerate() {
                    binv[c * m + target] += a * kinv[u * s + t];
                }
            }
        }
        for (i, &p) in row_pos.iter().enumerate() {
            if p != usize::MAX {
                binv[i * m + p] = -1.0;
            }
        }
        self.binv = binv;
        self.pivots_since_refactor = 0;
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let ar = alpha[r];
        for col in self.binv.chunks_exact_mut(m) {
            let v = col[r] / ar;
            if v != 0.0 {
                axpy(col, -v, alpha);
                col[r] = v;
            }
        }
        self.pivots_since_refactor += 1;
        self.pivots += 1;
    }

    fn solution(&self, status: LpStatus) -> LpSolution {
        let values = self.x[..self.nv].to_vec();
        let objective = (0..self.nv).map(|j| self.cost[j] * values[j]).sum();
        LpSolution { status, objective, values }
    }

    /// Runs phase 1 and phase 2 from the current basis.
    ///
    /// The first pass works on bounds widened by tiny, distinct amounts so
    /// that degenerate vertices are left quickly; a second pass on the true
    /// bounds then cleans up from the basis the first pass ended on.
    pub fn solve(&mut self) -> LpSolution {
        let total = self.nv + self.m;
        let max_iters = 50 * total + 10_000;
        let (lo, hi) = (self.lo.clone(), self.hi.clone());
        self.perturb();
        let first = self.run(max_iters);
        self.restore_bounds(lo, hi);
        if first == LpStatus::IterationLimit {
            return LpSolution::without_values(first);
        }
        match self.run(max_iters) {
            LpStatus::Optimal => self.solution(LpStatus::Optimal),
            status => LpSolution::without_values(status),
        }
    }

    fn perturb(&mut self) {
        for j in 0..self.nv + self.m {
            if self.lo[j] == self.hi[j] && j < self.nv {
                continue;
            }
            // Deterministic spread in [1, 2) so that ties between rows break.
            let spread = 1.0 + ((j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11) as f64 / (1u64 << 53) as f64;
            let nonbasic = self.pos[j] == usize::MAX;
            let at_upper = nonbasic && self.x[j] == self.hi[j] && self.hi[j] != self.lo[j];
            let at_lower = nonbasic && self.x[j] == self.lo[j];
            if self.lo[j].is_finite() {
                self.lo[j] -= PERTURBATION * spread * (1.0 + self.lo[j].abs());
            }
            if self.hi[j].is_finite() {
                self.hi[j] += PERTURBATION * spread * (1.0 + self.hi[j].abs());
            }
            if at_upper {
                self.x[j] = self.hi[j];
            } else if at_lower {
                self.x[j] = self.lo[j];
            }
        }
    }

    fn restore_bounds(&mut self, lo: Vec<f64>, hi: Vec<f64>) {
        for j in 0..self.nv + self.m {
            if self.pos[j] == usize::MAX {
                let x = self.x[j];
                self.x[j] = if x == self.hi[j] && self.hi[j] != self.lo[j] && hi[j].is_finite() {
                    hi[j]
                } else if x == self.lo[j] {
                    resting_value(lo[j], hi[j])
                } else {
                    x.clamp(lo[j], hi[j])
                };
            }
        }
        self.lo = lo;
        self.hi = hi;
    }

    fn reduced_cost(&self, j: usize, pi: &[f64], phase1: bool) -> f64 {
        let cj = if phase1 { 0.0 } else { self.cost[j] };
        if j < self.nv {
            cj - self.cols[j].iter().map(|&(i, a)| pi[i] * a).sum::<f64>()
        } else {
            cj + pi[j - self.nv]
        }
    }

    fn run(&mut self, max_iters: usize) -> LpStatus {
        let total = self.nv + self.m;
        let m = self.m;
        let mut degenerate = 0usize;
        let mut recovered = 0usize;
        let mut weights = vec![1.0; total];
        let mut cb = vec![0.0; m];
        let mut pi = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        self.recompute_basics();

        for _ in 0..max_iters {
            let mut phase1 = false;
            for (p, &b) in self.basis.iter().enumerate() {
                let xb = self.x[b];
                cb[p] = if xb < self.lo[b] - EPS_FEAS {
                    phase1 = true;
                    -1.0
                } else if xb > self.hi[b] + EPS_FEAS {
                    phase1 = true;
                    1.0
                } else {
                    0.0
                };
            }
            if !phase1 {
                for (p, &b) in self.basis.iter().enumerate() {
                    cb[p] = self.cost[b];
                }
            }
            let nz: Vec<(usize, f64)> =
                cb.iter().enumerate().filter(|(_, &c)| c != 0.0).map(|(p, &c)| (p, c)).collect();
            for (c, pc) in pi.iter_mut().enumerate() {
                let col = self.binv_col(c);
                *pc = nz.iter().map(|&(p, v)| v * col[p]).sum();
            }

            let bland = degenerate >= BLAND_AFTER;
            let mut entering: Option<(usize, f64)> = None;
            let mut best_score = 0.0;
            for j in 0..total {
                if self.pos[j] != usize::MAX {
                    continue;
                }
                let d = self.reduced_cost(j, &pi, phase1);
                let dir = if d < -EPS_OPT && self.x[j] < self.hi[j] {
                    1.0
                } else if d > EPS_OPT && self.x[j] > self.lo[j] {
                    -1.0
                } else {
                    continue;
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                let score = d * d / weights[j];
                if score > best_score {
                    best_score = score;
                    entering = Some((j, dir));
                }
            }

            let Some((q, dir)) = entering else {
                if self.pivots_since_refactor > 0 && recovered < 3 {
                    // Confirm the verdict on a fresh factorization.
                    recovered += 1;
                    self.refactor();
                    self.recompute_basics();
                    continue;
                }
                return if phase1 { LpStatus::Infeasible } else { LpStatus::Optimal };
            };

            alpha.fill(0.0);
            for &(i, a) in self.column(q).iter() {
                axpy(&mut alpha, a, &self.binv[i * m..(i + 1) * m]);
            }

            let mut step = if dir > 0.0 { self.hi[q] - self.x[q] } else { self.x[q] - self.lo[q] };
            let mut leave: Option<(usize, f64)> = None;
            for (p, &a) in alpha.iter().enumerate() {
                if a.abs() < EPS_PIVOT {
                    continue;
                }
                let rate = -dir * a;
                let b = self.basis[p];
                let (xb, lo, hi) = (self.x[b], self.lo[b], self.hi[b]);
                let limit = if phase1 && xb < lo - EPS_FEAS {
                    (rate > 0.0).then(|| ((lo - xb) / rate, lo))
                } else if phase1 && xb > hi + EPS_FEAS {
                    (rate < 0.0).then(|| ((xb - hi) / -rate, hi))
                } else if rate < 0.0 && lo.is_finite() {
                    Some(((xb - lo) / -rate, lo))
                } else if rate > 0.0 && hi.is_finite() {
                    Some(((hi - xb) / rate, hi))
                } else {
                    None
                };
                let Some((t, bound)) = limit else { continue };
                let t = t.max(0.0);
                let better = match leave {
                    _ if t < step - 1e-12 => true,
                    Some((lp, _)) if t <= step + 1e-12 => {
                        if bland {
                            b < self.basis[lp]
                        } else {
                            a.abs() > alpha[lp].abs()
                        }
                    }
                    None if t <= step + 1e-12 => !step.is_finite() || t < step,
                    _ => false,
                };
                if better {
                    step = t;
                    leave = Some((p, bound));
                }
            }

            if !step.is_finite() {
                if recovered < 3 {
                    recovered += 1;
                    self.refactor();
                    self.recompute_basics();
                    continue;
                }
                // Phase 1 is bounded below, so a ray there can only be drift.
                return if phase1 { LpStatus::Infeasible } else { LpStatus::Unbounded };
            }

            self.x[q] += dir * step;
            for (p, &a) in alpha.iter().enumerate() {
                if a != 0.0 {
                    self.x[self.basis[p]] -= dir * a * step;
                }
            }
            match leave {
                None => {
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                }
                Some((r, bound)) => {
                    let b = self.basis[r];
                    self.update_weights(&mut weights, q, r, alpha[r]);
                    self.x[b] = bound;
                    self.pivot(r, &alpha);
                    self.basis[r] = q;
                    self.pos[q] = r;
                    self.pos[b] = usize::MAX;
                }
            }
            degenerate = if step <= 1e-12 { degenerate + 1 } else { 0 };
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor();
                self.recompute_basics();
            }
        }
        LpStatus::IterationLimit
    }

    /// Devex reference weights, updated from the pivot row before the basis changes.
    fn update_weights(&self, weights: &mut [f64], q: usize, r: usize, alpha_r: f64) {
        let m = self.m;
        let rho: Vec<f64> = (0..m).map(|c| self.binv[c * m + r]).collect();
        let wq = weights[q].max(1.0);
        for j in 0..self.nv + m {
            if self.pos[j] != usize::MAX || j == q {
                continue;
            }
            let arj = if j < self.nv {
                self.cols[j].iter().map(|&(i, a)| rho[i] * a).sum::<f64>()
            } else {
                -rho[j - self.nv]
            };
            if arj != 0.0 {
                let ratio = arj / alpha_r;
                weights[j] = weights[j].max(ratio * ratio * wq);
            }
        }
        weights[self.basis[r]] = (wq / (alpha_r * alpha_r)).max(1.0);
    }
}
