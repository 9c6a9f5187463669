//! Convergence and truncation errors, refinement studies and the
//! nonzero-count bound.
//!
//! Truncation-error levels are stored shifted by one: storage index `i`
//! holds `ε^{i-1}`, so index 0 is the initial-position residual, index 1 the
//! first-step residual and index `k ≥ 2` the interior residual at time level
//! `k`. With this layout level `i` of either error field lives inside the
//! support cone of time level `i`.

use crate::continuous::{CauchyProblem, ExactSolution};
use crate::exec::Exec;
use crate::scheme::{check_cfl, sample_inputs, solve, DiscreteInputs, DiscreteSolution, GridSpec};
use crate::seqspace::{apply_ah_unchecked, dot, SupportSeq};
use crate::{Error, Result};

/// Storage index of `ε^{-1}`.
pub const TRUNCATION_OFFSET: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Convergence,
    Truncation,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Convergence => "convergence",
            ErrorKind::Truncation => "truncation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorField {
    pub levels: Vec<SupportSeq>,
    pub grid: GridSpec,
    pub kind: ErrorKind,
}

impl ErrorField {
    /// `ε^m` for `m ∈ [-1, k_max - 1]`. Only meaningful for truncation fields.
    pub fn truncation_level(&self, m: i64) -> Option<&SupportSeq> {
        let i = m + TRUNCATION_OFFSET as i64;
        usize::try_from(i).ok().and_then(|i| self.levels.get(i))
    }

    pub fn max_nonzero_count(&self) -> usize {
        self.levels.iter().map(SupportSeq::nonzero_count).max().unwrap_or(0)
    }
}

/// `ū^k_j = u(x_j, t^k)` on `[0, j_max]`.
pub fn sample_exact(grid: &GridSpec, exact: &ExactSolution, k: usize) -> SupportSeq {
    let t = grid.t(k);
    SupportSeq::from_fn(0, grid.j_max(), |j| exact.u(grid.x(j), t))
}

/// `e^k_j = ū^k_j - u^k_j`.
pub fn convergence_error(sol: &DiscreteSolution, exact: &ExactSolution) -> ErrorField {
    let grid = *sol.grid();
    let levels = sol
        .levels()
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let ubar = sample_exact(&grid, exact, k);
            SupportSeq::from_fn(0, grid.j_max(), |j| ubar.get(j) - u.get(j))
        })
        .collect();
    ErrorField {
        levels,
        grid,
        kind: ErrorKind::Convergence,
    }
}

/// Residuals of the sampled exact solution in the discrete equations:
///
/// ```text
/// ε^{-1}  = ū^0 - u_{0h}
/// ε^0     = (ū^1 - ū^0)/Δt + (Δt/2) A_h ū^0 - u_{1h}
/// ε^{k-1} = (ū^k - 2ū^{k-1} + ū^{k-2})/Δt² + A_h ū^{k-1} - s^{k-1}    k ≥ 2
/// ```
pub fn truncation_error(grid: &GridSpec, exact: &ExactSolution, prob: &CauchyProblem) -> ErrorField {
    let inputs = sample_inputs(prob, grid);
    let (c, dx, dt) = (grid.c(), grid.dx(), grid.dt());
    let j_max = grid.j_max();
    let ubar: Vec<SupportSeq> = (0..=grid.k_max()).map(|k| sample_exact(grid, exact, k)).collect();

    let mut levels = Vec::with_capacity(grid.k_max() + 1);
    levels.push(SupportSeq::from_fn(0, j_max, |j| ubar[0].get(j) - inputs.u0h.get(j)));
    if grid.k_max() >= 1 {
        let a = apply_ah_unchecked(&ubar[0], c, dx);
        levels.push(SupportSeq::from_fn(0, j_max, |j| {
            (ubar[1].get(j) - ubar[0].get(j)) / dt + dt / 2.0 * a.get(j) - inputs.u1h.get(j)
        }));
    }
    let dt2 = dt * dt;
    for k in 2..=grid.k_max() {
        let a = apply_ah_unchecked(&ubar[k - 1], c, dx);
        let s = &inputs.sh[k - 1];
        levels.push(SupportSeq::from_fn(0, j_max, |j| {
            (ubar[k].get(j) - 2.0 * ubar[k - 1].get(j) + ubar[k - 2].get(j)) / dt2 + a.get(j) - s.get(j)
        }));
    }
    ErrorField {
        levels,
        grid: *grid,
        kind: ErrorKind::Truncation,
    }
}

/// `max_k ‖level k‖_Δx`.
pub fn max_norm_over_time(field: &ErrorField) -> f64 {
    let dx = field.grid.dx();
    field
        .levels
        .iter()
        .map(|l| (dx * dot(l, l)).sqrt())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementRow {
    pub level: u32,
    pub dx: f64,
    pub dt: f64,
    pub courant: f64,
    pub max_norm: f64,
}

/// Least-squares fit `ln(max_norm) ≈ order·ln(dx) + ln(constant)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub order: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    pub kind: ErrorKind,
    pub rows: Vec<RefinementRow>,
    /// `None` when some norm is zero and no slope exists (e.g. the zero problem).
    pub fit: Option<OrderFit>,
    pub courant: f64,
}

impl RefinementReport {
    pub fn is_degenerate(&self) -> bool {
        self.fit.is_none()
    }

    pub fn fitted_order(&self) -> Option<f64> {
        self.fit.map(|f| f.order)
    }

    /// Strictly decreasing `max_norm` from one level to the next.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].max_norm < w[0].max_norm)
    }
}

/// Ordinary least squares on `(ln dx, ln norm)`.
pub fn fit_order(points: &[(f64, f64)]) -> Option<OrderFit> {
    if points.len() < 2 || points.iter().any(|&(dx, n)| !(dx > 0.0 && n > 0.0 && n.is_finite())) {
        return None;
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(dx, e)| (a + dx.ln(), b + e.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = points.iter().fold((0.0, 0.0), |(a, b), &(dx, e)| {
        let x = dx.ln() - mx;
        (a + x * x, b + x * (e.ln() - my))
    });
    if sxx == 0.0 {
        return None;
    }
    let order = sxy / sxx;
    Some(OrderFit {
        order,
        constant: (my - order * mx).exp(),
    })
}

/// Solve on `grid` and compute the requested error field.
pub fn study_level(
    prob: &CauchyProblem,
    exact: &ExactSolution,
    grid: &GridSpec,
    kind: ErrorKind,
) -> Result<(DiscreteSolution, ErrorField)> {
    let inputs = sample_inputs(prob, grid);
    let sol = solve(grid, &inputs)?;
    let field = match kind {
        ErrorKind::Convergence => convergence_error(&sol, exact),
        ErrorKind::Truncation => truncation_error(grid, exact, prob),
    };
    Ok((sol, field))
}

pub fn refinement_study(
    prob: &CauchyProblem,
    exact: &ExactSolution,
    base: &GridSpec,
    levels: u32,
    kind: ErrorKind,
) -> Result<RefinementReport> {
    refinement_study_with(prob, exact, base, levels, kind, Exec::default())
}

/// [`refinement_study`] with an explicit execution strategy; levels are
/// independent and merged in level order.
pub fn refinement_study_with(
    prob: &CauchyProblem,
    exact: &ExactSolution,
    base: &GridSpec,
    levels: u32,
    kind: ErrorKind,
    exec: Exec,
) -> Result<RefinementReport> {
    if levels < 3 {
        return Err(Error::invalid("levels", format!("need at least 3, got {levels}")));
    }
    let grids = (0..levels).map(|l| base.refined(l)).collect::<Result<Vec<_>>>()?;
    if let Some(g) = grids.iter().find(|g| !check_cfl(g)) {
        return Err(Error::Cfl {
            courant: g.courant(),
            zeta: g.zeta(),
            xi: g.xi(),
        });
    }
    let norms = exec.map_range(grids.len(), |l| {
        study_level(prob, exact, &grids[l], kind).map(|(_, f)| max_norm_over_time(&f))
    });
    let mut rows = Vec::with_capacity(grids.len());
    for (l, (g, norm)) in grids.iter().zip(norms).enumerate() {
        let max_norm = norm?;
        if !max_norm.is_finite() {
            return Err(Error::NonFinite { level: l });
        }
        rows.push(RefinementRow {
            level: l as u32,
            dx: g.dx(),
            dt: g.dt(),
            courant: g.courant(),
            max_norm,
        });
    }
    let points: Vec<_> = rows.iter().map(|r| (r.dx, r.max_norm)).collect();
    Ok(RefinementReport {
        kind,
        fit: fit_order(&points),
        courant: base.courant(),
        rows,
    })
}

/// `(max_k N_k·Δx², (χ₂ - χ₁) + 2·t_max·c + 2·c·t_max/ζ)` where `N_k` is the
/// number of exactly-nonzero entries of level `k`.
pub fn nonzero_count_bound(grid: &GridSpec, prob: &CauchyProblem, field: &ErrorField) -> (f64, f64) {
    let (chi1, chi2) = prob.chi();
    let (c, t_max) = (grid.c(), grid.t_max());
    let lhs = field.max_nonzero_count() as f64 * grid.dx() * grid.dx();
    let rhs = (chi2 - chi1) + 2.0 * t_max * c + 2.0 * c * t_max / grid.zeta();
    (lhs, rhs)
}

/// Inputs under which the scheme reproduces the convergence error:
/// `u_{0h} = 0`, `u_{1h} = e^1/Δt`, `s^k = ε^k` (storage index `k + 1`).
/// Requires `e^0 = 0`, i.e. exactly sampled initial position.
pub fn error_scheme_inputs(conv: &ErrorField, trunc: &ErrorField) -> DiscreteInputs {
    let grid = &conv.grid;
    let dt = grid.dt();
    let u1h = match conv.levels.get(1) {
        Some(e1) => SupportSeq::from_fn(e1.lo(), e1.hi(), |j| e1.get(j) / dt),
        None => SupportSeq::zero(),
    };
    let sh = (0..=grid.k_max())
        .map(|k| {
            trunc
                .levels
                .get(k + TRUNCATION_OFFSET)
                .cloned()
                .unwrap_or_default()
        })
        .collect();
    DiscreteInputs {
        u0h: SupportSeq::zero(),
        u1h,
        sh,
    }
}
