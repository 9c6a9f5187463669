//! Regular space-time grid and the explicit three-point scheme
//!
//! ```text
//! (u^k_j - 2u^{k-1}_j + u^{k-2}_j)/Δt² + (A_h u^{k-1})_j = s^{k-1}_j   k ≥ 2
//! (u^1_j - u^0_j)/Δt + (Δt/2)(A_h u^0)_j = u_{1,j}
//! u^0_j = u_{0,j}
//! u^k_{-1} = u^k_{j_max+1} = 0
//! ```
//!
//! solved for the newest level at each step.

use crate::continuous::{support_interval, CauchyProblem};
use crate::seqspace::{apply_ah_unchecked, SupportSeq};
use crate::{Error, Result};

/// Discretization of `[x_min, x_max] × [0, t_max]` with CFL parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    t_max: f64,
    dx: f64,
    dt: f64,
    c: f64,
    zeta: f64,
    xi: f64,
    j_max: i64,
    k_max: usize,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

fn unit_open(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must lie in (0, 1), got {v}")))
    }
}

impl GridSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x_min: f64,
        x_max: f64,
        t_max: f64,
        dx: f64,
        dt: f64,
        c: f64,
        zeta: f64,
        xi: f64,
    ) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::invalid(
                "x_min/x_max",
                format!("need finite x_min < x_max, got [{x_min}, {x_max}]"),
            ));
        }
        positive("t_max", t_max)?;
        positive("dx", dx)?;
        positive("dt", dt)?;
        positive("c", c)?;
        unit_open("zeta", zeta)?;
        unit_open("xi", xi)?;
        if zeta > 1.0 - xi {
            return Err(Error::invalid(
                "zeta",
                format!("need zeta <= 1 - xi, got zeta = {zeta}, xi = {xi}"),
            ));
        }
        let j_max = ((x_max - x_min) / dx).floor() as i64;
        let k_max = (t_max / dt).floor() as usize;
        Ok(Self {
            x_min,
            x_max,
            t_max,
            dx,
            dt,
            c,
            zeta,
            xi,
            j_max,
            k_max,
        })
    }

    /// Same domain and CFL parameters with both steps divided by `2^level`.
    pub fn refined(&self, level: u32) -> Result<Self> {
        let f = (1u64 << level) as f64;
        Self::new(
            self.x_min,
            self.x_max,
            self.t_max,
            self.dx / f,
            self.dt / f,
            self.c,
            self.zeta,
            self.xi,
        )
    }

    /// Same domain with a different time step.
    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Self::new(
            self.x_min, self.x_max, self.t_max, self.dx, dt, self.c, self.zeta, self.xi,
        )
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn t_max(&self) -> f64 {
        self.t_max
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn zeta(&self) -> f64 {
        self.zeta
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }
    pub fn j_max(&self) -> i64 {
        self.j_max
    }
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Courant number `c·Δt/Δx`.
    pub fn courant(&self) -> f64 {
        self.c * self.dt / self.dx
    }

    #[inline]
    pub fn x(&self, j: i64) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    #[inline]
    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Index window `[floor((a - x_min)/Δx), ceil((b - x_min)/Δx)]`
    /// intersected with `[0, j_max]`; `None` when the intersection is empty.
    pub fn index_window(&self, a: f64, b: f64) -> Option<(i64, i64)> {
        let lo = ((a - self.x_min) / self.dx).floor().max(0.0);
        let hi = ((b - self.x_min) / self.dx).ceil().min(self.j_max as f64);
        (lo <= hi).then_some((lo as i64, hi as i64))
    }
}

/// `floor(t/Δt)`, clamped to `[0, k_max]`.
pub fn time_index(grid: &GridSpec, t: f64) -> Result<usize> {
    if !(0.0..=grid.t_max).contains(&t) {
        return Err(Error::OutOfRange {
            what: "t",
            value: t,
            lo: 0.0,
            hi: grid.t_max,
        });
    }
    Ok(((t / grid.dt).floor() as usize).min(grid.k_max))
}

/// `floor((x - x_min)/Δx)`, clamped to `[0, j_max]`.
pub fn space_index(grid: &GridSpec, x: f64) -> Result<i64> {
    if !(grid.x_min..=grid.x_max).contains(&x) {
        return Err(Error::OutOfRange {
            what: "x",
            value: x,
            lo: grid.x_min,
            hi: grid.x_max,
        });
    }
    Ok((((x - grid.x_min) / grid.dx).floor() as i64).clamp(0, grid.j_max))
}

/// `zeta ≤ c·Δt/Δx ≤ 1 - xi`.
pub fn check_cfl(grid: &GridSpec) -> bool {
    let r = grid.courant();
    grid.zeta <= r && r <= 1.0 - grid.xi
}

fn require_cfl(grid: &GridSpec) -> Result<()> {
    if check_cfl(grid) {
        Ok(())
    } else {
        Err(Error::Cfl {
            courant: grid.courant(),
            zeta: grid.zeta,
            xi: grid.xi,
        })
    }
}

/// Discrete Cauchy data `u_{0h}`, `u_{1h}` and source levels `s_h^k`,
/// `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteInputs {
    pub u0h: SupportSeq,
    pub u1h: SupportSeq,
    pub sh: Vec<SupportSeq>,
}

impl DiscreteInputs {
    pub fn zero(grid: &GridSpec) -> Self {
        Self {
            u0h: SupportSeq::zero(),
            u1h: SupportSeq::zero(),
            sh: vec![SupportSeq::zero(); grid.k_max + 1],
        }
    }

    /// Union of the stored windows of `u0h`, `u1h` and `sh[0]`; the level-0
    /// bounds the support cone starts from.
    pub fn initial_window(&self) -> Option<(i64, i64)> {
        [&self.u0h, &self.u1h]
            .into_iter()
            .chain(self.sh.first())
            .filter(|s| !s.is_empty())
            .map(|s| (s.lo(), s.hi()))
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }
}

fn sample_window(grid: &GridSpec, window: Option<(i64, i64)>, f: impl Fn(f64) -> f64) -> SupportSeq {
    match window {
        Some((lo, hi)) => SupportSeq::from_fn(lo, hi, |j| f(grid.x(j))),
        None => SupportSeq::zero(),
    }
}

/// Samples `u0`, `u1` and `s` at the grid nodes. Windows come from the
/// problem's support bounds (growing at speed `c` for the source), clipped to
/// `[0, j_max]`.
pub fn sample_inputs(prob: &CauchyProblem, grid: &GridSpec) -> DiscreteInputs {
    let (chi1, chi2) = prob.chi();
    let w0 = grid.index_window(chi1, chi2);
    let u0h = sample_window(grid, w0, |x| prob.u0(x));
    let u1h = sample_window(grid, w0, |x| prob.u1(x));
    let sh = (0..=grid.k_max)
        .map(|k| {
            let t = grid.t(k);
            let (a, b) = support_interval(prob, t).expect("grid times are nonnegative");
            sample_window(grid, grid.index_window(a, b), |x| prob.s(x, t))
        })
        .collect();
    DiscreteInputs { u0h, u1h, sh }
}

/// Full space-time history `u_h^k`, `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    grid: GridSpec,
    levels: Vec<SupportSeq>,
}

impl DiscreteSolution {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn levels(&self) -> &[SupportSeq] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &SupportSeq {
        &self.levels[k]
    }

    pub fn is_finite(&self) -> bool {
        self.levels.iter().all(SupportSeq::is_finite)
    }
}

fn union_bounds<'a>(seqs: impl IntoIterator<Item = &'a SupportSeq>, j_max: i64) -> Option<(i64, i64)> {
    let (lo, hi) = seqs
        .into_iter()
        .filter(|s| !s.is_empty())
        .map(|s| (s.lo(), s.hi()))
        .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))?;
    let (lo, hi) = (lo.max(0), hi.min(j_max));
    (lo <= hi).then_some((lo, hi))
}

/// `u^1 = u^0 + Δt·u_{1h} - (Δt²/2)·A_h u^0`, the first-step relation
/// rearranged for `u^1`.
fn first_step(grid: &GridSpec, u0: &SupportSeq, u1h: &SupportSeq) -> SupportSeq {
    let a = apply_ah_unchecked(u0, grid.c, grid.dx);
    let dt = grid.dt;
    let half_dt2 = dt * dt / 2.0;
    match union_bounds([u0, u1h, &a], grid.j_max) {
        Some((lo, hi)) => {
            SupportSeq::from_fn(lo, hi, |j| u0.get(j) + dt * u1h.get(j) - half_dt2 * a.get(j))
        }
        None => SupportSeq::zero(),
    }
}

/// `u^k = 2u^{k-1} - u^{k-2} + Δt²·(s^{k-1} - A_h u^{k-1})`.
fn leapfrog_step(grid: &GridSpec, older: &SupportSeq, old: &SupportSeq, s: &SupportSeq) -> SupportSeq {
    let a = apply_ah_unchecked(old, grid.c, grid.dx);
    let dt2 = grid.dt * grid.dt;
    match union_bounds([older, old, s, &a], grid.j_max) {
        Some((lo, hi)) => SupportSeq::from_fn(lo, hi, |j| {
            2.0 * old.get(j) - older.get(j) + dt2 * (s.get(j) - a.get(j))
        }),
        None => SupportSeq::zero(),
    }
}

fn check_levels(grid: &GridSpec, inputs: &DiscreteInputs) -> Result<()> {
    if inputs.sh.len() != grid.k_max + 1 {
        return Err(Error::LevelCount {
            expected: grid.k_max + 1,
            got: inputs.sh.len(),
        });
    }
    Ok(())
}

/// Runs the scheme on a grid that satisfies the CFL condition.
pub fn solve(grid: &GridSpec, inputs: &DiscreteInputs) -> Result<DiscreteSolution> {
    require_cfl(grid)?;
    let sol = solve_unchecked(grid, inputs)?;
    if let Some(level) = sol.levels.iter().position(|l| !l.is_finite()) {
        return Err(Error::NonFinite { level });
    }
    Ok(sol)
}

/// Runs the scheme without checking CFL or finiteness. Exists for the
/// instability demonstration; everything else goes through [`solve`].
pub fn solve_unchecked(grid: &GridSpec, inputs: &DiscreteInputs) -> Result<DiscreteSolution> {
    check_levels(grid, inputs)?;
    let mut levels = Vec::with_capacity(grid.k_max + 1);
    levels.push(inputs.u0h.clip(0, grid.j_max));
    if grid.k_max >= 1 {
        levels.push(first_step(grid, &levels[0], &inputs.u1h));
    }
    for k in 2..=grid.k_max {
        let next = leapfrog_step(grid, &levels[k - 2], &levels[k - 1], &inputs.sh[k - 1]);
        levels.push(next);
    }
    Ok(DiscreteSolution {
        grid: *grid,
        levels,
    })
}

/// Last two levels of a solve that keeps only a two-level window in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingState {
    /// Index of `current`.
    pub k: usize,
    /// `u^{k-1}`, zero when `k = 0`.
    pub previous: SupportSeq,
    pub current: SupportSeq,
}

/// [`solve`] with `O(j_max)` memory; returns the final two levels only.
pub fn solve_rolling(grid: &GridSpec, inputs: &DiscreteInputs) -> Result<RollingState> {
    require_cfl(grid)?;
    check_levels(grid, inputs)?;
    let u0 = inputs.u0h.clip(0, grid.j_max);
    if grid.k_max == 0 {
        return Ok(RollingState {
            k: 0,
            previous: SupportSeq::zero(),
            current: u0,
        });
    }
    let mut older = u0;
    let mut old = first_step(grid, &older, &inputs.u1h);
    for k in 2..=grid.k_max {
        let next = leapfrog_step(grid, &older, &old, &inputs.sh[k - 1]);
        if !next.is_finite() {
            return Err(Error::NonFinite { level: k });
        }
        older = std::mem::replace(&mut old, next);
    }
    Ok(RollingState {
        k: grid.k_max,
        previous: older,
        current: old,
    })
}

/// Predicted index window of level `k`: the level-0 bounds widened by
/// `k·ceil(c·Δt/Δx)` on each side.
pub fn support_cone(grid: &GridSpec, bounds: (i64, i64), k: usize) -> (i64, i64) {
    let spread = grid.courant().ceil() as i64 * k as i64;
    (bounds.0 - spread, bounds.1 + spread)
}

/// One row of a cone check: predicted window, observed nonzero bounds, and
/// the number of nonzero entries outside the prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeRow {
    pub k: usize,
    pub predicted: (i64, i64),
    pub actual: Option<(i64, i64)>,
    pub violations: usize,
}

/// Compares every level against [`support_cone`] using exact zero tests.
/// An absent `bounds` predicts the zero sequence everywhere.
pub fn cone_check(grid: &GridSpec, bounds: Option<(i64, i64)>, levels: &[SupportSeq]) -> Vec<ConeRow> {
    levels
        .iter()
        .enumerate()
        .map(|(k, level)| {
            let predicted = match bounds {
                Some(b) => support_cone(grid, b, k),
                None => (0, -1),
            };
            let violations = level
                .iter()
                .filter(|&(j, v)| v != 0.0 && (j < predicted.0 || j > predicted.1))
                .count();
            ConeRow {
                k,
                predicted,
                actual: level.nonzero_bounds(),
                violations,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuous::traveling_bump_problem;
    use crate::seqspace::combine;
    use proptest::prelude::*;

    fn grid(x_min: f64, x_max: f64, t_max: f64, dx: f64, dt: f64) -> GridSpec {
        GridSpec::new(x_min, x_max, t_max, dx, dt, 1.0, 0.3, 0.2).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1.0, 0.0, 1.0, 0.1, 0.05, 1.0, 0.3, 0.2).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.0, 0.1, 0.05, 1.0, 0.3, 0.2).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1.0, -0.1, 0.05, 1.0, 0.3, 0.2).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1.0, 0.1, 0.05, 1.0, 0.0, 0.2).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1.0, 0.1, 0.05, 1.0, 0.9, 0.2).is_err());
        let g = grid(-3.0, 3.0, 2.0, 0.25, 0.1);
        assert_eq!(g.j_max(), 24);
        assert_eq!(g.k_max(), 20);
    }

    #[test]
    fn time_index_examples() {
        let g = grid(0.0, 1.0, 3.0, 1.0, 0.5);
        assert_eq!(time_index(&g, 0.0).unwrap(), 0);
        assert_eq!(time_index(&g, 1.25).unwrap(), 2);
        assert_eq!(time_index(&g, 1.0).unwrap(), 2);
        assert_eq!(time_index(&g, 3.0).unwrap(), g.k_max());
        assert!(time_index(&g, -0.1).is_err());
        assert!(time_index(&g, 3.5).is_err());
    }

    #[test]
    fn space_index_examples() {
        let g = grid(-3.0, 3.0, 1.0, 0.25, 0.1);
        assert_eq!(space_index(&g, -3.0).unwrap(), 0);
        assert_eq!(space_index(&g, -2.4).unwrap(), 2);
        assert_eq!(space_index(&g, 3.0).unwrap(), g.j_max());
        assert!(space_index(&g, 3.1).is_err());
    }

    #[test]
    fn check_cfl_examples() {
        let g = GridSpec::new(0.0, 10.0, 5.0, 1.0, 0.5, 1.0, 0.3, 0.2).unwrap();
        assert!(check_cfl(&g));
        let g = GridSpec::new(0.0, 10.0, 5.0, 1.0, 1.1, 1.0, 0.3, 0.05).unwrap();
        assert!(!check_cfl(&g));
        let g = GridSpec::new(0.0, 10.0, 5.0, 1.0, 0.1, 1.0, 0.3, 0.2).unwrap();
        assert!(!check_cfl(&g));
    }

    #[test]
    fn sample_inputs_examples() {
        let g = grid(-4.0, 4.0, 1.0, 1.0, 0.5);
        let zero = CauchyProblem::zero(1.0, -1.0, 1.0).unwrap();
        let z = sample_inputs(&zero, &g);
        assert!(z.u0h.is_zero() && z.u1h.is_zero());
        assert!(z.sh.iter().all(SupportSeq::is_zero));
        assert_eq!(z.sh.len(), g.k_max() + 1);

        let (bump, _) = traveling_bump_problem(0.0, 1.0, 6, 1.0).unwrap();
        let b = sample_inputs(&bump, &g);
        assert!(b.u0h.lo() >= 3 && b.u0h.hi() <= 5);
        assert_eq!(b.u0h.get(4), 1.0);
        assert!(b.sh[0].is_zero());
    }

    #[test]
    fn level_count_and_cfl_errors() {
        let g = grid(0.0, 4.0, 1.0, 0.5, 0.25);
        let mut inputs = DiscreteInputs::zero(&g);
        inputs.sh.pop();
        assert_eq!(
            solve(&g, &inputs),
            Err(Error::LevelCount {
                expected: g.k_max() + 1,
                got: g.k_max()
            })
        );
        let bad = grid(0.0, 4.0, 1.0, 0.5, 0.5);
        assert!(matches!(
            solve(&bad, &DiscreteInputs::zero(&bad)),
            Err(Error::Cfl { .. })
        ));
        assert!(solve_unchecked(&bad, &DiscreteInputs::zero(&bad)).is_ok());
    }

    #[test]
    fn zero_inputs_give_zero_solution() {
        let g = grid(0.0, 4.0, 2.0, 0.5, 0.25);
        let sol = solve(&g, &DiscreteInputs::zero(&g)).unwrap();
        assert_eq!(sol.levels().len(), g.k_max() + 1);
        assert!(sol.levels().iter().all(SupportSeq::is_zero));
    }

    fn delta_inputs(g: &GridSpec, j: i64) -> DiscreteInputs {
        DiscreteInputs {
            u0h: SupportSeq::delta(j),
            ..DiscreteInputs::zero(g)
        }
    }

    #[test]
    fn first_step_by_hand() {
        let g = grid(0.0, 20.0, 5.0, 1.0, 0.5);
        let sol = solve(&g, &delta_inputs(&g, 10)).unwrap();
        let u1 = sol.level(1);
        assert_eq!(u1.get(10), 0.75);
        assert_eq!(u1.get(9), 0.125);
        assert_eq!(u1.get(11), 0.125);
        assert_eq!(u1.nonzero_count(), 3);
    }

    #[test]
    fn second_step_by_hand() {
        let g = grid(0.0, 20.0, 5.0, 1.0, 0.5);
        let sol = solve(&g, &delta_inputs(&g, 10)).unwrap();
        // u² = 2u¹ - u⁰ - ¼ A_h u¹ with u¹ = {⅛, ¾, ⅛}
        let want = [(8, 0.03125), (9, 0.375), (10, 0.1875), (11, 0.375), (12, 0.03125)];
        let u2 = sol.level(2);
        for (j, v) in want {
            assert!((u2.get(j) - v).abs() < 1e-15, "j={j}: {} vs {v}", u2.get(j));
        }
    }

    /// Literal transcription of the scheme on a dense array with the two
    /// artificial indices stored explicitly.
    fn naive_solve(g: &GridSpec, inputs: &DiscreteInputs) -> Vec<Vec<f64>> {
        let n = g.j_max() as usize + 3; // j = -1 ..= j_max + 1
        let (c, dx, dt) = (g.c(), g.dx(), g.dt());
        let ah = |v: &Vec<f64>, i: usize| -(c * c) * (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dx * dx);
        let mut u = vec![vec![0.0; n]; g.k_max() + 1];
        for i in 1..n - 1 {
            u[0][i] = inputs.u0h.get(i as i64 - 1);
        }
        if g.k_max() >= 1 {
            for i in 1..n - 1 {
                let a = ah(&u[0], i);
                u[1][i] = u[0][i] + dt * inputs.u1h.get(i as i64 - 1) - dt * dt / 2.0 * a;
            }
        }
        for k in 2..=g.k_max() {
            for i in 1..n - 1 {
                let a = ah(&u[k - 1], i);
                let s = inputs.sh[k - 1].get(i as i64 - 1);
                u[k][i] = 2.0 * u[k - 1][i] - u[k - 2][i] + dt * dt * (s - a);
            }
        }
        u
    }

    fn same_bits(a: f64, b: f64) -> bool {
        a.to_bits() == b.to_bits() || (a == 0.0 && b == 0.0)
    }

    #[test]
    fn matches_naive_loops_bitwise() {
        let (bump, _) = traveling_bump_problem(0.1, 0.6, 6, 1.0).unwrap();
        for (dx, dt) in [(0.1, 0.05), (0.1, 0.07), (0.15, 0.1)] {
            let g = grid(-1.0, 1.0, 1.0, dx, dt);
            assert!(g.j_max() <= 20 && g.k_max() <= 20);
            let mut inputs = sample_inputs(&bump, &g);
            for (k, s) in inputs.sh.iter_mut().enumerate().skip(1) {
                *s = SupportSeq::from_fn(3, 12, |j| ((j * 7 + k as i64 * 3) % 5) as f64 - 2.0);
            }
            let sol = solve(&g, &inputs).unwrap();
            let naive = naive_solve(&g, &inputs);
            for k in 0..=g.k_max() {
                for j in -1..=g.j_max() + 1 {
                    let want = naive[k][(j + 1) as usize];
                    assert!(same_bits(sol.level(k).get(j), want), "k={k} j={j}");
                }
            }
        }
    }

    #[test]
    fn rolling_matches_full_history() {
        let (bump, _) = traveling_bump_problem(0.0, 1.0, 6, 1.0).unwrap();
        let g = grid(-4.0, 4.0, 2.0, 0.1, 0.05);
        let inputs = sample_inputs(&bump, &g);
        let full = solve(&g, &inputs).unwrap();
        let tail = solve_rolling(&g, &inputs).unwrap();
        assert_eq!(tail.k, g.k_max());
        assert_eq!(&tail.current, full.level(g.k_max()));
        assert_eq!(&tail.previous, full.level(g.k_max() - 1));
    }

    #[test]
    fn solve_is_deterministic() {
        let (bump, _) = traveling_bump_problem(0.3, 0.8, 6, 1.0).unwrap();
        let g = grid(-4.0, 4.0, 2.0, 0.05, 0.03);
        let inputs = sample_inputs(&bump, &g);
        let a = solve(&g, &inputs).unwrap();
        let b = solve(&g, &inputs).unwrap();
        for (x, y) in a.levels().iter().zip(b.levels()) {
            assert_eq!(x.lo(), y.lo());
            assert!(x.values().iter().zip(y.values()).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }

    #[test]
    fn support_cone_examples() {
        let g = grid(0.0, 20.0, 5.0, 1.0, 0.5);
        assert_eq!(support_cone(&g, (3, 5), 0), (3, 5));
        assert_eq!(support_cone(&g, (3, 5), 4), (-1, 9));
    }

    #[test]
    fn bump_solutions_stay_inside_the_cone() {
        for (center, hw, dt) in [(0.0, 1.0, 0.05), (-1.3, 0.4, 0.08), (2.0, 0.7, 0.031)] {
            let (bump, _) = traveling_bump_problem(center, hw, 6, 1.0).unwrap();
            let g = grid(-6.0, 6.0, 2.0, 0.1, dt);
            let inputs = sample_inputs(&bump, &g);
            let sol = solve(&g, &inputs).unwrap();
            let rows = cone_check(&g, inputs.initial_window(), sol.levels());
            assert!(rows.iter().all(|r| r.violations == 0));
            // the front really does advance one index per step
            let first = rows[0].actual.unwrap();
            for r in &rows {
                assert_eq!(r.actual.unwrap().1, (first.1 + r.k as i64).min(g.j_max()));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn scheme_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0,
                            seed_a in prop::collection::vec(-1.0f64..1.0, 8),
                            seed_b in prop::collection::vec(-1.0f64..1.0, 8)) {
            let g = grid(0.0, 3.0, 1.0, 0.1, 0.07);
            let mk = |v: &[f64]| DiscreteInputs {
                u0h: SupportSeq::new(10, v.to_vec()),
                u1h: SupportSeq::new(12, v.iter().rev().cloned().collect()),
                sh: (0..=g.k_max()).map(|k| SupportSeq::new(9 + k as i64 % 3, v.to_vec())).collect(),
            };
            let (ia, ib) = (mk(&seed_a), mk(&seed_b));
            let mixed = DiscreteInputs {
                u0h: combine(a, &ia.u0h, b, &ib.u0h),
                u1h: combine(a, &ia.u1h, b, &ib.u1h),
                sh: ia.sh.iter().zip(&ib.sh).map(|(x, y)| combine(a, x, b, y)).collect(),
            };
            let sa = solve(&g, &ia).unwrap();
            let sb = solve(&g, &ib).unwrap();
            let sm = solve(&g, &mixed).unwrap();
            for k in 0..=g.k_max() {
                let scale = 1.0 + a.abs() * sa.level(k).max_abs() + b.abs() * sb.level(k).max_abs();
                for j in 0..=g.j_max() {
                    let want = a * sa.level(k).get(j) + b * sb.level(k).get(j);
                    prop_assert!((sm.level(k).get(j) - want).abs() <= 1e-12 * scale);
                }
            }
        }
    }
}
