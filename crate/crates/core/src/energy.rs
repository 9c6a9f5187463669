//! Discrete energy
//!
//! ```text
//! E^{k+½} = ½‖(u^{k+1} - u^k)/Δt‖²_Δx + ½⟨A_h u^k, u^{k+1}⟩_Δx
//! ```
//!
//! and the three facts about it that make the scheme stable: the per-step
//! increment identity, the lower bound (nonnegativity under CFL) and the
//! growth bound driven by the source.

use crate::scheme::{check_cfl, time_index, DiscreteSolution, GridSpec};
use crate::seqspace::{apply_ah_unchecked, dot, SupportSeq};
use crate::{Error, Result};

/// Relative tolerance for every energy identity and inequality. Scales are
/// `1 + |magnitudes involved|`; see each check.
pub const ENERGY_RTOL: f64 = 1e-10;

/// Growth of `|E|` over `1 + |E^{½}|` that counts as a blow-up.
pub const BLOWUP_FACTOR: f64 = 1e3;

fn half_step_range(sol: &DiscreteSolution, k: usize) -> Result<()> {
    let k_max = sol.grid().k_max();
    if k_max == 0 || k > k_max - 1 {
        return Err(Error::OutOfRange {
            what: "k",
            value: k as f64,
            lo: 0.0,
            hi: k_max as f64 - 1.0,
        });
    }
    Ok(())
}

/// `(u^{k+1} - u^k)/Δt`.
fn velocity(sol: &DiscreteSolution, k: usize) -> SupportSeq {
    let (a, b) = (sol.level(k + 1), sol.level(k));
    let dt = sol.grid().dt();
    let lo = a.lo().min(b.lo());
    let hi = a.hi().max(b.hi());
    SupportSeq::from_fn(lo, hi, |j| (a.get(j) - b.get(j)) / dt)
}

/// Kinetic part `‖(u^{k+1} - u^k)/Δt‖²_Δx`.
fn kinetic(sol: &DiscreteSolution, k: usize) -> f64 {
    let v = velocity(sol, k);
    sol.grid().dx() * dot(&v, &v)
}

fn energy_unchecked(sol: &DiscreteSolution, k: usize) -> f64 {
    let g = sol.grid();
    let a = apply_ah_unchecked(sol.level(k), g.c(), g.dx());
    0.5 * kinetic(sol, k) + 0.5 * g.dx() * dot(&a, sol.level(k + 1))
}

/// `E^{k+½}` for `0 ≤ k ≤ k_max - 1`.
pub fn discrete_energy(sol: &DiscreteSolution, k: usize) -> Result<f64> {
    half_step_range(sol, k)?;
    Ok(energy_unchecked(sol, k))
}

/// `E^{k+½}` for every half step, `k = 0..k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace {
    pub values: Vec<f64>,
    pub dt: f64,
}

impl EnergyTrace {
    /// Time of half step `k`, i.e. `(k + ½)Δt`.
    pub fn time(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dt
    }

    /// `max_k |E^{k+½} - E^{½}|`.
    pub fn max_drift(&self) -> f64 {
        let e0 = self.values.first().copied().unwrap_or(0.0);
        self.values.iter().fold(0.0, |m, e| m.max((e - e0).abs()))
    }

    /// `max_k |E^{k+½}| / (1 + |E^{½}|)`.
    pub fn growth_ratio(&self) -> f64 {
        let e0 = self.values.first().copied().unwrap_or(0.0);
        let peak = self.values.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        peak / (1.0 + e0.abs())
    }

    /// True when some `|E|` is non-finite or exceeds `BLOWUP_FACTOR·(1 + |E^{½}|)`.
    pub fn blew_up(&self) -> bool {
        self.values.iter().any(|e| !e.is_finite()) || self.growth_ratio() > BLOWUP_FACTOR
    }
}

pub fn energy_trace(sol: &DiscreteSolution) -> EnergyTrace {
    let n = sol.grid().k_max();
    EnergyTrace {
        values: (0..n).map(|k| energy_unchecked(sol, k)).collect(),
        dt: sol.grid().dt(),
    }
}

fn check_sources(sol: &DiscreteSolution, sh: &[SupportSeq]) -> Result<()> {
    let expected = sol.grid().k_max() + 1;
    if sh.len() != expected {
        return Err(Error::LevelCount {
            expected,
            got: sh.len(),
        });
    }
    Ok(())
}

fn residual_unchecked(sol: &DiscreteSolution, sh: &[SupportSeq], k: usize) -> (f64, f64) {
    let g = sol.grid();
    let e_plus = energy_unchecked(sol, k);
    let e_minus = energy_unchecked(sol, k - 1);
    let (a, b) = (sol.level(k + 1), sol.level(k - 1));
    let work = g.dx() * sh[k].iter().map(|(j, s)| (a.get(j) - b.get(j)) * s).sum::<f64>();
    let residual = ((e_plus - e_minus) - 0.5 * work).abs();
    (residual, 1.0 + e_plus.abs() + e_minus.abs())
}

/// `|E^{k+½} - E^{k-½} - ½⟨u^{k+1} - u^{k-1}, s^k⟩_Δx|` for `1 ≤ k ≤ k_max - 1`.
///
/// Zero in exact arithmetic; compare against
/// `ENERGY_RTOL·(1 + |E^{k+½}| + |E^{k-½}|)`.
pub fn energy_increment_residual(sol: &DiscreteSolution, sh: &[SupportSeq], k: usize) -> Result<f64> {
    check_sources(sol, sh)?;
    if k == 0 {
        return Err(Error::OutOfRange {
            what: "k",
            value: 0.0,
            lo: 1.0,
            hi: sol.grid().k_max() as f64 - 1.0,
        });
    }
    half_step_range(sol, k)?;
    Ok(residual_unchecked(sol, sh, k).0)
}

fn gap_unchecked(sol: &DiscreteSolution, k: usize) -> (f64, f64) {
    let r = sol.grid().courant();
    let e = energy_unchecked(sol, k);
    (e - 0.5 * (1.0 - r * r) * kinetic(sol, k), 1.0 + e.abs())
}

/// `E^{k+½} - ½(1 - r²)‖(u^{k+1} - u^k)/Δt‖²_Δx` with `r = c·Δt/Δx`.
/// Nonnegative (up to round-off) whenever `r ≤ 1`.
pub fn energy_lower_bound_gap(sol: &DiscreteSolution, k: usize) -> Result<f64> {
    half_step_range(sol, k)?;
    Ok(gap_unchecked(sol, k).0)
}

/// `√2 / (2√(2ξ - ξ²))`.
pub fn stability_constant(xi: f64) -> f64 {
    2f64.sqrt() / (2.0 * (2.0 * xi - xi * xi).sqrt())
}

/// One grid time of the growth bound: `lhs = √E^{k+½}`,
/// `rhs = √E^{½} + C(ξ)·Δt·Σ_{m=1}^{k} ‖s^m‖_Δx`, `k = floor(t/Δt) - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRow {
    pub k: usize,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl StabilityRow {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + ENERGY_RTOL * (1.0 + self.rhs)
    }
}

fn sqrt_energy(k: usize, e: f64) -> Result<f64> {
    if e < -ENERGY_RTOL * (1.0 + e.abs()) {
        return Err(Error::NegativeEnergy { k, value: e });
    }
    Ok(e.max(0.0).sqrt())
}

fn stability_prereqs(sol: &DiscreteSolution, sh: &[SupportSeq]) -> Result<()> {
    check_sources(sol, sh)?;
    let g = sol.grid();
    if !check_cfl(g) {
        return Err(Error::Cfl {
            courant: g.courant(),
            zeta: g.zeta(),
            xi: g.xi(),
        });
    }
    Ok(())
}

/// `(√E^{k+½}, bound)` at time `t ∈ [Δt, t_max]`.
pub fn stability_bound_check(sol: &DiscreteSolution, sh: &[SupportSeq], t: f64) -> Result<(f64, f64)> {
    stability_prereqs(sol, sh)?;
    let g = sol.grid();
    let m = time_index(g, t)?;
    if m == 0 {
        return Err(Error::OutOfRange {
            what: "t",
            value: t,
            lo: g.dt(),
            hi: g.t_max(),
        });
    }
    let k = m - 1;
    let root0 = sqrt_energy(0, energy_unchecked(sol, 0))?;
    let lhs = sqrt_energy(k, energy_unchecked(sol, k))?;
    let forcing: f64 = sh[1..=k].iter().map(|s| source_norm(g, s)).sum();
    Ok((lhs, root0 + stability_constant(g.xi()) * g.dt() * forcing))
}

fn source_norm(g: &GridSpec, s: &SupportSeq) -> f64 {
    (g.dx() * dot(s, s)).sqrt()
}

/// [`stability_bound_check`] at every grid time `t = m·Δt`, `m = 1..=k_max`,
/// sharing the running source sum.
pub fn stability_series(sol: &DiscreteSolution, sh: &[SupportSeq]) -> Result<Vec<StabilityRow>> {
    stability_prereqs(sol, sh)?;
    let g = sol.grid();
    let c = stability_constant(g.xi());
    let mut rows = Vec::with_capacity(g.k_max());
    if g.k_max() == 0 {
        return Ok(rows);
    }
    let root0 = sqrt_energy(0, energy_unchecked(sol, 0))?;
    let mut forcing = 0.0;
    for k in 0..g.k_max() {
        if k >= 1 {
            forcing += source_norm(g, &sh[k]);
        }
        rows.push(StabilityRow {
            k,
            t: g.t(k + 1),
            lhs: sqrt_energy(k, energy_unchecked(sol, k))?,
            rhs: root0 + c * g.dt() * forcing,
        });
    }
    Ok(rows)
}

/// Per-half-step diagnostics for one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub trace: EnergyTrace,
    /// `(residual, scale)` of the increment identity; `None` at `k = 0`.
    pub increments: Vec<Option<(f64, f64)>>,
    /// `(gap, scale)` of the lower bound.
    pub gaps: Vec<(f64, f64)>,
}

impl EnergyReport {
    pub fn increment_failures(&self) -> usize {
        self.increments
            .iter()
            .flatten()
            .filter(|(r, s)| !(*r <= ENERGY_RTOL * s))
            .count()
    }

    pub fn lower_bound_failures(&self) -> usize {
        self.gaps
            .iter()
            .filter(|(g, s)| !(*g >= -ENERGY_RTOL * s))
            .count()
    }

    /// `E^{k+½} ≥ -ENERGY_RTOL·(1 + |E^{k+½}|)` at every step.
    pub fn nonnegativity_failures(&self) -> usize {
        self.trace
            .values
            .iter()
            .filter(|e| !(**e >= -ENERGY_RTOL * (1.0 + e.abs())))
            .count()
    }
}

pub fn energy_report(sol: &DiscreteSolution, sh: &[SupportSeq]) -> Result<EnergyReport> {
    check_sources(sol, sh)?;
    let n = sol.grid().k_max();
    Ok(EnergyReport {
        trace: energy_trace(sol),
        increments: (0..n)
            .map(|k| (k >= 1).then(|| residual_unchecked(sol, sh, k)))
            .collect(),
        gaps: (0..n).map(|k| gap_unchecked(sol, k)).collect(),
    })
}
