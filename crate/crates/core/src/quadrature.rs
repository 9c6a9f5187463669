//! Adaptive Simpson quadrature with absolute-error termination and a hard
//! budget on the number of subintervals visited.

use crate::{Error, Result};

pub const DEFAULT_BUDGET: usize = 1_000_000;

const MAX_DEPTH: u32 = 60;

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveSimpson {
    /// Absolute error target for the whole integral.
    pub tol: f64,
    /// Maximum number of subintervals examined before giving up.
    pub budget: usize,
    /// Uniform panels the range is split into before adapting. Guards against
    /// narrow features falling between the first five samples.
    pub initial_panels: usize,
}

impl AdaptiveSimpson {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            budget: DEFAULT_BUDGET,
            initial_panels: 8,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", format!("must be > 0, got {}", self.tol)));
        }
        if a == b {
            return Ok(0.0);
        }
        if b < a {
            return self.integrate(f, b, a).map(|v| -v);
        }
        let panels = self.initial_panels.max(1);
        let h = (b - a) / panels as f64;
        let panel_tol = self.tol / panels as f64;
        let mut visited = 0usize;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let hi = if p + 1 == panels { b } else { lo + h };
            let mid = 0.5 * (lo + hi);
            let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
            let whole = simpson(lo, hi, flo, fmid, fhi);
            total += self.refine(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, 0, &mut visited)?;
        }
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        visited: &mut usize,
    ) -> Result<f64> {
        *visited += 1;
        if *visited > self.budget {
            return Err(Error::QuadratureBudget {
                budget: self.budget,
            });
        }
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || depth >= MAX_DEPTH {
            return Ok(left + right + delta / 15.0);
        }
        Ok(self.refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, visited)?
            + self.refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, visited)?)
    }
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// [`AdaptiveSimpson::integrate`] with default budget and panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    AdaptiveSimpson::new(tol).integrate(f, a, b)
}
