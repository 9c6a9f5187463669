//! The continuous Cauchy problem `u_tt + A(c) u = s`, `u_t(·,0) = u1`,
//! `u(·,0) = u0` with `A(c) = -c² ∂²/∂x²`, plus two independent ways of
//! knowing its solution: closed-form manufactured solutions and a quadrature
//! evaluation of d'Alembert's formula.

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use crate::quadrature::AdaptiveSimpson;
use crate::{Error, Result};

pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Cauchy data with support bounds.
///
/// Callers promise `u0 = u1 = 0` outside `[chi1, chi2]`, `s(x, t) = 0` outside
/// `[chi1 - c t, chi2 + c t]`, and `s(x, 0) = 0`. Numerical routines rely on
/// these bounds to size their windows; they are not re-checked pointwise.
#[derive(Clone)]
pub struct CauchyProblem {
    u0: Fn1,
    u1: Fn1,
    s: Fn2,
    c: f64,
    chi1: f64,
    chi2: f64,
}

impl fmt::Debug for CauchyProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CauchyProblem")
            .field("c", &self.c)
            .field("chi1", &self.chi1)
            .field("chi2", &self.chi2)
            .finish_non_exhaustive()
    }
}

impl CauchyProblem {
    pub fn new(u0: Fn1, u1: Fn1, s: Fn2, c: f64, chi1: f64, chi2: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("c", format!("must be finite and > 0, got {c}")));
        }
        if !(chi1.is_finite() && chi2.is_finite() && chi1 < chi2) {
            return Err(Error::invalid(
                "chi",
                format!("need finite chi1 < chi2, got ({chi1}, {chi2})"),
            ));
        }
        Ok(Self {
            u0,
            u1,
            s,
            c,
            chi1,
            chi2,
        })
    }

    /// `u0 = u1 = s = 0`.
    pub fn zero(c: f64, chi1: f64, chi2: f64) -> Result<Self> {
        Self::new(
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.0),
            Arc::new(|_, _| 0.0),
            c,
            chi1,
            chi2,
        )
    }

    #[inline]
    pub fn u0(&self, x: f64) -> f64 {
        (self.u0)(x)
    }

    #[inline]
    pub fn u1(&self, x: f64) -> f64 {
        (self.u1)(x)
    }

    #[inline]
    pub fn s(&self, x: f64, t: f64) -> f64 {
        (self.s)(x, t)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn chi(&self) -> (f64, f64) {
        (self.chi1, self.chi2)
    }
}

/// A known solution of some [`CauchyProblem`].
#[derive(Clone)]
pub struct ExactSolution {
    u: Fn2,
    du_dx: Option<Fn2>,
    du_dt: Option<Fn2>,
    /// Smoothness class `C^n` the solution is claimed to have.
    pub regularity_order: u32,
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactSolution")
            .field("regularity_order", &self.regularity_order)
            .field("analytic_derivatives", &self.du_dx.is_some())
            .finish_non_exhaustive()
    }
}

impl ExactSolution {
    pub fn new(u: Fn2, regularity_order: u32) -> Self {
        Self {
            u,
            du_dx: None,
            du_dt: None,
            regularity_order,
        }
    }

    pub fn with_derivatives(mut self, du_dx: Fn2, du_dt: Fn2) -> Self {
        self.du_dx = Some(du_dx);
        self.du_dt = Some(du_dt);
        self
    }

    pub fn zero() -> Self {
        Self::new(Arc::new(|_, _| 0.0), u32::MAX).with_derivatives(
            Arc::new(|_, _| 0.0),
            Arc::new(|_, _| 0.0),
        )
    }

    #[inline]
    pub fn u(&self, x: f64, t: f64) -> f64 {
        (self.u)(x, t)
    }

    pub fn du_dx(&self, x: f64, t: f64) -> Option<f64> {
        self.du_dx.as_ref().map(|f| f(x, t))
    }

    pub fn du_dt(&self, x: f64, t: f64) -> Option<f64> {
        self.du_dt.as_ref().map(|f| f(x, t))
    }
}

/// Compactly supported polynomial bump `(1 - y²)^p`, `y = (x - center)/half_width`.
/// It is `C^{p-1}` on ℝ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub p: u32,
}

impl Bump {
    pub fn value(&self, x: f64) -> f64 {
        let y = (x - self.center) / self.half_width;
        if y.abs() < 1.0 {
            (1.0 - y * y).powi(self.p as i32)
        } else {
            0.0
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let y = (x - self.center) / self.half_width;
        if y.abs() < 1.0 {
            -2.0 * self.p as f64 * y * (1.0 - y * y).powi(self.p as i32 - 1) / self.half_width
        } else {
            0.0
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }
}

pub const MIN_BUMP_EXPONENT: u32 = 5;
pub const DEFAULT_BUMP_EXPONENT: u32 = 6;

fn check_bump(half_width: f64, p: u32, c: f64) -> Result<()> {
    if p < MIN_BUMP_EXPONENT {
        return Err(Error::invalid(
            "p",
            format!("bump exponent must be >= {MIN_BUMP_EXPONENT} (C^4 or better), got {p}"),
        ));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::invalid(
            "half_width",
            format!("must be finite and > 0, got {half_width}"),
        ));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("c", format!("must be finite and > 0, got {c}")));
    }
    Ok(())
}

/// Right-travelling bump: `u0 = bump`, `u1 = -c·bump'`, `s = 0`, with exact
/// solution `u(x, t) = bump(x - c t)`.
pub fn traveling_bump_problem(
    center: f64,
    half_width: f64,
    p: u32,
    c: f64,
) -> Result<(CauchyProblem, ExactSolution)> {
    check_bump(half_width, p, c)?;
    let b = Bump {
        center,
        half_width,
        p,
    };
    let (chi1, chi2) = b.support();
    let prob = CauchyProblem::new(
        Arc::new(move |x| b.value(x)),
        Arc::new(move |x| -c * b.derivative(x)),
        Arc::new(|_, _| 0.0),
        c,
        chi1,
        chi2,
    )?;
    let exact = ExactSolution::new(Arc::new(move |x, t| b.value(x - c * t)), p - 1)
        .with_derivatives(
            Arc::new(move |x, t| b.derivative(x - c * t)),
            Arc::new(move |x, t| -c * b.derivative(x - c * t)),
        );
    Ok((prob, exact))
}

/// Bump released at rest: `u0 = bump`, `u1 = 0`, `s = 0`, splitting into two
/// half-height pulses `u = ½(bump(x - c t) + bump(x + c t))`.
pub fn standing_bump_problem(
    center: f64,
    half_width: f64,
    p: u32,
    c: f64,
) -> Result<(CauchyProblem, ExactSolution)> {
    check_bump(half_width, p, c)?;
    let b = Bump {
        center,
        half_width,
        p,
    };
    let (chi1, chi2) = b.support();
    let prob = CauchyProblem::new(
        Arc::new(move |x| b.value(x)),
        Arc::new(|_| 0.0),
        Arc::new(|_, _| 0.0),
        c,
        chi1,
        chi2,
    )?;
    let exact = ExactSolution::new(
        Arc::new(move |x, t| 0.5 * (b.value(x - c * t) + b.value(x + c * t))),
        p - 1,
    )
    .with_derivatives(
        Arc::new(move |x, t| 0.5 * (b.derivative(x - c * t) + b.derivative(x + c * t))),
        Arc::new(move |x, t| 0.5 * c * (b.derivative(x + c * t) - b.derivative(x - c * t))),
    );
    Ok((prob, exact))
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "t",
            value: t,
            lo: 0.0,
            hi: f64::INFINITY,
        })
    }
}

/// `[chi1 - c t, chi2 + c t]`: the solution vanishes outside this interval.
pub fn support_interval(prob: &CauchyProblem, t: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    Ok((prob.chi1 - prob.c * t, prob.chi2 + prob.c * t))
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> Option<(f64, f64)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (lo < hi).then_some((lo, hi))
}

/// Evaluates d'Alembert's formula at `(x, t)`:
///
/// `½(u0(x-ct) + u0(x+ct)) + 1/(2c) ∫_{x-ct}^{x+ct} u1
///   + 1/(2c) ∫_0^t ∫_{x-c(t-σ)}^{x+c(t-σ)} s(y, σ) dy dσ`
///
/// Integrals run through adaptive Simpson to absolute tolerance `tol`; the
/// inner integral of the source term uses `tol / (10·max(t, 1))`. Integration
/// ranges are intersected with the known supports of `u1` and `s`.
pub fn dalembert_eval(prob: &CauchyProblem, x: f64, t: f64, tol: f64) -> Result<f64> {
    check_time(t)?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    let c = prob.c;
    let quad = AdaptiveSimpson::new(tol);

    let mut value = 0.5 * (prob.u0(x - c * t) + prob.u0(x + c * t));

    if let Some((a, b)) = overlap((x - c * t, x + c * t), (prob.chi1, prob.chi2)) {
        value += quad.integrate(|y| prob.u1(y), a, b)? / (2.0 * c);
    }

    if t > 0.0 {
        let inner = AdaptiveSimpson::new(tol / (10.0 * t.max(1.0)));
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let slice = |sigma: f64| {
            let reach = c * (t - sigma);
            let window = (x - reach, x + reach);
            let supp = (prob.chi1 - c * sigma, prob.chi2 + c * sigma);
            match overlap(window, supp) {
                None => 0.0,
                Some((a, b)) => match inner.integrate(|y| prob.s(y, sigma), a, b) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                },
            }
        };
        let source = quad.integrate(slice, 0.0, t)?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        value += source / (2.0 * c);
    }
    Ok(value)
}

/// Mechanical energy `½‖u_t‖² + ½ c² ‖u_x‖²` of `sol` at time `t`.
///
/// Both partial derivatives are centered differences of step `h`; the
/// integral runs over the support interval at `t`, widened by `(c + 1) h`.
/// Diagnostic grade: accuracy is limited by `h²` as well as `tol`.
pub fn continuous_energy(
    sol: &ExactSolution,
    prob: &CauchyProblem,
    t: f64,
    h: f64,
    tol: f64,
) -> Result<f64> {
    let (a, b) = support_interval(prob, t)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("h", format!("must be finite and > 0, got {h}")));
    }
    let c = prob.c;
    let pad = (c + 1.0) * h;
    let density = |x: f64| {
        let ut = (sol.u(x, t + h) - sol.u(x, t - h)) / (2.0 * h);
        let ux = (sol.u(x + h, t) - sol.u(x - h, t)) / (2.0 * h);
        0.5 * ut * ut + 0.5 * c * c * ux * ux
    };
    AdaptiveSimpson::new(tol).integrate(density, a - pad, b + pad)
}
