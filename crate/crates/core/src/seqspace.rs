//! Real sequences over ℤ with finite support.
//!
//! A [`SupportSeq`] stores a dense block of values over the index window
//! `[lo, hi]` and is exactly zero everywhere else. Window bounds are
//! conservative: stored entries may themselves be zero, and equality of
//! sequences is pointwise.

use crate::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct SupportSeq {
    lo: i64,
    values: Vec<f64>,
}

impl PartialEq for SupportSeq {
    fn eq(&self, other: &Self) -> bool {
        let (lo, hi) = union_window(self, other);
        (lo..=hi).all(|i| self.get(i) == other.get(i))
    }
}

impl SupportSeq {
    /// The zero sequence (empty window).
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(lo: i64, values: Vec<f64>) -> Self {
        Self { lo, values }
    }

    /// Kronecker delta at index `i`.
    pub fn delta(i: i64) -> Self {
        Self::new(i, vec![1.0])
    }

    /// Indicator of `{lo, …, hi}`.
    pub fn indicator(lo: i64, hi: i64) -> Self {
        Self::from_fn(lo, hi, |_| 1.0)
    }

    /// Samples `f` on `[lo, hi]`. An inverted window yields the zero sequence.
    pub fn from_fn(lo: i64, hi: i64, f: impl Fn(i64) -> f64) -> Self {
        if hi < lo {
            return Self { lo, values: Vec::new() };
        }
        Self {
            lo,
            values: (lo..=hi).map(f).collect(),
        }
    }

    #[inline]
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Last stored index; `lo - 1` for an empty window.
    #[inline]
    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: i64) -> f64 {
        let off = i - self.lo;
        if off < 0 || off >= self.values.len() as i64 {
            0.0
        } else {
            self.values[off as usize]
        }
    }

    /// `(index, value)` pairs over the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(o, &v)| (self.lo + o as i64, v))
    }

    /// Smallest and largest index holding a nonzero value.
    pub fn nonzero_bounds(&self) -> Option<(i64, i64)> {
        let first = self.values.iter().position(|&v| v != 0.0)?;
        let last = self.values.iter().rposition(|&v| v != 0.0)?;
        Some((self.lo + first as i64, self.lo + last as i64))
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Restriction to `[lo, hi]`; values outside are dropped (become zero).
    pub fn clip(&self, lo: i64, hi: i64) -> Self {
        let lo = lo.max(self.lo);
        let hi = hi.min(self.hi());
        if hi < lo {
            return Self::zero();
        }
        let start = (lo - self.lo) as usize;
        let end = (hi - self.lo) as usize;
        Self::new(lo, self.values[start..=end].to_vec())
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self::new(self.lo, self.values.iter().map(|v| alpha * v).collect())
    }
}

fn union_window(f: &SupportSeq, g: &SupportSeq) -> (i64, i64) {
    match (f.is_empty(), g.is_empty()) {
        (true, true) => (0, -1),
        (true, false) => (g.lo(), g.hi()),
        (false, true) => (f.lo(), f.hi()),
        (false, false) => (f.lo().min(g.lo()), f.hi().max(g.hi())),
    }
}

/// Pointwise `alpha·f + beta·g`; the window is the union of both windows.
pub fn combine(alpha: f64, f: &SupportSeq, beta: f64, g: &SupportSeq) -> SupportSeq {
    let (lo, hi) = union_window(f, g);
    SupportSeq::from_fn(lo, hi, |i| alpha * f.get(i) + beta * g.get(i))
}

/// `i ↦ f(i + k)`; bounds move by `-k`.
pub fn shift(f: &SupportSeq, k: i64) -> SupportSeq {
    SupportSeq::new(f.lo - k, f.values.clone())
}

/// `Σ f(i) g(i)`, summed in increasing index order over the window overlap.
pub fn dot(f: &SupportSeq, g: &SupportSeq) -> f64 {
    let lo = f.lo().max(g.lo());
    let hi = f.hi().min(g.hi());
    (lo..=hi).map(|i| f.get(i) * g.get(i)).sum()
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

/// `Δx · ⟨f, g⟩`.
pub fn dot_dx(f: &SupportSeq, g: &SupportSeq, dx: f64) -> Result<f64> {
    check_positive("dx", dx)?;
    Ok(dx * dot(f, g))
}

/// `sqrt(Δx · ⟨f, f⟩)`.
pub fn norm_dx(f: &SupportSeq, dx: f64) -> Result<f64> {
    Ok(dot_dx(f, f, dx)?.sqrt())
}

/// Discrete operator `(A_h v)_j = -c² (v_{j+1} - 2 v_j + v_{j-1}) / Δx²`.
/// The window grows by one index on each side.
pub fn apply_ah(v: &SupportSeq, c: f64, dx: f64) -> Result<SupportSeq> {
    check_positive("c", c)?;
    check_positive("dx", dx)?;
    Ok(apply_ah_unchecked(v, c, dx))
}

pub(crate) fn apply_ah_unchecked(v: &SupportSeq, c: f64, dx: f64) -> SupportSeq {
    if v.is_empty() {
        return SupportSeq::zero();
    }
    let neg_c2 = -(c * c);
    let dx2 = dx * dx;
    SupportSeq::from_fn(v.lo() - 1, v.hi() + 1, |j| {
        neg_c2 * (v.get(j + 1) - 2.0 * v.get(j) + v.get(j - 1)) / dx2
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq_strategy() -> impl Strategy<Value = SupportSeq> {
        (-20i64..20, prop::collection::vec(-10.0f64..10.0, 0..30))
            .prop_map(|(lo, v)| SupportSeq::new(lo, v))
    }

    #[test]
    fn combine_examples() {
        let f = SupportSeq::new(-2, vec![1.0, -3.5, 2.0]);
        assert_eq!(combine(1.0, &f, 1.0, &SupportSeq::zero()), f);
        assert!(combine(0.0, &f, 0.0, &SupportSeq::delta(7)).is_zero());

        let r = combine(2.0, &SupportSeq::delta(0), -1.0, &SupportSeq::delta(1));
        assert_eq!(r.get(0), 2.0);
        assert_eq!(r.get(1), -1.0);
        assert_eq!(r.nonzero_count(), 2);
        assert!(r.lo() <= 0 && r.hi() >= 1);
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift(&SupportSeq::delta(0), 0), SupportSeq::delta(0));
        let s = shift(&SupportSeq::delta(0), 1);
        assert_eq!(s.get(-1), 1.0);
        assert_eq!(s.nonzero_bounds(), Some((-1, -1)));
        assert!(shift(&SupportSeq::zero(), 5).is_zero());
    }

    #[test]
    fn dot_examples() {
        let g = SupportSeq::new(3, vec![1.0, 2.0]);
        assert_eq!(dot(&SupportSeq::zero(), &g), 0.0);
        assert_eq!(dot(&SupportSeq::delta(0), &SupportSeq::delta(1)), 0.0);
        let ind = SupportSeq::indicator(0, 2);
        assert_eq!(dot(&ind, &ind), 3.0);
    }

    #[test]
    fn dot_dx_and_norm_examples() {
        let ind = SupportSeq::indicator(0, 2);
        let g = SupportSeq::new(1, vec![0.5, 4.0]);
        assert_eq!(dot_dx(&ind, &g, 1.0).unwrap(), dot(&ind, &g));
        assert_eq!(dot_dx(&ind, &ind, 0.5).unwrap(), 1.5);
        assert_eq!(dot_dx(&SupportSeq::zero(), &g, 0.1).unwrap(), 0.0);

        assert_eq!(norm_dx(&SupportSeq::zero(), 1.0).unwrap(), 0.0);
        assert_eq!(norm_dx(&SupportSeq::delta(0), 1.0).unwrap(), 1.0);
        assert_eq!(norm_dx(&SupportSeq::indicator(0, 3), 0.25).unwrap(), 1.0);
    }

    #[test]
    fn nonpositive_steps_rejected() {
        let f = SupportSeq::delta(0);
        assert!(dot_dx(&f, &f, 0.0).is_err());
        assert!(norm_dx(&f, -1.0).is_err());
        assert!(apply_ah(&f, 0.0, 1.0).is_err());
        assert!(apply_ah(&f, 1.0, -0.5).is_err());
        assert!(apply_ah(&f, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn apply_ah_examples() {
        assert!(apply_ah(&SupportSeq::zero(), 1.0, 1.0).unwrap().is_zero());

        let a = apply_ah(&SupportSeq::delta(0), 1.0, 1.0).unwrap();
        assert_eq!((a.lo(), a.hi()), (-1, 1));
        assert_eq!(a.values(), &[-1.0, 2.0, -1.0]);

        let a = apply_ah(&SupportSeq::indicator(-50, 50), 1.0, 1.0).unwrap();
        assert_eq!(a.get(0), 0.0);
        assert_eq!(a.get(49), 0.0);
        assert_eq!(a.get(50), 1.0);
    }

    #[test]
    fn clip_and_bounds() {
        let f = SupportSeq::new(-3, vec![0.0, 1.0, 0.0, 2.0, 0.0]);
        assert_eq!(f.nonzero_bounds(), Some((-2, 0)));
        assert_eq!(f.nonzero_count(), 2);
        let c = f.clip(-1, 10);
        assert_eq!((c.lo(), c.hi()), (-1, 1));
        assert_eq!(c.get(-2), 0.0);
        assert_eq!(c.get(0), 2.0);
        assert!(f.clip(5, 10).is_empty());
        assert_eq!(SupportSeq::zero().nonzero_bounds(), None);
    }

    proptest! {
        #[test]
        fn fs_closure_and_exact_zeros(f in seq_strategy(), g in seq_strategy(),
                                      a in -5.0f64..5.0, b in -5.0f64..5.0, k in -10i64..10) {
            let (lo, hi) = union_window(&f, &g);
            let h = combine(a, &f, b, &g);
            let s = shift(&f, k);
            let ah = apply_ah(&f, 1.3, 0.7).unwrap();
            // nothing lives outside the advertised windows
            for probe in [-200i64, -60, 60, 200] {
                prop_assert_eq!(h.get(probe).to_bits(), 0.0f64.to_bits());
                prop_assert_eq!(ah.get(probe).to_bits(), 0.0f64.to_bits());
                prop_assert_eq!(s.get(probe).to_bits(), 0.0f64.to_bits());
            }
            if !h.is_empty() {
                prop_assert!(h.lo() >= lo && h.hi() <= hi);
            }
            if !f.is_empty() {
                prop_assert_eq!((ah.lo(), ah.hi()), (f.lo() - 1, f.hi() + 1));
            }
            for i in -60..60 {
                prop_assert_eq!(h.get(i), a * f.get(i) + b * g.get(i));
                prop_assert_eq!(s.get(i), f.get(i + k));
            }
        }

        #[test]
        fn dot_is_bilinear(f1 in seq_strategy(), f2 in seq_strategy(), g in seq_strategy(),
                           a in -5.0f64..5.0) {
            let lhs = dot(&combine(a, &f1, 1.0, &f2), &g);
            let rhs = a * dot(&f1, &g) + dot(&f2, &g);
            let scale = 1.0 + a.abs() * dot(&f1, &f1).sqrt() * dot(&g, &g).sqrt()
                + dot(&f2, &f2).sqrt() * dot(&g, &g).sqrt();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn cauchy_schwarz_and_triangle(f in seq_strategy(), g in seq_strategy(), dx in 0.01f64..2.0) {
            let nf = norm_dx(&f, dx).unwrap();
            let ng = norm_dx(&g, dx).unwrap();
            let scale = 1.0 + nf * ng;
            prop_assert!(dot_dx(&f, &g, dx).unwrap().abs() <= nf * ng + 1e-12 * scale);
            let nfg = norm_dx(&combine(1.0, &f, 1.0, &g), dx).unwrap();
            prop_assert!(nfg <= nf + ng + 1e-12 * (1.0 + nf + ng));
        }

        #[test]
        fn ah_is_symmetric(v in seq_strategy(), w in seq_strategy(),
                           c in 0.1f64..3.0, dx in 0.05f64..2.0) {
            let lhs = dot(&apply_ah(&v, c, dx).unwrap(), &w);
            let rhs = dot(&v, &apply_ah(&w, c, dx).unwrap());
            let scale = 4.0 * c * c / (dx * dx) * dot(&v, &v).sqrt() * dot(&w, &w).sqrt();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + scale));
        }
    }
}
