//! Gauss-Kronrod quadrature and tabulated prefix integrals.

use alloc::vec::Vec;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 2000;

/// Tolerances for adaptive integration. Convergence means the summed error
/// estimate is below `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance { abs: 1e-13, rel: 1e-12 };
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// One 15-point Kronrod panel: `(value, |K15 - G7|)`.
pub fn gauss_kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, libm::fabs((kronrod - gauss) * half))
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// A non-finite integrand value is reported as [`Error::AssumptionViolation`];
/// exhausting the subdivision budget as [`Error::QuadratureNoConvergence`].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let bad: core::cell::Cell<Option<f64>> = core::cell::Cell::new(None);
    let mut guarded = |x: f64| {
        let v = f(x);
        if !v.is_finite() && bad.get().is_none() {
            bad.set(Some(x));
        }
        v
    };
    let (value, error) = gauss_kronrod15(&mut guarded, a, b);
    let mut panels: Vec<Panel> = alloc::vec![Panel { a, b, value, error }];
    let mut total = value;
    let mut total_err = error;
    loop {
        if let Some(at) = bad.get() {
            return Err(Error::AssumptionViolation { at });
        }
        if total_err <= tol.abs.max(tol.rel * libm::fabs(total)) {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if panels.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureNoConvergence { lower: a, upper: b });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::QuadratureNoConvergence { lower: a, upper: b });
        }
        let (v1, e1) = gauss_kronrod15(&mut guarded, p.a, mid);
        let (v2, e2) = gauss_kronrod15(&mut guarded, mid, p.b);
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.error;
        panels.push(Panel { a: p.a, b: mid, value: v1, error: e1 });
        panels.push(Panel { a: mid, b: p.b, value: v2, error: e2 });
        if total_err < 0.0 {
            total_err = panels.iter().map(|p| p.error).sum();
        }
    }
}

/// Integrates over `[a, b]` split at the given interior breakpoints, which
/// need not be sorted; points outside `(a, b)` are ignored.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<f64> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut lo = a;
    let mut sum = 0.0;
    for hi in cuts.into_iter().chain(core::iter::once(b)) {
        sum += integrate(&mut f, lo, hi, tol)?;
        lo = hi;
    }
    Ok(sum)
}

/// Prefix integral `x -> ∫_lower^x f` tabulated on a mesh and read back by
/// cubic Hermite interpolation (the table stores both the integral and the
/// integrand at every node).
///
/// The geometric mesh interpolates in `s = ln x`, which keeps integrands that
/// behave like `1/x` near `lower` smooth.
#[derive(Debug, Clone)]
pub struct CumulativeTable {
    lower: f64,
    step: f64,
    geometric: bool,
    integral: Vec<f64>,
    // Derivative of the integral with respect to the mesh variable.
    slope: Vec<f64>,
}

impl CumulativeTable {
    /// Uniform mesh on `[lower, upper]`.
    pub fn build<F: FnMut(f64) -> f64>(f: F, lower: f64, upper: f64, cells: usize) -> Result<Self> {
        if cells == 0 || !(upper > lower) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidArgument("table needs lower < upper and cells >= 1"));
        }
        Self::tabulate(f, lower, upper, cells, false)
    }

    /// Geometric mesh on `[lower, upper]` with `lower > 0`.
    pub fn build_geometric<F: FnMut(f64) -> f64>(f: F, lower: f64, upper: f64, cells: usize) -> Result<Self> {
        if cells == 0 || !(upper > lower) || !(lower > 0.0) || !upper.is_finite() {
            return Err(Error::InvalidArgument("geometric table needs 0 < lower < upper and cells >= 1"));
        }
        Self::tabulate(f, lower, upper, cells, true)
    }

    fn tabulate<F: FnMut(f64) -> f64>(
        mut f: F,
        lower: f64,
        upper: f64,
        cells: usize,
        geometric: bool,
    ) -> Result<Self> {
        let (s0, s1) = if geometric { (libm::log(lower), libm::log(upper)) } else { (lower, upper) };
        let step = (s1 - s0) / cells as f64;
        let node = |i: usize| {
            if i == 0 {
                lower
            } else if i == cells {
                upper
            } else if geometric {
                libm::exp(s0 + step * i as f64)
            } else {
                lower + step * i as f64
            }
        };
        let scale = |x: f64, v: f64| if geometric { x * v } else { v };
        let mut integral = Vec::with_capacity(cells + 1);
        let mut slope = Vec::with_capacity(cells + 1);
        let mut acc = 0.0;
        integral.push(0.0);
        slope.push(scale(lower, f(lower)));
        let cell_tol = Tolerance { abs: 1e-15, rel: 1e-12 };
        for i in 0..cells {
            let (x0, x1) = (node(i), node(i + 1));
            acc += integrate(&mut f, x0, x1, cell_tol)?;
            integral.push(acc);
            slope.push(scale(x1, f(x1)));
        }
        if slope.iter().any(|v| !v.is_finite()) {
            return Err(Error::AssumptionViolation { at: lower });
        }
        Ok(Self { lower, step, geometric, integral, slope })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        let s = self.step * (self.integral.len() - 1) as f64;
        if self.geometric {
            self.lower * libm::exp(s)
        } else {
            self.lower + s
        }
    }

    pub fn total(&self) -> f64 {
        *self.integral.last().unwrap()
    }

    /// `None` outside the tabulated range, except that a uniform table reads
    /// zero at or below `lower`.
    pub fn eval(&self, x: f64) -> Option<f64> {
        if x <= self.lower {
            return if x == self.lower || !self.geometric { Some(0.0) } else { None };
        }
        let pos = if self.geometric {
            libm::log(x / self.lower) / self.step
        } else {
            (x - self.lower) / self.step
        };
        let cells = self.integral.len() - 1;
        if !(pos <= cells as f64 * (1.0 + 1e-12)) {
            return None;
        }
        let i = (libm::floor(pos) as usize).min(cells - 1);
        let s = (pos - i as f64).min(1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Some(
            h00 * self.integral[i]
                + h10 * self.step * self.slope[i]
                + h01 * self.integral[i + 1]
                + h11 * self.step * self.slope[i + 1],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, Tolerance::DEFAULT).unwrap();
        assert!((v - 0.0).abs() < 1e-14);
        let v = integrate(|x| x * x, -1.0, 1.0, Tolerance::DEFAULT).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = integrate(libm::exp, 1.0, 0.0, Tolerance::DEFAULT).unwrap();
        assert!((v + (core::f64::consts::E - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let v = integrate(|x| 1.0 / libm::sqrt(x), 0.0, 1.0, Tolerance { abs: 1e-10, rel: 1e-10 }).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn divergent_integral_is_an_error() {
        // Bisection towards zero either exhausts the budget or overflows.
        let r = integrate(|x| 1.0 / (x * x), 0.0, 1.0, Tolerance::DEFAULT);
        assert!(matches!(r, Err(Error::QuadratureNoConvergence { .. }) | Err(Error::AssumptionViolation { .. })));
        let r = integrate(|x| 1.0 / (x * x), 1e-3, 1.0, Tolerance::DEFAULT).unwrap();
        assert!((r - 999.0).abs() < 1e-9);
    }

    #[test]
    fn nan_integrand_reports_violation() {
        let r = integrate(|x| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, Tolerance::DEFAULT);
        assert!(matches!(r, Err(Error::AssumptionViolation { .. })));
    }

    #[test]
    fn breaks_handle_discontinuities() {
        let step = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let v = integrate_with_breaks(step, 0.0, 1.0, &[0.3, 5.0], Tolerance::DEFAULT).unwrap();
        assert!((v - (0.3 + 1.4)).abs() < 1e-14);
    }

    #[test]
    fn table_matches_closed_form() {
        let t = CumulativeTable::build(|x| libm::exp(-x), 0.0, 10.0, 4000).unwrap();
        for &x in &[0.0, 1e-4, 0.37, 1.0, 2.5, 7.123, 10.0] {
            let exact = -libm::expm1(-x);
            assert!((t.eval(x).unwrap() - exact).abs() < 1e-13, "x = {x}");
        }
        assert!(t.eval(10.5).is_none());
        assert_eq!(t.eval(-1.0), Some(0.0));
    }

    #[test]
    fn geometric_table_handles_reciprocal() {
        let t = CumulativeTable::build_geometric(|x| 1.0 / x + x, 1e-6, 5.0, 20000).unwrap();
        for &x in &[1e-6, 3e-6, 1e-3, 0.2, 1.0, 4.99, 5.0] {
            let exact = libm::log(x / 1e-6) + 0.5 * (x * x - 1e-12);
            assert!((t.eval(x).unwrap() - exact).abs() < 1e-11, "x = {x}");
        }
        assert!(t.eval(5e-7).is_none());
        assert!(t.eval(5.1).is_none());
    }
}
