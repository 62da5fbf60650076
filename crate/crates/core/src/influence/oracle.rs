//! Influence functions against known population functions.
//!
//! With `w = (dFᵘ/du) / R²`, every integral in `φᵢ` and `ψ₂ᵢ` splits at `aᵢ`
//! and `ṽᵢ` into differences of five prefix integrals:
//!
//! ```text
//! P(x)  = ∫_0^x q / K²          W1(x) = ∫_0^x w (1 - S_A)
//! E(x)  = ∫ w                    WP(x) = ∫_0^x w S_A P
//! W0(x) = ∫ w S_A
//! ```
//!
//! `E` and `W0` diverge logarithmically at zero when `R(u) ~ u`; only their
//! differences at positive arguments are ever used. Each prefix is tabulated
//! on a geometric mesh over `[b 10⁻⁹, b]` and integrated directly below it.

use alloc::vec::Vec;

use crate::data::{Dataset, EvalGrid, LbrcObservation};
use crate::quadrature::{integrate, CumulativeTable, Tolerance};
use crate::truth::Population;
use crate::{Error, Result};

const CELLS: usize = 8192;
const LOWER_FRACTION: f64 = 1e-9;
const FALLBACK_TOL: Tolerance = Tolerance { abs: 1e-14, rel: 1e-12 };

struct Prefix {
    table: CumulativeTable,
    // ∫_0^lower for convergent integrands, zero otherwise.
    offset: f64,
    finite_at_zero: bool,
}

impl Prefix {
    fn build<F: Fn(f64) -> f64>(f: F, lower: f64, b: f64, finite_at_zero: bool) -> Result<Self> {
        let table = CumulativeTable::build_geometric(&f, lower, b, CELLS)?;
        let offset = if finite_at_zero { integrate(&f, 0.0, lower, FALLBACK_TOL)? } else { 0.0 };
        Ok(Self { table, offset, finite_at_zero })
    }

    fn value<F: Fn(f64) -> f64>(&self, x: f64, f: F) -> Result<f64> {
        if x >= self.table.lower() {
            return self
                .table
                .eval(x)
                .map(|v| self.offset + v)
                .ok_or(Error::InvalidArgument("time lies beyond the influence window"));
        }
        if self.finite_at_zero && x <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.offset - integrate(f, x, self.table.lower(), FALLBACK_TOL)?)
    }
}

/// Influence functions under a known population, valid on `(0, b]`.
pub struct OracleContext<'a> {
    pop: &'a dyn Population,
    b: f64,
    p: Prefix,
    e: Prefix,
    w0: Prefix,
    w1: Prefix,
    wp: Prefix,
}

/// Prefix values at one time point.
#[derive(Clone, Copy, Default)]
struct At {
    p: f64,
    e: f64,
    w0: f64,
    w1: f64,
    wp: f64,
}

/// Subject-level quantities that do not depend on `t`.
struct Subject {
    a: f64,
    v: f64,
    y: f64,
    at_a: At,
    at_v: At,
    e_y: f64,
    inv_k_a: f64,
    // δ / K(ṽ) and δ / R(y).
    inv_k_v: f64,
    inv_r_y: f64,
}

impl<'a> OracleContext<'a> {
    pub fn new(pop: &'a dyn Population, b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidArgument("influence window needs a finite b > 0"));
        }
        let lower = b * LOWER_FRACTION;
        let w = |u: f64| {
            let r = pop.r(u);
            pop.f_u_density(u) / (r * r)
        };
        let p_density = |u: f64| {
            let k = pop.k(u);
            pop.q_density(u) / (k * k)
        };
        let p = Prefix::build(p_density, lower, b, true)?;
        let e = Prefix::build(w, lower, b, false)?;
        let w0 = Prefix::build(|u| w(u) * pop.s_a(u), lower, b, false)?;
        let w1 = Prefix::build(|u| w(u) * pop.one_minus_s_a(u), lower, b, true)?;
        let p_at = |u: f64| p.value(u, p_density).unwrap_or(f64::NAN);
        let wp = Prefix::build(|u| w(u) * pop.s_a(u) * p_at(u), lower, b, true)?;
        Ok(Self { pop, b, p, e, w0, w1, wp })
    }

    pub fn population(&self) -> &'a dyn Population {
        self.pop
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    fn w(&self, u: f64) -> f64 {
        let r = self.pop.r(u);
        self.pop.f_u_density(u) / (r * r)
    }

    fn p_density(&self, u: f64) -> f64 {
        let k = self.pop.k(u);
        self.pop.q_density(u) / (k * k)
    }

    fn p_value(&self, x: f64) -> Result<f64> {
        self.p.value(x, |u| self.p_density(u))
    }

    fn e_value(&self, x: f64) -> Result<f64> {
        self.e.value(x, |u| self.w(u))
    }

    fn at(&self, x: f64) -> Result<At> {
        let pop = self.pop;
        Ok(At {
            p: self.p_value(x)?,
            e: self.e_value(x)?,
            w0: self.w0.value(x, |u| self.w(u) * pop.s_a(u))?,
            w1: self.w1.value(x, |u| self.w(u) * pop.one_minus_s_a(u))?,
            wp: self
                .wp
                .value(x, |u| self.w(u) * pop.s_a(u) * self.p_value(u).unwrap_or(f64::NAN))?,
        })
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if t > self.b * (1.0 + 1e-12) || t.is_nan() {
            return Err(Error::InvalidArgument("time lies beyond the influence window"));
        }
        Ok(())
    }

    fn subject(&self, obs: &LbrcObservation) -> Result<Subject> {
        let (a, v, y) = (obs.a(), obs.v(), obs.y());
        let at_a = if a <= self.b { self.at(a)? } else { At::default() };
        let at_v = if v <= self.b { self.at(v)? } else { At::default() };
        let e_y = if y <= self.b { self.e_value(y)? } else { 0.0 };
        let inv_k_a = if a <= self.b { inv(self.pop.k(a)) } else { 0.0 };
        let (inv_k_v, inv_r_y) = if obs.delta() {
            (
                if v <= self.b { inv(self.pop.k(v)) } else { 0.0 },
                if y <= self.b { inv(self.pop.r(y)) } else { 0.0 },
            )
        } else {
            (0.0, 0.0)
        };
        Ok(Subject { a, v, y, at_a, at_v, e_y, inv_k_a, inv_k_v, inv_r_y })
    }

    pub fn phi(&self, obs: &LbrcObservation, t: f64) -> Result<f64> {
        self.check_t(t)?;
        finite(Self::phi_from(&self.subject(obs)?, t, &self.at(t)?), t)
    }

    pub fn psi_1(&self, obs: &LbrcObservation, t: f64) -> Result<f64> {
        self.check_t(t)?;
        finite(Self::psi_1_from(&self.subject(obs)?, t, &self.at(t)?), t)
    }

    pub fn psi_2(&self, obs: &LbrcObservation, t: f64) -> Result<f64> {
        self.check_t(t)?;
        finite(Self::psi_2_from(&self.subject(obs)?, t, &self.at(t)?), t)
    }

    fn phi_from(s: &Subject, t: f64, at_t: &At) -> f64 {
        let mut phi = 0.0;
        if s.a <= t {
            phi += s.at_a.p - s.inv_k_a;
        } else {
            phi += at_t.p;
        }
        if s.v <= t {
            phi += s.at_v.p - s.inv_k_v;
        } else {
            phi += at_t.p;
        }
        phi
    }

    fn psi_1_from(s: &Subject, t: f64, at_t: &At) -> f64 {
        let upper = s.y.min(t);
        let mut psi = 0.0;
        if s.a < upper {
            let e_upper = if s.y <= t { s.e_y } else { at_t.e };
            psi += e_upper - s.at_a.e;
        }
        if s.y <= t {
            psi -= s.inv_r_y;
        }
        psi
    }

    fn psi_2_from(s: &Subject, t: f64, at_t: &At) -> f64 {
        let a_in = s.a <= t;
        let v_in = s.v <= t;
        let ta = if a_in { &s.at_a } else { at_t };
        let tv = if v_in { &s.at_v } else { at_t };
        let mut psi = ta.w1 - (at_t.w0 - ta.w0) - ta.wp - tv.wp;
        if a_in {
            psi -= s.at_a.p * (at_t.w0 - s.at_a.w0);
            psi += s.inv_k_a * (at_t.w0 - s.at_a.w0);
        }
        if v_in {
            psi -= s.at_v.p * (at_t.w0 - s.at_v.w0);
            psi += s.inv_k_v * (at_t.w0 - s.at_v.w0);
        }
        psi
    }

    /// Averages `n⁻¹ Σ φᵢ`, `n⁻¹ Σ ψ₁ᵢ` and `n⁻¹ Σ ψ₂ᵢ` at every grid point.
    pub fn influence_means(&self, d: &Dataset, grid: &EvalGrid) -> Result<[Vec<f64>; 3]> {
        let m = grid.len();
        let mut sums = [alloc::vec![0.0; m], alloc::vec![0.0; m], alloc::vec![0.0; m]];
        self.for_each_subject(d, grid, |_, j, phi, p1, p2| {
            sums[0][j] += phi;
            sums[1][j] += p1;
            sums[2][j] += p2;
        })?;
        let n = d.n() as f64;
        for s in sums.iter_mut() {
            for (j, v) in s.iter_mut().enumerate() {
                *v /= n;
                if !v.is_finite() {
                    return Err(Error::AssumptionViolation { at: grid.points()[j] });
                }
            }
        }
        Ok(sums)
    }

    /// Calls `f(i, j, φᵢ(tⱼ), ψ₁ᵢ(tⱼ), ψ₂ᵢ(tⱼ))` for every subject and grid point.
    pub fn for_each_subject<F: FnMut(usize, usize, f64, f64, f64)>(
        &self,
        d: &Dataset,
        grid: &EvalGrid,
        mut f: F,
    ) -> Result<()> {
        for &t in grid.points() {
            self.check_t(t)?;
        }
        let at_grid: Vec<At> = grid.points().iter().map(|&t| self.at(t)).collect::<Result<_>>()?;
        for (i, obs) in d.iter().enumerate() {
            let s = self.subject(obs)?;
            for (j, (&t, at_t)) in grid.points().iter().zip(&at_grid).enumerate() {
                f(
                    i,
                    j,
                    Self::phi_from(&s, t, at_t),
                    Self::psi_1_from(&s, t, at_t),
                    Self::psi_2_from(&s, t, at_t),
                );
            }
        }
        Ok(())
    }
}

#[inline]
fn inv(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        1.0 / x
    }
}

fn finite(v: f64, t: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::AssumptionViolation { at: t })
    }
}
