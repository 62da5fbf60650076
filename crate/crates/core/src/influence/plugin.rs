//! Influence functions with every population quantity replaced by its
//! estimate.
//!
//! The plug-in integrals are sums over event times `uⱼ` with weights
//! `cⱼ = ΔN̄(uⱼ) / R̃(uⱼ)²` (`R̃` floored at `1/n`) and `sⱼ = S̃_A(uⱼ)`. With
//! `W(x) = Σ_{s <= x} ΔQ̃(s) / K̃(s)²` over the pooled jump points and the
//! prefix sums `C0 = Σ c`, `C1 = Σ c s W(u)`, `C2 = Σ c s`,
//!
//! ```text
//! ψ₂ᵢ(t) = C0(t ∧ aᵢ-) - C2(t)
//!        - [C1(t ∧ aᵢ) + W(aᵢ)(C2(t) - C2(t ∧ aᵢ))] - [same with ṽᵢ]
//!        + I(aᵢ <= t)(C2(t) - C2(aᵢ-)) / K̃(aᵢ) + δᵢ I(ṽᵢ <= t)(C2(t) - C2(ṽᵢ-)) / K̃(ṽᵢ)
//! ```
//!
//! so each evaluation costs a few binary searches.

use alloc::vec::Vec;

use crate::data::{Dataset, EvalGrid, LbrcObservation};
use crate::estimators::EstimatorBundle;

pub struct PluginContext {
    fit: EstimatorBundle,
    inv_n: f64,
    pooled_times: Vec<f64>,
    // W at each pooled time.
    w_cum: Vec<f64>,
    event_times: Vec<f64>,
    // Inclusive prefix sums over event times.
    c0: Vec<f64>,
    c1: Vec<f64>,
    c2: Vec<f64>,
}

/// Prefix sum over times `<= x` (or `< x` when `strict`).
#[inline]
fn prefix(times: &[f64], sums: &[f64], x: f64, strict: bool) -> f64 {
    let k = if strict { times.partition_point(|&u| u < x) } else { times.partition_point(|&u| u <= x) };
    if k == 0 {
        0.0
    } else {
        sums[k - 1]
    }
}

impl PluginContext {
    pub fn new(d: &Dataset) -> Self {
        Self::from_fit(EstimatorBundle::fit(d))
    }

    pub fn from_fit(fit: EstimatorBundle) -> Self {
        let n = fit.n() as f64;
        let e = &fit.empirical;
        let mut acc = 0.0;
        let (pooled_times, w_cum): (Vec<f64>, Vec<f64>) = e
            .pooled_points()
            .iter()
            .map(|p| {
                if p.at_risk > 0 {
                    let k = p.at_risk as f64 / n;
                    acc += p.jumps as f64 / n / (k * k);
                }
                (p.time, acc)
            })
            .unzip();
        let w_at = |x: f64| prefix(&pooled_times, &w_cum, x, false);

        let m = e.event_points().len();
        let mut event_times = Vec::with_capacity(m);
        let (mut c0, mut c1, mut c2) = (Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m));
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for p in e.event_points() {
            let r = (fit.r_tilde.eval_at(p.time)).max(1.0 / n);
            let c = p.events as f64 / n / (r * r);
            let s = fit.s_a_tilde.eval_at(p.time);
            s0 += c;
            s1 += c * s * w_at(p.time);
            s2 += c * s;
            event_times.push(p.time);
            c0.push(s0);
            c1.push(s1);
            c2.push(s2);
        }
        Self { inv_n: 1.0 / n, fit, pooled_times, w_cum, event_times, c0, c1, c2 }
    }

    pub fn fit(&self) -> &EstimatorBundle {
        &self.fit
    }

    fn w(&self, x: f64) -> f64 {
        prefix(&self.pooled_times, &self.w_cum, x, false)
    }

    fn c(&self, sums: &[f64], x: f64, strict: bool) -> f64 {
        prefix(&self.event_times, sums, x, strict)
    }

    fn inv_k(&self, x: f64) -> f64 {
        let k = self.fit.empirical.k_tilde.eval_at(x);
        if k > 0.0 {
            1.0 / k
        } else {
            0.0
        }
    }

    /// `R̃(x)` floored at `1/n`.
    fn r_floored(&self, x: f64) -> f64 {
        self.fit.r_tilde.eval_at(x).max(self.inv_n)
    }

    pub fn phi(&self, obs: &LbrcObservation, t: f64) -> f64 {
        let (a, v) = (obs.a(), obs.v());
        let mut phi = self.w(t.min(a)) + self.w(t.min(v));
        if a <= t {
            phi -= self.inv_k(a);
        }
        if obs.delta() && v <= t {
            phi -= self.inv_k(v);
        }
        phi
    }

    pub fn psi_1(&self, obs: &LbrcObservation, t: f64) -> f64 {
        let (a, y) = (obs.a(), obs.y());
        let upper = y.min(t);
        let mut psi = 0.0;
        if a <= upper {
            psi += self.c(&self.c0, upper, false) - self.c(&self.c0, a, true);
        }
        if obs.delta() && y <= t {
            psi -= 1.0 / self.r_floored(y);
        }
        psi
    }

    pub fn psi_2(&self, obs: &LbrcObservation, t: f64) -> f64 {
        let (a, v) = (obs.a(), obs.v());
        let c2_t = self.c(&self.c2, t, false);
        let below_a = if a <= t { self.c(&self.c0, a, true) } else { self.c(&self.c0, t, false) };
        let mut psi = below_a - c2_t;
        for x in [a, v] {
            let tx = t.min(x);
            let c2_tx = self.c(&self.c2, tx, false);
            psi -= self.c(&self.c1, tx, false) + self.w(x) * (c2_t - c2_tx);
        }
        if a <= t {
            psi += (c2_t - self.c(&self.c2, a, true)) * self.inv_k(a);
        }
        if obs.delta() && v <= t {
            psi += (c2_t - self.c(&self.c2, v, true)) * self.inv_k(v);
        }
        psi
    }
}

/// `n⁻¹ Var̂[(1 - F̃ₙ(t)) ψᵢ(t)]` at every grid point, with the empirical
/// variance taken over the subjects of `d`.
pub fn plugin_variance(d: &Dataset, grid: &EvalGrid) -> Vec<f64> {
    plugin_variance_with(&PluginContext::new(d), d, grid)
}

pub(crate) fn plugin_variance_with(ctx: &PluginContext, d: &Dataset, grid: &EvalGrid) -> Vec<f64> {
    let n = d.n() as f64;
    let mut xs = Vec::with_capacity(d.n());
    grid.points()
        .iter()
        .map(|&t| {
            let surv = 1.0 - ctx.fit.f_tilde.eval_at(t);
            xs.clear();
            xs.extend(d.iter().map(|o| surv * (ctx.psi_1(o, t) + ctx.psi_2(o, t))));
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            var / n
        })
        .collect()
}
