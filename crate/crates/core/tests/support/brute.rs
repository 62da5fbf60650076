//! Literal-definition evaluation of every estimator: each process is a
//! direct sum over subjects at the requested time, and each product runs
//! over the distinct times where its defining process jumps.

use lbrc_core::data::{Dataset, LbrcObservation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obs {
    pub a: f64,
    pub v: f64,
    pub delta: bool,
}

impl Obs {
    pub fn y(&self) -> f64 {
        self.a + self.v
    }
}

pub fn to_dataset(xs: &[Obs]) -> Dataset {
    Dataset::new(xs.iter().map(|o| LbrcObservation::new(o.a, o.v, o.delta).unwrap()).collect()).unwrap()
}

fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn nf(xs: &[Obs]) -> f64 {
    xs.len() as f64
}

fn clamp(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

fn distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn n_bar(xs: &[Obs], t: f64) -> f64 {
    xs.iter().map(|o| ind(o.delta && o.y() <= t)).sum::<f64>() / nf(xs)
}

pub fn r_bar(xs: &[Obs], t: f64) -> f64 {
    xs.iter().map(|o| ind(o.a <= t && t <= o.y())).sum::<f64>() / nf(xs)
}

pub fn q_tilde(xs: &[Obs], t: f64) -> f64 {
    xs.iter().map(|o| ind(o.a <= t) + ind(o.delta && o.v <= t)).sum::<f64>() / nf(xs)
}

pub fn k_tilde(xs: &[Obs], t: f64) -> f64 {
    xs.iter().map(|o| ind(o.a >= t) + ind(o.v >= t)).sum::<f64>() / nf(xs)
}

fn dq(xs: &[Obs], u: f64) -> f64 {
    xs.iter().map(|o| ind(o.a == u) + ind(o.delta && o.v == u)).sum::<f64>() / nf(xs)
}

fn dn(xs: &[Obs], u: f64) -> f64 {
    xs.iter().map(|o| ind(o.delta && o.y() == u)).sum::<f64>() / nf(xs)
}

pub fn pooled_times(xs: &[Obs]) -> Vec<f64> {
    distinct(xs.iter().map(|o| o.a).chain(xs.iter().filter(|o| o.delta).map(|o| o.v)).collect())
}

pub fn event_times(xs: &[Obs]) -> Vec<f64> {
    distinct(xs.iter().filter(|o| o.delta).map(|o| o.y()).collect())
}

pub fn s_a(xs: &[Obs], t: f64) -> f64 {
    let mut s = 1.0;
    for u in pooled_times(xs).into_iter().filter(|&u| u <= t) {
        let k = k_tilde(xs, u);
        if k > 0.0 {
            s *= clamp(1.0 - dq(xs, u) / k);
        }
    }
    s
}

pub fn r_tilde(xs: &[Obs], t: f64) -> f64 {
    xs.iter().map(|o| ind(o.y() >= t)).sum::<f64>() / nf(xs) - s_a(xs, t)
}

pub fn lambda_tilde(xs: &[Obs], t: f64) -> f64 {
    let n = nf(xs);
    event_times(xs).into_iter().filter(|&u| u <= t).map(|u| dn(xs, u) / r_tilde(xs, u).max(1.0 / n)).sum()
}

pub fn lambda_hat(xs: &[Obs], t: f64) -> f64 {
    let n = nf(xs);
    event_times(xs).into_iter().filter(|&u| u <= t).map(|u| dn(xs, u) / r_bar(xs, u).max(1.0 / n)).sum()
}

pub fn lambda_a_tilde(xs: &[Obs], t: f64) -> f64 {
    pooled_times(xs)
        .into_iter()
        .filter(|&u| u <= t)
        .map(|u| {
            let k = k_tilde(xs, u);
            if k > 0.0 {
                dq(xs, u) / k
            } else {
                0.0
            }
        })
        .sum()
}

pub fn f_tilde(xs: &[Obs], t: f64) -> f64 {
    let n = nf(xs);
    let mut s = 1.0;
    for u in event_times(xs).into_iter().filter(|&u| u <= t) {
        s *= clamp(1.0 - dn(xs, u) / r_tilde(xs, u).max(1.0 / n));
    }
    1.0 - s
}

/// Subjects with `δ = 1` ordered by total time.
fn events_by_time(xs: &[Obs]) -> Vec<Obs> {
    let mut ev: Vec<Obs> = xs.iter().copied().filter(|o| o.delta).collect();
    ev.sort_by(|p, q| p.y().total_cmp(&q.y()));
    ev
}

pub fn f_tjw(xs: &[Obs], t: f64) -> f64 {
    let n = nf(xs);
    let mut s = 1.0;
    for o in events_by_time(xs).into_iter().filter(|o| o.y() <= t) {
        s *= clamp(1.0 - 1.0 / (n * r_bar(xs, o.y())));
    }
    1.0 - s
}

pub fn f_bar(xs: &[Obs], t: f64) -> f64 {
    let n = nf(xs);
    let mut s = 1.0;
    for o in events_by_time(xs).into_iter().filter(|o| o.y() <= t) {
        s *= clamp(1.0 - 1.0 / (n * r_tilde(xs, o.y()) + 1.0));
    }
    1.0 - s
}

/// Times worth checking: every jump point of any process, points just
/// left of and between them, zero and beyond the data.
pub fn probe_times(xs: &[Obs]) -> Vec<f64> {
    let mut base: Vec<f64> =
        xs.iter().flat_map(|o| [o.a, o.v, o.y()]).chain(pooled_times(xs)).chain(event_times(xs)).collect();
    base = distinct(base);
    let mut out = vec![0.0];
    for (i, &u) in base.iter().enumerate() {
        out.push(u);
        out.push(u - 1e-9 * u.max(1.0));
        if let Some(&w) = base.get(i + 1) {
            out.push(0.5 * (u + w));
        }
    }
    out.push(base.last().copied().unwrap_or(1.0) + 1.0);
    distinct(out.into_iter().filter(|t| *t >= 0.0).collect())
}

/// Textbook Kaplan-Meier `1 - Ŝ(t)` at the distinct event times, for
/// untruncated data: `r` counts subjects with observed time `>= u`.
pub fn kaplan_meier(times: &[f64], events: &[bool]) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&i, &j| times[i].total_cmp(&times[j]));
    let mut s = 1.0;
    let mut out = Vec::new();
    let mut k = 0;
    while k < order.len() {
        let u = times[order[k]];
        let mut d = 0usize;
        let mut m = k;
        while m < order.len() && times[order[m]] == u {
            d += events[order[m]] as usize;
            m += 1;
        }
        if d > 0 {
            let r = (order.len() - k) as f64;
            s *= 1.0 - d as f64 / r;
            out.push((u, 1.0 - s));
        }
        k = m;
    }
    out
}

/// Lynden-Bell `1 - Ŝ(x)` for truncated, uncensored data: a product over
/// subjects in time order with `nR̄(yᵢ)` counted directly.
pub fn lynden_bell(a: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&i, &j| y[i].total_cmp(&y[j]));
    let mut s = 1.0;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &i in &order {
        let risk = (0..y.len()).filter(|&j| a[j] <= y[i] && y[i] <= y[j]).count() as f64;
        s *= 1.0 - 1.0 / risk;
        match out.last_mut() {
            Some(last) if last.0 == y[i] => last.1 = 1.0 - s,
            _ => out.push((y[i], 1.0 - s)),
        }
    }
    out
}

/// Textbook Nelson-Aalen cumulative hazard at the distinct event times.
pub fn nelson_aalen(times: &[f64], events: &[bool]) -> Vec<(f64, f64)> {
    let mut ev: Vec<f64> = times.iter().zip(events).filter(|(_, &e)| e).map(|(&t, _)| t).collect();
    ev = distinct(ev);
    let mut acc = 0.0;
    ev.into_iter()
        .map(|u| {
            let d = times.iter().zip(events).filter(|(&t, &e)| e && t == u).count() as f64;
            let r = times.iter().filter(|&&t| t >= u).count() as f64;
            acc += d / r;
            (u, acc)
        })
        .collect()
}
