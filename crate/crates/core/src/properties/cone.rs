use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{binomial, DEFAULT_ENUMERATION_BUDGET};
use crate::error::{Error, Result};
use crate::linalg::{l2_norm, nullspace, DenseMatrix, NullspaceBasis, DEFAULT_RANK_TOLERANCE};

/// The cone `{b : ‖b_{Tᶜ}‖₁ <= c‖b_T‖₁}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeSpec {
    /// Index set `T` (0-based, sorted, distinct).
    pub support: Vec<usize>,
    pub c: f64,
}

impl ConeSpec {
    pub fn new(support: impl IntoIterator<Item = usize>, c: f64) -> Result<Self> {
        if c.is_nan() || c <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "cone constant must be positive, got {c}"
            )));
        }
        let mut support: Vec<usize> = support.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        Ok(ConeSpec { support, c })
    }

    fn mask(&self, p: usize) -> Vec<bool> {
        let mut mask = vec![false; p];
        for &j in &self.support {
            if j < p {
                mask[j] = true;
            }
        }
        mask
    }
}

/// `(‖b_T‖₁, ‖b_{Tᶜ}‖₁)`.
pub fn l1_split(b: &[f64], support: &[usize]) -> (f64, f64) {
    let mut on = 0.0;
    let mut total = 0.0;
    let mut in_t = vec![false; b.len()];
    for &j in support {
        if j < b.len() {
            in_t[j] = true;
        }
    }
    let mut off = 0.0;
    for (j, v) in b.iter().enumerate() {
        total += v.abs();
        if in_t[j] {
            on += v.abs();
        } else {
            off += v.abs();
        }
    }
    debug_assert!((on + off - total).abs() <= 1e-12 * total.max(1.0));
    (on, off)
}

/// `‖b_{Tᶜ}‖₁ / ‖b_T‖₁`; infinite when only the off-support part is nonzero,
/// zero for `b = 0`.
pub fn cone_ratio(b: &[f64], support: &[usize]) -> f64 {
    let (on, off) = l1_split(b, support);
    if on > 0.0 {
        off / on
    } else if off > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

pub fn in_cone(b: &[f64], spec: &ConeSpec) -> bool {
    let (on, off) = l1_split(b, &spec.support);
    off <= spec.c * on
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RnMethod {
    /// Nullspace is `{0}`.
    TrivialNullspace,
    /// One-dimensional nullspace decided by its spanning ray.
    Exact1d,
    /// Sampled search for a witness; `holds = true` is not a certificate.
    Heuristic,
}

/// Outcome of a restricted nullspace check for one `(T, c)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RnVerdict {
    pub holds: bool,
    /// A nonzero nullspace vector inside the cone, when RN fails.
    pub witness: Option<Vec<f64>>,
    pub method: RnMethod,
    /// Supremum of `c` for which RN holds: exact for [`RnMethod::Exact1d`]
    /// (infinite when `z_T = 0` or the nullspace is trivial), an upper bound
    /// for [`RnMethod::Heuristic`].
    pub critical_c: Option<f64>,
}

/// Search effort for nullspaces of dimension two or more.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeuristicConfig {
    pub samples: usize,
    pub starts: usize,
    pub ascent_iterations: usize,
    pub seed: u64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            samples: 10_000,
            starts: 16,
            ascent_iterations: 200,
            seed: 0,
        }
    }
}

pub fn rn_check(x: &DenseMatrix, spec: &ConeSpec, ns: &NullspaceBasis) -> RnVerdict {
    rn_check_with(x, spec, ns, &HeuristicConfig::default())
}

/// Decides `ℂ(T, c) ∩ 𝒩(X) = {0}`.
pub fn rn_check_with(
    x: &DenseMatrix,
    spec: &ConeSpec,
    ns: &NullspaceBasis,
    heuristic: &HeuristicConfig,
) -> RnVerdict {
    match ns.dim {
        0 => RnVerdict {
            holds: true,
            witness: None,
            method: RnMethod::TrivialNullspace,
            critical_c: Some(f64::INFINITY),
        },
        1 => {
            let z = &ns.basis[0];
            let (on, off) = l1_split(z, &spec.support);
            let critical = if on > 0.0 { off / on } else { f64::INFINITY };
            // the cone is closed under scaling and negation, so the ray decides
            let holds = !in_cone(z, spec);
            RnVerdict {
                holds,
                witness: (!holds).then(|| z.clone()),
                method: RnMethod::Exact1d,
                critical_c: Some(critical),
            }
        }
        _ => heuristic_rn(x, spec, ns, heuristic),
    }
}

fn combine(basis: &[Vec<f64>], coeffs: &[f64], p: usize) -> Vec<f64> {
    let mut w = vec![0.0; p];
    for (v, &a) in basis.iter().zip(coeffs) {
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi += a * vi;
        }
    }
    w
}

fn unit(v: &mut [f64]) {
    let n = l2_norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Maximizes `c‖(Bv)_T‖₁ − ‖(Bv)_{Tᶜ}‖₁` over unit `v` by random sampling
/// followed by projected subgradient ascent from the best samples.
fn heuristic_rn(
    x: &DenseMatrix,
    spec: &ConeSpec,
    ns: &NullspaceBasis,
    config: &HeuristicConfig,
) -> RnVerdict {
    let p = x.cols();
    let d = ns.dim;
    let mask = spec.mask(p);
    let score = |w: &[f64]| -> f64 {
        let (on, off) = l1_split(w, &spec.support);
        spec.c * on - off
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best_ratio = f64::INFINITY;
    let mut track_ratio = |w: &[f64]| {
        let r = cone_ratio(w, &spec.support);
        if r < best_ratio {
            best_ratio = r;
        }
    };

    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    for i in 0..d {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        let w = combine(&ns.basis, &v, p);
        candidates.push((score(&w), v));
    }
    for _ in 0..config.samples {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        unit(&mut v);
        let w = combine(&ns.basis, &v, p);
        track_ratio(&w);
        candidates.push((score(&w), v));
    }
    for (_, v) in &candidates[..d] {
        track_ratio(&combine(&ns.basis, v, p));
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    candidates.truncate(config.starts.max(1));

    let mut best: Option<(f64, Vec<f64>)> = None;
    for (s0, mut v) in candidates {
        let mut local_best = (s0, v.clone());
        for it in 0..config.ascent_iterations {
            let w = combine(&ns.basis, &v, p);
            // subgradient of the score in w-space, pulled back through B
            let gw: Vec<f64> = w
                .iter()
                .zip(&mask)
                .map(|(wi, &t)| {
                    if t {
                        spec.c * wi.signum()
                    } else {
                        -wi.signum()
                    }
                })
                .collect();
            let gv: Vec<f64> = ns
                .basis
                .iter()
                .map(|b| b.iter().zip(&gw).map(|(a, g)| a * g).sum())
                .collect();
            let step = 0.5 / (1.0 + it as f64).sqrt();
            let gn = l2_norm(&gv);
            if gn == 0.0 {
                break;
            }
            for (vi, gi) in v.iter_mut().zip(&gv) {
                *vi += step * gi / gn;
            }
            unit(&mut v);
            let w = combine(&ns.basis, &v, p);
            track_ratio(&w);
            let current = score(&w);
            if current > local_best.0 {
                local_best = (current, v.clone());
            }
        }
        if best.as_ref().is_none_or(|b| local_best.0 > b.0) {
            best = Some(local_best);
        }
    }

    let (_, v) = best.expect("at least one candidate");
    let w = combine(&ns.basis, &v, p);
    let scale = x.max_abs();
    let in_nullspace = x
        .mul_vec(&w)
        .map(|xw| l2_norm(&xw) <= ns.rank_tolerance * l2_norm(&w) * scale.max(1.0) * 10.0)
        .unwrap_or(false);
    let found = l2_norm(&w) > 0.0 && in_cone(&w, spec) && in_nullspace;
    RnVerdict {
        holds: !found,
        witness: found.then_some(w),
        method: RnMethod::Heuristic,
        critical_c: Some(best_ratio),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RnUniformResult {
    pub holds: bool,
    /// Index set with the smallest critical constant (0-based).
    pub worst_support: Vec<usize>,
    pub critical_c: f64,
    pub method: RnMethod,
    /// Index sets examined; zero for the closed form.
    pub sets_checked: u128,
    pub witness: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RnUniformOptions {
    /// Enumerate every `|T| = t` even when the closed form applies.
    pub exhaustive: bool,
    pub budget: u128,
    pub heuristic: HeuristicConfig,
}

impl Default for RnUniformOptions {
    fn default() -> Self {
        RnUniformOptions {
            exhaustive: false,
            budget: DEFAULT_ENUMERATION_BUDGET,
            heuristic: HeuristicConfig::default(),
        }
    }
}

pub fn rn_uniform(
    x: &DenseMatrix,
    t: usize,
    c: f64,
    ns: &NullspaceBasis,
) -> Result<RnUniformResult> {
    rn_uniform_with(x, t, c, ns, &RnUniformOptions::default())
}

/// `RN(T, c)` for every `|T| <= t`.
///
/// Cones grow with `T`, so only sets of size exactly `t` need checking. With
/// a nullspace of dimension at most one the worst set is the `t` largest
/// `|z_j|` (smallest index first on ties) and no enumeration is needed.
pub fn rn_uniform_with(
    x: &DenseMatrix,
    t: usize,
    c: f64,
    ns: &NullspaceBasis,
    options: &RnUniformOptions,
) -> Result<RnUniformResult> {
    let p = x.cols();
    if t > p {
        return Err(Error::InvalidParameter(format!(
            "uniform RN order {t} exceeds the {p} columns"
        )));
    }
    let spec_for = |support: Vec<usize>| ConeSpec::new(support, c);

    if !options.exhaustive && ns.dim == 0 {
        return Ok(RnUniformResult {
            holds: true,
            worst_support: (0..t).collect(),
            critical_c: f64::INFINITY,
            method: RnMethod::TrivialNullspace,
            sets_checked: 0,
            witness: None,
        });
    }
    if !options.exhaustive && ns.dim == 1 {
        let z = &ns.basis[0];
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| z[b].abs().total_cmp(&z[a].abs()));
        let mut worst: Vec<usize> = order[..t].to_vec();
        worst.sort_unstable();
        let verdict = rn_check(x, &spec_for(worst.clone())?, ns);
        let critical = verdict.critical_c.unwrap_or(f64::INFINITY);
        return Ok(RnUniformResult {
            holds: verdict.holds,
            worst_support: worst,
            critical_c: critical,
            method: RnMethod::Exact1d,
            sets_checked: 0,
            witness: verdict.witness,
        });
    }

    let needed = binomial(p, t);
    if needed > options.budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: options.budget,
        });
    }
    let mut holds = true;
    let mut worst: Option<(f64, Vec<usize>)> = None;
    let mut witness = None;
    let mut method = RnMethod::TrivialNullspace;
    for support in (0..p).combinations(t) {
        let verdict = rn_check_with(x, &spec_for(support.clone())?, ns, &options.heuristic);
        method = verdict.method;
        let critical = verdict.critical_c.unwrap_or(f64::INFINITY);
        if worst.as_ref().is_none_or(|(w, _)| critical < *w) {
            worst = Some((critical, support.clone()));
        }
        if !verdict.holds && holds {
            holds = false;
            witness = verdict.witness;
        }
    }
    let (critical_c, worst_support) = worst.unwrap_or((f64::INFINITY, Vec::new()));
    Ok(RnUniformResult {
        holds,
        worst_support,
        critical_c,
        method,
        sets_checked: needed,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReEstimate {
    /// Smallest sampled `‖Xb‖₂² / ‖b‖₂²`, an upper bound on the true constant.
    pub phi_estimate: f64,
    pub min_witness: Vec<f64>,
    pub samples_drawn: usize,
}

/// Sampled restricted eigenvalue over `ℂ(T, c)`.
///
/// Half of the budget draws random sparse cone vectors, the other half tries
/// nullspace directions (and small perturbations of them) that lie in the
/// cone; nullspace candidates outside the cone fall back to cone draws.
pub fn re_lower_bound(
    x: &DenseMatrix,
    spec: &ConeSpec,
    samples: usize,
    seed: u64,
) -> Result<ReEstimate> {
    let p = x.cols();
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "re_lower_bound needs samples >= 1".into(),
        ));
    }
    if spec.support.is_empty() || spec.support.iter().any(|&j| j >= p) {
        return Err(Error::InvalidParameter(
            "restricted eigenvalue needs a non-empty index set inside the columns".into(),
        ));
    }
    let mask = spec.mask(p);
    let off: Vec<usize> = (0..p).filter(|&j| !mask[j]).collect();
    let ns = nullspace(x, DEFAULT_RANK_TOLERANCE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let rayleigh = |b: &[f64]| -> Result<f64> {
        let xb = x.mul_vec(b)?;
        Ok(xb.iter().map(|v| v * v).sum::<f64>() / b.iter().map(|v| v * v).sum::<f64>())
    };

    let mut best = (f64::INFINITY, Vec::new());
    let consider = |b: Vec<f64>, best: &mut (f64, Vec<f64>)| -> Result<()> {
        if b.iter().all(|v| *v == 0.0) {
            return Ok(());
        }
        let q = rayleigh(&b)?;
        if q < best.0 {
            *best = (q, b);
        }
        Ok(())
    };

    let mut drawn = 0;
    // nullspace basis vectors themselves first
    for z in &ns.basis {
        if drawn >= samples {
            break;
        }
        if in_cone(z, spec) {
            consider(z.clone(), &mut best)?;
            drawn += 1;
        }
    }

    while drawn < samples {
        let use_nullspace = ns.dim > 0 && drawn % 2 == 1;
        let mut candidate = None;
        if use_nullspace {
            let coeffs: Vec<f64> = (0..ns.dim).map(|_| rng.sample(StandardNormal)).collect();
            let mut w = combine(&ns.basis, &coeffs, p);
            let eps = [0.0, 1e-3, 1e-1][rng.random_range(0..3)] * l2_norm(&w);
            for wi in &mut w {
                let g: f64 = rng.sample(StandardNormal);
                *wi += eps * g;
            }
            if in_cone(&w, spec) {
                candidate = Some(w);
            }
        }
        let b = match candidate {
            Some(w) => w,
            None => {
                let mut b = vec![0.0; p];
                for &j in &spec.support {
                    b[j] = rng.sample(StandardNormal);
                }
                let (on, _) = l1_split(&b, &spec.support);
                if !off.is_empty() {
                    let active = rng.random_range(0..=off.len());
                    let chosen: Vec<usize> = {
                        let mut idx = off.clone();
                        for i in 0..active {
                            let k = rng.random_range(i..idx.len());
                            idx.swap(i, k);
                        }
                        idx.truncate(active);
                        idx
                    };
                    let raw: Vec<f64> = chosen.iter().map(|_| rng.sample(StandardNormal)).collect();
                    let raw_l1: f64 = raw.iter().map(|v: &f64| v.abs()).sum();
                    if raw_l1 > 0.0 {
                        let target = rng.random_range(0.0..=1.0) * spec.c * on;
                        for (&j, r) in chosen.iter().zip(&raw) {
                            b[j] = r * target / raw_l1;
                        }
                    }
                }
                b
            }
        };
        consider(b, &mut best)?;
        drawn += 1;
    }
    Ok(ReEstimate {
        phi_estimate: best.0,
        min_witness: best.1,
        samples_drawn: drawn,
    })
}
