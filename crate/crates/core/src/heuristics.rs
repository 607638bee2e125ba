//! The heuristic constraint system on `(α₀, α₁, κ)`, its optimizer, the
//! log-expectations of the independent-set counts and the score `f(ℓ,k,n)`.
//!
//! Every `+o(1)` term is dropped.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Signed constraint margins; nonnegative means satisfied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slacks {
    /// `rhs − ((α₀+α₁)² − α₀²)` with `rhs = 1/2 − 2δ`.
    pub density: f64,
    /// `1/2 − α₀κ`: the count of independent sets peaks at `ℓ = k`.
    pub peak_at_k: f64,
    /// `(α₀+α₁)κ − 1`.
    pub full_sets: f64,
    /// `κ − (α₀+α₁)`: neighbourhoods are independent.
    pub neighbourhoods: f64,
    /// `1 − (2α₀κ − α₀² + α₀α₁)`: sets meeting a seed neighbourhood.
    pub seed_neighbourhoods: f64,
}

impl Slacks {
    pub fn as_array(&self) -> [f64; 5] {
        [self.density, self.peak_at_k, self.full_sets, self.neighbourhoods, self.seed_neighbourhoods]
    }

    pub const NAMES: [&'static str; 5] =
        ["density", "peak_at_k", "full_sets", "neighbourhoods", "seed_neighbourhoods"];
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicPoint {
    pub alpha0: f64,
    pub alpha1: f64,
    pub kappa: f64,
    pub slacks: Slacks,
}

impl HeuristicPoint {
    pub fn new(alpha0: f64, alpha1: f64, kappa: f64, delta: f64) -> Self {
        HeuristicPoint { alpha0, alpha1, kappa, slacks: constraint_slacks(alpha0, alpha1, kappa, delta) }
    }
}

/// The five slacks. With `delta > 0` the density bound is `1/2 − 2δ`.
pub fn constraint_slacks(alpha0: f64, alpha1: f64, kappa: f64, delta: f64) -> Slacks {
    slacks_with_rhs(alpha0, alpha1, kappa, 0.5 - 2.0 * delta)
}

fn slacks_with_rhs(a0: f64, a1: f64, kappa: f64, rhs: f64) -> Slacks {
    let s = a0 + a1;
    Slacks {
        density: rhs - (s * s - a0 * a0),
        peak_at_k: 0.5 - a0 * kappa,
        full_sets: s * kappa - 1.0,
        neighbourhoods: kappa - s,
        seed_neighbourhoods: 1.0 - (2.0 * a0 * kappa - a0 * a0 + a0 * a1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KappaMode {
    /// All five constraints.
    Full,
    /// Without `α₀κ ≤ 1/2` (`drop_2_8` on the command line). The full-set
    /// constraint is then imposed for every number of parts `ℓ ≤ k`, and the
    /// seed-neighbourhood constraint is not imposed.
    DropPeakAtK,
}

impl FromStr for KappaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(KappaMode::Full),
            "drop_2_8" | "drop-2-8" | "drop_peak" => Ok(KappaMode::DropPeakAtK),
            other => Err(Error::param("mode", format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaOptions {
    pub mode: KappaMode,
    /// Right side of the density constraint.
    pub density_rhs: f64,
    /// Whether `κ ≥ α₀+α₁` is imposed.
    pub neighbourhoods: bool,
}

impl KappaOptions {
    pub fn new(mode: KappaMode) -> Self {
        KappaOptions { mode, density_rhs: 0.5, neighbourhoods: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaOptimum {
    pub kappa: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub slacks: Slacks,
}

/// Smallest feasible κ at `(α₀, α₁)`, if any.
fn min_kappa_at(a0: f64, a1: f64, o: &KappaOptions) -> Option<f64> {
    let s = a0 + a1;
    if a0 < 0.0 || a1 < 0.0 || s <= 0.0 || s * s - a0 * a0 > o.density_rhs {
        return None;
    }
    let mut lo = 1.0 / s;
    if o.neighbourhoods {
        lo = lo.max(s);
    }
    match o.mode {
        KappaMode::Full => {
            let mut hi = f64::INFINITY;
            if a0 > 0.0 {
                hi = hi.min(0.5 / a0).min((1.0 + a0 * a0 - a0 * a1) / (2.0 * a0));
            }
            (lo <= hi).then_some(lo)
        }
        KappaMode::DropPeakAtK => {
            // ℓ/2 − α₀ℓ²/2 − α₁κ²/2 ≤ 0 for all ℓ ≤ κ (in units of √(n log n));
            // past ℓ = 1/(2α₀) the maximum is interior
            if a0 == 0.0 || lo < 0.5 / a0 {
                Some(lo)
            } else if a1 > 0.0 {
                Some(lo.max(0.5 / (a0 * a1).sqrt()))
            } else {
                None
            }
        }
    }
}

/// Minimizes κ over `(α₀, α₁)` by a shrinking grid: each level scans a
/// 41×41 grid around the incumbent and quarters the window, until the
/// window is below 1e−13.
pub fn optimize_kappa(opts: &KappaOptions) -> KappaOptimum {
    const GRID: usize = 41;
    let (mut c0, mut c1, mut w) = (1.0, 1.0, 1.0);
    let mut best: Option<(f64, f64, f64)> = None;
    while w > 1e-13 {
        for a in 0..GRID {
            for b in 0..GRID {
                let a0 = c0 - w + 2.0 * w * a as f64 / (GRID - 1) as f64;
                let a1 = c1 - w + 2.0 * w * b as f64 / (GRID - 1) as f64;
                if let Some(k) = min_kappa_at(a0, a1, opts) {
                    if best.map_or(true, |(bk, _, _)| k < bk) {
                        best = Some((k, a0, a1));
                    }
                }
            }
        }
        if let Some((_, a0, a1)) = best {
            c0 = a0;
            c1 = a1;
        }
        w /= 4.0;
    }
    let (kappa, alpha0, alpha1) = best.expect("the constraint set is feasible");
    KappaOptimum { kappa, alpha0, alpha1, slacks: slacks_with_rhs(alpha0, alpha1, kappa, opts.density_rhs) }
}

/// `x(x−1)/2` for `x ≥ 1`, else 0.
pub fn binom2(x: f64) -> f64 {
    if x >= 1.0 {
        x * (x - 1.0) / 2.0
    } else {
        0.0
    }
}

/// `ln C(n, l)` through log-gamma; `n`, `l` may be real.
pub fn ln_choose(n: f64, l: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(l + 1.0) - ln_gamma(n - l + 1.0)
}

fn check_args(n: f64, k: f64, l: f64, p0: f64, p1: f64) -> Result<()> {
    for p in [p0, p1] {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::BadProbability(p));
        }
    }
    if !(0.0 <= l && l <= k && k <= n) {
        return Err(Error::param("l", format!("need 0 <= l <= k <= n, got l = {l}, k = {k}, n = {n}")));
    }
    Ok(())
}

/// `ln C(n,ℓ) + C(ℓ,2) ln(1−p₀) + C(k,2) ln(1−p₁)`; the `n^{o(k)}` factor is
/// omitted.
pub fn log_e_ikl(n: f64, k: f64, l: f64, p0: f64, p1: f64) -> Result<f64> {
    check_args(n, k, l, p0, p1)?;
    Ok(ln_choose(n, l) + binom2(l) * (-p0).ln_1p() + binom2(k) * (-p1).ln_1p())
}

/// As [`log_e_ikl`] with `C(k,2)` replaced by `C(k,2) − C(p₀n,2)`.
pub fn log_e_jkl(n: f64, k: f64, l: f64, p0: f64, p1: f64) -> Result<f64> {
    check_args(n, k, l, p0, p1)?;
    Ok(ln_choose(n, l) + binom2(l) * (-p0).ln_1p() + (binom2(k) - binom2(p0 * n)) * (-p1).ln_1p())
}

/// `f(ℓ,k,n) = ½ℓ log n − p₁C(k,2) − p₀C(ℓ,2) + ½(k−ℓ)p₁ min{k−ℓ, p₀n}`.
pub fn f_score(l: f64, k: f64, n: f64, p0: f64, p1: f64) -> f64 {
    0.5 * l * n.ln() - p1 * binom2(k) - p0 * binom2(l) + 0.5 * (k - l) * p1 * (k - l).min(p0 * n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct R3kBound {
    pub n: f64,
    pub k: f64,
    /// `k² / (3(1+δ)² log k)`.
    pub bound: f64,
}

/// `k = (1+δ)√((3n/2) log n)` and the implied Ramsey bound.
pub fn predicted_r3k_bound(n: f64, delta: f64) -> Result<R3kBound> {
    if !(n >= 3.0) {
        return Err(Error::param("n", format!("need n >= 3, got {n}")));
    }
    let k = (1.0 + delta) * (1.5 * n * n.ln()).sqrt();
    let bound = k * k / (3.0 * (1.0 + delta).powi(2) * k.ln());
    Ok(R3kBound { n, k, bound })
}

/// The parameters used in the final proof: `α₀ = α₁ = (1−3δ)/√6`.
pub fn paper_alpha(delta: f64) -> f64 {
    (1.0 - 3.0 * delta) / 6f64.sqrt()
}
