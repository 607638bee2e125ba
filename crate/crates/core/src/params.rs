//! Process parameters and the two parameter profiles.
//!
//! The paper-asymptotic profile derives γ, r, T and the halting threshold
//! from `n` exactly as the formulas state. At any feasible `n` those
//! formulas make `T` astronomically large and halt the process before its
//! first step, so the desk profile takes γ, r, T and the halting threshold
//! as plain knobs. Every monitor reads these values from here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    PaperAsymptotic,
    Desk,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::PaperAsymptotic => "paper-asymptotic",
            Profile::Desk => "desk",
        })
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-asymptotic" | "paper" => Ok(Profile::PaperAsymptotic),
            "desk" => Ok(Profile::Desk),
            other => Err(Error::param("profile", format!("unknown profile `{other}`"))),
        }
    }
}

/// All scalar inputs of one process run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    pub profile: Profile,
    /// Requested vertex count; the effective count is rounded down to a
    /// multiple of `r`.
    pub n: usize,
    pub delta: f64,
    pub beta: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub gamma: f64,
    pub r: usize,
    pub kappa: f64,
    pub rng_seed: u64,
    /// Number of nibble steps `T`. `None` means "run until the process halts".
    pub steps: Option<usize>,
    /// Hard cap on the number of nibble steps.
    pub max_steps: usize,
    /// The step is taken only while `p_{i+1} <= halt_p`.
    pub halt_p: f64,
    /// Threshold for the large-degree set `L(I)`; `None` uses `n^{2β}`.
    pub l_threshold: Option<usize>,
}

impl ProcessParams {
    /// Formulas exactly as stated: γ = (log n)^{-10}, r = (log n)^2,
    /// T = α₁γ^{-1}√log n, halting once p_{i+1} > γ³.
    pub fn paper(n: usize, delta: f64, alpha0: f64, alpha1: f64, rng_seed: u64) -> Self {
        let ln = (n as f64).ln();
        let gamma = ln.powi(-10);
        let r = (ln * ln).round().max(1.0) as usize;
        let steps = (alpha1 / gamma * ln.sqrt()).floor();
        ProcessParams {
            profile: Profile::PaperAsymptotic,
            n,
            delta,
            beta: delta / 256.0,
            alpha0,
            alpha1,
            gamma,
            r,
            kappa: (1.5f64).sqrt(),
            rng_seed,
            steps: Some(if steps.is_finite() { steps as usize } else { usize::MAX }),
            max_steps: usize::MAX,
            halt_p: gamma.powi(3),
            l_threshold: None,
        }
    }

    /// Desk defaults: γ = 0.1, r = 1, T from the formula, halting once
    /// p_{i+1} exceeds 1/2.
    pub fn desk(n: usize, alpha0: f64, alpha1: f64, rng_seed: u64) -> Self {
        ProcessParams {
            profile: Profile::Desk,
            n,
            delta: 0.01,
            beta: 0.01 / 256.0,
            alpha0,
            alpha1,
            gamma: 0.1,
            r: 1,
            kappa: (1.5f64).sqrt(),
            rng_seed,
            steps: None,
            max_steps: 10_000,
            halt_p: 0.5,
            l_threshold: None,
        }
    }

    /// Vertex count actually used: `n` rounded down to a multiple of `r`.
    pub fn effective_n(&self) -> usize {
        if self.r == 0 {
            return 0;
        }
        self.n / self.r * self.r
    }

    pub fn parts(&self) -> usize {
        self.effective_n() / self.r.max(1)
    }

    fn ln_n(&self) -> f64 {
        (self.effective_n() as f64).ln()
    }

    /// √(log n / n).
    pub fn scale(&self) -> f64 {
        let n = self.effective_n() as f64;
        (self.ln_n() / n).sqrt()
    }

    pub fn p0(&self) -> f64 {
        self.alpha0 * self.scale()
    }

    pub fn p1(&self) -> f64 {
        self.alpha1 * self.scale()
    }

    /// T = α₁γ^{-1}√log n.
    pub fn t_formula(&self) -> f64 {
        self.alpha1 / self.gamma * self.ln_n().sqrt()
    }

    /// The step budget: explicit `steps` when set, else unlimited, always
    /// capped by `max_steps`.
    pub fn step_budget(&self) -> usize {
        self.steps.unwrap_or(usize::MAX).min(self.max_steps)
    }

    /// k = (1+δ)√((3n/2) log n).
    pub fn k(&self) -> f64 {
        let n = self.effective_n() as f64;
        (1.0 + self.delta) * (1.5 * n * self.ln_n()).sqrt()
    }

    /// ε_i = (i+1)γ³.
    pub fn eps(&self, i: usize) -> f64 {
        (i as f64 + 1.0) * self.gamma.powi(3)
    }

    /// ψ_i = iγ/√n + p₀.
    pub fn psi(&self, i: usize) -> f64 {
        i as f64 * self.gamma / (self.effective_n() as f64).sqrt() + self.p0()
    }

    /// s_* = (1−p₀)(1−p₀²)^{n/r−2}.
    pub fn s_star(&self) -> f64 {
        let p0 = self.p0();
        let m = self.parts() as f64;
        (1.0 - p0) * (1.0 - p0 * p0).powf((m - 2.0).max(0.0))
    }

    /// Threshold for `L(I)`: the override if set, else ⌈n^{2β}⌉.
    pub fn large_degree_threshold(&self) -> usize {
        self.l_threshold.unwrap_or_else(|| {
            (self.effective_n() as f64).powf(2.0 * self.beta).ceil().max(1.0) as usize
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::param("r", "part size must be at least 1"));
        }
        if self.parts() < 3 {
            return Err(Error::param(
                "n",
                format!("need n/r >= 3 parts, got n = {}, r = {}", self.n, self.r),
            ));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::param("gamma", format!("{} not in (0, 1)", self.gamma)));
        }
        if !(0.0..0.125).contains(&self.delta) {
            return Err(Error::param("delta", format!("{} not in [0, 1/8)", self.delta)));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::param("beta", format!("{} is negative", self.beta)));
        }
        for (name, a) in [("alpha0", self.alpha0), ("alpha1", self.alpha1)] {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::param(name, format!("{a} must be finite and >= 0")));
            }
        }
        for (name, p) in [("alpha0", self.p0()), ("alpha1", self.p1())] {
            if p > 1.0 {
                return Err(Error::param(name, format!("implied density {p} exceeds 1")));
            }
        }
        if !(self.halt_p > 0.0 && self.halt_p < 1.0) {
            return Err(Error::param("halt_p", format!("{} not in (0, 1)", self.halt_p)));
        }
        if !(self.kappa >= 0.0) {
            return Err(Error::param("kappa", format!("{} is negative", self.kappa)));
        }
        if self.profile == Profile::PaperAsymptotic {
            if self.delta <= 0.0 {
                return Err(Error::param("delta", "must be positive in the paper profile"));
            }
            if !(self.beta > 0.0 && self.beta < self.delta / 128.0) {
                return Err(Error::param("beta", "must lie in (0, delta/2^7)"));
            }
            let s = self.alpha0 + self.alpha1;
            let lhs = s * s - self.alpha0 * self.alpha0;
            if lhs > 0.5 - 2.0 * self.delta {
                return Err(Error::param(
                    "alpha1",
                    format!("(a0+a1)^2 - a0^2 = {lhs} exceeds 1/2 - 2 delta"),
                ));
            }
            if let Some(t) = self.steps {
                if t < 1 {
                    return Err(Error::param("steps", "T must be at least 1"));
                }
            }
        }
        Ok(())
    }

    /// Applies one `key = value` setting. Keys match the field names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &'static str, v: &str) -> Result<T>
        where
            T::Err: fmt::Display,
        {
            v.parse::<T>().map_err(|e| Error::param(key, format!("`{v}`: {e}")))
        }
        fn opt<T: FromStr>(key: &'static str, v: &str) -> Result<Option<T>>
        where
            T::Err: fmt::Display,
        {
            if matches!(v, "none" | "auto" | "") {
                Ok(None)
            } else {
                num(key, v).map(Some)
            }
        }
        match key {
            "profile" => self.profile = value.parse()?,
            "n" => self.n = num("n", value)?,
            "delta" => self.delta = num("delta", value)?,
            "beta" => self.beta = num("beta", value)?,
            "alpha0" => self.alpha0 = num("alpha0", value)?,
            "alpha1" => self.alpha1 = num("alpha1", value)?,
            "gamma" => self.gamma = num("gamma", value)?,
            "r" => self.r = num("r", value)?,
            "kappa" => self.kappa = num("kappa", value)?,
            "rng_seed" | "seed" => self.rng_seed = num("rng_seed", value)?,
            "steps" => self.steps = opt("steps", value)?,
            "max_steps" => self.max_steps = num("max_steps", value)?,
            "halt_p" => self.halt_p = num("halt_p", value)?,
            "l_threshold" => self.l_threshold = opt("l_threshold", value)?,
            _ => {
                return Err(Error::InvalidParam {
                    name: "config",
                    reason: format!("unknown key `{key}`"),
                })
            }
        }
        Ok(())
    }

    /// Flat `key = value` rendering, one field per line, in a fixed order.
    pub fn to_config_string(&self) -> String {
        let opt = |o: Option<usize>| o.map_or("none".to_string(), |v| v.to_string());
        format!(
            "profile = {}\nn = {}\ndelta = {}\nbeta = {}\nalpha0 = {}\nalpha1 = {}\ngamma = {}\n\
             r = {}\nkappa = {}\nrng_seed = {}\nsteps = {}\nmax_steps = {}\nhalt_p = {}\n\
             l_threshold = {}\n",
            self.profile,
            self.n,
            self.delta,
            self.beta,
            self.alpha0,
            self.alpha1,
            self.gamma,
            self.r,
            self.kappa,
            self.rng_seed,
            opt(self.steps),
            self.max_steps,
            self.halt_p,
            opt(self.l_threshold),
        )
    }
}
