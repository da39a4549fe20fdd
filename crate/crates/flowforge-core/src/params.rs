use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

/// Parse "p/q", an integer, or a finite decimal such as "0.25" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::Domain(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || fp.len() > 15 || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let whole: i64 = if ip_abs.is_empty() { 0 } else { ip_abs.parse().map_err(|_| bad())? };
        let den = 10i64.pow(fp.len() as u32);
        let frac: i64 = fp.parse().map_err(|_| bad())?;
        let v = Rational::new(whole * den + frac, den);
        return Ok(if neg { -v } else { v });
    }
    let p: i64 = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// "p/q", or "p" for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Integrability exponent r of the noise; `Infinite` stands for α = 1 where n/r = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrability {
    Finite(Rational),
    Infinite,
}

impl Integrability {
    /// n/r, exact.
    pub fn n_over_r(&self, n: u32) -> Rational {
        match self {
            Integrability::Finite(r) => Rational::from_integer(n as i64) / r,
            Integrability::Infinite => Rational::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    pub alpha: Rational,
    pub n: u32,
    pub iota: Rational,
    pub gamma: u32,
    pub delta: Rational,
    pub kappa0: Rational,
    /// n = 1 and α ≤ 1/4: the noise covariance is no longer integrable enough.
    pub diverging_variance: bool,
}

pub fn default_iota() -> Rational {
    rat(1, 100)
}

/// Derive Γ, δ, κ₀. For n = 1 and α ≤ 1/4 the parameters are accepted with
/// `diverging_variance` set; use [`ModelParams::strict`] to reject them.
pub fn derive_params(alpha: Rational, n: u32, iota: Rational) -> Result<ModelParams> {
    ModelParams::with_iota(alpha, n, iota)
}

impl ModelParams {
    pub fn new(alpha: Rational, n: u32) -> Result<Self> {
        Self::with_iota(alpha, n, default_iota())
    }

    pub fn with_iota(alpha: Rational, n: u32, iota: Rational) -> Result<Self> {
        Self::build(alpha, n, iota, false)
    }

    /// Like [`ModelParams::with_iota`] but rejects α ≤ 1/2 − n/4 outright.
    pub fn strict(alpha: Rational, n: u32, iota: Rational) -> Result<Self> {
        Self::build(alpha, n, iota, true)
    }

    fn build(alpha: Rational, n: u32, iota: Rational, strict: bool) -> Result<Self> {
        if !(alpha.is_positive() && alpha <= Rational::one()) {
            return Err(Error::Domain(format!("alpha = {} must lie in (0,1]", fmt_rational(&alpha))));
        }
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if !iota.is_positive() {
            return Err(Error::Domain("iota must be positive".into()));
        }
        let edge = rat(1, 2) - rat(n as i64, 4);
        if alpha <= edge && (strict || n != 1) {
            return Err(Error::Subcritical(format!(
                "alpha = {} must exceed 1/2 - n/4 = {}",
                fmt_rational(&alpha),
                fmt_rational(&edge)
            )));
        }
        let gamma = (Rational::from_integer(4) / alpha).floor().to_integer() as u32;
        let delta = Rational::from_integer(-2) + alpha + alpha / 2 * Rational::from_integer(gamma as i64 + 1);
        let k2 = delta / Rational::from_integer(2 * gamma as i64 + 2);
        let kappa0 = if alpha / 2 < k2 { alpha / 2 } else { k2 };
        Ok(ModelParams { alpha, n, iota, gamma, delta, kappa0, diverging_variance: n == 1 && alpha <= rat(1, 4) })
    }

    pub fn integrability(&self) -> Integrability {
        if self.n == 1 && self.alpha <= rat(1, 2) {
            Integrability::Finite(Rational::one())
        } else if self.alpha == Rational::one() {
            Integrability::Infinite
        } else {
            let r = Rational::from_integer(self.n as i64) * (Rational::one() + self.iota)
                / (Rational::from_integer(2) - self.alpha * 2);
            Integrability::Finite(r)
        }
    }

    /// 2Γ+1, the top order of the extended index set.
    pub fn star_order(&self) -> u32 {
        2 * self.gamma + 1
    }

    pub fn summary(&self) -> ParamsSummary {
        ParamsSummary {
            alpha: fmt_rational(&self.alpha),
            n: self.n,
            iota: fmt_rational(&self.iota),
            gamma: self.gamma,
            delta: fmt_rational(&self.delta),
            kappa0: fmt_rational(&self.kappa0),
            diverging_variance: self.diverging_variance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsSummary {
    pub alpha: String,
    pub n: u32,
    pub iota: String,
    pub gamma: u32,
    pub delta: String,
    pub kappa0: String,
    pub diverging_variance: bool,
}

/// Binomial coefficient as u128, zero when k > n.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}
