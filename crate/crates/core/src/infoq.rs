//! Information quantities of the single-letter channel with uniform inputs:
//! Gaussian-mixture differential entropies, the mutual informations
//! `I(Y;X1)`, `I(Y;X1,X2)`, `I(Y;X1+X2)` and the Rényi quantity
//! `I↓_{1/(1-s)}`. All values are in nats.

use serde::Serialize;

use crate::channel::{ln_normal_pdf, log_sum_exp, MacChannelParams};
use crate::error::{Error, Result};
use crate::galois::sub_mod;
use crate::quadrature::integrate;

/// `1/2 ln(2 pi e)`, the entropy of a unit-variance Gaussian.
pub const UNIT_GAUSSIAN_ENTROPY: f64 = 1.418_938_533_204_672_7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Integration range beyond the extreme means, in standard deviations.
    pub truncation_sigmas: f64,
    pub max_subdivisions: usize,
    pub abs_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            truncation_sigmas: 12.0,
            max_subdivisions: 4000,
            abs_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_sigmas >= 6.0) {
            return Err(Error::InvalidParameter("truncation_sigmas must be at least 6".into()));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("abs_tol must be positive".into()));
        }
        Ok(())
    }

    /// Breakpoints spanning `means` widened by the truncation, with interior
    /// breakpoints at each mean.
    fn span(&self, means: impl Iterator<Item = f64>, n0: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = means.collect();
        let lo = pts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = pts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = self.truncation_sigmas * n0.sqrt();
        pts.push(lo - pad);
        pts.push(hi + pad);
        pts
    }

    pub(crate) fn integrate<F: FnMut(f64) -> f64>(&self, f: F, breakpoints: &[f64]) -> Result<f64> {
        Ok(integrate(f, breakpoints, self.abs_tol, self.max_subdivisions)?.value)
    }
}

/// A finite mixture of Gaussians sharing the variance `n0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianMixture {
    weights: Vec<f64>,
    means: Vec<f64>,
    n0: f64,
}

impl GaussianMixture {
    pub fn new(weights: Vec<f64>, means: Vec<f64>, n0: f64) -> Result<Self> {
        if weights.len() != means.len() || weights.is_empty() {
            return Err(Error::DimensionMismatch("mixture weights and means".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || means.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidParameter("mixture weights must be nonnegative".into()));
        }
        if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("mixture weights must sum to 1".into()));
        }
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::InvalidParameter(format!("variance {n0} must be positive")));
        }
        Ok(Self { weights, means, n0 })
    }

    pub fn uniform(means: Vec<f64>, n0: f64) -> Result<Self> {
        let w = 1.0 / means.len().max(1) as f64;
        Self::new(vec![w; means.len()], means, n0)
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn ln_density(&self, y: f64) -> f64 {
        log_sum_exp(
            self.weights
                .iter()
                .zip(&self.means)
                .filter(|(&w, _)| w > 0.0)
                .map(|(&w, &m)| w.ln() + ln_normal_pdf(y, m, self.n0)),
        )
    }

    pub fn density(&self, y: f64) -> f64 {
        self.ln_density(y).exp()
    }
}

pub fn mixture_entropy(m: &GaussianMixture, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let pts = spec.span(m.means.iter().copied(), m.n0);
    spec.integrate(
        |y| {
            let lp = m.ln_density(y);
            if lp == f64::NEG_INFINITY {
                0.0
            } else {
                -lp.exp() * lp
            }
        },
        &pts,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoReport {
    pub i_y_x1: f64,
    pub i_y_x1x2: f64,
    pub i_y_sum: f64,
    pub params: MacChannelParams,
    pub spec: QuadratureSpec,
}

/// Conditional output laws `p(y | x1)` for each `x1`, with `x2` uniform.
fn conditionals_x1(params: &MacChannelParams) -> Vec<GaussianMixture> {
    let q = params.q();
    (0..q)
        .map(|a| {
            GaussianMixture::uniform((0..q).map(|b| params.mean(a, b)).collect(), params.n0())
                .expect("valid channel")
        })
        .collect()
}

/// Conditional output laws `p(y | x1, x2)` for each pair, row-major in `x1`.
fn conditionals_pair(params: &MacChannelParams) -> Vec<GaussianMixture> {
    let q = params.q();
    (0..q)
        .flat_map(|a| (0..q).map(move |b| (a, b)))
        .map(|(a, b)| GaussianMixture::uniform(vec![params.mean(a, b)], params.n0()).expect("valid channel"))
        .collect()
}

/// Degraded-channel laws `p(y | x1 + x2 = c)`.
fn conditionals_sum(params: &MacChannelParams) -> Vec<GaussianMixture> {
    let q = params.q();
    (0..q)
        .map(|c| {
            GaussianMixture::uniform((0..q).map(|a| params.mean(a, sub_mod(c, a, q))).collect(), params.n0())
                .expect("valid channel")
        })
        .collect()
}

fn output_law(params: &MacChannelParams) -> GaussianMixture {
    let q = params.q();
    let means = (0..q).flat_map(|a| (0..q).map(move |b| params.mean(a, b))).collect();
    GaussianMixture::uniform(means, params.n0()).expect("valid channel")
}

fn mean_entropy(laws: &[GaussianMixture], spec: &QuadratureSpec) -> Result<f64> {
    let mut acc = 0.0;
    for law in laws {
        acc += mixture_entropy(law, spec)?;
    }
    Ok(acc / laws.len() as f64)
}

pub fn mutual_infos(params: &MacChannelParams, spec: &QuadratureSpec) -> Result<InfoReport> {
    let h_y = mixture_entropy(&output_law(params), spec)?;
    let h_noise = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * params.n0()).ln();
    Ok(InfoReport {
        i_y_x1: h_y - mean_entropy(&conditionals_x1(params), spec)?,
        i_y_x1x2: h_y - h_noise,
        i_y_sum: h_y - mean_entropy(&conditionals_sum(params), spec)?,
        params: params.clone(),
        spec: *spec,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RenyiTarget {
    /// `I↓(Y; X1)` with `X2` marginalised.
    X1,
    /// `I↓(Y; X1, X2)`.
    X1X2,
}

/// `s * I↓_{1/(1-s)} = ln ∫ (E_z p(y|z)^{1/(1-s)})^{1-s} dy` for equiprobable
/// conditionals, evaluated pointwise in the log domain.
pub fn scaled_renyi(laws: &[GaussianMixture], s: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let alpha = 1.0 / (1.0 - s);
    let ln_p = -(laws.len() as f64).ln();
    let n0 = laws[0].n0();
    let pts = spec.span(laws.iter().flat_map(|l| l.means().iter().copied()), n0);
    let mut logs = vec![0.0; laws.len()];
    let integral = spec.integrate(
        |y| {
            for (slot, law) in logs.iter_mut().zip(laws) {
                *slot = ln_p + alpha * law.ln_density(y);
            }
            ((1.0 - s) * log_sum_exp(logs.iter().copied())).exp()
        },
        &pts,
    )?;
    Ok(integral.ln())
}

/// `I↓_{1/(1-s)}(Y; X1)` or `I↓_{1/(1-s)}(Y; X1, X2)` under uniform inputs.
/// At `s = 0` this is the ordinary mutual information.
pub fn renyi_down(params: &MacChannelParams, s: f64, which: RenyiTarget, spec: &QuadratureSpec) -> Result<f64> {
    if !(0.0..=0.5).contains(&s) {
        return Err(Error::InvalidParameter(format!("s = {s} outside [0, 1/2]")));
    }
    let laws = match which {
        RenyiTarget::X1 => conditionals_x1(params),
        RenyiTarget::X1X2 => conditionals_pair(params),
    };
    if s == 0.0 {
        let h_y = mixture_entropy(&output_law(params), spec)?;
        return Ok(h_y - mean_entropy(&laws, spec)?);
    }
    Ok(scaled_renyi(&laws, s, spec)? / s)
}
