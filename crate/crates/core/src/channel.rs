//! The real Gaussian multiple-access channel
//! `Y = h1 sigma(X1) + h2 sigma(X2) + Z`, `Z ~ N(0, N0)`.

use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{check_prime, sub_mod, FieldScalar, FieldVector, add_mod};
use crate::seed;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// The map `sigma: F_q -> R` from field symbols to channel amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Constellation {
    points: Vec<f64>,
}

impl Constellation {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        check_prime(points.len() as u32)?;
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("constellation points must be finite".into()));
        }
        Ok(Self { points })
    }

    /// `sigma(x) = (-1)^x` over `F_2`.
    pub fn bpsk() -> Self {
        Self {
            points: vec![1.0, -1.0],
        }
    }

    pub fn q(&self) -> u32 {
        self.points.len() as u32
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    #[inline]
    pub fn point(&self, x: u32) -> f64 {
        self.points[x as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacChannelParams {
    pub h1: f64,
    pub h2: f64,
    n0: f64,
    constellation: Constellation,
}

impl MacChannelParams {
    pub fn new(h1: f64, h2: f64, n0: f64, constellation: Constellation) -> Result<Self> {
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise variance {n0} must be positive")));
        }
        if !(h1.is_finite() && h2.is_finite()) {
            return Err(Error::InvalidParameter("channel gains must be finite".into()));
        }
        Ok(Self {
            h1,
            h2,
            n0,
            constellation,
        })
    }

    /// BPSK with equal gains `h1 = h2 = h`.
    pub fn bpsk(h: f64, n0: f64) -> Result<Self> {
        Self::new(h, h, n0, Constellation::bpsk())
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn q(&self) -> u32 {
        self.constellation.q()
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    /// Noise-free received amplitude for the symbol pair `(a, b)`.
    #[inline]
    pub fn mean(&self, a: u32, b: u32) -> f64 {
        self.h1 * self.constellation.point(a) + self.h2 * self.constellation.point(b)
    }

    #[inline]
    pub fn pair_density(&self, y: f64, a: u32, b: u32) -> f64 {
        normal_pdf(y, self.mean(a, b), self.n0)
    }

    /// Density of `y` given that the symbol sum is `c`, averaging uniformly
    /// over the split `c = a + (c - a)` with each node's shift applied inside
    /// the constellation map.
    pub fn degraded(&self, y: f64, c: u32, shift1: u32, shift2: u32) -> f64 {
        self.ln_degraded(y, c, shift1, shift2).exp()
    }

    pub fn ln_degraded(&self, y: f64, c: u32, shift1: u32, shift2: u32) -> f64 {
        let q = self.q();
        let terms = (0..q).map(|a| {
            let b = sub_mod(c, a, q);
            ln_normal_pdf(y, self.mean(add_mod(a, shift1, q), add_mod(b, shift2, q)), self.n0)
        });
        log_sum_exp(terms) - (q as f64).ln()
    }

    fn check_symbol(&self, s: FieldScalar) -> Result<u32> {
        if s.modulus() != self.q() {
            return Err(Error::ModulusMismatch(s.modulus(), self.q()));
        }
        Ok(s.value())
    }
}

#[inline]
pub(crate) fn normal_pdf(y: f64, mean: f64, n0: f64) -> f64 {
    let d = y - mean;
    (-(d * d) / (2.0 * n0)).exp() / (2.0 * std::f64::consts::PI * n0).sqrt()
}

#[inline]
pub(crate) fn ln_normal_pdf(y: f64, mean: f64, n0: f64) -> f64 {
    let d = y - mean;
    -(d * d) / (2.0 * n0) - 0.5 * (LN_2PI + n0.ln())
}

/// `ln sum exp(x_i)`, returning `-inf` for an empty or all-`-inf` input.
pub(crate) fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.map(|x| (x - max).exp()).sum::<f64>().ln()
}

pub fn gaussian_density(y: f64, mean: f64, n0: f64) -> Result<f64> {
    if !(n0 > 0.0) {
        return Err(Error::InvalidParameter(format!("noise variance {n0} must be positive")));
    }
    Ok(normal_pdf(y, mean, n0))
}

pub fn pair_likelihood(y: f64, a: FieldScalar, b: FieldScalar, params: &MacChannelParams) -> Result<f64> {
    let (a, b) = (params.check_symbol(a)?, params.check_symbol(b)?);
    Ok(params.pair_density(y, a, b))
}

pub fn degraded_density(
    y: f64,
    c: FieldScalar,
    params: &MacChannelParams,
    shift1: FieldScalar,
    shift2: FieldScalar,
) -> Result<f64> {
    let c = params.check_symbol(c)?;
    let (s1, s2) = (params.check_symbol(shift1)?, params.check_symbol(shift2)?);
    Ok(params.degraded(y, c, s1, s2))
}

/// Received block `Y_R`. Serializes as a plain array of samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ReceivedBlock {
    samples: Vec<f64>,
}

impl ReceivedBlock {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("received samples must be finite".into()));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|s| -s).collect(),
        }
    }
}

/// One use of the channel per coordinate, with noise drawn from `seed`.
pub fn transmit(
    x1: &FieldVector,
    x2: &FieldVector,
    params: &MacChannelParams,
    seed: u64,
) -> Result<ReceivedBlock> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch(format!(
            "inputs of length {} and {}",
            x1.len(),
            x2.len()
        )));
    }
    for x in [x1, x2] {
        if x.modulus() != params.q() {
            return Err(Error::ModulusMismatch(x.modulus(), params.q()));
        }
    }
    let noise = Normal::new(0.0, params.n0.sqrt()).expect("variance validated");
    let mut rng = seed::rng(seed);
    let samples = x1
        .entries()
        .iter()
        .zip(x2.entries())
        .map(|(&a, &b)| params.mean(a, b) + noise.sample(&mut rng))
        .collect();
    Ok(ReceivedBlock { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_kronrod_15, integrate};

    fn sym(v: u32) -> FieldScalar {
        FieldScalar::new(v, 2).unwrap()
    }

    #[test]
    fn gaussian_density_examples() {
        assert!((gaussian_density(0.0, 0.0, 1.0).unwrap() - 0.398_942_280_4).abs() < 1e-10);
        assert!((gaussian_density(1.0, 0.0, 1.0).unwrap() - 0.241_970_724_5).abs() < 1e-10);
        let peak = gaussian_density(0.7, 0.7, 2.0).unwrap();
        for y in [-1.0, 0.0, 0.69, 0.71, 3.0] {
            assert!(gaussian_density(y, 0.7, 2.0).unwrap() < peak);
        }
        assert!(gaussian_density(0.0, 0.0, 0.0).is_err());
        assert!(gaussian_density(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn log_density_matches_density() {
        for (y, m, n0) in [(0.3, -1.0, 0.5), (4.0, 4.0, 2.0), (-7.0, 1.0, 1.0)] {
            assert!((ln_normal_pdf(y, m, n0).exp() - normal_pdf(y, m, n0)).abs() < 1e-15);
        }
    }

    #[test]
    fn pair_likelihood_examples() {
        let silent = MacChannelParams::bpsk(0.0, 1.0).unwrap();
        let base = pair_likelihood(0.4, sym(0), sym(0), &silent).unwrap();
        for (a, b) in [(0, 1), (1, 0), (1, 1)] {
            assert_eq!(pair_likelihood(0.4, sym(a), sym(b), &silent).unwrap(), base);
        }
        let p = MacChannelParams::bpsk(1.0, 1.0).unwrap();
        assert!((pair_likelihood(2.0, sym(0), sym(0), &p).unwrap() - 0.398_942_280_4).abs() < 1e-10);
        assert_eq!(
            pair_likelihood(0.1, sym(0), sym(1), &p).unwrap(),
            pair_likelihood(0.1, sym(1), sym(0), &p).unwrap()
        );
        let wrong = FieldScalar::new(1, 3).unwrap();
        assert!(pair_likelihood(0.0, wrong, sym(0), &p).is_err());
    }

    #[test]
    fn degraded_density_examples() {
        let p = MacChannelParams::bpsk(1.0, 1.0).unwrap();
        let d1 = degraded_density(0.0, sym(1), &p, sym(0), sym(0)).unwrap();
        assert!((d1 - 0.398_942_280_4).abs() < 1e-10);
        let d0 = degraded_density(0.0, sym(0), &p, sym(0), sym(0)).unwrap();
        assert!((d0 - 0.053_990_966_5).abs() < 1e-10);
    }

    #[test]
    fn densities_integrate_to_one() {
        let p = MacChannelParams::new(0.8, 1.7, 0.6, Constellation::new(vec![0.0, 1.0, -0.5]).unwrap()).unwrap();
        let span = [-20.0, 0.0, 20.0];
        for c in 0..3 {
            for (s1, s2) in [(0, 0), (1, 2), (2, 1)] {
                let r = integrate(|y| p.degraded(y, c, s1, s2), &span, 1e-12, 500).unwrap();
                assert!((r.value - 1.0).abs() < 1e-8);
            }
            for b in 0..3 {
                let r = integrate(|y| p.pair_density(y, c, b), &span, 1e-12, 500).unwrap();
                assert!((r.value - 1.0).abs() < 1e-8);
            }
        }
    }

    /// With BPSK the shifts act on the sum: shifting both inputs equals
    /// looking at the unshifted channel with sum `c + s1 + s2`, up to the
    /// split variable relabelling `a -> a + s1`.
    #[test]
    fn bpsk_shift_equivalence() {
        let p = MacChannelParams::bpsk(1.3, 0.7).unwrap();
        for c in 0..2 {
            for s1 in 0..2 {
                for s2 in 0..2 {
                    for y in [-3.0, -0.4, 0.0, 1.1, 2.9] {
                        let shifted = p.degraded(y, c, s1, s2);
                        let direct = p.degraded(y, (c + s1 + s2) % 2, 0, 0);
                        assert!((shifted - direct).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn transmit_is_deterministic_and_noiseless_limit() {
        let p = MacChannelParams::bpsk(0.9, 1.0).unwrap();
        let x1 = FieldVector::new(vec![0, 1, 1, 0], 2).unwrap();
        let x2 = FieldVector::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(transmit(&x1, &x2, &p, 3).unwrap(), transmit(&x1, &x2, &p, 3).unwrap());
        let quiet = MacChannelParams::bpsk(0.9, 1e-12).unwrap();
        let y = transmit(&x1, &x2, &quiet, 3).unwrap();
        for (i, &s) in y.samples().iter().enumerate() {
            let expect = quiet.mean(x1.entries()[i], x2.entries()[i]);
            assert!((s - expect).abs() < 1e-4);
        }
        assert!(transmit(&x1, &FieldVector::zeros(3, 2), &p, 0).is_err());
    }

    #[test]
    fn transmit_mean_and_distribution() {
        let p = MacChannelParams::bpsk(1.0, 1.0).unwrap();
        let n = 100_000;
        let zeros = FieldVector::zeros(n, 2);
        let y = transmit(&zeros, &zeros, &p, 17).unwrap();
        let mean = y.samples().iter().sum::<f64>() / n as f64;
        assert!((mean - 2.0).abs() < 0.02, "{mean}");

        // Kolmogorov-Smirnov against the analytic density; the CDF is
        // accumulated panel by panel between sorted samples.
        let mut sorted = y.samples().to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut f = |t: f64| p.pair_density(t, 0, 0);
        let mut cdf = integrate(&mut f, &[2.0 - 12.0, sorted[0]], 1e-14, 200).unwrap().value;
        let mut ks: f64 = 0.0;
        for (i, w) in sorted.windows(2).enumerate() {
            ks = ks.max((cdf - i as f64 / n as f64).abs()).max((cdf - (i + 1) as f64 / n as f64).abs());
            cdf += gauss_kronrod_15(&mut f, w[0], w[1]).0;
        }
        assert!(ks < 0.01, "KS statistic {ks}");
    }

    #[test]
    fn params_validation() {
        assert!(MacChannelParams::bpsk(1.0, 0.0).is_err());
        assert!(MacChannelParams::bpsk(f64::NAN, 1.0).is_err());
        assert!(Constellation::new(vec![1.0, 2.0, 3.0, 4.0]).is_err());
        assert!(ReceivedBlock::new(vec![f64::INFINITY]).is_err());
    }
}
