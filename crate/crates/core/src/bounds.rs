//! Finite-length leakage bounds, their optimisation over `s`, error
//! exponents, achievable rates, the BPSK rate curves and their LDPC-adjusted
//! counterparts, and a checker for the inequalities the bounds rest on.

use std::f64::consts::LN_2;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::MacChannelParams;
use crate::codes::{membership_probability, EnsembleSpec, GeneratorCode};
use crate::error::{Error, Result};
use crate::galois::{is_prime, FieldVector};
use crate::infoq::{mixture_entropy, mutual_infos, renyi_down, GaussianMixture, InfoReport, QuadratureSpec, RenyiTarget};
use crate::seed;

const LN_3: f64 = 1.098_612_288_668_109_8;
const GRID_POINTS: usize = 64;
const GOLDEN_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodeRateParams {
    pub n: usize,
    pub k: usize,
    pub kbar: usize,
    pub q: u32,
}

impl CodeRateParams {
    pub fn new(n: usize, k: usize, kbar: usize, q: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if kbar > k || k > n || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= kbar <= k <= n and n > 0, got n={n} k={k} kbar={kbar}"
            )));
        }
        Ok(Self { n, k, kbar, q })
    }

    fn ln_q(&self) -> f64 {
        (self.q as f64).ln()
    }

    /// Code rate `(k/n) ln q` in nats.
    pub fn r0(&self) -> f64 {
        self.k as f64 / self.n as f64 * self.ln_q()
    }

    /// Sacrifice rate `(kbar/n) ln q` in nats.
    pub fn r1(&self) -> f64 {
        self.kbar as f64 / self.n as f64 * self.ln_q()
    }

    /// `ln q^(n-k)`, the largest possible deviation.
    pub fn ln_redundancy(&self) -> f64 {
        (self.n - self.k) as f64 * self.ln_q()
    }
}

fn check_s(s: f64) -> Result<()> {
    if (0.0..=0.5).contains(&s) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("s = {s} outside [0, 1/2]")))
    }
}

fn ln_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn b1_exponent(params: &CodeRateParams, s: f64, renyi_x1: f64) -> Result<f64> {
    check_s(s)?;
    let excess = params.n as f64 - params.k as f64 - params.kbar as f64;
    Ok(s * (excess * params.ln_q() + params.n as f64 * renyi_x1))
}

/// Natural log of `B1 = 3 q^(s(n-k-kbar)) exp(s n I(Y;X1))`.
pub fn log_bound_b1(params: &CodeRateParams, s: f64, renyi_x1: f64) -> Result<f64> {
    Ok(LN_3 + b1_exponent(params, s, renyi_x1)?)
}

/// `B1`; overflows to `+inf` rather than failing.
pub fn bound_b1(params: &CodeRateParams, s: f64, renyi_x1: f64) -> Result<f64> {
    Ok(3.0 * b1_exponent(params, s, renyi_x1)?.exp())
}

fn b2_exponents(params: &CodeRateParams, s: f64, a: f64, renyi_x1: f64, renyi_x1x2: f64) -> Result<(f64, f64)> {
    check_s(s)?;
    if !(a >= 0.0) {
        return Err(Error::InvalidParameter(format!("deviation A = {a} must be nonnegative")));
    }
    let (n, k, kbar, ln_q) = (params.n as f64, params.k as f64, params.kbar as f64, params.ln_q());
    let a_pow = if s == 0.0 { 0.0 } else { s * a.ln() };
    Ok((
        s * (n * renyi_x1x2 - (k + kbar) * ln_q),
        a_pow + s * (n * renyi_x1 - kbar * ln_q),
    ))
}

/// Natural log of
/// `B2 = 3 q^(-s(k+kbar)) exp(s n I(Y;X1,X2)) + 3 A^s q^(-s kbar) exp(s n I(Y;X1))`.
pub fn log_bound_b2(params: &CodeRateParams, s: f64, a: f64, renyi_x1: f64, renyi_x1x2: f64) -> Result<f64> {
    let (first, second) = b2_exponents(params, s, a, renyi_x1, renyi_x1x2)?;
    Ok(LN_3 + ln_add_exp(first, second))
}

pub fn bound_b2(params: &CodeRateParams, s: f64, a: f64, renyi_x1: f64, renyi_x1x2: f64) -> Result<f64> {
    let (first, second) = b2_exponents(params, s, a, renyi_x1, renyi_x1x2)?;
    Ok(3.0 * first.exp() + 3.0 * second.exp())
}

/// Minimises `f` over `s in [0, 1/2]`: the best of a uniform grid, refined by
/// golden-section search on the neighbouring grid cells.
fn minimize_on_half<F>(mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let step = 0.5 / (GRID_POINTS - 1) as f64;
    let mut best = (0.0, f(0.0)?);
    let mut best_i = 0;
    for i in 1..GRID_POINTS {
        let s = i as f64 * step;
        let v = f(s)?;
        if v < best.1 {
            best = (s, v);
            best_i = i;
        }
    }
    let mut lo = best_i.saturating_sub(1) as f64 * step;
    let mut hi = ((best_i + 1).min(GRID_POINTS - 1)) as f64 * step;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while hi - lo > GOLDEN_TOL {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d)?;
        }
    }
    for (s, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (s, v);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    B1,
    B2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageBoundReport {
    pub kind: BoundKind,
    pub params: CodeRateParams,
    pub s_star: f64,
    pub b1: f64,
    pub log2_b1: f64,
    pub b2: Option<f64>,
    pub log2_b2: Option<f64>,
    #[serde(rename = "A_used")]
    pub a_used: Option<f64>,
    /// True when a raw bound overflowed `f64`; the log2 fields stay exact.
    pub saturated: bool,
}

/// Minimises `B1` (or `B2[A]`) over `s`, recomputing the Rényi quantities at
/// every candidate. For `B2` the report also carries `B1` at the same `s`.
pub fn optimize_bound(
    kind: BoundKind,
    params: &CodeRateParams,
    a: Option<f64>,
    channel: &MacChannelParams,
    spec: &QuadratureSpec,
) -> Result<LeakageBoundReport> {
    if channel.q() != params.q {
        return Err(Error::ModulusMismatch(channel.q(), params.q));
    }
    let renyi = |s: f64, which| renyi_down(channel, s, which, spec);
    let (s_star, _) = match kind {
        BoundKind::B1 => minimize_on_half(|s| log_bound_b1(params, s, renyi(s, RenyiTarget::X1)?))?,
        BoundKind::B2 => {
            let a = a.ok_or_else(|| Error::InvalidParameter("B2 needs a deviation A".into()))?;
            minimize_on_half(|s| {
                log_bound_b2(params, s, a, renyi(s, RenyiTarget::X1)?, renyi(s, RenyiTarget::X1X2)?)
            })?
        }
    };
    let r1 = renyi(s_star, RenyiTarget::X1)?;
    let b1 = bound_b1(params, s_star, r1)?;
    let ln_b1 = log_bound_b1(params, s_star, r1)?;
    let b2 = match kind {
        BoundKind::B1 => None,
        BoundKind::B2 => {
            let r12 = renyi(s_star, RenyiTarget::X1X2)?;
            let a = a.unwrap_or_default();
            Some((bound_b2(params, s_star, a, r1, r12)?, log_bound_b2(params, s_star, a, r1, r12)?))
        }
    };
    let saturated = b1.is_infinite() || b2.is_some_and(|(v, _)| v.is_infinite());
    Ok(LeakageBoundReport {
        kind,
        params: *params,
        s_star,
        b1,
        log2_b1: ln_b1 / LN_2,
        b2: b2.map(|(v, _)| v),
        log2_b2: b2.map(|(_, l)| l / LN_2),
        a_used: if kind == BoundKind::B2 { a } else { None },
        saturated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    pub e1: f64,
    pub e2: f64,
    pub s1: f64,
    pub s2: f64,
}

/// Decay exponents of `B1` and `B2`, maximised over `s in [0, 1/2]`:
/// `e1 = s(r1 + r0 - ln q - I(Y;X1))`,
/// `e2 = min(s(r0 + r1 - I(Y;X1,X2)), s(r1 - r2 - I(Y;X1)))`.
pub fn exponents(
    params: &CodeRateParams,
    channel: &MacChannelParams,
    r2: f64,
    spec: &QuadratureSpec,
) -> Result<Exponents> {
    let (r0, r1, ln_q) = (params.r0(), params.r1(), params.ln_q());
    let (s1, neg1) =
        minimize_on_half(|s| Ok(-s * (r1 + r0 - ln_q - renyi_down(channel, s, RenyiTarget::X1, spec)?)))?;
    let (s2, neg2) = minimize_on_half(|s| {
        let a = s * (r0 + r1 - renyi_down(channel, s, RenyiTarget::X1X2, spec)?);
        let b = s * (r1 - r2 - renyi_down(channel, s, RenyiTarget::X1, spec)?);
        Ok(-a.min(b))
    })?;
    Ok(Exponents {
        e1: -neg1,
        e2: -neg2,
        s1,
        s2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub r0: f64,
    pub rate1: f64,
    pub rate2: f64,
    pub rate3: f64,
    pub r2_used: f64,
}

/// Rates from precomputed informations. A negative `r2` is clipped to 0.
pub fn rates_from_infos(info: &InfoReport, r0: f64, r2: f64) -> RateReport {
    let ln_q = (info.params.q() as f64).ln();
    let r2_used = r2.max(0.0);
    let second = |r2: f64| (2.0 * r0 - info.i_y_x1x2).min(r0 - r2 - info.i_y_x1);
    RateReport {
        r0,
        rate1: 2.0 * r0 - ln_q - info.i_y_x1,
        rate2: second(r2_used),
        rate3: second(0.0),
        r2_used,
    }
}

pub fn rate_report(channel: &MacChannelParams, r0: f64, r2: f64, spec: &QuadratureSpec) -> Result<RateReport> {
    if !(r0 >= 0.0) {
        return Err(Error::InvalidParameter(format!("rate r0 = {r0} must be nonnegative")));
    }
    Ok(rates_from_infos(&mutual_infos(channel, spec)?, r0, r2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BpskRateRow {
    pub h: f64,
    pub rate_h13: f64,
    pub rate_h17: f64,
    pub i_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateCurve {
    /// Second-type rate of the binary scheme.
    SecondType,
    /// First-type rate of the binary scheme.
    FirstType,
}

impl fmt::Display for RateCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateCurve::SecondType => "rate_h13",
            RateCurve::FirstType => "rate_h17",
        })
    }
}

/// Closed-form binary rates at gain `h`. The output mixtures use component
/// means `0, h, 2h`, one per value of the real sum of two on-off inputs.
pub fn bpsk_rate_row(h: f64, n0: f64, spec: &QuadratureSpec) -> Result<BpskRateRow> {
    if !(n0 > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("need finite h and n0 > 0, got h={h} n0={n0}")));
    }
    let out = GaussianMixture::new(vec![0.25, 0.5, 0.25], vec![0.0, h, 2.0 * h], n0)?;
    let even = GaussianMixture::uniform(vec![0.0, 2.0 * h], n0)?;
    let h_out = mixture_entropy(&out, spec)?;
    let h_even = mixture_entropy(&even, spec)?;
    let h_noise = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * n0).ln();
    Ok(BpskRateRow {
        h,
        rate_h13: h_out - h_even,
        rate_h17: h_out - h_noise - LN_2,
        i_h: h_out - 0.5 * h_even - 0.5 * h_noise,
    })
}

pub fn bpsk_rate_curves(h_grid: &[f64], n0: f64, spec: &QuadratureSpec) -> Result<Vec<BpskRateRow>> {
    h_grid.par_iter().map(|&h| bpsk_rate_row(h, n0, spec)).collect()
}

fn curve_value(row: &BpskRateRow, curve: RateCurve) -> f64 {
    match curve {
        RateCurve::SecondType => row.rate_h13,
        RateCurve::FirstType => row.rate_h17,
    }
}

/// Bisects for the zero of `curve` inside `[lo, hi]`, which must bracket a
/// sign change. Stops once the bracket is narrower than `tol`.
pub fn bpsk_rate_zero(curve: RateCurve, n0: f64, lo: f64, hi: f64, tol: f64, spec: &QuadratureSpec) -> Result<f64> {
    let value = |h| bpsk_rate_row(h, n0, spec).map(|r| curve_value(&r, curve));
    let (mut lo, mut hi) = (lo, hi);
    let (mut f_lo, f_hi) = (value(lo)?, value(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidParameter(format!("{curve} does not change sign on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = value(mid)?;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub curve: RateCurve,
    pub h: f64,
}

/// Sign changes of both curves along a computed table, each refined by
/// bisection between the bracketing rows.
pub fn locate_crossings(rows: &[BpskRateRow], n0: f64, spec: &QuadratureSpec) -> Result<Vec<Crossing>> {
    let mut out = Vec::new();
    for curve in [RateCurve::SecondType, RateCurve::FirstType] {
        for w in rows.windows(2) {
            let (a, b) = (curve_value(&w[0], curve), curve_value(&w[1], curve));
            if a == 0.0 && w[0].h > 0.0 {
                out.push(Crossing { curve, h: w[0].h });
            } else if a * b < 0.0 {
                let h = bpsk_rate_zero(curve, n0, w[0].h, w[1].h, 1e-9, spec)?;
                out.push(Crossing { curve, h });
            }
        }
    }
    Ok(out)
}

/// Rate gap `Delta I(h)` of a coupled code family, tabulated in nats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaITable {
    rows: Vec<(f64, f64)>,
    family: Option<String>,
}

impl DeltaITable {
    pub fn new(rows: Vec<(f64, f64)>, family: Option<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Parse("delta-I table has no rows".into()));
        }
        for w in rows.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Parse(format!("h must be strictly increasing ({} then {})", w[0].0, w[1].0)));
            }
        }
        if let Some(&(h, d)) = rows.iter().find(|(h, d)| !(*d >= 0.0) || !h.is_finite() || !d.is_finite()) {
            return Err(Error::Parse(format!("bad row h={h} delta_i={d}")));
        }
        Ok(Self { rows, family })
    }

    /// Parses CSV with header `h,delta_i_nats`; `# family: ...` comment lines
    /// set the family label, other `#` lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let family = text
            .lines()
            .filter_map(|l| l.trim().strip_prefix('#'))
            .find_map(|c| c.trim().strip_prefix("family:").map(|f| f.trim().to_string()));
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["h", "delta_i_nats"] {
            return Err(Error::Parse(format!("expected header h,delta_i_nats, got {}", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let field = |i: usize| -> Result<f64> {
                record[i].parse().map_err(|_| Error::Parse(format!("not a number: {:?}", &record[i])))
            };
            rows.push((field(0)?, field(1)?));
        }
        Self::new(rows, family)
    }

    pub fn rows(&self) -> &[(f64, f64)] {
        &self.rows
    }

    pub fn family(&self) -> Option<&str> {
        self.family.as_deref()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.rows[0].0, self.rows[self.rows.len() - 1].0)
    }

    /// Linear interpolation; no extrapolation beyond the tabulated range.
    pub fn delta_at(&self, h: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(h >= lo && h <= hi) {
            return Err(Error::OutOfTable(h));
        }
        let i = self.rows.partition_point(|&(x, _)| x <= h);
        if i == self.rows.len() {
            return Ok(self.rows[i - 1].1);
        }
        let ((h0, d0), (h1, d1)) = (self.rows[i - 1], self.rows[i]);
        Ok(d0 + (d1 - d0) * (h - h0) / (h1 - h0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LdpcRateRow {
    pub h: f64,
    pub rate_h13: f64,
    pub rate_h17: f64,
    pub i_h: f64,
    pub delta_i: f64,
    pub rate_h14: f64,
    pub rate_h18: f64,
}

/// Binary rates reduced by twice the tabulated gap of a practical code.
pub fn ldpc_adjusted_rates(
    table: &DeltaITable,
    h_grid: &[f64],
    n0: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<LdpcRateRow>> {
    let deltas = h_grid.iter().map(|&h| table.delta_at(h)).collect::<Result<Vec<_>>>()?;
    let rows = bpsk_rate_curves(h_grid, n0, spec)?;
    Ok(rows
        .into_iter()
        .zip(deltas)
        .map(|(r, d)| LdpcRateRow {
            h: r.h,
            rate_h13: r.rate_h13,
            rate_h17: r.rate_h17,
            i_h: r.i_h,
            delta_i: d,
            rate_h14: r.rate_h13 - 2.0 * d,
            rate_h18: r.rate_h17 - 2.0 * d,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyGrid {
    Full,
    Small,
}

/// Deliberate corruptions of the deviation fed to `B2`, used to confirm that
/// the checker can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// `A = q^(n-k+1)`.
    DeviationTimesQ,
    /// `A = q^(2(n-k))`.
    DeviationSquared,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub points: usize,
    pub violations: usize,
    /// Smallest slack seen; negative beyond tolerance means a violation.
    pub worst_margin: f64,
    pub worst_at: String,
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            points: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            worst_at: String::new(),
        }
    }

    fn record(&mut self, margin: f64, tol: f64, at: impl FnOnce() -> String) {
        self.points += 1;
        if margin < -tol || margin.is_nan() {
            self.violations += 1;
        }
        if margin < self.worst_margin || margin.is_nan() {
            self.worst_margin = margin;
            self.worst_at = at();
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub grid: VerifyGrid,
    pub fault: Option<Fault>,
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }
}

struct GridAxes {
    n: &'static [usize],
    k_fracs: &'static [(usize, usize)],
    s: &'static [f64],
    h: &'static [f64],
    renyi_s: &'static [f64],
    codes: &'static [(&'static str, usize)],
}

fn axes(grid: VerifyGrid) -> GridAxes {
    match grid {
        VerifyGrid::Full => GridAxes {
            n: &[8, 16, 64],
            k_fracs: &[(1, 4), (1, 2), (3, 4)],
            s: &[0.1, 0.3, 0.5],
            h: &[0.5, 1.0, 2.0, 4.0],
            renyi_s: &[0.1, 0.25, 0.5],
            codes: &[("repetition", 3), ("single-parity-check", 4), ("hamming", 7)],
        },
        VerifyGrid::Small => GridAxes {
            n: &[8, 16],
            k_fracs: &[(1, 4), (1, 2)],
            s: &[0.1, 0.5],
            h: &[1.0, 4.0],
            renyi_s: &[0.1, 0.5],
            codes: &[("repetition", 3)],
        },
    }
}

const RELATIVE_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-6;

/// Checks, over a parameter grid:
/// * `B2[A = q^(n-k)] <= 2 B1` at equal `s`;
/// * `exp(s I(Y;X1,X2)) <= q^s exp(s I(Y;X1))`;
/// * `min(2 r0 - I(Y;X1,X2), r0 - I(Y;X1)) = 2 r0 - I(Y;X1,X2)` at `r0 = I(Y;X1+X2)`;
/// * the coset-sum bound `E sum_{x' != x, x'-x in Im G} p(y|x1,x') <= A q^k p(y|x1)`
///   for row-permutation ensembles of small codes.
pub fn verify_inequalities(grid: VerifyGrid, fault: Option<Fault>, spec: &QuadratureSpec) -> Result<VerificationReport> {
    let ax = axes(grid);
    let q = 2u32;
    let channels = ax
        .h
        .iter()
        .map(|&h| MacChannelParams::bpsk(h, 1.0))
        .collect::<Result<Vec<_>>>()?;

    let mut s_all: Vec<f64> = ax.s.iter().chain(ax.renyi_s).copied().collect();
    s_all.sort_by(f64::total_cmp);
    s_all.dedup();
    let pairs: Vec<(usize, f64)> = (0..channels.len()).flat_map(|i| s_all.iter().map(move |&s| (i, s))).collect();
    let renyi: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, s)| {
            Ok((
                renyi_down(&channels[i], s, RenyiTarget::X1, spec)?,
                renyi_down(&channels[i], s, RenyiTarget::X1X2, spec)?,
            ))
        })
        .collect::<Result<_>>()?;
    let lookup = |i: usize, s: f64| renyi[pairs.iter().position(|&(j, t)| j == i && t == s).expect("cached")];

    let mut deviation_factor = CheckOutcome::new("b2-at-max-deviation-within-twice-b1");
    for &n in ax.n {
        for &(num, den) in ax.k_fracs {
            let k = n * num / den;
            for kbar in 0..=k {
                let params = CodeRateParams::new(n, k, kbar, q)?;
                let ln_a = match fault {
                    None => params.ln_redundancy(),
                    Some(Fault::DeviationTimesQ) => params.ln_redundancy() + params.ln_q(),
                    Some(Fault::DeviationSquared) => 2.0 * params.ln_redundancy(),
                };
                for (hi, &h) in ax.h.iter().enumerate() {
                    for &s in ax.s {
                        let (r1, r12) = lookup(hi, s);
                        let b1 = log_bound_b1(&params, s, r1)?;
                        let b2 = log_bound_b2(&params, s, ln_a.exp(), r1, r12)?;
                        let margin = -(b2 - LN_2 - b1).exp_m1();
                        deviation_factor.record(margin, RELATIVE_TOL, || format!("n={n} k={k} kbar={kbar} h={h} s={s}"));
                    }
                }
            }
        }
    }

    let mut renyi_gap = CheckOutcome::new("joint-renyi-within-q-pow-s-of-marginal");
    for (hi, &h) in ax.h.iter().enumerate() {
        for &s in ax.renyi_s {
            let (r1, r12) = lookup(hi, s);
            let margin = -(s * (r12 - r1) - s * (q as f64).ln()).exp_m1();
            renyi_gap.record(margin, RELATIVE_TOL, || format!("h={h} s={s}"));
        }
    }

    let mut identity = CheckOutcome::new("sum-rate-identity");
    let mut identity_h = vec![0.0];
    identity_h.extend_from_slice(ax.h);
    let infos = identity_h
        .par_iter()
        .map(|&h| mutual_infos(&MacChannelParams::bpsk(h, 1.0)?, spec))
        .collect::<Result<Vec<_>>>()?;
    for (info, h) in infos.iter().zip(&identity_h) {
        let r0 = info.i_y_sum;
        let lhs = (2.0 * r0 - info.i_y_x1x2).min(r0 - info.i_y_x1);
        let rhs = 2.0 * r0 - info.i_y_x1x2;
        identity.record(IDENTITY_TOL - (lhs - rhs).abs(), 0.0, || format!("h={h}"));
    }

    let mut coset = CheckOutcome::new("coset-sum-bound");
    for &(name, n) in ax.codes {
        let code = named_code(name, n, q)?;
        check_coset_sum(&code, &channels[0], &mut coset)?;
    }

    Ok(VerificationReport {
        grid,
        fault,
        checks: vec![deviation_factor, renyi_gap, identity, coset],
    })
}

/// Builds the small codes the verifier and CLI know by name.
pub fn named_code(name: &str, n: usize, q: u32) -> Result<GeneratorCode> {
    match name {
        "repetition" => GeneratorCode::repetition(n, q),
        "single-parity-check" | "spc" => GeneratorCode::single_parity_check(n, q),
        "hamming" if n == 7 && q == 2 => GeneratorCode::from_parity_check(&crate::codes::hamming_7_4_parity_check()),
        _ => Err(Error::InvalidParameter(format!("unknown code {name}({n}) over F_{q}"))),
    }
}

fn check_coset_sum(code: &GeneratorCode, channel: &MacChannelParams, out: &mut CheckOutcome) -> Result<()> {
    let (n, k, q) = (code.n(), code.k(), code.q());
    let ensemble = EnsembleSpec::permuted(code.clone(), 0);
    let a = crate::codes::deviation_a(code)?.a;
    let words: Vec<FieldVector> = FieldVector::all(n, q).collect();
    let prob = words
        .iter()
        .map(|d| {
            if d.is_zero() {
                Ok(0.0)
            } else {
                membership_probability(&ensemble, d, 0).map(|m| m.probability)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let index_of = |v: &FieldVector| v.entries().iter().fold(0usize, |acc, &e| acc * q as usize + e as usize);
    let mut rng = seed::rng(0x5eed);
    for trial in 0..4 {
        let x1 = &words[trial % words.len()];
        let x2 = &words[(trial * 5 + 3) % words.len()];
        let y: Vec<f64> = (0..n).map(|_| rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)).collect();
        let likelihood = |x2p: &FieldVector| -> f64 {
            (0..n)
                .map(|i| channel.pair_density(y[i], x1.entries()[i], x2p.entries()[i]))
                .product()
        };
        let mut lhs = 0.0;
        let mut marginal = 0.0;
        for x2p in &words {
            let l = likelihood(x2p);
            marginal += l;
            lhs += prob[index_of(&x2p.sub(x2)?)] * l;
        }
        let rhs = a * (q as f64).powi(k as i32) * marginal / (q as f64).powi(n as i32);
        out.record(1.0 - lhs / rhs, RELATIVE_TOL, || format!("code n={n} k={k} trial={trial}"));
    }
    Ok(())
}

/// Formats with 10 significant digits, as used in all tabular output.
pub fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-5..10).contains(&magnitude) {
        let decimals = (9 - magnitude).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.9e}")
    }
}

pub const BPSK_CSV_HEADER: &str = "h,rate_h13_nats,rate_h17_nats,i_h_nats";
pub const LDPC_CSV_HEADER: &str = "h,rate_h13_nats,rate_h17_nats,i_h_nats,delta_i_nats,rate_h14_nats,rate_h18_nats";
pub const BOUND_CSV_HEADER: &str = "n,k,kbar,q,s_star,b1,log2_b1,b2,log2_b2,A";

impl BpskRateRow {
    pub fn to_csv(&self) -> String {
        [self.h, self.rate_h13, self.rate_h17, self.i_h].map(sig10).join(",")
    }
}

impl LdpcRateRow {
    pub fn to_csv(&self) -> String {
        [self.h, self.rate_h13, self.rate_h17, self.i_h, self.delta_i, self.rate_h14, self.rate_h18]
            .map(sig10)
            .join(",")
    }
}

impl LeakageBoundReport {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(sig10).unwrap_or_default();
        let p = &self.params;
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            p.n,
            p.k,
            p.kbar,
            p.q,
            sig10(self.s_star),
            sig10(self.b1),
            sig10(self.log2_b1),
            opt(self.b2),
            opt(self.log2_b2),
            opt(self.a_used)
        )
    }
}
