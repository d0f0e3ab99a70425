//! One protocol round end to end: hashing and encoding at the two nodes, the
//! multiple-access phase, relay decoding of the modulo sum, the broadcast, and
//! recovery of the peer message. Also hosts the two relay decoders and the
//! leakage oracles.

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ln_normal_pdf, log_sum_exp, transmit, MacChannelParams, ReceivedBlock};
use crate::codes::{encode_node, GeneratorCode, HashSplit};
use crate::error::{Error, Result};
use crate::galois::{FieldMatrix, FieldVector};
use crate::infoq::QuadratureSpec;
use crate::quadrature::integrate;
use crate::seed;

/// Largest codebook searched exhaustively by the ML decoder.
pub const MAX_ML_CODEWORDS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub enum ShiftMode {
    Fixed { e1: FieldVector, e2: FieldVector },
    /// Fresh uniform shifts every round.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecoderKind {
    Ml,
    Bp { iterations: usize, parity_check: FieldMatrix },
}

/// What the relay sends back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Broadcast {
    /// `F(v_hat)`, the hashed sum.
    Hashed,
    /// `v_hat` itself, which reveals the sacrificed randomness.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub channel: MacChannelParams,
    pub code: GeneratorCode,
    pub split: HashSplit,
    pub shift_mode: ShiftMode,
    pub decoder: DecoderKind,
    pub broadcast: Broadcast,
}

impl ProtocolConfig {
    /// ML decoding, zero shifts and the hashed broadcast.
    pub fn new(channel: MacChannelParams, code: GeneratorCode, split: HashSplit) -> Self {
        let (n, q) = (code.n(), code.q());
        Self {
            channel,
            code,
            split,
            shift_mode: ShiftMode::Fixed {
                e1: FieldVector::zeros(n, q),
                e2: FieldVector::zeros(n, q),
            },
            decoder: DecoderKind::Ml,
            broadcast: Broadcast::Hashed,
        }
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn q(&self) -> u32 {
        self.code.q()
    }

    /// Every violated invariant, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let (n, k, q) = (self.code.n(), self.code.k(), self.code.q());
        let mut out = Vec::new();
        if self.channel.q() != q {
            out.push(format!("channel alphabet has {} symbols, code is over F_{q}", self.channel.q()));
        }
        if self.split.q() != q {
            out.push(format!("hash split is over F_{}, code is over F_{q}", self.split.q()));
        }
        if self.split.k() != k {
            out.push(format!("hash split has k = {}, code has k = {k}", self.split.k()));
        }
        out.extend(self.split.violations().into_iter().map(|v| format!("hash split: {v}")));
        if let ShiftMode::Fixed { e1, e2 } = &self.shift_mode {
            for (name, e) in [("e1", e1), ("e2", e2)] {
                if e.len() != n || e.modulus() != q {
                    out.push(format!("{name} must have length {n} over F_{q}"));
                }
            }
        }
        match &self.decoder {
            DecoderKind::Ml => {
                if self.code.codeword_count().is_none_or(|c| c > MAX_ML_CODEWORDS) {
                    out.push(format!("ML decoding needs q^k <= 2^20, got {q}^{k}"));
                }
            }
            DecoderKind::Bp { iterations, parity_check } => {
                if q != 2 {
                    out.push("belief propagation needs q = 2".into());
                }
                if *iterations == 0 {
                    out.push("belief propagation needs at least one iteration".into());
                }
                if parity_check.cols() != n || parity_check.modulus() != q {
                    out.push(format!("parity-check matrix must have {n} columns over F_{q}"));
                } else if !self.code.satisfies(parity_check).unwrap_or(false) {
                    out.push("code is not in the null space of the parity-check matrix".into());
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(v.join("; ")))
        }
    }

    fn fixed_shifts(&self) -> Result<(&FieldVector, &FieldVector)> {
        match &self.shift_mode {
            ShiftMode::Fixed { e1, e2 } => Ok((e1, e2)),
            ShiftMode::Random => Err(Error::InvalidParameter("leakage oracles need fixed shifts".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub m1: FieldVector,
    pub m2: FieldVector,
    pub l1: FieldVector,
    pub l2: FieldVector,
    pub e1: FieldVector,
    pub e2: FieldVector,
    pub y: ReceivedBlock,
    pub v_hat: FieldVector,
    pub relay_broadcast: FieldVector,
    pub recovered_m2_at_node1: FieldVector,
    pub recovered_m1_at_node2: FieldVector,
    pub sum_decode_ok: bool,
    pub recovery_ok: bool,
}

/// The random inputs of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundInputs {
    pub m1: FieldVector,
    pub m2: FieldVector,
    pub l1: FieldVector,
    pub l2: FieldVector,
    pub e1: FieldVector,
    pub e2: FieldVector,
}

fn uniform_vector(len: usize, q: u32, rng: &mut seed::Rng) -> FieldVector {
    FieldVector::new((0..len).map(|_| rng.random_range(0..q)).collect(), q).expect("residues in range")
}

fn draw_inputs(config: &ProtocolConfig, rng: &mut seed::Rng) -> RoundInputs {
    let (q, mk, kbar, n) = (config.q(), config.split.message_len(), config.split.kbar(), config.n());
    let m1 = uniform_vector(mk, q, rng);
    let m2 = uniform_vector(mk, q, rng);
    let l1 = uniform_vector(kbar, q, rng);
    let l2 = uniform_vector(kbar, q, rng);
    let (e1, e2) = match &config.shift_mode {
        ShiftMode::Fixed { e1, e2 } => (e1.clone(), e2.clone()),
        ShiftMode::Random => (uniform_vector(n, q, rng), uniform_vector(n, q, rng)),
    };
    RoundInputs { m1, m2, l1, l2, e1, e2 }
}

/// Draws the round's randomness from `seed` and plays it out.
pub fn run_trial(config: &ProtocolConfig, seed: u64) -> Result<TrialRecord> {
    config.validate()?;
    let mut rng = seed::rng(seed);
    let inputs = draw_inputs(config, &mut rng);
    let noise_seed: u64 = rng.random();
    play_round(config, inputs, noise_seed)
}

/// Plays one round with the given inputs; `noise_seed` drives the channel.
pub fn play_round(config: &ProtocolConfig, inputs: RoundInputs, noise_seed: u64) -> Result<TrialRecord> {
    let RoundInputs { m1, m2, l1, l2, e1, e2 } = inputs;
    let split = &config.split;
    let v1 = split.combine(&m1, &l1)?;
    let v2 = split.combine(&m2, &l2)?;
    let x1 = encode_node(&v1, &config.code, &e1)?;
    let x2 = encode_node(&v2, &config.code, &e2)?;
    let y = transmit(&x1, &x2, &config.channel, noise_seed)?;
    let v_hat = match &config.decoder {
        DecoderKind::Ml => ml_decode(&y, &config.code, &config.channel, &e1, &e2)?,
        DecoderKind::Bp { iterations, parity_check } => {
            bp_decode(&y, &config.code, parity_check, *iterations, &config.channel, &e1, &e2)?.message
        }
    };
    let sum_decode_ok = v_hat == v1.add(&v2)?;
    let (relay_broadcast, recovered_m2_at_node1, recovered_m1_at_node2) = match config.broadcast {
        Broadcast::Hashed => {
            let hashed = split.hash(&v_hat)?;
            let at1 = hashed.sub(&m1)?;
            let at2 = hashed.sub(&m2)?;
            (hashed, at1, at2)
        }
        Broadcast::Raw => {
            let at1 = split.hash(&v_hat.sub(&v1)?)?;
            let at2 = split.hash(&v_hat.sub(&v2)?)?;
            (v_hat.clone(), at1, at2)
        }
    };
    let recovery_ok = recovered_m2_at_node1 == m2 && recovered_m1_at_node2 == m1;
    Ok(TrialRecord {
        m1,
        m2,
        l1,
        l2,
        e1,
        e2,
        y,
        v_hat,
        relay_broadcast,
        recovered_m2_at_node1,
        recovered_m1_at_node2,
        sum_decode_ok,
        recovery_ok,
    })
}

/// Per-coordinate log-likelihoods `ln p(y_i | c)` of the symbol sum.
fn sum_log_likelihoods(
    y: &ReceivedBlock,
    channel: &MacChannelParams,
    e1: &FieldVector,
    e2: &FieldVector,
) -> Result<Vec<Vec<f64>>> {
    let n = y.len();
    if e1.len() != n || e2.len() != n {
        return Err(Error::DimensionMismatch(format!("shifts for a block of length {n}")));
    }
    let q = channel.q();
    Ok((0..n)
        .map(|i| {
            (0..q)
                .map(|c| channel.ln_degraded(y.samples()[i], c, e1.entries()[i], e2.entries()[i]))
                .collect()
        })
        .collect())
}

/// Exhaustive maximum-likelihood decoding of `v1 + v2`; among equally likely
/// candidates the lexicographically smallest wins.
pub fn ml_decode(
    y: &ReceivedBlock,
    code: &GeneratorCode,
    channel: &MacChannelParams,
    e1: &FieldVector,
    e2: &FieldVector,
) -> Result<FieldVector> {
    let (n, k, q) = (code.n(), code.k(), code.q());
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("block of length {} for a code of length {n}", y.len())));
    }
    let count = code
        .codeword_count()
        .filter(|&c| c <= MAX_ML_CODEWORDS)
        .ok_or_else(|| Error::TooLarge(format!("ML search over {q}^{k} codewords")))?;
    let table = sum_log_likelihoods(y, channel, e1, e2)?;
    let mut best = (f64::NEG_INFINITY, 0u64);
    for index in 0..count {
        let v = FieldVector::from_index(index, k, q);
        let word = code.matrix().mul_slice(v.entries());
        let score: f64 = word.iter().zip(&table).map(|(&c, row)| row[c as usize]).sum();
        if score > best.0 || (index == 0 && score.is_nan()) {
            best = (score, index);
        }
    }
    Ok(FieldVector::from_index(best.1, k, q))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BpOutcome {
    pub message: FieldVector,
    pub word: FieldVector,
    /// The hard decision satisfied every parity check.
    pub converged: bool,
    pub iterations: usize,
}

const LLR_CLAMP: f64 = 40.0;

/// Binary sum-product decoding of `v1 + v2` on the Tanner graph of
/// `parity_check`, fed with the shift-aware channel LLRs of the symbol sum.
/// The message is read off the information set of `code`.
pub fn bp_decode(
    y: &ReceivedBlock,
    code: &GeneratorCode,
    parity_check: &FieldMatrix,
    iterations: usize,
    channel: &MacChannelParams,
    e1: &FieldVector,
    e2: &FieldVector,
) -> Result<BpOutcome> {
    let n = code.n();
    if code.q() != 2 || channel.q() != 2 {
        return Err(Error::InvalidParameter("belief propagation needs q = 2".into()));
    }
    if parity_check.cols() != n || !code.satisfies(parity_check)? {
        return Err(Error::DimensionMismatch("parity-check matrix does not match the code".into()));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("block of length {} for a code of length {n}", y.len())));
    }
    let prior: Vec<f64> = sum_log_likelihoods(y, channel, e1, e2)?
        .into_iter()
        .map(|row| (row[0] - row[1]).clamp(-LLR_CLAMP, LLR_CLAMP))
        .collect();
    // Edge lists per check; messages stored per edge.
    let checks: Vec<Vec<usize>> = (0..parity_check.rows())
        .map(|r| (0..n).filter(|&c| parity_check.get(r, c) == 1).collect())
        .collect();
    let mut to_check: Vec<Vec<f64>> = checks.iter().map(|vars| vars.iter().map(|&v| prior[v]).collect()).collect();
    let mut to_var: Vec<Vec<f64>> = checks.iter().map(|vars| vec![0.0; vars.len()]).collect();
    let decide = |posterior: &[f64]| -> Vec<u32> { posterior.iter().map(|&l| u32::from(l < 0.0)).collect() };
    let satisfied = |bits: &[u32]| checks.iter().all(|vars| vars.iter().map(|&v| bits[v]).sum::<u32>() % 2 == 0);

    let mut bits = decide(&prior);
    let mut done = 0;
    let mut converged = satisfied(&bits);
    while !converged && done < iterations {
        for (c, vars) in checks.iter().enumerate() {
            let t: Vec<f64> = to_check[c].iter().map(|&l| (0.5 * l).tanh()).collect();
            for j in 0..vars.len() {
                let prod: f64 = t.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).product();
                let prod = prod.clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                to_var[c][j] = (2.0 * prod.atanh()).clamp(-LLR_CLAMP, LLR_CLAMP);
            }
        }
        let mut posterior = prior.clone();
        for (c, vars) in checks.iter().enumerate() {
            for (j, &v) in vars.iter().enumerate() {
                posterior[v] += to_var[c][j];
            }
        }
        for (c, vars) in checks.iter().enumerate() {
            for (j, &v) in vars.iter().enumerate() {
                to_check[c][j] = (posterior[v] - to_var[c][j]).clamp(-LLR_CLAMP, LLR_CLAMP);
            }
        }
        bits = decide(&posterior);
        done += 1;
        converged = satisfied(&bits);
    }
    let word = FieldVector::new(bits, 2)?;
    let info = code.information_set();
    let restricted = code.matrix().select_rows(&info);
    let target = FieldVector::new(info.iter().map(|&i| word.entries()[i]).collect(), 2)?;
    let message = restricted
        .solve(&target)?
        .expect("generator rows on an information set are invertible");
    let converged = converged && code.encode(&message)? == word;
    Ok(BpOutcome {
        message,
        word,
        converged,
        iterations: done,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRate {
    pub trials: u64,
    pub p_sum_err: f64,
    pub p_recovery_err: f64,
    /// Wilson 95% half-widths.
    pub sum_halfwidth: f64,
    pub recovery_halfwidth: f64,
}

/// Half-width of the Wilson 95% score interval for `errors` out of `trials`.
pub fn wilson_halfwidth(errors: u64, trials: u64) -> f64 {
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = errors as f64 / n;
    Z / (1.0 + Z * Z / n) * (p * (1.0 - p) / n + Z * Z / (4.0 * n * n)).sqrt()
}

/// Runs `trials` rounds in parallel with seeds split off `master_seed`, in
/// round order.
pub fn run_trials(config: &ProtocolConfig, trials: u64, master_seed: u64) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    (0..trials)
        .into_par_iter()
        .map(|t| run_trial(config, seed::derive(master_seed, t)))
        .collect()
}

pub fn error_rate(config: &ProtocolConfig, trials: u64, master_seed: u64) -> Result<ErrorRate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    config.validate()?;
    let (sum_err, rec_err) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let r = run_trial(config, seed::derive(master_seed, t))?;
            Ok((u64::from(!r.sum_decode_ok), u64::from(!r.recovery_ok)))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(ErrorRate {
        trials,
        p_sum_err: sum_err as f64 / trials as f64,
        p_recovery_err: rec_err as f64 / trials as f64,
        sum_halfwidth: wilson_halfwidth(sum_err, trials),
        recovery_halfwidth: wilson_halfwidth(rec_err, trials),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeakageMethod {
    ExactQuadrature,
    /// Exact quadrature averaged over every pair of shift vectors.
    ExactShiftAveraged,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakageEstimate {
    /// Total variation between the joint law of (message, relay output) and
    /// the product of marginals, in the convention with maximum 2.
    pub value: f64,
    pub method: LeakageMethod,
    pub std_error: Option<f64>,
    pub node: u8,
}

/// Noise-free output vectors grouped by the observed node's message: entry
/// `m` lists one mean vector per completion (own randomness, peer input).
fn output_means(config: &ProtocolConfig, node: u8, e1: &FieldVector, e2: &FieldVector) -> Result<Vec<Vec<Vec<f64>>>> {
    let (k, q) = (config.code.k(), config.q());
    let split = &config.split;
    let peers: Vec<FieldVector> = FieldVector::all(k, q)
        .map(|v| config.code.encode(&v))
        .collect::<Result<_>>()?;
    let (own_e, peer_e) = if node == 1 { (e1, e2) } else { (e2, e1) };
    let mut out = Vec::new();
    for m in FieldVector::all(split.message_len(), q) {
        let mut group = Vec::new();
        for l in FieldVector::all(split.kbar(), q) {
            let own = encode_node(&split.combine(&m, &l)?, &config.code, own_e)?;
            for peer in &peers {
                let peer = peer.add(peer_e)?;
                let (x1, x2) = if node == 1 { (&own, &peer) } else { (&peer, &own) };
                group.push(
                    x1.entries()
                        .iter()
                        .zip(x2.entries())
                        .map(|(&a, &b)| config.channel.mean(a, b))
                        .collect(),
                );
            }
        }
        out.push(group);
    }
    Ok(out)
}

fn check_node(node: u8) -> Result<()> {
    if node == 1 || node == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("node must be 1 or 2, got {node}")))
    }
}

fn ln_mixture(y: &[f64], means: &[Vec<f64>], n0: f64) -> f64 {
    let ln_w = -(means.len() as f64).ln();
    ln_w + log_sum_exp(means.iter().map(|mu| y.iter().zip(mu).map(|(&yi, &m)| ln_normal_pdf(yi, m, n0)).sum::<f64>()))
}

/// `sum_m P(m) |p(y|m) - p(y)|` at one output point.
fn leakage_integrand(y: &[f64], groups: &[Vec<Vec<f64>>], n0: f64) -> f64 {
    let dens: Vec<f64> = groups.iter().map(|g| ln_mixture(y, g, n0).exp()).collect();
    let marginal = dens.iter().sum::<f64>() / dens.len() as f64;
    dens.iter().map(|d| (d - marginal).abs()).sum::<f64>() / dens.len() as f64
}

const MAX_EXACT_COMPONENTS: u64 = 1 << 10;

fn exact_for_shifts(
    config: &ProtocolConfig,
    node: u8,
    e1: &FieldVector,
    e2: &FieldVector,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let groups = output_means(config, node, e1, e2)?;
    if groups.len() <= 1 {
        return Ok(0.0);
    }
    let n0 = config.channel.n0();
    let pad = spec.truncation_sigmas * n0.sqrt();
    let axis = |i: usize| -> Vec<f64> {
        let mut pts: Vec<f64> = groups.iter().flatten().map(|mu| mu[i]).collect();
        let lo = pts.iter().copied().fold(f64::INFINITY, f64::min) - pad;
        let hi = pts.iter().copied().fold(f64::NEG_INFINITY, f64::max) + pad;
        pts.extend([lo, hi]);
        pts
    };
    match config.n() {
        1 => Ok(integrate(|y| leakage_integrand(&[y], &groups, n0), &axis(0), spec.abs_tol, spec.max_subdivisions)?.value),
        2 => {
            let (outer, inner) = (axis(0), axis(1));
            let mut failure = None;
            let value = integrate(
                |y0| match integrate(
                    |y1| leakage_integrand(&[y0, y1], &groups, n0),
                    &inner,
                    spec.abs_tol,
                    spec.max_subdivisions,
                ) {
                    Ok(r) => r.value,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                &outer,
                spec.abs_tol,
                spec.max_subdivisions,
            )?
            .value;
            match failure {
                Some(e) => Err(e),
                None => Ok(value),
            }
        }
        n => Err(Error::TooLarge(format!("exact leakage needs n <= 2, got n = {n}"))),
    }
}

fn check_exact(config: &ProtocolConfig, node: u8) -> Result<()> {
    check_node(node)?;
    config.validate()?;
    if config.n() > 2 {
        return Err(Error::TooLarge(format!("exact leakage needs n <= 2, got n = {}", config.n())));
    }
    let components = (config.q() as u64).checked_pow(2 * config.code.k() as u32);
    if components.is_none_or(|c| c > MAX_EXACT_COMPONENTS) {
        return Err(Error::TooLarge("exact leakage needs q^(2k) <= 2^10".into()));
    }
    Ok(())
}

/// Exact leakage of node `node`'s message to the relay for the configured
/// fixed shifts, by adaptive quadrature over the output space (`n <= 2`).
pub fn leakage_exact(config: &ProtocolConfig, node: u8, spec: &QuadratureSpec) -> Result<LeakageEstimate> {
    check_exact(config, node)?;
    let (e1, e2) = config.fixed_shifts()?;
    Ok(LeakageEstimate {
        value: exact_for_shifts(config, node, e1, e2, spec)?,
        method: LeakageMethod::ExactQuadrature,
        std_error: None,
        node,
    })
}

/// Exact leakage averaged uniformly over all `q^(2n)` shift pairs.
pub fn leakage_exact_shift_averaged(config: &ProtocolConfig, node: u8, spec: &QuadratureSpec) -> Result<LeakageEstimate> {
    check_exact(config, node)?;
    let (n, q) = (config.n(), config.q());
    let shifts: Vec<FieldVector> = FieldVector::all(n, q).collect();
    let pairs: Vec<(&FieldVector, &FieldVector)> =
        shifts.iter().flat_map(|a| shifts.iter().map(move |b| (a, b))).collect();
    let values = pairs
        .par_iter()
        .map(|&(e1, e2)| exact_for_shifts(config, node, e1, e2, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(LeakageEstimate {
        value: values.iter().sum::<f64>() / values.len() as f64,
        method: LeakageMethod::ExactShiftAveraged,
        std_error: None,
        node,
    })
}

const MAX_MC_COMPONENTS: u64 = 1 << 16;

/// Monte Carlo leakage `E |1 - p(y)/p(y|m)|` over the joint law, with both
/// densities evaluated exactly per sample. Each draw is averaged over the
/// message given `y`, i.e. it scores `sum_m |P(m|y) - P(m)|`, which keeps the
/// mean and bounds every term by 2.
pub fn leakage_mc(config: &ProtocolConfig, node: u8, samples: u64, master_seed: u64) -> Result<LeakageEstimate> {
    check_node(node)?;
    config.validate()?;
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let components = (config.q() as u64).checked_pow(2 * config.code.k() as u32);
    if components.is_none_or(|c| c > MAX_MC_COMPONENTS) {
        return Err(Error::TooLarge("Monte Carlo leakage needs q^(2k) <= 2^16".into()));
    }
    let (e1, e2) = config.fixed_shifts()?;
    let groups = output_means(config, node, e1, e2)?;
    let n0 = config.channel.n0();
    let sd = n0.sqrt();
    let draws: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed::derive(master_seed, t));
            let group = &groups[rng.random_range(0..groups.len())];
            let mu = &group[rng.random_range(0..group.len())];
            let y: Vec<f64> = mu
                .iter()
                .map(|&c| c + sd * rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, &mut rng))
                .collect();
            let ln: Vec<f64> = groups.iter().map(|g| ln_mixture(&y, g, n0)).collect();
            let ln_total = log_sum_exp(ln.iter().copied());
            let prior = 1.0 / ln.len() as f64;
            ln.iter().map(|l| ((l - ln_total).exp() - prior).abs()).sum::<f64>()
        })
        .collect();
    let count = samples as f64;
    let mean = draws.iter().sum::<f64>() / count;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (count - 1.0);
    Ok(LeakageEstimate {
        value: mean,
        method: LeakageMethod::MonteCarlo,
        std_error: Some((var / count).sqrt()),
        node,
    })
}
