//! Generator codes, code ensembles and the message/sacrifice hash split.
//!
//! A [`GeneratorCode`] is an injective linear map `F_q^k -> F_q^n`, stored as
//! an `n x k` matrix acting on column vectors. Codewords are summarised by
//! their [`Composition`] (symbol histogram), from which the deviation
//! quantity `A` of a code or ensemble is computed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{check_prime, neg_mod, FieldMatrix, FieldVector};
use crate::seed;

/// Largest `q^k` for which codewords are enumerated.
pub const MAX_ENUMERATED_CODEWORDS: u64 = 1 << 20;

const MAX_SAMPLING_ATTEMPTS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorCode {
    matrix: FieldMatrix,
}

impl GeneratorCode {
    /// Wraps an `n x k` generator matrix, which must have rank `k`.
    pub fn new(matrix: FieldMatrix) -> Result<Self> {
        if matrix.cols() > matrix.rows() {
            return Err(Error::InvalidParameter(format!(
                "k = {} exceeds n = {}",
                matrix.cols(),
                matrix.rows()
            )));
        }
        let rank = matrix.rank();
        if rank != matrix.cols() {
            return Err(Error::InvalidParameter(format!(
                "generator matrix has rank {rank}, expected {}",
                matrix.cols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(k: usize, q: u32) -> Result<Self> {
        check_prime(q)?;
        Self::new(FieldMatrix::identity(k, q))
    }

    /// The `(n, 1)` repetition code.
    pub fn repetition(n: usize, q: u32) -> Result<Self> {
        check_prime(q)?;
        Self::new(FieldMatrix::from_raw(n, 1, vec![1; n], q))
    }

    /// The `(n, n-1)` single-parity-check code: the last symbol makes the
    /// coordinate sum zero.
    pub fn single_parity_check(n: usize, q: u32) -> Result<Self> {
        check_prime(q)?;
        if n < 2 {
            return Err(Error::InvalidParameter("parity-check code needs n >= 2".into()));
        }
        let k = n - 1;
        let mut m = FieldMatrix::identity(k, q).entries().to_vec();
        m.extend(std::iter::repeat_n(neg_mod(1, q), k));
        Self::new(FieldMatrix::from_raw(n, k, m, q))
    }

    /// A generator whose image is the null space of `parity_check`.
    pub fn from_parity_check(parity_check: &FieldMatrix) -> Result<Self> {
        Self::new(parity_check.null_space())
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn k(&self) -> usize {
        self.matrix.cols()
    }

    pub fn q(&self) -> u32 {
        self.matrix.modulus()
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    pub fn encode(&self, v: &FieldVector) -> Result<FieldVector> {
        self.matrix.mul_vec(v)
    }

    /// Recovers the unique message of a codeword, or `None` for a non-codeword.
    pub fn message_of(&self, word: &FieldVector) -> Result<Option<FieldVector>> {
        self.matrix.solve(word)
    }

    /// Coordinates whose generator rows are linearly independent. Reading a
    /// word at these positions determines the message of any codeword.
    pub fn information_set(&self) -> Vec<usize> {
        self.matrix.transpose().pivot_columns()
    }

    /// Checks `H * G = 0`, i.e. every codeword satisfies the parity checks.
    pub fn satisfies(&self, parity_check: &FieldMatrix) -> Result<bool> {
        Ok(parity_check.mul(&self.matrix)?.is_zero())
    }

    pub fn codeword_count(&self) -> Option<u64> {
        (self.q() as u64).checked_pow(self.k() as u32)
    }

    fn enumerable(&self) -> Result<u64> {
        match self.codeword_count() {
            Some(c) if c <= MAX_ENUMERATED_CODEWORDS => Ok(c),
            _ => Err(Error::TooLarge(format!(
                "q^k = {}^{} codewords",
                self.q(),
                self.k()
            ))),
        }
    }
}

/// Parity-check matrix of the binary (7,4) Hamming code; column `j` is the
/// binary expansion of `j + 1`.
pub fn hamming_7_4_parity_check() -> FieldMatrix {
    let rows: Vec<Vec<u32>> = (0..3)
        .map(|bit| (1..=7u32).map(|j| (j >> bit) & 1).collect())
        .collect();
    FieldMatrix::from_rows(&rows, 2).expect("valid binary matrix")
}

/// Node encoder: `G v + e`.
pub fn encode_node(v: &FieldVector, code: &GeneratorCode, e: &FieldVector) -> Result<FieldVector> {
    code.encode(v)?.add(e)
}

/// The split of a `k`-dimensional code input into a `(k - kbar)`-dimensional
/// message part and a `kbar`-dimensional sacrificed random part.
///
/// `F` projects onto the message coordinates, `F1` embeds a message and `F2`
/// embeds the random part. Besides `F F1 = I` and invertibility of `[F1 | F2]`
/// the split satisfies `F F2 = 0`, which lets a node recover its peer's message
/// from the hashed sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashSplit {
    k: usize,
    kbar: usize,
    f: FieldMatrix,
    f1: FieldMatrix,
    f2: FieldMatrix,
}

impl HashSplit {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kbar(&self) -> usize {
        self.kbar
    }

    pub fn message_len(&self) -> usize {
        self.k - self.kbar
    }

    pub fn q(&self) -> u32 {
        self.f.modulus()
    }

    pub fn f(&self) -> &FieldMatrix {
        &self.f
    }

    pub fn f1(&self) -> &FieldMatrix {
        &self.f1
    }

    pub fn f2(&self) -> &FieldMatrix {
        &self.f2
    }

    /// `F1 m + F2 l`.
    pub fn combine(&self, m: &FieldVector, l: &FieldVector) -> Result<FieldVector> {
        self.f1.mul_vec(m)?.add(&self.f2.mul_vec(l)?)
    }

    /// `F v`.
    pub fn hash(&self, v: &FieldVector) -> Result<FieldVector> {
        self.f.mul_vec(v)
    }

    /// Verifies the structural invariants, returning a description of each
    /// one that fails.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mk = self.message_len();
        if self.f.rank() != mk {
            out.push(format!("rank F = {}, expected {mk}", self.f.rank()));
        }
        match self.f.mul(&self.f1) {
            Ok(p) if p == FieldMatrix::identity(mk, self.q()) => {}
            _ => out.push("F F1 is not the identity".into()),
        }
        match self.f.mul(&self.f2) {
            Ok(p) if p.is_zero() => {}
            _ => out.push("F F2 is not zero".into()),
        }
        match self.f1.hstack(&self.f2) {
            Ok(block) if block.rank() == self.k => {}
            _ => out.push("[F1 | F2] is not invertible".into()),
        }
        out
    }
}

/// Coordinate split: the message occupies the first `k - kbar` coordinates of
/// the code input and the sacrificed randomness the last `kbar`.
pub fn make_hash_split(k: usize, kbar: usize, q: u32) -> Result<HashSplit> {
    check_prime(q)?;
    if kbar > k {
        return Err(Error::InvalidParameter(format!("kbar = {kbar} exceeds k = {k}")));
    }
    let mk = k - kbar;
    let mut f = FieldMatrix::zeros(mk, k, q);
    let mut f1 = FieldMatrix::zeros(k, mk, q);
    let mut f2 = FieldMatrix::zeros(k, kbar, q);
    for i in 0..mk {
        f.set(i, i, 1)?;
        f1.set(i, i, 1)?;
    }
    for j in 0..kbar {
        f2.set(mk + j, j, 1)?;
    }
    Ok(HashSplit { k, kbar, f, f1, f2 })
}

/// Toeplitz hashing `F_q^in_len -> F_q^out_len`, parameterised by the
/// `in_len + out_len - 1` entries on its diagonals. Uniform diagonals make the
/// family universal2: any nonzero input hashes to zero with probability
/// exactly `q^-out_len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzHash {
    out_len: usize,
    in_len: usize,
    q: u32,
    diagonals: Vec<u32>,
}

impl ToeplitzHash {
    pub fn new(out_len: usize, in_len: usize, diagonals: Vec<u32>, q: u32) -> Result<Self> {
        check_prime(q)?;
        let expected = (out_len + in_len).saturating_sub(1);
        if diagonals.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} diagonal entries, expected {expected}",
                diagonals.len()
            )));
        }
        if diagonals.iter().any(|&d| d >= q) {
            return Err(Error::InvalidParameter("diagonal entry out of range".into()));
        }
        Ok(Self {
            out_len,
            in_len,
            q,
            diagonals,
        })
    }

    pub fn sample(out_len: usize, in_len: usize, q: u32, rng: &mut seed::Rng) -> Result<Self> {
        let len = (out_len + in_len).saturating_sub(1);
        let diagonals = (0..len).map(|_| rng.random_range(0..q)).collect();
        Self::new(out_len, in_len, diagonals, q)
    }

    /// Entry `(i, j)` is `diagonals[i - j + in_len - 1]`.
    pub fn matrix(&self) -> FieldMatrix {
        toeplitz_block(self.out_len, self.in_len, &self.diagonals, self.q)
    }

    pub fn apply(&self, x: &FieldVector) -> Result<FieldVector> {
        self.matrix().mul_vec(x)
    }
}

fn toeplitz_block(rows: usize, cols: usize, diagonals: &[u32], q: u32) -> FieldMatrix {
    let mut m = FieldMatrix::zeros(rows, cols, q);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, diagonals[i + cols - 1 - j])
                .expect("diagonal entries are reduced");
        }
    }
    m
}

/// Symbol histogram of a word: `counts[t]` is the number of coordinates equal
/// to `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Composition(Vec<usize>);

impl Composition {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    pub fn of(x: &FieldVector) -> Self {
        let mut counts = vec![0usize; x.modulus() as usize];
        for &v in x.entries() {
            counts[v as usize] += 1;
        }
        Self(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    /// True for the composition of the all-zero word.
    pub fn is_zero_word(&self) -> bool {
        self.0.iter().skip(1).all(|&c| c == 0)
    }

    /// The multinomial coefficient `n! / prod(counts!)`, when it fits in 128
    /// bits.
    pub fn multinomial(&self) -> Option<u128> {
        let mut acc = 1u128;
        let mut placed = 0usize;
        for &c in &self.0 {
            placed += c;
            acc = acc.checked_mul(binomial(placed, c)?)?;
        }
        Some(acc)
    }

    pub fn ln_multinomial(&self) -> f64 {
        ln_factorial(self.n()) - self.0.iter().map(|&c| ln_factorial(c)).sum::<f64>()
    }
}

fn binomial(n: usize, r: usize) -> Option<u128> {
    let r = r.min(n - r);
    let mut acc = 1u128;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `N(lambda, g)` for every composition `lambda` of a nonzero codeword.
pub fn composition_counts(code: &GeneratorCode) -> Result<BTreeMap<Composition, u64>> {
    let count = code.enumerable()?;
    let mut out = BTreeMap::new();
    for index in 1..count {
        let v = FieldVector::from_index(index, code.k(), code.q());
        let word = FieldVector::from_raw(code.matrix.mul_slice(v.entries()), code.q());
        *out.entry(Composition::of(&word)).or_insert(0) += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub a: f64,
    pub log_a: f64,
    pub argmax: Composition,
}

/// Deviation of a single code, `A = max_lambda N(lambda, g) q^(n-k) / (n choose lambda)`.
///
/// This is the ensemble value for the ensemble of row permutations of `code`,
/// since that ensemble has `E N(lambda, G) = N(lambda, g)`.
pub fn deviation_a(code: &GeneratorCode) -> Result<DeviationReport> {
    if code.k() == 0 {
        return Err(Error::InvalidParameter("deviation of a k = 0 code".into()));
    }
    let counts = composition_counts(code)?;
    let averaged = counts.into_iter().map(|(c, n)| (c, n as f64));
    Ok(max_deviation(averaged, code.n(), code.k(), code.q()))
}

fn max_deviation(
    counts: impl Iterator<Item = (Composition, f64)>,
    n: usize,
    k: usize,
    q: u32,
) -> DeviationReport {
    let redundancy = (q as u128).checked_pow((n - k) as u32);
    let mut best: Option<DeviationReport> = None;
    for (lambda, mean_count) in counts {
        let ln_a = mean_count.ln() + (n - k) as f64 * (q as f64).ln() - lambda.ln_multinomial();
        // Integer counts over small n give an exactly rounded ratio.
        let a = match (redundancy, lambda.multinomial()) {
            (Some(r), Some(m)) if mean_count.fract() == 0.0 => {
                match (mean_count as u128).checked_mul(r) {
                    Some(num) => num as f64 / m as f64,
                    None => ln_a.exp(),
                }
            }
            _ => ln_a.exp(),
        };
        if best.as_ref().is_none_or(|b| a > b.a) {
            best = Some(DeviationReport {
                a,
                log_a: ln_a,
                argmax: lambda,
            });
        }
    }
    best.unwrap_or(DeviationReport {
        a: 0.0,
        log_a: f64::NEG_INFINITY,
        argmax: Composition(Vec::new()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// Uniform `n x k` matrices conditioned on rank `k`.
    Uniform,
    /// `[I_k ; T]` with `T` a uniform `(n-k) x k` Toeplitz block.
    Toeplitz,
    /// Uniform row permutations of a fixed base code.
    FixedPermuted,
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "toeplitz" => Ok(Self::Toeplitz),
            "fixed-permuted" => Ok(Self::FixedPermuted),
            other => Err(Error::Parse(format!("unknown ensemble {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub seed: u64,
    pub base_code: Option<GeneratorCode>,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, k: usize, q: u32, seed: u64) -> Self {
        Self {
            kind,
            n,
            k,
            q,
            seed,
            base_code: None,
        }
    }

    pub fn permuted(base: GeneratorCode, seed: u64) -> Self {
        Self {
            kind: EnsembleKind::FixedPermuted,
            n: base.n(),
            k: base.k(),
            q: base.q(),
            seed,
            base_code: Some(base),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_prime(self.q)?;
        if self.k > self.n {
            return Err(Error::InvalidParameter(format!(
                "k = {} exceeds n = {}",
                self.k, self.n
            )));
        }
        match (&self.base_code, self.kind) {
            (Some(base), EnsembleKind::FixedPermuted) => {
                if (base.n(), base.k(), base.q()) != (self.n, self.k, self.q) {
                    return Err(Error::InvalidParameter(
                        "base code dimensions disagree with the ensemble".into(),
                    ));
                }
                Ok(())
            }
            (None, EnsembleKind::FixedPermuted) => Err(Error::InvalidParameter(
                "fixed-permuted ensemble needs a base code".into(),
            )),
            (Some(_), _) => Err(Error::InvalidParameter(
                "base code given for a random ensemble".into(),
            )),
            (None, _) => Ok(()),
        }
    }
}

/// Draws one code from the ensemble, deterministically in `spec.seed`.
pub fn sample_code(spec: &EnsembleSpec) -> Result<GeneratorCode> {
    spec.validate()?;
    sample_with(spec, &mut seed::rng(spec.seed))
}

fn sample_with(spec: &EnsembleSpec, rng: &mut seed::Rng) -> Result<GeneratorCode> {
    let (n, k, q) = (spec.n, spec.k, spec.q);
    match spec.kind {
        EnsembleKind::Uniform => {
            for _ in 0..MAX_SAMPLING_ATTEMPTS {
                let entries = (0..n * k).map(|_| rng.random_range(0..q)).collect();
                let m = FieldMatrix::from_raw(n, k, entries, q);
                if m.rank() == k {
                    return GeneratorCode::new(m);
                }
            }
            Err(Error::SamplingFailed(MAX_SAMPLING_ATTEMPTS))
        }
        EnsembleKind::Toeplitz => {
            let diagonals: Vec<u32> = (0..n.saturating_sub(1))
                .map(|_| rng.random_range(0..q))
                .collect();
            GeneratorCode::new(systematic_toeplitz(n, k, q, &diagonals))
        }
        EnsembleKind::FixedPermuted => {
            let base = spec.base_code.as_ref().expect("validated");
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            GeneratorCode::new(base.matrix.permute_rows(&perm)?)
        }
    }
}

/// `[I_k ; T]` where the `(n-k) x k` Toeplitz block `T` reads its diagonals
/// from the first `n - 1` entries of `diagonals`.
fn systematic_toeplitz(n: usize, k: usize, q: u32, diagonals: &[u32]) -> FieldMatrix {
    let mut entries = FieldMatrix::identity(k, q).entries().to_vec();
    if n > k && k > 0 {
        let block = toeplitz_block(n - k, k, &diagonals[..n - 1], q);
        entries.extend_from_slice(block.entries());
    } else {
        entries.extend(std::iter::repeat_n(0, (n - k) * k));
    }
    FieldMatrix::from_raw(n, k, entries, q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipEstimate {
    pub probability: f64,
    pub exact: bool,
    /// Number of ensemble members examined (all of them in exact mode).
    pub samples: u64,
}

/// Enumeration budget for exact ensemble probabilities, in members.
const EXACT_BUDGET: u64 = 1 << 24;

/// `Pr{x in Im G}` under the ensemble. Small ensembles are enumerated exactly;
/// otherwise `mc_samples` codes are drawn from seeds split off `spec.seed`.
pub fn membership_probability(
    spec: &EnsembleSpec,
    x: &FieldVector,
    mc_samples: u64,
) -> Result<MembershipEstimate> {
    spec.validate()?;
    if x.len() != spec.n || x.modulus() != spec.q {
        return Err(Error::DimensionMismatch(format!(
            "x has length {} over F_{}, ensemble is over F_{}^{}",
            x.len(),
            x.modulus(),
            spec.q,
            spec.n
        )));
    }
    if x.is_zero() {
        return Err(Error::InvalidParameter(
            "x = 0 lies in every image; membership of zero is not informative".into(),
        ));
    }
    let contains = |m: &FieldMatrix| -> bool { m.solve(x).expect("dimensions checked").is_some() };
    if let Some(members) = enumerate_ensemble(spec) {
        let (hits, total) = members.fold((0u64, 0u64), |(h, t), m| {
            (h + contains(&m) as u64, t + 1)
        });
        return Ok(MembershipEstimate {
            probability: hits as f64 / total as f64,
            exact: true,
            samples: total,
        });
    }
    if mc_samples == 0 {
        return Err(Error::InvalidParameter("ensemble too large for exact mode and no samples requested".into()));
    }
    let mut hits = 0u64;
    for i in 0..mc_samples {
        let code = sample_with(spec, &mut seed::rng(seed::derive(spec.seed, i)))?;
        hits += contains(&code.matrix) as u64;
    }
    Ok(MembershipEstimate {
        probability: hits as f64 / mc_samples as f64,
        exact: false,
        samples: mc_samples,
    })
}

/// Every member of the ensemble with equal weight, when the ensemble is small
/// enough to enumerate.
fn enumerate_ensemble(spec: &EnsembleSpec) -> Option<Box<dyn Iterator<Item = FieldMatrix> + '_>> {
    let (n, k, q) = (spec.n, spec.k, spec.q);
    let log2q = (q as f64).log2();
    match spec.kind {
        EnsembleKind::Uniform => {
            if (n * k) as f64 * log2q > 24.0 {
                return None;
            }
            let total = (q as u64).pow((n * k) as u32);
            Some(Box::new((0..total).filter_map(move |i| {
                let m = FieldMatrix::from_raw(n, k, FieldVector::from_index(i, n * k, q).entries().to_vec(), q);
                (m.rank() == k).then_some(m)
            })))
        }
        EnsembleKind::Toeplitz => {
            let free = n.saturating_sub(1);
            if free as f64 * log2q > 24.0 {
                return None;
            }
            let total = (q as u64).pow(free as u32);
            Some(Box::new((0..total).map(move |i| {
                let d = FieldVector::from_index(i, free, q);
                systematic_toeplitz(n, k, q, d.entries())
            })))
        }
        EnsembleKind::FixedPermuted => {
            let factorial: u64 = (1..=n as u64).product();
            if factorial > EXACT_BUDGET {
                return None;
            }
            let base = spec.base_code.as_ref()?;
            Some(Box::new(permutations(n).into_iter().map(move |p| {
                base.matrix.permute_rows(&p).expect("valid permutation")
            })))
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Ensemble deviation estimated from `samples` drawn codes. `N(lambda, G)` is
/// averaged over the draws first and the maximum over `lambda` taken last.
pub fn deviation_a_ensemble(spec: &EnsembleSpec, samples: u64) -> Result<DeviationReport> {
    spec.validate()?;
    if spec.k == 0 || samples == 0 {
        return Err(Error::InvalidParameter("need k >= 1 and at least one sample".into()));
    }
    let mut totals: BTreeMap<Composition, u64> = BTreeMap::new();
    for i in 0..samples {
        let code = sample_with(spec, &mut seed::rng(seed::derive(spec.seed, i)))?;
        for (lambda, count) in composition_counts(&code)? {
            *totals.entry(lambda).or_insert(0) += count;
        }
    }
    let averaged = totals
        .into_iter()
        .map(|(c, total)| (c, total as f64 / samples as f64));
    Ok(max_deviation(averaged, spec.n, spec.k, spec.q))
}

/// Parses a binary parity-check matrix in alist format: `cols rows`, the two
/// maximum degrees, the column and row degree lists, then one line of 1-based
/// row indices per column followed by one line of column indices per row.
/// Zero padding is ignored.
pub fn parse_alist(text: &str) -> Result<FieldMatrix> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<usize>>>()
        });
    let mut next = |what: &str| -> Result<Vec<usize>> {
        lines
            .next()
            .ok_or_else(|| Error::Parse(format!("alist ends before {what}")))?
    };
    let dims = next("dimensions")?;
    let [cols, rows] = dims[..] else {
        return Err(Error::Parse("alist dimensions line".into()));
    };
    next("max degrees")?;
    let col_deg = next("column degrees")?;
    let row_deg = next("row degrees")?;
    if col_deg.len() != cols || row_deg.len() != rows {
        return Err(Error::Parse("degree list lengths".into()));
    }
    let mut h = FieldMatrix::zeros(rows, cols, 2);
    for (c, &deg) in col_deg.iter().enumerate() {
        let idx: Vec<usize> = next("column lists")?.into_iter().filter(|&i| i != 0).collect();
        if idx.len() != deg {
            return Err(Error::Parse(format!("column {c} degree mismatch")));
        }
        for r in idx {
            if r > rows {
                return Err(Error::Parse(format!("row index {r} out of range")));
            }
            h.set(r - 1, c, 1)?;
        }
    }
    for (r, &deg) in row_deg.iter().enumerate() {
        let idx: Vec<usize> = next("row lists")?.into_iter().filter(|&i| i != 0).collect();
        if idx.len() != deg || idx.iter().any(|&c| c == 0 || c > cols || h.get(r, c - 1) != 1) {
            return Err(Error::Parse(format!("row {r} disagrees with the column lists")));
        }
    }
    Ok(h)
}

pub fn to_alist(h: &FieldMatrix) -> Result<String> {
    if h.modulus() != 2 {
        return Err(Error::InvalidParameter("alist is a binary format".into()));
    }
    let col_lists: Vec<Vec<usize>> = (0..h.cols())
        .map(|c| (0..h.rows()).filter(|&r| h.get(r, c) == 1).map(|r| r + 1).collect())
        .collect();
    let row_lists: Vec<Vec<usize>> = (0..h.rows())
        .map(|r| (0..h.cols()).filter(|&c| h.get(r, c) == 1).map(|c| c + 1).collect())
        .collect();
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let degs = |lists: &[Vec<usize>]| lists.iter().map(Vec::len).collect::<Vec<_>>();
    let max = |lists: &[Vec<usize>]| lists.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = format!("{} {}\n", h.cols(), h.rows());
    out += &format!("{} {}\n", max(&col_lists), max(&row_lists));
    out += &(join(&degs(&col_lists)) + "\n");
    out += &(join(&degs(&row_lists)) + "\n");
    for list in col_lists.iter().chain(&row_lists) {
        out += &(join(list) + "\n");
    }
    Ok(out)
}
