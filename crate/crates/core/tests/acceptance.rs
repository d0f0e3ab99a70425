//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p seccf-core --test acceptance`.

use std::f64::consts::LN_2;
use std::process::ExitCode;
use std::time::Instant;

use seccf::bounds::{
    bpsk_rate_curves, bpsk_rate_row, bpsk_rate_zero, ldpc_adjusted_rates, optimize_bound, verify_inequalities,
    BoundKind, RateCurve, VerifyGrid,
};
use seccf::codes::{deviation_a, hamming_7_4_parity_check, make_hash_split, membership_probability, sample_code};
use seccf::infoq::{mutual_infos, renyi_down, RenyiTarget};
use seccf::protocol::{
    bp_decode, leakage_exact, leakage_exact_shift_averaged, leakage_mc, play_round, run_trial, RoundInputs,
};
use seccf::{
    CodeRateParams, DeltaITable, EnsembleKind, EnsembleSpec, FieldVector, GeneratorCode, MacChannelParams,
    ProtocolConfig, QuadratureSpec,
};

type Outcome = Result<(bool, String), seccf::Error>;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn threshold_reproduction() -> Outcome {
    let start = Instant::now();
    let z13 = bpsk_rate_zero(RateCurve::SecondType, 1.0, 2.0, 3.0, 1e-6, &spec())?;
    let z17 = bpsk_rate_zero(RateCurve::FirstType, 1.0, 2.0, 3.0, 1e-6, &spec())?;
    let secs = start.elapsed().as_secs_f64();
    let ok = (z13 - 2.443).abs() <= 0.01 && (z17 - 2.518).abs() <= 0.01 && secs < 60.0;
    Ok((ok, format!("zeros at h = {z13:.6} and h = {z17:.6} in {secs:.2} s")))
}

fn asymptote() -> Outcome {
    let r = bpsk_rate_row(12.0, 1.0, &spec())?;
    let target = 0.5 * LN_2;
    let ok = (r.rate_h13 - target).abs() <= 5e-3 && (r.rate_h17 - target).abs() <= 5e-3;
    Ok((ok, format!("h=12: {:.7}, {:.7} vs {target:.7}", r.rate_h13, r.rate_h17)))
}

fn trivial_anchors() -> Outcome {
    let r = bpsk_rate_row(0.0, 1.0, &spec())?;
    let ok = r.rate_h13.abs() <= 1e-6 && (r.rate_h17 + LN_2).abs() <= 1e-6;
    Ok((ok, format!("h=0: {:.3e}, {:.9}", r.rate_h13, r.rate_h17)))
}

fn renyi_limit() -> Outcome {
    let mut worst: f64 = 0.0;
    for h in [1.0, 3.0] {
        let ch = MacChannelParams::bpsk(h, 1.0)?;
        let info = mutual_infos(&ch, &spec())?;
        worst = worst.max((renyi_down(&ch, 1e-3, RenyiTarget::X1, &spec())? - info.i_y_x1).abs());
        worst = worst.max((renyi_down(&ch, 1e-3, RenyiTarget::X1X2, &spec())? - info.i_y_x1x2).abs());
    }
    Ok((worst <= 1e-3, format!("largest gap {worst:.3e}")))
}

fn inequality_checks() -> Result<seccf::bounds::VerificationReport, seccf::Error> {
    verify_inequalities(VerifyGrid::Full, None, &spec())
}

fn b2_within_twice_b1() -> Outcome {
    let report = inequality_checks()?;
    let c = &report.checks[0];
    Ok((
        c.passed(),
        format!("{} grid points, {} violations, worst relative slack {:.3e}", c.points, c.violations, c.worst_margin),
    ))
}

fn renyi_inequality_and_identity() -> Outcome {
    let report = inequality_checks()?;
    let (ineq, ident) = (&report.checks[1], &report.checks[2]);
    Ok((
        ineq.passed() && ident.passed(),
        format!(
            "inequality: {}/{} ok (slack {:.3e}); identity: {}/{} ok",
            ineq.points - ineq.violations,
            ineq.points,
            ineq.worst_margin,
            ident.points - ident.violations,
            ident.points
        ),
    ))
}

fn universal_hashing() -> Outcome {
    let ensemble = EnsembleSpec::new(EnsembleKind::Uniform, 6, 2, 2, 0);
    let mut worst: f64 = 0.0;
    let mut all_exact = true;
    for x in FieldVector::all(6, 2).filter(|x| !x.is_zero()) {
        let m = membership_probability(&ensemble, &x, 0)?;
        all_exact &= m.exact;
        worst = worst.max(m.probability);
    }
    let ok = all_exact && worst <= 2f64.powi(-4);
    Ok((ok, format!("max Pr[x in Im G] = {worst:.6} (bound 0.0625), exhaustive = {all_exact}")))
}

/// Independent brute force: enumerate messages, tally codeword symbol
/// histograms, and take the largest count-to-expected ratio.
fn brute_force_deviation(g: &[Vec<u32>], n: usize, k: usize) -> f64 {
    let mut tally = std::collections::HashMap::<usize, u64>::new();
    for msg in 1u32..(1 << k) {
        let weight = (0..n)
            .filter(|&i| (0..k).map(|j| g[i][j] * ((msg >> j) & 1)).sum::<u32>() % 2 == 1)
            .count();
        *tally.entry(weight).or_default() += 1;
    }
    let binom = |n: usize, w: usize| (0..w).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64);
    tally
        .into_iter()
        .map(|(w, c)| c as f64 * 2f64.powi((n - k) as i32) / binom(n, w) as f64)
        .fold(0.0, f64::max)
}

fn deviation_oracle() -> Outcome {
    let rep = deviation_a(&GeneratorCode::repetition(3, 2)?)?.a;
    let spc = deviation_a(&GeneratorCode::single_parity_check(3, 2)?)?.a;
    let rep_bf = brute_force_deviation(&[vec![1], vec![1], vec![1]], 3, 1);
    let spc_bf = brute_force_deviation(&[vec![1, 0], vec![0, 1], vec![1, 1]], 3, 2);
    let ok = rep == 4.0 && spc == 2.0 && rep_bf == 4.0 && spc_bf == 2.0;
    Ok((ok, format!("repetition(3,1): {rep} (brute {rep_bf}); SPC(3,2): {spc} (brute {spc_bf})")))
}

fn correctness_chain() -> Outcome {
    let mut rounds = 0u64;
    let mut decoded = 0u64;
    let mut broken = 0u64;
    let mut rng_seed = 0u64;
    for n in 1..=6usize {
        for k in 1..=n.min(3) {
            for code_seed in 0..2 {
                let code = sample_code(&EnsembleSpec::new(EnsembleKind::Uniform, n, k, 2, code_seed))?;
                for kbar in 0..=k {
                    let split = make_hash_split(k, kbar, 2)?;
                    let config = ProtocolConfig::new(MacChannelParams::bpsk(1.0, 1e-12)?, code.clone(), split);
                    let mk = k - kbar;
                    let messages: Vec<FieldVector> = FieldVector::all(mk, 2).collect();
                    let randomness: Vec<FieldVector> = FieldVector::all(kbar, 2).collect();
                    for m1 in &messages {
                        for m2 in &messages {
                            for l1 in &randomness {
                                for l2 in &randomness {
                                    for shifted in [false, true] {
                                        rng_seed += 1;
                                        let (e1, e2) = if shifted {
                                            let s = rng_seed * 2654435761;
                                            (
                                                FieldVector::from_index(s % (1 << n), n, 2),
                                                FieldVector::from_index((s >> 8) % (1 << n), n, 2),
                                            )
                                        } else {
                                            (FieldVector::zeros(n, 2), FieldVector::zeros(n, 2))
                                        };
                                        let inputs = RoundInputs {
                                            m1: m1.clone(),
                                            m2: m2.clone(),
                                            l1: l1.clone(),
                                            l2: l2.clone(),
                                            e1,
                                            e2,
                                        };
                                        let r = play_round(&config, inputs, rng_seed)?;
                                        rounds += 1;
                                        if r.sum_decode_ok {
                                            decoded += 1;
                                            broken += u64::from(!r.recovery_ok);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let ok = broken == 0 && decoded > 0;
    Ok((ok, format!("{rounds} rounds, {decoded} correct sum decodes, {broken} failed recoveries")))
}

fn leakage_against_bound() -> Outcome {
    let code = GeneratorCode::repetition(2, 2)?;
    let split = make_hash_split(1, 0, 2)?;
    let channel = MacChannelParams::bpsk(1.0, 1.0)?;
    let config = ProtocolConfig::new(channel.clone(), code.clone(), split.clone());
    let averaged = leakage_exact_shift_averaged(&config, 1, &spec())?.value;
    let fixed = leakage_exact(&config, 1, &spec())?.value;
    let mc = leakage_mc(&config, 1, 200_000, 17)?;
    let se = mc.std_error.unwrap_or(f64::NAN);
    let bound = optimize_bound(BoundKind::B1, &CodeRateParams::new(2, 1, 0, 2)?, None, &channel, &spec())?.b1;
    let silent = ProtocolConfig::new(MacChannelParams::bpsk(0.0, 1.0)?, code, split);
    let silent_leak = leakage_exact(&silent, 1, &spec())?.value;
    let ok = (0.0..=2.0).contains(&averaged)
        && averaged <= bound
        && (mc.value - fixed).abs() <= 3.0 * se
        && silent_leak.abs() <= 1e-9;
    Ok((
        ok,
        format!(
            "shift-averaged {averaged:.8} <= min_s B1 = {bound:.4}; fixed shifts {fixed:.8}, MC {:.5} +- {se:.5}; h=0 {silent_leak:.1e}",
            mc.value
        ),
    ))
}

fn decoder_equivalence() -> Outcome {
    let h = hamming_7_4_parity_check();
    let code = GeneratorCode::from_parity_check(&h)?;
    let split = make_hash_split(4, 0, 2)?;
    let mut config = ProtocolConfig::new(MacChannelParams::bpsk(5.0, 1.0)?, code, split);
    config.shift_mode = seccf::protocol::ShiftMode::Random;
    let mut agree = 0;
    for t in 0..100 {
        let r = run_trial(&config, t)?;
        let bp = bp_decode(&r.y, &config.code, &h, 50, &config.channel, &r.e1, &r.e2)?;
        agree += u32::from(bp.message == r.v_hat);
    }
    Ok((agree >= 99, format!("BP = ML on {agree}/100 trials")))
}

fn ldpc_plumbing() -> Outcome {
    let grid: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
    let base = bpsk_rate_curves(&grid, 1.0, &spec())?;
    let zero = DeltaITable::parse("h,delta_i_nats\n0,0\n10,0\n")?;
    let flat = DeltaITable::parse("# family: constant\nh,delta_i_nats\n0,0.01\n10,0.01\n")?;
    let mut worst_zero: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    for (r, b) in ldpc_adjusted_rates(&zero, &grid, 1.0, &spec())?.iter().zip(&base) {
        worst_zero = worst_zero.max((r.rate_h14 - b.rate_h13).abs()).max((r.rate_h18 - b.rate_h17).abs());
    }
    for (r, b) in ldpc_adjusted_rates(&flat, &grid, 1.0, &spec())?.iter().zip(&base) {
        worst_shift = worst_shift
            .max((r.rate_h14 - b.rate_h13 + 0.02).abs())
            .max((r.rate_h18 - b.rate_h17 + 0.02).abs());
    }
    let ok = worst_zero <= 1e-12 && worst_shift <= 1e-12;
    Ok((
        ok,
        format!("zero gap deviation {worst_zero:.1e}; constant 0.01 gap shift error {worst_shift:.1e}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("rate-curve zero crossings", threshold_reproduction),
        ("rate-curve asymptote at h = 12", asymptote),
        ("rate-curve anchors at h = 0", trivial_anchors),
        ("renyi small-s limit", renyi_limit),
        ("B2[A = q^(n-k)] <= 2 B1 grid", b2_within_twice_b1),
        ("renyi inequality and sum-rate identity", renyi_inequality_and_identity),
        ("universal2 membership, n=6 k=2", universal_hashing),
        ("deviation A oracle", deviation_oracle),
        ("noiseless correctness chain", correctness_chain),
        ("leakage versus bound", leakage_against_bound),
        ("BP versus ML on Hamming(7,4)", decoder_equivalence),
        ("LDPC-adjusted rate plumbing", ldpc_plumbing),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failures += usize::from(!ok);
        println!("{} [{:>2}] {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
