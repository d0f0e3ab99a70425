//! Shared fixtures for the benchmarks.

use seccf::codes::{encode_node, hamming_7_4_parity_check, sample_code};
use seccf::channel::transmit;
use seccf::{EnsembleKind, EnsembleSpec, FieldMatrix, FieldVector, GeneratorCode, MacChannelParams, ReceivedBlock};

/// One received block for sum decoding, with the shifts the relay knows.
pub struct DecodeFixture {
    pub code: GeneratorCode,
    pub channel: MacChannelParams,
    pub y: ReceivedBlock,
    pub e1: FieldVector,
    pub e2: FieldVector,
}

impl DecodeFixture {
    fn build(code: GeneratorCode, h: f64, seed: u64) -> Self {
        let (n, k, q) = (code.n(), code.k(), code.q());
        let channel = MacChannelParams::bpsk(h, 1.0).expect("valid channel");
        let v1 = FieldVector::from_index(seed % (q as u64).pow(k as u32), k, q);
        let v2 = FieldVector::from_index((seed / 3) % (q as u64).pow(k as u32), k, q);
        let e1 = FieldVector::from_index(seed.wrapping_mul(7) % (1 << n.min(20)), n, q);
        let e2 = FieldVector::from_index(seed.wrapping_mul(13) % (1 << n.min(20)), n, q);
        let x1 = encode_node(&v1, &code, &e1).expect("encode");
        let x2 = encode_node(&v2, &code, &e2).expect("encode");
        let y = transmit(&x1, &x2, &channel, seed).expect("transmit");
        Self { code, channel, y, e1, e2 }
    }

    pub fn hamming(h: f64, seed: u64) -> (Self, FieldMatrix) {
        let h_matrix = hamming_7_4_parity_check();
        let code = GeneratorCode::from_parity_check(&h_matrix).expect("hamming code");
        (Self::build(code, h, seed), h_matrix)
    }

    /// Random binary code with `k` information symbols out of `n`.
    pub fn uniform(n: usize, k: usize, h: f64, seed: u64) -> Self {
        let code = sample_code(&EnsembleSpec::new(EnsembleKind::Uniform, n, k, 2, seed)).expect("code");
        Self::build(code, h, seed)
    }
}
