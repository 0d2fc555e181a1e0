//! Likelihood-ratio SC decoding for arbitrary binary-input channels.
//!
//! Construction goes through the exact transform in [`crate::bdmc`], whose
//! alphabet grows doubly exponentially, so codes are limited to
//! [`GENERAL_MAX_STAGES`]. This path exists to cross-check the erasure
//! decoder and the index convention on channels other than the BEC.

use super::{smallest_k, CodeSpec, DecodeFailure, FROZEN_VALUE};
use crate::bdmc::{
    bhattacharyya, synthesized_channels, Channel, DEFAULT_MAX_OUTPUTS, DEFAULT_MERGE_TOL,
};
use crate::error::{Error, Result};

pub const GENERAL_MAX_STAGES: u32 = 4;

/// Code for an arbitrary channel with Z values from exact synthesized channels.
pub fn construct_general(channel: &Channel, n: u32, rate: f64) -> Result<CodeSpec> {
    if n > GENERAL_MAX_STAGES {
        return Err(Error::param(
            "n",
            format!("general-channel construction supports n ≤ {GENERAL_MAX_STAGES}, got {n}"),
        ));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::param("rate", format!("{rate} not in (0,1]")));
    }
    let z: Vec<f64> = synthesized_channels(channel, n, DEFAULT_MERGE_TOL, DEFAULT_MAX_OUTPUTS)?
        .iter()
        .map(bhattacharyya)
        .collect();
    let k = (rate * z.len() as f64).floor() as usize;
    let info = smallest_k(&z, k);
    CodeSpec::from_parts(n, channel.as_bec(), z, info)
}

/// `ln(W(y|0)/W(y|1))` for each received output symbol index.
pub fn channel_llrs(channel: &Channel, received: &[usize]) -> Result<Vec<f64>> {
    received
        .iter()
        .map(|&y| {
            let &(p0, p1) = channel.outputs().get(y).ok_or_else(|| {
                Error::param(
                    "received",
                    format!("symbol {y} outside the output alphabet"),
                )
            })?;
            Ok(match (p0 > 0.0, p1 > 0.0) {
                (true, true) => (p0 / p1).ln(),
                (true, false) => f64::INFINITY,
                (false, true) => f64::NEG_INFINITY,
                (false, false) => 0.0,
            })
        })
        .collect()
}

fn check_llr(a: f64, b: f64) -> f64 {
    let t = (0.5 * a).tanh() * (0.5 * b).tanh();
    2.0 * t.atanh()
}

/// SC decoding from channel LLRs. A zero (or undefined) LLR on an
/// information bit is a failure, matching the erasure decoder.
pub fn sc_decode_llr(
    spec: &CodeSpec,
    llrs: &[f64],
) -> Result<std::result::Result<Vec<u8>, DecodeFailure>> {
    if llrs.len() != spec.block_length() {
        return Err(Error::LengthMismatch {
            expected: spec.block_length(),
            actual: llrs.len(),
        });
    }
    let len = llrs.len();
    let mut u = vec![0u8; len];
    let mut x = vec![0u8; len];
    Ok(node(llrs, spec.frozen_mask(), 0, &mut u, &mut x)
        .map(|()| spec.info_set().iter().map(|&i| u[i]).collect()))
}

fn node(
    llr: &[f64],
    frozen: &[bool],
    offset: usize,
    u: &mut [u8],
    x: &mut [u8],
) -> std::result::Result<(), DecodeFailure> {
    if llr.len() == 1 {
        let bit = if frozen[0] {
            FROZEN_VALUE
        } else if llr[0] > 0.0 {
            0
        } else if llr[0] < 0.0 {
            1
        } else {
            return Err(DecodeFailure { index: offset });
        };
        u[0] = bit;
        x[0] = bit;
        return Ok(());
    }
    let half = llr.len() / 2;
    let (lo, hi) = llr.split_at(half);
    let left: Vec<f64> = lo.iter().zip(hi).map(|(&a, &b)| check_llr(a, b)).collect();
    let (u_lo, u_hi) = u.split_at_mut(half);
    let (x_lo, x_hi) = x.split_at_mut(half);
    node(&left, &frozen[..half], offset, u_lo, x_lo)?;
    let right: Vec<f64> = lo
        .iter()
        .zip(hi)
        .zip(x_lo.iter())
        .map(|((&a, &b), &s)| if s == 0 { b + a } else { b - a })
        .collect();
    node(&right, &frozen[half..], offset + half, u_hi, x_hi)?;
    for (a, &b) in x_lo.iter_mut().zip(x_hi.iter()) {
        *a ^= b;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarcode::{bec_z_spectrum, construct, encode, sc_decode_bec, ErasureSymbol};
    use crate::stats::trial_rng;
    use rand::Rng;

    #[test]
    fn bec_construction_agrees_with_spectrum() {
        let ch = Channel::bec(0.3).unwrap();
        let spec = construct_general(&ch, 4, 0.5).unwrap();
        let z = bec_z_spectrum(0.3, 4).unwrap();
        for (a, b) in spec.z_values().iter().zip(&z) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(spec.info_set(), construct(0.3, 4, 0.5).unwrap().info_set());
        assert!((spec.eps().unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn llr_decoder_agrees_with_erasure_decoder() {
        let ch = Channel::bec(0.4).unwrap();
        let spec = construct(0.4, 4, 0.5).unwrap();
        let mut rng = trial_rng(1, 0);
        for _ in 0..300 {
            let msg: Vec<u8> = (0..spec.message_len())
                .map(|_| rng.random_range(0..2))
                .collect();
            let cw = encode(&spec, &msg).unwrap();
            let mut symbols = Vec::new();
            let mut rx = Vec::new();
            for &b in &cw {
                if rng.random::<f64>() < 0.4 {
                    symbols.push(2);
                    rx.push(ErasureSymbol::Erased);
                } else {
                    symbols.push(b as usize);
                    rx.push(ErasureSymbol::from_bit(b));
                }
            }
            let llr = channel_llrs(&ch, &symbols).unwrap();
            let a = sc_decode_llr(&spec, &llr).unwrap();
            let b = sc_decode_bec(&spec, &rx).unwrap();
            assert_eq!(a, b);
            if let Ok(m) = a {
                assert_eq!(m, msg);
            }
        }
    }

    #[test]
    fn bsc_code_decodes_noiseless_words() {
        let ch = Channel::bsc(0.11).unwrap();
        let spec = construct_general(&ch, 3, 0.5).unwrap();
        assert!(spec.eps().is_none());
        // the reliable end of the index range is chosen
        assert!(spec.info_set().contains(&7));
        for m in 0u8..16 {
            let msg: Vec<u8> = (0..4).map(|k| (m >> k) & 1).collect();
            let cw = encode(&spec, &msg).unwrap();
            let symbols: Vec<usize> = cw.iter().map(|&b| b as usize).collect();
            let llr = channel_llrs(&ch, &symbols).unwrap();
            assert_eq!(sc_decode_llr(&spec, &llr).unwrap().unwrap(), msg);
        }
    }

    #[test]
    fn stage_limit() {
        let ch = Channel::bsc(0.11).unwrap();
        assert!(construct_general(&ch, 5, 0.5).is_err());
    }
}
