use super::CodeSpec;
use crate::error::{Error, Result};

/// Value carried by every frozen position.
pub const FROZEN_VALUE: u8 = 0;

const ERASED: u8 = 2;

/// One received erasure-channel symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum ErasureSymbol {
    Zero = 0,
    One = 1,
    Erased = ERASED,
}

impl ErasureSymbol {
    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            ErasureSymbol::Zero
        } else {
            ErasureSymbol::One
        }
    }
}

/// SC decoding stopped at an information bit it could not resolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("information bit {index} is erased")]
pub struct DecodeFailure {
    pub index: usize,
}

/// `x ← x·F^{⊗n}` in place, one `(a, b) ↦ (a ⊕ b, b)` stage per level.
pub fn encode_in_place(bits: &mut [u8]) {
    let len = bits.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
}

fn place_message(spec: &CodeSpec, message: &[u8], u: &mut [u8]) {
    u.fill(FROZEN_VALUE);
    for (&i, &m) in spec.info_set().iter().zip(message) {
        u[i] = m & 1;
    }
}

/// Codeword for `message`, which fills the information set in index order.
pub fn encode(spec: &CodeSpec, message: &[u8]) -> Result<Vec<u8>> {
    if message.len() != spec.message_len() {
        return Err(Error::LengthMismatch {
            expected: spec.message_len(),
            actual: message.len(),
        });
    }
    if let Some(b) = message.iter().find(|&&b| b > 1) {
        return Err(Error::param(
            "message",
            format!("bit value {b} is not 0 or 1"),
        ));
    }
    let mut x = vec![0; spec.block_length()];
    place_message(spec, message, &mut x);
    encode_in_place(&mut x);
    Ok(x)
}

pub(super) fn encode_into(spec: &CodeSpec, message: &[u8], x: &mut [u8]) {
    place_message(spec, message, x);
    encode_in_place(x);
}

/// Successive-cancellation decoder for the erasure channel with reusable
/// scratch space.
///
/// Beliefs are three-valued (`0`, `1`, erased). An information bit whose
/// belief is erased ends decoding with [`DecodeFailure`]; nothing is guessed.
#[derive(Debug, Default, Clone)]
pub struct BecScDecoder {
    beliefs: Vec<u8>,
    partial: Vec<u8>,
    u: Vec<u8>,
}

impl BecScDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Decodes received symbols coded as 0, 1 or 2 (erased) into `message`.
    pub(super) fn decode_raw(
        &mut self,
        spec: &CodeSpec,
        received: &[u8],
        message: &mut Vec<u8>,
    ) -> std::result::Result<(), DecodeFailure> {
        let len = received.len();
        self.beliefs.resize(len.max(1), 0);
        self.partial.resize(len, 0);
        self.u.resize(len, 0);
        decode_node(
            received,
            spec.frozen_mask(),
            0,
            &mut self.u,
            &mut self.partial,
            &mut self.beliefs,
        )?;
        message.clear();
        message.extend(spec.info_set().iter().map(|&i| self.u[i]));
        Ok(())
    }

    pub fn decode(
        &mut self,
        spec: &CodeSpec,
        received: &[ErasureSymbol],
    ) -> Result<std::result::Result<Vec<u8>, DecodeFailure>> {
        if received.len() != spec.block_length() {
            return Err(Error::LengthMismatch {
                expected: spec.block_length(),
                actual: received.len(),
            });
        }
        let raw: Vec<u8> = received.iter().map(|&s| s as u8).collect();
        let mut message = Vec::with_capacity(spec.message_len());
        Ok(self.decode_raw(spec, &raw, &mut message).map(|()| message))
    }
}

/// One-shot SC decoding over the erasure channel.
///
/// The outer `Result` reports misuse (wrong length); the inner one is the
/// decoding outcome.
pub fn sc_decode_bec(
    spec: &CodeSpec,
    received: &[ErasureSymbol],
) -> Result<std::result::Result<Vec<u8>, DecodeFailure>> {
    BecScDecoder::new().decode(spec, received)
}

#[inline]
fn check_node(a: u8, b: u8) -> u8 {
    if a == ERASED || b == ERASED {
        ERASED
    } else {
        a ^ b
    }
}

#[inline]
fn bit_node(a: u8, b: u8, s: u8) -> u8 {
    // a observes s ⊕ t, b observes t
    if b != ERASED {
        b
    } else if a != ERASED {
        a ^ s
    } else {
        ERASED
    }
}

/// Decodes the subcode whose channel beliefs are `y`, writing the decided
/// `u` bits and the re-encoded codeword `x`. `scratch` holds at least
/// `y.len() − 1` belief slots for the levels below.
fn decode_node(
    y: &[u8],
    frozen: &[bool],
    offset: usize,
    u: &mut [u8],
    x: &mut [u8],
    scratch: &mut [u8],
) -> std::result::Result<(), DecodeFailure> {
    let len = y.len();
    if len == 1 {
        let bit = if frozen[0] {
            FROZEN_VALUE
        } else if y[0] == ERASED {
            return Err(DecodeFailure { index: offset });
        } else {
            y[0]
        };
        u[0] = bit;
        x[0] = bit;
        return Ok(());
    }
    let half = len / 2;
    let (buf, rest) = scratch.split_at_mut(half);
    let (y_lo, y_hi) = y.split_at(half);
    for ((b, &a), &c) in buf.iter_mut().zip(y_lo).zip(y_hi) {
        *b = check_node(a, c);
    }
    let (u_lo, u_hi) = u.split_at_mut(half);
    let (x_lo, x_hi) = x.split_at_mut(half);
    decode_node(buf, &frozen[..half], offset, u_lo, x_lo, rest)?;
    for (((b, &a), &c), &s) in buf.iter_mut().zip(y_lo).zip(y_hi).zip(x_lo.iter()) {
        *b = bit_node(a, c, s);
    }
    decode_node(buf, &frozen[half..], offset + half, u_hi, x_hi, rest)?;
    for (a, &b) in x_lo.iter_mut().zip(x_hi.iter()) {
        *a ^= b;
    }
    Ok(())
}
