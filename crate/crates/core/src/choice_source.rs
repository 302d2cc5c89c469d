//! Typed random choices backed by split structural/value parameter streams.
//!
//! A generator never talks to an RNG directly. Every random decision is read
//! from one of two untyped byte sequences, selected by the [`ChoiceKind`]
//! annotated at the call site. Structural choices steer the generator's
//! control flow; value choices only fill in content. Keeping the two streams
//! apart is what makes structure-preserving mutation possible: rewriting the
//! value stream can never shift which structural bytes are read.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use xxhash_rust::xxh3::xxh3_128_with_seed;

/// Octets consumed by an integer choice.
pub const INT_WIDTH: usize = 4;
/// Octets consumed by a boolean choice.
pub const BOOL_WIDTH: usize = 1;

const SIGNATURE_SEED: u64 = 0x6265_6469_7673_6967;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChoiceKind {
    Structural,
    Value,
}

impl ChoiceKind {
    pub const ALL: [ChoiceKind; 2] = [ChoiceKind::Structural, ChoiceKind::Value];

    fn index(self) -> usize {
        match self {
            ChoiceKind::Structural => 0,
            ChoiceKind::Value => 1,
        }
    }
}

impl fmt::Display for ChoiceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChoiceKind::Structural => "structural",
            ChoiceKind::Value => "value",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChoiceError {
    #[error("{kind} parameter sequence exhausted in strict replay")]
    SequenceExhausted { kind: ChoiceKind },
    #[error("invalid choice domain [{lo}, {hi}]")]
    InvalidDomain { lo: i128, hi: i128 },
}

/// A random-choice site in a generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoicePoint {
    pub location: &'static str,
    /// Cardinality of the choice domain. Domains whose size depends on the
    /// generation state (e.g. variables in scope) record their upper bound.
    pub domain_size: u64,
    pub kind: ChoiceKind,
}

impl ChoicePoint {
    pub const fn new(location: &'static str, domain_size: u64, kind: ChoiceKind) -> Self {
        Self {
            location,
            domain_size,
            kind,
        }
    }
}

/// An untyped octet stream with a read cursor.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ParameterSequence {
    bytes: Vec<u8>,
    cursor: usize,
}

impl ParameterSequence {
    pub fn new(bytes: Vec<u8>) -> Self {
        Self { bytes, cursor: 0 }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// Bytes in `[0, cursor)`.
    pub fn consumed(&self) -> &[u8] {
        &self.bytes[..self.cursor]
    }

    pub fn reset(&mut self) {
        self.cursor = 0;
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    fn take(&mut self, n: usize) -> Option<&[u8]> {
        let end = self.cursor.checked_add(n)?;
        if end > self.bytes.len() {
            return None;
        }
        let start = self.cursor;
        self.cursor = end;
        Some(&self.bytes[start..end])
    }
}

impl From<Vec<u8>> for ParameterSequence {
    fn from(bytes: Vec<u8>) -> Self {
        Self::new(bytes)
    }
}

/// The `(structural, value)` pair that fully determines a generated input.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SplitParameterSequence {
    pub structural: ParameterSequence,
    pub value: ParameterSequence,
}

impl SplitParameterSequence {
    pub fn new(structural: Vec<u8>, value: Vec<u8>) -> Self {
        Self {
            structural: ParameterSequence::new(structural),
            value: ParameterSequence::new(value),
        }
    }

    pub fn get(&self, kind: ChoiceKind) -> &ParameterSequence {
        match kind {
            ChoiceKind::Structural => &self.structural,
            ChoiceKind::Value => &self.value,
        }
    }

    pub fn get_mut(&mut self, kind: ChoiceKind) -> &mut ParameterSequence {
        match kind {
            ChoiceKind::Structural => &mut self.structural,
            ChoiceKind::Value => &mut self.value,
        }
    }

    pub fn reset(&mut self) {
        self.structural.reset();
        self.value.reset();
    }

    /// Both streams truncated to what has been read so far, cursors rewound.
    pub fn consumed_prefix(&self) -> SplitParameterSequence {
        SplitParameterSequence::new(
            self.structural.consumed().to_vec(),
            self.value.consumed().to_vec(),
        )
    }
}

/// 128-bit digest of the structural octets consumed by one generator run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructuralSignature(pub u128);

impl StructuralSignature {
    pub fn of(structural_bytes: &[u8]) -> Self {
        Self(xxh3_128_with_seed(structural_bytes, SIGNATURE_SEED))
    }
}

impl fmt::Display for StructuralSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

/// Typed choice API consumed by generators.
///
/// In recording mode a stream that runs dry is extended with fresh octets
/// from a per-kind seeded RNG, so any (possibly mutated or truncated)
/// parameter pair completes a generation. In strict mode running dry is an
/// error.
#[derive(Debug, Clone)]
pub struct ChoiceSource {
    params: SplitParameterSequence,
    extension: Option<[ChaCha8Rng; 2]>,
}

impl ChoiceSource {
    pub fn recording(params: SplitParameterSequence, seed: u64) -> Self {
        let structural = ChaCha8Rng::seed_from_u64(seed);
        let mut value = ChaCha8Rng::seed_from_u64(seed);
        // Independent streams so structural extension never depends on how
        // many value octets were synthesized.
        value.set_stream(1);
        Self {
            params,
            extension: Some([structural, value]),
        }
    }

    pub fn strict(params: SplitParameterSequence) -> Self {
        Self {
            params,
            extension: None,
        }
    }

    pub fn is_strict(&self) -> bool {
        self.extension.is_none()
    }

    pub fn params(&self) -> &SplitParameterSequence {
        &self.params
    }

    pub fn into_params(self) -> SplitParameterSequence {
        self.params
    }

    pub fn reset(&mut self) {
        self.params.reset();
    }

    pub fn next_bytes(&mut self, kind: ChoiceKind, n: usize) -> Result<&[u8], ChoiceError> {
        let seq = self.params.get_mut(kind);
        let missing = (seq.cursor + n).saturating_sub(seq.bytes.len());
        if missing > 0 {
            let Some(rngs) = self.extension.as_mut() else {
                return Err(ChoiceError::SequenceExhausted { kind });
            };
            let start = seq.bytes.len();
            seq.bytes.resize(start + missing, 0);
            rngs[kind.index()].fill_bytes(&mut seq.bytes[start..]);
        }
        Ok(seq.take(n).expect("sequence extended to cover request"))
    }

    /// Uniform-ish integer in `[lo, hi]`: four octets read as a little-endian
    /// `u32`, reduced modulo the domain size.
    pub fn choose_int(&mut self, kind: ChoiceKind, lo: i64, hi: i64) -> Result<i64, ChoiceError> {
        if lo > hi {
            return Err(ChoiceError::InvalidDomain {
                lo: lo.into(),
                hi: hi.into(),
            });
        }
        let raw = self.next_bytes(kind, INT_WIDTH)?;
        let raw = u32::from_le_bytes(raw.try_into().expect("INT_WIDTH octets"));
        let span = hi as i128 - lo as i128 + 1;
        Ok((lo as i128 + raw as i128 % span) as i64)
    }

    pub fn choose_bool(&mut self, kind: ChoiceKind) -> Result<bool, ChoiceError> {
        let raw = self.next_bytes(kind, BOOL_WIDTH)?;
        Ok(raw[0] & 1 == 1)
    }

    pub fn choose_index(&mut self, kind: ChoiceKind, len: usize) -> Result<usize, ChoiceError> {
        if len == 0 {
            return Err(ChoiceError::InvalidDomain { lo: 0, hi: -1 });
        }
        Ok(self.choose_int(kind, 0, len as i64 - 1)? as usize)
    }

    pub fn choose_from<'a, T>(&mut self, kind: ChoiceKind, domain: &'a [T]) -> Result<&'a T, ChoiceError> {
        let idx = self.choose_index(kind, domain.len())?;
        Ok(&domain[idx])
    }

    pub fn structural_signature(&self) -> StructuralSignature {
        StructuralSignature::of(self.params.structural.consumed())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ChoiceKind::*;

    fn strict(s: &[u8], v: &[u8]) -> ChoiceSource {
        ChoiceSource::strict(SplitParameterSequence::new(s.to_vec(), v.to_vec()))
    }

    #[test]
    fn next_bytes_consumes_selected_stream() {
        let mut src = strict(&[], &[0x03, 0xFF]);
        assert_eq!(src.next_bytes(Value, 1).unwrap(), &[0x03]);
        assert_eq!(src.params().value.cursor(), 1);
        assert_eq!(src.params().structural.cursor(), 0);
    }

    #[test]
    fn strict_empty_is_exhausted() {
        let mut src = strict(&[], &[]);
        assert_eq!(
            src.next_bytes(Structural, 1),
            Err(ChoiceError::SequenceExhausted { kind: Structural })
        );
        // failed read leaves the cursor alone
        assert_eq!(src.params().structural.cursor(), 0);
    }

    #[test]
    fn recording_extension_is_seeded() {
        let run = |seed| {
            let mut src = ChoiceSource::recording(SplitParameterSequence::default(), seed);
            src.next_bytes(Value, 8).unwrap().to_vec()
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }

    #[test]
    fn extension_streams_are_independent() {
        let mut a = ChoiceSource::recording(SplitParameterSequence::default(), 5);
        let mut b = ChoiceSource::recording(SplitParameterSequence::new(vec![], vec![1; 40]), 5);
        a.next_bytes(Value, 64).unwrap();
        let sa = a.next_bytes(Structural, 16).unwrap().to_vec();
        let sb = b.next_bytes(Structural, 16).unwrap().to_vec();
        assert_eq!(sa, sb);
    }

    #[test]
    fn partial_extension_keeps_existing_prefix() {
        let mut src = ChoiceSource::recording(SplitParameterSequence::new(vec![0xAA, 0xBB], vec![]), 1);
        let got = src.next_bytes(Structural, 4).unwrap().to_vec();
        assert_eq!(&got[..2], &[0xAA, 0xBB]);
        assert_eq!(src.params().structural.len(), 4);
    }

    #[test]
    fn choose_int_reduction() {
        assert_eq!(strict(&[], &[3, 0, 0, 0]).choose_int(Value, 0, 10).unwrap(), 3);
        assert_eq!(strict(&[], &[0x0C, 0, 0, 0]).choose_int(Value, 0, 10).unwrap(), 1);
        assert_eq!(strict(&[], &[0xDE, 0xAD, 0xBE, 0xEF]).choose_int(Value, 5, 5).unwrap(), 5);
        assert_eq!(
            strict(&[], &[0xFF; 4]).choose_int(Value, i64::MIN, i64::MAX).unwrap(),
            i64::MIN + u32::MAX as i64
        );
    }

    #[test]
    fn choose_int_rejects_inverted_domain() {
        assert_eq!(
            strict(&[], &[0; 4]).choose_int(Value, 2, 1),
            Err(ChoiceError::InvalidDomain { lo: 2, hi: 1 })
        );
    }

    #[test]
    fn choose_bool_reads_lsb() {
        // exhaustive over all octets
        for octet in 0..=255u8 {
            let got = strict(&[octet], &[]).choose_bool(Structural).unwrap();
            assert_eq!(got, octet % 2 == 1, "octet {octet:#04x}");
        }
        assert!(!strict(&[0xFE], &[]).choose_bool(Structural).unwrap());
    }

    #[test]
    fn choose_from_domains() {
        assert!(*strict(&[0, 0, 0, 0], &[]).choose_from(Structural, &[true, false]).unwrap());
        assert_eq!(*strict(&[9, 9, 9, 9], &[]).choose_from(Structural, &['A']).unwrap(), 'A');
        assert_eq!(*strict(&[4, 0, 0, 0], &[]).choose_from(Structural, &['A', 'B', 'C']).unwrap(), 'B');
        let empty: [u8; 0] = [];
        assert!(matches!(
            strict(&[0; 4], &[]).choose_from(Structural, &empty),
            Err(ChoiceError::InvalidDomain { .. })
        ));
    }

    #[test]
    fn signature_covers_consumed_prefix_only() {
        let mut a = strict(&[1, 2, 3, 4], &[]);
        let mut b = strict(&[1, 2, 9, 9, 9], &[]);
        a.next_bytes(Structural, 2).unwrap();
        b.next_bytes(Structural, 2).unwrap();
        assert_eq!(a.structural_signature(), b.structural_signature());
        a.next_bytes(Structural, 1).unwrap();
        b.next_bytes(Structural, 1).unwrap();
        assert_ne!(a.structural_signature(), b.structural_signature());
    }

    #[test]
    fn empty_signature_is_constant() {
        let a = strict(&[], &[]);
        let b = strict(&[7, 7], &[1]);
        assert_eq!(a.structural_signature(), b.structural_signature());
        assert_eq!(a.structural_signature(), StructuralSignature::of(&[]));
    }

    #[test]
    fn reset_replays() {
        let mut src = ChoiceSource::recording(SplitParameterSequence::default(), 3);
        let first = src.next_bytes(Value, 5).unwrap().to_vec();
        src.reset();
        assert_eq!(src.next_bytes(Value, 5).unwrap(), first.as_slice());

        let mut fresh = strict(&[1], &[2]);
        fresh.reset();
        assert_eq!(fresh.params(), &SplitParameterSequence::new(vec![1], vec![2]));
    }

    #[test]
    fn consumed_prefix_rewinds() {
        let mut src = strict(&[1, 2, 3], &[4, 5]);
        src.next_bytes(Structural, 2).unwrap();
        src.next_bytes(Value, 1).unwrap();
        let p = src.params().consumed_prefix();
        assert_eq!(p.structural.bytes(), &[1, 2]);
        assert_eq!(p.value.bytes(), &[4]);
        assert_eq!(p.structural.cursor(), 0);
    }
}
