//! Binary parameter files used for queue and failure persistence.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "BDVF" | version: u16 | structural_len: u32 | value_len: u32 | structural | value
//! ```

use thiserror::Error;

use crate::choice_source::SplitParameterSequence;

pub const MAGIC: &[u8; 4] = b"BDVF";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 4 + 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsFileError {
    #[error("bad magic, expected \"BDVF\"")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated parameter file: need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("{0} trailing bytes after parameter payload")]
    TrailingBytes(usize),
    #[error("parameter sequence too long to encode ({0} bytes)")]
    TooLong(usize),
}

pub fn encode(params: &SplitParameterSequence) -> Result<Vec<u8>, ParamsFileError> {
    let s = params.structural.bytes();
    let v = params.value.bytes();
    let s_len = u32::try_from(s.len()).map_err(|_| ParamsFileError::TooLong(s.len()))?;
    let v_len = u32::try_from(v.len()).map_err(|_| ParamsFileError::TooLong(v.len()))?;
    let mut out = Vec::with_capacity(HEADER_LEN + s.len() + v.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&s_len.to_le_bytes());
    out.extend_from_slice(&v_len.to_le_bytes());
    out.extend_from_slice(s);
    out.extend_from_slice(v);
    Ok(out)
}

pub fn decode(data: &[u8]) -> Result<SplitParameterSequence, ParamsFileError> {
    if data.len() < 4 {
        return Err(ParamsFileError::Truncated {
            needed: HEADER_LEN,
            have: data.len(),
        });
    }
    if &data[..4] != MAGIC {
        return Err(ParamsFileError::BadMagic);
    }
    if data.len() < HEADER_LEN {
        return Err(ParamsFileError::Truncated {
            needed: HEADER_LEN,
            have: data.len(),
        });
    }
    let version = u16::from_le_bytes([data[4], data[5]]);
    if version != VERSION {
        return Err(ParamsFileError::UnsupportedVersion(version));
    }
    let s_len = u32::from_le_bytes(data[6..10].try_into().unwrap()) as usize;
    let v_len = u32::from_le_bytes(data[10..14].try_into().unwrap()) as usize;
    let needed = HEADER_LEN + s_len + v_len;
    if data.len() < needed {
        return Err(ParamsFileError::Truncated {
            needed,
            have: data.len(),
        });
    }
    if data.len() > needed {
        return Err(ParamsFileError::TrailingBytes(data.len() - needed));
    }
    let s = data[HEADER_LEN..HEADER_LEN + s_len].to_vec();
    let v = data[HEADER_LEN + s_len..needed].to_vec();
    Ok(SplitParameterSequence::new(s, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_layout() {
        let p = SplitParameterSequence::new(vec![0xAA, 0xBB], vec![0x01]);
        let bytes = encode(&p).unwrap();
        assert_eq!(
            bytes,
            vec![
                b'B', b'D', b'V', b'F', 0x01, 0x00, 0x02, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0xAA,
                0xBB, 0x01
            ]
        );
    }

    #[test]
    fn rejects_damage() {
        let bytes = encode(&SplitParameterSequence::new(vec![1, 2, 3], vec![4])).unwrap();
        assert!(matches!(decode(&bytes[..bytes.len() - 1]), Err(ParamsFileError::Truncated { .. })));
        assert!(matches!(decode(&bytes[..3]), Err(ParamsFileError::Truncated { .. })));
        let mut extra = bytes.clone();
        extra.push(0);
        assert_eq!(decode(&extra), Err(ParamsFileError::TrailingBytes(1)));
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert_eq!(decode(&magic), Err(ParamsFileError::BadMagic));
        let mut ver = bytes;
        ver[4] = 9;
        assert_eq!(decode(&ver), Err(ParamsFileError::UnsupportedVersion(9)));
    }

    proptest! {
        #[test]
        fn round_trip(s in proptest::collection::vec(any::<u8>(), 0..300),
                      v in proptest::collection::vec(any::<u8>(), 0..300)) {
            let p = SplitParameterSequence::new(s, v);
            let bytes = encode(&p).unwrap();
            prop_assert_eq!(decode(&bytes).unwrap(), p);
        }
    }
}
