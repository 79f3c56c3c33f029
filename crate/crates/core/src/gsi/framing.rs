//! Length-prefixed framing: a 4-byte big-endian payload length followed by
//! the payload bytes.

use std::io::{self, Read, Write};

use thiserror::Error;

pub const HEADER_LEN: usize = 4;
pub const DEFAULT_MAX_FRAME: usize = 16 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("frame of {size} bytes exceeds limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("connection closed mid-frame ({received} of {expected} bytes)")]
    ClosedMidFrame { received: usize, expected: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn frame(payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.extend_from_slice(payload);
    out
}

pub fn write_frame<W: Write>(w: &mut W, payload: &[u8]) -> io::Result<()> {
    w.write_all(&frame(payload))?;
    w.flush()
}

/// Blocking read of one frame. `Ok(None)` on a clean close between frames.
pub fn read_frame<R: Read>(r: &mut R, limit: usize) -> Result<Option<Vec<u8>>, FrameError> {
    let mut header = [0u8; HEADER_LEN];
    let got = read_up_to(r, &mut header)?;
    if got == 0 {
        return Ok(None);
    }
    if got < HEADER_LEN {
        return Err(FrameError::ClosedMidFrame {
            received: got,
            expected: HEADER_LEN,
        });
    }
    let len = u32::from_be_bytes(header) as usize;
    if len > limit {
        return Err(FrameError::TooLarge { size: len, limit });
    }
    let mut body = vec![0u8; len];
    let got = read_up_to(r, &mut body)?;
    if got < len {
        return Err(FrameError::ClosedMidFrame {
            received: HEADER_LEN + got,
            expected: HEADER_LEN + len,
        });
    }
    Ok(Some(body))
}

fn read_up_to<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

/// Incremental decoder for bytes arriving in arbitrary chunks.
#[derive(Debug)]
pub struct FrameDecoder {
    buf: Vec<u8>,
    limit: usize,
}

impl Default for FrameDecoder {
    fn default() -> Self {
        FrameDecoder::new(DEFAULT_MAX_FRAME)
    }
}

impl FrameDecoder {
    pub fn new(limit: usize) -> Self {
        FrameDecoder { buf: Vec::new(), limit }
    }

    /// Buffers `bytes` and returns every frame completed by them.
    pub fn push(&mut self, bytes: &[u8]) -> Result<Vec<Vec<u8>>, FrameError> {
        self.buf.extend_from_slice(bytes);
        let mut out = Vec::new();
        loop {
            if self.buf.len() < HEADER_LEN {
                break;
            }
            let len = u32::from_be_bytes(self.buf[..HEADER_LEN].try_into().unwrap()) as usize;
            if len > self.limit {
                return Err(FrameError::TooLarge {
                    size: len,
                    limit: self.limit,
                });
            }
            if self.buf.len() < HEADER_LEN + len {
                break;
            }
            out.push(self.buf[HEADER_LEN..HEADER_LEN + len].to_vec());
            self.buf.drain(..HEADER_LEN + len);
        }
        Ok(out)
    }

    pub fn pending(&self) -> usize {
        self.buf.len()
    }

    /// Call at end of stream; errors if a partial frame is still buffered.
    pub fn finish(&self) -> Result<(), FrameError> {
        if self.buf.is_empty() {
            return Ok(());
        }
        let expected = if self.buf.len() >= HEADER_LEN {
            HEADER_LEN + u32::from_be_bytes(self.buf[..HEADER_LEN].try_into().unwrap()) as usize
        } else {
            HEADER_LEN
        };
        Err(FrameError::ClosedMidFrame {
            received: self.buf.len(),
            expected,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_payload() {
        let f = frame(b"");
        assert_eq!(f, vec![0, 0, 0, 0]);
        let mut d = FrameDecoder::default();
        assert_eq!(d.push(&f).unwrap(), vec![Vec::<u8>::new()]);
    }

    #[test]
    fn two_frames_in_one_read() {
        let bytes = [0, 0, 0, 2, b'h', b'i', 0, 0, 0, 3, b'y', b'o', b'u'];
        let mut d = FrameDecoder::default();
        assert_eq!(d.push(&bytes).unwrap(), vec![b"hi".to_vec(), b"you".to_vec()]);
        assert_eq!(d.pending(), 0);
    }

    #[test]
    fn frame_split_across_three_reads() {
        let bytes = [0, 0, 0, 5, b'h', b'e', b'l', b'l', b'o'];
        let mut d = FrameDecoder::default();
        assert!(d.push(&bytes[..2]).unwrap().is_empty());
        assert!(d.push(&bytes[2..6]).unwrap().is_empty());
        assert_eq!(d.push(&bytes[6..]).unwrap(), vec![b"hello".to_vec()]);
    }

    #[test]
    fn oversize_frame_rejected() {
        let mut d = FrameDecoder::new(4);
        assert!(matches!(
            d.push(&[0, 0, 0, 5]),
            Err(FrameError::TooLarge { size: 5, limit: 4 })
        ));
        let mut r: &[u8] = &[0, 0, 1, 0];
        assert!(matches!(read_frame(&mut r, 16), Err(FrameError::TooLarge { .. })));
    }

    #[test]
    fn closed_mid_frame() {
        let mut r: &[u8] = &[0, 0, 0, 5, b'a'];
        assert!(matches!(
            read_frame(&mut r, 64),
            Err(FrameError::ClosedMidFrame { received: 5, expected: 9 })
        ));
        let mut r: &[u8] = &[0, 0];
        assert!(matches!(read_frame(&mut r, 64), Err(FrameError::ClosedMidFrame { .. })));
        let mut r: &[u8] = &[];
        assert!(read_frame(&mut r, 64).unwrap().is_none());

        let mut d = FrameDecoder::default();
        d.push(&[0, 0, 0, 3, 1]).unwrap();
        assert!(d.finish().is_err());
    }

    proptest! {
        #[test]
        fn any_partition_yields_same_messages(
            msgs in prop::collection::vec(prop::collection::vec(any::<u8>(), 0..40), 0..6),
            cuts in prop::collection::vec(0usize..300, 0..10),
        ) {
            let stream: Vec<u8> = msgs.iter().flat_map(|m| frame(m)).collect();
            let mut points: Vec<usize> = cuts.into_iter().map(|c| c.min(stream.len())).collect();
            points.push(0);
            points.push(stream.len());
            points.sort_unstable();
            let mut d = FrameDecoder::default();
            let mut got = Vec::new();
            for w in points.windows(2) {
                got.extend(d.push(&stream[w[0]..w[1]]).unwrap());
            }
            prop_assert_eq!(got, msgs.clone());
            d.finish().unwrap();

            let mut r: &[u8] = &stream;
            let mut blocking = Vec::new();
            while let Some(m) = read_frame(&mut r, DEFAULT_MAX_FRAME).unwrap() {
                blocking.push(m);
            }
            prop_assert_eq!(blocking, msgs);
        }
    }
}
