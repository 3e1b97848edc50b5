//! Netpbm graymap reading (`P2`, `P5`) and writing (`P5`), 8-bit only.

use std::fs;
use std::path::Path;

use super::DatasetError;
use crate::dwt::Image;

fn malformed(msg: impl Into<String>) -> DatasetError {
    DatasetError::MalformedPgm(msg.into())
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    /// Skips whitespace and `#` comments.
    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, DatasetError> {
        self.skip_blank();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(malformed(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(format!("{what} out of range")))
    }
}

/// Parses an in-memory PGM. Sample values are kept as-is (no rescaling by maxval).
pub fn parse_pgm(bytes: &[u8]) -> Result<Image, DatasetError> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(malformed("bad magic number (expected P2 or P5)")),
    };
    let mut header = Header { bytes, pos: 2 };
    if !header
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(malformed("bad magic number (expected P2 or P5)"));
    }
    let width = header.number("width")?;
    let height = header.number("height")?;
    let maxval = header.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(malformed(format!("zero dimension {width}x{height}")));
    }
    if maxval == 0 || maxval > 255 {
        return Err(malformed(format!("maxval {maxval} not in 1..=255")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| malformed("dimensions overflow"))?;

    let mut pixels = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        if !bytes.get(header.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(malformed("missing whitespace after maxval"));
        }
        let start = header.pos + 1;
        let raster = bytes
            .get(start..start + count)
            .ok_or_else(|| malformed(format!("truncated raster: expected {count} bytes")))?;
        for &b in raster {
            if b as usize > maxval {
                return Err(malformed(format!("sample {b} exceeds maxval {maxval}")));
            }
            pixels.push(f64::from(b));
        }
    } else {
        for i in 0..count {
            let v = header
                .number("sample")
                .map_err(|_| malformed(format!("truncated raster: found {i} of {count} samples")))?;
            if v > maxval {
                return Err(malformed(format!("sample {v} exceeds maxval {maxval}")));
            }
            pixels.push(v as f64);
        }
    }
    Image::new(height, width, pixels).map_err(|e| malformed(e.to_string()))
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image, DatasetError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| DatasetError::io(path, e))?;
    parse_pgm(&bytes).map_err(|e| match e {
        DatasetError::MalformedPgm(msg) => DatasetError::MalformedPgm(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Encodes as binary `P5` with maxval 255. Values are rounded to the nearest
/// integer and must land in `0..=255`.
pub fn encode_pgm(image: &Image) -> Result<Vec<u8>, DatasetError> {
    let header = format!("P5\n{} {}\n255\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.len());
    out.extend_from_slice(header.as_bytes());
    for (index, &value) in image.pixels().iter().enumerate() {
        let rounded = value.round();
        if !(0.0..=255.0).contains(&rounded) {
            return Err(DatasetError::OutOfRange { index, value });
        }
        out.push(rounded as u8);
    }
    Ok(out)
}

pub fn write_pgm(image: &Image, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let bytes = encode_pgm(image)?;
    fs::write(path, bytes).map_err(|e| DatasetError::io(path, e))
}
