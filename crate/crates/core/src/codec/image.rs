//! RGB images as binary `P6` pixmaps and their gray-level coding.

use super::{encode, Color, FrequencyPlan, Symbol, ToneSet};
use crate::error::{Error, Result};

/// Number of gray levels per color channel is `MAX_LEVEL + 1`.
pub const MAX_LEVEL: u8 = 10;

/// Color drawn for pixels whose window failed to decode. 254 is not a
/// dequantized level value, so the sentinel never collides with real pixels.
pub const FAILURE_COLOR: [u8; 3] = [255, 0, 254];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    /// Row-major pixels.
    pub pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width.checked_mul(height) != Some(pixels.len()) {
            return Err(Error::MalformedImage(format!(
                "{}x{} image needs {} pixels, got {}",
                width,
                height,
                width.saturating_mul(height),
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn to_p6(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    pub fn from_p6(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::MalformedImage(msg.to_string());
        if bytes.len() < 2 || &bytes[..2] != b"P6" {
            return Err(bad("missing P6 magic"));
        }
        let mut pos = 2;
        let mut fields = [0usize; 3];
        for field in fields.iter_mut() {
            // whitespace and comments before each header field
            loop {
                match bytes.get(pos) {
                    Some(b) if b.is_ascii_whitespace() => pos += 1,
                    Some(b'#') => {
                        while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                            pos += 1;
                        }
                    }
                    _ => break,
                }
            }
            let start = pos;
            while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
                pos += 1;
            }
            if start == pos {
                return Err(bad("header field is not a number"));
            }
            *field = std::str::from_utf8(&bytes[start..pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("header field out of range"))?;
        }
        if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(bad("header must end with one whitespace byte"));
        }
        pos += 1;
        let [width, height, maxval] = fields;
        if maxval != 255 {
            return Err(bad("only 8-bit pixmaps (maxval 255) are supported"));
        }
        let count = width.checked_mul(height).ok_or_else(|| bad("image dimensions overflow"))?;
        let data = &bytes[pos..];
        if data.len() != count * 3 {
            return Err(Error::MalformedImage(format!("expected {} data bytes, found {}", count * 3, data.len())));
        }
        let pixels = data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Self::new(width, height, pixels)
    }
}

/// 8-bit value to gray level, `round(v · 10 / 255)`.
pub fn quantize(value: u8) -> u8 {
    ((value as u32 * 2 * MAX_LEVEL as u32 + 255) / 510) as u8
}

/// Gray level back to an 8-bit value, `round(level · 255 / 10)`.
pub fn dequantize(level: u8) -> u8 {
    ((level.min(MAX_LEVEL) as u32 * 510 + MAX_LEVEL as u32) / (2 * MAX_LEVEL as u32)) as u8
}

pub fn pixel_symbols(pixel: [u8; 3]) -> [Symbol; 3] {
    let mut out = [Symbol::Index(0); 3];
    for ((slot, color), v) in out.iter_mut().zip(Color::ALL).zip(pixel) {
        *slot = Symbol::Gray { color, level: quantize(v) };
    }
    out
}

/// Pixel value for decoded red / green / blue symbols.
pub fn symbols_pixel(symbols: &[Symbol]) -> Option<[u8; 3]> {
    let mut out = [0u8; 3];
    if symbols.len() != 3 {
        return None;
    }
    for ((slot, color), s) in out.iter_mut().zip(Color::ALL).zip(symbols) {
        match s {
            Symbol::Gray { color: c, level } if *c == color => *slot = dequantize(*level),
            _ => return None,
        }
    }
    Some(out)
}

/// One three-tone set per pixel, row-major.
pub fn encode_image(image: &RgbImage, plan: &FrequencyPlan) -> Result<Vec<ToneSet>> {
    let symbols: Vec<Symbol> = image.pixels.iter().flat_map(|&p| pixel_symbols(p)).collect();
    encode(&symbols, plan)
}
