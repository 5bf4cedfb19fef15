//! Binary PPM (P6) read/write and PNG read.
//!
//! 8-bit samples map to `v / 255`; writing rounds to the nearest level, so
//! an 8-bit raster survives a read/write cycle bit-exactly.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::image::{ColorSpace, Image, Plane};
use crate::error::{Error, Result};

fn to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Encode a 3-plane image as P6 with maxval 255.
pub fn encode_ppm(img: &Image) -> Result<Vec<u8>> {
    if img.planes().len() != 3 {
        return Err(Error::invalid("PPM output needs a 3-plane image"));
    }
    let (w, h) = (img.width(), img.height());
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h * 3);
    let (r, g, b) = (
        img.plane(0).data(),
        img.plane(1).data(),
        img.plane(2).data(),
    );
    for i in 0..w * h {
        out.extend([to_u8(r[i]), to_u8(g[i]), to_u8(b[i])]);
    }
    Ok(out)
}

pub fn write_ppm(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_ppm(img)?).map_err(|e| Error::io(path, e))
}

fn header_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::invalid("truncated PPM header"));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

/// Decode a binary P6 raster into an sRGB image.
pub fn decode_ppm(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0;
    if header_token(bytes, &mut pos)? != "P6" {
        return Err(Error::invalid("not a binary PPM (P6) file"));
    }
    let mut num = |name: &str| -> Result<usize> {
        header_token(bytes, &mut pos)?
            .parse()
            .map_err(|_| Error::invalid(format!("bad PPM {name}")))
    };
    let (w, h, maxval) = (num("width")?, num("height")?, num("maxval")?);
    if maxval == 0 || maxval > 255 {
        return Err(Error::invalid(format!("unsupported PPM maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let n = w * h;
    let raster = bytes
        .get(pos..pos + 3 * n)
        .ok_or_else(|| Error::invalid("truncated PPM raster"))?;
    let scale = maxval as f64;
    let planes = (0..3)
        .map(|c| {
            Plane::new(
                w,
                h,
                (0..n).map(|i| raster[3 * i + c] as f64 / scale).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Image::new(ColorSpace::Srgb, planes)
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    decode_ppm(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

/// Decode an 8- or 16-bit PNG (gray, gray+alpha, RGB or RGBA) into sRGB.
/// Alpha is ignored.
pub fn decode_png(reader: impl BufRead + std::io::Seek) -> Result<Image> {
    let mut decoder = png::Decoder::new(reader);
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::invalid(format!("PNG: {e}")))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::invalid("PNG too large"))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::invalid(format!("PNG: {e}")))?;
    let (w, h) = (info.width as usize, info.height as usize);
    let channels = info.color_type.samples();
    let sixteen = info.bit_depth == png::BitDepth::Sixteen;
    let sample = |i: usize| -> f64 {
        if sixteen {
            u16::from_be_bytes([buf[2 * i], buf[2 * i + 1]]) as f64 / 65535.0
        } else {
            buf[i] as f64 / 255.0
        }
    };
    let n = w * h;
    let planes = (0..3)
        .map(|c| {
            let src_c = if channels < 3 { 0 } else { c };
            Plane::new(w, h, (0..n).map(|i| sample(i * channels + src_c)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Image::new(ColorSpace::Srgb, planes)
}

/// Read a PPM or PNG, dispatching on the file's magic bytes.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"\x89PNG") {
        decode_png(std::io::Cursor::new(bytes))
    } else {
        decode_ppm(&bytes)
    }
    .map_err(|e| match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Read a PNG file.
pub fn read_png(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    decode_png(BufReader::new(file))
}
