//! Binary PNM interchange: P5 for gray, P6 for RGB, P4 or P5 for masks.

use std::io::Cursor;
use std::path::Path;

use image::codecs::pnm::{PnmDecoder, PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder};

use super::{BinaryImage, GrayImage, RgbImage};
use crate::error::{Error, Result};

fn format_err(e: image::ImageError) -> Error {
    Error::Format(e.to_string())
}

fn encode(data: &[u8], w: usize, h: usize, subtype: PnmSubtype, color: ExtendedColorType) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    PnmEncoder::new(&mut out)
        .with_subtype(subtype)
        .write_image(data, w as u32, h as u32, color)
        .map_err(format_err)?;
    Ok(out)
}

pub fn encode_gray(img: &GrayImage) -> Result<Vec<u8>> {
    encode(
        img.pixels(),
        img.width(),
        img.height(),
        PnmSubtype::Graymap(SampleEncoding::Binary),
        ExtendedColorType::L8,
    )
}

pub fn encode_rgb(img: &RgbImage) -> Result<Vec<u8>> {
    let flat: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    encode(
        &flat,
        img.width(),
        img.height(),
        PnmSubtype::Pixmap(SampleEncoding::Binary),
        ExtendedColorType::Rgb8,
    )
}

fn decode(bytes: &[u8]) -> Result<(DynamicImage, bool)> {
    let decoder = PnmDecoder::new(Cursor::new(bytes)).map_err(format_err)?;
    let bitmap = matches!(decoder.subtype(), PnmSubtype::Bitmap(_));
    let img = DynamicImage::from_decoder(decoder).map_err(format_err)?;
    Ok((img, bitmap))
}

pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage> {
    let (img, _) = decode(bytes)?;
    let luma = img.into_luma8();
    let (w, h) = luma.dimensions();
    GrayImage::from_vec(w as usize, h as usize, luma.into_raw())
}

pub fn decode_rgb(bytes: &[u8]) -> Result<RgbImage> {
    let (img, _) = decode(bytes)?;
    let rgb = img.into_rgb8();
    let (w, h) = rgb.dimensions();
    let data = rgb.into_raw().chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect();
    RgbImage::from_vec(w as usize, h as usize, data)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::io(path, e)
        }
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    decode_gray(&read_bytes(path.as_ref())?)
}

pub fn read_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    decode_rgb(&read_bytes(path.as_ref())?)
}

/// Reads a mask. In PBM the set bit (black) is foreground; in PGM any value
/// of 128 or more is foreground.
pub fn read_binary(path: impl AsRef<Path>) -> Result<BinaryImage> {
    let (img, bitmap) = decode(&read_bytes(path.as_ref())?)?;
    let luma = img.into_luma8();
    let (w, h) = luma.dimensions();
    let data = luma
        .into_raw()
        .into_iter()
        .map(|v| if bitmap { v == 0 } else { v >= 128 })
        .collect();
    BinaryImage::from_vec(w as usize, h as usize, data)
}

pub fn write_gray(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    write_bytes(path.as_ref(), &encode_gray(img)?)
}

pub fn write_rgb(path: impl AsRef<Path>, img: &RgbImage) -> Result<()> {
    write_bytes(path.as_ref(), &encode_rgb(img)?)
}

/// Writes a mask as PGM with foreground 255.
pub fn write_binary(path: impl AsRef<Path>, img: &BinaryImage) -> Result<()> {
    write_gray(path, &img.to_gray())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_roundtrip_is_p5() {
        let img = GrayImage::from_fn(5, 3, |x, y| (x * 50 + y) as u8);
        let bytes = encode_gray(&img).unwrap();
        assert!(bytes.starts_with(b"P5"));
        assert_eq!(decode_gray(&bytes).unwrap(), img);
    }

    #[test]
    fn rgb_roundtrip_is_p6() {
        let img = RgbImage::from_fn(4, 2, |x, y| [x as u8, y as u8, 200]);
        let bytes = encode_rgb(&img).unwrap();
        assert!(bytes.starts_with(b"P6"));
        assert_eq!(decode_rgb(&bytes).unwrap(), img);
    }

    #[test]
    fn hand_written_header_parses() {
        let mut bytes = b"P5\n# comment\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 10, 20, 255]);
        let img = decode_gray(&bytes).unwrap();
        assert_eq!(img.pixels(), &[0, 10, 20, 255]);
    }

    #[test]
    fn pbm_mask_foreground_is_set_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pbm");
        // 3x2, rows: 101 / 010
        let mut bytes = b"P4\n3 2\n".to_vec();
        bytes.extend_from_slice(&[0b1010_0000, 0b0100_0000]);
        std::fs::write(&path, bytes).unwrap();
        let m = read_binary(&path).unwrap();
        assert_eq!(m.pixels(), &[true, false, true, false, true, false]);
    }

    #[test]
    fn pgm_mask_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        let m = BinaryImage::from_fn(4, 4, |x, y| x == y);
        write_binary(&path, &m).unwrap();
        assert_eq!(read_binary(&path).unwrap(), m);
    }

    #[test]
    fn missing_file_names_path() {
        let err = read_gray("/nonexistent/dir/x.pgm").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/x.pgm"));
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(decode_gray(b"not an image").is_err());
    }
}
