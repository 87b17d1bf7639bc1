//! Image containers and the conversions shared by both passes.
//!
//! All containers are row-major and at least 1x1. Coordinates are `(x, y)`
//! with `y` growing downwards.

mod pnm;
mod threshold;
mod transform;

pub use pnm::{
    read_binary, read_gray, read_rgb, write_binary, write_gray, write_rgb, decode_gray,
    decode_rgb, encode_gray, encode_rgb,
};
pub use threshold::{binarize, otsu_level};
pub use transform::{resize, rotate};

use crate::error::{Error, Result};

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!(
            "image dimensions must be >= 1, got {width}x{height}"
        )));
    }
    if width * height != len {
        return Err(Error::InvalidArgument(format!(
            "{width}x{height} image needs {} pixels, got {len}",
            width * height
        )));
    }
    Ok(())
}

macro_rules! grid_common {
    ($ty:ident, $px:ty) => {
        impl $ty {
            /// Creates a `width` x `height` image filled with `value`.
            ///
            /// Panics if either dimension is zero.
            pub fn new(width: usize, height: usize, value: $px) -> Self {
                assert!(width > 0 && height > 0, "image dimensions must be >= 1");
                Self {
                    width,
                    height,
                    data: vec![value; width * height],
                }
            }

            pub fn from_vec(width: usize, height: usize, data: Vec<$px>) -> Result<Self> {
                check_dims(width, height, data.len())?;
                Ok(Self {
                    width,
                    height,
                    data,
                })
            }

            pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> $px) -> Self {
                assert!(width > 0 && height > 0, "image dimensions must be >= 1");
                let mut data = Vec::with_capacity(width * height);
                for y in 0..height {
                    for x in 0..width {
                        data.push(f(x, y));
                    }
                }
                Self {
                    width,
                    height,
                    data,
                }
            }

            #[inline]
            pub fn width(&self) -> usize {
                self.width
            }

            #[inline]
            pub fn height(&self) -> usize {
                self.height
            }

            #[inline]
            pub fn dimensions(&self) -> (usize, usize) {
                (self.width, self.height)
            }

            #[inline]
            pub fn get(&self, x: usize, y: usize) -> $px {
                self.data[y * self.width + x]
            }

            #[inline]
            pub fn set(&mut self, x: usize, y: usize, value: $px) {
                self.data[y * self.width + x] = value;
            }

            pub fn pixels(&self) -> &[$px] {
                &self.data
            }

            pub fn pixels_mut(&mut self) -> &mut [$px] {
                &mut self.data
            }

            pub fn into_vec(self) -> Vec<$px> {
                self.data
            }

            /// Copies the `w` x `h` window whose top-left corner is `(x, y)`.
            pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> Result<Self> {
                if w == 0 || h == 0 || x + w > self.width || y + h > self.height {
                    return Err(Error::InvalidArgument(format!(
                        "crop {w}x{h}+{x}+{y} outside {}x{} image",
                        self.width, self.height
                    )));
                }
                Ok(Self::from_fn(w, h, |cx, cy| self.get(x + cx, y + cy)))
            }

            /// Rotates by exactly 180 degrees (no resampling).
            pub fn rotate180(&self) -> Self {
                let mut data = self.data.clone();
                data.reverse();
                Self {
                    width: self.width,
                    height: self.height,
                    data,
                }
            }
        }
    };
}

/// 8-bit single-channel intensity image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

/// 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<[u8; 3]>,
}

/// Boolean mask, `true` = foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

/// Real-valued matrix, used as the input/output of convolution and correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

grid_common!(GrayImage, u8);
grid_common!(RgbImage, [u8; 3]);
grid_common!(BinaryImage, bool);
grid_common!(FloatImage, f64);

impl GrayImage {
    /// Lifts intensities to reals without rescaling.
    pub fn to_float(&self) -> FloatImage {
        FloatImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn to_rgb(&self) -> RgbImage {
        RgbImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| [v, v, v]).collect(),
        }
    }
}

impl FloatImage {
    /// Rounds and clamps every value into `[0, 255]`.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| clamp_u8(v)).collect(),
        }
    }
}

impl BinaryImage {
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&v| v)
    }

    /// Foreground as 255, background as 0.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| if v { 255 } else { 0 }).collect(),
        }
    }

    /// Tight bounding box `(x, y, w, h)` of the foreground, if any.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut x0 = usize::MAX;
        let mut y0 = usize::MAX;
        let mut x1 = 0;
        let mut y1 = 0;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
            }
        }
        (x0 != usize::MAX).then(|| (x0, y0, x1 - x0 + 1, y1 - y0 + 1))
    }
}

#[inline]
pub(crate) fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// ITU-R BT.601 luma: `round(0.299 r + 0.587 g + 0.114 b)`.
pub fn to_grayscale(img: &RgbImage) -> GrayImage {
    GrayImage {
        width: img.width,
        height: img.height,
        data: img
            .data
            .iter()
            .map(|&[r, g, b]| clamp_u8(0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grayscale_reference_colors() {
        let img = RgbImage::from_vec(
            4,
            1,
            vec![[0, 0, 0], [255, 255, 255], [255, 0, 0], [0, 255, 0]],
        )
        .unwrap();
        let g = to_grayscale(&img);
        assert_eq!(g.dimensions(), (4, 1));
        assert_eq!(g.pixels(), &[0, 255, 76, 150]);
    }

    #[test]
    fn from_vec_rejects_bad_lengths() {
        assert!(GrayImage::from_vec(2, 2, vec![0; 3]).is_err());
        assert!(GrayImage::from_vec(0, 2, vec![]).is_err());
    }

    #[test]
    fn crop_and_rotate180() {
        let img = GrayImage::from_fn(3, 2, |x, y| (x + 3 * y) as u8);
        assert_eq!(img.crop(1, 0, 2, 2).unwrap().pixels(), &[1, 2, 4, 5]);
        assert!(img.crop(2, 0, 2, 1).is_err());
        assert_eq!(img.rotate180().pixels(), &[5, 4, 3, 2, 1, 0]);
        assert_eq!(img.rotate180().rotate180(), img);
    }

    #[test]
    fn bounding_box_of_mask() {
        let mut m = BinaryImage::new(5, 4, false);
        assert_eq!(m.bounding_box(), None);
        m.set(1, 2, true);
        m.set(3, 1, true);
        assert_eq!(m.bounding_box(), Some((1, 1, 3, 2)));
    }
}
