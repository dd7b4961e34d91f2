use super::OpsError;

/// RGB raster with interleaved `f64` samples in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub const CHANNELS: usize = 3;

    pub fn new(width: usize, height: usize) -> Self {
        Image {
            width,
            height,
            data: vec![0.0; width * height * 3],
        }
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        let mut img = Image::new(width, height);
        for px in img.data.chunks_exact_mut(3) {
            px.copy_from_slice(&rgb);
        }
        img
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Image {
            width,
            height,
            data,
        }
    }

    /// Wrap raw samples; values are clamped to `[0, 1]` and must be finite.
    pub fn from_data(width: usize, height: usize, mut data: Vec<f64>) -> Result<Self, OpsError> {
        if data.len() != width * height * 3 {
            return Err(OpsError::ShapeMismatch {
                expected: (width, height),
                found: (data.len() / 3, 1),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(OpsError::NonFinite);
        }
        for v in &mut data {
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Image {
            width,
            height,
            data,
        })
    }

    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self, OpsError> {
        if bytes.len() != width * height * 3 {
            return Err(OpsError::ShapeMismatch {
                expected: (width, height),
                found: (bytes.len() / 3, 1),
            });
        }
        Ok(Image {
            width,
            height,
            data: bytes.iter().map(|&b| f64::from(b) / 255.0).collect(),
        })
    }

    /// Quantize to 8 bits per channel.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }

    /// Round-trip through 8-bit quantization.
    pub fn quantized(&self) -> Image {
        let bytes = self.to_rgb8();
        Image {
            width: self.width,
            height: self.height,
            data: bytes.iter().map(|&b| f64::from(b) / 255.0).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * 3 + c]
    }

    #[inline]
    pub(crate) fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        self.data[(y * self.width + x) * 3 + c] = v;
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Bilinear sample at continuous pixel coordinates (pixel centers at
    /// integers), clamping to the border.
    pub(crate) fn sample_bilinear(&self, x: f64, y: f64, c: usize) -> f64 {
        let xm = (self.width - 1) as f64;
        let ym = (self.height - 1) as f64;
        let x = if x.is_finite() { x.clamp(0.0, xm) } else { 0.0 };
        let y = if y.is_finite() { y.clamp(0.0, ym) } else { 0.0 };
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        if fx == 0.0 && fy == 0.0 {
            return self.get(x0, y0, c);
        }
        let a = self.get(x0, y0, c) * (1.0 - fx) + self.get(x1, y0, c) * fx;
        let b = self.get(x0, y1, c) * (1.0 - fx) + self.get(x1, y1, c) * fx;
        a * (1.0 - fy) + b * fy
    }

    pub(crate) fn clamp_in_place(&mut self) {
        for v in &mut self.data {
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        }
    }

    pub fn check_same_shape(&self, other: &Image) -> Result<(), OpsError> {
        if self.dims() != other.dims() {
            return Err(OpsError::ShapeMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }
}
