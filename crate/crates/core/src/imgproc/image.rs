use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

/// Row-major grid of scalars with no range constraint (filter responses,
/// structure tensors, corner maps).
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> Raster<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ShapeError::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(ShapeError::InvalidImage(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(
            width > 0 && height > 0,
            "raster dimensions must be positive"
        );
        Self {
            width,
            height,
            data: vec![T::zero(); width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(
            width > 0 && height > 0,
            "raster dimensions must be positive"
        );
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
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[y * self.width + x] = v;
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(
            (self.width, self.height),
            (other.width, other.height),
            "raster dimensions differ"
        );
        Self {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_value(&self) -> T {
        self.data.iter().copied().fold(T::neg_infinity(), T::max)
    }
}

/// Gray intensity image with every sample finite and inside `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T>(Raster<T>);

impl<T: Scalar> Image<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if let Some(bad) = data
            .iter()
            .find(|v| !v.is_finite() || **v < T::zero() || **v > T::one())
        {
            return Err(ShapeError::InvalidImage(format!(
                "intensity {bad} outside [0, 1]"
            )));
        }
        Raster::new(width, height, data).map(Self)
    }

    /// Builds an image from a closure; values are clamped into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self(Raster::from_fn(width, height, |x, y| {
            let v = f(x, y);
            if v.is_nan() {
                T::zero()
            } else {
                v.max(T::zero()).min(T::one())
            }
        }))
    }

    pub fn from_u8(width: usize, height: usize, pixels: &[u8]) -> Result<Self> {
        let scale = T::lit(255.0);
        let data = pixels
            .iter()
            .map(|&p| T::from_u8(p).unwrap() / scale)
            .collect();
        Raster::new(width, height, data).map(Self)
    }

    pub fn raster(&self) -> &Raster<T> {
        &self.0
    }

    pub fn into_raster(self) -> Raster<T> {
        self.0
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.0.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.0.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.0.get(x, y)
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.0.data
    }
}

/// Foreground mask; `true` marks object pixels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    mask: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, mask: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || mask.len() != width * height {
            return Err(ShapeError::InvalidImage(format!(
                "mask of length {} does not fit {width}x{height}",
                mask.len()
            )));
        }
        Ok(Self {
            width,
            height,
            mask,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        Self {
            width,
            height,
            mask: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut out = Self::empty(width, height);
        for y in 0..height {
            for x in 0..width {
                out.mask[y * width + x] = f(x, y);
            }
        }
        out
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
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    /// Bounds-checked lookup; outside pixels are background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.mask[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.mask[y * self.width + x] = v;
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Foreground as 1, background as 0.
    pub fn to_image<T: Scalar>(&self) -> Image<T> {
        Image(Raster {
            width: self.width,
            height: self.height,
            data: self
                .mask
                .iter()
                .map(|&m| if m { T::one() } else { T::zero() })
                .collect(),
        })
    }

    /// Largest 8-connected foreground component (ties go to the component
    /// whose first pixel comes first in raster order).
    pub fn largest_component(&self) -> Option<BinaryImage> {
        let (w, h) = (self.width, self.height);
        let mut label = vec![0u32; w * h];
        let mut best: Option<(usize, u32)> = None;
        let mut next = 0u32;
        let mut stack = Vec::new();
        for start in 0..w * h {
            if !self.mask[start] || label[start] != 0 {
                continue;
            }
            next += 1;
            label[start] = next;
            stack.push(start);
            let mut size = 0usize;
            while let Some(i) = stack.pop() {
                size += 1;
                let (x, y) = ((i % w) as i64, (i / w) as i64);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if self.get_signed(nx, ny) {
                            let j = ny as usize * w + nx as usize;
                            if label[j] == 0 {
                                label[j] = next;
                                stack.push(j);
                            }
                        }
                    }
                }
            }
            if best.is_none_or(|(s, _)| size > s) {
                best = Some((size, next));
            }
        }
        best.map(|(_, id)| BinaryImage {
            width: w,
            height: h,
            mask: label.iter().map(|&l| l == id).collect(),
        })
    }
}
