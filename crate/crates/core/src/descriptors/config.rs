use crate::error::{Result, ShapeError};
use crate::imgproc::{CannyParams, HarrisParams, MIN_CORNERS};
use crate::scalar::Scalar;

use super::DescriptorKind;

/// Parameters of every extractor.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionConfig<T> {
    /// Radial and angular frequencies kept by GFD.
    pub gfd_radial: usize,
    pub gfd_angular: usize,
    /// Polar raster the region is sampled on for GFD.
    pub gfd_grid: (usize, usize),
    /// Scales `sigma0 * factor^i` for `i < levels`.
    pub msgbd_sigma0: T,
    pub msgbd_factor: T,
    pub msgbd_levels: usize,
    pub msgbd_directions: usize,
    pub msgbd_grid: (usize, usize),
    /// Radial and angular frequencies kept by MSGBD.
    pub msgbd_keep: (usize, usize),
    pub cbid_max_corners: usize,
    pub cbid_fds: usize,
    /// Harris corners farther than this (Chebyshev, pixels) from every
    /// Canny edge pixel are discarded.
    pub cbid_edge_distance: usize,
    pub efd_harmonics: usize,
    pub cbfd_samples: usize,
    pub cbfd_fds: usize,
    /// Half-width of the moving average applied to the traced boundary
    /// before arc-length sampling; 0 disables it.
    pub cbfd_smoothing: usize,
    pub canny: CannyParams<T>,
    pub harris: HarrisParams<T>,
}

impl<T: Scalar> Default for ExtractionConfig<T> {
    fn default() -> Self {
        Self {
            gfd_radial: 9,
            gfd_angular: 4,
            gfd_grid: (128, 256),
            msgbd_sigma0: T::lit(0.1),
            msgbd_factor: T::lit(1.4),
            msgbd_levels: 5,
            msgbd_directions: 10,
            msgbd_grid: (32, 36),
            msgbd_keep: (6, 6),
            cbid_max_corners: 40,
            cbid_fds: 10,
            cbid_edge_distance: 2,
            efd_harmonics: 9,
            cbfd_samples: 128,
            cbfd_fds: 36,
            cbfd_smoothing: 2,
            canny: CannyParams::default(),
            harris: HarrisParams::default(),
        }
    }
}

impl<T: Scalar> ExtractionConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("gfd_radial", self.gfd_radial),
            ("gfd_angular", self.gfd_angular),
            ("msgbd_levels", self.msgbd_levels),
            ("msgbd_keep radial", self.msgbd_keep.0),
            ("msgbd_keep angular", self.msgbd_keep.1),
            ("cbid_fds", self.cbid_fds),
            ("efd_harmonics", self.efd_harmonics),
            ("cbfd_fds", self.cbfd_fds),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(ShapeError::InvalidParams(format!(
                "{name} must be at least 1"
            )));
        }
        if !(self.msgbd_sigma0 > T::zero()) {
            return Err(ShapeError::InvalidScale(self.msgbd_sigma0.as_f64()));
        }
        if !(self.msgbd_factor > T::one()) {
            return Err(ShapeError::InvalidParams(format!(
                "msgbd_factor must exceed 1, got {}",
                self.msgbd_factor
            )));
        }
        if self.gfd_radial > self.gfd_grid.0 || self.gfd_angular > self.gfd_grid.1 {
            return Err(ShapeError::InvalidParams(
                "GFD keeps more frequencies than its grid holds".into(),
            ));
        }
        if self.msgbd_keep.0 > self.msgbd_grid.0 || self.msgbd_keep.1 > self.msgbd_grid.1 {
            return Err(ShapeError::InvalidParams(
                "MSGBD keeps more frequencies than its grid holds".into(),
            ));
        }
        if self.cbid_max_corners < MIN_CORNERS {
            return Err(ShapeError::InvalidParams(format!(
                "cbid_max_corners must be at least {MIN_CORNERS}"
            )));
        }
        if self.cbid_fds >= crate::geometry::INTERPOLATED_SAMPLES {
            return Err(ShapeError::InvalidParams(
                "cbid_fds exceeds the signature length".into(),
            ));
        }
        self.canny.validate()?;
        self.harris.validate()?;
        if self.cbfd_samples < 8 || self.cbfd_fds >= self.cbfd_samples {
            return Err(ShapeError::InvalidParams(
                "cbfd_samples must be at least 8 and exceed cbfd_fds".into(),
            ));
        }
        Ok(())
    }

    /// `sigma0 * factor^i` for `i < levels`.
    pub fn msgbd_scales(&self) -> Vec<T> {
        let mut s = self.msgbd_sigma0;
        (0..self.msgbd_levels)
            .map(|_| {
                let out = s;
                s *= self.msgbd_factor;
                out
            })
            .collect()
    }

    /// Length of the vectors the extractor for `kind` produces.
    pub fn dims(&self, kind: DescriptorKind) -> usize {
        match kind {
            DescriptorKind::Gfd => self.gfd_radial * self.gfd_angular,
            DescriptorKind::Msgbd => self.msgbd_keep.0 * self.msgbd_keep.1,
            DescriptorKind::Cbid => self.cbid_fds,
            DescriptorKind::Efd => 4 * self.efd_harmonics,
            DescriptorKind::Cbfd => self.cbfd_fds,
            DescriptorKind::Isd => {
                self.dims(DescriptorKind::Gfd) + self.dims(DescriptorKind::Msgbd)
            }
        }
    }
}

macro_rules! config_fields {
    ($m:ident) => {
        $m! {
            gfd_radial: count = gfd_radial,
            gfd_angular: count = gfd_angular,
            gfd_grid_radial: count = gfd_grid.0,
            gfd_grid_angular: count = gfd_grid.1,
            msgbd_sigma0: real = msgbd_sigma0,
            msgbd_factor: real = msgbd_factor,
            msgbd_levels: count = msgbd_levels,
            msgbd_directions: count = msgbd_directions,
            msgbd_grid_radial: count = msgbd_grid.0,
            msgbd_grid_angular: count = msgbd_grid.1,
            msgbd_keep_radial: count = msgbd_keep.0,
            msgbd_keep_angular: count = msgbd_keep.1,
            cbid_max_corners: count = cbid_max_corners,
            cbid_fds: count = cbid_fds,
            cbid_edge_distance: count = cbid_edge_distance,
            efd_harmonics: count = efd_harmonics,
            cbfd_samples: count = cbfd_samples,
            cbfd_fds: count = cbfd_fds,
            cbfd_smoothing: count = cbfd_smoothing,
            canny_sigma: real = canny.sigma,
            canny_low_ratio: real = canny.low_ratio,
            canny_high_quantile: real = canny.high_quantile,
            harris_k: real = harris.k,
            harris_window_sigma: real = harris.window_sigma,
            harris_deriv_sigma: real = harris.deriv_sigma,
            harris_rel_threshold: real = harris.rel_threshold,
            harris_nms_radius: count = harris.nms_radius,
            harris_max_count: count = harris.max_count,
        }
    };
}

impl<T: Scalar> ExtractionConfig<T> {
    /// Every field as a `(name, value)` pair; reals use the shortest
    /// decimal form that parses back exactly.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        macro_rules! emit {
            ($($name:ident: $ty:ident = $($field:tt).+,)*) => {
                $(out.push((stringify!($name).to_string(), emit!(@fmt $ty self.$($field).+)));)*
            };
            (@fmt count $v:expr) => { $v.to_string() };
            (@fmt real $v:expr) => { format!("{:e}", $v.as_f64()) };
        }
        config_fields!(emit);
        out
    }

    /// Inverse of [`to_pairs`](Self::to_pairs); absent fields keep their
    /// defaults, unknown names are rejected, and the result is validated.
    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, v) in pairs {
            let (k, v) = (k.as_ref(), v.as_ref());
            let bad = || ShapeError::Parse(format!("config field {k} has bad value {v:?}"));
            macro_rules! assign {
                ($($name:ident: $ty:ident = $($field:tt).+,)*) => {
                    match k {
                        $(stringify!($name) => cfg.$($field).+ = assign!(@parse $ty v, bad),)*
                        _ => return Err(ShapeError::Parse(format!("unknown config field {k}"))),
                    }
                };
                (@parse count $v:expr, $bad:expr) => { $v.parse::<usize>().map_err(|_| $bad())? };
                (@parse real $v:expr, $bad:expr) => {
                    $v.parse::<f64>().ok().and_then(T::from_f64).ok_or_else($bad)?
                };
            }
            config_fields!(assign);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
