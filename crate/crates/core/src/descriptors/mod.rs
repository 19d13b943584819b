//! The six shape descriptors as fixed-length real vectors, their
//! city-block distance and a line-oriented record format.

mod config;
mod extract;
mod record;

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

pub use self::config::ExtractionConfig;
pub use self::extract::{
    cbid_from_corners, cbid_from_signature, extract, extract_cbfd, extract_cbid, extract_efd,
    extract_gfd, extract_isd, extract_msgbd, silhouette,
};
pub use self::record::{read_records, write_records, DescriptorRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DescriptorKind {
    Gfd,
    Msgbd,
    Cbid,
    Efd,
    Cbfd,
    Isd,
}

impl DescriptorKind {
    pub const ALL: [DescriptorKind; 6] = [
        DescriptorKind::Gfd,
        DescriptorKind::Msgbd,
        DescriptorKind::Cbid,
        DescriptorKind::Efd,
        DescriptorKind::Cbfd,
        DescriptorKind::Isd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DescriptorKind::Gfd => "GFD",
            DescriptorKind::Msgbd => "MSGBD",
            DescriptorKind::Cbid => "CBID",
            DescriptorKind::Efd => "EFD",
            DescriptorKind::Cbfd => "CBFD",
            DescriptorKind::Isd => "ISD",
        }
    }
}

impl fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DescriptorKind {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self> {
        DescriptorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ShapeError::Parse(format!("unknown descriptor kind {s:?}")))
    }
}

/// A descriptor vector tagged with the family that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor<T> {
    kind: DescriptorKind,
    values: Vec<T>,
}

impl<T: Scalar> Descriptor<T> {
    /// Fails when `values` is empty or holds a non-finite value.
    pub fn new(kind: DescriptorKind, values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(ShapeError::InvalidParams(format!(
                "{kind} descriptor is empty"
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(ShapeError::InvalidParams(format!(
                "{kind} descriptor holds {v}"
            )));
        }
        Ok(Self { kind, values })
    }

    pub fn kind(&self) -> DescriptorKind {
        self.kind
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn dims(&self) -> usize {
        self.values.len()
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

/// Weights of the GFD and MSGBD blocks inside an ISD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsdWeights<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Scalar> IsdWeights<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha >= T::zero() && beta >= T::zero() && alpha + beta > T::zero())
            || !(alpha + beta).is_finite()
        {
            return Err(ShapeError::InvalidParams(format!(
                "ISD weights must be non-negative with a positive sum, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }
}

impl<T: Scalar> Default for IsdWeights<T> {
    fn default() -> Self {
        Self {
            alpha: T::one(),
            beta: T::one(),
        }
    }
}

/// `[alpha * gfd, beta * msgbd]`.
pub fn combine_isd<T: Scalar>(
    gfd: &Descriptor<T>,
    msgbd: &Descriptor<T>,
    w: IsdWeights<T>,
) -> Result<Descriptor<T>> {
    expect_kind(gfd, DescriptorKind::Gfd)?;
    expect_kind(msgbd, DescriptorKind::Msgbd)?;
    let values = gfd
        .values
        .iter()
        .map(|&v| w.alpha * v)
        .chain(msgbd.values.iter().map(|&v| w.beta * v))
        .collect();
    Descriptor::new(DescriptorKind::Isd, values)
}

/// `sum |a_i - b_i|`.
pub fn cityblock<T: Scalar>(a: &Descriptor<T>, b: &Descriptor<T>) -> Result<T> {
    expect_kind(b, a.kind)?;
    cityblock_slices(&a.values, &b.values)
}

pub fn cityblock_slices<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(ShapeError::DimMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum())
}

fn expect_kind<T>(d: &Descriptor<T>, kind: DescriptorKind) -> Result<()> {
    if d.kind != kind {
        return Err(ShapeError::KindMismatch {
            expected: kind.name().into(),
            got: d.kind.name().into(),
        });
    }
    Ok(())
}
