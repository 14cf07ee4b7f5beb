//! Concatenation of a folded graph code with a GRS inner code, decoded by
//! generalized minimum distance (GMD) decoding.
//!
//! Each outer `Φ`-symbol is written as a message of the inner code (a change
//! of radix when the fields differ) and encoded into one row. Decoding
//! first decodes every row with the inner bounded-distance decoder and
//! records the distance from the received row to the decoded codeword as
//! its unreliability. It then climbs a ladder of erasure thresholds: the
//! `j`-th attempt (`j = 0, 2, 4, …`) erases every row that failed or whose
//! distance `w` satisfies `2w ≥ d − j` and runs the outer error-erasure
//! decoder. Together the attempts visit every distinct threshold on `w`, so
//! the classical GMD argument applies. A candidate is accepted only if it
//! re-encodes to within the guaranteed radius of the received matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::PrimeField;
use crate::grs::GrsCode;
use crate::iterdec::{decode_phi, DecodeParams};
use crate::tanner::{PhiWord, TannerCode, TannerError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GmdError {
    #[error("inner code cannot carry the outer symbols: {0}")]
    Capacity(String),
    #[error("received matrix has the wrong shape")]
    Shape,
    #[error(transparent)]
    Tanner(#[from] TannerError),
}

/// Little-endian base-`from` digits to little-endian base-`to` digits.
fn convert_radix(digits: &[u32], from: u32, to: u32) -> Vec<u32> {
    // most significant first for long division
    let mut num: Vec<u32> = digits.iter().rev().copied().collect();
    let mut out = Vec::new();
    while num.iter().any(|&d| d != 0) {
        let mut rem = 0u64;
        for d in num.iter_mut() {
            let cur = rem * from as u64 + *d as u64;
            *d = (cur / to as u64) as u32;
            rem = cur % to as u64;
        }
        out.push(rem as u32);
        while num.first() == Some(&0) {
            num.remove(0);
        }
    }
    out
}

/// Injective map `F_q^width → F_p^digits` by change of radix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolMap {
    pub q: u32,
    pub width: usize,
    pub p: u32,
    pub digits: usize,
}

impl SymbolMap {
    pub fn new(q: u32, width: usize, p: u32, digits: usize) -> Result<Self, GmdError> {
        let largest = convert_radix(&vec![q - 1; width], q, p);
        if largest.len() > digits {
            return Err(GmdError::Capacity(format!(
                "{q}^{width} symbols need {} digits over GF({p}), inner dimension is {digits}",
                largest.len()
            )));
        }
        Ok(SymbolMap { q, width, p, digits })
    }

    pub fn to_inner(&self, sym: &[u32]) -> Vec<u32> {
        let mut out = if self.p == self.q {
            sym.to_vec()
        } else {
            convert_radix(sym, self.q, self.p)
        };
        out.resize(self.digits, 0);
        out
    }

    /// `None` when `msg` is not the image of a symbol.
    pub fn from_inner(&self, msg: &[u32]) -> Option<Vec<u32>> {
        let mut out = if self.p == self.q {
            msg.to_vec()
        } else {
            convert_radix(msg, self.p, self.q)
        };
        if out.len() > self.width && out[self.width..].iter().any(|&d| d != 0) {
            return None;
        }
        out.resize(self.width, 0);
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcatCode {
    pub outer: TannerCode,
    pub outer_params: DecodeParams,
    pub inner: GrsCode,
    pub map: SymbolMap,
}

impl ConcatCode {
    pub fn new(outer: TannerCode, outer_params: DecodeParams, inner: GrsCode) -> Result<Self, GmdError> {
        let map = SymbolMap::new(
            outer.field().modulus(),
            outer.phi_width(),
            inner.field().modulus(),
            inner.dim(),
        )?;
        Ok(ConcatCode {
            outer,
            outer_params,
            inner,
            map,
        })
    }

    pub fn inner_field(&self) -> PrimeField {
        self.inner.field()
    }

    /// `D` such that the outer decoder corrects whenever `2t + ρ < D`.
    pub fn outer_design_distance(&self) -> usize {
        if self.outer_params.guaranteed {
            (2.0 * self.outer_params.radius(self.outer.n())).floor() as usize + 1
        } else {
            1
        }
    }

    /// Inner symbol errors below `d_in · D / 2` are always corrected.
    pub fn product_radius(&self) -> f64 {
        (self.inner.min_distance() * self.outer_design_distance()) as f64 / 2.0
    }

    /// Number of outer decoder calls one decode may make.
    pub fn ladder_len(&self) -> usize {
        self.inner.min_distance().div_ceil(2)
    }

    pub fn encode_phi(&self, phi: &PhiWord) -> Result<Vec<Vec<u32>>, GmdError> {
        phi.entries
            .iter()
            .map(|e| {
                let sym = e.as_ref().ok_or(TannerError::Erased)?;
                Ok(self
                    .inner
                    .encode_systematic(&self.map.to_inner(sym))
                    .expect("map output has the inner dimension"))
            })
            .collect()
    }
}

/// Outer-encodes `msg` and inner-encodes each symbol: one row per `V'`
/// vertex, inner length columns.
pub fn concat_encode(code: &ConcatCode, msg: &[u32]) -> Result<Vec<Vec<u32>>, GmdError> {
    let c = code.outer.encode_generic(msg)?;
    code.encode_phi(&code.outer.psi(&c)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmdAttempt {
    pub erasures: usize,
    pub outer_success: bool,
    pub component_calls: usize,
    pub validated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmdTrace {
    /// Distance from each received row to its inner decoding; failed rows
    /// get the inner minimum distance.
    pub reliabilities: Vec<usize>,
    pub attempts: Vec<GmdAttempt>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmdResult {
    pub phi: Option<PhiWord>,
    pub message: Option<Vec<u32>>,
    /// Entry distance between the accepted re-encoding and the received
    /// matrix.
    pub distance: Option<usize>,
    pub trace: GmdTrace,
}

impl GmdResult {
    pub fn outer_calls(&self) -> usize {
        self.trace.attempts.len()
    }
}

fn matrix_distance(a: &[Vec<u32>], b: &[Vec<u32>]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).filter(|(p, q)| p != q).count())
        .sum()
}

pub fn gmd_decode(code: &ConcatCode, received: &[Vec<u32>]) -> Result<GmdResult, GmdError> {
    let n = code.outer.n();
    let len = code.inner.length();
    if received.len() != n || received.iter().any(|r| r.len() != len) {
        return Err(GmdError::Shape);
    }
    let d = code.inner.min_distance();
    let rows: Vec<(Option<Vec<u32>>, usize)> = received
        .par_iter()
        .map(|row| match code.inner.decode_errors_only(row) {
            Ok(c) => match code.map.from_inner(code.inner.systematic_part(&c)) {
                Some(sym) => {
                    let w = row.iter().zip(&c).filter(|(a, b)| a != b).count();
                    (Some(sym), w)
                }
                None => (None, d),
            },
            Err(_) => (None, d),
        })
        .collect();
    let reliabilities: Vec<usize> = rows.iter().map(|r| r.1).collect();
    let radius = code.product_radius();
    let mut attempts = Vec::new();
    for j in (0..d).step_by(2) {
        let erase = |w: usize| 2 * w >= d - j;
        let y = PhiWord {
            entries: rows
                .iter()
                .map(|(sym, w)| if erase(*w) { None } else { sym.clone() })
                .collect(),
        };
        let erasures = y.erasures();
        let report = decode_phi(&code.outer, &y, &code.outer_params, None);
        let mut attempt = GmdAttempt {
            erasures,
            outer_success: report.is_success(),
            component_calls: report.component_calls,
            validated: false,
        };
        if let Some(phi) = report.result {
            let reencoded = code.encode_phi(&phi)?;
            let dist = matrix_distance(&reencoded, received);
            if (dist as f64) < radius {
                attempt.validated = true;
                attempts.push(attempt);
                let message = code.outer.message_of(report.codeword.as_ref().expect("success"))?;
                return Ok(GmdResult {
                    phi: Some(phi),
                    message: Some(message),
                    distance: Some(dist),
                    trace: GmdTrace {
                        reliabilities,
                        attempts,
                    },
                });
            }
        }
        attempts.push(attempt);
    }
    Ok(GmdResult {
        phi: None,
        message: None,
        distance: None,
        trace: GmdTrace {
            reliabilities,
            attempts,
        },
    })
}
