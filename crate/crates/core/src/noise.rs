//! Single-qubit decoherence superoperators.
//!
//! Each channel acts on the column-stacked single-qubit vector
//! `(ρ00, ρ10, ρ01, ρ11)` through a 4×4 matrix. On a register the same matrix
//! is applied to every qubit in turn; single-qubit channels on different
//! qubits commute, so the order does not matter.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{devectorize, vectorize, DensityMatrix, VectorizedDensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Dephasing,
    Damping,
    Depolarizing,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [
        ChannelKind::Dephasing,
        ChannelKind::Damping,
        ChannelKind::Depolarizing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::Damping => "damping",
            ChannelKind::Depolarizing => "depolarizing",
        }
    }

    /// Exclusive (dephasing, depolarizing) or inclusive (damping) upper bound
    /// of the probability parameter.
    fn max_probability(self) -> f64 {
        match self {
            ChannelKind::Dephasing => 0.5,
            ChannelKind::Damping => 1.0,
            ChannelKind::Depolarizing => 0.75,
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dephasing" => Ok(ChannelKind::Dephasing),
            "damping" => Ok(ChannelKind::Damping),
            "depolarizing" | "depolarising" => Ok(ChannelKind::Depolarizing),
            other => Err(Error::Config(format!("unknown channel kind {other:?}"))),
        }
    }
}

/// A channel kind with rate Γ acting for time t (dimensionless, t = 1 by
/// default).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseChannel {
    kind: ChannelKind,
    rate: f64,
    time: f64,
}

impl NoiseChannel {
    pub fn new(kind: ChannelKind, rate: f64) -> Result<Self> {
        Self::with_time(kind, rate, 1.0)
    }

    pub fn with_time(kind: ChannelKind, rate: f64, time: f64) -> Result<Self> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::Config(format!("noise rate must be finite and >= 0, got {rate}")));
        }
        if !time.is_finite() || time <= 0.0 {
            return Err(Error::Config(format!("noise time must be finite and > 0, got {time}")));
        }
        let ch = Self { kind, rate, time };
        let p = ch.probability();
        let max = kind.max_probability();
        let in_range = match kind {
            ChannelKind::Damping => p <= max,
            _ => p < max,
        };
        if !in_range {
            return Err(Error::Config(format!(
                "{kind} probability {p} outside its valid range (rate {rate}, time {time})"
            )));
        }
        Ok(ch)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn probability(&self) -> f64 {
        probability(self.kind, self.rate, self.time)
    }

    pub fn superoperator(&self) -> Matrix4<f64> {
        single_qubit_superoperator(self.kind, self.probability())
    }
}

/// Rate-to-probability conversion for each channel kind.
pub fn probability(kind: ChannelKind, rate: f64, time: f64) -> f64 {
    let x = rate * time;
    match kind {
        ChannelKind::Dephasing => 0.5 * -(-2.0 * x).exp_m1(),
        ChannelKind::Damping => -(-x).exp_m1(),
        ChannelKind::Depolarizing => 0.75 * -(-x).exp_m1(),
    }
}

/// The 4×4 superoperator acting on `(ρ00, ρ10, ρ01, ρ11)`.
#[rustfmt::skip]
pub fn single_qubit_superoperator(kind: ChannelKind, p: f64) -> Matrix4<f64> {
    match kind {
        ChannelKind::Dephasing => Matrix4::new(
            1.0, 0.0,           0.0,           0.0,
            0.0, 1.0 - 2.0 * p, 0.0,           0.0,
            0.0, 0.0,           1.0 - 2.0 * p, 0.0,
            0.0, 0.0,           0.0,           1.0,
        ),
        ChannelKind::Damping => {
            let s = (1.0 - p).sqrt();
            Matrix4::new(
                1.0, 0.0, 0.0, p,
                0.0, s,   0.0, 0.0,
                0.0, 0.0, s,   0.0,
                0.0, 0.0, 0.0, 1.0 - p,
            )
        }
        ChannelKind::Depolarizing => {
            let a = 2.0 * p / 3.0;
            let b = 1.0 - 4.0 * p / 3.0;
            Matrix4::new(
                1.0 - a, 0.0, 0.0, a,
                0.0,     b,   0.0, 0.0,
                0.0,     0.0, b,   0.0,
                a,       0.0, 0.0, 1.0 - a,
            )
        }
    }
}

/// Applies `op` to qubit `qubit` of a vectorized register of `num_qubits`.
///
/// In the column-stacked vector the row bit of qubit k sits at bit k and the
/// column bit at bit `num_qubits + k`, so the local index `r + 2c` addresses
/// `(ρ00, ρ10, ρ01, ρ11)`.
pub fn apply_superoperator_to_qubit(
    v: &mut VectorizedDensityMatrix,
    op: &Matrix4<f64>,
    qubit: usize,
) {
    let n = v.num_qubits();
    assert!(qubit < n, "qubit {qubit} out of range for {n} qubits");
    let row_bit = 1usize << qubit;
    let col_bit = 1usize << (n + qubit);
    let offsets = [0, row_bit, col_bit, row_bit | col_bit];
    let data = v.as_mut_slice();
    for base in 0..data.len() {
        if base & (row_bit | col_bit) != 0 {
            continue;
        }
        let local: [Complex64; 4] = offsets.map(|o| data[base | o]);
        for (r, &o) in offsets.iter().enumerate() {
            data[base | o] = (0..4).map(|c| local[c] * op[(r, c)]).sum();
        }
    }
}

/// Applies the channel to every qubit, in ascending qubit order.
pub fn apply_channel(rho: &DensityMatrix, ch: &NoiseChannel) -> DensityMatrix {
    let order: Vec<usize> = (0..rho.num_qubits()).collect();
    apply_channel_in_order(rho, ch, &order)
}

/// Applies the channel once to each qubit listed in `order`.
pub fn apply_channel_in_order(rho: &DensityMatrix, ch: &NoiseChannel, order: &[usize]) -> DensityMatrix {
    if ch.rate() == 0.0 {
        return rho.clone();
    }
    let op = ch.superoperator();
    let mut v = vectorize(rho);
    for &q in order {
        apply_superoperator_to_qubit(&mut v, &op, q);
    }
    devectorize(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;

    #[test]
    fn zero_rate_is_zero_probability() {
        for kind in ChannelKind::ALL {
            assert_eq!(probability(kind, 0.0, 1.0), 0.0);
        }
    }

    #[test]
    fn large_rate_limits() {
        assert!((probability(ChannelKind::Damping, 50.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((probability(ChannelKind::Depolarizing, 50.0, 1.0) - 0.75).abs() < 1e-15);
        assert!((probability(ChannelKind::Dephasing, 50.0, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn probability_formulas() {
        let g: f64 = 0.01;
        assert!((probability(ChannelKind::Damping, g, 1.0) - (1.0 - (-g).exp())).abs() < 1e-16);
        assert!((probability(ChannelKind::Depolarizing, g, 1.0) - 0.75 * (1.0 - (-g).exp())).abs() < 1e-16);
        assert!((probability(ChannelKind::Dephasing, g, 2.0) - 0.5 * (1.0 - (-4.0 * g).exp())).abs() < 1e-16);
    }

    #[test]
    fn invalid_channels_rejected() {
        assert!(NoiseChannel::new(ChannelKind::Damping, -1.0).is_err());
        assert!(NoiseChannel::new(ChannelKind::Damping, f64::NAN).is_err());
        assert!(NoiseChannel::with_time(ChannelKind::Damping, 0.1, 0.0).is_err());
        // p rounds to exactly 3/4 / 1/2 at huge rates: outside the open range.
        assert!(NoiseChannel::new(ChannelKind::Depolarizing, 1e3).is_err());
        assert!(NoiseChannel::new(ChannelKind::Dephasing, 1e3).is_err());
        assert!(NoiseChannel::new(ChannelKind::Damping, 1e3).is_ok());
    }

    #[test]
    fn dephasing_matrix() {
        let p = 0.1;
        let m = single_qubit_superoperator(ChannelKind::Dephasing, p);
        assert_eq!(m, Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 0.8, 0.8, 1.0)));
    }

    #[test]
    fn damping_matrix_action() {
        let p: f64 = 0.3;
        let m = single_qubit_superoperator(ChannelKind::Damping, p);
        let v = nalgebra::Vector4::new(0.2, 0.1, 0.1, 0.8);
        let out = m * v;
        let s = (1.0 - p).sqrt();
        let expected = nalgebra::Vector4::new(0.2 + p * 0.8, s * 0.1, s * 0.1, (1.0 - p) * 0.8);
        assert!((out - expected).amax() < 1e-15);
    }

    #[test]
    fn depolarizing_fixed_point() {
        let m = single_qubit_superoperator(ChannelKind::Depolarizing, 0.4);
        let v = nalgebra::Vector4::new(0.5, 0.0, 0.0, 0.5);
        assert!((m * v - v).amax() < 1e-15);
    }

    #[test]
    fn full_damping_decays_to_vacuum() {
        let ch = NoiseChannel::new(ChannelKind::Damping, 1e3).unwrap();
        assert_eq!(ch.probability(), 1.0);
        let rho = DensityMatrix::from_pure(&StateVector::basis(3, 0b101));
        let out = apply_channel(&rho, &ch);
        let vacuum = DensityMatrix::from_pure(&StateVector::basis(3, 0));
        assert!(crate::state::max_abs(&(out.entries() - vacuum.entries())) < 1e-15);
    }

    #[test]
    fn zero_rate_is_identity() {
        let psi = StateVector::new(nalgebra::DVector::from_fn(4, |i, _| Complex64::new(i as f64, 1.0))).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        for kind in ChannelKind::ALL {
            let out = apply_channel(&rho, &NoiseChannel::new(kind, 0.0).unwrap());
            assert_eq!(out, rho);
        }
    }
}
