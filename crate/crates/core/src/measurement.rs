//! Shot-noise measurement simulation.
//!
//! Pauli words are grouped into qubit-wise commuting sets. Each group is
//! measured by rotating every qubit into the group's basis (H for X, H·S† for
//! Y), drawing bit strings from the diagonal of the rotated density matrix,
//! and reading each member's eigenvalue off the parity of its support.

use std::collections::BTreeMap;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{qubit_wise_commutes, Pauli, PauliWord};
use crate::state::{expectation_word, DensityMatrix};

/// Expectation value per Pauli word for one repetition.
pub type Expectations = BTreeMap<PauliWord, f64>;

/// One group of jointly measurable words; `basis` holds the union of their
/// non-identity factors.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementGroup {
    pub members: Vec<PauliWord>,
    pub basis: PauliWord,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementPlan {
    pub groups: Vec<MeasurementGroup>,
}

impl MeasurementPlan {
    pub fn num_words(&self) -> usize {
        self.groups.iter().map(|g| g.members.len()).sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grouping {
    /// Greedy first-fit qubit-wise commuting groups.
    #[default]
    Qwc,
    /// One group per word.
    None,
}

/// Shots per group (`0` selects exact expectations), repetitions, and seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotConfig {
    pub shots: u32,
    pub repetitions: u32,
    pub seed: u64,
}

impl ShotConfig {
    pub fn new(shots: u32, repetitions: u32, seed: u64) -> Result<Self> {
        if repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        Ok(Self {
            shots,
            repetitions,
            seed,
        })
    }

    pub fn exact() -> Self {
        Self {
            shots: 0,
            repetitions: 1,
            seed: 0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.shots == 0
    }
}

/// Sort key of the dense label (qubit 0 first, `I < X < Y < Z`).
fn dense_key(word: &PauliWord, width: usize) -> Vec<u8> {
    let mut key = vec![0u8; width];
    for (q, p) in word.iter() {
        key[q] = match p {
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        };
    }
    key
}

fn sorted_unique(operators: &[PauliWord]) -> Vec<PauliWord> {
    let mut words = operators.to_vec();
    words.sort();
    words.dedup();
    let width = words
        .iter()
        .filter_map(|w| w.iter().map(|(q, _)| q + 1).max())
        .max()
        .unwrap_or(0);
    words.sort_by_cached_key(|w| dense_key(w, width));
    words
}

/// Greedy first-fit grouping over the input sorted lexicographically by
/// dense label.
pub fn build_plan(operators: &[PauliWord]) -> MeasurementPlan {
    let mut groups: Vec<MeasurementGroup> = Vec::new();
    for word in sorted_unique(operators) {
        match groups.iter_mut().find(|g| qubit_wise_commutes(&g.basis, &word)) {
            Some(g) => {
                g.basis = PauliWord::from_ops(g.basis.iter().chain(word.iter()));
                g.members.push(word);
            }
            None => groups.push(MeasurementGroup {
                basis: word.clone(),
                members: vec![word],
            }),
        }
    }
    MeasurementPlan { groups }
}

pub fn build_plan_ungrouped(operators: &[PauliWord]) -> MeasurementPlan {
    let groups = sorted_unique(operators)
        .into_iter()
        .map(|w| MeasurementGroup {
            basis: w.clone(),
            members: vec![w],
        })
        .collect();
    MeasurementPlan { groups }
}

pub fn build_plan_with(operators: &[PauliWord], grouping: Grouping) -> MeasurementPlan {
    match grouping {
        Grouping::Qwc => build_plan(operators),
        Grouping::None => build_plan_ungrouped(operators),
    }
}

/// Deterministic stream for `(seed, repetition, group)`.
pub fn group_rng(seed: u64, repetition: u32, group: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(repetition) << 32) | u64::from(group));
    rng
}

fn basis_change(p: Pauli) -> Matrix2<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x, 0.0);
    match p {
        Pauli::Z => Matrix2::identity(),
        Pauli::X => Matrix2::new(r(s), r(s), r(s), r(-s)),
        // H · S†
        Pauli::Y => Matrix2::new(r(s), Complex64::new(0.0, -s), r(s), Complex64::new(0.0, s)),
    }
}

/// Diagonal of `U ρ U†` with `U` the tensor product of per-qubit basis changes.
fn rotated_diagonal(rho: &DensityMatrix, basis: &PauliWord) -> Vec<f64> {
    let mut m = rho.entries().clone();
    let dim = m.nrows();
    for (q, p) in basis.iter() {
        if p == Pauli::Z {
            continue;
        }
        let u = basis_change(p);
        let bit = 1usize << q;
        // rows: m <- U m
        for col in 0..dim {
            for r0 in (0..dim).filter(|r| r & bit == 0) {
                let (a, b) = (m[(r0, col)], m[(r0 | bit, col)]);
                m[(r0, col)] = u[(0, 0)] * a + u[(0, 1)] * b;
                m[(r0 | bit, col)] = u[(1, 0)] * a + u[(1, 1)] * b;
            }
        }
        // columns: m <- m U†
        for row in 0..dim {
            for c0 in (0..dim).filter(|c| c & bit == 0) {
                let (a, b) = (m[(row, c0)], m[(row, c0 | bit)]);
                m[(row, c0)] = a * u[(0, 0)].conj() + b * u[(0, 1)].conj();
                m[(row, c0 | bit)] = a * u[(1, 0)].conj() + b * u[(1, 1)].conj();
            }
        }
    }
    (0..dim).map(|i| m[(i, i)].re).collect()
}

/// Outcome distribution of measuring every qubit of `rho` in `basis`.
fn outcome_distribution(rho: &DensityMatrix, basis: &PauliWord) -> Result<WeightedIndex<f64>> {
    let probs = rotated_diagonal(rho, basis);
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Consistency(format!(
            "outcome probabilities sum to {total}, expected 1"
        )));
    }
    if let Some(p) = probs.iter().find(|&&p| p < -1e-8) {
        return Err(Error::Consistency(format!("negative outcome probability {p}")));
    }
    let weights: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
    WeightedIndex::new(&weights)
        .map_err(|e| Error::Consistency(format!("cannot sample outcome distribution: {e}")))
}

/// Draws `shots` bit strings (bit k = qubit k) after rotating into `basis`.
pub fn sample_group(
    rho: &DensityMatrix,
    basis: &PauliWord,
    shots: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u64>> {
    let dist = outcome_distribution(rho, basis)?;
    Ok((0..shots).map(|_| dist.sample(rng) as u64).collect())
}

/// Sample mean of `(-1)^{parity of the bits on the word's support}`.
pub fn estimate(samples: &[u64], word: &PauliWord, basis: &PauliWord) -> Result<f64> {
    if let Some((q, p)) = word.iter().find(|&(q, p)| basis.get(q) != Some(p)) {
        return Err(Error::ContractViolation(format!(
            "factor {p:?}{q} of {word} is not measured by basis {basis}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::ContractViolation("no samples to estimate from".into()));
    }
    let mask = word.support_mask();
    let sum: i64 = samples
        .iter()
        .map(|s| if (s & mask).count_ones().is_multiple_of(2) { 1 } else { -1 })
        .sum();
    Ok(sum as f64 / samples.len() as f64)
}

fn exact_expectations(rho: &DensityMatrix, plan: &MeasurementPlan) -> Expectations {
    plan.groups
        .iter()
        .flat_map(|g| g.members.iter())
        .map(|w| (w.clone(), expectation_word(rho, w).re))
        .collect()
}

fn sampled_repetition(
    dists: &[WeightedIndex<f64>],
    plan: &MeasurementPlan,
    cfg: &ShotConfig,
    repetition: u32,
) -> Result<Expectations> {
    let mut out = Expectations::new();
    for (gi, (group, dist)) in plan.groups.iter().zip(dists).enumerate() {
        let mut rng = group_rng(cfg.seed, repetition, gi as u32);
        let samples: Vec<u64> = (0..cfg.shots).map(|_| dist.sample(&mut rng) as u64).collect();
        for w in &group.members {
            out.insert(w.clone(), estimate(&samples, w, &group.basis)?);
        }
    }
    Ok(out)
}

/// One expectation map per repetition. With `shots == 0` every repetition
/// holds the exact expectations.
pub fn measure_all(rho: &DensityMatrix, plan: &MeasurementPlan, cfg: &ShotConfig) -> Result<Vec<Expectations>> {
    if cfg.is_exact() {
        let exact = exact_expectations(rho, plan);
        return Ok(vec![exact; cfg.repetitions as usize]);
    }
    let dists: Vec<WeightedIndex<f64>> = plan
        .groups
        .par_iter()
        .map(|g| outcome_distribution(rho, &g.basis))
        .collect::<Result<_>>()?;
    (0..cfg.repetitions)
        .into_par_iter()
        .map(|r| sampled_repetition(&dists, plan, cfg, r))
        .collect()
}
