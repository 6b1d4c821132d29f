//! Monte Carlo corroboration: sample the walk, read off the lumped sequence, and
//! look for order-2 dependence in it.
//!
//! The generator is `Xoshiro256PlusPlus` seeded with `seed_from_u64`. A step draws
//! one `u64` value `u` and picks the first outcome whose cumulative probability `c`
//! satisfies `u < ceil(c * 2^64)`, so sampling is exact up to the 2^-64 grid.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::exec::{self, ExecutionMode};
use crate::lumping::LumpingProblem;
use crate::markov::Distribution;
use crate::scalar::{Rational, Scalar};

/// Inverse-CDF sampler over a finite set of outcomes.
#[derive(Clone, Debug)]
pub struct Sampler {
    outcomes: Vec<usize>,
    thresholds: Vec<u128>,
}

impl Sampler {
    /// From nonnegative masses with positive total; they need not sum to one.
    pub fn new(masses: &[(usize, Rational)]) -> Result<Self> {
        let total = masses.iter().fold(Rational::zero(), |a, (_, m)| a.add(m));
        if !total.is_positive() || masses.iter().any(|(_, m)| m.is_negative()) {
            return Err(Error::domain("sampling masses must be nonnegative with positive total"));
        }
        let scale = BigInt::from(1u128 << 64);
        let mut cumulative = Rational::zero();
        let mut outcomes = Vec::new();
        let mut thresholds = Vec::new();
        for (x, m) in masses {
            if m.is_zero() {
                continue;
            }
            cumulative = cumulative.add(&m.div(&total)?);
            let (q, r) = (cumulative.numer() * &scale).div_rem(&cumulative.denom());
            let t = if r == BigInt::from(0) { q } else { q + 1 };
            outcomes.push(*x);
            thresholds.push(t.to_u128().expect("threshold at most 2^64"));
        }
        Ok(Sampler { outcomes, thresholds })
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> usize {
        let u = rng.next_u64() as u128;
        let k = self.thresholds.partition_point(|&t| t <= u);
        self.outcomes[k]
    }
}

/// A sampled path of the walk and its image in `G/H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub seed: u64,
    pub length: usize,
    /// `length + 1` states, starting with `X_0`.
    pub states: Vec<usize>,
    pub lumps: Vec<usize>,
}

fn masses(v: &[Rational]) -> Vec<(usize, Rational)> {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

/// Runs `length` steps of the walk driven by `w` from `X_0 ~ alpha`.
pub fn simulate_walk(
    problem: &LumpingProblem,
    w: &Element<Rational>,
    alpha: &Distribution,
    seed: u64,
    length: usize,
) -> Result<Trajectory> {
    let g = problem.group();
    if !std::sync::Arc::ptr_eq(w.group(), g) {
        return Err(Error::domain("weight belongs to a different group"));
    }
    if alpha.len() != g.order() {
        return Err(Error::domain("distribution length is not the group order"));
    }
    let start = Sampler::new(&masses(alpha.probabilities()))?;
    let step = Sampler::new(&masses(w.coeffs()))?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut states = Vec::with_capacity(length + 1);
    let mut x = start.sample(&mut rng);
    states.push(x);
    for _ in 0..length {
        x = g.mul(x, step.sample(&mut rng));
        states.push(x);
    }
    let coset_of = &problem.left_cosets().coset_of;
    let lumps = states.iter().map(|&s| coset_of[s]).collect();
    Ok(Trajectory { seed, length, states, lumps })
}

/// Independent trajectories with seeds `seed, seed + 1, ...`.
pub fn simulate_many(
    problem: &LumpingProblem,
    w: &Element<Rational>,
    alpha: &Distribution,
    seed: u64,
    length: usize,
    count: usize,
    mode: ExecutionMode,
) -> Result<Vec<Trajectory>> {
    exec::map_range(mode, count, |i| simulate_walk(problem, w, alpha, seed.wrapping_add(i as u64), length))
        .into_iter()
        .collect()
}

/// Transition counts `[from][to]` along a lump sequence.
pub fn transition_counts(lumps: &[usize], states: usize) -> Vec<Vec<u64>> {
    let mut counts = vec![vec![0u64; states]; states];
    for pair in lumps.windows(2) {
        counts[pair[0]][pair[1]] += 1;
    }
    counts
}

/// Row-normalized transition frequencies; rows never visited are `None`.
pub fn empirical_transitions(lumps: &[usize], states: usize) -> Vec<Option<Vec<f64>>> {
    transition_counts(lumps, states)
        .into_iter()
        .map(|row| {
            let n: u64 = row.iter().sum();
            (n > 0).then(|| row.iter().map(|&c| c as f64 / n as f64).collect())
        })
        .collect()
}

/// Largest `|empirical - exact|` over visited rows, with `4/sqrt(n)` for the row attaining it.
pub fn max_transition_deviation(lumps: &[usize], exact: &[Vec<Rational>]) -> (f64, f64) {
    let counts = transition_counts(lumps, exact.len());
    let mut worst = (0.0, f64::INFINITY);
    for (row, q) in counts.iter().zip(exact) {
        let n: u64 = row.iter().sum();
        if n == 0 {
            continue;
        }
        let bound = 4.0 / (n as f64).sqrt();
        for (&c, e) in row.iter().zip(q) {
            let d = (c as f64 / n as f64 - e.to_f64()).abs();
            if d - bound > worst.0 - worst.1 {
                worst = (d, bound);
            }
        }
    }
    worst
}

/// Settings for [`markov_diagnostic`].
#[derive(Clone, Debug)]
pub struct DiagnosticConfig {
    /// Below this many transitions the report carries a warning.
    pub min_length: usize,
    /// Contexts seen fewer times are skipped.
    pub min_context_count: u64,
    /// Normal quantile for the chi-square threshold; 3.719 is a one-sided 10^-4 level per context.
    pub z: f64,
    /// Count only the transition into this time index, across many sequences.
    pub time: Option<usize>,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        DiagnosticConfig { min_length: 10_000, min_context_count: 30, z: 3.719, time: None }
    }
}

/// A context `(previous, current)` whose next-lump law differs from the other contexts with the same `current`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlaggedContext {
    pub previous: usize,
    pub current: usize,
    pub count: u64,
    pub statistic: f64,
    pub threshold: f64,
    /// Next lumps never seen in this context but seen after `current` otherwise.
    pub missing: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticReport {
    pub transitions: u64,
    pub contexts_tested: usize,
    pub flagged: Vec<FlaggedContext>,
    pub warnings: Vec<String>,
}

/// Wilson–Hilferty approximation to the upper chi-square quantile.
pub fn chi_square_threshold(df: usize, z: f64) -> f64 {
    let k = df as f64;
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Compares, for each current lump, the next-lump counts of each previous lump
/// against the pooled counts of the other previous lumps (2-row chi-square).
pub fn markov_diagnostic(sequences: &[Vec<usize>], states: usize, config: &DiagnosticConfig) -> DiagnosticReport {
    // counts[a][b][c]
    let mut counts = vec![vec![vec![0u64; states]; states]; states];
    let mut transitions = 0u64;
    for seq in sequences {
        match config.time {
            Some(t) => {
                if t >= 2 && t < seq.len() {
                    counts[seq[t - 2]][seq[t - 1]][seq[t]] += 1;
                    transitions += 1;
                }
            }
            None => {
                for w in seq.windows(3) {
                    counts[w[0]][w[1]][w[2]] += 1;
                    transitions += 1;
                }
            }
        }
    }
    let mut report = DiagnosticReport { transitions, contexts_tested: 0, flagged: Vec::new(), warnings: Vec::new() };
    if (transitions as usize) < config.min_length {
        report.warnings.push(format!("only {transitions} transitions, fewer than {}", config.min_length));
    }
    for b in 0..states {
        let total: Vec<u64> = (0..states).map(|c| (0..states).map(|a| counts[a][b][c]).sum()).collect();
        for a in 0..states {
            let here = &counts[a][b];
            let n_here: u64 = here.iter().sum();
            let rest: Vec<u64> = total.iter().zip(here).map(|(t, h)| t - h).collect();
            let n_rest: u64 = rest.iter().sum();
            if n_here < config.min_context_count || n_rest < config.min_context_count {
                continue;
            }
            report.contexts_tested += 1;
            let n = (n_here + n_rest) as f64;
            let mut stat = 0.0;
            let mut cols = 0;
            for c in 0..states {
                let col = (here[c] + rest[c]) as f64;
                if col == 0.0 {
                    continue;
                }
                cols += 1;
                for (obs, row) in [(here[c], n_here), (rest[c], n_rest)] {
                    let e = row as f64 * col / n;
                    stat += (obs as f64 - e).powi(2) / e;
                }
            }
            if cols < 2 {
                continue;
            }
            let threshold = chi_square_threshold(cols - 1, config.z);
            if stat > threshold {
                let missing = (0..states).filter(|&c| here[c] == 0 && rest[c] > 0).collect();
                report.flagged.push(FlaggedContext { previous: a, current: b, count: n_here, statistic: stat, threshold, missing });
            }
        }
    }
    report
}
