//! No-signaling distributions and the Massar–Pironio local-hidden-variable
//! model for one-sided detection efficiency.
//!
//! The shared variable is λ = (b′, y′) with prior q(λ) = p(b′|y′)/|𝒴|. Bob
//! answers b′ deterministically when asked y′ and ∅ otherwise; Alice answers
//! from the conditional p(a b′|x y′)/p(b′|y′). This reproduces
//! q(a,b|x,y) = η p(a,b|x,y) for b ≠ ∅ and q(a,∅|x,y) = (1−η) p(a|x) at
//! η = 1/|𝒴|; for smaller η Bob additionally relabels every conclusive
//! outcome to ∅ with probability 1 − η|𝒴|.
//!
//! All machinery is generic over the probability scalar so the flagship
//! identities can be checked in exact rational arithmetic for dyadic tables
//! such as the PR box.

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::ops::{Div, Sub};

use crate::bell::{outcome_probabilities, BellKind};
use crate::entanglement::TwoQubitState;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Probability scalar: `f64` for numeric work, [`BigRational`] for exact
/// verification of dyadic tables.
pub trait Weight:
    Clone + PartialOrd + Zero + One + Sub<Output = Self> + Div<Output = Self> + std::fmt::Debug
{
    /// Whether arithmetic in this scalar is exact.
    const EXACT: bool;
    /// num/den as a scalar, used for 1/|𝒴| and the relabeling probability.
    fn from_ratio(num: u64, den: u64) -> Self;
    fn to_f64(&self) -> f64;
    /// Comparison slack for validation; zero in exact mode.
    fn tolerance() -> f64 {
        if Self::EXACT {
            0.0
        } else {
            1e-10
        }
    }
}

impl Weight for f64 {
    const EXACT: bool = false;
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Weight for BigRational {
    const EXACT: bool = true;
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

fn abs_diff<T: Weight>(a: &T, b: &T) -> T {
    if a >= b {
        a.clone() - b.clone()
    } else {
        b.clone() - a.clone()
    }
}

/// Alphabet sizes |𝒜|, |ℬ|, |𝒳|, |𝒴| of a bipartite behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabets {
    pub a: usize,
    pub b: usize,
    pub x: usize,
    pub y: usize,
}

impl Alphabets {
    pub const BINARY: Alphabets = Alphabets {
        a: 2,
        b: 2,
        x: 2,
        y: 2,
    };

    fn table_len(&self) -> usize {
        self.a * self.b * self.x * self.y
    }
}

/// A conditional distribution p(a,b|x,y) whose marginals do not signal in
/// either direction. Stored row-major in index order (x, y, a, b).
#[derive(Debug, Clone, PartialEq)]
pub struct NoSignalingDistribution<T = f64> {
    alphabets: Alphabets,
    table: Vec<T>,
}

/// JSON shape for distributions: `{"A":2,"B":2,"X":2,"Y":2,"p":[...]}` with
/// the flat table in (x, y, a, b) row-major order.
#[derive(Serialize, Deserialize)]
struct DistributionRecord {
    #[serde(rename = "A")]
    a: usize,
    #[serde(rename = "B")]
    b: usize,
    #[serde(rename = "X")]
    x: usize,
    #[serde(rename = "Y")]
    y: usize,
    p: Vec<f64>,
}

impl Serialize for NoSignalingDistribution<f64> {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        DistributionRecord {
            a: self.alphabets.a,
            b: self.alphabets.b,
            x: self.alphabets.x,
            y: self.alphabets.y,
            p: self.table.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NoSignalingDistribution<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let record = DistributionRecord::deserialize(deserializer)?;
        let alphabets = Alphabets {
            a: record.a,
            b: record.b,
            x: record.x,
            y: record.y,
        };
        NoSignalingDistribution::new(alphabets, record.p).map_err(serde::de::Error::custom)
    }
}

impl<T: Weight> NoSignalingDistribution<T> {
    /// Validates normalisation and both no-signaling identities; errors name
    /// the first violated marginal.
    pub fn new(alphabets: Alphabets, table: Vec<T>) -> Result<Self> {
        if alphabets.table_len() == 0 {
            return Err(Error::TableSize {
                expected: 1,
                actual: 0,
            });
        }
        if table.len() != alphabets.table_len() {
            return Err(Error::TableSize {
                expected: alphabets.table_len(),
                actual: table.len(),
            });
        }
        let dist = Self { alphabets, table };
        let tol = T::tolerance();

        for x in 0..alphabets.x {
            for y in 0..alphabets.y {
                let mut sum = T::zero();
                for a in 0..alphabets.a {
                    for b in 0..alphabets.b {
                        let p = dist.prob(x, y, a, b);
                        if p < T::zero() && abs_diff(&p, &T::zero()).to_f64() > tol {
                            return Err(Error::NegativeProbability {
                                x,
                                y,
                                a,
                                b,
                                value: p.to_f64(),
                            });
                        }
                        sum = sum + p;
                    }
                }
                if abs_diff(&sum, &T::one()).to_f64() > tol {
                    return Err(Error::TableNotNormalized {
                        x,
                        y,
                        sum: sum.to_f64(),
                    });
                }
            }
        }

        // Bob's marginal must not depend on x.
        for y in 0..alphabets.y {
            for b in 0..alphabets.b {
                let reference = dist.bob_marginal_at(0, y, b);
                for x in 1..alphabets.x {
                    let other = dist.bob_marginal_at(x, y, b);
                    let deviation = abs_diff(&reference, &other).to_f64();
                    if deviation > tol {
                        return Err(Error::SignalingToBob {
                            b,
                            y,
                            x0: 0,
                            x1: x,
                            deviation,
                        });
                    }
                }
            }
        }
        // Alice's marginal must not depend on y.
        for x in 0..alphabets.x {
            for a in 0..alphabets.a {
                let reference = dist.alice_marginal_at(x, 0, a);
                for y in 1..alphabets.y {
                    let other = dist.alice_marginal_at(x, y, a);
                    let deviation = abs_diff(&reference, &other).to_f64();
                    if deviation > tol {
                        return Err(Error::SignalingToAlice {
                            a,
                            x,
                            y0: 0,
                            y1: y,
                            deviation,
                        });
                    }
                }
            }
        }
        Ok(dist)
    }

    pub fn alphabets(&self) -> Alphabets {
        self.alphabets
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    #[inline]
    fn idx(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.alphabets.y + y) * self.alphabets.a + a) * self.alphabets.b + b
    }

    pub fn prob(&self, x: usize, y: usize, a: usize, b: usize) -> T {
        self.table[self.idx(x, y, a, b)].clone()
    }

    fn bob_marginal_at(&self, x: usize, y: usize, b: usize) -> T {
        (0..self.alphabets.a)
            .map(|a| self.prob(x, y, a, b))
            .fold(T::zero(), |acc, p| acc + p)
    }

    fn alice_marginal_at(&self, x: usize, y: usize, a: usize) -> T {
        (0..self.alphabets.b)
            .map(|b| self.prob(x, y, a, b))
            .fold(T::zero(), |acc, p| acc + p)
    }

    /// p(b|y), well defined by no-signaling (evaluated at x = 0).
    pub fn bob_marginal(&self, y: usize, b: usize) -> T {
        self.bob_marginal_at(0, y, b)
    }

    /// p(a|x), well defined by no-signaling (evaluated at y = 0).
    pub fn alice_marginal(&self, x: usize, a: usize) -> T {
        self.alice_marginal_at(x, 0, a)
    }

    /// The Popescu–Rohrlich box: p(a,b|x,y) = 1/2 iff a⊕b = xy.
    pub fn pr_box() -> Self {
        let alphabets = Alphabets::BINARY;
        let mut table = vec![T::zero(); alphabets.table_len()];
        let half = T::from_ratio(1, 2);
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        if a ^ b == x & y {
                            let idx = ((x * 2 + y) * 2 + a) * 2 + b;
                            table[idx] = half.clone();
                        }
                    }
                }
            }
        }
        Self::new(alphabets, table).expect("PR box is no-signaling")
    }

    /// Local deterministic point answering a₀ and b₀ regardless of inputs.
    pub fn deterministic(a0: usize, b0: usize) -> Result<Self> {
        let alphabets = Alphabets::BINARY;
        if a0 > 1 || b0 > 1 {
            return Err(Error::InvalidOutcome(a0.max(b0)));
        }
        let mut table = vec![T::zero(); alphabets.table_len()];
        for x in 0..2 {
            for y in 0..2 {
                let idx = ((x * 2 + y) * 2 + a0) * 2 + b0;
                table[idx] = T::one();
            }
        }
        Self::new(alphabets, table)
    }
}

impl NoSignalingDistribution<f64> {
    /// Exact-rational copy of this table. Every finite `f64` is a dyadic
    /// rational, so the conversion is lossless.
    pub fn to_exact(&self) -> Result<NoSignalingDistribution<BigRational>> {
        let table = self
            .table
            .iter()
            .map(|&p| BigRational::from_f64(p).ok_or(Error::NotRational { value: p }))
            .collect::<Result<Vec<_>>>()?;
        NoSignalingDistribution::new(self.alphabets, table)
    }
}

/// Validated construction of a no-signaling distribution (the constructor
/// under its operational name).
pub fn validate_no_signaling<T: Weight>(
    alphabets: Alphabets,
    table: Vec<T>,
) -> Result<NoSignalingDistribution<T>> {
    NoSignalingDistribution::new(alphabets, table)
}

/// Born probabilities of projective measurements on both sides in the
/// canonical directions of `s`; automatically no-signaling.
pub fn quantum_distribution(
    state: &TwoQubitState,
    s: &Scenario,
) -> Result<NoSignalingDistribution<f64>> {
    let p = outcome_probabilities(state, s, BellKind::Chsh)?;
    let table = p.iter().flatten().flatten().flatten().copied().collect();
    NoSignalingDistribution::new(Alphabets::BINARY, table)
}

/// Hidden variable λ = (b′, y′) with prior and local response channels.
#[derive(Debug, Clone)]
pub struct LhvModel<T = f64> {
    alphabets: Alphabets,
    hidden: Vec<(usize, usize)>,
    prior: Vec<T>,
    /// alice[λ][x][a] = q(a|x,λ).
    alice: Vec<Vec<Vec<T>>>,
    /// bob[λ][y][b] = q(b|y,λ) with b = |ℬ| denoting ∅.
    bob: Vec<Vec<Vec<T>>>,
}

impl<T: Weight> LhvModel<T> {
    pub fn alphabets(&self) -> Alphabets {
        self.alphabets
    }

    /// Hidden values (b′, y′) with nonzero prior mass.
    pub fn hidden_values(&self) -> &[(usize, usize)] {
        &self.hidden
    }

    pub fn prior(&self) -> &[T] {
        &self.prior
    }

    pub fn alice_channel(&self, lambda: usize, x: usize, a: usize) -> T {
        self.alice[lambda][x][a].clone()
    }

    pub fn bob_channel(&self, lambda: usize, y: usize, b: usize) -> T {
        self.bob[lambda][y][b].clone()
    }
}

/// Builds the Massar–Pironio model for efficiency 0 < η ≤ 1/|𝒴|. Hidden
/// values with p(b′|y′) = 0 are dropped (their prior mass is zero and
/// Alice's conditional would be 0/0); for η < 1/|𝒴| Bob relabels every
/// conclusive outcome to ∅ with probability 1 − η|𝒴|.
pub fn massar_pironio_model<T: Weight>(
    p: &NoSignalingDistribution<T>,
    eta: T,
) -> Result<LhvModel<T>> {
    let alphabets = p.alphabets();
    let limit = T::from_ratio(1, alphabets.y as u64);
    if eta <= T::zero() || eta > limit {
        return Err(Error::NoLhvModel {
            eta: eta.to_f64(),
            limit: limit.to_f64(),
        });
    }
    let y_count = T::from_ratio(alphabets.y as u64, 1);
    // Probability of keeping a conclusive outcome; 1 exactly at η = 1/|𝒴|.
    let keep = eta.clone() * y_count.clone();
    let drop_extra = T::one() - keep.clone();

    let mut hidden = Vec::new();
    let mut prior = Vec::new();
    let mut alice = Vec::new();
    let mut bob = Vec::new();
    let empty = alphabets.b; // index of ∅ in Bob's enlarged alphabet

    for b_prime in 0..alphabets.b {
        for y_prime in 0..alphabets.y {
            let mass = p.bob_marginal(y_prime, b_prime);
            if mass.is_zero() {
                continue;
            }
            hidden.push((b_prime, y_prime));
            prior.push(mass.clone() / y_count.clone());

            let mut alice_channel = Vec::with_capacity(alphabets.x);
            for x in 0..alphabets.x {
                let row: Vec<T> = (0..alphabets.a)
                    .map(|a| p.prob(x, y_prime, a, b_prime) / mass.clone())
                    .collect();
                alice_channel.push(row);
            }
            alice.push(alice_channel);

            let mut bob_channel = Vec::with_capacity(alphabets.y);
            for y in 0..alphabets.y {
                let mut row = vec![T::zero(); alphabets.b + 1];
                if y == y_prime {
                    row[b_prime] = keep.clone();
                    row[empty] = drop_extra.clone();
                } else {
                    row[empty] = T::one();
                }
                bob_channel.push(row);
            }
            bob.push(bob_channel);
        }
    }

    Ok(LhvModel {
        alphabets,
        hidden,
        prior,
        alice,
        bob,
    })
}

/// Joint table q(a,b|x,y) with Bob's alphabet enlarged by ∅ (index |ℬ|).
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable<T = f64> {
    alphabets: Alphabets,
    /// Row-major over (x, y, a, b) with b ∈ 0..=|ℬ|.
    table: Vec<T>,
}

impl<T: Weight> JointTable<T> {
    pub fn alphabets(&self) -> Alphabets {
        self.alphabets
    }

    #[inline]
    fn idx(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.alphabets.y + y) * self.alphabets.a + a) * (self.alphabets.b + 1) + b
    }

    /// q(a,b|x,y); `b = |ℬ|` addresses the inconclusive outcome ∅.
    pub fn prob(&self, x: usize, y: usize, a: usize, b: usize) -> T {
        self.table[self.idx(x, y, a, b)].clone()
    }

    /// The table as a distribution over the enlarged alphabet ℬ∪{∅},
    /// validating that it is itself no-signaling.
    pub fn to_distribution(&self) -> Result<NoSignalingDistribution<T>> {
        let enlarged = Alphabets {
            b: self.alphabets.b + 1,
            ..self.alphabets
        };
        NoSignalingDistribution::new(enlarged, self.table.clone())
    }

    /// Coarse-grains ∅ into outcome b = 0, recovering a |ℬ|-outcome table.
    pub fn merge_inconclusive_into_zero(&self) -> Result<NoSignalingDistribution<T>> {
        let mut table = Vec::with_capacity(self.alphabets.table_len());
        for x in 0..self.alphabets.x {
            for y in 0..self.alphabets.y {
                for a in 0..self.alphabets.a {
                    for b in 0..self.alphabets.b {
                        let mut p = self.prob(x, y, a, b);
                        if b == 0 {
                            p = p + self.prob(x, y, a, self.alphabets.b);
                        }
                        table.push(p);
                    }
                }
            }
        }
        NoSignalingDistribution::new(self.alphabets, table)
    }
}

/// Exact summation of q(a,b|x,y) = Σ_λ q(λ) q(a|x,λ) q(b|y,λ); no
/// sampling is involved.
pub fn simulate<T: Weight>(model: &LhvModel<T>) -> JointTable<T> {
    let alphabets = model.alphabets;
    let b_total = alphabets.b + 1;
    let mut table = vec![T::zero(); alphabets.x * alphabets.y * alphabets.a * b_total];
    for lambda in 0..model.hidden.len() {
        for x in 0..alphabets.x {
            for y in 0..alphabets.y {
                for a in 0..alphabets.a {
                    let qa = model.alice[lambda][x][a].clone();
                    if qa.is_zero() {
                        continue;
                    }
                    let weight = model.prior[lambda].clone() * qa;
                    for b in 0..b_total {
                        let qb = model.bob[lambda][y][b].clone();
                        if qb.is_zero() {
                            continue;
                        }
                        let idx = ((x * alphabets.y + y) * alphabets.a + a) * b_total + b;
                        table[idx] = table[idx].clone() + weight.clone() * qb;
                    }
                }
            }
        }
    }
    let joint = JointTable { alphabets, table };
    debug_assert!({
        let mut ok = true;
        for x in 0..alphabets.x {
            for y in 0..alphabets.y {
                let mut sum = T::zero();
                for a in 0..alphabets.a {
                    for b in 0..b_total {
                        sum = sum + joint.prob(x, y, a, b);
                    }
                }
                ok &= abs_diff(&sum, &T::one()).to_f64() <= 1e-12;
            }
        }
        ok
    });
    joint
}

/// Outcome of checking a simulated table against the target identities.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationCheck {
    pub passed: bool,
    pub max_deviation: f64,
    /// (x, y, a, b) of the largest deviation; b = |ℬ| denotes ∅.
    pub worst_index: (usize, usize, usize, usize),
}

/// Verifies q(a,b|x,y) = η p(a,b|x,y) for b ≠ ∅ and
/// q(a,∅|x,y) = (1−η) p(a|x), reporting the largest absolute deviation.
pub fn verify_simulation<T: Weight>(
    p: &NoSignalingDistribution<T>,
    eta: T,
    q: &JointTable<T>,
) -> Result<SimulationCheck> {
    if p.alphabets() != q.alphabets() {
        return Err(Error::TableSize {
            expected: p.alphabets().table_len(),
            actual: q.alphabets().table_len(),
        });
    }
    let alphabets = p.alphabets();
    let one_minus_eta = T::one() - eta.clone();
    let mut max_deviation = 0.0f64;
    let mut worst_index = (0, 0, 0, 0);
    let mut update = |dev: f64, idx: (usize, usize, usize, usize)| {
        if dev > max_deviation {
            max_deviation = dev;
            worst_index = idx;
        }
    };
    for x in 0..alphabets.x {
        for y in 0..alphabets.y {
            for a in 0..alphabets.a {
                for b in 0..alphabets.b {
                    let expect = eta.clone() * p.prob(x, y, a, b);
                    let dev = abs_diff(&q.prob(x, y, a, b), &expect).to_f64();
                    update(dev, (x, y, a, b));
                }
                let expect = one_minus_eta.clone() * p.alice_marginal(x, a);
                let dev = abs_diff(&q.prob(x, y, a, alphabets.b), &expect).to_f64();
                update(dev, (x, y, a, alphabets.b));
            }
        }
    }
    Ok(SimulationCheck {
        passed: max_deviation <= T::tolerance(),
        max_deviation,
        worst_index,
    })
}

/// Seeded Monte-Carlo run of the model: `shots` samples per input pair
/// (x, y), returning empirical frequencies. Demo aid only — acceptance
/// checks go through [`simulate`]'s exact summation.
pub fn sample_model(model: &LhvModel<f64>, shots: u64, seed: u64) -> JointTable<f64> {
    let alphabets = model.alphabets;
    let b_total = alphabets.b + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = vec![0.0f64; alphabets.x * alphabets.y * alphabets.a * b_total];
    let draw = |rng: &mut ChaCha8Rng, weights: &[f64]| -> usize {
        let mut u: f64 = rng.gen();
        for (i, w) in weights.iter().enumerate() {
            u -= w;
            if u <= 0.0 {
                return i;
            }
        }
        weights.len() - 1
    };
    for x in 0..alphabets.x {
        for y in 0..alphabets.y {
            for _ in 0..shots {
                let lambda = draw(&mut rng, &model.prior);
                let a = draw(&mut rng, &model.alice[lambda][x]);
                let b = draw(&mut rng, &model.bob[lambda][y]);
                let idx = ((x * alphabets.y + y) * alphabets.a + a) * b_total + b;
                table[idx] += 1.0;
            }
        }
    }
    for entry in table.iter_mut() {
        *entry /= shots as f64;
    }
    JointTable { alphabets, table }
}
