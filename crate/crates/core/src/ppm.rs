//! Parametrized probability measures: a probability table over a knob
//! domain and a detector domain, and everything the table alone implies.
//!
//! A `Ppm` assigns to each knob setting a probability measure on outcomes.
//! From the table alone one gets a total-variation pseudometric on the knob
//! domain, the equivalence relation of settings with identical rows, the
//! quotient metric on its blocks (which on a finite set carries the induced
//! topology), deviations between the distance profiles of two tables,
//! marginalization over ignored detectors and restriction by taped-down
//! knobs.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::domains::{DetectorDomain, KnobDomain, Label};
use crate::error::{Error, Result};
use crate::sweep;

/// A statement of results: `table[k * num_outcomes + w]` is the probability
/// of outcome `w` at knob setting `k`, rows summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "RawPpm", try_from = "RawPpm")]
pub struct Ppm {
    knobs: KnobDomain,
    detectors: DetectorDomain,
    table: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPpm {
    knob_domain: KnobDomain,
    detector_domain: DetectorDomain,
    table: Vec<Vec<f64>>,
}

impl From<Ppm> for RawPpm {
    fn from(p: Ppm) -> Self {
        let cols = p.detectors.num_points();
        RawPpm {
            table: p.table.chunks(cols).map(|r| r.to_vec()).collect(),
            knob_domain: p.knobs,
            detector_domain: p.detectors,
        }
    }
}

impl TryFrom<RawPpm> for Ppm {
    type Error = Error;

    fn try_from(raw: RawPpm) -> Result<Self> {
        Ppm::new(
            raw.knob_domain,
            raw.detector_domain,
            raw.table.into_iter().flatten().collect(),
            &Tolerances::DEFAULT,
        )
    }
}

impl Ppm {
    /// Validates shape, range and row normalization. Entries within the
    /// equality tolerance of [0, 1] are clamped onto the interval; anything
    /// further out is an error.
    pub fn new(
        knobs: KnobDomain,
        detectors: DetectorDomain,
        mut table: Vec<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let rows = knobs.num_points();
        let cols = detectors.num_points();
        if table.len() != rows * cols {
            return Err(Error::TableShapeMismatch {
                len: table.len(),
                rows,
                cols,
            });
        }
        for (row, chunk) in table.chunks(cols).enumerate() {
            let sum: f64 = chunk.iter().sum();
            if (sum - 1.0).abs() > tol.equality {
                return Err(Error::RowNotNormalized { row, sum });
            }
        }
        for value in &mut table {
            if *value < -tol.equality || *value > 1.0 + tol.equality {
                return Err(Error::ProbabilityOutOfRange { value: *value });
            }
            *value = value.clamp(0.0, 1.0);
        }
        Ok(Ppm {
            knobs,
            detectors,
            table,
        })
    }

    pub fn knob_domain(&self) -> &KnobDomain {
        &self.knobs
    }

    pub fn detector_domain(&self) -> &DetectorDomain {
        &self.detectors
    }

    pub fn num_settings(&self) -> usize {
        self.knobs.num_points()
    }

    pub fn num_outcomes(&self) -> usize {
        self.detectors.num_points()
    }

    #[inline]
    pub fn prob(&self, setting: usize, outcome: usize) -> f64 {
        self.table[setting * self.num_outcomes() + outcome]
    }

    pub fn row(&self, setting: usize) -> &[f64] {
        let cols = self.num_outcomes();
        &self.table[setting * cols..(setting + 1) * cols]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Total-variation distance between the rows of two settings. Equals the
    /// supremum over outcome subsets of the probability difference, attained
    /// at the set of outcomes where the first row exceeds the second.
    pub fn tv_distance(&self, k1: usize, k2: usize) -> Result<f64> {
        let n = self.num_settings();
        for k in [k1, k2] {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, count: n });
            }
        }
        Ok(tv_rows(self.row(k1), self.row(k2)))
    }

    /// Groups settings whose rows agree within the equality tolerance.
    /// Blocks are ordered by first occurrence with ascending members.
    pub fn equiv_partition(&self, tol: &Tolerances) -> KnobPartition {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for k in 0..self.num_settings() {
            let hit = blocks
                .iter()
                .position(|b| tv_rows(self.row(b[0]), self.row(k)) <= tol.equality);
            match hit {
                Some(i) => blocks[i].push(k),
                None => blocks.push(vec![k]),
            }
        }
        KnobPartition { blocks }
    }

    /// The induced metric on the blocks of the row-equality partition. Fails
    /// if the distance between blocks depends on the chosen representatives
    /// beyond the equality tolerance, which signals a misconfigured
    /// tolerance rather than bad data.
    pub fn quotient_metric(&self, tol: &Tolerances) -> Result<QuotientMetric> {
        let partition = self.equiv_partition(tol);
        let nb = partition.blocks.len();
        let mut dist = vec![0.0f64; nb * nb];
        for b1 in 0..nb {
            for b2 in (b1 + 1)..nb {
                let d = tv_rows(
                    self.row(partition.blocks[b1][0]),
                    self.row(partition.blocks[b2][0]),
                );
                dist[b1 * nb + b2] = d;
                dist[b2 * nb + b1] = d;
            }
        }
        // Representative independence across every settings pair.
        let assignment = partition.assignment(self.num_settings());
        for k1 in 0..self.num_settings() {
            for k2 in 0..self.num_settings() {
                let expected = dist[assignment[k1] * nb + assignment[k2]];
                let actual = tv_rows(self.row(k1), self.row(k2));
                if (actual - expected).abs() > tol.equality {
                    return Err(Error::RepresentativeDependence {
                        max_dev: (actual - expected).abs(),
                        k1,
                        k2,
                    });
                }
            }
        }
        QuotientMetric::validate(partition, dist, tol)
    }

    /// Marginal table over a sub-domain of detectors; dropped coordinates
    /// are summed out.
    pub fn marginalize(&self, keep: &DetectorDomain) -> Result<Ppm> {
        if !keep.leq(&self.detectors) {
            return Err(Error::NotIncluded);
        }
        let cols_kept = keep.num_points();
        let cols_full = self.num_outcomes();
        let mut map = Vec::with_capacity(cols_full);
        for w in 0..cols_full {
            map.push(keep.project_point(&self.detectors, w)?);
        }
        let rows = self.num_settings();
        let mut table = vec![0.0f64; rows * cols_kept];
        for k in 0..rows {
            for w in 0..cols_full {
                table[k * cols_kept + map[w]] += self.prob(k, w);
            }
        }
        Ok(Ppm {
            knobs: self.knobs.clone(),
            detectors: keep.clone(),
            table,
        })
    }

    /// Tapes one knob down to a fixed setting; the knob leaves the domain.
    pub fn fix_knob(&self, name: &str, value: &Label) -> Result<Ppm> {
        let (reduced, pos) = self.knobs.without_factor(name)?;
        let factor = self.knobs.factor(name).expect("factor exists");
        let fixed = factor.index_of(value).ok_or_else(|| Error::UnknownSetting {
            factor: name.to_string(),
            label: value.to_string(),
        })?;
        let cols = self.num_outcomes();
        let mut table = Vec::with_capacity(reduced.num_points() * cols);
        for k in 0..reduced.num_points() {
            let mut coords = reduced.decode(k);
            coords.insert(pos, fixed);
            let full = self.knobs.encode(&coords);
            table.extend_from_slice(self.row(full));
        }
        Ok(Ppm {
            knobs: reduced,
            detectors: self.detectors.clone(),
            table,
        })
    }
}

fn tv_rows(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
}

/// Partition of the knob settings into blocks of identical rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnobPartition {
    blocks: Vec<Vec<usize>>,
}

impl KnobPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block index per setting.
    pub fn assignment(&self, num_settings: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; num_settings];
        for (b, members) in self.blocks.iter().enumerate() {
            for &k in members {
                out[k] = b;
            }
        }
        out
    }

    pub fn block_of(&self, setting: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&setting))
    }

    /// True when every block of `self` sits inside a block of `coarser`.
    pub fn refines(&self, coarser: &KnobPartition) -> bool {
        self.blocks.iter().all(|fine| {
            coarser
                .blocks
                .iter()
                .any(|big| fine.iter().all(|k| big.contains(k)))
        })
    }

    pub fn strictly_refines(&self, coarser: &KnobPartition) -> bool {
        self.refines(coarser) && self != coarser
    }
}

/// Metric on partition blocks: zero diagonal, symmetric, positive off the
/// diagonal, triangle inequality within tolerance. All checked at build.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientMetric {
    partition: KnobPartition,
    dist: Vec<f64>,
}

impl QuotientMetric {
    fn validate(partition: KnobPartition, dist: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        let nb = partition.num_blocks();
        for b1 in 0..nb {
            debug_assert_eq!(dist[b1 * nb + b1], 0.0);
            for b2 in 0..nb {
                debug_assert_eq!(dist[b1 * nb + b2], dist[b2 * nb + b1]);
                if b1 != b2 && dist[b1 * nb + b2] <= 0.0 {
                    return Err(Error::RepresentativeDependence {
                        max_dev: 0.0,
                        k1: partition.blocks[b1][0],
                        k2: partition.blocks[b2][0],
                    });
                }
                for b3 in 0..nb {
                    let lhs = dist[b1 * nb + b2];
                    let rhs = dist[b1 * nb + b3] + dist[b3 * nb + b2];
                    if lhs > rhs + tol.equality {
                        return Err(Error::RepresentativeDependence {
                            max_dev: lhs - rhs,
                            k1: partition.blocks[b1][0],
                            k2: partition.blocks[b2][0],
                        });
                    }
                }
            }
        }
        Ok(QuotientMetric { partition, dist })
    }

    pub fn partition(&self) -> &KnobPartition {
        &self.partition
    }

    pub fn dist(&self, b1: usize, b2: usize) -> f64 {
        self.dist[b1 * self.partition.num_blocks() + b2]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let nb = self.partition.num_blocks();
        (0..nb)
            .map(|b1| (0..nb).map(|b2| self.dist(b1, b2)).collect())
            .collect()
    }

    /// Entrywise comparison; partitions must match for this to be meaningful.
    pub fn approx_eq(&self, other: &QuotientMetric, tol: &Tolerances) -> bool {
        self.dist.len() == other.dist.len()
            && self
                .dist
                .iter()
                .zip(&other.dist)
                .all(|(a, b)| (a - b).abs() <= tol.equality)
    }
}

/// A supremum over setting pairs together with the pair attaining it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetDev {
    pub value: f64,
    pub witness: (usize, usize),
}

/// Deviation between the total-variation profiles of two tables over a
/// common knob domain. Zero exactly when the tables induce the same distance
/// profile; the detector domains may differ.
pub fn metdev_ppm(a: &Ppm, b: &Ppm) -> Result<MetDev> {
    if a.knobs != b.knobs {
        return Err(Error::KnobDomainMismatch);
    }
    let n = a.num_settings();
    let best = sweep::argmax_by(sweep::pair_count(n), |p| {
        let (k1, k2) = sweep::pair_at(n, p);
        (tv_rows(a.row(k1), a.row(k2)) - tv_rows(b.row(k1), b.row(k2))).abs()
    });
    Ok(match best {
        Some((p, value)) => MetDev {
            value,
            witness: sweep::pair_at(n, p),
        },
        None => MetDev {
            value: 0.0,
            witness: (0, 0),
        },
    })
}

/// Largest pointwise difference between two tables on identical domains,
/// with the (setting, outcome) pair attaining it.
pub fn max_abs_diff(a: &Ppm, b: &Ppm) -> Result<(f64, (usize, usize))> {
    if a.knobs != b.knobs {
        return Err(Error::KnobDomainMismatch);
    }
    if a.detectors != b.detectors {
        return Err(Error::DetectorDomainMismatch);
    }
    let cols = a.num_outcomes();
    let best = sweep::argmax_by(a.table.len(), |i| (a.table[i] - b.table[i]).abs());
    Ok(match best {
        Some((i, value)) => (value, (i / cols, i % cols)),
        None => (0.0, (0, 0)),
    })
}

/// Outcome of testing whether a vanishing deviation carries the equality of
/// induced structures: same partition (hence the same finite topology) and
/// the same quotient metric entrywise.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImplicationReport {
    pub metdev: f64,
    /// False when the deviation is nonzero and the implication says nothing.
    pub applicable: bool,
    pub partitions_equal: Option<bool>,
    pub metrics_equal: Option<bool>,
    pub violations: Vec<String>,
}

pub fn check_metdev_implication(a: &Ppm, b: &Ppm, tol: &Tolerances) -> Result<ImplicationReport> {
    let md = metdev_ppm(a, b)?;
    if md.value > tol.equality {
        return Ok(ImplicationReport {
            metdev: md.value,
            applicable: false,
            partitions_equal: None,
            metrics_equal: None,
            violations: Vec::new(),
        });
    }
    let mut violations = Vec::new();
    let pa = a.equiv_partition(tol);
    let pb = b.equiv_partition(tol);
    let partitions_equal = pa == pb;
    if !partitions_equal {
        violations.push(format!(
            "partitions differ: {} blocks vs {} blocks",
            pa.num_blocks(),
            pb.num_blocks()
        ));
    }
    let metrics_equal = if partitions_equal {
        let qa = a.quotient_metric(tol)?;
        let qb = b.quotient_metric(tol)?;
        let equal = qa.approx_eq(&qb, tol);
        if !equal {
            violations.push("quotient metrics differ entrywise".to_string());
        }
        equal
    } else {
        false
    };
    Ok(ImplicationReport {
        metdev: md.value,
        applicable: true,
        partitions_equal: Some(partitions_equal),
        metrics_equal: Some(metrics_equal),
        violations,
    })
}
