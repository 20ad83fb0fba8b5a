//! Shared fixtures for unit tests.

use crate::config::Tolerances;
use crate::domains::{DetectorDomain, Factor, KnobDomain, Label};
use crate::ppm::Ppm;

pub(crate) fn angle_knob(name: &str, m: usize) -> Factor {
    Factor::new(
        name,
        (0..m).map(|t| Label::ratio(t as i64, m as i64)).collect(),
    )
    .unwrap()
}

pub(crate) fn indexed_detector(name: &str, n: usize) -> Factor {
    Factor::new(name, (0..n).map(|i| Label::text(i.to_string())).collect()).unwrap()
}

/// Closed-form polarization-correlation grid: two angle knobs with m
/// settings t/m of pi each, two binary detectors, rows
/// (c, s, s, c) with c = cos^2(difference) / 2 and s = sin^2(difference) / 2.
pub(crate) fn correlation_grid(m: usize) -> Ppm {
    let knobs = KnobDomain::new(vec![angle_knob("K_A", m), angle_knob("K_B", m)]).unwrap();
    let dets =
        DetectorDomain::new(vec![indexed_detector("D_A", 2), indexed_detector("D_B", 2)]).unwrap();
    let mut table = Vec::with_capacity(m * m * 4);
    for ta in 0..m {
        for tb in 0..m {
            let delta = std::f64::consts::PI * (ta as f64 - tb as f64) / m as f64;
            let c = 0.5 * delta.cos().powi(2);
            let s = 0.5 * delta.sin().powi(2);
            table.extend_from_slice(&[c, s, s, c]);
        }
    }
    Ppm::new(knobs, dets, table, &Tolerances::DEFAULT).unwrap()
}

/// The four-state ensemble table: one preparation knob with four settings,
/// one four-outcome detector modeling a measurement that picks one of two
/// conjugate bases at random. Rows are exact dyadic fractions.
pub(crate) fn four_state_table() -> Ppm {
    let knobs = KnobDomain::new(vec![Factor::from_texts(
        "state",
        &["z0", "z1", "x+", "x-"],
    )
    .unwrap()])
    .unwrap();
    let dets = DetectorDomain::new(vec![Factor::from_texts(
        "bob",
        &["z0", "z1", "x+", "x-"],
    )
    .unwrap()])
    .unwrap();
    let table = vec![
        0.5, 0.0, 0.25, 0.25, //
        0.0, 0.5, 0.25, 0.25, //
        0.25, 0.25, 0.5, 0.0, //
        0.25, 0.25, 0.0, 0.5,
    ];
    Ppm::new(knobs, dets, table, &Tolerances::DEFAULT).unwrap()
}
