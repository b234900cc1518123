#![allow(dead_code)]

use grunsky_core::map_zoo::{validate_rigging, ConformalMapModel, Rigging};
use num_complex::Complex64;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn affine(re: f64, im: f64, r: f64) -> ConformalMapModel {
    ConformalMapModel::affine_disk(cx(re, im), r).unwrap()
}

pub fn quadratic(re: f64, im: f64, c: Complex64) -> ConformalMapModel {
    ConformalMapModel::quadratic(cx(re, im), c).unwrap()
}

pub fn joukowski(re: f64, im: f64, c: Complex64) -> ConformalMapModel {
    ConformalMapModel::joukowski_ellipse(cx(re, im), c).unwrap()
}

pub struct Case {
    pub name: &'static str,
    pub rigging: Rigging,
}

fn case(name: &'static str, maps: Vec<ConformalMapModel>) -> Case {
    Case {
        name,
        rigging: validate_rigging(maps, 256).unwrap_or_else(|e| panic!("{name}: {e}")),
    }
}

/// Certified riggings with one to four maps.
pub fn battery() -> Vec<Case> {
    vec![
        case("single quadratic", vec![quadratic(0.0, 0.0, cx(0.2, 0.0))]),
        case("single ellipse", vec![joukowski(1.0, 1.0, cx(0.3, 0.1))]),
        case("affine pair", vec![affine(0.0, 0.0, 1.0), affine(3.0, 0.0, 1.0)]),
        case(
            "quadratic and ellipse",
            vec![quadratic(0.0, 0.0, cx(0.25, 0.0)), joukowski(3.0, 1.0, cx(0.2, 0.0))],
        ),
        case(
            "disk and rotated quadratic",
            vec![affine(0.0, 0.0, 0.8), quadratic(2.5, 0.0, cx(0.1, -0.2))],
        ),
        case(
            "symmetric triple",
            vec![
                quadratic(0.0, 0.0, cx(0.2, 0.0)),
                affine(3.0, 0.0, 1.0),
                joukowski(-3.0, 0.0, cx(0.2, 0.1)),
            ],
        ),
        case(
            "skew triple",
            vec![
                affine(1.0, 1.0, 0.5),
                quadratic(4.0, 0.0, cx(0.3, 0.0)),
                joukowski(-2.0, 3.0, cx(-0.25, 0.0)),
            ],
        ),
        case(
            "close triple",
            vec![affine(0.0, 0.0, 1.0), affine(2.2, 0.0, 1.0), quadratic(-2.3, 0.0, cx(0.2, 0.0))],
        ),
        case(
            "affine quadruple",
            vec![
                affine(0.0, 0.0, 1.0),
                affine(3.0, 0.0, 1.0),
                affine(-3.0, 0.0, 1.0),
                affine(0.0, 3.0, 1.0),
            ],
        ),
        case(
            "mixed quadruple",
            vec![
                quadratic(0.0, 0.0, cx(0.3, 0.0)),
                joukowski(3.0, 0.0, cx(0.3, 0.0)),
                quadratic(-3.0, 0.0, cx(0.0, -0.2)),
                affine(0.5, 3.5, 1.2),
            ],
        ),
        case(
            "skew quadruple",
            vec![
                joukowski(0.5, -0.5, cx(0.1, 0.2)),
                affine(4.0, 1.0, 0.7),
                quadratic(-2.5, 2.0, cx(0.15, 0.0)),
                joukowski(1.0, -4.0, cx(-0.3, 0.0)),
            ],
        ),
    ]
}
