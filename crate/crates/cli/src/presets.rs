//! Figure presets. Random families use the pinned seeds below; the draws are
//! figure-style, not the original data.

use std::f64::consts::PI;

use cmv_core::{Complex64, SchurSpec, USequenceSpec, UnitPoint};

pub const SEED_HALFPLANE: u64 = 7;
pub const SEED_BAND_ODD: u64 = 8;
pub const SEED_BAND_EVEN: u64 = 9;
pub const SEED_ARC: u64 = 10;
pub const SEED_TWO_SET: u64 = 11;

pub const BASE_ORDERS: [usize; 4] = [50, 51, 200, 201];
pub const FULL_ORDERS: [usize; 2] = [1000, 1001];

#[derive(Debug, Clone)]
pub struct FigurePreset {
    pub id: &'static str,
    pub caption: &'static str,
    pub spec: SchurSpec,
    pub uspec: USequenceSpec,
}

impl FigurePreset {
    pub fn orders(&self, full: bool) -> Vec<usize> {
        let mut v = BASE_ORDERS.to_vec();
        if full {
            v.extend(FULL_ORDERS);
        }
        v
    }
}

pub const FIGURE_IDS: [&str; 12] =
    ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12"];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn w(z: Complex64) -> USequenceSpec {
    USequenceSpec::fixed_zero(UnitPoint::new(z).expect("preset points are unimodular"))
}

pub fn figure_preset(id: &str) -> Option<FigurePreset> {
    let half = SchurSpec::Constant(c(0.5, 0.0));
    let two = SchurSpec::TwoPeriodic { odd: c(0.25, 0.0), even: c(0.75, 0.0) };
    let r = (3.0 * PI / 8.0).sin();
    let plus = Complex64::from_polar(r, PI / 3.0);
    let minus = Complex64::from_polar(r, -PI / 3.0);
    let w3 = Complex64::from_polar(1.0, PI / 3.0);
    let (caption, spec, uspec) = match id {
        "fig1" => ("constant 1/2, fixed zero at 1", half, w(c(1.0, 0.0))),
        "fig2" => ("constant 1/2, fixed zero at -1", half, w(c(-1.0, 0.0))),
        "fig3" => ("constant 1/2, u_n = a_n/|a_n|", half, USequenceSpec::phase()),
        "fig4" => ("two-periodic 1/4, 3/4, fixed zero at 1", two, w(c(1.0, 0.0))),
        "fig5" => ("two-periodic 1/4, 3/4, fixed zero at i", two, w(c(0.0, 1.0))),
        "fig6" => ("two-periodic 1/4, 3/4, u_n = a_n/|a_n|", two, USequenceSpec::phase()),
        "fig7" => (
            "random on Re z >= 1/2, fixed zero at -1",
            SchurSpec::RandomHalfPlane { u: c(1.0, 0.0), cos_alpha0: 0.5, seed: SEED_HALFPLANE },
            w(c(-1.0, 0.0)),
        ),
        "fig8" => (
            "odd terms random on Re z <= 1/4, even on Re z >= 3/4, fixed zero at 1",
            SchurSpec::Parity {
                odd: Box::new(SchurSpec::RandomHalfPlane { u: c(-1.0, 0.0), cos_alpha0: -0.25, seed: SEED_BAND_ODD }),
                even: Box::new(SchurSpec::RandomHalfPlane { u: c(1.0, 0.0), cos_alpha0: 0.75, seed: SEED_BAND_EVEN }),
            },
            w(c(1.0, 0.0)),
        ),
        "fig9" => (
            "odd terms random on the half circle around 1/4, even 3/4, fixed zero at i",
            SchurSpec::Parity {
                odd: Box::new(SchurSpec::RandomArc { center: c(0.25, 0.0), half_width: PI / 2.0, seed: SEED_ARC }),
                even: Box::new(SchurSpec::Constant(c(0.75, 0.0))),
            },
            w(c(0.0, 1.0)),
        ),
        // Prime indices take the e^{+iπ/3} factor.
        "fig10" => (
            "sin(3pi/8) e^{+-i pi/3} at prime / other indices, fixed zero at e^{i pi/3}",
            SchurSpec::Prime { prime: plus, composite: minus },
            w(w3),
        ),
        "fig11" => (
            "random on {sin(3pi/8) e^{+-i pi/3}}, fixed zero at e^{i pi/3}",
            SchurSpec::RandomSet { values: vec![plus, minus], seed: SEED_TWO_SET },
            w(w3),
        ),
        "fig12" => (
            "sin(3pi/8) e^{+i pi/3} at even, e^{-i pi/3} at odd indices, fixed zero at e^{i pi/3}",
            SchurSpec::TwoPeriodic { odd: minus, even: plus },
            w(w3),
        ),
        _ => return None,
    };
    let id = FIGURE_IDS.iter().find(|f| **f == id).expect("known id");
    Some(FigurePreset { id, caption, spec, uspec })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_resolves() {
        for id in FIGURE_IDS {
            assert!(figure_preset(id).is_some(), "{id}");
        }
        assert!(figure_preset("fig13").is_none());
    }

    #[test]
    fn fig1_configuration() {
        let p = figure_preset("fig1").unwrap();
        assert_eq!(p.spec.to_string(), "constant:0.5");
        assert_eq!(p.uspec.to_string(), "fixed-zero:1.0");
        assert_eq!(p.orders(true), vec![50, 51, 200, 201, 1000, 1001]);
        assert_eq!(p.orders(false), vec![50, 51, 200, 201]);
    }

    #[test]
    fn fig6_uses_phase() {
        assert!(matches!(figure_preset("fig6").unwrap().uspec.mode, cmv_core::UMode::Phase));
    }
}
