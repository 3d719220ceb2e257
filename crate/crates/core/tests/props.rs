//! Property tests for the structural invariants of the photonic simulator
//! and the entanglement utilities.

use proptest::prelude::*;

use vbsim::entanglement::{concurrence, partial_trace, partial_trace_state};
use vbsim::fock::{
    apply_tdc, coincidence_probability, ideal_hom_visibility, reflectivity_from_theta,
    theta_from_reflectivity, ModeLabel, PhotonicState, TdcSetting,
};
use vbsim::states::{C64, CVector, QubitState};

fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Two photons spread over ports 1..=3 with random complex creation
/// superpositions; always unit norm.
fn random_two_photon(params: &[f64; 8]) -> PhotonicState {
    let sup1 = [
        (ModeLabel::h(1), c64(params[0], params[1])),
        (ModeLabel::v(2), c64(params[2], params[3])),
    ];
    let sup2 = [
        (ModeLabel::v(1), c64(params[4], params[5])),
        (ModeLabel::h(3), c64(params[6], params[7])),
    ];
    let state = PhotonicState::vacuum()
        .apply_creation(&sup1)
        .unwrap()
        .apply_creation(&sup2)
        .unwrap();
    state.normalized().unwrap()
}

fn amp_param() -> impl Strategy<Value = f64> {
    (-1.0_f64..1.0).prop_filter("nonzero-ish", |x| x.abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tdc_preserves_norm(
        eta in 0.0_f64..=1.0,
        p in prop::array::uniform8(amp_param()),
    ) {
        let state = random_two_photon(&p);
        let out = apply_tdc(&state, 1, 2, (1, 2), &TdcSetting::new(eta).unwrap()).unwrap();
        prop_assert!((out.squared_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tdc_is_bilinear(
        eta in 0.0_f64..=1.0,
        p in prop::array::uniform8(amp_param()),
        q in prop::array::uniform8(amp_param()),
        wre in -1.0_f64..1.0,
        wim in -1.0_f64..1.0,
    ) {
        let setting = TdcSetting::new(eta).unwrap();
        let a = random_two_photon(&p);
        let b = random_two_photon(&q);
        let w = c64(wre, wim);
        let combined = a.scaled(w).unwrap().add(&b).unwrap();
        let through = apply_tdc(&combined, 1, 2, (1, 2), &setting).unwrap();
        let separate = apply_tdc(&a, 1, 2, (1, 2), &setting)
            .unwrap()
            .scaled(w)
            .unwrap()
            .add(&apply_tdc(&b, 1, 2, (1, 2), &setting).unwrap())
            .unwrap();
        let diff = through.add(&separate.scaled(c64(-1.0, 0.0)).unwrap()).unwrap();
        prop_assert!(diff.squared_norm() < 1e-20);
    }

    #[test]
    fn tdc_is_polarization_neutral(
        eta in 0.0_f64..=1.0,
        p in prop::array::uniform8(amp_param()),
    ) {
        let setting = TdcSetting::new(eta).unwrap();
        let state = random_two_photon(&p);
        let direct = apply_tdc(&state.polarization_swapped(), 1, 2, (1, 2), &setting).unwrap();
        let swapped = apply_tdc(&state, 1, 2, (1, 2), &setting)
            .unwrap()
            .polarization_swapped();
        let diff = direct.add(&swapped.scaled(c64(-1.0, 0.0)).unwrap()).unwrap();
        prop_assert!(diff.squared_norm() < 1e-20);
    }

    #[test]
    fn exclusive_pattern_probabilities_sum_below_one(
        eta in 0.0_f64..=1.0,
        p in prop::array::uniform8(amp_param()),
    ) {
        let state = apply_tdc(
            &random_two_photon(&p), 1, 2, (1, 2), &TdcSetting::new(eta).unwrap(),
        ).unwrap();
        let mut total = 0.0;
        for pattern in [[1u16, 2], [1, 3], [2, 3]] {
            match coincidence_probability(&state, &pattern) {
                Ok(prob) => {
                    prop_assert!((0.0..=1.0 + 1e-12).contains(&prob));
                    total += prob;
                }
                Err(vbsim::Error::UnknownMode(_)) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
        prop_assert!(total <= 1.0 + 1e-12);
    }

    #[test]
    fn theta_reflectivity_round_trip(eta in 0.0_f64..=1.0) {
        let theta = theta_from_reflectivity(eta).unwrap();
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_4 + 1e-15).contains(&theta));
        let back = reflectivity_from_theta(theta).unwrap();
        prop_assert!((back - eta).abs() < 1e-12);
    }

    #[test]
    fn visibility_stays_in_unit_interval(eta in 0.0_f64..=1.0) {
        let v = ideal_hom_visibility(eta).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn concurrence_bounded_and_trace_consistent(
        re in prop::array::uniform16(-1.0_f64..1.0),
        im in prop::array::uniform16(-1.0_f64..1.0),
    ) {
        // random 4-qubit pure state; every 2-qubit reduction has a valid
        // concurrence and tracing in two steps matches one step
        let mut amps = CVector::zeros(16);
        let mut norm = 0.0;
        for i in 0..16 {
            amps[i] = c64(re[i], im[i]);
            norm += amps[i].norm_sqr();
        }
        prop_assume!(norm > 1e-6);
        let state = QubitState::new(4, amps / c64(norm.sqrt(), 0.0)).unwrap();
        let one_step = partial_trace_state(&state, &[0, 2]).unwrap();
        let rho123 = partial_trace_state(&state, &[0, 2, 3]).unwrap();
        let two_step = partial_trace(&rho123, &[0, 1]).unwrap();
        prop_assert!((one_step.matrix() - two_step.matrix()).norm() < 1e-12);
        prop_assert!((one_step.trace() - 1.0).abs() < 1e-12);
        let c = concurrence(&one_step).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
    }
}
