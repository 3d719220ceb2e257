//! Cross-validation between the photonic simulator and the exact spin
//! solver, plus convention-independence and statistical pipeline checks.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use vbsim::entanglement::{concurrence, monogamy_check, partial_trace_state};
use vbsim::fock::{
    apply_tdc, coincidence_postselect, simulate_postselected_state, PhaseConvention,
    SourceConfig, TdcSetting,
};
use vbsim::spin::{self, sz_sector_spectrum, SpinSystem};
use vbsim::states::{hermitian_eigenvalues, C64, CMatrix, CVector, QubitState};
use vbsim::tomography::{build_settings, reconstruct, simulate_counts};
use vbsim::valence::{covering_state, decompose, enumerate_coverings};

fn two_singlet_conditional(eta: f64) -> (f64, QubitState) {
    simulate_postselected_state(
        &SourceConfig::two_singlets(),
        &TdcSetting::new(eta).unwrap(),
        (1, 3),
        &[1, 2, 3, 4],
    )
    .unwrap()
}

#[test]
fn postselected_family_stays_in_the_singlet_sector() {
    for i in 0..=20 {
        let eta = i as f64 / 20.0;
        let (p, state) = two_singlet_conditional(eta);
        assert!((p - (1.0 - 3.0 * eta * (1.0 - eta))).abs() < 1e-12);
        let overlap = spin::singlet_sector_overlap(4, state.amplitudes()).unwrap();
        assert!(
            (overlap - 1.0).abs() <= 1e-10,
            "eta = {eta}: singlet-sector overlap {overlap}"
        );
    }
}

/// The coupler realizes the ground-state family of the four-site J1-J2
/// model under J2/J1 = eta (2 - 3 eta) / (1 - 2 eta) for eta < 1/2: the
/// analog simulation against the exact solver. At the balanced point the
/// family reaches the J2 >> J1 limit state Phi_||.
#[test]
fn postselected_family_matches_heisenberg_ground_states() {
    for i in 1..=9 {
        let eta = i as f64 / 20.0;
        let (_, photonic) = two_singlet_conditional(eta);
        let j2 = eta * (2.0 - 3.0 * eta) / (1.0 - 2.0 * eta);
        let system = SpinSystem::four_site(1.0, j2, 0.0);
        let (_, ground, degenerate) = spin::ground_state(&system).unwrap();
        assert!(!degenerate);
        let g = QubitState::new(
            4,
            CVector::from_iterator(16, ground.iter().map(|&x| C64::new(x, 0.0))),
        )
        .unwrap();
        let fidelity = photonic.fidelity(&g);
        assert!(
            fidelity >= 1.0 - 1e-8,
            "eta = {eta}: fidelity to the J2/J1 = {j2:.4} ground state is {fidelity}"
        );
    }
    // the balanced coupler projects onto the crossed singlet pairing
    let (_, at_half) = two_singlet_conditional(0.5);
    let phi_par = QubitState::psi_minus().tensor(&QubitState::psi_minus());
    // Phi_|| = singlets on (1,3),(2,4): permute the qubits of Phi_=
    let mut amps = CVector::zeros(16);
    for b in 0..16usize {
        // swap qubits 1 and 2 (0-based) of the (1,2)(3,4) pairing
        let q = [(b >> 3) & 1, (b >> 2) & 1, (b >> 1) & 1, b & 1];
        let permuted = (q[0] << 3) | (q[2] << 2) | (q[1] << 1) | q[3];
        amps[b] = phi_par.amplitudes()[permuted];
    }
    let phi_parallel = QubitState::new(4, amps).unwrap();
    assert!(at_half.fidelity(&phi_parallel) >= 1.0 - 1e-10);
}

#[test]
fn pair_symmetry_of_the_family() {
    for i in 0..=10 {
        let eta = i as f64 / 10.0;
        let (_, state) = two_singlet_conditional(eta);
        let c = |pair: (usize, usize)| {
            concurrence(&partial_trace_state(&state, &[pair.0, pair.1]).unwrap()).unwrap()
        };
        assert!((c((0, 1)) - c((2, 3))).abs() < 1e-10, "C12 = C34 at eta = {eta}");
        assert!((c((0, 2)) - c((1, 3))).abs() < 1e-10, "C13 = C24 at eta = {eta}");
    }
}

fn all_pair_concurrences(state: &QubitState) -> Vec<f64> {
    let mut cs = Vec::new();
    for a in 0..4 {
        for b in (a + 1)..4 {
            cs.push(concurrence(&partial_trace_state(state, &[a, b]).unwrap()).unwrap());
        }
    }
    cs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cs
}

#[test]
fn observables_are_phase_convention_independent() {
    for i in 0..=10 {
        let eta = i as f64 / 10.0;
        let reference = TdcSetting::new(eta).unwrap();
        let alternate = TdcSetting::new(eta)
            .unwrap()
            .with_convention(PhaseConvention::RealOrthogonal);
        let sources = SourceConfig::two_singlets();
        let run = |setting: &TdcSetting| {
            simulate_postselected_state(&sources, setting, (1, 3), &[1, 2, 3, 4]).unwrap()
        };
        let (p_ref, s_ref) = run(&reference);
        let (p_alt, s_alt) = run(&alternate);
        assert!((p_ref - p_alt).abs() < 1e-12, "probability at eta = {eta}");
        let (c_ref, c_alt) = (all_pair_concurrences(&s_ref), all_pair_concurrences(&s_alt));
        for (a, b) in c_ref.iter().zip(&c_alt) {
            assert!((a - b).abs() < 1e-10, "concurrences differ at eta = {eta}");
        }
    }
}

/// Which output port carries the "reflectivity" is not a physical choice:
/// swapping the assignment leaves the coincidence probability and the
/// multiset of pairwise concurrences unchanged.
#[test]
fn observables_are_port_assignment_independent() {
    let sources = SourceConfig::two_singlets();
    for i in 0..=10 {
        let eta = i as f64 / 10.0;
        let setting = TdcSetting::new(eta).unwrap();
        let state = sources.build_state().unwrap();
        let standard = apply_tdc(&state, 1, 3, (1, 3), &setting).unwrap();
        let swapped = apply_tdc(&state, 1, 3, (3, 1), &setting).unwrap();
        let (p_std, s_std) = coincidence_postselect(&standard, &[1, 2, 3, 4]).unwrap();
        let (p_swp, s_swp) = coincidence_postselect(&swapped, &[1, 2, 3, 4]).unwrap();
        assert!((p_std - p_swp).abs() < 1e-12, "probability at eta = {eta}");
        let (c_std, c_swp) = (all_pair_concurrences(&s_std), all_pair_concurrences(&s_swp));
        for (a, b) in c_std.iter().zip(&c_swp) {
            assert!((a - b).abs() < 1e-10, "concurrence multiset at eta = {eta}");
        }
    }
}

#[test]
fn spectrum_invariant_under_global_su2_rotation() {
    let system = SpinSystem::four_site(1.0, 0.7, 0.4);
    let h_real = system.hamiltonian();
    let dim = 16;
    let h = CMatrix::from_fn(dim, dim, |r, c| C64::new(h_real[(r, c)], 0.0));
    let u1 = vbsim::entanglement::su2(0.7, 1.9, -0.4);
    let mut u = CMatrix::identity(1, 1);
    for _ in 0..4 {
        u = u.kronecker(&u1);
    }
    let rotated = &u * &h * u.adjoint();
    let e_orig = hermitian_eigenvalues(&h);
    let e_rot = hermitian_eigenvalues(&rotated);
    for (a, b) in e_orig.iter().zip(&e_rot) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn spectral_decomposition_reconstructs_hamiltonian() {
    let system = SpinSystem::four_site(1.0, 0.3, 0.9);
    let h = system.hamiltonian();
    let (evals, evecs) = spin::symmetric_eigen_sorted(&h);
    let lambda = nalgebra::DMatrix::from_diagonal(&DVector::from_vec(evals));
    let back = &evecs * lambda * evecs.transpose();
    assert!((h - back).amax() < 1e-10);
}

#[test]
fn sector_spectra_are_submultisets_of_the_full_spectrum() {
    let lattice = vbsim::valence::CheckerboardLattice::default();
    let system = lattice.system(1.0, 0.8).unwrap();
    let (full, _) = spin::symmetric_eigen_sorted(&system.hamiltonian());
    for sz in [-1.0, 0.0, 1.0] {
        let dim = spin::sz_sector_basis(6, sz).unwrap().len();
        let slice = sz_sector_spectrum(&system, sz, dim).unwrap();
        let mut remaining = full.clone();
        for &e in &slice.eigenvalues {
            let pos = remaining
                .iter()
                .position(|&f| (f - e).abs() < 1e-10)
                .unwrap_or_else(|| panic!("sector eigenvalue {e} missing (sz = {sz})"));
            remaining.remove(pos);
        }
    }
}

#[test]
fn ckw_monogamy_on_haar_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    let normal = StandardNormal;
    for _ in 0..1000 {
        let amps = CVector::from_fn(16, |_, _| {
            C64::new(normal.sample(&mut rng), normal.sample(&mut rng))
        });
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let state = QubitState::new(4, amps / C64::new(norm.sqrt(), 0.0)).unwrap();
        for focus in 0..4 {
            let check = monogamy_check(&state, focus).unwrap();
            assert!(
                check.satisfied,
                "CKW violated: sum = {}, tangle = {}",
                check.sum_squared, check.tangle
            );
        }
    }
}

#[test]
fn separable_mixtures_have_zero_concurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let normal = StandardNormal;
    let uniform = Uniform::new(0.2_f64, 1.0).unwrap();
    for _ in 0..50 {
        // random mixture of product pure states
        let mut rho = CMatrix::zeros(4, 4);
        let mut total = 0.0;
        for _ in 0..4 {
            let single = |rng: &mut ChaCha8Rng| {
                let v = CVector::from_fn(2, |_, _| {
                    C64::new(normal.sample(rng), normal.sample(rng))
                });
                let n: f64 = v.iter().map(|a| a.norm_sqr()).sum();
                v / C64::new(n.sqrt(), 0.0)
            };
            let a = single(&mut rng);
            let b = single(&mut rng);
            let prod = a.kronecker(&b);
            let w = uniform.sample(&mut rng);
            rho += (&prod * prod.adjoint()) * C64::new(w, 0.0);
            total += w;
        }
        rho /= C64::new(total, 0.0);
        let rho = vbsim::states::DensityMatrix::new(rho).unwrap();
        let c = concurrence(&rho).unwrap();
        assert!(c < 1e-10, "separable state got concurrence {c}");
    }
}

#[test]
fn random_singlet_sector_states_decompose_exactly() {
    let coverings = enumerate_coverings(6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let normal = StandardNormal;
    for _ in 0..10 {
        // random combination of covering states spans the singlet sector
        let mut v = DVector::zeros(64);
        for c in &coverings {
            let w: f64 = normal.sample(&mut rng);
            v += covering_state(c) * w;
        }
        v /= v.norm();
        let cv = CVector::from_iterator(64, v.iter().map(|&x| C64::new(x, 0.0)));
        let dec = decompose(&cv, &coverings).unwrap();
        assert!(dec.residual < 1e-10, "residual {}", dec.residual);
    }
}

/// End-to-end: simulate the four-photon state, tomograph it with 10^6
/// events per setting, reconstruct, and compare pairwise concurrences with
/// the direct values.
#[test]
fn four_qubit_tomography_round_trip_tracks_direct_concurrences() {
    let settings = build_settings(4).unwrap();
    for (k, theta) in [0.0, 0.2, 0.43, 0.62, 0.78].iter().enumerate() {
        let setting = TdcSetting::from_theta(*theta).unwrap();
        let (_, state) = simulate_postselected_state(
            &SourceConfig::two_singlets(),
            &setting,
            (1, 3),
            &[1, 2, 3, 4],
        )
        .unwrap();
        let rho = state.to_density_matrix();
        let counts = simulate_counts(&rho, &settings, 1_000_000, 31 + k as u64).unwrap();
        let reconstructed = reconstruct(&counts).unwrap();
        for pair in [(0usize, 1usize), (0, 2), (0, 3)] {
            let direct =
                concurrence(&partial_trace_state(&state, &[pair.0, pair.1]).unwrap()).unwrap();
            let traced =
                vbsim::entanglement::partial_trace(&reconstructed, &[pair.0, pair.1]).unwrap();
            let from_tomo = concurrence(&traced).unwrap();
            assert!(
                (direct - from_tomo).abs() <= 0.02,
                "theta = {theta}, pair {pair:?}: direct {direct:.4} vs tomographic {from_tomo:.4}"
            );
        }
    }
}
