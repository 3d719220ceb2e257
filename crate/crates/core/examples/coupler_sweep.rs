//! Sweeps the coupler angle, prints the entanglement landmarks of the
//! two-singlet family, and checks the state against the exact solver.
//!
//! Run with `cargo run --release --example coupler_sweep`.

use vbsim::entanglement::{pairwise_profile, zero_crossings, CrossingKind, ZeroCrossing};
use vbsim::fock::{simulate_postselected_state, SourceConfig, TdcSetting};
use vbsim::spin::{self, SpinSystem};
use vbsim::states::{C64, CVector, QubitState};

fn family(theta: f64) -> vbsim::Result<QubitState> {
    let setting = TdcSetting::from_theta(theta)?;
    let (_, state) = simulate_postselected_state(
        &SourceConfig::two_singlets(),
        &setting,
        (1, 3),
        &[1, 2, 3, 4],
    )?;
    Ok(state)
}

fn main() -> vbsim::Result<()> {
    let thetas: Vec<f64> = (0..=157).map(|i| i as f64 * 0.005).collect();
    let pairs = [(0usize, 1usize), (0, 2), (0, 3)];
    let profile = pairwise_profile(family, &pairs, &thetas)?;

    println!("entanglement landmarks of the two-singlet family:");
    for (label, pair) in [("C12", (0, 1)), ("C13", (0, 2)), ("C14", (0, 3))] {
        for crossing in zero_crossings(&profile, pair)? {
            if let ZeroCrossing::Point { theta, kind } = crossing {
                let verb = match kind {
                    CrossingKind::Birth => "born",
                    CrossingKind::Death => "dies",
                };
                println!("  {label} {verb} at theta = {theta:.4} (eta = {:.4})", theta.tan().powi(2));
            }
        }
    }

    // analog-simulation check: the eta = 0.3 state is the exact ground state
    // of the four-site J1-J2 model at J2/J1 = eta (2 - 3 eta) / (1 - 2 eta)
    let eta: f64 = 0.3;
    let state = family(eta.sqrt().atan())?;
    let j2 = eta * (2.0 - 3.0 * eta) / (1.0 - 2.0 * eta);
    let (_, ground, _) = spin::ground_state(&SpinSystem::four_site(1.0, j2, 0.0))?;
    let g = QubitState::new(
        4,
        CVector::from_iterator(16, ground.iter().map(|&x| C64::new(x, 0.0))),
    )?;
    println!(
        "\nat eta = {eta}: fidelity to the J2/J1 = {j2:.4} ground state = {:.12}",
        state.fidelity(&g)
    );
    Ok(())
}
