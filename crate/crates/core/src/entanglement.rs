//! Partial traces, Wootters concurrence, monogamy bookkeeping, and
//! sudden-death/birth detection on angle-parameterized state families.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::states::{
    hermitian_eigenvalues, pauli_y, C64, CMatrix, DensityMatrix, QubitState,
};

/// Reduced density matrix over the `keep` qubits (0-based, ascending output
/// order follows the order given).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if keep.is_empty() {
        return Err(Error::BadIndices("empty keep set".into()));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() || keep.iter().any(|&q| q >= n) {
        return Err(Error::BadIndices(format!("keep = {keep:?} over {n} qubits")));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let dim_keep = 1usize << k;
    let dim_traced = 1usize << traced.len();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(dim_keep, dim_keep);

    // basis index with qubit q at bit (n-1-q)
    let compose = |keep_bits: usize, traced_bits: usize| -> usize {
        let mut b = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            let bit = (keep_bits >> (k - 1 - pos)) & 1;
            b |= bit << (n - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            let bit = (traced_bits >> (traced.len().max(1) - 1 - pos)) & 1;
            b |= bit << (n - 1 - q);
        }
        b
    };

    for r in 0..dim_keep {
        for c in 0..dim_keep {
            let mut sum = C64::new(0.0, 0.0);
            for t in 0..dim_traced {
                sum += m[(compose(r, t), compose(c, t))];
            }
            out[(r, c)] = sum;
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(k, out))
}

/// Partial trace straight from a pure state.
pub fn partial_trace_state(state: &QubitState, keep: &[usize]) -> Result<DensityMatrix> {
    partial_trace(&state.to_density_matrix(), keep)
}

/// Signed Wootters quantity sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4) from
/// the eigenvalues of rho Sigma rho^T Sigma, Sigma = sigma_Y x sigma_Y.
/// The concurrence is its clip at zero; the signed value crosses zero
/// transversally and is what the crossing finder uses.
pub fn concurrence_signed(rho: &DensityMatrix) -> Result<f64> {
    if rho.n_qubits() != 2 {
        return Err(Error::InvalidArgument(format!(
            "concurrence needs a 2-qubit state, got {} qubits",
            rho.n_qubits()
        )));
    }
    let m = rho.matrix();
    let evals = hermitian_eigenvalues(m);
    let min = evals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < DensityMatrix::PSD_TOL {
        return Err(Error::NotPsd(min));
    }
    let sigma = pauli_y().kronecker(&pauli_y());
    // rho^T in the computational basis; for Hermitian rho this is the
    // entrywise conjugate.
    let rho_t = m.transpose();
    let rho_tilde = &sigma * rho_t * &sigma;
    // Eigenvalues of rho*rho_tilde via the Hermitian product
    // sqrt(rho) rho_tilde sqrt(rho), which shares its nonzero spectrum.
    let s = rho.sqrtm();
    let herm = &s * rho_tilde * &s;
    let mut lambdas = hermitian_eigenvalues(&herm);
    for l in lambdas.iter_mut() {
        if *l < 0.0 {
            if *l < -1e-10 {
                return Err(Error::NotPsd(*l));
            }
            *l = 0.0;
        }
    }
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(lambdas[0].sqrt() - lambdas[1].sqrt() - lambdas[2].sqrt() - lambdas[3].sqrt())
}

/// Wootters concurrence C = max{0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)}.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    Ok(concurrence_signed(rho)?.max(0.0))
}

/// Concurrence of one pair inside a larger pure state.
pub fn pair_concurrence(state: &QubitState, pair: (usize, usize)) -> Result<f64> {
    concurrence(&partial_trace_state(state, &[pair.0, pair.1])?)
}

/// Per-pair concurrence curves over a TDC-angle grid, with the signed
/// pre-clip values kept alongside for crossing localization.
#[derive(Debug, Clone)]
pub struct ConcurrenceProfile {
    pub thetas: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    /// `concurrence[pair_index][theta_index]`, clipped at zero
    pub concurrence: Vec<Vec<f64>>,
    /// signed pre-clip Wootters quantity, same shape
    pub signed: Vec<Vec<f64>>,
}

impl ConcurrenceProfile {
    pub fn pair_index(&self, pair: (usize, usize)) -> Option<usize> {
        let norm = (pair.0.min(pair.1), pair.0.max(pair.1));
        self.pairs
            .iter()
            .position(|&(a, b)| (a.min(b), a.max(b)) == norm)
    }
}

/// Evaluates the state family on the grid and reduces to each listed pair.
pub fn pairwise_profile<F>(
    family: F,
    pairs: &[(usize, usize)],
    thetas: &[f64],
) -> Result<ConcurrenceProfile>
where
    F: Fn(f64) -> Result<QubitState> + Sync,
{
    use rayon::prelude::*;
    if pairs.is_empty() || thetas.is_empty() {
        return Err(Error::InvalidArgument("empty pair list or theta grid".into()));
    }
    let per_theta: Vec<Vec<f64>> = thetas
        .par_iter()
        .map(|&theta| {
            let state = family(theta)?;
            state.check_normalized(1e-9)?;
            pairs
                .iter()
                .map(|&pair| {
                    concurrence_signed(&partial_trace_state(&state, &[pair.0, pair.1])?)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut signed = vec![vec![0.0; thetas.len()]; pairs.len()];
    for (t, row) in per_theta.iter().enumerate() {
        for (p, &w) in row.iter().enumerate() {
            signed[p][t] = w;
        }
    }
    let concurrence = signed
        .iter()
        .map(|row| row.iter().map(|&w| w.max(0.0)).collect())
        .collect();
    Ok(ConcurrenceProfile {
        thetas: thetas.to_vec(),
        pairs: pairs.to_vec(),
        concurrence,
        signed,
    })
}

/// Monogamy bookkeeping for one qubit of a pure state.
#[derive(Debug, Clone, Copy)]
pub struct MonogamyCheck {
    /// Sum of squared concurrences from the focus qubit to each partner.
    pub sum_squared: f64,
    /// One-vs-rest tangle 4 det(rho_focus).
    pub tangle: f64,
    pub satisfied: bool,
}

/// Verifies sum_j C^2(focus, j) <= 4 det(rho_focus) + 1e-9 on a pure state.
pub fn monogamy_check(state: &QubitState, focus: usize) -> Result<MonogamyCheck> {
    state.check_normalized(1e-9)?;
    let n = state.n_qubits();
    if focus >= n {
        return Err(Error::BadIndices(format!("focus {focus} over {n} qubits")));
    }
    let mut sum_squared = 0.0;
    for j in 0..n {
        if j == focus {
            continue;
        }
        let c = pair_concurrence(state, (focus, j))?;
        sum_squared += c * c;
    }
    let rho_f = partial_trace_state(state, &[focus])?;
    let m = rho_f.matrix();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let tangle = 4.0 * det;
    Ok(MonogamyCheck {
        sum_squared,
        tangle,
        satisfied: sum_squared <= tangle + 1e-9,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingKind {
    /// Concurrence leaves zero with increasing angle.
    Birth,
    /// Concurrence reaches zero.
    Death,
}

/// A located zero of the signed concurrence quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroCrossing {
    Point { theta: f64, kind: CrossingKind },
    /// The signed quantity sits at exactly zero across a grid stretch.
    Plateau { theta_start: f64, theta_end: f64 },
}

/// Locates sign changes of the pre-clip Wootters quantity for one pair,
/// with linear refinement between grid neighbors. Exact-zero stretches are
/// reported as plateaus rather than points.
pub fn zero_crossings(profile: &ConcurrenceProfile, pair: (usize, usize)) -> Result<Vec<ZeroCrossing>> {
    let idx = profile
        .pair_index(pair)
        .ok_or_else(|| Error::BadIndices(format!("pair {pair:?} not in profile")))?;
    let thetas = &profile.thetas;
    if thetas.len() >= 2 {
        let max_step = thetas
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0_f64, f64::max);
        if max_step > 0.01 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "grid step {max_step:.4} rad too coarse for crossing localization (need <= 0.01)"
            )));
        }
    }
    let w = &profile.signed[idx];
    let scale = w.iter().fold(0.0_f64, |m, &x| m.max(x.abs())).max(1e-300);
    let zero_tol = 1e-12 * scale;
    let sign_of = |x: f64| -> i8 {
        if x.abs() <= zero_tol {
            0
        } else if x > 0.0 {
            1
        } else {
            -1
        }
    };

    let mut out = Vec::new();
    let mut i = 0;
    while i < w.len() {
        if sign_of(w[i]) == 0 {
            let start = i;
            while i + 1 < w.len() && sign_of(w[i + 1]) == 0 {
                i += 1;
            }
            if i > start {
                out.push(ZeroCrossing::Plateau {
                    theta_start: thetas[start],
                    theta_end: thetas[i],
                });
            } else {
                // isolated exact zero: direction from the neighbors
                let before = if start > 0 { sign_of(w[start - 1]) } else { 0 };
                let after = if start + 1 < w.len() { sign_of(w[start + 1]) } else { 0 };
                if before < after {
                    out.push(ZeroCrossing::Point { theta: thetas[start], kind: CrossingKind::Birth });
                } else if before > after {
                    out.push(ZeroCrossing::Point { theta: thetas[start], kind: CrossingKind::Death });
                }
            }
        } else if i + 1 < w.len() {
            let s0 = sign_of(w[i]);
            let s1 = sign_of(w[i + 1]);
            if s0 != 0 && s1 != 0 && s0 != s1 {
                let t = thetas[i] + (0.0 - w[i]) * (thetas[i + 1] - thetas[i]) / (w[i + 1] - w[i]);
                let kind = if s1 > s0 { CrossingKind::Birth } else { CrossingKind::Death };
                out.push(ZeroCrossing::Point { theta: t, kind });
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Builds a Werner state p |Psi-><Psi-| + (1 - p) I/4.
pub fn werner_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("Werner weight {p}")));
    }
    QubitState::psi_minus()
        .to_density_matrix()
        .mix(&DensityMatrix::maximally_mixed(2), p)
}

/// GHZ state over n qubits.
pub fn ghz(n: usize) -> QubitState {
    let dim = 1usize << n;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = nalgebra::DVector::zeros(dim);
    amps[0] = C64::new(s, 0.0);
    amps[dim - 1] = C64::new(s, 0.0);
    QubitState::new(n, amps).expect("static dimensions")
}

/// 2x2 unitary from three Euler-like parameters; test helper for local
/// unitary invariance.
pub fn su2(alpha: f64, beta: f64, gamma: f64) -> DMatrix<C64> {
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let e = |x: f64| C64::new(0.0, x).exp();
    DMatrix::from_row_slice(2, 2, &[
        e(-(alpha + gamma) / 2.0) * c, -e(-(alpha - gamma) / 2.0) * s,
        e((alpha - gamma) / 2.0) * s, e((alpha + gamma) / 2.0) * c,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::states::kron;

    #[test]
    fn partial_trace_of_product_keeps_factor() {
        let state = QubitState::psi_minus().tensor(
            &QubitState::basis(1, 0).tensor(&QubitState::basis(1, 1)),
        );
        let rho = partial_trace_state(&state, &[0, 1]).unwrap();
        let target = QubitState::psi_minus().to_density_matrix();
        assert!((rho.matrix() - target.matrix()).norm() < 1e-12);
    }

    #[test]
    fn singlet_half_is_maximally_mixed() {
        let rho = partial_trace_state(&QubitState::psi_minus(), &[0]).unwrap();
        let target = DensityMatrix::maximally_mixed(1);
        assert!((rho.matrix() - target.matrix()).norm() < 1e-12);
    }

    #[test]
    fn ghz_pair_is_classically_correlated() {
        let rho = partial_trace_state(&ghz(4), &[0, 1]).unwrap();
        let m = rho.matrix();
        assert_abs_diff_eq!(m[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m[(3, 3)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m[(0, 3)].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn two_step_trace_equals_one_step() {
        let state = ghz(4);
        let one = partial_trace_state(&state, &[1, 3]).unwrap();
        let rho123 = partial_trace_state(&state, &[1, 2, 3]).unwrap();
        let two = partial_trace(&rho123, &[0, 2]).unwrap();
        assert!((one.matrix() - two.matrix()).norm() < 1e-12);
    }

    #[test]
    fn concurrence_reference_values() {
        let singlet = QubitState::psi_minus().to_density_matrix();
        assert_abs_diff_eq!(concurrence(&singlet).unwrap(), 1.0, epsilon = 1e-10);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(concurrence(&mixed).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn werner_concurrence_closed_form() {
        for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.75, 1.0] {
            let w = werner_state(p).unwrap();
            let expect = (0.0_f64).max((3.0 * p - 1.0) / 2.0);
            assert_abs_diff_eq!(concurrence(&w).unwrap(), expect, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(
            concurrence(&werner_state(0.5).unwrap()).unwrap(),
            0.25,
            epsilon = 1e-10
        );
    }

    #[test]
    fn concurrence_invariant_under_local_unitaries() {
        let rho = werner_state(0.8).unwrap();
        let c0 = concurrence(&rho).unwrap();
        let u = kron(&su2(0.3, 1.1, -0.7), &su2(-1.9, 0.4, 2.2));
        let m = &u * rho.matrix() * u.adjoint();
        let rotated = DensityMatrix::new(m).unwrap();
        assert_abs_diff_eq!(concurrence(&rotated).unwrap(), c0, epsilon = 1e-10);
    }

    #[test]
    fn monogamy_saturates_on_singlet_pairs() {
        let state = QubitState::psi_minus().tensor(&QubitState::psi_minus());
        let check = monogamy_check(&state, 0).unwrap();
        assert_abs_diff_eq!(check.sum_squared, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(check.tangle, 1.0, epsilon = 1e-12);
        assert!(check.satisfied);

        let product = QubitState::basis(4, 0);
        let check = monogamy_check(&product, 0).unwrap();
        assert_abs_diff_eq!(check.sum_squared, 0.0, epsilon = 1e-12);
        assert!(check.satisfied);
    }

    #[test]
    fn crossing_finder_on_synthetic_curve() {
        // signed quantity theta - 0.3: birth at 0.300
        let thetas: Vec<f64> = (0..=100).map(|i| i as f64 * 0.005).collect();
        let signed: Vec<f64> = thetas.iter().map(|&t| t - 0.3).collect();
        let profile = ConcurrenceProfile {
            thetas: thetas.clone(),
            pairs: vec![(0, 1)],
            concurrence: vec![signed.iter().map(|&w| w.max(0.0)).collect()],
            signed: vec![signed],
        };
        let crossings = zero_crossings(&profile, (0, 1)).unwrap();
        assert_eq!(crossings.len(), 1);
        match crossings[0] {
            ZeroCrossing::Point { theta, kind } => {
                assert_abs_diff_eq!(theta, 0.3, epsilon = 0.005);
                assert_eq!(kind, CrossingKind::Birth);
            }
            _ => panic!("expected a point crossing"),
        }
    }

    #[test]
    fn crossing_finder_reports_plateaus_and_monotone_curves() {
        let thetas: Vec<f64> = (0..=100).map(|i| i as f64 * 0.005).collect();
        let positive: Vec<f64> = thetas.iter().map(|&t| 0.2 + t).collect();
        let profile = ConcurrenceProfile {
            thetas: thetas.clone(),
            pairs: vec![(0, 1), (0, 2)],
            concurrence: vec![positive.clone(), vec![0.0; thetas.len()]],
            signed: vec![
                positive,
                thetas
                    .iter()
                    .map(|&t| if (0.1..=0.2).contains(&t) { 0.0 } else { t - 0.3 })
                    .collect(),
            ],
        };
        assert!(zero_crossings(&profile, (0, 1)).unwrap().is_empty());
        let crossings = zero_crossings(&profile, (0, 2)).unwrap();
        assert!(crossings.iter().any(|c| matches!(
            c,
            ZeroCrossing::Plateau { theta_start, theta_end }
                if *theta_start <= 0.11 && *theta_end >= 0.19
        )));

        let coarse = ConcurrenceProfile {
            thetas: vec![0.0, 0.1, 0.2],
            pairs: vec![(0, 1)],
            concurrence: vec![vec![0.0; 3]],
            signed: vec![vec![-1.0, 0.0, 1.0]],
        };
        assert!(zero_crossings(&coarse, (0, 1)).is_err());
    }
}
