//! Projective Pauli-basis tomography with Poissonian counting statistics:
//! settings, simulated counts, linear-inversion reconstruction, and Monte
//! Carlo error propagation.

use std::io::{BufRead, Write};

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;

use crate::error::{Error, Result};
use crate::states::{hermitian_eigen, kron, pauli_i, pauli_x, pauli_y, pauli_z, C64, CMatrix, DensityMatrix};

/// Measurement basis for one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn letter(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    pub fn parse(c: char) -> Result<Self> {
        match c {
            'X' => Ok(Basis::X),
            'Y' => Ok(Basis::Y),
            'Z' => Ok(Basis::Z),
            other => Err(Error::ConfigGeneral(format!("unknown basis letter '{other}'"))),
        }
    }

    /// Eigenvector for outcome bit 0 (+1 eigenvalue) or 1 (-1 eigenvalue).
    fn eigenvector(self, bit: usize) -> [C64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match (self, bit) {
            (Basis::Z, 0) => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            (Basis::Z, 1) => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            (Basis::X, 0) => [C64::new(s, 0.0), C64::new(s, 0.0)],
            (Basis::X, 1) => [C64::new(s, 0.0), C64::new(-s, 0.0)],
            (Basis::Y, 0) => [C64::new(s, 0.0), C64::new(0.0, s)],
            (Basis::Y, 1) => [C64::new(s, 0.0), C64::new(0.0, -s)],
            _ => unreachable!(),
        }
    }

}

/// One tomographic setting: a measurement basis per qubit. Outcomes are
/// bitstrings, bit 0 meaning the +1 eigenvector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementSetting {
    pub bases: Vec<Basis>,
}

impl MeasurementSetting {
    pub fn n_qubits(&self) -> usize {
        self.bases.len()
    }

    pub fn basis_string(&self) -> String {
        self.bases.iter().map(|b| b.letter()).collect()
    }

    /// Born probability of each of the 2^n outcomes under `rho`.
    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        let n = self.n_qubits();
        if rho.n_qubits() != n {
            return Err(Error::InvalidArgument(format!(
                "setting over {n} qubits applied to a {}-qubit state",
                rho.n_qubits()
            )));
        }
        let dim = 1usize << n;
        let m = rho.matrix();
        let mut probs = Vec::with_capacity(dim);
        for outcome in 0..dim {
            // projector |v><v| with v a tensor product of single-qubit
            // eigenvectors; p = <v|rho|v>
            let mut v = vec![C64::new(1.0, 0.0)];
            for (q, basis) in self.bases.iter().enumerate() {
                let bit = (outcome >> (n - 1 - q)) & 1;
                let e = basis.eigenvector(bit);
                let mut next = Vec::with_capacity(v.len() * 2);
                for amp in &v {
                    next.push(amp * e[0]);
                    next.push(amp * e[1]);
                }
                v = next;
            }
            let mut p = 0.0;
            for r in 0..dim {
                let mut row = C64::new(0.0, 0.0);
                for c in 0..dim {
                    row += m[(r, c)] * v[c];
                }
                p += (v[r].conj() * row).re;
            }
            probs.push(p.max(0.0));
        }
        Ok(probs)
    }
}

/// The full informationally complete set of 3^n Pauli settings, in base-3
/// order with X < Y < Z per position.
pub fn build_settings(n_qubits: usize) -> Result<Vec<MeasurementSetting>> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    let count = 3usize.pow(n_qubits as u32);
    let mut settings = Vec::with_capacity(count);
    for mut code in 0..count {
        let mut bases = vec![Basis::X; n_qubits];
        for q in (0..n_qubits).rev() {
            bases[q] = Basis::ALL[code % 3];
            code /= 3;
        }
        settings.push(MeasurementSetting { bases });
    }
    Ok(settings)
}

/// Per-setting, per-outcome event counts with the generating seed recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsTable {
    pub n_qubits: usize,
    pub events_per_setting: u64,
    pub seed: u64,
    pub settings: Vec<MeasurementSetting>,
    /// `counts[setting][outcome]`
    pub counts: Vec<Vec<u64>>,
}

impl CountsTable {
    /// CSV with a comment header recording seed and events per setting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# seed={} events={}", self.seed, self.events_per_setting)?;
        writeln!(w, "setting_id,basis_string,outcome_string,count")?;
        for (sid, (setting, row)) in self.settings.iter().zip(&self.counts).enumerate() {
            let n = setting.n_qubits();
            for (outcome, &count) in row.iter().enumerate() {
                let bits: String = (0..n)
                    .map(|q| if (outcome >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' })
                    .collect();
                writeln!(w, "{},{},{},{}", sid, setting.basis_string(), bits, count)?;
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut seed = 0u64;
        let mut events = 0u64;
        let mut rows: Vec<(usize, String, String, u64)> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for field in rest.split_whitespace() {
                    if let Some(v) = field.strip_prefix("seed=") {
                        seed = v.parse().map_err(|_| Error::Config {
                            line: lineno + 1,
                            msg: format!("bad seed '{v}'"),
                        })?;
                    } else if let Some(v) = field.strip_prefix("events=") {
                        events = v.parse().map_err(|_| Error::Config {
                            line: lineno + 1,
                            msg: format!("bad events '{v}'"),
                        })?;
                    }
                }
                continue;
            }
            if line.starts_with("setting_id") {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::Config {
                    line: lineno + 1,
                    msg: format!("expected 4 fields, got {}", parts.len()),
                });
            }
            let sid: usize = parts[0].parse().map_err(|_| Error::Config {
                line: lineno + 1,
                msg: format!("bad setting id '{}'", parts[0]),
            })?;
            let count: u64 = parts[3].parse().map_err(|_| Error::Config {
                line: lineno + 1,
                msg: format!("bad count '{}'", parts[3]),
            })?;
            rows.push((sid, parts[1].to_string(), parts[2].to_string(), count));
        }
        if rows.is_empty() {
            return Err(Error::ConfigGeneral("empty counts table".into()));
        }
        let n_qubits = rows[0].1.len();
        let n_settings = rows.iter().map(|r| r.0).max().unwrap() + 1;
        let dim = 1usize << n_qubits;
        let mut settings = vec![None; n_settings];
        let mut counts = vec![vec![0u64; dim]; n_settings];
        for (sid, basis, outcome, count) in rows {
            let bases: Result<Vec<Basis>> = basis.chars().map(Basis::parse).collect();
            settings[sid] = Some(MeasurementSetting { bases: bases? });
            let idx = usize::from_str_radix(&outcome, 2)
                .map_err(|_| Error::ConfigGeneral(format!("bad outcome '{outcome}'")))?;
            counts[sid][idx] = count;
        }
        let settings: Vec<MeasurementSetting> = settings
            .into_iter()
            .map(|s| s.ok_or_else(|| Error::ConfigGeneral("missing setting rows".into())))
            .collect::<Result<_>>()?;
        Ok(Self { n_qubits, events_per_setting: events, seed, settings, counts })
    }

    /// Outcome frequencies per setting; a setting with zero total counts
    /// yields the uniform distribution (maximally uninformative).
    pub fn frequencies(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|row| {
                let total: u64 = row.iter().sum();
                if total == 0 {
                    vec![1.0 / row.len() as f64; row.len()]
                } else {
                    row.iter().map(|&c| c as f64 / total as f64).collect()
                }
            })
            .collect()
    }
}

/// Draws count ~ Poisson(N * p_outcome) independently per outcome, in fixed
/// setting/outcome order from a ChaCha stream, so a seed pins the table.
pub fn simulate_counts(
    rho: &DensityMatrix,
    settings: &[MeasurementSetting],
    events_per_setting: u64,
    seed: u64,
) -> Result<CountsTable> {
    if settings.is_empty() {
        return Err(Error::IncompleteSettings("no settings".into()));
    }
    if events_per_setting == 0 {
        return Err(Error::InvalidArgument("events per setting must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(settings.len());
    for setting in settings {
        let probs = setting.outcome_probabilities(rho)?;
        let row: Vec<u64> = probs
            .iter()
            .map(|&p| sample_poisson(&mut rng, events_per_setting as f64 * p))
            .collect::<Result<_>>()?;
        counts.push(row);
    }
    Ok(CountsTable {
        n_qubits: rho.n_qubits(),
        events_per_setting,
        seed,
        settings: settings.to_vec(),
        counts,
    })
}

fn sample_poisson(rng: &mut ChaCha8Rng, lambda: f64) -> Result<u64> {
    if lambda <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(lambda)
        .map_err(|e| Error::InvalidArgument(format!("Poisson({lambda}): {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// Linear inversion from outcome frequencies followed by projection to the
/// PSD trace-one cone (eigenvalue clipping plus renormalization). Exact on
/// noiseless probabilities.
pub fn reconstruct_from_frequencies(
    settings: &[MeasurementSetting],
    frequencies: &[Vec<f64>],
) -> Result<DensityMatrix> {
    if settings.is_empty() || settings.len() != frequencies.len() {
        return Err(Error::IncompleteSettings(format!(
            "{} settings against {} frequency rows",
            settings.len(),
            frequencies.len()
        )));
    }
    let n = settings[0].n_qubits();
    let expected = build_settings(n)?;
    if settings.len() != expected.len()
        || expected
            .iter()
            .any(|e| !settings.iter().any(|s| s == e))
    {
        return Err(Error::IncompleteSettings(format!(
            "need all {} Pauli settings over {} qubits",
            expected.len(),
            n
        )));
    }
    let dim = 1usize << n;

    // <P> for every Pauli string, averaged over the compatible settings.
    // String code: base-4 digits, 0 = I, 1 = X, 2 = Y, 3 = Z, qubit 0 most
    // significant.
    let mut rho = CMatrix::zeros(dim, dim);
    for code in 0..4usize.pow(n as u32) {
        let letters: Vec<usize> = {
            let mut c = code;
            let mut l = vec![0usize; n];
            for q in (0..n).rev() {
                l[q] = c % 4;
                c /= 4;
            }
            l
        };
        let mut estimate = 0.0;
        let mut used = 0usize;
        for (setting, freqs) in settings.iter().zip(frequencies) {
            let compatible = letters.iter().enumerate().all(|(q, &l)| {
                l == 0
                    || matches!(
                        (l, setting.bases[q]),
                        (1, Basis::X) | (2, Basis::Y) | (3, Basis::Z)
                    )
            });
            if !compatible {
                continue;
            }
            let mut value = 0.0;
            for (outcome, &f) in freqs.iter().enumerate() {
                let mut sign = 1.0;
                for (q, &l) in letters.iter().enumerate() {
                    if l != 0 && (outcome >> (n - 1 - q)) & 1 == 1 {
                        sign = -sign;
                    }
                }
                value += sign * f;
            }
            estimate += value;
            used += 1;
        }
        if used == 0 {
            return Err(Error::IncompleteSettings(format!(
                "no setting measures Pauli string code {code}"
            )));
        }
        estimate /= used as f64;
        // accumulate estimate * P / 2^n
        let mut op = CMatrix::identity(1, 1);
        for &l in &letters {
            let factor = match l {
                0 => pauli_i(),
                1 => pauli_x(),
                2 => pauli_y(),
                _ => pauli_z(),
            };
            op = kron(&op, &factor);
        }
        rho += op * C64::new(estimate / dim as f64, 0.0);
    }

    // PSD projection: clip negative eigenvalues, renormalize the trace.
    let (evals, evecs) = hermitian_eigen(&rho);
    let mut projected = CMatrix::zeros(dim, dim);
    let mut trace = 0.0;
    for (k, &l) in evals.iter().enumerate() {
        let clipped = l.max(0.0);
        if clipped == 0.0 {
            continue;
        }
        trace += clipped;
        let v = evecs.column(k);
        projected += (v * v.adjoint()) * C64::new(clipped, 0.0);
    }
    if trace <= 0.0 {
        return Err(Error::NotPsd(evals[0]));
    }
    projected /= C64::new(trace, 0.0);
    Ok(DensityMatrix::from_parts_unchecked(n, projected))
}

/// Reconstruction straight from a counts table.
pub fn reconstruct(counts: &CountsTable) -> Result<DensityMatrix> {
    reconstruct_from_frequencies(&counts.settings, &counts.frequencies())
}

/// Mean and sample standard deviation of a functional under Poissonian
/// resampling of the observed counts. Each resample carries a seed derived
/// from `seed` and its index, so parallel and serial runs agree.
pub fn monte_carlo_uncertainty<F>(
    counts: &CountsTable,
    resamples: usize,
    seed: u64,
    functional: F,
) -> Result<(f64, f64)>
where
    F: Fn(&DensityMatrix) -> Result<f64> + Sync,
{
    use rayon::prelude::*;
    if resamples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need >= 2 resamples, got {resamples}"
        )));
    }
    let values: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(r as u64 + 1)));
            let mut resampled = counts.clone();
            for row in resampled.counts.iter_mut() {
                for c in row.iter_mut() {
                    *c = sample_poisson(&mut rng, *c as f64)?;
                }
            }
            functional(&reconstruct(&resampled)?)
        })
        .collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    Ok((mean, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::concurrence;
    use crate::states::QubitState;
    use approx::assert_abs_diff_eq;

    #[test]
    fn setting_counts() {
        assert_eq!(build_settings(1).unwrap().len(), 3);
        assert_eq!(build_settings(2).unwrap().len(), 9);
        assert_eq!(build_settings(4).unwrap().len(), 81);
        assert!(build_settings(0).is_err());
    }

    #[test]
    fn z_measurement_of_h_is_deterministic() {
        let rho = QubitState::basis(1, 0).to_density_matrix();
        let setting = MeasurementSetting { bases: vec![Basis::Z] };
        let probs = setting.outcome_probabilities(&rho).unwrap();
        assert_abs_diff_eq!(probs[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(probs[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn counts_are_deterministic_given_seed() {
        let rho = QubitState::psi_minus().to_density_matrix();
        let settings = build_settings(2).unwrap();
        let a = simulate_counts(&rho, &settings, 1000, 42).unwrap();
        let b = simulate_counts(&rho, &settings, 1000, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_counts(&rho, &settings, 1000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empirical_frequencies_approach_born_probabilities() {
        let rho = QubitState::psi_minus().to_density_matrix();
        let settings = build_settings(2).unwrap();
        let n = 1_000_000u64;
        let table = simulate_counts(&rho, &settings, n, 7).unwrap();
        for (setting, freqs) in settings.iter().zip(table.frequencies()) {
            let probs = setting.outcome_probabilities(&rho).unwrap();
            for (p, f) in probs.iter().zip(freqs) {
                // 3 sigma of a Poisson proportion
                let tol = 3.0 * (p.max(1e-9) / n as f64).sqrt() + 1e-6;
                assert!(
                    (p - f).abs() < tol,
                    "freq {f} vs prob {p} beyond {tol} for {}",
                    setting.basis_string()
                );
            }
        }
    }

    #[test]
    fn noiseless_reconstruction_is_exact() {
        for state in [QubitState::psi_minus(), QubitState::phi_plus()] {
            let rho = state.to_density_matrix();
            let settings = build_settings(2).unwrap();
            let probs: Vec<Vec<f64>> = settings
                .iter()
                .map(|s| s.outcome_probabilities(&rho).unwrap())
                .collect();
            let rec = reconstruct_from_frequencies(&settings, &probs).unwrap();
            assert!(rec.trace_distance(&rho) < 1e-10);
            assert!(rec.fidelity_with_pure(&state) > 1.0 - 1e-10);
        }
    }

    #[test]
    fn noiseless_reconstruction_exact_for_random_mixed_states() {
        use rand::RngExt;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3usize {
            let dim = 1usize << n;
            // random PSD matrix A A^dag, normalized
            let a = CMatrix::from_fn(dim, dim, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let mut m = &a * a.adjoint();
            let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
            m /= C64::new(tr, 0.0);
            let rho = DensityMatrix::new(m).unwrap();
            let settings = build_settings(n).unwrap();
            let probs: Vec<Vec<f64>> = settings
                .iter()
                .map(|s| s.outcome_probabilities(&rho).unwrap())
                .collect();
            let rec = reconstruct_from_frequencies(&settings, &probs).unwrap();
            assert!(rec.trace_distance(&rho) < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn incomplete_settings_rejected() {
        let settings = &build_settings(2).unwrap()[..5];
        let freqs = vec![vec![0.25; 4]; 5];
        assert!(matches!(
            reconstruct_from_frequencies(settings, &freqs),
            Err(Error::IncompleteSettings(_))
        ));
    }

    #[test]
    fn reconstruction_output_is_valid_density_matrix() {
        let rho = QubitState::psi_minus().to_density_matrix();
        let settings = build_settings(2).unwrap();
        let table = simulate_counts(&rho, &settings, 200, 3).unwrap();
        let rec = reconstruct(&table).unwrap();
        // revalidate through the checking constructor
        let checked = DensityMatrix::new(rec.matrix().clone()).unwrap();
        assert_abs_diff_eq!(checked.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn monte_carlo_trace_is_constant() {
        let rho = QubitState::psi_minus().to_density_matrix();
        let settings = build_settings(2).unwrap();
        let table = simulate_counts(&rho, &settings, 10_000, 5).unwrap();
        let (mean, std) = monte_carlo_uncertainty(&table, 20, 9, |r| Ok(r.trace())).unwrap();
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-12);
        assert!(std < 1e-12);
    }

    #[test]
    fn monte_carlo_concurrence_spread_is_sane() {
        let rho = QubitState::psi_minus().to_density_matrix();
        let settings = build_settings(2).unwrap();
        let table = simulate_counts(&rho, &settings, 10_000, 5).unwrap();
        let (mean, std) =
            monte_carlo_uncertainty(&table, 100, 9, concurrence).unwrap();
        assert!(mean > 0.9, "mean concurrence {mean}");
        assert!(std > 0.0 && std < 0.1, "std {std}");
    }

    #[test]
    fn mixed_state_reconstruction_error_scales_with_events() {
        let rho = DensityMatrix::maximally_mixed(2);
        let settings = build_settings(2).unwrap();
        for n in [1_000u64, 10_000] {
            let mut distances: Vec<f64> = (0..15)
                .map(|seed| {
                    let table = simulate_counts(&rho, &settings, n, seed).unwrap();
                    reconstruct(&table).unwrap().trace_distance(&rho)
                })
                .collect();
            distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = distances[distances.len() / 2];
            let bound = 3.0 / (n as f64).sqrt();
            assert!(
                median <= bound,
                "median trace distance {median:.5} above 3/sqrt({n}) = {bound:.5}"
            );
        }
    }

    #[test]
    fn fidelity_is_non_decreasing_in_events() {
        let state = QubitState::psi_minus();
        let rho = state.to_density_matrix();
        let settings = build_settings(2).unwrap();
        let median_fidelity = |n: u64| -> f64 {
            let mut f: Vec<f64> = (0..15)
                .map(|seed| {
                    let table = simulate_counts(&rho, &settings, n, 50 + seed).unwrap();
                    reconstruct(&table).unwrap().fidelity_with_pure(&state)
                })
                .collect();
            f.sort_by(|a, b| a.partial_cmp(b).unwrap());
            f[f.len() / 2]
        };
        let (f3, f4, f5) = (median_fidelity(1_000), median_fidelity(10_000), median_fidelity(100_000));
        assert!(f3 <= f4 + 1e-12 && f4 <= f5 + 1e-12, "medians {f3}, {f4}, {f5}");
    }

    #[test]
    fn counts_csv_round_trip() {
        let rho = QubitState::phi_plus().to_density_matrix();
        let settings = build_settings(2).unwrap();
        let table = simulate_counts(&rho, &settings, 500, 21).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let back = CountsTable::read_csv(&buf[..]).unwrap();
        assert_eq!(table, back);
    }
}
