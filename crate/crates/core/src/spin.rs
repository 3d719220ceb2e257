//! Heisenberg Hamiltonians on small graphs and their exact diagonalization.
//!
//! Spin operators are S = sigma/2 (hbar = 1), so a singlet bond contributes
//! -3J/4. Site i occupies bit (n-1-i) of the basis index, matching the qubit
//! convention in [`crate::states`]; bit value 0 is spin up (H).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::states::{C64, CVector};

/// Dense diagonalization is capped at this many sites (2^14 = 16384).
pub const MAX_SITES: usize = 14;

/// Labeled coupling graph: sites 0..n and per-edge exchange constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    n_sites: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl SpinSystem {
    pub fn new(n_sites: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidSystem(format!("{n_sites} sites, need >= 2")));
        }
        if n_sites > MAX_SITES {
            return Err(Error::TooManySites { n: n_sites, max: MAX_SITES });
        }
        let mut canon: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, coupling) in edges {
            if i == j {
                return Err(Error::InvalidSystem(format!("self-edge at site {i}")));
            }
            if i >= n_sites || j >= n_sites {
                return Err(Error::InvalidSystem(format!(
                    "edge ({i},{j}) outside 0..{n_sites}"
                )));
            }
            if !coupling.is_finite() {
                return Err(Error::InvalidSystem(format!(
                    "coupling on edge ({i},{j}) is not finite"
                )));
            }
            let e = (i.min(j), i.max(j), coupling);
            if canon.iter().any(|&(a, b, _)| (a, b) == (e.0, e.1)) {
                return Err(Error::InvalidSystem(format!("duplicate edge ({},{})", e.0, e.1)));
            }
            canon.push(e);
        }
        canon.sort_by_key(|&(a, b, _)| (a, b));
        Ok(Self { n_sites, edges: canon })
    }

    /// Four-site square: J1 on (0,1),(2,3); J2 on (0,2),(1,3); J3 on the
    /// diagonals (0,3),(1,2).
    pub fn four_site(j1: f64, j2: f64, j3: f64) -> Self {
        Self::new(
            4,
            [
                (0, 1, j1),
                (2, 3, j1),
                (0, 2, j2),
                (1, 3, j2),
                (0, 3, j3),
                (1, 2, j3),
            ]
            .into_iter()
            .filter(|&(_, _, j)| j != 0.0),
        )
        .expect("static geometry")
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.edges.iter().map(|&(_, _, j)| j.abs()).fold(0.0, f64::max)
    }

    /// True when `perm` maps the weighted edge set onto itself.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        if perm.len() != self.n_sites {
            return false;
        }
        let mut seen = vec![false; self.n_sites];
        for &p in perm {
            if p >= self.n_sites || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        self.edges.iter().all(|&(i, j, coupling)| {
            let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
            self.edges
                .iter()
                .any(|&(x, y, c)| (x, y) == (a, b) && (c - coupling).abs() <= 1e-15 * coupling.abs().max(1.0))
        })
    }

    fn bit(&self, basis: usize, site: usize) -> usize {
        (basis >> (self.n_sites - 1 - site)) & 1
    }

    /// Dense H = sum_edges J_ij S_i . S_j, real symmetric.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            for &(i, j, coupling) in &self.edges {
                if self.bit(b, i) == self.bit(b, j) {
                    h[(b, b)] += 0.25 * coupling;
                } else {
                    h[(b, b)] -= 0.25 * coupling;
                    // sigma_x sigma_x + sigma_y sigma_y flips the
                    // anti-aligned pair
                    let flipped = b
                        ^ (1 << (self.n_sites - 1 - i))
                        ^ (1 << (self.n_sites - 1 - j));
                    h[(flipped, b)] += 0.5 * coupling;
                }
            }
        }
        h
    }

    /// H applied to a complex amplitude vector without forming the matrix.
    pub fn apply_hamiltonian(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "vector length {} does not match dimension {}",
                v.len(),
                self.dim()
            )));
        }
        let mut out = CVector::zeros(self.dim());
        for b in 0..self.dim() {
            let amp = v[b];
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            for &(i, j, coupling) in &self.edges {
                if self.bit(b, i) == self.bit(b, j) {
                    out[b] += amp * C64::new(0.25 * coupling, 0.0);
                } else {
                    out[b] -= amp * C64::new(0.25 * coupling, 0.0);
                    let flipped = b
                        ^ (1 << (self.n_sites - 1 - i))
                        ^ (1 << (self.n_sites - 1 - j));
                    out[flipped] += amp * C64::new(0.5 * coupling, 0.0);
                }
            }
        }
        Ok(out)
    }

    /// <v|H|v> for a normalized real vector.
    pub fn energy_expectation(&self, v: &DVector<f64>) -> Result<f64> {
        let cv = CVector::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0)));
        let hv = self.apply_hamiltonian(&cv)?;
        Ok(cv.iter().zip(hv.iter()).map(|(a, b)| (a.conj() * b).re).sum())
    }
}

/// Eigenvalues (ascending) and matching eigenvectors of a real symmetric
/// matrix.
pub fn symmetric_eigen_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let evals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let dim = m.nrows();
    let mut evecs = DMatrix::zeros(dim, dim);
    for (k, &i) in order.iter().enumerate() {
        evecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (evals, evecs)
}

fn check_symmetric(h: &DMatrix<f64>) -> Result<()> {
    let mut dev: f64 = 0.0;
    for i in 0..h.nrows() {
        for j in (i + 1)..h.ncols() {
            dev = dev.max((h[(i, j)] - h[(j, i)]).abs());
        }
    }
    if dev > 1e-12 * h.amax().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Ground energy and an orthonormal basis of the eigenspace within
/// `degeneracy_tol` of it.
pub fn ground_space(h: &DMatrix<f64>, degeneracy_tol: f64) -> Result<(f64, Vec<DVector<f64>>)> {
    if h.nrows() != h.ncols() || h.nrows() == 0 {
        return Err(Error::InvalidArgument("empty or non-square matrix".into()));
    }
    check_symmetric(h)?;
    let (evals, evecs) = symmetric_eigen_sorted(h);
    let e0 = evals[0];
    let basis = evals
        .iter()
        .enumerate()
        .take_while(|&(_, &e)| e - e0 <= degeneracy_tol)
        .map(|(k, _)| evecs.column(k).into_owned())
        .collect();
    Ok((e0, basis))
}

/// Default degeneracy tolerance: 1e-9 in units of the largest |J|.
pub fn default_degeneracy_tol(system: &SpinSystem) -> f64 {
    1e-9 * system.max_abs_coupling().max(1.0)
}

/// Ground state of a system, with the degenerate flag raised when more than
/// one eigenvector falls within tolerance.
pub fn ground_state(system: &SpinSystem) -> Result<(f64, DVector<f64>, bool)> {
    let (e0, basis) = ground_space(&system.hamiltonian(), default_degeneracy_tol(system))?;
    let degenerate = basis.len() > 1;
    Ok((e0, basis.into_iter().next().unwrap(), degenerate))
}

/// Spectrum restricted to a total-S_z sector.
#[derive(Debug, Clone)]
pub struct SpectrumSlice {
    /// Ascending sector eigenvalues, `k` of them.
    pub eigenvalues: Vec<f64>,
    /// Matching eigenvectors embedded in the full 2^n space.
    pub eigenvectors: Vec<DVector<f64>>,
    /// The S_z constraint the slice was computed in.
    pub sz: f64,
}

/// Basis indices (bitmasks) of the sum-S_z = sz sector. Bit 0 means spin up.
pub fn sz_sector_basis(n_sites: usize, sz: f64) -> Result<Vec<usize>> {
    let twice = 2.0 * sz;
    let rounded = twice.round();
    if (twice - rounded).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("sz = {sz} is not half-integer")));
    }
    let n_down = (n_sites as f64 - rounded) / 2.0;
    if n_down < 0.0 || n_down > n_sites as f64 || n_down.fract() != 0.0 {
        return Err(Error::EmptySector(sz));
    }
    let n_down = n_down as u32;
    Ok((0..1usize << n_sites)
        .filter(|b| b.count_ones() == n_down)
        .collect())
}

/// Lowest `k` eigenpairs of H restricted to the sum-S_z = `sz` subspace.
pub fn sz_sector_spectrum(system: &SpinSystem, sz: f64, k: usize) -> Result<SpectrumSlice> {
    let basis = sz_sector_basis(system.n_sites(), sz)?;
    let dim = basis.len();
    if dim == 0 {
        return Err(Error::EmptySector(sz));
    }
    if k == 0 || k > dim {
        return Err(Error::SectorTooSmall { k, dim });
    }
    let mut index_of = vec![usize::MAX; system.dim()];
    for (p, &b) in basis.iter().enumerate() {
        index_of[b] = p;
    }
    let n = system.n_sites();
    let mut h = DMatrix::zeros(dim, dim);
    for (p, &b) in basis.iter().enumerate() {
        for &(i, j, coupling) in system.edges() {
            let bi = (b >> (n - 1 - i)) & 1;
            let bj = (b >> (n - 1 - j)) & 1;
            if bi == bj {
                h[(p, p)] += 0.25 * coupling;
            } else {
                h[(p, p)] -= 0.25 * coupling;
                let flipped = b ^ (1 << (n - 1 - i)) ^ (1 << (n - 1 - j));
                h[(index_of[flipped], p)] += 0.5 * coupling;
            }
        }
    }
    let (evals, evecs) = symmetric_eigen_sorted(&h);
    let eigenvectors = (0..k)
        .map(|col| {
            let mut full = DVector::zeros(system.dim());
            for (p, &b) in basis.iter().enumerate() {
                full[b] = evecs[(p, col)];
            }
            full
        })
        .collect();
    Ok(SpectrumSlice {
        eigenvalues: evals[..k].to_vec(),
        eigenvectors,
        sz,
    })
}

/// S_tot^2 applied to a complex amplitude vector:
/// S^2 = (3n/4) I + 2 sum_{i<j} S_i . S_j.
pub fn apply_total_spin_squared(n_sites: usize, v: &CVector) -> Result<CVector> {
    if v.len() != 1 << n_sites {
        return Err(Error::InvalidArgument(format!(
            "vector length {} does not match {} sites",
            v.len(),
            n_sites
        )));
    }
    let mut out = v * C64::new(0.75 * n_sites as f64, 0.0);
    for b in 0..v.len() {
        let amp = v[b];
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        for i in 0..n_sites {
            for j in (i + 1)..n_sites {
                let bi = (b >> (n_sites - 1 - i)) & 1;
                let bj = (b >> (n_sites - 1 - j)) & 1;
                if bi == bj {
                    out[b] += amp * C64::new(0.5, 0.0);
                } else {
                    out[b] -= amp * C64::new(0.5, 0.0);
                    let flipped = b ^ (1 << (n_sites - 1 - i)) ^ (1 << (n_sites - 1 - j));
                    out[flipped] += amp * C64::new(1.0, 0.0);
                }
            }
        }
    }
    Ok(out)
}

/// <S_tot^2> of a normalized state.
pub fn total_spin_squared(n_sites: usize, v: &CVector) -> Result<f64> {
    let n2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(n2));
    }
    let sv = apply_total_spin_squared(n_sites, v)?;
    Ok(v.iter().zip(sv.iter()).map(|(a, b)| (a.conj() * b).re).sum())
}

/// Real-vector convenience wrapper around [`total_spin_squared`].
pub fn total_spin_squared_real(n_sites: usize, v: &DVector<f64>) -> Result<f64> {
    let cv = CVector::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0)));
    total_spin_squared(n_sites, &cv)
}

/// Squared overlap of a normalized state with the total-spin-zero sector.
pub fn singlet_sector_overlap(n_sites: usize, v: &CVector) -> Result<f64> {
    let dim = 1usize << n_sites;
    if v.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "vector length {} does not match {} sites",
            v.len(),
            n_sites
        )));
    }
    // S^2 as a real symmetric matrix; eigenvalue 0 spans the singlet sector.
    let mut s2 = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let mut basis_vec = CVector::zeros(dim);
        basis_vec[b] = C64::new(1.0, 0.0);
        let col = apply_total_spin_squared(n_sites, &basis_vec)?;
        for r in 0..dim {
            s2[(r, b)] = col[r].re;
        }
    }
    let (evals, evecs) = symmetric_eigen_sorted(&s2);
    let mut overlap = 0.0;
    for (k, &e) in evals.iter().enumerate() {
        if e.abs() < 1e-9 {
            let col = evecs.column(k);
            let dot: C64 = col
                .iter()
                .zip(v.iter())
                .map(|(&r, a)| C64::new(r, 0.0) * a)
                .sum();
            overlap += dot.norm_sqr();
        }
    }
    Ok(overlap)
}

/// Result of a minimum-gap scan over a coupling ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapScan {
    /// Ratio at the (parabolically refined) gap minimum.
    pub ratio: f64,
    /// Gap value at the minimum, clamped at zero.
    pub gap: f64,
    /// Grid index of the discrete minimum.
    pub grid_index: usize,
}

/// Scans E1 - E0 in the given S_z sector over `grid`, locating the minimum
/// with parabolic refinement between neighbors. A gap that is flat across
/// the whole grid (decoupled or fully degenerate systems) is an error.
pub fn minimum_gap_scan<F>(build: F, grid: &[f64], sz: f64) -> Result<GapScan>
where
    F: Fn(f64) -> Result<SpinSystem> + Sync,
{
    if grid.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "gap scan needs >= 3 grid points, got {}",
            grid.len()
        )));
    }
    use rayon::prelude::*;
    let gaps: Vec<f64> = grid
        .par_iter()
        .map(|&ratio| {
            let system = build(ratio)?;
            let slice = sz_sector_spectrum(&system, sz, 2)?;
            Ok(slice.eigenvalues[1] - slice.eigenvalues[0])
        })
        .collect::<Result<_>>()?;
    let (max, min) = gaps
        .iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(mx, mn), &g| {
            (mx.max(g), mn.min(g))
        });
    if max - min <= 1e-9 * max.abs().max(1.0) {
        return Err(Error::FlatGapScan);
    }
    let i = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let (ratio, gap) = if i == 0 || i == grid.len() - 1 {
        (grid[i], gaps[i])
    } else {
        let (g0, g1, g2) = (gaps[i - 1], gaps[i], gaps[i + 1]);
        let denom = g0 - 2.0 * g1 + g2;
        if denom <= 0.0 {
            (grid[i], gaps[i])
        } else {
            let h = grid[i + 1] - grid[i];
            let shift = 0.5 * (g0 - g2) / denom;
            let refined = grid[i] + shift.clamp(-1.0, 1.0) * h;
            let value = g1 - 0.25 * (g0 - g2) * shift.clamp(-1.0, 1.0);
            (refined, value.max(0.0))
        }
    };
    Ok(GapScan { ratio, gap, grid_index: i })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_site_singlet_triplet_split() {
        let system = SpinSystem::new(2, [(0, 1, 1.0)]).unwrap();
        let (evals, _) = symmetric_eigen_sorted(&system.hamiltonian());
        assert_abs_diff_eq!(evals[0], -0.75, epsilon = 1e-14);
        for &e in &evals[1..] {
            assert_abs_diff_eq!(e, 0.25, epsilon = 1e-14);
        }
    }

    #[test]
    fn four_site_ring_ground_energy() {
        let system = SpinSystem::four_site(1.0, 1.0, 0.0);
        let (e0, _, degenerate) = ground_state(&system).unwrap();
        assert_abs_diff_eq!(e0, -2.0, epsilon = 1e-12);
        assert!(!degenerate);
    }

    #[test]
    fn tetrahedron_ground_space_is_twofold() {
        let system = SpinSystem::four_site(1.0, 1.0, 1.0);
        let (e0, basis) = ground_space(
            &system.hamiltonian(),
            default_degeneracy_tol(&system),
        )
        .unwrap();
        assert_abs_diff_eq!(e0, -1.5, epsilon = 1e-12);
        assert_eq!(basis.len(), 2);
        // H = S_tot^2 / 2 - 3/2: check on a random normalized vector
        let dim = 16;
        let mut v = DVector::from_fn(dim, |i, _| ((i * 7 + 3) % 11) as f64 - 5.0);
        v /= v.norm();
        let cv = CVector::from_iterator(dim, v.iter().map(|&x| C64::new(x, 0.0)));
        let hv = system.apply_hamiltonian(&cv).unwrap();
        let s2v = apply_total_spin_squared(4, &cv).unwrap();
        for i in 0..dim {
            assert_abs_diff_eq!(hv[i].re, 0.5 * s2v[i].re - 1.5 * cv[i].re, epsilon = 1e-12);
        }
    }

    #[test]
    fn decoupled_dimers_ground_energy() {
        let system = SpinSystem::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let (e0, _, _) = ground_state(&system).unwrap();
        assert_abs_diff_eq!(e0, -1.5, epsilon = 1e-13);
    }

    #[test]
    fn pure_j1_ground_is_two_singlets() {
        let system = SpinSystem::four_site(1.0, 0.0, 0.0);
        let (_, ground, degenerate) = ground_state(&system).unwrap();
        assert!(!degenerate);
        let target = crate::states::QubitState::psi_minus()
            .tensor(&crate::states::QubitState::psi_minus());
        let overlap: C64 = target
            .amplitudes()
            .iter()
            .zip(ground.iter())
            .map(|(a, &g)| a.conj() * C64::new(g, 0.0))
            .sum();
        assert!(overlap.norm_sqr() >= 1.0 - 1e-10);
    }

    #[test]
    fn sz_sector_dimensions() {
        assert_eq!(sz_sector_basis(6, 0.0).unwrap().len(), 20);
        assert_eq!(sz_sector_basis(6, 3.0).unwrap().len(), 1);
        assert_eq!(sz_sector_basis(4, 0.0).unwrap().len(), 6);
        assert!(sz_sector_basis(6, 4.0).is_err());
        assert!(sz_sector_basis(6, 0.5).is_err());
    }

    #[test]
    fn sector_spectrum_matches_full_spectrum() {
        let system = SpinSystem::four_site(1.0, 0.7, 0.2);
        let slice = sz_sector_spectrum(&system, 0.0, 6).unwrap();
        let (full, _) = symmetric_eigen_sorted(&system.hamiltonian());
        // every sector eigenvalue appears in the full spectrum
        for &e in &slice.eigenvalues {
            assert!(
                full.iter().any(|&f| (f - e).abs() < 1e-10),
                "sector eigenvalue {e} missing from full spectrum"
            );
        }
        // the global ground lies in the sz = 0 sector
        assert_abs_diff_eq!(slice.eigenvalues[0], full[0], epsilon = 1e-12);
        // eigenvectors diagonalize H
        for (k, vec) in slice.eigenvectors.iter().enumerate() {
            let cv = CVector::from_iterator(16, vec.iter().map(|&x| C64::new(x, 0.0)));
            let hv = system.apply_hamiltonian(&cv).unwrap();
            for i in 0..16 {
                assert_abs_diff_eq!(hv[i].re, slice.eigenvalues[k] * vec[i], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn total_spin_values() {
        // singlet -> 0
        let singlet = crate::states::QubitState::psi_minus();
        assert_abs_diff_eq!(
            total_spin_squared(2, singlet.amplitudes()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        // |up,up> -> S(S+1) = 2
        let up = crate::states::QubitState::basis(2, 0);
        assert_abs_diff_eq!(total_spin_squared(2, up.amplitudes()).unwrap(), 2.0, epsilon = 1e-12);
        // unnormalized rejected
        let mut v = CVector::zeros(4);
        v[0] = C64::new(2.0, 0.0);
        assert!(total_spin_squared(2, &v).is_err());
    }

    #[test]
    fn hamiltonian_commutes_with_symmetries() {
        let system = SpinSystem::four_site(1.0, 0.6, 0.3);
        let h = system.hamiltonian();
        // [H, S^2]
        let dim = 16;
        let mut s2 = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let mut e = CVector::zeros(dim);
            e[b] = C64::new(1.0, 0.0);
            let col = apply_total_spin_squared(4, &e).unwrap();
            for r in 0..dim {
                s2[(r, b)] = col[r].re;
            }
        }
        let comm = &h * &s2 - &s2 * &h;
        assert!(comm.amax() < 1e-12);
        // [H, Sz]
        let mut sz = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let ups = 4.0 - (b as u32).count_ones() as f64;
            sz[(b, b)] = ups - 2.0;
        }
        let comm = &h * &sz - &sz * &h;
        assert!(comm.amax() < 1e-12);
    }

    #[test]
    fn gap_scan_finds_true_crossing_at_one() {
        let grid: Vec<f64> = (0..=100).map(|i| 0.5 + i as f64 * 0.01).collect();
        let scan = minimum_gap_scan(
            |j2| Ok(SpinSystem::four_site(1.0, j2, 1.0)),
            &grid,
            0.0,
        )
        .unwrap();
        assert_abs_diff_eq!(scan.ratio, 1.0, epsilon = 0.01);
        assert!(scan.gap < 1e-8, "gap {} should close", scan.gap);
    }

    #[test]
    fn gap_scan_flags_flat_grid() {
        let grid = [0.5, 1.0, 1.5];
        let err = minimum_gap_scan(
            |_| SpinSystem::new(4, [(0, 1, 1.0), (2, 3, 1.0)]),
            &grid,
            0.0,
        );
        assert!(matches!(err, Err(Error::FlatGapScan)));
    }

    #[test]
    fn eight_site_sectors_partition_the_full_spectrum() {
        // four decoupled dimers: E0 = -3 exactly, and the union of all Sz
        // sectors reproduces the 256 full-space eigenvalues
        let system = SpinSystem::new(
            8,
            (0..4).map(|k| (2 * k, 2 * k + 1, 1.0)),
        )
        .unwrap();
        let (e0, _, _) = ground_state(&system).unwrap();
        assert_abs_diff_eq!(e0, -3.0, epsilon = 1e-12);
        let (mut full, _) = symmetric_eigen_sorted(&system.hamiltonian());
        let mut from_sectors = Vec::new();
        for twice_sz in (-8i32..=8).step_by(2) {
            let sz = twice_sz as f64 / 2.0;
            let dim = sz_sector_basis(8, sz).unwrap().len();
            let slice = sz_sector_spectrum(&system, sz, dim).unwrap();
            from_sectors.extend(slice.eigenvalues);
        }
        from_sectors.sort_by(|a, b| a.partial_cmp(b).unwrap());
        full.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(from_sectors.len(), full.len());
        for (a, b) in from_sectors.iter().zip(&full) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn rejects_bad_systems() {
        assert!(SpinSystem::new(4, [(0, 0, 1.0)]).is_err());
        assert!(SpinSystem::new(4, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(SpinSystem::new(15, []).is_err());
        assert!(SpinSystem::new(4, [(0, 7, 1.0)]).is_err());
    }

    #[test]
    fn ground_space_rejects_non_symmetric() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = 1.0;
        assert!(matches!(ground_space(&m, 1e-9), Err(Error::NotHermitian(_))));
    }
}
