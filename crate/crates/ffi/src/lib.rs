//! C ABI over the vbsim toolkit: scalar coupler formulas, the two-singlet
//! concurrence family, Wootters concurrence of a caller-supplied density
//! matrix, and an opaque spin-system handle for exact diagonalization.
//!
//! Every fallible function returns an error code (`VBSIM_OK` on success)
//! and writes results through out-pointers. `vbsim_error_message` maps a
//! code to a static description. The header `include/vbsim.h` is generated
//! by cbindgen at build time.

use std::os::raw::{c_char, c_int};

use vbsim::entanglement;
use vbsim::fock;
use vbsim::spin;
use vbsim::states::{CMatrix, DensityMatrix, C64};

pub const VBSIM_OK: c_int = 0;
pub const VBSIM_NULL_POINTER: c_int = 1;
pub const VBSIM_INVALID_ARGUMENT: c_int = 2;
pub const VBSIM_NUMERICAL_FAILURE: c_int = 3;

fn code_of(err: &vbsim::Error) -> c_int {
    use vbsim::Error::*;
    match err {
        OutOfRange(_) | InvalidArgument(_) | InvalidSystem(_) | BadIndices(_)
        | TooManySites { .. } | SectorTooSmall { .. } | EmptySector(_) | InvalidCovering(_)
        | EmptyBasis | PhotonNumberMismatch(_) | UnknownMode(_) | ModeCollision(_) => {
            VBSIM_INVALID_ARGUMENT
        }
        _ => VBSIM_NUMERICAL_FAILURE,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vbsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static description of an error code; never needs freeing.
#[no_mangle]
pub extern "C" fn vbsim_error_message(code: c_int) -> *const c_char {
    let msg: &'static str = match code {
        VBSIM_OK => "ok\0",
        VBSIM_NULL_POINTER => "null pointer argument\0",
        VBSIM_INVALID_ARGUMENT => "invalid argument\0",
        VBSIM_NUMERICAL_FAILURE => "numerical failure\0",
        _ => "unknown error code\0",
    };
    msg.as_ptr() as *const c_char
}

unsafe fn write_out(out: *mut f64, value: f64) -> c_int {
    if out.is_null() {
        return VBSIM_NULL_POINTER;
    }
    unsafe { *out = value };
    VBSIM_OK
}

/// theta = arctan(sqrt(eta)) for a coupler reflectivity in [0, 1].
///
/// # Safety
/// `out_theta` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn vbsim_theta_from_reflectivity(eta: f64, out_theta: *mut f64) -> c_int {
    match fock::theta_from_reflectivity(eta) {
        Ok(theta) => unsafe { write_out(out_theta, theta) },
        Err(e) => code_of(&e),
    }
}

/// eta = tan^2(theta) for a coupler angle in [0, pi/4].
///
/// # Safety
/// `out_eta` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn vbsim_reflectivity_from_theta(theta: f64, out_eta: *mut f64) -> c_int {
    match fock::reflectivity_from_theta(theta) {
        Ok(eta) => unsafe { write_out(out_eta, eta) },
        Err(e) => code_of(&e),
    }
}

/// Ideal Hong-Ou-Mandel visibility 2 eta (1-eta) / (1 - 2 eta + 2 eta^2).
///
/// # Safety
/// `out_visibility` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn vbsim_ideal_hom_visibility(eta: f64, out_visibility: *mut f64) -> c_int {
    match fock::ideal_hom_visibility(eta) {
        Ok(v) => unsafe { write_out(out_visibility, v) },
        Err(e) => code_of(&e),
    }
}

/// Expected coincidence rate of the Gaussian dip model at one delay.
///
/// # Safety
/// `out_rate` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn vbsim_hom_dip_rate(
    eta: f64,
    delay: f64,
    sigma: f64,
    v_sys: f64,
    baseline: f64,
    out_rate: *mut f64,
) -> c_int {
    let model = match fock::HomDipModel::new(sigma, v_sys, baseline) {
        Ok(m) => m,
        Err(e) => return code_of(&e),
    };
    match model.rate(eta, delay) {
        Ok(r) => unsafe { write_out(out_rate, r) },
        Err(e) => code_of(&e),
    }
}

/// Least-squares systematic-visibility factor from `len` (eta, visibility)
/// samples.
///
/// # Safety
/// `etas` and `visibilities` must point to `len` readable f64 each;
/// `out_vsys` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vbsim_fit_vsys(
    etas: *const f64,
    visibilities: *const f64,
    len: usize,
    out_vsys: *mut f64,
) -> c_int {
    if etas.is_null() || visibilities.is_null() {
        return VBSIM_NULL_POINTER;
    }
    let e = unsafe { std::slice::from_raw_parts(etas, len) };
    let v = unsafe { std::slice::from_raw_parts(visibilities, len) };
    let points: Vec<(f64, f64)> = e.iter().copied().zip(v.iter().copied()).collect();
    match fock::fit_vsys(&points) {
        Ok(fit) => unsafe { write_out(out_vsys, fit) },
        Err(e) => code_of(&e),
    }
}

/// Fourfold-coincidence probability and pairwise concurrences C12, C13,
/// C14 of the two-singlet post-selected family at coupler angle `theta`.
///
/// # Safety
/// All out-pointers must point to writable f64.
#[no_mangle]
pub unsafe extern "C" fn vbsim_concurrence_scan_point(
    theta: f64,
    out_probability: *mut f64,
    out_c12: *mut f64,
    out_c13: *mut f64,
    out_c14: *mut f64,
) -> c_int {
    let inner = || -> vbsim::Result<(f64, f64, f64, f64)> {
        let setting = fock::TdcSetting::from_theta(theta)?;
        let (p, state) = fock::simulate_postselected_state(
            &fock::SourceConfig::two_singlets(),
            &setting,
            (1, 3),
            &[1, 2, 3, 4],
        )?;
        let c = |pair: (usize, usize)| -> vbsim::Result<f64> {
            entanglement::concurrence(&entanglement::partial_trace_state(
                &state,
                &[pair.0, pair.1],
            )?)
        };
        Ok((p, c((0, 1))?, c((0, 2))?, c((0, 3))?))
    };
    match inner() {
        Ok((p, c12, c13, c14)) => unsafe {
            for (ptr, value) in [
                (out_probability, p),
                (out_c12, c12),
                (out_c13, c13),
                (out_c14, c14),
            ] {
                let rc = write_out(ptr, value);
                if rc != VBSIM_OK {
                    return rc;
                }
            }
            VBSIM_OK
        },
        Err(e) => code_of(&e),
    }
}

/// Wootters concurrence of a two-qubit density matrix given as 16 row-major
/// complex entries, interleaved (re, im): 32 doubles total.
///
/// # Safety
/// `rho_interleaved` must point to 32 readable f64; `out_concurrence` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn vbsim_concurrence(
    rho_interleaved: *const f64,
    out_concurrence: *mut f64,
) -> c_int {
    if rho_interleaved.is_null() {
        return VBSIM_NULL_POINTER;
    }
    let raw = unsafe { std::slice::from_raw_parts(rho_interleaved, 32) };
    let m = CMatrix::from_fn(4, 4, |r, c| {
        let k = 2 * (4 * r + c);
        C64::new(raw[k], raw[k + 1])
    });
    let rho = match DensityMatrix::new(m) {
        Ok(rho) => rho,
        Err(e) => return code_of(&e),
    };
    match entanglement::concurrence(&rho) {
        Ok(c) => unsafe { write_out(out_concurrence, c) },
        Err(e) => code_of(&e),
    }
}

/// Opaque spin-system builder: sites are 0-based, bonds carry exchange
/// couplings, and the Hamiltonian is sum_bonds J S_i . S_j with S = sigma/2.
pub struct VbsimSpinSystem {
    n_sites: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl VbsimSpinSystem {
    fn build(&self) -> vbsim::Result<spin::SpinSystem> {
        spin::SpinSystem::new(self.n_sites, self.edges.iter().copied())
    }
}

/// Allocates a spin system over `n_sites` sites (2..=14). Free with
/// `vbsim_spin_system_free`.
///
/// # Safety
/// `out_system` must point to a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn vbsim_spin_system_new(
    n_sites: usize,
    out_system: *mut *mut VbsimSpinSystem,
) -> c_int {
    if out_system.is_null() {
        return VBSIM_NULL_POINTER;
    }
    if !(2..=spin::MAX_SITES).contains(&n_sites) {
        return VBSIM_INVALID_ARGUMENT;
    }
    let boxed = Box::new(VbsimSpinSystem { n_sites, edges: Vec::new() });
    unsafe { *out_system = Box::into_raw(boxed) };
    VBSIM_OK
}

/// Adds an exchange bond between two distinct 0-based sites.
///
/// # Safety
/// `system` must be a live pointer from `vbsim_spin_system_new`.
#[no_mangle]
pub unsafe extern "C" fn vbsim_spin_system_add_bond(
    system: *mut VbsimSpinSystem,
    site_i: usize,
    site_j: usize,
    coupling: f64,
) -> c_int {
    let Some(system) = (unsafe { system.as_mut() }) else {
        return VBSIM_NULL_POINTER;
    };
    if site_i == site_j
        || site_i >= system.n_sites
        || site_j >= system.n_sites
        || !coupling.is_finite()
    {
        return VBSIM_INVALID_ARGUMENT;
    }
    let (a, b) = (site_i.min(site_j), site_i.max(site_j));
    if system.edges.iter().any(|&(x, y, _)| (x, y) == (a, b)) {
        return VBSIM_INVALID_ARGUMENT;
    }
    system.edges.push((a, b, coupling));
    VBSIM_OK
}

/// Ground-state energy by dense exact diagonalization.
///
/// # Safety
/// `system` must be live; `out_energy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vbsim_spin_system_ground_energy(
    system: *const VbsimSpinSystem,
    out_energy: *mut f64,
) -> c_int {
    let Some(system) = (unsafe { system.as_ref() }) else {
        return VBSIM_NULL_POINTER;
    };
    let built = match system.build() {
        Ok(s) => s,
        Err(e) => return code_of(&e),
    };
    match spin::ground_state(&built) {
        Ok((e0, _, _)) => unsafe { write_out(out_energy, e0) },
        Err(e) => code_of(&e),
    }
}

/// Lowest `k` eigenvalues in the total-S_z = `sz` sector, written ascending
/// into `out_energies`.
///
/// # Safety
/// `system` must be live; `out_energies` must point to `k` writable f64.
#[no_mangle]
pub unsafe extern "C" fn vbsim_spin_system_sz_spectrum(
    system: *const VbsimSpinSystem,
    sz: f64,
    k: usize,
    out_energies: *mut f64,
) -> c_int {
    let Some(system) = (unsafe { system.as_ref() }) else {
        return VBSIM_NULL_POINTER;
    };
    if out_energies.is_null() {
        return VBSIM_NULL_POINTER;
    }
    let built = match system.build() {
        Ok(s) => s,
        Err(e) => return code_of(&e),
    };
    match spin::sz_sector_spectrum(&built, sz, k) {
        Ok(slice) => {
            let out = unsafe { std::slice::from_raw_parts_mut(out_energies, k) };
            out.copy_from_slice(&slice.eigenvalues);
            VBSIM_OK
        }
        Err(e) => code_of(&e),
    }
}

/// Expectation of S_tot^2 in the ground state.
///
/// # Safety
/// `system` must be live; `out_s2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vbsim_spin_system_ground_total_spin(
    system: *const VbsimSpinSystem,
    out_s2: *mut f64,
) -> c_int {
    let Some(system) = (unsafe { system.as_ref() }) else {
        return VBSIM_NULL_POINTER;
    };
    let built = match system.build() {
        Ok(s) => s,
        Err(e) => return code_of(&e),
    };
    let inner = || -> vbsim::Result<f64> {
        let (_, ground, _) = spin::ground_state(&built)?;
        let cv = vbsim::states::CVector::from_iterator(
            ground.len(),
            ground.iter().map(|&x| C64::new(x, 0.0)),
        );
        spin::total_spin_squared(built.n_sites(), &cv)
    };
    match inner() {
        Ok(s2) => unsafe { write_out(out_s2, s2) },
        Err(e) => code_of(&e),
    }
}

/// Frees a spin system returned by `vbsim_spin_system_new`.
///
/// # Safety
/// `system` must be null or a pointer previously returned by
/// `vbsim_spin_system_new` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn vbsim_spin_system_free(system: *mut VbsimSpinSystem) {
    if !system.is_null() {
        drop(unsafe { Box::from_raw(system) });
    }
}

/// Number of perfect matchings of `n_sites` sites, (n-1)!!.
///
/// # Safety
/// `out_count` must point to a writable u64.
#[no_mangle]
pub unsafe extern "C" fn vbsim_covering_count(n_sites: usize, out_count: *mut u64) -> c_int {
    if out_count.is_null() {
        return VBSIM_NULL_POINTER;
    }
    match vbsim::valence::enumerate_coverings(n_sites) {
        Ok(coverings) => {
            unsafe { *out_count = coverings.len() as u64 };
            VBSIM_OK
        }
        Err(e) => code_of(&e),
    }
}
