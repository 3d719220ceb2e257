#ifndef VBSIM_H
#define VBSIM_H

/* Generated by cbindgen from vbsim-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define VBSIM_OK 0

#define VBSIM_NULL_POINTER 1

#define VBSIM_INVALID_ARGUMENT 2

#define VBSIM_NUMERICAL_FAILURE 3

// Opaque spin-system builder: sites are 0-based, bonds carry exchange
// couplings, and the Hamiltonian is sum_bonds J S_i . S_j with S = sigma/2.
typedef struct VbsimSpinSystem VbsimSpinSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *vbsim_version(void);

// Static description of an error code; never needs freeing.
const char *vbsim_error_message(int code);

// theta = arctan(sqrt(eta)) for a coupler reflectivity in [0, 1].
//
// # Safety
// `out_theta` must point to a writable f64.
int vbsim_theta_from_reflectivity(double eta, double *out_theta);

// eta = tan^2(theta) for a coupler angle in [0, pi/4].
//
// # Safety
// `out_eta` must point to a writable f64.
int vbsim_reflectivity_from_theta(double theta, double *out_eta);

// Ideal Hong-Ou-Mandel visibility 2 eta (1-eta) / (1 - 2 eta + 2 eta^2).
//
// # Safety
// `out_visibility` must point to a writable f64.
int vbsim_ideal_hom_visibility(double eta, double *out_visibility);

// Expected coincidence rate of the Gaussian dip model at one delay.
//
// # Safety
// `out_rate` must point to a writable f64.
int vbsim_hom_dip_rate(double eta,
                       double delay,
                       double sigma,
                       double v_sys,
                       double baseline,
                       double *out_rate);

// Least-squares systematic-visibility factor from `len` (eta, visibility)
// samples.
//
// # Safety
// `etas` and `visibilities` must point to `len` readable f64 each;
// `out_vsys` must be writable.
int vbsim_fit_vsys(const double *etas, const double *visibilities, size_t len, double *out_vsys);

// Fourfold-coincidence probability and pairwise concurrences C12, C13,
// C14 of the two-singlet post-selected family at coupler angle `theta`.
//
// # Safety
// All out-pointers must point to writable f64.
int vbsim_concurrence_scan_point(double theta,
                                 double *out_probability,
                                 double *out_c12,
                                 double *out_c13,
                                 double *out_c14);

// Wootters concurrence of a two-qubit density matrix given as 16 row-major
// complex entries, interleaved (re, im): 32 doubles total.
//
// # Safety
// `rho_interleaved` must point to 32 readable f64; `out_concurrence` must
// be writable.
int vbsim_concurrence(const double *rho_interleaved, double *out_concurrence);

// Allocates a spin system over `n_sites` sites (2..=14). Free with
// `vbsim_spin_system_free`.
//
// # Safety
// `out_system` must point to a writable pointer slot.
int vbsim_spin_system_new(size_t n_sites, struct VbsimSpinSystem **out_system);

// Adds an exchange bond between two distinct 0-based sites.
//
// # Safety
// `system` must be a live pointer from `vbsim_spin_system_new`.
int vbsim_spin_system_add_bond(struct VbsimSpinSystem *system,
                               size_t site_i,
                               size_t site_j,
                               double coupling);

// Ground-state energy by dense exact diagonalization.
//
// # Safety
// `system` must be live; `out_energy` must be writable.
int vbsim_spin_system_ground_energy(const struct VbsimSpinSystem *system, double *out_energy);

// Lowest `k` eigenvalues in the total-S_z = `sz` sector, written ascending
// into `out_energies`.
//
// # Safety
// `system` must be live; `out_energies` must point to `k` writable f64.
int vbsim_spin_system_sz_spectrum(const struct VbsimSpinSystem *system,
                                  double sz,
                                  size_t k,
                                  double *out_energies);

// Expectation of S_tot^2 in the ground state.
//
// # Safety
// `system` must be live; `out_s2` must be writable.
int vbsim_spin_system_ground_total_spin(const struct VbsimSpinSystem *system, double *out_s2);

// Frees a spin system returned by `vbsim_spin_system_new`.
//
// # Safety
// `system` must be null or a pointer previously returned by
// `vbsim_spin_system_new` that has not been freed.
void vbsim_spin_system_free(struct VbsimSpinSystem *system);

// Number of perfect matchings of `n_sites` sites, (n-1)!!.
//
// # Safety
// `out_count` must point to a writable u64.
int vbsim_covering_count(size_t n_sites, uint64_t *out_count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VBSIM_H */
