//! Multimode bosonic simulation of the tunable directional coupler (TDC).
//!
//! States are sparse superpositions of Fock occupations over modes labeled
//! by (spatial port, polarization, internal temporal bin). The internal bin
//! models partial distinguishability: a delayed photon occupies a
//! superposition of bins with Gaussian overlap against an undelayed one.
//! Coincidence post-selection projects onto one photon per chosen port and
//! is what turns passive interference into an effective photon-photon
//! interaction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::states::{C64, CVector, QubitState};

/// Amplitudes below this are dropped to keep the sparse form canonical.
pub const AMPLITUDE_PRUNE: f64 = 1e-14;

/// Post-selection squared norms below this floor are reported as underflow
/// rather than renormalized.
pub const PROBABILITY_FLOOR: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    /// Computational-basis bit: H = 0, V = 1.
    pub fn bit(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

/// A single bosonic mode: spatial port, polarization, internal temporal bin.
///
/// The derived ordering (spatial, then polarization, then bin) is the
/// canonical ordering used for occupation keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub spatial: u16,
    pub pol: Polarization,
    pub bin: u16,
}

impl ModeLabel {
    pub fn new(spatial: u16, pol: Polarization, bin: u16) -> Self {
        Self { spatial, pol, bin }
    }

    pub fn h(spatial: u16) -> Self {
        Self::new(spatial, Polarization::H, 0)
    }

    pub fn v(spatial: u16) -> Self {
        Self::new(spatial, Polarization::V, 0)
    }
}

/// Canonical occupation vector: sorted modes with strictly positive counts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Occupation(Vec<(ModeLabel, u32)>);

impl Occupation {
    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    pub fn from_modes(modes: &[ModeLabel]) -> Self {
        let mut map: BTreeMap<ModeLabel, u32> = BTreeMap::new();
        for &m in modes {
            *map.entry(m).or_insert(0) += 1;
        }
        Self(map.into_iter().collect())
    }

    pub fn modes(&self) -> &[(ModeLabel, u32)] {
        &self.0
    }

    pub fn total_photons(&self) -> u32 {
        self.0.iter().map(|&(_, n)| n).sum()
    }

    pub fn photons_in_port(&self, spatial: u16) -> u32 {
        self.0
            .iter()
            .filter(|(m, _)| m.spatial == spatial)
            .map(|&(_, n)| n)
            .sum()
    }

    fn with_raised(&self, mode: ModeLabel) -> (Self, u32) {
        let mut v = self.0.clone();
        match v.binary_search_by(|(m, _)| m.cmp(&mode)) {
            Ok(i) => {
                v[i].1 += 1;
                let n = v[i].1;
                (Self(v), n)
            }
            Err(i) => {
                v.insert(i, (mode, 1));
                (Self(v), 1)
            }
        }
    }

    /// Product of factorials of the occupation numbers, as f64.
    fn occupancy_factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&(_, n)| (1..=n as u64).map(|k| k as f64).product::<f64>())
            .product()
    }
}

/// Sparse superposition of Fock occupations with complex amplitudes.
///
/// All terms of a state carry the same total photon number; construction
/// enforces this. Amplitudes below [`AMPLITUDE_PRUNE`] are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonicState {
    terms: BTreeMap<Occupation, C64>,
    photons: u32,
}

impl PhotonicState {
    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Occupation::vacuum(), C64::new(1.0, 0.0));
        Self { terms, photons: 0 }
    }

    pub fn from_terms<I: IntoIterator<Item = (Occupation, C64)>>(iter: I) -> Result<Self> {
        let mut terms: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, amp) in iter {
            if amp.norm() == 0.0 {
                continue;
            }
            *terms.entry(occ).or_insert(C64::new(0.0, 0.0)) += amp;
        }
        terms.retain(|_, a| a.norm() > AMPLITUDE_PRUNE);
        let mut photons = None;
        for occ in terms.keys() {
            let n = occ.total_photons();
            match photons {
                None => photons = Some(n),
                Some(p) if p != n => {
                    return Err(Error::PhotonNumberMismatch(format!(
                        "terms with {p} and {n} photons in one fixed-number state"
                    )))
                }
                _ => {}
            }
        }
        Ok(Self {
            terms,
            photons: photons.unwrap_or(0),
        })
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_photons(&self) -> u32 {
        self.photons
    }

    pub fn squared_norm(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, occ: &Occupation) -> C64 {
        self.terms.get(occ).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.squared_norm();
        if n2 <= PROBABILITY_FLOOR {
            return Err(Error::ProbabilityUnderflow(n2));
        }
        let scale = C64::new(1.0 / n2.sqrt(), 0.0);
        Self::from_terms(self.terms.iter().map(|(o, a)| (o.clone(), a * scale)))
    }

    pub fn scaled(&self, factor: C64) -> Result<Self> {
        Self::from_terms(self.terms.iter().map(|(o, a)| (o.clone(), a * factor)))
    }

    /// Linear combination; both states must share a photon number.
    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(o, a)| (o.clone(), *a)),
        )
    }

    /// Applies the creation operator sum_k c_k a^dag(mode_k) with bosonic
    /// normalization, raising the photon number by one.
    pub fn apply_creation(&self, superposition: &[(ModeLabel, C64)]) -> Result<Self> {
        if superposition.is_empty() {
            return Err(Error::InvalidArgument(
                "empty creation-operator superposition".into(),
            ));
        }
        let mut out: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, amp) in &self.terms {
            for &(mode, coeff) in superposition {
                if coeff.norm() == 0.0 {
                    continue;
                }
                let (raised, n_new) = occ.with_raised(mode);
                // a^dag |n> = sqrt(n+1) |n+1>
                let contrib = amp * coeff * C64::new((n_new as f64).sqrt(), 0.0);
                *out.entry(raised).or_insert(C64::new(0.0, 0.0)) += contrib;
            }
        }
        Self::from_terms(out)
    }

    /// Swaps H and V on every mode (global polarization flip).
    pub fn polarization_swapped(&self) -> Self {
        let terms = self.terms.iter().map(|(occ, amp)| {
            let modes: Vec<(ModeLabel, u32)> = occ
                .modes()
                .iter()
                .map(|&(m, n)| (ModeLabel::new(m.spatial, m.pol.flipped(), m.bin), n))
                .collect();
            let mut sorted = modes;
            sorted.sort_by_key(|&(m, _)| m);
            (Occupation(sorted), *amp)
        });
        Self::from_terms(terms).expect("polarization swap preserves photon number")
    }

    /// Spatial ports occupied in at least one term.
    pub fn occupied_ports(&self) -> Vec<u16> {
        let mut ports: Vec<u16> = self
            .terms
            .keys()
            .flat_map(|occ| occ.modes().iter().map(|(m, _)| m.spatial))
            .collect();
        ports.sort_unstable();
        ports.dedup();
        ports
    }
}

/// Beam-splitter phase convention. Observables are convention-independent;
/// the suite checks this by re-running with both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// a -> t c + i r d, b -> i r c + t d
    #[default]
    ReciprocalI,
    /// a -> t c + r d, b -> -r c + t d
    RealOrthogonal,
}

/// Reflectivity setting of the tunable directional coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdcSetting {
    reflectivity: f64,
    pub convention: PhaseConvention,
}

impl TdcSetting {
    pub fn new(reflectivity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflectivity) || !reflectivity.is_finite() {
            return Err(Error::OutOfRange(format!("reflectivity {reflectivity}")));
        }
        Ok(Self {
            reflectivity,
            convention: PhaseConvention::default(),
        })
    }

    pub fn from_theta(theta: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_4).contains(&theta) {
            return Err(Error::OutOfRange(format!("TDC angle {theta}")));
        }
        Self::new(theta.tan().powi(2))
    }

    pub fn with_convention(mut self, convention: PhaseConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn reflectivity(&self) -> f64 {
        self.reflectivity
    }

    pub fn theta(&self) -> f64 {
        theta_from_reflectivity(self.reflectivity).expect("validated on construction")
    }

    /// (coefficient of out_c, coefficient of out_d) for a photon entering
    /// the first port, and for one entering the second port.
    fn port_coefficients(&self) -> ([C64; 2], [C64; 2]) {
        let t = (1.0 - self.reflectivity).sqrt();
        let r = self.reflectivity.sqrt();
        match self.convention {
            PhaseConvention::ReciprocalI => (
                [C64::new(t, 0.0), C64::new(0.0, r)],
                [C64::new(0.0, r), C64::new(t, 0.0)],
            ),
            PhaseConvention::RealOrthogonal => (
                [C64::new(t, 0.0), C64::new(r, 0.0)],
                [C64::new(-r, 0.0), C64::new(t, 0.0)],
            ),
        }
    }
}

/// TDC angle theta = arctan(sqrt(eta)), monotone on [0, 1] -> [0, pi/4].
pub fn theta_from_reflectivity(eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(Error::OutOfRange(format!("reflectivity {eta}")));
    }
    Ok(eta.sqrt().atan())
}

/// Inverse of [`theta_from_reflectivity`]: eta = tan^2(theta).
pub fn reflectivity_from_theta(theta: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_PI_4).contains(&theta) {
        return Err(Error::OutOfRange(format!("TDC angle {theta}")));
    }
    Ok(theta.tan().powi(2))
}

/// Ideal Hong-Ou-Mandel visibility of an unbalanced coupler,
/// V = 2 eta (1 - eta) / (1 - 2 eta + 2 eta^2).
pub fn ideal_hom_visibility(eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(Error::OutOfRange(format!("reflectivity {eta}")));
    }
    Ok(2.0 * eta * (1.0 - eta) / (1.0 - 2.0 * eta + 2.0 * eta * eta))
}

/// Routes two input ports through the coupler into two output ports.
///
/// Creation operators transform as a -> sqrt(1-eta) c + i sqrt(eta) d and
/// b -> i sqrt(eta) c + sqrt(1-eta) d (reciprocal convention), identically
/// for every polarization and internal bin. Output labels may reuse the
/// input labels; they must not collide with occupied spectator ports.
pub fn apply_tdc(
    state: &PhotonicState,
    in_a: u16,
    in_b: u16,
    out: (u16, u16),
    setting: &TdcSetting,
) -> Result<PhotonicState> {
    if in_a == in_b {
        return Err(Error::InvalidArgument(format!(
            "TDC input ports must differ, got {in_a} twice"
        )));
    }
    if out.0 == out.1 {
        return Err(Error::InvalidArgument(format!(
            "TDC output ports must differ, got {} twice",
            out.0
        )));
    }
    for port in [out.0, out.1] {
        if port != in_a && port != in_b {
            let occupied = state
                .terms
                .keys()
                .any(|occ| occ.photons_in_port(port) > 0);
            if occupied {
                return Err(Error::ModeCollision(port));
            }
        }
    }
    let (ca, cb) = setting.port_coefficients();

    let mut out_terms: BTreeMap<Occupation, C64> = BTreeMap::new();
    for (occ, amp) in &state.terms {
        // Work with creation-monomial coefficients: |n> = (a^dag)^n / sqrt(n!) |0>.
        let base = amp / C64::new(occ.occupancy_factorial().sqrt(), 0.0);

        // Expand mode by mode into monomials over output modes.
        let mut acc: BTreeMap<Occupation, C64> = BTreeMap::new();
        acc.insert(Occupation::vacuum(), base);
        for &(mode, n) in occ.modes() {
            let images: Vec<(ModeLabel, C64)> = if mode.spatial == in_a || mode.spatial == in_b {
                let coeffs = if mode.spatial == in_a { ca } else { cb };
                vec![
                    (ModeLabel::new(out.0, mode.pol, mode.bin), coeffs[0]),
                    (ModeLabel::new(out.1, mode.pol, mode.bin), coeffs[1]),
                ]
            } else {
                vec![(mode, C64::new(1.0, 0.0))]
            };
            // (alpha X + beta Y)^n via binomial expansion, applied to every
            // partial monomial accumulated so far.
            let mut next: BTreeMap<Occupation, C64> = BTreeMap::new();
            for (partial, coeff) in &acc {
                for split in multinomial_splits(&images, n) {
                    let c = *coeff * split.coefficient;
                    if c.norm() == 0.0 {
                        continue;
                    }
                    let mut occ_new = partial.clone();
                    for (m, k) in split.powers {
                        for _ in 0..k {
                            let (raised, _) = occ_new.with_raised(m);
                            occ_new = raised;
                        }
                    }
                    *next.entry(occ_new).or_insert(C64::new(0.0, 0.0)) += c;
                }
            }
            acc = next;
        }
        for (occ_new, coeff) in acc {
            // Back to Fock amplitudes.
            let fock = coeff * C64::new(occ_new.occupancy_factorial().sqrt(), 0.0);
            *out_terms.entry(occ_new).or_insert(C64::new(0.0, 0.0)) += fock;
        }
    }
    PhotonicState::from_terms(out_terms)
}

struct MonomialSplit {
    powers: Vec<(ModeLabel, u32)>,
    coefficient: C64,
}

/// Terms of (sum_k c_k X_k)^n as monomials with multinomial coefficients.
fn multinomial_splits(images: &[(ModeLabel, C64)], n: u32) -> Vec<MonomialSplit> {
    fn go(
        images: &[(ModeLabel, C64)],
        remaining: u32,
        acc: &mut Vec<(ModeLabel, u32)>,
        coeff: C64,
        numerator: f64,
        out: &mut Vec<MonomialSplit>,
    ) {
        if images.len() == 1 {
            let c = coeff * images[0].1.powu(remaining);
            let mut powers = acc.clone();
            if remaining > 0 {
                powers.push((images[0].0, remaining));
            }
            // numerator already holds n! / prod(k_i!) for the chosen k's;
            // dividing by remaining! finishes the multinomial coefficient.
            let fact: f64 = (1..=remaining as u64).map(|k| k as f64).product();
            out.push(MonomialSplit {
                powers,
                coefficient: c * C64::new(numerator / fact, 0.0),
            });
            return;
        }
        for k in 0..=remaining {
            let fact: f64 = (1..=k as u64).map(|x| x as f64).product();
            let c = coeff * images[0].1.powu(k);
            if k > 0 {
                acc.push((images[0].0, k));
            }
            go(&images[1..], remaining - k, acc, c, numerator / fact, out);
            if k > 0 {
                acc.pop();
            }
        }
    }
    let n_fact: f64 = (1..=n as u64).map(|k| k as f64).product();
    let mut out = Vec::new();
    let mut acc = Vec::new();
    go(images, n, &mut acc, C64::new(1.0, 0.0), n_fact, &mut out);
    out
}

/// Probability of finding exactly one photon in each pattern port.
///
/// Photons outside the pattern are ignored by the projection. Errors if a
/// pattern port never occurs in the state.
pub fn coincidence_probability(state: &PhotonicState, pattern: &[u16]) -> Result<f64> {
    check_pattern(state, pattern)?;
    let p = state
        .terms
        .iter()
        .filter(|(occ, _)| pattern.iter().all(|&s| occ.photons_in_port(s) == 1))
        .map(|(_, amp)| amp.norm_sqr())
        .sum();
    Ok(p)
}

/// Coincidence projection plus the renormalized conditional polarization
/// state, one qubit per pattern port in the given order.
///
/// The selected terms must place every photon inside the pattern (photon
/// number equal to the pattern size) and must share a single internal-bin
/// layout, otherwise the conditional is not a pure n-qubit state.
pub fn coincidence_postselect(
    state: &PhotonicState,
    pattern: &[u16],
) -> Result<(f64, QubitState)> {
    check_pattern(state, pattern)?;
    if state.total_photons() as usize != pattern.len() {
        return Err(Error::PhotonNumberMismatch(format!(
            "{} photons cannot post-select onto {} pattern ports",
            state.total_photons(),
            pattern.len()
        )));
    }
    let selected: Vec<(&Occupation, &C64)> = state
        .terms
        .iter()
        .filter(|(occ, _)| pattern.iter().all(|&s| occ.photons_in_port(s) == 1))
        .collect();
    if selected.is_empty() {
        return Err(Error::ZeroProbability);
    }
    let probability: f64 = selected.iter().map(|(_, a)| a.norm_sqr()).sum();
    if probability < PROBABILITY_FLOOR {
        return Err(Error::ProbabilityUnderflow(probability));
    }

    // All selected terms must agree on which internal bin sits in each port.
    let layout_of = |occ: &Occupation| -> Vec<u16> {
        pattern
            .iter()
            .map(|&s| {
                occ.modes()
                    .iter()
                    .find(|(m, _)| m.spatial == s)
                    .map(|(m, _)| m.bin)
                    .expect("selected terms have one photon per pattern port")
            })
            .collect()
    };
    let layout = layout_of(selected[0].0);
    for (occ, _) in &selected {
        if layout_of(occ) != layout {
            return Err(Error::MixedConditional(
                "internal-bin layout differs between post-selected terms".into(),
            ));
        }
    }

    let n = pattern.len();
    let mut amps = CVector::zeros(1 << n);
    let scale = C64::new(1.0 / probability.sqrt(), 0.0);
    for (occ, amp) in &selected {
        let mut index = 0usize;
        for &s in pattern {
            let (m, _) = occ
                .modes()
                .iter()
                .find(|(m, _)| m.spatial == s)
                .expect("one photon per pattern port");
            index = (index << 1) | m.pol.bit();
        }
        amps[index] += *amp * scale;
    }
    Ok((probability, QubitState::new(n, amps)?))
}

fn check_pattern(state: &PhotonicState, pattern: &[u16]) -> Result<()> {
    if pattern.is_empty() {
        return Err(Error::InvalidArgument("empty post-selection pattern".into()));
    }
    let mut seen = pattern.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != pattern.len() {
        return Err(Error::InvalidArgument(
            "duplicate port in post-selection pattern".into(),
        ));
    }
    let ports = state.occupied_ports();
    for &s in pattern {
        if !ports.contains(&s) {
            return Err(Error::UnknownMode(s));
        }
    }
    Ok(())
}

/// The photon-pair state a source emits into two ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// (|HV> - |VH>)/sqrt(2)
    SingletPsiMinus,
    /// (|HV> + |VH>)/sqrt(2)
    TripletPsiPlus,
    /// (|HH> + |VV>)/sqrt(2)
    PhiPlus,
    /// (|HH> - |VV>)/sqrt(2)
    PhiMinus,
    /// |H> in the first port, |V> in the second
    ProductHV,
}

impl PairKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "singlet" | "psi-minus" => Ok(PairKind::SingletPsiMinus),
            "triplet" | "psi-plus" => Ok(PairKind::TripletPsiPlus),
            "phi-plus" => Ok(PairKind::PhiPlus),
            "phi-minus" => Ok(PairKind::PhiMinus),
            "product" | "product-hv" => Ok(PairKind::ProductHV),
            other => Err(Error::ConfigGeneral(format!("unknown pair kind '{other}'"))),
        }
    }
}

/// One photon-pair source and the ports it feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSource {
    pub ports: (u16, u16),
    pub kind: PairKind,
}

/// Declarative description of all pair sources in the experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceConfig {
    pub pairs: Vec<PairSource>,
}

impl SourceConfig {
    /// Two polarization singlets on ports (1,2) and (3,4): the configuration
    /// used for the concurrence scans.
    pub fn two_singlets() -> Self {
        Self {
            pairs: vec![
                PairSource { ports: (1, 2), kind: PairKind::SingletPsiMinus },
                PairSource { ports: (3, 4), kind: PairKind::SingletPsiMinus },
            ],
        }
    }

    /// Singlet on (1,2) plus the |H>|V> product pair on (3,4) that a
    /// collinear source followed by a polarizing beam splitter produces.
    pub fn singlet_plus_product() -> Self {
        Self {
            pairs: vec![
                PairSource { ports: (1, 2), kind: PairKind::SingletPsiMinus },
                PairSource { ports: (3, 4), kind: PairKind::ProductHV },
            ],
        }
    }

    pub fn ports(&self) -> Vec<u16> {
        let mut v: Vec<u16> = self
            .pairs
            .iter()
            .flat_map(|p| [p.ports.0, p.ports.1])
            .collect();
        v.sort_unstable();
        v
    }

    pub fn total_photons(&self) -> u32 {
        2 * self.pairs.len() as u32
    }

    fn validate(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::InvalidArgument("no pair sources declared".into()));
        }
        let mut ports = self.ports();
        let len = ports.len();
        ports.dedup();
        if ports.len() != len {
            return Err(Error::InvalidArgument(
                "pair sources share an output port".into(),
            ));
        }
        Ok(())
    }

    /// Emits the product of all pair states, photons in internal bin 0.
    pub fn build_state(&self) -> Result<PhotonicState> {
        self.validate()?;
        let one = C64::new(1.0, 0.0);
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut state = PhotonicState::vacuum();
        for pair in &self.pairs {
            let (p, q) = pair.ports;
            let combos: Vec<(Polarization, Polarization, C64)> = match pair.kind {
                PairKind::SingletPsiMinus => vec![
                    (Polarization::H, Polarization::V, s),
                    (Polarization::V, Polarization::H, -s),
                ],
                PairKind::TripletPsiPlus => vec![
                    (Polarization::H, Polarization::V, s),
                    (Polarization::V, Polarization::H, s),
                ],
                PairKind::PhiPlus => vec![
                    (Polarization::H, Polarization::H, s),
                    (Polarization::V, Polarization::V, s),
                ],
                PairKind::PhiMinus => vec![
                    (Polarization::H, Polarization::H, s),
                    (Polarization::V, Polarization::V, -s),
                ],
                PairKind::ProductHV => vec![(Polarization::H, Polarization::V, one)],
            };
            let mut accum: Option<PhotonicState> = None;
            for (pol_p, pol_q, amp) in combos {
                let term = state
                    .apply_creation(&[(ModeLabel::new(p, pol_p, 0), one)])?
                    .apply_creation(&[(ModeLabel::new(q, pol_q, 0), amp)])?;
                accum = Some(match accum {
                    None => term,
                    Some(acc) => acc.add(&term)?,
                });
            }
            state = accum.expect("at least one combination per pair");
        }
        Ok(state)
    }
}

/// Routes the declared sources through the TDC and post-selects a fourfold
/// coincidence, returning the success probability and the conditional
/// four-qubit polarization state (qubit i = pattern port i).
pub fn simulate_postselected_state(
    sources: &SourceConfig,
    setting: &TdcSetting,
    interfering: (u16, u16),
    pattern: &[u16; 4],
) -> Result<(f64, QubitState)> {
    if sources.total_photons() != 4 {
        return Err(Error::PhotonNumberMismatch(format!(
            "sources emit {} photons, need exactly 4",
            sources.total_photons()
        )));
    }
    let ports = sources.ports();
    for port in [interfering.0, interfering.1] {
        if !ports.contains(&port) {
            return Err(Error::UnknownMode(port));
        }
    }
    let state = sources.build_state()?;
    let mixed = apply_tdc(
        &state,
        interfering.0,
        interfering.1,
        (interfering.0, interfering.1),
        setting,
    )?;
    coincidence_postselect(&mixed, pattern)
}

/// Gaussian Hong-Ou-Mandel dip model: width, systematic visibility factor,
/// and the coincidence rate far from zero delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomDipModel {
    pub sigma: f64,
    pub v_sys: f64,
    pub baseline: f64,
}

impl HomDipModel {
    pub fn new(sigma: f64, v_sys: f64, baseline: f64) -> Result<Self> {
        if sigma <= 0.0 || sigma.is_nan() {
            return Err(Error::OutOfRange(format!("dip width sigma {sigma}")));
        }
        if !(0.0..=1.0).contains(&v_sys) {
            return Err(Error::OutOfRange(format!("V_sys {v_sys}")));
        }
        Ok(Self { sigma, v_sys, baseline })
    }

    /// Internal-bin overlap s(dt) = exp(-dt^2 / (2 sigma^2)).
    pub fn overlap(&self, delay: f64) -> f64 {
        (-delay * delay / (2.0 * self.sigma * self.sigma)).exp()
    }

    /// Expected coincidence rate at the given delay,
    /// baseline * (1 - V_sys * V_ideal(eta) * s^2).
    pub fn rate(&self, eta: f64, delay: f64) -> Result<f64> {
        let v = ideal_hom_visibility(eta)?;
        let s = self.overlap(delay);
        Ok(self.baseline * (1.0 - self.v_sys * v * s * s))
    }
}

/// Expected coincidence rate over a grid of delays.
pub fn hom_dip_curve(eta: f64, delays: &[f64], model: &HomDipModel) -> Result<Vec<(f64, f64)>> {
    delays
        .iter()
        .map(|&d| Ok((d, model.rate(eta, d)?)))
        .collect()
}

/// Least-squares fit of the single systematic-visibility factor:
/// V_sys = sum V_i V_ideal(eta_i) / sum V_ideal(eta_i)^2.
pub fn fit_vsys(points: &[(f64, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::DegenerateFit("no data points".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &(eta, v) in points {
        let vi = ideal_hom_visibility(eta)?;
        num += v * vi;
        den += vi * vi;
    }
    if den <= 0.0 {
        return Err(Error::DegenerateFit(
            "all points have zero ideal visibility".into(),
        ));
    }
    Ok(num / den)
}

/// Two photons at zero delay versus full delay: visibility extracted from
/// the Fock simulation as 1 - P_coinc(0) / P_coinc(inf).
///
/// Independent route to [`ideal_hom_visibility`], used as its oracle.
pub fn hom_visibility_from_fock(setting: &TdcSetting) -> Result<f64> {
    let one = C64::new(1.0, 0.0);
    let indistinguishable = PhotonicState::vacuum()
        .apply_creation(&[(ModeLabel::new(1, Polarization::H, 0), one)])?
        .apply_creation(&[(ModeLabel::new(2, Polarization::H, 0), one)])?;
    let distinguishable = PhotonicState::vacuum()
        .apply_creation(&[(ModeLabel::new(1, Polarization::H, 0), one)])?
        .apply_creation(&[(ModeLabel::new(2, Polarization::H, 1), one)])?;
    let p0 = coincidence_probability(
        &apply_tdc(&indistinguishable, 1, 2, (3, 4), setting)?,
        &[3, 4],
    )?;
    let pinf = coincidence_probability(
        &apply_tdc(&distinguishable, 1, 2, (3, 4), setting)?,
        &[3, 4],
    )?;
    if pinf <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    Ok(1.0 - p0 / pinf)
}

/// Fock-level dip: photon 1 occupies a superposition of internal bins with
/// overlap s against photon 2, and the coincidence rate is read off the
/// simulation. Oracle for [`HomDipModel::rate`] at V_sys = 1.
pub fn hom_dip_rate_from_fock(setting: &TdcSetting, overlap: f64, baseline: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::OutOfRange(format!("bin overlap {overlap}")));
    }
    let one = C64::new(1.0, 0.0);
    let ortho = (1.0 - overlap * overlap).sqrt();
    let state = PhotonicState::vacuum()
        .apply_creation(&[
            (ModeLabel::new(1, Polarization::H, 0), C64::new(overlap, 0.0)),
            (ModeLabel::new(1, Polarization::H, 1), C64::new(ortho, 0.0)),
        ])?
        .apply_creation(&[(ModeLabel::new(2, Polarization::H, 0), one)])?;
    let p = coincidence_probability(&apply_tdc(&state, 1, 2, (3, 4), setting)?, &[3, 4])?;
    let pinf = 1.0 - 2.0 * setting.reflectivity() * (1.0 - setting.reflectivity());
    Ok(baseline * p / pinf)
}
