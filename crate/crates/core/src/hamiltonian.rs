//! NV⁻ ground-state spin Hamiltonian and transition-frequency analysis.
//!
//! Builds H/h in Hz for the electronic spin-1 system, optionally coupled to
//! the nitrogen nuclear spin (¹⁴N, I = 1, or ¹⁵N, I = ½), including the
//! electric-field/strain interaction. The frame convention places z along
//! the NV internuclear axis; θ_B is measured from z. The azimuthal angle of
//! the magnetic field does not affect the electronic-only spectrum and is
//! neglected in the perturbative expansion.
//!
//! The nuclear Zeeman term is omitted: the compiled constant set carries no
//! nuclear g-factor, and the term is sub-kHz at the mT-scale fields treated
//! here. The (S_xS_z + S_zS_x)-type couplings use the strain parameters
//! N_x, N_y alone, as no compiled electric dipole constant exists for them.

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::{constants, PhysicalConstants};
use crate::linalg::{eigh, CMatrix, LinalgError};

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("eigensolver did not converge: {0}")]
    Numerical(#[from] LinalgError),
    #[error("field environment invalid: {0}")]
    InvalidEnvironment(String),
    #[error("perturbative series out of its validity domain: {0}")]
    Domain(String),
    #[error(
        "transverse terms too large for the two-level reduction \
         (largest off-diagonal element {found:.3e} Hz exceeds {limit:.3e} Hz)"
    )]
    NotDiagonal { found: f64, limit: f64 },
}

/// Spin-strain coupling parameters, all in Hz.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StrainCouplings {
    pub m_z: f64,
    pub m_x: f64,
    pub m_y: f64,
    pub n_x: f64,
    pub n_y: f64,
}

/// External fields and strain in the NV frame.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldEnvironment {
    /// Magnetic field vector (B_x, B_y, B_z) in tesla.
    pub b_vec_t: [f64; 3],
    /// Electric field vector in V/m.
    pub e_vec_vpm: [f64; 3],
    /// Spin-strain couplings.
    pub strain: StrainCouplings,
}

impl FieldEnvironment {
    /// Purely axial magnetic field.
    pub fn axial_b(b_z_t: f64) -> Self {
        Self {
            b_vec_t: [0.0, 0.0, b_z_t],
            ..Self::default()
        }
    }

    /// Magnetic field of magnitude `b_t` at polar angle `theta_b` from the
    /// NV axis (in the x-z plane; the electronic spectrum is independent of
    /// the azimuth).
    pub fn tilted_b(b_t: f64, theta_b: f64) -> Self {
        Self {
            b_vec_t: [b_t * theta_b.sin(), 0.0, b_t * theta_b.cos()],
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), HamiltonianError> {
        let b_norm = self
            .b_vec_t
            .iter()
            .map(|b| b * b)
            .sum::<f64>()
            .sqrt();
        let all = self
            .b_vec_t
            .iter()
            .chain(self.e_vec_vpm.iter())
            .chain([
                &self.strain.m_z,
                &self.strain.m_x,
                &self.strain.m_y,
                &self.strain.n_x,
                &self.strain.n_y,
            ]);
        for v in all {
            if !v.is_finite() {
                return Err(HamiltonianError::InvalidEnvironment(
                    "non-finite field component".into(),
                ));
            }
        }
        // |B| > 1 T almost certainly indicates a unit mistake (mT or G fed
        // in as T).
        if b_norm > 1.0 {
            return Err(HamiltonianError::InvalidEnvironment(format!(
                "|B| = {b_norm} T exceeds the 1 T guard"
            )));
        }
        Ok(())
    }
}

/// Nitrogen nuclear spin content of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nucleus {
    /// Electronic spin only (3×3).
    None,
    /// ¹⁴N, I = 1 (9×9).
    N14,
    /// ¹⁵N, I = ½ (6×6).
    N15,
}

/// Spin Hamiltonian H/h in Hz with labeled basis states.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    pub matrix: CMatrix,
    /// Ordered (m_s, m_I) labels; m_I is None for the electronic-only case.
    pub basis: Vec<(i8, Option<f64>)>,
    pub nucleus: Nucleus,
}

/// One labeled transition frequency in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub label: String,
    pub frequency_hz: f64,
}

/// Spin-projection operators (S_x, S_y, S_z) for spin j = `two_j`/2,
/// dimension two_j + 1, basis ordered by descending m.
fn spin_operators(two_j: u8) -> (CMatrix, CMatrix, CMatrix) {
    let dim = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let mut sp = CMatrix::zeros(dim); // raising operator S+
    for k in 1..dim {
        // row k-1 (m+1) <- col k (m), m = j - k
        let m = j - k as f64;
        let amp = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        sp[(k - 1, k)] = Complex64::new(amp, 0.0);
    }
    let mut sx = CMatrix::zeros(dim);
    let mut sy = CMatrix::zeros(dim);
    let mut sz = CMatrix::zeros(dim);
    for r in 0..dim {
        sz[(r, r)] = Complex64::new(j - r as f64, 0.0);
        for c in 0..dim {
            let up = sp[(r, c)];
            let dn = sp[(c, r)].conj(); // (S-)[r][c] = (S+)[c][r]*
            sx[(r, c)] = (up + dn) * 0.5;
            sy[(r, c)] = (up - dn) * Complex64::new(0.0, -0.5);
        }
    }
    (sx, sy, sz)
}

fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut ab = a.matmul(b);
    let ba = b.matmul(a);
    for i in 0..ab.dim {
        for j in 0..ab.dim {
            ab[(i, j)] += ba[(i, j)];
        }
    }
    ab
}

/// Electronic 3×3 part: zero-field splitting, Zeeman, and the five
/// electric/strain coupling terms.
fn electronic_hamiltonian(env: &FieldEnvironment, k: &PhysicalConstants) -> CMatrix {
    let (sx, sy, sz) = spin_operators(2);
    let sz2 = sz.matmul(&sz);
    let sx2 = sx.matmul(&sx);
    let sy2 = sy.matmul(&sy);

    let gamma = k.gamma_e_over_2pi(); // Hz/T
    let [bx, by, bz] = env.b_vec_t;
    let [ex, ey, ez] = env.e_vec_vpm;
    let s = env.strain;

    let mut h = CMatrix::zeros(3);
    h.add_scaled(&sz2, k.d_zfs + k.d_par * ez + s.m_z);
    h.add_scaled(&sx, gamma * bx);
    h.add_scaled(&sy, gamma * by);
    h.add_scaled(&sz, gamma * bz);

    // (d⊥E_x + M_x)(S_y² − S_x²)
    let mut sy2_minus_sx2 = sy2;
    sy2_minus_sx2.add_scaled(&sx2, -1.0);
    h.add_scaled(&sy2_minus_sx2, k.d_perp * ex + s.m_x);

    // (d⊥E_y + M_y)(S_xS_y + S_yS_x)
    h.add_scaled(&anticommutator(&sx, &sy), k.d_perp * ey + s.m_y);

    // N_x(S_xS_z + S_zS_x) + N_y(S_yS_z + S_zS_y), strain couplings only.
    h.add_scaled(&anticommutator(&sx, &sz), s.n_x);
    h.add_scaled(&anticommutator(&sy, &sz), s.n_y);
    h
}

/// Build the ground-state spin Hamiltonian H/h in Hz.
///
/// Basis order is electron-major with m_s = +1, 0, −1 and, within each
/// electronic level, descending m_I.
pub fn build_hamiltonian(
    env: &FieldEnvironment,
    nucleus: Nucleus,
) -> Result<SpinHamiltonian, HamiltonianError> {
    env.validate()?;
    let k = constants();
    let h_el = electronic_hamiltonian(env, &k);

    let (matrix, basis) = match nucleus {
        Nucleus::None => {
            let basis = vec![(1i8, None), (0, None), (-1, None)];
            (h_el, basis)
        }
        Nucleus::N14 | Nucleus::N15 => {
            let (two_i, a_par, a_perp, quad_p) = match nucleus {
                Nucleus::N14 => (2u8, k.a_par_14n, k.a_perp_14n, k.p_14n),
                Nucleus::N15 => (1u8, k.a_par_15n, k.a_perp_15n, 0.0),
                Nucleus::None => unreachable!(),
            };
            let nuc_dim = two_i as usize + 1;
            let i_spin = two_i as f64 / 2.0;
            let (ix, iy, iz) = spin_operators(two_i);
            let (sx, sy, sz) = spin_operators(2);
            let id_n = CMatrix::identity(nuc_dim);
            let id_e = CMatrix::identity(3);

            let mut h = CMatrix::zeros(3 * nuc_dim);
            h.add_kron(&h_el, &id_n, 1.0);
            h.add_kron(&sz, &iz, a_par);
            h.add_kron(&sx, &ix, a_perp);
            h.add_kron(&sy, &iy, a_perp);
            // P (I_z² − I(I+1)/3); vanishes identically for I = ½.
            let mut quad = iz.matmul(&iz);
            let offset = i_spin * (i_spin + 1.0) / 3.0;
            for d in 0..nuc_dim {
                quad[(d, d)] -= Complex64::new(offset, 0.0);
            }
            h.add_kron(&id_e, &quad, quad_p);

            let mut basis = Vec::with_capacity(3 * nuc_dim);
            for m_s in [1i8, 0, -1] {
                for r in 0..nuc_dim {
                    basis.push((m_s, Some(i_spin - r as f64)));
                }
            }
            (h, basis)
        }
    };

    debug_assert!(matrix.hermiticity_defect() <= 1e-12 * matrix.norm().max(1.0));
    Ok(SpinHamiltonian {
        matrix,
        basis,
        nucleus,
    })
}

/// Classify an eigenvector by its dominant basis component.
fn dominant_label(vec: &[Complex64], basis: &[(i8, Option<f64>)]) -> (i8, Option<f64>) {
    let mut best = 0usize;
    let mut best_w = -1.0;
    for (i, amp) in vec.iter().enumerate() {
        let w = amp.norm_sqr();
        if w > best_w {
            best_w = w;
            best = i;
        }
    }
    basis[best]
}

/// Exact transition frequencies from eigen-decomposition.
///
/// Returns one entry per dipole-relevant pair (Δm_s = ±1, Δm_I = 0),
/// ordered ascending in frequency. For the electronic-only axial case this
/// is exactly ν± = D ± γB_z/2π.
pub fn transition_frequencies_exact(
    h: &SpinHamiltonian,
) -> Result<Vec<Transition>, HamiltonianError> {
    let eig = eigh(&h.matrix)?;

    let mut out = Vec::new();
    match h.nucleus {
        Nucleus::None => {
            // Lowest eigenvalue is the m_s = 0-like level at the fields
            // admitted by the 1 T guard; the two transitions from it are
            // ν∓ in ascending order.
            let e0 = eig.values[0];
            let mut freqs = [eig.values[1] - e0, eig.values[2] - e0];
            freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            out.push(Transition {
                label: "nu-".into(),
                frequency_hz: freqs[0],
            });
            out.push(Transition {
                label: "nu+".into(),
                frequency_hz: freqs[1],
            });
        }
        Nucleus::N14 | Nucleus::N15 => {
            let labeled: Vec<((i8, Option<f64>), f64)> = eig
                .vectors
                .iter()
                .zip(&eig.values)
                .map(|(v, &e)| (dominant_label(v, &h.basis), e))
                .collect();
            for &((ms_a, mi_a), e_a) in &labeled {
                if ms_a != 0 {
                    continue;
                }
                for &((ms_b, mi_b), e_b) in &labeled {
                    if (ms_b - ms_a).abs() != 1 || mi_a != mi_b {
                        continue;
                    }
                    let sign = if ms_b > 0 { "+" } else { "-" };
                    let mi = mi_a.unwrap_or(f64::NAN);
                    out.push(Transition {
                        label: format!("nu{sign}[mI={mi}]"),
                        frequency_hz: e_b - e_a,
                    });
                }
            }
            out.sort_by(|a, b| a.frequency_hz.partial_cmp(&b.frequency_hz).unwrap());
        }
    }
    Ok(out)
}

/// Third-order perturbative ν± for a field of magnitude `b_t` at angle
/// `theta_b` from the NV axis.
///
/// Series in (γB/2π)/D; valid for that ratio below 0.3 and away from
/// θ_B = π/2, where the tan θ_B term diverges and the exact solver must be
/// used instead.
pub fn transition_frequencies_perturbative(
    b_t: f64,
    theta_b: f64,
) -> Result<(f64, f64), HamiltonianError> {
    let k = constants();
    let ratio = k.gamma_e_over_2pi() * b_t / k.d_zfs;
    if !(0.0..0.3).contains(&ratio.abs()) && ratio.abs() != 0.0 {
        return Err(HamiltonianError::Domain(format!(
            "(γB/2π)/D = {ratio:.3} outside the series radius 0.3"
        )));
    }
    if (theta_b - std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
        return Err(HamiltonianError::Domain(
            "tan θ_B diverges at θ_B = π/2; use the exact solver".into(),
        ));
    }
    let (sin_t, cos_t) = theta_b.sin_cos();
    let tan_t = theta_b.tan();
    let first = ratio * cos_t;
    let second = 1.5 * ratio * ratio * sin_t * sin_t;
    let third = ratio.powi(3) * (0.125 * sin_t.powi(3) * tan_t - 0.5 * sin_t * sin_t * cos_t);
    let nu_plus = k.d_zfs * (1.0 + first + second + third);
    let nu_minus = k.d_zfs * (1.0 - first + second - third);
    Ok((nu_plus, nu_minus))
}

/// Two-level branch for the pseudo-spin-½ reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// {|+1⟩, |0⟩} subspace.
    Plus,
    /// {|−1⟩, |0⟩} subspace.
    Minus,
}

/// Reduce an axial-field 3×3 Hamiltonian to the 2×2 pseudo-spin-½ form
/// with the common energy offset subtracted.
///
/// Row order is (|±1⟩, |0⟩); the diagonal is ±Δ/2 with Δ the transition
/// frequency of the chosen branch. Fails with `NotDiagonal` when any
/// off-diagonal element reaches 1e-6·D.
pub fn reduce_to_pseudo_spin_half(
    h: &SpinHamiltonian,
    branch: Branch,
) -> Result<CMatrix, HamiltonianError> {
    if h.matrix.dim != 3 {
        return Err(HamiltonianError::InvalidEnvironment(
            "two-level reduction requires the electronic-only 3×3 Hamiltonian".into(),
        ));
    }
    let k = constants();
    let limit = 1e-6 * k.d_zfs;
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                worst = worst.max(h.matrix[(i, j)].norm());
            }
        }
    }
    if worst >= limit {
        return Err(HamiltonianError::NotDiagonal {
            found: worst,
            limit,
        });
    }
    let e_zero = h.matrix[(1, 1)].re;
    let e_branch = match branch {
        Branch::Plus => h.matrix[(0, 0)].re,
        Branch::Minus => h.matrix[(2, 2)].re,
    };
    let half = 0.5 * (e_branch - e_zero);
    let mut out = CMatrix::zeros(2);
    out[(0, 0)] = Complex64::new(half, 0.0);
    out[(1, 1)] = Complex64::new(-half, 0.0);
    Ok(out)
}

/// Result of the linear Stark/Zeeman mixing analysis.
///
/// `nu_plus`/`nu_minus` are the ±√(ξ⊥² + β_z²) offsets relative to the
/// common term D + M_z + d∥E_z. The derivatives are those of the ν₊
/// branch; the ν₋ derivatives are their negatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarkZeemanAnalysis {
    /// Mixing angle θ with tan θ = ξ⊥/β_z.
    pub theta: f64,
    /// Azimuthal angle of the transverse coupling, tan φ = ξ_y/ξ_x.
    pub phi: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    /// dν₊/dξ⊥ = 1/√(1 + (β_z/ξ⊥)²).
    pub dnu_dxi: f64,
    /// dν₊/dβ_z = 1/√(1 + (ξ⊥/β_z)²), signed with β_z.
    pub dnu_dbeta: f64,
}

/// Linear Stark/Zeeman regime analysis from the transverse coupling
/// components ξ_x, ξ_y and the axial Zeeman coupling β_z (all Hz).
///
/// Both zero-coupling limits are handled exactly; at the double-zero point
/// the Stark-limit convention (dν/dξ⊥, dν/dβ_z) = (1, 0) applies.
pub fn stark_zeeman_analysis(xi_x: f64, xi_y: f64, beta_z: f64) -> StarkZeemanAnalysis {
    let xi_perp = xi_x.hypot(xi_y);
    let r = xi_perp.hypot(beta_z);
    let (dnu_dxi, dnu_dbeta) = if r == 0.0 {
        (1.0, 0.0)
    } else {
        (xi_perp / r, beta_z / r)
    };
    StarkZeemanAnalysis {
        theta: xi_perp.atan2(beta_z),
        phi: xi_y.atan2(xi_x),
        nu_plus: r,
        nu_minus: -r,
        dnu_dxi,
        dnu_dbeta,
    }
}
