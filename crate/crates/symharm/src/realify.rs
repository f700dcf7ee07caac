//! Conversion of potentially-real complex unitary irreps into real
//! orthogonal irreps.
//!
//! The construction runs in three steps. A group average
//! `Z = (1/N_g) sum_g Gamma(g) A Gamma(g)ᵀ` over a symmetric probe `A`
//! produces (when nonzero) a transpose-symmetric matrix with `Z* Z = c_Z I`
//! that conjugates the irrep into its complex conjugate. Rescaling gives a
//! symmetric unitary `C = Z / sqrt(c_Z)`. Finally `C` is Takagi-factored as
//! `C = S Sᵀ` with `S` unitary: the coneigenvectors of `C` are read off the
//! eigenvectors of the real symmetric matrix
//! `B = [[Re C, Im C], [Im C, -Re C]]`, whose positive spectrum is all ones.
//! Then `Gamma_r(g) = Sᴴ Gamma(g) S` is real orthogonal.
//!
//! The eigensolver is an in-crate cyclic Jacobi sweep; the matrices are at
//! most 10x10, and keeping the kernel local makes the output deterministic.

use std::fmt;

use num_complex::Complex64;

use crate::group::FiniteRotationGroup;
use crate::irreps::{Irrep, Realness};
use crate::mat::{CMat, RMat};
use crate::rng::SplitMix64;

/// Seed for the randomized fallback probes.
pub const PROBE_SEED: u64 = 0x5EED;

#[derive(Clone, Debug, PartialEq)]
pub enum RealifyError {
    /// Realification is only defined for potentially-real irreps.
    NotPotentiallyReal { realness: Realness },
    /// Every probe matrix averaged to zero (not reachable for valid data).
    AllProbesZero,
    /// Z* Z deviates from a positive multiple of the identity.
    NotIsotropic { defect: f64 },
    /// Jacobi sweep failed to converge.
    NoConvergence { sweeps: usize },
    /// An eigenvalue of the real representation strayed from modulus one.
    SpectrumViolation { eigenvalue: f64 },
    /// The similarity produced matrices with a visible imaginary part.
    ImaginaryResidue { residue: f64 },
}

impl fmt::Display for RealifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealifyError::NotPotentiallyReal { realness } => {
                write!(f, "irrep is {realness}, not potentially real")
            }
            RealifyError::AllProbesZero => write!(f, "all probe averages vanished"),
            RealifyError::NotIsotropic { defect } => {
                write!(f, "Z* Z is not a scalar matrix (defect {defect:.3e})")
            }
            RealifyError::NoConvergence { sweeps } => {
                write!(f, "Jacobi eigensolver did not converge in {sweeps} sweeps")
            }
            RealifyError::SpectrumViolation { eigenvalue } => {
                write!(f, "eigenvalue {eigenvalue} of the real representation is not of modulus 1")
            }
            RealifyError::ImaginaryResidue { residue } => {
                write!(f, "similarity left imaginary residue {residue:.3e}")
            }
        }
    }
}

impl std::error::Error for RealifyError {}

/// A transpose-symmetric unitary matrix (`Cᵀ = C`, `C* C = I`).
#[derive(Clone, Debug)]
pub struct SymmetricUnitary {
    c: CMat,
}

impl SymmetricUnitary {
    /// Validates both defining properties to 1e-10.
    pub fn new(c: CMat) -> Result<Self, RealifyError> {
        let sym_defect = c.sub(&c.transpose()).max_abs();
        let unit_defect = c.conj().mul(&c).max_abs_diff(&CMat::identity(c.rows()));
        let defect = sym_defect.max(unit_defect);
        if defect > 1e-10 {
            return Err(RealifyError::NotIsotropic { defect });
        }
        Ok(SymmetricUnitary { c })
    }

    pub fn matrix(&self) -> &CMat {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.c.rows()
    }
}

/// Output of [`realify_irrep`].
#[derive(Clone, Debug)]
pub struct RealificationResult {
    /// Unitary similarity with `Gamma_r(g) = Sᴴ Gamma(g) S`.
    pub s: CMat,
    /// Real orthogonal irrep matrices, canonical element order.
    pub gamma_r: Vec<RMat>,
    /// Normalization constant of the Z average that was used.
    pub c_z: f64,
}

/// Group average `Z = (1/N_g) sum_g Gamma(g) A Gamma(g)ᵀ` (the transpose
/// form is valid because the irrep is unitary). A zero result is a valid
/// return; the caller decides how to proceed.
pub fn compute_z(irrep: &Irrep, group: &FiniteRotationGroup, probe: &CMat) -> CMat {
    assert!(
        probe.sub(&probe.transpose()).max_abs() < 1e-12,
        "probe must be transpose-symmetric"
    );
    let n = group.order();
    let d = irrep.dim;
    let mut acc = CMat::zeros(d, d);
    for g in 0..n {
        let m = irrep.matrix(g);
        acc = acc.add(&m.mul(probe).mul(&m.transpose()));
    }
    acc.scale(Complex64::new(1.0 / n as f64, 0.0))
}

/// Rescales a nonzero Z average to a symmetric unitary: `C = Z / sqrt(c_Z)`
/// with `c_Z = trace(Z* Z) / d`.
pub fn normalize_c(z: &CMat) -> Result<(SymmetricUnitary, f64), RealifyError> {
    assert!(z.max_abs() > 1e-8, "normalize_c requires a nonzero Z");
    let d = z.rows();
    let zz = z.conj().mul(z);
    let c_z = zz.trace().re / d as f64;
    // Z* Z must be c_Z I: check off-diagonal entries and the diagonal spread.
    let mut defect: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let expect = if i == j { Complex64::new(c_z, 0.0) } else { Complex64::new(0.0, 0.0) };
            defect = defect.max((zz.get(i, j) - expect).norm());
        }
    }
    if defect > 1e-8 || c_z <= 0.0 {
        return Err(RealifyError::NotIsotropic { defect });
    }
    let c = z.scale(Complex64::new(1.0 / c_z.sqrt(), 0.0));
    Ok((SymmetricUnitary::new(c)?, c_z))
}

/// Eigenvalues (descending) and orthonormal eigenvectors (as matrix columns,
/// in the same order) of a small real symmetric matrix, by cyclic Jacobi
/// rotations. Ties in the sort are broken by the pre-sort column index, so
/// the output is deterministic.
pub fn jacobi_eigh(b: &RMat) -> Result<(Vec<f64>, RMat), RealifyError> {
    let n = b.rows();
    assert_eq!(n, b.cols(), "matrix must be square");
    assert!(n <= 10, "kernel is sized for matrices up to 10x10");
    assert!(b.sub(&b.transpose()).max_abs() < 1e-12, "matrix must be symmetric");
    let mut a = b.clone();
    let mut v = RMat::identity(n);
    let scale = a.max_abs().max(1e-300);
    let mut converged = false;
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).abs();
            }
        }
        if off <= 1e-15 * scale * (n * n) as f64 {
            converged = true;
            break;
        }
        for p in 0..(n.saturating_sub(1)) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a.get(q, q) - a.get(p, p)) / apq;
                let t = if theta.abs() > 1e12 {
                    0.5 / theta
                } else {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, akp - s * (akq + tau * akp));
                        a.set(p, k, a.get(k, p));
                        a.set(k, q, akq + s * (akp - tau * akq));
                        a.set(q, k, a.get(k, q));
                    }
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp - s * (vkq + tau * vkp));
                    v.set(k, q, vkq + s * (vkp - tau * vkq));
                }
            }
        }
    }
    if !converged {
        return Err(RealifyError::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .partial_cmp(&a.get(i, i))
            .unwrap()
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = RMat::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok((eigenvalues, vectors))
}

/// Real representation `B = [[Re C, Im C], [Im C, -Re C]]` of a symmetric
/// unitary matrix.
pub fn real_representation(c: &SymmetricUnitary) -> RMat {
    let d = c.dim();
    let re = c.matrix().real_part();
    let im = c.matrix().imag_part();
    let mut b = RMat::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            b.set(i, j, re.get(i, j));
            b.set(i, j + d, im.get(i, j));
            b.set(i + d, j, im.get(i, j));
            b.set(i + d, j + d, -re.get(i, j));
        }
    }
    b
}

/// Takagi factorization of a symmetric unitary: a unitary `S` with
/// `S Sᵀ = C`, read off the positive-eigenvalue eigenvectors of the real
/// representation of `C`.
pub fn takagi_factor(c: &SymmetricUnitary) -> Result<CMat, RealifyError> {
    let d = c.dim();
    let b = real_representation(c);
    let (eigenvalues, vectors) = jacobi_eigh(&b)?;
    for &lam in &eigenvalues {
        if (lam.abs() - 1.0).abs() > 1e-7 {
            return Err(RealifyError::SpectrumViolation { eigenvalue: lam });
        }
    }
    // Descending order puts the d positive eigenvalues first; they must all
    // equal +1.
    for &lam in eigenvalues.iter().take(d) {
        if (lam - 1.0).abs() > 1e-9 {
            return Err(RealifyError::SpectrumViolation { eigenvalue: lam });
        }
    }
    // Column [x; -y] of the positive eigenspace yields the coneigenvector
    // x - i y; stacking them gives S = [I, iI] V.
    let mut s = CMat::zeros(d, d);
    for col in 0..d {
        for row in 0..d {
            let x = vectors.get(row, col);
            let minus_y = vectors.get(row + d, col);
            s.set(row, col, Complex64::new(x, minus_y));
        }
    }
    let unit_defect = s.unitarity_defect();
    let factor_defect = s.mul(&s.transpose()).max_abs_diff(c.matrix());
    if unit_defect > 1e-9 || factor_defect > 1e-9 {
        return Err(RealifyError::SpectrumViolation { eigenvalue: f64::NAN });
    }
    Ok(s)
}

fn seeded_symmetric_probe(rng: &mut SplitMix64, d: usize) -> CMat {
    let mut b = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            b.set(i, j, Complex64::new(rng.next_signed(), rng.next_signed()));
        }
    }
    b.add(&b.transpose()).scale(Complex64::new(0.5, 0.0))
}

/// Full realification of a potentially-real irrep.
///
/// Probes are tried in a fixed order: the exchange permutation, the
/// identity, then up to 16 seeded random symmetric matrices. The first probe
/// with a nonzero average is used.
pub fn realify_irrep(
    irrep: &Irrep,
    group: &FiniteRotationGroup,
) -> Result<RealificationResult, RealifyError> {
    if irrep.realness != Realness::PotentiallyReal {
        return Err(RealifyError::NotPotentiallyReal { realness: irrep.realness });
    }
    let d = irrep.dim;
    let mut probes = vec![CMat::exchange(d), CMat::identity(d)];
    let mut rng = SplitMix64::new(PROBE_SEED);
    for _ in 0..16 {
        probes.push(seeded_symmetric_probe(&mut rng, d));
    }
    for probe in &probes {
        let z = compute_z(irrep, group, probe);
        if z.max_abs() <= 1e-8 {
            continue;
        }
        let (c, c_z) = normalize_c(&z)?;
        let s = takagi_factor(&c)?;
        let sh = s.hermitian();
        let mut gamma_r = Vec::with_capacity(group.order());
        let mut residue: f64 = 0.0;
        for g in 0..group.order() {
            let m = sh.mul(irrep.matrix(g)).mul(&s);
            residue = residue.max(m.max_imag());
            gamma_r.push(m.real_part());
        }
        if residue > 1e-9 {
            return Err(RealifyError::ImaginaryResidue { residue });
        }
        let result = RealificationResult { s, gamma_r, c_z };
        validate_realification(irrep, group, &result);
        return Ok(result);
    }
    Err(RealifyError::AllProbesZero)
}

fn validate_realification(irrep: &Irrep, group: &FiniteRotationGroup, r: &RealificationResult) {
    let n = group.order();
    for g in 0..n {
        let m = &r.gamma_r[g];
        assert!(
            m.orthogonality_defect() < 1e-10,
            "realified matrix {g} of {} p={} is not orthogonal",
            irrep.group,
            irrep.p
        );
    }
    for g in 0..n {
        for h in 0..n {
            let defect = r.gamma_r[g].mul(&r.gamma_r[h]).max_abs_diff(&r.gamma_r[group.mul(g, h)]);
            assert!(defect < 1e-9, "realified homomorphism broke at ({g},{h})");
        }
    }
}
