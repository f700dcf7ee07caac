//! Symmetry-adapted basis functions from generalized projection operators.
//!
//! For a potentially-real irrep p with real orthogonal matrices
//! `Gamma_r(g)`, the projection coefficients
//!
//! ```text
//! calD_{j,k; l,m; m'} = (d_p / N_g) sum_g (Gamma_r(g))_{j,k} checkD_{l,m,m'}(R_g)
//! ```
//!
//! give, for each starting order m, a d_p x (2l+1) block of coefficients
//! over the real harmonics. After normalizing by the k-th row and pruning
//! the redundant blocks by Gram-Schmidt on the k-th rows, the surviving
//! blocks `H` define vectors of basis functions `F = H checkY_l` whose j-th
//! component transforms as row j of the irrep. The number of surviving
//! blocks is reconciled against the character-theoretic multiplicity, which
//! is the source of truth; a disagreement is a hard error, not a warning.
//!
//! Nothing here mutates shared state: assemblies for different degrees (or
//! different groups) are independent, so a caller may fan them out across
//! threads and merge the results by index.

use std::fmt;

use num_complex::Complex64;

use crate::group::GroupName;
use crate::harmonics::{
    check_d, real_sph_harm_vector, sph_harm_vector, ul_matrix, DegreeOutOfRange, SphericalAngles,
};
use crate::irreps::{multiplicity_on_sphere, Realness};
use crate::mat::{CMat, RMat};
use crate::system::SymmetrySystem;

/// Which family of harmonics the coefficients multiply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Coefficients over the real harmonics checkY_l (real matrix).
    RealCheckY,
    /// Coefficients over the complex harmonics Y_l (complex matrix).
    ComplexY,
}

impl Flavor {
    pub fn parse(s: &str) -> Option<Flavor> {
        match s {
            "real" => Some(Flavor::RealCheckY),
            "complex" => Some(Flavor::ComplexY),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Flavor::RealCheckY => "real",
            Flavor::ComplexY => "complex",
        }
    }
}

/// Coefficient storage for one block.
#[derive(Clone, Debug)]
pub enum BlockMatrix {
    Real(RMat),
    Complex(CMat),
}

/// A d_p x (2l+1) coefficient block: `n`-th vector of basis functions of
/// irrep `p` inside the degree-`l` harmonic space.
#[derive(Clone, Debug)]
pub struct CoefficientBlock {
    pub group: GroupName,
    /// 1-based irrep index.
    pub p: usize,
    pub l: usize,
    /// 1-based block index within (p, l).
    pub n: usize,
    pub flavor: Flavor,
    pub matrix: BlockMatrix,
}

impl CoefficientBlock {
    /// Number of rows (the irrep dimension d_p).
    pub fn dim(&self) -> usize {
        match &self.matrix {
            BlockMatrix::Real(m) => m.rows(),
            BlockMatrix::Complex(m) => m.rows(),
        }
    }

    pub fn real_matrix(&self) -> Option<&RMat> {
        match &self.matrix {
            BlockMatrix::Real(m) => Some(m),
            BlockMatrix::Complex(_) => None,
        }
    }

    /// The coefficients as a complex matrix regardless of flavor.
    pub fn complex_matrix(&self) -> CMat {
        match &self.matrix {
            BlockMatrix::Real(m) => m.to_complex(),
            BlockMatrix::Complex(m) => m.clone(),
        }
    }

    /// Row orthonormality defect `H Hᴴ - I`.
    pub fn orthonormality_defect(&self) -> f64 {
        let h = self.complex_matrix();
        h.mul(&h.hermitian()).max_abs_diff(&CMat::identity(h.rows()))
    }
}

/// All blocks of one degree, both flavors, plus the per-irrep counts.
#[derive(Clone, Debug)]
pub struct BasisSetL {
    pub group: GroupName,
    pub l: usize,
    /// (p, N_{p;l}) for every potentially-real irrep, ascending in p.
    pub counts: Vec<(usize, usize)>,
    pub real_blocks: Vec<CoefficientBlock>,
    pub complex_blocks: Vec<CoefficientBlock>,
}

impl BasisSetL {
    pub fn total_functions(&self) -> usize {
        self.real_blocks.iter().map(|b| b.dim()).sum()
    }

    /// Stacks every real block into one (sum d_p N_{p;l}) x (2l+1) matrix,
    /// blocks ordered by (p, n).
    pub fn stacked_real(&self) -> RMat {
        let total = self.total_functions();
        let cols = 2 * self.l + 1;
        let mut out = RMat::zeros(total, cols);
        let mut row = 0;
        for block in &self.real_blocks {
            let m = block.real_matrix().expect("real flavor");
            for i in 0..m.rows() {
                for j in 0..cols {
                    out.set(row, j, m.get(i, j));
                }
                row += 1;
            }
        }
        out
    }

    /// Same stacking for the complex flavor.
    pub fn stacked_complex(&self) -> CMat {
        let total = self.total_functions();
        let cols = 2 * self.l + 1;
        let mut out = CMat::zeros(total, cols);
        let mut row = 0;
        for block in &self.complex_blocks {
            let m = block.complex_matrix();
            for i in 0..m.rows() {
                for j in 0..cols {
                    out.set(row, j, m.get(i, j));
                }
                row += 1;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BasisError {
    /// The irrep has no realification attached to the system.
    IrrepNotRealified { p: usize },
    /// Gram-Schmidt block count disagrees with the character multiplicity.
    CountMismatch { p: usize, l: usize, built: usize, expected: usize },
    Degree(DegreeOutOfRange),
}

impl fmt::Display for BasisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisError::IrrepNotRealified { p } => {
                write!(f, "irrep p={p} has not been realified")
            }
            BasisError::CountMismatch { p, l, built, expected } => write!(
                f,
                "Gram-Schmidt kept {built} blocks for p={p}, l={l} but the character \
                 multiplicity is {expected}"
            ),
            BasisError::Degree(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for BasisError {}

impl From<DegreeOutOfRange> for BasisError {
    fn from(e: DegreeOutOfRange) -> Self {
        BasisError::Degree(e)
    }
}

/// Raw projection block for row weights `(Gamma_r(g))_{., k}` applied to the
/// real harmonic of order `m`: row j of the result is
/// `(d_p / N_g) sum_g (Gamma_r(g))_{j,k} checkD_l(R_g)[m, .]`.
///
/// `checks` must hold `checkD_l(R_g)` per element, in element order.
fn projection_rows_cached(gamma_r: &[RMat], checks: &[RMat], k: usize, l: usize, m: i64) -> RMat {
    let n_g = gamma_r.len();
    let d = gamma_r[0].rows();
    let cols = 2 * l + 1;
    let mrow = (m + l as i64) as usize;
    let mut out = RMat::zeros(d, cols);
    for g in 0..n_g {
        let w_col = &gamma_r[g];
        let row = checks[g].row(mrow);
        for j in 0..d {
            let w = w_col.get(j, k);
            if w == 0.0 {
                continue;
            }
            for c in 0..cols {
                out.set(j, c, out.get(j, c) + w * row[c]);
            }
        }
    }
    out.scale(d as f64 / n_g as f64)
}

/// Public entry point for a single raw projection block. `p` is 1-based,
/// `k` is a 0-based row index. May return an (exactly) zero matrix when the
/// harmonic carries no component of the irrep.
pub fn projection_rows(
    sys: &SymmetrySystem,
    p: usize,
    k: usize,
    l: usize,
    m: i64,
    flavor: Flavor,
) -> Result<BlockMatrix, BasisError> {
    let idx = p - 1;
    let r = sys.realifications[idx].as_ref().ok_or(BasisError::IrrepNotRealified { p })?;
    let checks = precompute_check_ds(sys, l)?;
    let raw = projection_rows_cached(&r.gamma_r, &checks, k, l, m);
    Ok(match flavor {
        Flavor::RealCheckY => BlockMatrix::Real(raw),
        Flavor::ComplexY => {
            let uh = ul_matrix(l).u.hermitian();
            BlockMatrix::Complex(raw.to_complex().mul(&uh))
        }
    })
}

fn precompute_check_ds(sys: &SymmetrySystem, l: usize) -> Result<Vec<RMat>, DegreeOutOfRange> {
    sys.group.elements.iter().map(|e| check_d(l, &e.rotation)).collect()
}

/// Normalizes a raw projection block by the norm of its k-th row. Returns
/// `None` when that norm is below 1e-8 (the harmonic had no component along
/// this irrep row).
pub fn normalize_block(raw: &RMat, k: usize) -> Option<RMat> {
    let norm = row_norm(raw, k);
    if norm <= 1e-8 {
        return None;
    }
    let out = raw.scale(1.0 / norm);
    // Projection-operator theory makes the rows of a normalized block
    // orthonormal; a violation here means a convention bug upstream.
    let defect = out.mul(&out.transpose()).max_abs_diff(&RMat::identity(out.rows()));
    assert!(defect < 1e-9, "normalized block rows not orthonormal (defect {defect:.3e})");
    Some(out)
}

fn row_norm(m: &RMat, k: usize) -> f64 {
    m.row(k).iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn row_dot(a: &RMat, b: &RMat, k: usize) -> f64 {
    a.row(k).iter().zip(b.row(k)).map(|(x, y)| x * y).sum()
}

/// Prunes a list of normalized candidate blocks (all for the same `(p, l)`
/// and the same distinguished row `k`) to a mutually orthonormal family.
///
/// Because all blocks transform identically, inner products taken on the
/// distinguished row determine the overlap of whole blocks, so one
/// Gram-Schmidt pass on the k-th rows orthogonalizes every row at once. A
/// candidate is kept when its residual norm exceeds 1e-6; the final count
/// must equal `expected`, the character-oracle multiplicity.
pub fn gram_schmidt_blocks(
    candidates: &[RMat],
    k: usize,
    p: usize,
    l: usize,
    expected: usize,
) -> Result<Vec<RMat>, BasisError> {
    let mut accepted: Vec<RMat> = Vec::new();
    for cand in candidates {
        let mut residual = cand.clone();
        for acc in &accepted {
            let overlap = row_dot(acc, &residual, k);
            residual = residual.sub(&acc.scale(overlap));
        }
        let norm = row_norm(&residual, k);
        if norm > 1e-6 {
            accepted.push(residual.scale(1.0 / norm));
        }
    }
    if accepted.len() != expected {
        return Err(BasisError::CountMismatch { p, l, built: accepted.len(), expected });
    }
    // Cross-block row orthonormality, every row index.
    for (a, block_a) in accepted.iter().enumerate() {
        for (b, block_b) in accepted.iter().enumerate() {
            for row in 0..block_a.rows() {
                let dot = row_dot(block_a, block_b, row);
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (dot - expect).abs() < 1e-9,
                    "blocks {a},{b} row {row} overlap {dot:.3e}"
                );
            }
        }
    }
    Ok(accepted)
}

/// Builds every coefficient block of degree `l`: projection, normalization
/// and Gram-Schmidt over all potentially-real irreps, with candidates taken
/// in ascending order of the starting m. Both flavors are populated; the
/// complex blocks are `H_hat = H_check U_lᴴ`.
pub fn assemble_basis(sys: &SymmetrySystem, l: usize) -> Result<BasisSetL, BasisError> {
    let checks = precompute_check_ds(sys, l)?;
    let uh = ul_matrix(l).u.hermitian();
    let mut counts = Vec::new();
    let mut real_blocks = Vec::new();
    let mut complex_blocks = Vec::new();
    for (idx, irrep) in sys.irreps.iter().enumerate() {
        if irrep.realness != Realness::PotentiallyReal {
            continue;
        }
        let p = irrep.p;
        let r = sys.realifications[idx].as_ref().ok_or(BasisError::IrrepNotRealified { p })?;
        let expected = multiplicity_on_sphere(irrep, &sys.group, l);
        // Column k = 0 works unless that row of the projector vanishes for
        // every m; scan forward in that case.
        let mut blocks = Vec::new();
        for k in 0..irrep.dim {
            let mut candidates = Vec::new();
            for m in -(l as i64)..=(l as i64) {
                let raw = projection_rows_cached(&r.gamma_r, &checks, k, l, m);
                if let Some(normalized) = normalize_block(&raw, k) {
                    candidates.push(normalized);
                }
            }
            if !candidates.is_empty() {
                blocks = gram_schmidt_blocks(&candidates, k, p, l, expected)?;
                break;
            }
        }
        if blocks.is_empty() && expected != 0 {
            return Err(BasisError::CountMismatch { p, l, built: 0, expected });
        }
        counts.push((p, blocks.len()));
        for (i, h) in blocks.into_iter().enumerate() {
            let hat = h.to_complex().mul(&uh);
            real_blocks.push(CoefficientBlock {
                group: sys.group.name,
                p,
                l,
                n: i + 1,
                flavor: Flavor::RealCheckY,
                matrix: BlockMatrix::Real(h),
            });
            complex_blocks.push(CoefficientBlock {
                group: sys.group.name,
                p,
                l,
                n: i + 1,
                flavor: Flavor::ComplexY,
                matrix: BlockMatrix::Complex(hat),
            });
        }
    }
    let set = BasisSetL { group: sys.group.name, l, counts, real_blocks, complex_blocks };
    // Structural count identities.
    let total = set.total_functions();
    match sys.group.name {
        GroupName::Octahedral | GroupName::Icosahedral => {
            assert_eq!(total, 2 * l + 1, "completeness count failed at l={l}");
        }
        GroupName::Tetrahedral => {
            let m_e = multiplicity_on_sphere(&sys.irreps[1], &sys.group, l);
            assert_eq!(total, 2 * l + 1 - 2 * m_e, "tetrahedral deficit failed at l={l}");
        }
    }
    Ok(set)
}

/// Evaluates the block's vector of basis functions at one point. The complex
/// flavor must produce a real value; its imaginary residue is checked
/// against 1e-10 and truncated.
pub fn evaluate_basis(
    block: &CoefficientBlock,
    angles: SphericalAngles,
) -> Result<Vec<f64>, DegreeOutOfRange> {
    match &block.matrix {
        BlockMatrix::Real(h) => {
            let cy = real_sph_harm_vector(block.l, angles)?;
            Ok((0..h.rows())
                .map(|j| h.row(j).iter().zip(&cy).map(|(c, y)| c * y).sum())
                .collect())
        }
        BlockMatrix::Complex(h) => {
            let y = sph_harm_vector(block.l, angles)?;
            let mut out = Vec::with_capacity(h.rows());
            for j in 0..h.rows() {
                let acc: Complex64 = h.row(j).iter().zip(&y).map(|(c, v)| c * v).sum();
                assert!(
                    acc.im.abs() < 1e-10,
                    "complex-flavor evaluation left imaginary residue {:.3e}",
                    acc.im
                );
                out.push(acc.re);
            }
            Ok(out)
        }
    }
}

/// Max componentwise error of the transformation law
/// `F(R_g^{-1} x) = Gamma_r(g)ᵀ F(x)` over every group element and every
/// sample direction. The caller judges the result against its threshold.
pub fn verify_transformation(
    sys: &SymmetrySystem,
    block: &CoefficientBlock,
    sample: &[SphericalAngles],
) -> Result<f64, BasisError> {
    let idx = block.p - 1;
    let r = sys.realifications[idx]
        .as_ref()
        .ok_or(BasisError::IrrepNotRealified { p: block.p })?;
    let d = block.dim();
    let mut worst: f64 = 0.0;
    for &angles in sample {
        let f_here = evaluate_basis(block, angles)?;
        let x = angles.to_unit_vector();
        for g in 0..sys.group.order() {
            let rotated = SphericalAngles::from_vector(sys.group.elements[g].rotation.inverse().apply(x));
            let f_rot = evaluate_basis(block, rotated)?;
            let gamma = &r.gamma_r[g];
            for j in 0..d {
                let predicted: f64 = (0..d).map(|i| gamma.get(i, j) * f_here[i]).sum();
                worst = worst.max((f_rot[j] - predicted).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{sphere_quadrature, wigner_d_matrix};
    use crate::rng::SplitMix64;

    fn icosa() -> SymmetrySystem {
        SymmetrySystem::load(GroupName::Icosahedral).unwrap()
    }

    fn octa() -> SymmetrySystem {
        SymmetrySystem::load(GroupName::Octahedral).unwrap()
    }

    fn tetra() -> SymmetrySystem {
        SymmetrySystem::load(GroupName::Tetrahedral).unwrap()
    }

    #[test]
    fn trivial_block_at_l0_is_one() {
        for sys in [tetra(), octa(), icosa()] {
            let set = assemble_basis(&sys, 0).unwrap();
            assert_eq!(set.counts[0], (1, 1));
            let h = set.real_blocks[0].real_matrix().unwrap();
            assert_eq!(h.rows(), 1);
            assert!((h.get(0, 0).abs() - 1.0).abs() < 1e-12);
            let v = evaluate_basis(&set.real_blocks[0], SphericalAngles::new(0.7, 1.1)).unwrap();
            assert!((v[0].abs() - 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn icosahedral_trivial_projection_vanishes_at_l1() {
        let sys = icosa();
        for m in -1..=1 {
            let raw = projection_rows(&sys, 1, 0, 1, m, Flavor::RealCheckY).unwrap();
            match raw {
                BlockMatrix::Real(r) => {
                    assert!(r.max_abs() < 1e-12);
                    assert!(normalize_block(&r, 0).is_none());
                }
                _ => unreachable!(),
            }
        }
    }

    /// The normalized p=1, l=6 row must match a direct group average of
    /// Y_{6,0} expanded over the harmonics (an independent construction of
    /// the classical degree-6 invariant).
    #[test]
    fn icosahedral_invariant_matches_group_average() {
        let sys = icosa();
        let raw = match projection_rows(&sys, 1, 0, 6, 0, Flavor::RealCheckY).unwrap() {
            BlockMatrix::Real(r) => r,
            _ => unreachable!(),
        };
        assert!(raw.max_abs() > 1e-3);
        let block = normalize_block(&raw, 0).unwrap();

        // Oracle: average the Wigner matrices over the group and take the
        // m = 0 row, i.e. the expansion of (1/60) sum_g P(g) Y_{6,0}.
        let n = 13;
        let mut avg = CMat::zeros(n, n);
        for e in &sys.group.elements {
            avg = avg.add(&wigner_d_matrix(6, &e.rotation).unwrap().d);
        }
        avg = avg.scale(Complex64::new(1.0 / 60.0, 0.0));
        let uh = ul_matrix(6).u.hermitian();
        // Convert the oracle row to the real-harmonic basis: row . U (the
        // expansion over checkY of a real invariant function).
        let mut oracle = vec![0.0; n];
        let u = uh.hermitian();
        for c in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += avg.get(6, j) * u.get(j, c);
            }
            // The invariant is real, so the checkY coefficients must be real.
            assert!(acc.im.abs() < 1e-10);
            oracle[c] = acc.re;
        }
        let norm: f64 = oracle.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm > 1e-8);
        let cos: f64 = oracle
            .iter()
            .zip(block.row(0))
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / norm;
        assert!(
            (cos.abs() - 1.0).abs() < 1e-9,
            "projected invariant and group average disagree (cos {cos})"
        );
    }

    #[test]
    fn octahedral_vector_irrep_single_block_at_l1() {
        let sys = octa();
        let set = assemble_basis(&sys, 1).unwrap();
        // Only T1 (p=4) appears at l=1: counts (p, N): (1,0) (2,0) (3,0) (4,1) (5,0).
        let expect = vec![(1, 0), (2, 0), (3, 0), (4, 1), (5, 0)];
        assert_eq!(set.counts, expect);
        assert_eq!(set.total_functions(), 3);
    }

    #[test]
    fn octahedral_l2_splits_into_e_and_t2() {
        let sys = octa();
        let set = assemble_basis(&sys, 2).unwrap();
        let expect = vec![(1, 0), (2, 0), (3, 1), (4, 0), (5, 1)];
        assert_eq!(set.counts, expect);
        assert_eq!(set.total_functions(), 5);
        let stacked = set.stacked_real();
        assert!(stacked.orthogonality_defect() < 1e-10);
    }

    #[test]
    fn tetrahedral_deficit_at_l2() {
        let sys = tetra();
        let set = assemble_basis(&sys, 2).unwrap();
        // m_E(2) = 1, so 3 of the 5 functions survive.
        assert_eq!(set.total_functions(), 3);
    }

    #[test]
    fn gram_schmidt_counts_match_oracle_spot_checks() {
        let sys = icosa();
        let set = assemble_basis(&sys, 30).unwrap();
        let trivial_count = set.counts.iter().find(|(p, _)| *p == 1).unwrap().1;
        assert_eq!(trivial_count, 2);

        let t = tetra();
        let set4 = assemble_basis(&t, 4).unwrap();
        let p4 = set4.counts.iter().find(|(p, _)| *p == 4).unwrap().1;
        assert_eq!(p4, 2);
    }

    #[test]
    fn flavors_are_consistent() {
        let sys = icosa();
        for l in [1usize, 6] {
            let set = assemble_basis(&sys, l).unwrap();
            let uh = ul_matrix(l).u.hermitian();
            for (r, c) in set.real_blocks.iter().zip(&set.complex_blocks) {
                let hat = r.real_matrix().unwrap().to_complex().mul(&uh);
                assert!(hat.max_abs_diff(&c.complex_matrix()) < 1e-10);
                // Values agree pointwise.
                let mut rng = SplitMix64::new(17);
                for _ in 0..10 {
                    let (theta, phi) = rng.next_direction();
                    let a = SphericalAngles::new(theta, phi);
                    let vr = evaluate_basis(r, a).unwrap();
                    let vc = evaluate_basis(c, a).unwrap();
                    for (x, y) in vr.iter().zip(&vc) {
                        assert!((x - y).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn quadrature_orthonormality_of_basis_functions() {
        let sys = octa();
        let lmax = 4;
        let grid = sphere_quadrature(lmax);
        // All functions of degrees 0..=lmax, one big Gram matrix.
        let mut funcs: Vec<(usize, CoefficientBlock)> = Vec::new();
        for l in 0..=lmax {
            let set = assemble_basis(&sys, l).unwrap();
            for b in set.real_blocks {
                funcs.push((l, b));
            }
        }
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for &(_, ref b) in &funcs {
            let d = b.dim();
            let mut vals = vec![Vec::with_capacity(grid.len()); d];
            for &(a, _) in &grid {
                let v = evaluate_basis(b, a).unwrap();
                for j in 0..d {
                    vals[j].push(v[j]);
                }
            }
            rows.extend(vals);
        }
        let weights: Vec<f64> = grid.iter().map(|&(_, w)| w).collect();
        for i in 0..rows.len() {
            for j in i..rows.len() {
                let acc: f64 = rows[i]
                    .iter()
                    .zip(&rows[j])
                    .zip(&weights)
                    .map(|((a, b), w)| w * a * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((acc - expect).abs() < 1e-8, "gram({i},{j}) = {acc}");
            }
        }
    }

    #[test]
    fn transformation_law_small_sample() {
        let sys = icosa();
        let mut rng = SplitMix64::new(23);
        let sample: Vec<SphericalAngles> = (0..10)
            .map(|_| {
                let (t, p) = rng.next_direction();
                SphericalAngles::new(t, p)
            })
            .collect();
        for l in [1usize, 6] {
            let set = assemble_basis(&sys, l).unwrap();
            for b in &set.real_blocks {
                let err = verify_transformation(&sys, b, &sample).unwrap();
                assert!(err < 1e-9, "p={} l={} err={err:.3e}", b.p, b.l);
            }
        }
    }

    /// The identity element transforms exactly: Gamma_r(0) is the identity
    /// matrix, so the law holds to rounding.
    #[test]
    fn transformation_identity_is_exact() {
        let sys = octa();
        let set = assemble_basis(&sys, 2).unwrap();
        let b = &set.real_blocks[0];
        let r = sys.realifications[b.p - 1].as_ref().unwrap();
        assert!(r.gamma_r[0].max_abs_diff(&RMat::identity(b.dim())) < 1e-12);
        let a = SphericalAngles::new(0.9, 2.3);
        let f = evaluate_basis(b, a).unwrap();
        let rotated =
            SphericalAngles::from_vector(sys.group.elements[0].rotation.inverse().apply(a.to_unit_vector()));
        let f_rot = evaluate_basis(b, rotated).unwrap();
        for (j, v) in f_rot.iter().enumerate() {
            let predicted: f64 = (0..b.dim()).map(|i| r.gamma_r[0].get(i, j) * f[i]).sum();
            assert!((v - predicted).abs() < 1e-12);
        }
    }

    /// The projector onto the span of all blocks of a fixed (p, l) is unique
    /// even though the blocks are not; it must match the character-weighted
    /// group average of the rotation matrices on the real harmonics.
    #[test]
    fn span_projector_matches_group_average_oracle() {
        let sys = icosa();
        for l in 0..=6usize {
            let set = assemble_basis(&sys, l).unwrap();
            let n = 2 * l + 1;
            for (idx, irrep) in sys.irreps.iter().enumerate() {
                let p = irrep.p;
                let d = irrep.dim;
                // Oracle: P_p = (d_p/N) sum_g chi_p(g) checkD_l(R_g)ᵀ; the
                // transpose makes the family homomorphic in g, and the
                // character of these groups is real.
                let mut oracle = RMat::zeros(n, n);
                for g in 0..sys.group.order() {
                    let chi = irrep.matrix(g).trace();
                    assert!(chi.im.abs() < 1e-10);
                    let cd = check_d(l, &sys.group.elements[g].rotation).unwrap().transpose();
                    oracle = oracle.add(&cd.scale(chi.re));
                }
                oracle = oracle.scale(d as f64 / sys.group.order() as f64);
                let mut span = RMat::zeros(n, n);
                for b in set.real_blocks.iter().filter(|b| b.p == p) {
                    let h = b.real_matrix().unwrap();
                    span = span.add(&h.transpose().mul(h));
                }
                let _ = idx;
                assert!(
                    span.max_abs_diff(&oracle) < 1e-9,
                    "span projector mismatch for p={p} l={l}"
                );
            }
        }
    }
}
