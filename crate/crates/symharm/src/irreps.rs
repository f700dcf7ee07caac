//! Complex unitary irreducible representations, shipped as data.
//!
//! Each group's irrep matrices are stored in a bundled file as images of the
//! group generators plus per-element generator words; [`load_irreps`] expands
//! the words into the full matrix family in the group's canonical ordering
//! and validates unitarity and the homomorphism property against the
//! multiplication table. Realness classification (Frobenius-Schur) uses the
//! standard convention: indicator +1 is potentially real, 0 essentially
//! complex, -1 pseudo real (quaternionic).

use std::fmt;

use num_complex::Complex64;

use crate::group::{FiniteRotationGroup, GroupName};
use crate::mat::CMat;

/// Frobenius-Schur realness class of an irrep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Realness {
    PotentiallyReal,
    PseudoReal,
    EssentiallyComplex,
    Unclassified,
}

impl fmt::Display for Realness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Realness::PotentiallyReal => "potentially real",
            Realness::PseudoReal => "pseudo real",
            Realness::EssentiallyComplex => "essentially complex",
            Realness::Unclassified => "unclassified",
        };
        write!(f, "{s}")
    }
}

/// A complex unitary irrep of one of the rotation groups.
#[derive(Clone, Debug)]
pub struct Irrep {
    pub group: GroupName,
    /// 1-based irrep index in the bundled ordering.
    pub p: usize,
    pub label: String,
    pub dim: usize,
    /// One matrix per group element, in canonical element order.
    pub matrices: Vec<CMat>,
    pub realness: Realness,
}

impl Irrep {
    #[inline]
    pub fn matrix(&self, g: usize) -> &CMat {
        &self.matrices[g]
    }

    /// Character vector: entry g is trace Gamma(g).
    pub fn character(&self) -> Vec<Complex64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }
}

/// Errors from classification and intertwiner searches.
#[derive(Clone, Debug, PartialEq)]
pub enum IrrepError {
    /// Frobenius-Schur sum did not land on an integer in {-1, 0, 1}.
    NonIntegerIndicator { value_re: f64, value_im: f64 },
    /// Families have equal characters but every probe averaged to zero.
    ProbeFailed,
    /// No generator assignment extends to a full multiplication-table match.
    NoIsomorphism,
    /// Input families disagree in size or dimension.
    ShapeMismatch,
}

impl fmt::Display for IrrepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepError::NonIntegerIndicator { value_re, value_im } => write!(
                f,
                "Frobenius-Schur sum {value_re:.3e}{value_im:+.3e}i is not an integer in {{-1,0,1}}"
            ),
            IrrepError::ProbeFailed => {
                write!(f, "equal characters but all intertwiner probes averaged to zero")
            }
            IrrepError::NoIsomorphism => {
                write!(f, "no generator assignment matches the multiplication table")
            }
            IrrepError::ShapeMismatch => write!(f, "families differ in size or dimension"),
        }
    }
}

impl std::error::Error for IrrepError {}

/// Loads, expands and validates the bundled irreps of `group`.
pub fn load_irreps(group: &FiniteRotationGroup) -> Result<Vec<Irrep>, crate::io::DataError> {
    crate::io::load_irrep_data(group)
}

/// Frobenius-Schur indicator: the group average of the character at squared
/// elements, `(1/N_g) sum_g trace Gamma(g^2)`.
pub fn frobenius_schur(
    irrep: &Irrep,
    group: &FiniteRotationGroup,
) -> Result<(i64, Realness), IrrepError> {
    let n = group.order();
    assert_eq!(irrep.matrices.len(), n, "irrep not indexed by this group");
    let mut acc = Complex64::new(0.0, 0.0);
    for g in 0..n {
        acc += irrep.matrix(group.mul(g, g)).trace();
    }
    acc /= n as f64;
    for candidate in [-1i64, 0, 1] {
        if (acc - Complex64::new(candidate as f64, 0.0)).norm() < 1e-8 {
            let class = match candidate {
                1 => Realness::PotentiallyReal,
                0 => Realness::EssentiallyComplex,
                _ => Realness::PseudoReal,
            };
            return Ok((candidate, class));
        }
    }
    Err(IrrepError::NonIntegerIndicator { value_re: acc.re, value_im: acc.im })
}

/// Classifies `irrep` in place and returns the indicator.
pub fn classify(irrep: &mut Irrep, group: &FiniteRotationGroup) -> Result<i64, IrrepError> {
    let (indicator, class) = frobenius_schur(irrep, group)?;
    irrep.realness = class;
    Ok(indicator)
}

/// Character of the (2l+1)-dimensional rotation representation at rotation
/// angle `theta`: sin((l+1/2) theta) / sin(theta/2).
pub fn rotation_character(l: usize, theta: f64) -> f64 {
    if theta.abs() < 1e-9 {
        (2 * l + 1) as f64
    } else {
        ((l as f64 + 0.5) * theta).sin() / (theta / 2.0).sin()
    }
}

/// Multiplicity of `irrep` in the degree-`l` spherical-harmonic space,
/// computed by the character inner product with the rotation character.
pub fn multiplicity_on_sphere(irrep: &Irrep, group: &FiniteRotationGroup, l: usize) -> usize {
    let n = group.order();
    let mut acc = Complex64::new(0.0, 0.0);
    for g in 0..n {
        let (_, theta) = group.elements[g].axis_angle;
        acc += irrep.matrix(g).trace().conj() * rotation_character(l, theta);
    }
    acc /= n as f64;
    let rounded = acc.re.round();
    assert!(
        (acc.re - rounded).abs() < 1e-6 && acc.im.abs() < 1e-6 && rounded >= 0.0,
        "multiplicity sum {acc} is not a non-negative integer"
    );
    rounded as usize
}

/// Result of [`find_intertwiner`].
#[derive(Clone, Debug)]
pub enum IntertwinerOutcome {
    /// Unitary S with Gamma2(g) = Sᴴ Gamma1(g) S for all g.
    Equivalent(CMat),
    Inequivalent,
}

/// Permutation plus similarity relating two orderings of equivalent irreps.
#[derive(Clone, Debug)]
pub struct IntertwinerResult {
    pub permutation: Vec<usize>,
    pub similarity: CMat,
}

fn probe_average(family1: &[CMat], family2: &[CMat], probe: &CMat) -> CMat {
    let n = family1.len() as f64;
    let d = probe.rows();
    let mut acc = CMat::zeros(d, d);
    for (g1, g2) in family1.iter().zip(family2) {
        // Unitary family: Gamma2(g)^{-1} = Gamma2(g)ᴴ.
        acc = acc.add(&g1.mul(probe).mul(&g2.hermitian()));
    }
    acc.scale(Complex64::new(1.0 / n, 0.0))
}

/// Searches for a unitary similarity between two same-length families of
/// unitary matrices sharing one element ordering: Gamma2(g) = Sᴴ Gamma1(g) S.
///
/// The group average `(1/N) sum_g Gamma1(g) A Gamma2(g)^{-1}` is taken first
/// with the exchange-permutation probe, then with each elementary matrix
/// E_ij. A nonzero average is rescaled to unitarity; if every probe averages
/// to zero the families are inequivalent unless their characters agree, which
/// signals a failure of the probe set.
pub fn find_intertwiner(
    family1: &[CMat],
    family2: &[CMat],
) -> Result<IntertwinerOutcome, IrrepError> {
    if family1.len() != family2.len() || family1.is_empty() {
        return Err(IrrepError::ShapeMismatch);
    }
    let d = family1[0].rows();
    if family2[0].rows() != d {
        return Err(IrrepError::ShapeMismatch);
    }
    let mut probes = vec![CMat::exchange(d)];
    for i in 0..d {
        for j in 0..d {
            let mut e = CMat::zeros(d, d);
            e.set(i, j, Complex64::new(1.0, 0.0));
            probes.push(e);
        }
    }
    for probe in &probes {
        let m = probe_average(family1, family2, probe);
        if m.max_abs() <= 1e-8 {
            continue;
        }
        // Mᴴ M is a positive multiple of the identity by Schur's lemma.
        let c = m.hermitian().mul(&m).trace().re / d as f64;
        let s = m.scale(Complex64::new(1.0 / c.sqrt(), 0.0));
        let defect = family1
            .iter()
            .zip(family2)
            .map(|(g1, g2)| s.hermitian().mul(g1).mul(&s).max_abs_diff(g2))
            .fold(0.0f64, f64::max);
        if defect < 1e-8 {
            return Ok(IntertwinerOutcome::Equivalent(s));
        }
    }
    // All probes averaged to zero (or failed validation): inequivalent by
    // Schur unless the characters say otherwise.
    let chars_equal = family1
        .iter()
        .zip(family2)
        .all(|(g1, g2)| (g1.trace() - g2.trace()).norm() < 1e-6);
    if chars_equal {
        Err(IrrepError::ProbeFailed)
    } else {
        Ok(IntertwinerOutcome::Inequivalent)
    }
}

/// Internal view of a matrix family as an abstract group: its own
/// multiplication table recovered by matrix matching.
struct FamilyTable {
    identity: usize,
    table: Vec<Vec<usize>>,
}

fn family_table(family: &[CMat]) -> Result<FamilyTable, IrrepError> {
    let n = family.len();
    let d = family[0].rows();
    let identity = (0..n)
        .find(|&i| family[i].max_abs_diff(&CMat::identity(d)) < 1e-8)
        .ok_or(IrrepError::NoIsomorphism)?;
    let mut table = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = family[i].mul(&family[j]);
            let mut hit = None;
            for (k, m) in family.iter().enumerate() {
                if m.max_abs_diff(&prod) < 1e-8 {
                    if hit.is_some() {
                        return Err(IrrepError::NoIsomorphism);
                    }
                    hit = Some(k);
                }
            }
            table[i][j] = hit.ok_or(IrrepError::NoIsomorphism)?;
        }
    }
    Ok(FamilyTable { identity, table })
}

fn family_element_order(t: &FamilyTable, g: usize) -> usize {
    let mut acc = g;
    let mut k = 1;
    while acc != t.identity {
        acc = t.table[acc][g];
        k += 1;
        assert!(k <= t.table.len(), "order search ran away");
    }
    k
}

/// Finds a relabeling `gamma` of `family` such that `g -> family[gamma(g)]`
/// follows the multiplication table of `target`'s group and is equivalent to
/// `target` as a representation.
///
/// The search anchors the images of the group generators (candidates are
/// filtered by element order and character value, tried in ascending index
/// order) and extends each assignment through the generator words; the first
/// assignment that yields a bijection with a matching table and an existing
/// intertwiner wins, which makes the result deterministic.
pub fn match_ordering(
    family: &[CMat],
    target: &Irrep,
    group: &FiniteRotationGroup,
) -> Result<Vec<usize>, IrrepError> {
    let n = group.order();
    if family.len() != n || family[0].rows() != target.dim {
        return Err(IrrepError::ShapeMismatch);
    }
    let ft = family_table(family)?;
    // Generator elements of the abstract group: the length-1 words.
    let mut gens: Vec<(usize, usize)> = Vec::new(); // (generator id, element index)
    for e in &group.elements {
        if e.word.len() == 1 {
            gens.push((e.word[0], e.index));
        }
    }
    gens.sort_unstable();
    let candidate_lists: Vec<Vec<usize>> = gens
        .iter()
        .map(|&(_, ge)| {
            let ord = group.element_order(ge);
            let tr = target.matrix(ge).trace();
            (0..n)
                .filter(|&h| {
                    family_element_order(&ft, h) == ord && (family[h].trace() - tr).norm() < 1e-6
                })
                .collect()
        })
        .collect();

    let mut pick = vec![0usize; gens.len()];
    'assignments: loop {
        let images: Vec<usize> = pick
            .iter()
            .zip(&candidate_lists)
            .map(|(&i, list)| list[i])
            .collect();
        if let Some(gamma) = extend_assignment(&ft, group, &gens, &images) {
            let reordered: Vec<CMat> = (0..n).map(|g| family[gamma[g]].clone()).collect();
            if let Ok(IntertwinerOutcome::Equivalent(_)) =
                find_intertwiner(&reordered, &target.matrices)
            {
                return Ok(gamma);
            }
        }
        // Advance the mixed-radix counter over candidate lists.
        for slot in (0..pick.len()).rev() {
            pick[slot] += 1;
            if pick[slot] < candidate_lists[slot].len() {
                continue 'assignments;
            }
            pick[slot] = 0;
            if slot == 0 {
                break 'assignments;
            }
        }
        if pick.iter().all(|&i| i == 0) {
            break;
        }
    }
    Err(IrrepError::NoIsomorphism)
}

fn extend_assignment(
    ft: &FamilyTable,
    group: &FiniteRotationGroup,
    gens: &[(usize, usize)],
    images: &[usize],
) -> Option<Vec<usize>> {
    let n = group.order();
    let image_of_gen_id = |id: usize| -> Option<usize> {
        gens.iter().position(|&(gid, _)| gid == id).map(|slot| images[slot])
    };
    let mut gamma = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for e in &group.elements {
        let mut acc = ft.identity;
        for &gid in &e.word {
            acc = ft.table[acc][image_of_gen_id(gid)?];
        }
        if used[acc] {
            return None;
        }
        used[acc] = true;
        gamma[e.index] = acc;
    }
    // Words guarantee the homomorphism property on generators; confirm the
    // full tables agree.
    for g in 0..n {
        for h in 0..n {
            if ft.table[gamma[g]][gamma[h]] != gamma[group.mul(g, h)] {
                return None;
            }
        }
    }
    Some(gamma)
}

/// Convenience wrapper: relabel and then compute the similarity, packaging
/// both as one result.
pub fn reconcile_orderings(
    family: &[CMat],
    target: &Irrep,
    group: &FiniteRotationGroup,
) -> Result<IntertwinerResult, IrrepError> {
    let permutation = match_ordering(family, target, group)?;
    let reordered: Vec<CMat> = (0..group.order()).map(|g| family[permutation[g]].clone()).collect();
    match find_intertwiner(&reordered, &target.matrices)? {
        IntertwinerOutcome::Equivalent(similarity) => {
            Ok(IntertwinerResult { permutation, similarity })
        }
        IntertwinerOutcome::Inequivalent => Err(IrrepError::NoIsomorphism),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn system(name: GroupName) -> (FiniteRotationGroup, Vec<Irrep>) {
        let group = FiniteRotationGroup::build(name).expect("group data");
        let irreps = load_irreps(&group).expect("irrep data");
        (group, irreps)
    }

    #[test]
    fn dimensions_match_the_group_orders() {
        let expect: [(GroupName, Vec<usize>); 3] = [
            (GroupName::Tetrahedral, vec![1, 1, 1, 3]),
            (GroupName::Octahedral, vec![1, 1, 2, 3, 3]),
            (GroupName::Icosahedral, vec![1, 3, 3, 4, 5]),
        ];
        for (name, dims) in expect {
            let (group, irreps) = system(name);
            let got: Vec<usize> = irreps.iter().map(|i| i.dim).collect();
            assert_eq!(got, dims);
            // sum of squared dimensions equals the group order
            let sum: usize = got.iter().map(|d| d * d).sum();
            assert_eq!(sum, group.order());
        }
    }

    #[test]
    fn characters_are_class_functions_and_orthonormal() {
        for name in GroupName::all() {
            let (group, irreps) = system(name);
            let n = group.order();
            let chars: Vec<Vec<Complex64>> = irreps.iter().map(|i| i.character()).collect();
            for (p, chi) in chars.iter().enumerate() {
                assert!((chi[0] - Complex64::new(irreps[p].dim as f64, 0.0)).norm() < 1e-12);
                for class in &group.classes {
                    for &g in class {
                        assert!((chi[g] - chi[class[0]]).norm() < 1e-10);
                    }
                }
            }
            for (a, chi_a) in chars.iter().enumerate() {
                for (b, chi_b) in chars.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for g in 0..n {
                        acc += chi_a[g] * chi_b[g].conj();
                    }
                    acc /= n as f64;
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (acc - Complex64::new(expect, 0.0)).norm() < 1e-10,
                        "character orthogonality failed for {name} p={a},{b}"
                    );
                }
            }
        }
    }

    #[test]
    fn frobenius_schur_values() {
        let expect: [(GroupName, Vec<i64>); 3] = [
            (GroupName::Tetrahedral, vec![1, 0, 0, 1]),
            (GroupName::Octahedral, vec![1, 1, 1, 1, 1]),
            (GroupName::Icosahedral, vec![1, 1, 1, 1, 1]),
        ];
        for (name, indicators) in expect {
            let (group, irreps) = system(name);
            for (irrep, &want) in irreps.iter().zip(&indicators) {
                let (got, class) = frobenius_schur(irrep, &group).unwrap();
                assert_eq!(got, want, "{name} p={}", irrep.p);
                if want == 0 {
                    assert_eq!(class, Realness::EssentiallyComplex);
                } else {
                    assert_eq!(class, Realness::PotentiallyReal);
                }
            }
        }
    }

    #[test]
    fn trivial_irrep_character_is_all_ones() {
        let (_, irreps) = system(GroupName::Icosahedral);
        for v in irreps[0].character() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn icosahedral_three_dim_character_at_five_folds() {
        let (group, irreps) = system(GroupName::Icosahedral);
        let chi = irreps[1].character();
        let c1 = 1.0 + 2.0 * (2.0 * std::f64::consts::PI / 5.0).cos();
        let c2 = 1.0 + 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        let mut seen = 0;
        for g in 0..group.order() {
            if group.element_order(g) == 5 {
                seen += 1;
                let v = chi[g].re;
                assert!(chi[g].im.abs() < 1e-10);
                assert!((v - c1).abs() < 1e-10 || (v - c2).abs() < 1e-10);
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn multiplicities_sum_to_harmonic_dimension() {
        for name in GroupName::all() {
            let (group, irreps) = system(name);
            for l in 0..=45 {
                let total: usize = irreps
                    .iter()
                    .map(|i| i.dim * multiplicity_on_sphere(i, &group, l))
                    .sum();
                assert_eq!(total, 2 * l + 1, "{name} l={l}");
            }
        }
    }

    #[test]
    fn icosahedral_invariant_degrees() {
        let (group, irreps) = system(GroupName::Icosahedral);
        let trivial = &irreps[0];
        assert_eq!(multiplicity_on_sphere(trivial, &group, 0), 1);
        for l in 1..=5 {
            assert_eq!(multiplicity_on_sphere(trivial, &group, l), 0, "l={l}");
        }
        assert_eq!(multiplicity_on_sphere(trivial, &group, 6), 1);
        assert_eq!(multiplicity_on_sphere(trivial, &group, 30), 2);
    }

    #[test]
    fn octahedral_multiplicities_at_l2() {
        let (group, irreps) = system(GroupName::Octahedral);
        let want = [0usize, 0, 1, 0, 1];
        for (irrep, &w) in irreps.iter().zip(&want) {
            assert_eq!(multiplicity_on_sphere(irrep, &group, 2), w, "p={}", irrep.p);
        }
    }

    #[test]
    fn intertwiner_trivial_and_inequivalent() {
        let (group, irreps) = system(GroupName::Icosahedral);
        match find_intertwiner(&irreps[0].matrices, &irreps[0].matrices).unwrap() {
            IntertwinerOutcome::Equivalent(s) => {
                assert!((s.get(0, 0).norm() - 1.0).abs() < 1e-10);
            }
            IntertwinerOutcome::Inequivalent => panic!("trivial irrep must match itself"),
        }
        // p = 2 and p = 3 share dimension but differ at the 5-fold classes.
        match find_intertwiner(&irreps[1].matrices, &irreps[2].matrices).unwrap() {
            IntertwinerOutcome::Inequivalent => {}
            IntertwinerOutcome::Equivalent(_) => panic!("p=2 and p=3 are inequivalent"),
        }
        let _ = group;
    }

    #[test]
    fn match_ordering_identity_on_self() {
        let (group, irreps) = system(GroupName::Tetrahedral);
        let target = &irreps[3];
        let gamma = match_ordering(&target.matrices, target, &group).unwrap();
        let id: Vec<usize> = (0..group.order()).collect();
        assert_eq!(gamma, id);
    }

    #[test]
    fn match_ordering_rejects_a_broken_family() {
        let (group, irreps) = system(GroupName::Tetrahedral);
        let target = &irreps[3];
        // Corrupt one matrix: the family no longer closes under products.
        let mut family = target.matrices.clone();
        family[5] = family[5].scale(Complex64::new(0.0, 1.0));
        match match_ordering(&family, target, &group) {
            Err(IrrepError::NoIsomorphism) => {}
            other => panic!("expected NoIsomorphism, got {other:?}"),
        }
    }

    #[test]
    fn match_ordering_recovers_scramble() {
        let (group, irreps) = system(GroupName::Icosahedral);
        let n = group.order();
        let rotations: Vec<CMat> = group
            .elements
            .iter()
            .map(|e| e.rotation.to_rmat().to_complex())
            .collect();
        // Scramble with a seeded shuffle (identity can land anywhere).
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = SplitMix64::new(42);
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            perm.swap(i, j);
        }
        let scrambled: Vec<CMat> = perm.iter().map(|&i| rotations[i].clone()).collect();
        let target = &irreps[1];
        let gamma = match_ordering(&scrambled, target, &group).unwrap();
        // Postcondition: the reordered family follows the group table and is
        // equivalent to the target.
        let reordered: Vec<CMat> = (0..n).map(|g| scrambled[gamma[g]].clone()).collect();
        for g in 0..n {
            for h in 0..n {
                let prod = reordered[g].mul(&reordered[h]);
                assert!(prod.max_abs_diff(&reordered[group.mul(g, h)]) < 1e-8);
            }
        }
        match find_intertwiner(&reordered, &target.matrices).unwrap() {
            IntertwinerOutcome::Equivalent(s) => {
                for g in 0..n {
                    let lhs = s.hermitian().mul(&reordered[g]).mul(&s);
                    assert!(lhs.max_abs_diff(target.matrix(g)) < 1e-8);
                }
            }
            IntertwinerOutcome::Inequivalent => panic!("scrambled rotations must match p=2"),
        }
    }
}
