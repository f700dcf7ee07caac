//! Finite rotation groups of the Platonic solids.
//!
//! The three groups handled here are the rotational tetrahedral group T
//! (order 12), the rotational octahedral group O (order 24) and the
//! rotational icosahedral group I (order 60). Each group is expanded by
//! breadth-first search from a small set of generator matrices that ship as
//! data files; the expansion fixes a canonical element ordering (element 0 is
//! the identity, products are taken in generator order) that every other part
//! of the crate refers to.

use std::fmt;

use crate::mat::RMat;

/// Matching tolerance used when identifying a matrix product with a group
/// element. Generator data is exact to machine precision and BFS words are
/// short, so accumulated error stays far below this.
pub const MATCH_TOL: f64 = 1e-8;

/// The three rotational polyhedral groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupName {
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

impl GroupName {
    pub fn letter(&self) -> &'static str {
        match self {
            GroupName::Tetrahedral => "T",
            GroupName::Octahedral => "O",
            GroupName::Icosahedral => "I",
        }
    }

    pub fn order(&self) -> usize {
        match self {
            GroupName::Tetrahedral => 12,
            GroupName::Octahedral => 24,
            GroupName::Icosahedral => 60,
        }
    }

    pub fn parse(s: &str) -> Option<GroupName> {
        match s {
            "T" | "t" | "tetrahedral" => Some(GroupName::Tetrahedral),
            "O" | "o" | "octahedral" => Some(GroupName::Octahedral),
            "I" | "i" | "icosahedral" => Some(GroupName::Icosahedral),
            _ => None,
        }
    }

    pub fn all() -> [GroupName; 3] {
        [GroupName::Tetrahedral, GroupName::Octahedral, GroupName::Icosahedral]
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Errors raised while constructing a group from generator data.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupError {
    /// A generator matrix is not a proper rotation.
    InvalidRotation { defect: f64 },
    /// BFS produced more elements than the declared group order.
    ClosureOverflow { expected: usize },
    /// BFS closed with fewer elements than the declared group order.
    NotClosed { expected: usize, found: usize },
    /// A product matched two distinct elements within tolerance.
    AmbiguousMatch { left: usize, right: usize },
    /// A product matched no element (inconsistent generator data).
    ProductUnmatched { left: usize, right: usize },
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::InvalidRotation { defect } => {
                write!(f, "generator is not a proper rotation (defect {defect:.3e})")
            }
            GroupError::ClosureOverflow { expected } => {
                write!(f, "generator expansion exceeded the declared order {expected}")
            }
            GroupError::NotClosed { expected, found } => {
                write!(f, "generator expansion closed at {found} elements, expected {expected}")
            }
            GroupError::AmbiguousMatch { left, right } => {
                write!(f, "product of elements {left} and {right} matches two elements")
            }
            GroupError::ProductUnmatched { left, right } => {
                write!(f, "product of elements {left} and {right} matches no element")
            }
        }
    }
}

impl std::error::Error for GroupError {}

/// A proper rotation of 3-space.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix {
    entries: [[f64; 3]; 3],
}

impl RotationMatrix {
    pub fn identity() -> Self {
        RotationMatrix { entries: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    /// Builds a rotation from raw entries, checking R·Rᵀ = I and det R = +1
    /// to 1e-12.
    pub fn new(entries: [[f64; 3]; 3]) -> Result<Self, GroupError> {
        let r = RotationMatrix { entries };
        let defect = r.orthogonality_defect().max((r.det() - 1.0).abs());
        if defect > 1e-12 {
            return Err(GroupError::InvalidRotation { defect });
        }
        Ok(r)
    }

    /// Rotation by `angle` about the z axis.
    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        RotationMatrix { entries: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]] }
    }

    /// Rotation by `angle` about the y axis.
    pub fn about_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        RotationMatrix { entries: [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]] }
    }

    /// Rotation by `angle` about an arbitrary unit axis (Rodrigues formula).
    pub fn about_axis(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (ux, uy, uz) = (axis[0] / n, axis[1] / n, axis[2] / n);
        let (s, c) = angle.sin_cos();
        let k = 1.0 - c;
        RotationMatrix {
            entries: [
                [c + ux * ux * k, ux * uy * k - uz * s, ux * uz * k + uy * s],
                [uy * ux * k + uz * s, c + uy * uy * k, uy * uz * k - ux * s],
                [uz * ux * k - uy * s, uz * uy * k + ux * s, c + uz * uz * k],
            ],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.entries
    }

    pub fn mul(&self, other: &RotationMatrix) -> RotationMatrix {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| self.entries[i][k] * other.entries[k][j]).sum();
            }
        }
        RotationMatrix { entries: out }
    }

    pub fn transpose(&self) -> RotationMatrix {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.entries[j][i];
            }
        }
        RotationMatrix { entries: out }
    }

    /// Inverse rotation (equals the transpose).
    pub fn inverse(&self) -> RotationMatrix {
        self.transpose()
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    pub fn det(&self) -> f64 {
        let e = &self.entries;
        e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
            - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
            + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let e = &self.entries;
        [
            e[0][0] * v[0] + e[0][1] * v[1] + e[0][2] * v[2],
            e[1][0] * v[0] + e[1][1] * v[1] + e[1][2] * v[2],
            e[2][0] * v[0] + e[2][1] * v[1] + e[2][2] * v[2],
        ]
    }

    pub fn max_abs_diff(&self, other: &RotationMatrix) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        d
    }

    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.mul(&self.transpose());
        p.max_abs_diff(&RotationMatrix::identity())
    }

    pub fn to_rmat(&self) -> RMat {
        RMat::from_rows(&[
            self.entries[0].to_vec(),
            self.entries[1].to_vec(),
            self.entries[2].to_vec(),
        ])
    }
}

/// One group element in the canonical ordering, with its rotation-angle
/// decompositions precomputed.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub index: usize,
    pub rotation: RotationMatrix,
    /// Generator word: the element equals the left-to-right product of the
    /// generators named by these indices (empty word = identity).
    pub word: Vec<usize>,
    /// z-y-z Euler angles (alpha, beta, gamma).
    pub euler_zyz: (f64, f64, f64),
    /// Unit rotation axis and angle in [0, pi].
    pub axis_angle: ([f64; 3], f64),
}

/// z-y-z Euler angles of a rotation, with beta in [0, pi] and alpha, gamma in
/// [0, 2pi). At gimbal lock (|sin beta| < 1e-12) the convention gamma = 0 is
/// imposed and alpha absorbs the whole azimuthal rotation.
pub fn euler_zyz(r: &RotationMatrix) -> (f64, f64, f64) {
    let two_pi = 2.0 * std::f64::consts::PI;
    let wrap = |a: f64| {
        let mut a = a % two_pi;
        if a < 0.0 {
            a += two_pi;
        }
        if a >= two_pi {
            a = 0.0;
        }
        a
    };
    // sin(beta) from the third column keeps full precision near beta = 0
    // and beta = pi, where acos of the (2,2) entry would lose half the
    // significant digits.
    let sb = f64::hypot(r.get(0, 2), r.get(1, 2));
    let beta = f64::atan2(sb, r.get(2, 2));
    if sb < 1e-12 {
        // Pure azimuthal rotation (beta 0 or pi): gamma = 0 by convention.
        if r.get(2, 2) > 0.0 {
            let alpha = wrap(f64::atan2(r.get(1, 0), r.get(0, 0)));
            (alpha, 0.0, 0.0)
        } else {
            // R = Rz(alpha) Ry(pi), so R = [[-ca, -sa, 0], [-sa, ca, 0], [0, 0, -1]].
            let alpha = wrap(f64::atan2(-r.get(1, 0), -r.get(0, 0)));
            (alpha, std::f64::consts::PI, 0.0)
        }
    } else {
        let alpha = wrap(f64::atan2(r.get(1, 2), r.get(0, 2)));
        let gamma = wrap(f64::atan2(r.get(2, 1), -r.get(2, 0)));
        (alpha, beta, gamma)
    }
}

/// Rebuilds the rotation Rz(alpha)·Ry(beta)·Rz(gamma).
pub fn from_euler_zyz(alpha: f64, beta: f64, gamma: f64) -> RotationMatrix {
    RotationMatrix::about_z(alpha)
        .mul(&RotationMatrix::about_y(beta))
        .mul(&RotationMatrix::about_z(gamma))
}

/// Axis-angle decomposition with angle in [0, pi]. The identity returns axis
/// (0, 0, 1) by convention; for a half turn the axis sign is fixed by making
/// the first component of largest magnitude positive.
pub fn axis_angle(r: &RotationMatrix) -> ([f64; 3], f64) {
    // sin(theta) from the antisymmetric part, cos(theta) from the trace;
    // atan2 keeps the angle accurate near 0 and pi where acos alone would
    // not.
    let sv = [
        (r.get(2, 1) - r.get(1, 2)) / 2.0,
        (r.get(0, 2) - r.get(2, 0)) / 2.0,
        (r.get(1, 0) - r.get(0, 1)) / 2.0,
    ];
    let sin_theta = (sv[0] * sv[0] + sv[1] * sv[1] + sv[2] * sv[2]).sqrt();
    let cos_theta = (r.trace() - 1.0) / 2.0;
    let theta = f64::atan2(sin_theta, cos_theta);
    if theta < 1e-9 {
        return ([0.0, 0.0, 1.0], 0.0);
    }
    if std::f64::consts::PI - theta < 1e-6 {
        // R = 2nnᵀ - I at a half turn; read the axis off the largest diagonal.
        let d = [
            ((r.get(0, 0) + 1.0) / 2.0).max(0.0).sqrt(),
            ((r.get(1, 1) + 1.0) / 2.0).max(0.0).sqrt(),
            ((r.get(2, 2) + 1.0) / 2.0).max(0.0).sqrt(),
        ];
        let k = if d[0] >= d[1] && d[0] >= d[2] {
            0
        } else if d[1] >= d[2] {
            1
        } else {
            2
        };
        let mut axis = [0.0; 3];
        axis[k] = d[k];
        for i in 0..3 {
            if i != k {
                axis[i] = (r.get(i, k) + r.get(k, i)) / (4.0 * d[k]);
            }
        }
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        for a in &mut axis {
            *a /= n;
        }
        // Deterministic sign.
        let lead = axis.iter().find(|a| a.abs() > 1e-9).copied().unwrap_or(1.0);
        if lead < 0.0 {
            for a in &mut axis {
                *a = -*a;
            }
        }
        return (axis, theta);
    }
    let axis = [sv[0] / sin_theta, sv[1] / sin_theta, sv[2] / sin_theta];
    (axis, theta)
}

/// Expands a generator set by breadth-first search into the full element
/// list. Element 0 is the identity; products are explored in generator
/// order, so the resulting ordering is canonical for a given generator list.
pub fn expand_generators(
    generators: &[RotationMatrix],
    expected_order: usize,
) -> Result<Vec<GroupElement>, GroupError> {
    for g in generators {
        let defect = g.orthogonality_defect().max((g.det() - 1.0).abs());
        if defect > 1e-12 {
            return Err(GroupError::InvalidRotation { defect });
        }
    }
    let mut mats: Vec<RotationMatrix> = vec![RotationMatrix::identity()];
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut cursor = 0;
    while cursor < mats.len() {
        for (j, gen) in generators.iter().enumerate() {
            let candidate = mats[cursor].mul(gen);
            let known = mats.iter().any(|m| m.max_abs_diff(&candidate) < MATCH_TOL);
            if !known {
                if mats.len() == expected_order {
                    return Err(GroupError::ClosureOverflow { expected: expected_order });
                }
                let mut w = words[cursor].clone();
                w.push(j);
                mats.push(candidate);
                words.push(w);
            }
        }
        cursor += 1;
    }
    if mats.len() != expected_order {
        return Err(GroupError::NotClosed { expected: expected_order, found: mats.len() });
    }
    Ok(mats
        .into_iter()
        .zip(words)
        .enumerate()
        .map(|(index, (rotation, word))| {
            let euler = euler_zyz(&rotation);
            let aa = axis_angle(&rotation);
            GroupElement { index, rotation, word, euler_zyz: euler, axis_angle: aa }
        })
        .collect())
}

/// A fully expanded rotation group: elements, multiplication table, inverse
/// map and conjugacy classes. Immutable after construction.
#[derive(Clone, Debug)]
pub struct FiniteRotationGroup {
    pub name: GroupName,
    pub elements: Vec<GroupElement>,
    pub mult_table: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    /// Partition of element indices into conjugacy classes, each class sorted,
    /// classes ordered by their smallest member.
    pub classes: Vec<Vec<usize>>,
}

impl FiniteRotationGroup {
    /// Builds the named group from its bundled generator file (see
    /// [`crate::io`] for the data format and the override environment
    /// variable).
    pub fn build(name: GroupName) -> Result<Self, crate::io::DataError> {
        let spec = crate::io::load_group_data(name)?;
        let group = FiniteRotationGroup::from_generators(name, &spec.generators, spec.expected_order)
            .map_err(crate::io::DataError::Group)?;
        Ok(group)
    }

    /// Expands `generators` and assembles the table, inverses and classes.
    pub fn from_generators(
        name: GroupName,
        generators: &[RotationMatrix],
        expected_order: usize,
    ) -> Result<Self, GroupError> {
        let elements = expand_generators(generators, expected_order)?;
        let n = elements.len();
        let mut mult_table = vec![vec![0usize; n]; n];
        for g in 0..n {
            for h in 0..n {
                let product = elements[g].rotation.mul(&elements[h].rotation);
                let mut hit = None;
                for (k, e) in elements.iter().enumerate() {
                    if e.rotation.max_abs_diff(&product) < MATCH_TOL {
                        if let Some(first) = hit {
                            return Err(GroupError::AmbiguousMatch { left: first, right: k });
                        }
                        hit = Some(k);
                    }
                }
                mult_table[g][h] = hit.ok_or(GroupError::ProductUnmatched { left: g, right: h })?;
            }
        }
        let mut inverse = vec![0usize; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| mult_table[g][h] == 0)
                .ok_or(GroupError::ProductUnmatched { left: g, right: g })?;
        }
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if seen[g] {
                continue;
            }
            let mut class: Vec<usize> = (0..n)
                .map(|h| mult_table[mult_table[h][g]][inverse[h]])
                .collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c] = true;
            }
            classes.push(class);
        }
        Ok(FiniteRotationGroup { name, elements, mult_table, inverse, classes })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult_table[g][h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// Order of a single element (smallest k > 0 with g^k = identity).
    pub fn element_order(&self, g: usize) -> usize {
        let mut acc = g;
        let mut k = 1;
        while acc != 0 {
            acc = self.mul(acc, g);
            k += 1;
        }
        k
    }

    /// Index of the conjugacy class containing `g`.
    pub fn class_of(&self, g: usize) -> usize {
        self.classes
            .iter()
            .position(|c| c.binary_search(&g).is_ok())
            .expect("classes partition the group")
    }

    /// Index of the element whose rotation matches `r`, if any.
    pub fn find_rotation(&self, r: &RotationMatrix) -> Option<usize> {
        self.elements.iter().position(|e| e.rotation.max_abs_diff(r) < MATCH_TOL)
    }
}
