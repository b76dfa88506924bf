//! Octahedral point symmetries combined with half-period translations.
//!
//! An element `(S, a)` acts on a field by
//! `(E(S,a) v)_k = exp(-i a·k) S v_{Sᵀk}`. Translations are restricted to
//! `a ∈ {0, π}³`, so the phase is always `±1` and stays exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::field::{ComplexVec3, FourierField, Vec3, WaveVector};

/// Signed permutation matrix, row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OctahedralMatrix(pub [[i8; 3]; 3]);

impl OctahedralMatrix {
    pub const IDENTITY: OctahedralMatrix = OctahedralMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
    pub const MINUS_IDENTITY: OctahedralMatrix = OctahedralMatrix([[-1, 0, 0], [0, -1, 0], [0, 0, -1]]);

    /// All 48 elements in canonical order.
    pub fn all() -> Vec<OctahedralMatrix> {
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(48);
        for p in PERMS {
            for signs in 0..8u8 {
                let mut m = [[0i8; 3]; 3];
                for (row, &col) in p.iter().enumerate() {
                    m[row][col] = if signs >> row & 1 == 1 { -1 } else { 1 };
                }
                out.push(OctahedralMatrix(m));
            }
        }
        out.sort();
        out
    }

    pub fn mul(&self, other: &OctahedralMatrix) -> OctahedralMatrix {
        let mut m = [[0i8; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|l| self.0[i][l] * other.0[l][j]).sum();
            }
        }
        OctahedralMatrix(m)
    }

    pub fn transpose(&self) -> OctahedralMatrix {
        let mut m = [[0i8; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.0[j][i];
            }
        }
        OctahedralMatrix(m)
    }

    pub fn neg(&self) -> OctahedralMatrix {
        OctahedralMatrix(self.0.map(|row| row.map(|x| -x)))
    }

    pub fn apply(&self, k: &WaveVector) -> WaveVector {
        WaveVector(std::array::from_fn(|i| {
            (0..3).map(|j| self.0[i][j] as i64 * k.0[j]).sum()
        }))
    }

    pub fn apply_vec(&self, v: &Vec3) -> Vec3 {
        std::array::from_fn(|i| {
            let mut acc = BigRational::zero();
            for j in 0..3 {
                match self.0[i][j] {
                    1 => acc += &v[j],
                    -1 => acc -= &v[j],
                    _ => {}
                }
            }
            acc
        })
    }

    /// Translation bits `b` mapped through the matrix, modulo 2.
    fn apply_bits(&self, b: &[bool; 3]) -> [bool; 3] {
        std::array::from_fn(|i| {
            (0..3).fold(false, |acc, j| acc ^ (self.0[i][j] != 0 && b[j]))
        })
    }
}

impl fmt::Debug for OctahedralMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// `(S, a)` with `a = π·bits`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub matrix: OctahedralMatrix,
    pub shift: [bool; 3],
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        matrix: OctahedralMatrix::IDENTITY,
        shift: [false; 3],
    };

    pub fn new(matrix: [[i8; 3]; 3], shift: [u8; 3]) -> Self {
        GroupElement {
            matrix: OctahedralMatrix(matrix),
            shift: shift.map(|b| b % 2 == 1),
        }
    }

    /// All 384 candidates in canonical order.
    pub fn all_candidates() -> Vec<GroupElement> {
        let mut out = Vec::with_capacity(384);
        for matrix in OctahedralMatrix::all() {
            for bits in 0..8u8 {
                out.push(GroupElement {
                    matrix,
                    shift: [bits >> 2 & 1 == 1, bits >> 1 & 1 == 1, bits & 1 == 1],
                });
            }
        }
        out
    }

    /// `exp(-i a·k)` for the half-period translation, as `±1`.
    pub fn phase(&self, k: &WaveVector) -> i64 {
        let odd = (0..3).filter(|&i| self.shift[i] && k.0[i].rem_euclid(2) == 1).count() % 2 == 1;
        if odd {
            -1
        } else {
            1
        }
    }

    pub fn power(&self, n: u32) -> GroupElement {
        (0..n).fold(GroupElement::IDENTITY, |acc, _| group_product(&acc, self))
    }

    /// Smallest `n >= 1` with `g^n = identity`.
    pub fn order(&self) -> u32 {
        let mut acc = *self;
        let mut n = 1;
        while acc != GroupElement::IDENTITY {
            acc = group_product(&acc, self);
            n += 1;
        }
        n
    }

    pub fn inverse(&self) -> GroupElement {
        self.power(self.order() - 1)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = self.shift.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "({:?}, π·{bits})", self.matrix)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.matrix.0.iter().flatten().map(|x| x.to_string()).collect();
        parts.extend(self.shift.iter().map(|&b| u8::from(b).to_string()));
        write!(f, "{}", parts.join(" "))
    }
}

/// `(S, a)(U, b) = (SU, a + S b)`, translations taken modulo 2π.
pub fn group_product(g: &GroupElement, h: &GroupElement) -> GroupElement {
    let moved = g.matrix.apply_bits(&h.shift);
    GroupElement {
        matrix: g.matrix.mul(&h.matrix),
        shift: std::array::from_fn(|i| g.shift[i] ^ moved[i]),
    }
}

pub fn push_forward(g: &GroupElement, v: &FourierField) -> FourierField {
    let mut out = BTreeMap::new();
    for (k_src, c) in v.iter() {
        let k = g.matrix.apply(k_src);
        out.insert(k, transform_coefficient(g, &k, c, 1));
    }
    FourierField::from_trusted(out)
}

/// `sign · exp(-i a·k) · S c`, where `k` is the destination wavevector.
pub(crate) fn transform_coefficient(g: &GroupElement, k: &WaveVector, c: &ComplexVec3, sign: i64) -> ComplexVec3 {
    let re = g.matrix.apply_vec(&c.re);
    let im = g.matrix.apply_vec(&c.im);
    let out = ComplexVec3::new(re, im);
    if g.phase(k) * sign < 0 {
        out.neg()
    } else {
        out
    }
}

/// Where an orbit member comes from: the element mapping the representative
/// onto it and whether that element reverses the sign of the datum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitMember {
    pub k: WaveVector,
    pub element: GroupElement,
    pub minus: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub representative: WaveVector,
    /// Distinct members in canonical order, representative included.
    pub members: Vec<OrbitMember>,
}

/// Partition of the sup-norm ball `|k|_∞ <= radius` into orbits of the
/// union of the point groups.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OrbitDecomposition {
    pub radius: i64,
    pub orbits: Vec<Orbit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryProfile {
    /// Elements fixing the datum, canonical order.
    pub plus_group: Vec<GroupElement>,
    /// Elements mapping the datum to its negative, canonical order.
    pub minus_set: Vec<GroupElement>,
    pub reduced_plus: Vec<OctahedralMatrix>,
    pub reduced_minus: Vec<OctahedralMatrix>,
    pub orbits: OrbitDecomposition,
}

/// Checks all 384 candidates against the datum and builds the profile with
/// orbits over the ball of the given radius.
pub fn detect_symmetries(u0: &FourierField, orbit_radius: i64) -> SymmetryProfile {
    let negated = crate::field::linear_combine(&BigRational::from_integer((-1).into()), u0, &BigRational::zero(), u0);
    let mut plus_group = Vec::new();
    let mut minus_set = Vec::new();
    for g in GroupElement::all_candidates() {
        let image = push_forward(&g, u0);
        if image == *u0 {
            plus_group.push(g);
        }
        if image == negated && !u0.is_empty() {
            minus_set.push(g);
        }
    }
    profile_from_elements(plus_group, minus_set, orbit_radius)
}

fn profile_from_elements(plus_group: Vec<GroupElement>, minus_set: Vec<GroupElement>, orbit_radius: i64) -> SymmetryProfile {
    let reduce = |set: &[GroupElement]| -> Vec<OctahedralMatrix> {
        set.iter().map(|g| g.matrix).collect::<BTreeSet<_>>().into_iter().collect()
    };
    let mut profile = SymmetryProfile {
        reduced_plus: reduce(&plus_group),
        reduced_minus: reduce(&minus_set),
        plus_group,
        minus_set,
        orbits: OrbitDecomposition::default(),
    };
    profile.orbits = profile.orbit_decomposition(orbit_radius);
    profile
}

impl SymmetryProfile {
    /// Profile with only the identity: every orbit is a single wavevector.
    pub fn trivial() -> Self {
        profile_from_elements(vec![GroupElement::IDENTITY], Vec::new(), 0)
    }

    pub fn is_trivial(&self) -> bool {
        self.plus_group.len() <= 1 && self.minus_set.is_empty()
    }

    /// Lexicographically smallest image of `k` under the reduced union group.
    pub fn representative(&self, k: &WaveVector) -> WaveVector {
        self.reduced_plus
            .iter()
            .chain(self.reduced_minus.iter())
            .map(|m| m.apply(k))
            .min()
            .unwrap_or(*k)
    }

    /// Images of `k` under every element of the plus group and minus set, in
    /// canonical order, duplicates kept (stabilizers matter for consistency
    /// checks).
    pub fn images(&self, k: &WaveVector) -> Vec<OrbitMember> {
        let plus = self.plus_group.iter().map(|g| OrbitMember {
            k: g.matrix.apply(k),
            element: *g,
            minus: false,
        });
        let minus = self.minus_set.iter().map(|g| OrbitMember {
            k: g.matrix.apply(k),
            element: *g,
            minus: true,
        });
        plus.chain(minus).collect()
    }

    pub fn orbit_of(&self, representative: &WaveVector) -> Orbit {
        let mut seen = BTreeMap::new();
        for m in self.images(representative) {
            seen.entry(m.k).or_insert(m);
        }
        Orbit {
            representative: *representative,
            members: seen.into_values().collect(),
        }
    }

    pub fn orbit_decomposition(&self, radius: i64) -> OrbitDecomposition {
        let mut orbits = Vec::new();
        for a in -radius..=radius {
            for b in -radius..=radius {
                for c in -radius..=radius {
                    let k = WaveVector::new(a, b, c);
                    if self.representative(&k) == k {
                        orbits.push(self.orbit_of(&k));
                    }
                }
            }
        }
        OrbitDecomposition { radius, orbits }
    }

    /// Text dump: `plus` and `minus` sections, one element per line as nine
    /// matrix entries followed by three translation bits.
    pub fn dump(&self) -> String {
        let mut out = String::from("plus\n");
        for g in &self.plus_group {
            out.push_str(&format!("{g}\n"));
        }
        out.push_str("minus\n");
        for g in &self.minus_set {
            out.push_str(&format!("{g}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("profile dump line {line}: {message}")]
pub struct ProfileParseError {
    pub line: usize,
    pub message: String,
}

/// Parses the output of [`SymmetryProfile::dump`]. Elements must be valid
/// signed permutations with binary translation bits, listed in canonical
/// order without repeats.
pub fn parse_profile_dump(text: &str, orbit_radius: i64) -> Result<SymmetryProfile, ProfileParseError> {
    let mut section = None;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let valid: BTreeSet<OctahedralMatrix> = OctahedralMatrix::all().into_iter().collect();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: &str| ProfileParseError {
            line,
            message: message.to_owned(),
        };
        let trimmed = raw.trim();
        match trimmed {
            "" => continue,
            "plus" if section.is_none() => {
                section = Some(false);
                continue;
            }
            "minus" if section == Some(false) => {
                section = Some(true);
                continue;
            }
            _ => {}
        }
        let Some(is_minus) = section else {
            return Err(err("element before section header"));
        };
        let nums: Vec<i8> = trimmed
            .split_whitespace()
            .map(|t| t.parse::<i8>().map_err(|_| err("invalid integer")))
            .collect::<Result<_, _>>()?;
        if nums.len() != 12 {
            return Err(err("expected 12 integers"));
        }
        let matrix = OctahedralMatrix(std::array::from_fn(|i| std::array::from_fn(|j| nums[3 * i + j])));
        if !valid.contains(&matrix) {
            return Err(err("not a signed permutation matrix"));
        }
        if nums[9..].iter().any(|&b| b != 0 && b != 1) {
            return Err(err("translation bits must be 0 or 1"));
        }
        let g = GroupElement {
            matrix,
            shift: std::array::from_fn(|i| nums[9 + i] == 1),
        };
        let list = if is_minus { &mut minus } else { &mut plus };
        if list.last().is_some_and(|prev| *prev >= g) {
            return Err(err("elements not in strictly increasing canonical order"));
        }
        list.push(g);
    }
    if section != Some(true) {
        return Err(ProfileParseError {
            line: text.lines().count(),
            message: "missing section header".to_owned(),
        });
    }
    Ok(profile_from_elements(plus, minus, orbit_radius))
}

/// True when the set is closed under products and inverses and contains the
/// identity.
pub fn is_group(elements: &[GroupElement]) -> bool {
    let set: BTreeSet<_> = elements.iter().copied().collect();
    set.contains(&GroupElement::IDENTITY)
        && elements
            .iter()
            .all(|g| set.contains(&g.inverse()) && elements.iter().all(|h| set.contains(&group_product(g, h))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub description: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupShape {
    Trivial,
    Cyclic { generator: GroupElement, order: u32 },
    Dihedral { rotation: GroupElement, reflection: GroupElement, m: u32 },
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTable {
    pub order: usize,
    pub shape: GroupShape,
    pub relations: Vec<Relation>,
}

impl fmt::Display for RelationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order {}", self.order)?;
        match &self.shape {
            GroupShape::Trivial => writeln!(f, "trivial")?,
            GroupShape::Cyclic { generator, order } => writeln!(f, "cyclic of order {order}, x = {generator:?}")?,
            GroupShape::Dihedral { rotation, reflection, m } => {
                writeln!(f, "dihedral of order {}, x = {rotation:?}, y = {reflection:?}", 2 * m)?
            }
            GroupShape::Other => writeln!(f, "no cyclic or dihedral presentation")?,
        }
        for r in &self.relations {
            writeln!(f, "{}: {}", r.description, if r.holds { "holds" } else { "fails" })?;
        }
        Ok(())
    }
}

/// Checks `x^m = e`, `y^2 = e` and `(yx)^2 = e` with `m` the order of `x`.
pub fn dihedral_relations(x: &GroupElement, y: &GroupElement) -> Vec<Relation> {
    let m = x.order();
    let yx = group_product(y, x);
    vec![
        Relation {
            description: format!("x^{m} = e"),
            holds: x.power(m) == GroupElement::IDENTITY,
        },
        Relation {
            description: "y^2 = e".to_owned(),
            holds: y.power(2) == GroupElement::IDENTITY,
        },
        Relation {
            description: "(yx)^2 = e".to_owned(),
            holds: yx.power(2) == GroupElement::IDENTITY,
        },
    ]
}

fn generated(generators: &[GroupElement]) -> BTreeSet<GroupElement> {
    let mut set: BTreeSet<GroupElement> = [GroupElement::IDENTITY].into_iter().collect();
    let mut frontier: Vec<GroupElement> = set.iter().copied().collect();
    while let Some(g) = frontier.pop() {
        for h in generators {
            let p = group_product(&g, h);
            if set.insert(p) {
                frontier.push(p);
            }
        }
    }
    set
}

/// Finds a cyclic or dihedral presentation of a finite group of elements.
/// The rotation is the first element of maximal order in canonical order;
/// the reflection is the first involution outside the rotation subgroup that
/// generates the whole group together with it.
pub fn presentation_report(elements: &[GroupElement]) -> RelationTable {
    let order = elements.len();
    if order <= 1 {
        return RelationTable {
            order,
            shape: GroupShape::Trivial,
            relations: Vec::new(),
        };
    }
    let all: BTreeSet<_> = elements.iter().copied().collect();
    let x = *elements
        .iter()
        .max_by(|a, b| a.order().cmp(&b.order()).then(b.cmp(a)))
        .expect("nonempty");
    let m = x.order();
    if m as usize == order {
        return RelationTable {
            order,
            shape: GroupShape::Cyclic { generator: x, order: m },
            relations: vec![Relation {
                description: format!("x^{m} = e"),
                holds: true,
            }],
        };
    }
    let rotations = generated(&[x]);
    if order == 2 * m as usize {
        for y in elements {
            if rotations.contains(y) {
                continue;
            }
            let relations = dihedral_relations(&x, y);
            if relations.iter().all(|r| r.holds) && generated(&[x, *y]) == all {
                return RelationTable {
                    order,
                    shape: GroupShape::Dihedral {
                        rotation: x,
                        reflection: *y,
                        m,
                    },
                    relations,
                };
            }
        }
    }
    RelationTable {
        order,
        shape: GroupShape::Other,
        relations: Vec::new(),
    }
}

/// The reduced group as elements with zero translation, for presentations.
pub fn as_pure_rotations(matrices: &[OctahedralMatrix]) -> Vec<GroupElement> {
    matrices
        .iter()
        .map(|&matrix| GroupElement {
            matrix,
            shift: [false; 3],
        })
        .collect()
}
