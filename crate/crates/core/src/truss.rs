//! The parameterized trapezoidal truss: design variables, node/member layout,
//! supports, loading and mass.
//!
//! All lengths are in millimetres, forces in newtons, stresses in MPa and
//! angles in degrees at every public boundary.
//!
//! Reference layout (B = bottom chord, T = top node):
//!
//! ```text
//!             T1 ------- T2 ------- T3
//!            / |  \      |      /  | \
//!           /  |    \    |    /    |  \
//!         B0 - B1 ----- B2 ----- B3 - B4
//!          a      b         c       d
//! ```
//!
//! B0 is pinned, B4 sits on a roller. `theta2` sets the left apex
//! (T1 height = a·tan θ2) and `theta1` the right apex (T3 height = d·tan θ1).
//! T2 lies on the straight line T1–T3.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// Overall span fixed by the design problem (mm).
pub const SPAN_MM: f64 = 8000.0;

/// Shortest admissible member length (mm).
pub const MIN_MEMBER_LENGTH_MM: f64 = 1e-9;

/// Number of free design variables.
pub const DESIGN_DIMS: usize = 5;

/// Node indices of the reference layout.
pub mod node {
    pub const B0: usize = 0;
    pub const B1: usize = 1;
    pub const B2: usize = 2;
    pub const B3: usize = 3;
    pub const B4: usize = 4;
    pub const T1: usize = 5;
    pub const T2: usize = 6;
    pub const T3: usize = 7;
}

/// Members of the reference layout, in reporting order.
pub const REFERENCE_MEMBERS: [(usize, usize); 13] = {
    use node::*;
    [
        (B0, B1),
        (B1, B2),
        (B2, B3),
        (B3, B4),
        (B0, T1),
        (B4, T3),
        (B1, T1),
        (B2, T2),
        (B3, T3),
        (T1, T2),
        (T2, T3),
        (T1, B2),
        (T3, B2),
    ]
};

/// Human-readable member labels matching [`REFERENCE_MEMBERS`].
pub const REFERENCE_MEMBER_NAMES: [&str; 13] = [
    "B0-B1", "B1-B2", "B2-B3", "B3-B4", "B0-T1", "B4-T3", "B1-T1", "B2-T2", "B3-T3", "T1-T2", "T2-T3",
    "T1-B2", "T3-B2",
];

/// One of the five design variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    A,
    B,
    C,
    Theta1,
    Theta2,
}

impl Field {
    pub const ALL: [Field; DESIGN_DIMS] = [Field::A, Field::B, Field::C, Field::Theta1, Field::Theta2];

    pub fn name(self) -> &'static str {
        match self {
            Field::A => "a",
            Field::B => "b",
            Field::C => "c",
            Field::Theta1 => "theta1",
            Field::Theta2 => "theta2",
        }
    }

    /// Inclusive `(min, max)` bounds of the variable.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Field::A | Field::B | Field::C => (500.0, 2500.0),
            Field::Theta1 | Field::Theta2 => (0.0, 60.0),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("design parameter `{field}` = {value} outside [{min}, {max}]")]
pub struct BoundsError {
    pub field: Field,
    pub value: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("member {member} ({i}-{j}) has degenerate length {length} mm")]
    Degenerate {
        member: usize,
        i: usize,
        j: usize,
        length: f64,
    },
    #[error("member {member} references invalid node pair ({i}, {j})")]
    InvalidMember { member: usize, i: usize, j: usize },
    #[error("member {member} duplicates an earlier member")]
    DuplicateMember { member: usize },
    #[error("support or load references missing node {node}")]
    InvalidNode { node: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("material property `{field}` is invalid: {value}")]
pub struct MaterialError {
    pub field: &'static str,
    pub value: f64,
}

/// The five free design variables. Lengths in mm, angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    /// Right side angle.
    pub theta1: T,
    /// Left side angle.
    pub theta2: T,
}

impl<T: Scalar> DesignParams<T> {
    pub fn new(a: T, b: T, c: T, theta1: T, theta2: T) -> Self {
        Self { a, b, c, theta1, theta2 }
    }

    pub fn get(&self, field: Field) -> T {
        match field {
            Field::A => self.a,
            Field::B => self.b,
            Field::C => self.c,
            Field::Theta1 => self.theta1,
            Field::Theta2 => self.theta2,
        }
    }

    /// Values in [`Field::ALL`] order.
    pub fn to_array(&self) -> [T; DESIGN_DIMS] {
        [self.a, self.b, self.c, self.theta1, self.theta2]
    }

    pub fn from_array(v: [T; DESIGN_DIMS]) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4])
    }

    /// Maps a point of the unit cube affinely onto the design box.
    pub fn from_unit(u: &[T]) -> Self {
        assert_eq!(u.len(), DESIGN_DIMS, "unit point must have {DESIGN_DIMS} coordinates");
        let mut v = [T::zero(); DESIGN_DIMS];
        for (k, field) in Field::ALL.iter().enumerate() {
            let (lo, hi) = field.bounds();
            let (lo, hi) = (T::lit(lo), T::lit(hi));
            v[k] = (lo + u[k] * (hi - lo)).max(lo).min(hi);
        }
        Self::from_array(v)
    }

    /// Inverse of [`DesignParams::from_unit`].
    pub fn to_unit(&self) -> [T; DESIGN_DIMS] {
        let mut u = [T::zero(); DESIGN_DIMS];
        for (k, field) in Field::ALL.iter().enumerate() {
            let (lo, hi) = field.bounds();
            u[k] = (self.get(*field) - T::lit(lo)) / T::lit(hi - lo);
        }
        u
    }

    /// Checks every field against its bounds. NaN is always out of bounds.
    pub fn validate(&self) -> Result<(), BoundsError> {
        for field in Field::ALL {
            let (min, max) = field.bounds();
            let value = self.get(field);
            if !(value >= T::lit(min) && value <= T::lit(max)) {
                return Err(BoundsError {
                    field,
                    value: value.as_f64(),
                    min,
                    max,
                });
            }
        }
        Ok(())
    }
}

/// In-bounds design together with the dependent right outer section `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedDesign<T> {
    params: DesignParams<T>,
    d: T,
}

impl<T: Scalar> DerivedDesign<T> {
    pub fn params(&self) -> &DesignParams<T> {
        &self.params
    }

    /// Right outer section, `8000 − (a + b + c)` mm.
    pub fn d(&self) -> T {
        self.d
    }
}

/// Validates `params` and computes `d = 8000 − (a + b + c)`.
pub fn derive_design<T: Scalar>(params: DesignParams<T>) -> Result<DerivedDesign<T>, BoundsError> {
    params.validate()?;
    let d = T::lit(SPAN_MM) - (params.a + params.b + params.c);
    Ok(DerivedDesign { params, d })
}

/// Isotropic linear-elastic material. Density in kg/mm³, moduli in MPa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material<T> {
    pub density: T,
    pub youngs_modulus: T,
    pub poisson_ratio: T,
    pub yield_strength: T,
}

impl<T: Scalar> Material<T> {
    /// AL-6061-T6: 2700 kg/m³, 70 GPa, ν = 0.35, yield 276 MPa.
    pub fn al6061_t6() -> Self {
        Self {
            density: T::lit(2.7e-6),
            youngs_modulus: T::lit(70_000.0),
            poisson_ratio: T::lit(0.35),
            yield_strength: T::lit(276.0),
        }
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        let checks = [
            ("density", self.density),
            ("youngs_modulus", self.youngs_modulus),
            ("poisson_ratio", self.poisson_ratio),
            ("yield_strength", self.yield_strength),
        ];
        for (field, value) in checks {
            if !(value > T::zero() && value.is_finite()) {
                return Err(MaterialError {
                    field,
                    value: value.as_f64(),
                });
            }
        }
        if !(self.poisson_ratio < T::lit(0.5)) {
            return Err(MaterialError {
                field: "poisson_ratio",
                value: self.poisson_ratio.as_f64(),
            });
        }
        Ok(())
    }
}

impl<T: Scalar> Default for Material<T> {
    fn default() -> Self {
        Self::al6061_t6()
    }
}

/// Uniform member cross-section (mm²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section<T> {
    pub area: T,
}

impl<T: Scalar> Section<T> {
    pub fn new(area: T) -> Self {
        Self { area }
    }
}

impl<T: Scalar> Default for Section<T> {
    fn default() -> Self {
        Self { area: T::lit(500.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Self) -> T {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Support {
    pub node: usize,
    pub fix_x: bool,
    pub fix_y: bool,
}

impl Support {
    pub fn pin(node: usize) -> Self {
        Self {
            node,
            fix_x: true,
            fix_y: true,
        }
    }

    pub fn roller_y(node: usize) -> Self {
        Self {
            node,
            fix_x: false,
            fix_y: true,
        }
    }

    pub fn reaction_count(&self) -> usize {
        usize::from(self.fix_x) + usize::from(self.fix_y)
    }
}

/// External nodal force (N).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointLoad<T> {
    pub node: usize,
    pub fx: T,
    pub fy: T,
}

/// Pin-jointed plane truss.
#[derive(Debug, Clone, PartialEq)]
pub struct TrussGeometry<T> {
    pub nodes: Vec<Point<T>>,
    pub members: Vec<(usize, usize)>,
    pub supports: Vec<Support>,
    pub loads: Vec<PointLoad<T>>,
}

impl<T: Scalar> TrussGeometry<T> {
    /// Builds a truss after checking member and support indices and member lengths.
    pub fn new(
        nodes: Vec<Point<T>>,
        members: Vec<(usize, usize)>,
        supports: Vec<Support>,
    ) -> Result<Self, GeometryError> {
        let geometry = Self {
            nodes,
            members,
            supports,
            loads: Vec::new(),
        };
        geometry.check()?;
        Ok(geometry)
    }

    /// Re-runs the structural checks performed by [`TrussGeometry::new`].
    pub fn check(&self) -> Result<(), GeometryError> {
        let m = self.nodes.len();
        for (k, &(i, j)) in self.members.iter().enumerate() {
            if i >= m || j >= m || i == j {
                return Err(GeometryError::InvalidMember { member: k, i, j });
            }
            let key = (i.min(j), i.max(j));
            if self.members[..k].iter().any(|&(p, q)| (p.min(q), p.max(q)) == key) {
                return Err(GeometryError::DuplicateMember { member: k });
            }
            let length = self.member_length(k);
            if !(length >= T::lit(MIN_MEMBER_LENGTH_MM)) {
                return Err(GeometryError::Degenerate {
                    member: k,
                    i,
                    j,
                    length: length.as_f64(),
                });
            }
        }
        for s in &self.supports {
            if s.node >= m {
                return Err(GeometryError::InvalidNode { node: s.node });
            }
        }
        for l in &self.loads {
            if l.node >= m {
                return Err(GeometryError::InvalidNode { node: l.node });
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    pub fn reaction_count(&self) -> usize {
        self.supports.iter().map(Support::reaction_count).sum()
    }

    /// `n + r = 2m`.
    pub fn is_statically_determinate(&self) -> bool {
        self.member_count() + self.reaction_count() == 2 * self.node_count()
    }

    pub fn member_length(&self, member: usize) -> T {
        let (i, j) = self.members[member];
        self.nodes[i].distance(&self.nodes[j])
    }

    pub fn member_lengths(&self) -> Vec<T> {
        (0..self.members.len()).map(|k| self.member_length(k)).collect()
    }

    pub fn total_length(&self) -> T {
        (0..self.members.len()).map(|k| self.member_length(k)).sum()
    }

    /// Direction cosines `(cos α, sin α)` of a member, pointing from its first to its second node.
    pub fn direction(&self, member: usize) -> (T, T) {
        let (i, j) = self.members[member];
        let (p, q) = (self.nodes[i], self.nodes[j]);
        let length = p.distance(&q);
        ((q.x - p.x) / length, (q.y - p.y) / length)
    }

    /// Whether the x (axis 0) or y (axis 1) translation of `node` is restrained.
    pub fn is_fixed(&self, node: usize, axis: usize) -> bool {
        self.supports
            .iter()
            .any(|s| s.node == node && if axis == 0 { s.fix_x } else { s.fix_y })
    }

    /// Sum of all external forces `(Σfx, Σfy)`.
    pub fn total_applied(&self) -> (T, T) {
        self.loads
            .iter()
            .fold((T::zero(), T::zero()), |(sx, sy), l| (sx + l.fx, sy + l.fy))
    }

    /// Copy with every node shifted by `(dx, dy)`.
    pub fn translated(&self, dx: T, dy: T) -> Self {
        let mut g = self.clone();
        for p in &mut g.nodes {
            p.x = p.x + dx;
            p.y = p.y + dy;
        }
        g
    }
}

/// Node coordinates, members and supports of the reference layout without
/// checking member lengths. Mass is defined even for collapsed layouts.
pub fn reference_layout<T: Scalar>(design: &DerivedDesign<T>) -> TrussGeometry<T> {
    let p = design.params();
    let d = design.d();
    let zero = T::zero();
    let x1 = p.a;
    let x2 = p.a + p.b;
    let x3 = p.a + p.b + p.c;
    let h1 = p.a * p.theta2.to_radians().tan();
    let h3 = d * p.theta1.to_radians().tan();
    let h2 = h1 + (h3 - h1) * (x2 - x1) / (x3 - x1);
    let nodes = vec![
        Point::new(zero, zero),
        Point::new(x1, zero),
        Point::new(x2, zero),
        Point::new(x3, zero),
        Point::new(T::lit(SPAN_MM), zero),
        Point::new(x1, h1),
        Point::new(x2, h2),
        Point::new(x3, h3),
    ];
    TrussGeometry {
        nodes,
        members: REFERENCE_MEMBERS.to_vec(),
        supports: vec![Support::pin(node::B0), Support::roller_y(node::B4)],
        loads: Vec::new(),
    }
}

/// Realizes the 8-node, 13-member reference truss for a design.
pub fn build_geometry<T: Scalar>(design: &DerivedDesign<T>) -> Result<TrussGeometry<T>, GeometryError> {
    let geometry = reference_layout(design);
    geometry.check()?;
    Ok(geometry)
}

/// Replaces the loads with `total_load / 3` acting downward at T1, T2 and T3.
pub fn build_load_case<T: Scalar>(geometry: &TrussGeometry<T>, total_load: T) -> TrussGeometry<T> {
    let share = total_load / T::lit(3.0);
    let mut g = geometry.clone();
    g.loads = [node::T1, node::T2, node::T3]
        .into_iter()
        .map(|n| PointLoad {
            node: n,
            fx: T::zero(),
            fy: T::zero() - share,
        })
        .collect();
    g
}

/// `density × area × Σ member lengths` (kg).
pub fn mass<T: Scalar>(geometry: &TrussGeometry<T>, section: &Section<T>, material: &Material<T>) -> T {
    material.density * section.area * geometry.total_length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn design(a: f64, b: f64, c: f64, t1: f64, t2: f64) -> DerivedDesign<f64> {
        derive_design(DesignParams::new(a, b, c, t1, t2)).unwrap()
    }

    #[test]
    fn derived_d_for_reported_optimum() {
        let d = design(1200.0, 2497.3, 2498.2, 42.0, 45.0);
        assert_relative_eq!(d.d(), 1804.5, epsilon = 1e-9);
    }

    #[test]
    fn derived_d_at_upper_bounds() {
        assert_eq!(design(2500.0, 2500.0, 2500.0, 30.0, 30.0).d(), 500.0);
    }

    #[test]
    fn out_of_bounds_names_field() {
        let err = derive_design(DesignParams::new(400.0, 1000.0, 1000.0, 30.0, 30.0)).unwrap_err();
        assert_eq!(err.field, Field::A);
        assert!(err.to_string().contains("`a`"));
        let err = derive_design(DesignParams::new(1000.0, 1000.0, 1000.0, 61.0, 30.0)).unwrap_err();
        assert_eq!(err.field, Field::Theta1);
        let err = derive_design(DesignParams::new(1000.0, f64::NAN, 1000.0, 10.0, 30.0)).unwrap_err();
        assert_eq!(err.field, Field::B);
    }

    #[test]
    fn symmetric_45_degree_layout() {
        let g = build_geometry(&design(2000.0, 2000.0, 2000.0, 45.0, 45.0)).unwrap();
        assert_eq!(g.node_count(), 8);
        assert_eq!(g.member_count(), 13);
        assert_relative_eq!(g.nodes[node::T1].x, 2000.0);
        assert_relative_eq!(g.nodes[node::T1].y, 2000.0, epsilon = 1e-9);
        assert_relative_eq!(g.nodes[node::T3].x, 6000.0);
        assert_relative_eq!(g.nodes[node::T3].y, 2000.0, epsilon = 1e-9);
        assert_relative_eq!(g.nodes[node::T2].x, 4000.0);
        assert_relative_eq!(g.nodes[node::T2].y, 2000.0, epsilon = 1e-9);
    }

    #[test]
    fn reported_optimum_layout() {
        let g = build_geometry(&design(1200.0, 2497.3, 2498.2, 42.0, 45.0)).unwrap();
        // independent recomputation
        let h1 = 1200.0 * (45.0f64).to_radians().tan();
        let h3 = 1804.5 * (42.0f64).to_radians().tan();
        let x2 = 1200.0 + 2497.3;
        let x3 = x2 + 2498.2;
        let h2 = h1 + (h3 - h1) * (x2 - 1200.0) / (x3 - 1200.0);
        assert_relative_eq!(g.nodes[node::T1].y, 1200.0, epsilon = 1e-9);
        assert_relative_eq!(g.nodes[node::T3].x, 6195.5, epsilon = 1e-9);
        assert_relative_eq!(g.nodes[node::T3].y, h3, epsilon = 1e-9);
        assert!((g.nodes[node::T3].y - 1624.7).abs() < 0.1);
        assert_relative_eq!(g.nodes[node::T2].x, 3697.3, epsilon = 1e-9);
        assert_relative_eq!(g.nodes[node::T2].y, h2, epsilon = 1e-9);
        assert_relative_eq!(h1, 1200.0, epsilon = 1e-9);
    }

    #[test]
    fn flat_design_is_degenerate() {
        let err = build_geometry(&design(2000.0, 2000.0, 2000.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, GeometryError::Degenerate { .. }));
    }

    #[test]
    fn load_case_splits_total() {
        let g = build_geometry(&design(2000.0, 2000.0, 2000.0, 45.0, 45.0)).unwrap();
        for (total, each) in [(12000.0, -4000.0), (0.0, 0.0), (300.0, -100.0)] {
            let loaded = build_load_case(&g, total);
            let nodes: Vec<usize> = loaded.loads.iter().map(|l| l.node).collect();
            assert_eq!(nodes, vec![node::T1, node::T2, node::T3]);
            for l in &loaded.loads {
                assert_eq!(l.fx, 0.0);
                assert_relative_eq!(l.fy, each);
            }
        }
    }

    #[test]
    fn single_member_mass() {
        let g = TrussGeometry::new(
            vec![Point::new(0.0, 0.0), Point::new(1000.0, 0.0)],
            vec![(0, 1)],
            vec![],
        )
        .unwrap();
        let m = mass(&g, &Section::new(500.0), &Material::al6061_t6());
        assert_relative_eq!(m, 1.35, epsilon = 1e-12);
        let m2 = mass(&g, &Section::new(1000.0), &Material::al6061_t6());
        assert_relative_eq!(m2, 2.0 * m, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_layout_mass() {
        let g = build_geometry(&design(2000.0, 2000.0, 2000.0, 45.0, 45.0)).unwrap();
        // 4 chords of 2000, 2 rakers of 2000√2, 3 verticals of 2000, 2 top chords of 2000,
        // 2 diagonals of 2000√2
        let sum = 4.0 * 2000.0 + 3.0 * 2000.0 + 2.0 * 2000.0 + 4.0 * 2000.0 * 2f64.sqrt();
        let m = mass(&g, &Section::default(), &Material::al6061_t6());
        assert_relative_eq!(m, 2.7e-6 * 500.0 * sum, max_relative = 1e-12);
    }

    #[test]
    fn material_validation() {
        assert!(Material::<f64>::al6061_t6().validate().is_ok());
        let mut m = Material::<f64>::al6061_t6();
        m.poisson_ratio = 0.5;
        assert_eq!(m.validate().unwrap_err().field, "poisson_ratio");
        m = Material::al6061_t6();
        m.density = 0.0;
        assert_eq!(m.validate().unwrap_err().field, "density");
    }

    #[test]
    fn invalid_members_rejected() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert!(matches!(
            TrussGeometry::new(pts.clone(), vec![(0, 2)], vec![]),
            Err(GeometryError::InvalidMember { .. })
        ));
        assert!(matches!(
            TrussGeometry::new(pts, vec![(0, 1), (1, 0)], vec![]),
            Err(GeometryError::DuplicateMember { member: 1 })
        ));
    }

    #[test]
    fn unit_mapping_round_trips() {
        let p = DesignParams::new(1200.0, 2497.3, 2498.2, 42.0, 45.0);
        let back = DesignParams::from_unit(&p.to_unit());
        for f in Field::ALL {
            assert_relative_eq!(back.get(f), p.get(f), epsilon = 1e-9);
        }
    }

    #[test]
    fn f32_layout_matches_f64() {
        let d32 = derive_design(DesignParams::new(1200.0f32, 2497.3, 2498.2, 42.0, 45.0)).unwrap();
        let g32 = build_geometry(&d32).unwrap();
        let g64 = build_geometry(&design(1200.0, 2497.3, 2498.2, 42.0, 45.0)).unwrap();
        for (p, q) in g32.nodes.iter().zip(&g64.nodes) {
            assert!((f64::from(p.y) - q.y).abs() < 1e-2);
        }
    }

    fn in_box() -> impl Strategy<Value = DesignParams<f64>> {
        (500.0..=2500.0f64, 500.0..=2500.0f64, 500.0..=2500.0f64, 0.0..=60.0f64, 0.0..=60.0f64)
            .prop_map(|(a, b, c, t1, t2)| DesignParams::new(a, b, c, t1, t2))
    }

    proptest! {
        #[test]
        fn derive_is_total_on_box(p in in_box()) {
            let d = derive_design(p).unwrap();
            let sum = p.a + p.b + p.c + d.d();
            prop_assert!((sum - SPAN_MM).abs() <= 2.0 * f64::EPSILON * SPAN_MM);
            prop_assert!(d.d() >= 500.0 && d.d() <= 6500.0);
        }

        #[test]
        fn layout_is_ordered_and_determinate(p in in_box()) {
            let d = derive_design(p).unwrap();
            let g = reference_layout(&d);
            prop_assert_eq!(g.member_count(), 13);
            prop_assert_eq!(g.reaction_count(), 3);
            prop_assert_eq!(g.node_count(), 8);
            prop_assert!(g.is_statically_determinate());
            use node::*;
            let n = &g.nodes;
            prop_assert!(n[B0].x < n[B1].x && n[B1].x < n[B2].x && n[B2].x < n[B3].x && n[B3].x < n[B4].x);
            prop_assert_eq!(n[T1].x, n[B1].x);
            prop_assert_eq!(n[T2].x, n[B2].x);
            prop_assert_eq!(n[T3].x, n[B3].x);
        }

        #[test]
        fn mass_translation_invariant(p in in_box(), dx in -1e4..1e4f64, dy in -1e4..1e4f64) {
            let g = reference_layout(&derive_design(p).unwrap());
            let (s, m) = (Section::default(), Material::al6061_t6());
            let m0 = mass(&g, &s, &m);
            let m1 = mass(&g.translated(dx, dy), &s, &m);
            prop_assert!((m0 - m1).abs() <= 1e-9 * m0);
        }
    }
}
