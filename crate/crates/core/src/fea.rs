//! Direct-stiffness analysis of pin-jointed plane trusses, with a
//! method-of-joints equilibrium solver as an independent check.

use std::fmt;

use thiserror::Error;

use crate::linalg::{lu_solve, Cholesky, LinalgError, Matrix};
use crate::scalar::Scalar;
use crate::truss::{
    build_geometry, build_load_case, mass, reference_layout, DerivedDesign, GeometryError, Material, Point,
    Section, TrussGeometry, MIN_MEMBER_LENGTH_MM,
};

/// Relative pivot threshold for the stiffness factorization.
pub const PIVOT_TOLERANCE: f64 = 1e-10;
/// Bound on `‖K·u − f‖∞ / max(1, ‖f‖∞)` for an accepted solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Relative pivot threshold for the joint-equilibrium system.
pub const EQUILIBRIUM_PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeaError {
    #[error(transparent)]
    Degenerate(#[from] GeometryError),
    #[error("singular system: {0}")]
    Singular(String),
}

impl From<LinalgError> for FeaError {
    fn from(e: LinalgError) -> Self {
        FeaError::Singular(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureMode {
    None,
    YieldExceeded,
    SingularSystem,
    DegenerateGeometry,
}

impl FailureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureMode::None => "none",
            FailureMode::YieldExceeded => "yield_exceeded",
            FailureMode::SingularSystem => "singular_system",
            FailureMode::DegenerateGeometry => "degenerate_geometry",
        }
    }

    /// True when the analysis itself could not be completed.
    pub fn is_analysis_failure(self) -> bool {
        matches!(self, FailureMode::SingularSystem | FailureMode::DegenerateGeometry)
    }
}

impl fmt::Display for FailureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Global-coordinate 4×4 stiffness block of an axial bar, ordered `(ui, vi, uj, vj)`.
pub fn element_stiffness<T: Scalar>(
    node_i: Point<T>,
    node_j: Point<T>,
    youngs_modulus: T,
    area: T,
) -> Result<[[T; 4]; 4], FeaError> {
    let length = node_i.distance(&node_j);
    if !(length >= T::lit(MIN_MEMBER_LENGTH_MM)) {
        return Err(FeaError::Degenerate(GeometryError::Degenerate {
            member: 0,
            i: 0,
            j: 1,
            length: length.as_f64(),
        }));
    }
    let c = (node_j.x - node_i.x) / length;
    let s = (node_j.y - node_i.y) / length;
    let k = youngs_modulus * area / length;
    let (cc, cs, ss) = (k * c * c, k * c * s, k * s * s);
    Ok([
        [cc, cs, -cc, -cs],
        [cs, ss, -cs, -ss],
        [-cc, -cs, cc, cs],
        [-cs, -ss, cs, ss],
    ])
}

/// Maps each node's (x, y) translation to a row of the reduced system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    rows: Vec<[Option<usize>; 2]>,
    free: usize,
}

impl DofMap {
    pub fn new<T: Scalar>(geometry: &TrussGeometry<T>) -> Self {
        let mut free = 0;
        let rows = (0..geometry.node_count())
            .map(|n| {
                let mut r = [None, None];
                for (axis, slot) in r.iter_mut().enumerate() {
                    if !geometry.is_fixed(n, axis) {
                        *slot = Some(free);
                        free += 1;
                    }
                }
                r
            })
            .collect();
        Self { rows, free }
    }

    pub fn row(&self, node: usize, axis: usize) -> Option<usize> {
        self.rows[node][axis]
    }

    pub fn free_count(&self) -> usize {
        self.free
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }
}

/// Reduced stiffness system over the unconstrained degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessSystem<T> {
    pub matrix: Matrix<T>,
    pub dof_map: DofMap,
    pub load_vector: Vec<T>,
}

impl<T: Scalar> StiffnessSystem<T> {
    /// Scatters a reduced displacement vector back to per-node `(ux, uy)`.
    pub fn expand(&self, u: &[T]) -> Vec<[T; 2]> {
        (0..self.dof_map.node_count())
            .map(|n| {
                let get = |axis| self.dof_map.row(n, axis).map_or(T::zero(), |r| u[r]);
                [get(0), get(1)]
            })
            .collect()
    }
}

/// Sums element blocks, strips restrained rows and columns and collects nodal loads.
pub fn assemble<T: Scalar>(
    geometry: &TrussGeometry<T>,
    material: &Material<T>,
    section: &Section<T>,
) -> Result<StiffnessSystem<T>, FeaError> {
    let dof_map = DofMap::new(geometry);
    let n = dof_map.free_count();
    let mut matrix = Matrix::zeros(n, n);
    for (k, &(i, j)) in geometry.members.iter().enumerate() {
        let ke = element_stiffness(geometry.nodes[i], geometry.nodes[j], material.youngs_modulus, section.area)
            .map_err(|_| {
                FeaError::Degenerate(GeometryError::Degenerate {
                    member: k,
                    i,
                    j,
                    length: geometry.member_length(k).as_f64(),
                })
            })?;
        let dofs = [
            dof_map.row(i, 0),
            dof_map.row(i, 1),
            dof_map.row(j, 0),
            dof_map.row(j, 1),
        ];
        for (p, rp) in dofs.iter().enumerate() {
            let Some(rp) = *rp else { continue };
            for (q, rq) in dofs.iter().enumerate() {
                if let Some(rq) = *rq {
                    matrix[(rp, rq)] = matrix[(rp, rq)] + ke[p][q];
                }
            }
        }
    }
    let mut load_vector = vec![T::zero(); n];
    for load in &geometry.loads {
        for (axis, f) in [(0, load.fx), (1, load.fy)] {
            if let Some(r) = dof_map.row(load.node, axis) {
                load_vector[r] = load_vector[r] + f;
            }
        }
    }
    Ok(StiffnessSystem {
        matrix,
        dof_map,
        load_vector,
    })
}

fn residual_norm<T: Scalar>(k: &Matrix<T>, u: &[T], f: &[T]) -> (Vec<T>, T) {
    let ku = k.mul_vec(u);
    let r: Vec<T> = f.iter().zip(&ku).map(|(&fi, &ki)| fi - ki).collect();
    let norm = r.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    (r, norm)
}

/// Solves `K·u = f` by Cholesky factorization with one refinement step.
pub fn solve_displacements<T: Scalar>(system: &StiffnessSystem<T>) -> Result<Vec<T>, FeaError> {
    let k = &system.matrix;
    let f = &system.load_vector;
    let chol = Cholesky::new(k, T::lit(PIVOT_TOLERANCE))?;
    let mut u = chol.solve(f);
    let (r, _) = residual_norm(k, &u, f);
    let du = chol.solve(&r);
    for (ui, di) in u.iter_mut().zip(du) {
        *ui = *ui + di;
    }
    let f_norm = f.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let (_, r_norm) = residual_norm(k, &u, f);
    let tol = T::lit(RESIDUAL_TOLERANCE).max(T::epsilon() * T::lit(1e4));
    if !(r_norm / f_norm.max(T::one()) <= tol) {
        return Err(FeaError::Singular(format!(
            "relative residual {} exceeds tolerance",
            (r_norm / f_norm.max(T::one())).as_f64()
        )));
    }
    Ok(u)
}

/// Axial forces `(EA/L)·[(uj−ui)·cos α + (vj−vi)·sin α]`, tension positive.
pub fn member_forces<T: Scalar>(
    geometry: &TrussGeometry<T>,
    displacements: &[[T; 2]],
    youngs_modulus: T,
    area: T,
) -> Vec<T> {
    geometry
        .members
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let length = geometry.member_length(k);
            let (c, s) = geometry.direction(k);
            let du = displacements[j][0] - displacements[i][0];
            let dv = displacements[j][1] - displacements[i][1];
            youngs_modulus * area / length * (du * c + dv * s)
        })
        .collect()
}

/// Support reaction along one axis (axis 0 = x, 1 = y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reaction<T> {
    pub node: usize,
    pub axis: usize,
    pub force: T,
}

/// Member forces and reactions from joint equilibrium alone.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSolution<T> {
    pub member_forces: Vec<T>,
    pub reactions: Vec<Reaction<T>>,
}

fn restrained_dofs<T: Scalar>(geometry: &TrussGeometry<T>) -> Vec<(usize, usize)> {
    let mut dofs = Vec::new();
    for n in 0..geometry.node_count() {
        for axis in 0..2 {
            if geometry.is_fixed(n, axis) {
                dofs.push((n, axis));
            }
        }
    }
    dofs
}

/// Solves the `2m × (n + r)` joint-equilibrium system of a statically
/// determinate truss. Independent of stiffness and section.
pub fn method_of_joints<T: Scalar>(geometry: &TrussGeometry<T>) -> Result<JointSolution<T>, FeaError> {
    let restrained = restrained_dofs(geometry);
    let m = geometry.node_count();
    let n = geometry.member_count();
    let unknowns = n + restrained.len();
    if unknowns != 2 * m {
        return Err(FeaError::Singular(format!(
            "not statically determinate: {unknowns} unknowns for {} equations",
            2 * m
        )));
    }
    geometry.check()?;
    let mut a = Matrix::zeros(2 * m, unknowns);
    for (k, &(i, j)) in geometry.members.iter().enumerate() {
        let (c, s) = geometry.direction(k);
        // tension pulls node i toward j and node j toward i
        a[(2 * i, k)] = c;
        a[(2 * i + 1, k)] = s;
        a[(2 * j, k)] = -c;
        a[(2 * j + 1, k)] = -s;
    }
    for (r, &(node, axis)) in restrained.iter().enumerate() {
        a[(2 * node + axis, n + r)] = T::one();
    }
    let mut rhs = vec![T::zero(); 2 * m];
    for load in &geometry.loads {
        rhs[2 * load.node] = rhs[2 * load.node] - load.fx;
        rhs[2 * load.node + 1] = rhs[2 * load.node + 1] - load.fy;
    }
    let x = lu_solve(&a, &rhs, T::lit(EQUILIBRIUM_PIVOT_TOLERANCE))?;
    let reactions = restrained
        .iter()
        .enumerate()
        .map(|(r, &(node, axis))| Reaction {
            node,
            axis,
            force: x[n + r],
        })
        .collect();
    Ok(JointSolution {
        member_forces: x[..n].to_vec(),
        reactions,
    })
}

/// Reactions implied by a set of member forces: whatever balances the
/// member pulls and external loads at each restrained degree of freedom.
pub fn support_reactions<T: Scalar>(geometry: &TrussGeometry<T>, forces: &[T]) -> Vec<Reaction<T>> {
    let imbalance = nodal_imbalance(geometry, forces, &[]);
    restrained_dofs(geometry)
        .into_iter()
        .map(|(node, axis)| Reaction {
            node,
            axis,
            force: T::zero() - imbalance[node][axis],
        })
        .collect()
}

/// Per-node sum of member pulls, external loads and the given reactions.
pub fn nodal_imbalance<T: Scalar>(
    geometry: &TrussGeometry<T>,
    forces: &[T],
    reactions: &[Reaction<T>],
) -> Vec<[T; 2]> {
    let mut sum = vec![[T::zero(); 2]; geometry.node_count()];
    for (k, &(i, j)) in geometry.members.iter().enumerate() {
        let (c, s) = geometry.direction(k);
        sum[i][0] = sum[i][0] + forces[k] * c;
        sum[i][1] = sum[i][1] + forces[k] * s;
        sum[j][0] = sum[j][0] - forces[k] * c;
        sum[j][1] = sum[j][1] - forces[k] * s;
    }
    for load in &geometry.loads {
        sum[load.node][0] = sum[load.node][0] + load.fx;
        sum[load.node][1] = sum[load.node][1] + load.fy;
    }
    for r in reactions {
        sum[r.node][r.axis] = sum[r.node][r.axis] + r.force;
    }
    sum
}

/// Outcome of one structural evaluation. Lengths in mm, forces in N, stresses in MPa.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaResult<T> {
    pub displacements: Vec<[T; 2]>,
    pub axial_forces: Vec<T>,
    pub axial_stresses: Vec<T>,
    pub reactions: Vec<Reaction<T>>,
    /// Largest |axial stress|, which for a uniaxial bar is its von Mises stress.
    /// Infinite when the analysis failed.
    pub max_abs_stress: T,
    pub mass: T,
    pub feasible: bool,
    pub failure_mode: FailureMode,
    pub geometry: TrussGeometry<T>,
}

/// Builds, loads and solves the reference truss for a design, mapping
/// degenerate and singular cases into an infeasible result.
pub fn analyze<T: Scalar>(
    design: &DerivedDesign<T>,
    material: &Material<T>,
    section: &Section<T>,
    total_load: T,
) -> FeaResult<T> {
    let layout = build_load_case(&reference_layout(design), total_load);
    let total_mass = mass(&layout, section, material);
    let failed = |mode| FeaResult {
        displacements: Vec::new(),
        axial_forces: Vec::new(),
        axial_stresses: Vec::new(),
        reactions: Vec::new(),
        max_abs_stress: T::infinity(),
        mass: total_mass,
        feasible: false,
        failure_mode: mode,
        geometry: layout.clone(),
    };
    if build_geometry(design).is_err() {
        return failed(FailureMode::DegenerateGeometry);
    }
    let system = match assemble(&layout, material, section) {
        Ok(s) => s,
        Err(FeaError::Degenerate(_)) => return failed(FailureMode::DegenerateGeometry),
        Err(FeaError::Singular(_)) => return failed(FailureMode::SingularSystem),
    };
    let u = match solve_displacements(&system) {
        Ok(u) => u,
        Err(_) => return failed(FailureMode::SingularSystem),
    };
    let displacements = system.expand(&u);
    let axial_forces = member_forces(&layout, &displacements, material.youngs_modulus, section.area);
    let axial_stresses: Vec<T> = axial_forces.iter().map(|&f| f / section.area).collect();
    let max_abs_stress = axial_stresses.iter().fold(T::zero(), |m, s| m.max(s.abs()));
    let feasible = max_abs_stress <= material.yield_strength;
    let reactions = support_reactions(&layout, &axial_forces);
    FeaResult {
        displacements,
        axial_forces,
        axial_stresses,
        reactions,
        max_abs_stress,
        mass: total_mass,
        feasible,
        failure_mode: if feasible {
            FailureMode::None
        } else {
            FailureMode::YieldExceeded
        },
        geometry: layout,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truss::{derive_design, DesignParams, PointLoad, Support};
    use approx::assert_relative_eq;

    const E: f64 = 70_000.0;
    const A: f64 = 500.0;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    #[test]
    fn horizontal_element_block() {
        let k = element_stiffness(p(0.0, 0.0), p(1000.0, 0.0), E, A).unwrap();
        assert_relative_eq!(k[0][0], 35_000.0);
        assert_relative_eq!(k[0][2], -35_000.0);
        assert_relative_eq!(k[2][2], 35_000.0);
        for j in 0..4 {
            assert_eq!(k[1][j], 0.0);
            assert_eq!(k[3][j], 0.0);
        }
    }

    #[test]
    fn vertical_element_block() {
        let k = element_stiffness(p(0.0, 0.0), p(0.0, 1000.0), E, A).unwrap();
        assert_relative_eq!(k[1][1], 35_000.0);
        assert_relative_eq!(k[1][3], -35_000.0);
        for j in 0..4 {
            assert!(k[0][j].abs() < 1e-9);
            assert!(k[2][j].abs() < 1e-9);
        }
    }

    #[test]
    fn diagonal_element_block() {
        let h = 1000.0 / 2f64.sqrt();
        let k = element_stiffness(p(0.0, 0.0), p(h, h), E, A).unwrap();
        for row in &k {
            for v in row {
                assert_relative_eq!(v.abs(), 17_500.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn zero_length_element_rejected() {
        assert!(matches!(
            element_stiffness(p(1.0, 1.0), p(1.0, 1.0), E, A),
            Err(FeaError::Degenerate(_))
        ));
    }

    fn single_bar(load: f64) -> TrussGeometry<f64> {
        let mut g = TrussGeometry::new(
            vec![p(0.0, 0.0), p(1000.0, 0.0)],
            vec![(0, 1)],
            vec![Support::pin(0), Support::roller_y(1)],
        )
        .unwrap();
        g.loads.push(PointLoad {
            node: 1,
            fx: load,
            fy: 0.0,
        });
        g
    }

    #[test]
    fn single_bar_assembly_is_free_quadrant() {
        let mut g = single_bar(0.0);
        g.supports = vec![Support::pin(0)];
        let sys = assemble(&g, &Material::al6061_t6(), &Section::new(A)).unwrap();
        assert_eq!(sys.matrix.rows(), 2);
        let ke = element_stiffness(p(0.0, 0.0), p(1000.0, 0.0), E, A).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(sys.matrix[(i, j)], ke[2 + i][2 + j]);
            }
        }
        assert!(sys.load_vector.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn single_bar_tip_displacement_and_force() {
        let g = single_bar(1000.0);
        let sys = assemble(&g, &Material::al6061_t6(), &Section::new(A)).unwrap();
        assert_eq!(sys.matrix.rows(), 1);
        let u = solve_displacements(&sys).unwrap();
        assert_relative_eq!(u[0], 1000.0 / 35_000.0, max_relative = 1e-12);
        let disp = sys.expand(&u);
        let f = member_forces(&g, &disp, E, A);
        assert_relative_eq!(f[0], 1000.0, max_relative = 1e-12);
        let zero = member_forces(&g, &[[0.0; 2]; 2], E, A);
        assert_eq!(zero, vec![0.0]);
    }

    #[test]
    fn zero_load_identity_system() {
        let sys = StiffnessSystem {
            matrix: Matrix::<f64>::identity(3),
            dof_map: DofMap {
                rows: vec![[Some(0), Some(1)], [Some(2), None]],
                free: 3,
            },
            load_vector: vec![0.0; 3],
        };
        assert_eq!(solve_displacements(&sys).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn mechanism_is_singular() {
        // three collinear nodes, middle one loaded sideways: no transverse stiffness
        let mut g = TrussGeometry::new(
            vec![p(0.0, 0.0), p(1000.0, 0.0), p(2000.0, 0.0)],
            vec![(0, 1), (1, 2)],
            vec![Support::pin(0), Support::pin(2)],
        )
        .unwrap();
        g.loads.push(PointLoad {
            node: 1,
            fx: 0.0,
            fy: -100.0,
        });
        let sys = assemble(&g, &Material::al6061_t6(), &Section::new(A)).unwrap();
        assert!(matches!(solve_displacements(&sys), Err(FeaError::Singular(_))));
    }

    fn two_bar(angle_deg: f64, load: f64) -> TrussGeometry<f64> {
        let half = 1000.0;
        let h = half * angle_deg.to_radians().tan();
        let mut g = TrussGeometry::new(
            vec![p(0.0, 0.0), p(2.0 * half, 0.0), p(half, h)],
            vec![(0, 2), (1, 2)],
            vec![Support::pin(0), Support::pin(1)],
        )
        .unwrap();
        g.loads.push(PointLoad {
            node: 2,
            fx: 0.0,
            fy: -load,
        });
        g
    }

    #[test]
    fn two_bar_joint_equilibrium() {
        let sol = method_of_joints(&two_bar(30.0, 1000.0)).unwrap();
        for f in &sol.member_forces {
            assert_relative_eq!(*f, -1000.0, max_relative = 1e-12);
        }
        let sol = method_of_joints(&two_bar(30.0, 0.0)).unwrap();
        assert!(sol.member_forces.iter().all(|f| f.abs() < 1e-12));
    }

    #[test]
    fn analyze_flat_design_fails_gracefully() {
        let d = derive_design(DesignParams::new(2000.0, 2000.0, 2000.0, 0.0, 0.0)).unwrap();
        let r = analyze(&d, &Material::al6061_t6(), &Section::default(), 12_000.0);
        assert!(!r.feasible);
        assert!(r.failure_mode.is_analysis_failure());
        assert!(r.mass > 0.0);
    }

    #[test]
    fn analyze_unloaded_design() {
        let d = derive_design(DesignParams::new(1500.0, 2000.0, 1800.0, 20.0, 35.0)).unwrap();
        let r = analyze(&d, &Material::al6061_t6(), &Section::default(), 0.0);
        assert!(r.feasible);
        assert_eq!(r.failure_mode, FailureMode::None);
        assert_eq!(r.max_abs_stress, 0.0);
    }

    #[test]
    fn analyze_reported_optimum_matches_joints() {
        let d = derive_design(DesignParams::new(1200.0, 2497.3, 2498.2, 42.0, 45.0)).unwrap();
        let r = analyze(&d, &Material::al6061_t6(), &Section::default(), 12_000.0);
        assert!(!r.failure_mode.is_analysis_failure());
        let oracle = method_of_joints(&r.geometry).unwrap();
        let scale = oracle.member_forces.iter().fold(1.0f64, |m, f: &f64| m.max(f.abs()));
        for (f, g) in r.axial_forces.iter().zip(&oracle.member_forces) {
            assert!((f - g).abs() <= 1e-6 * scale);
        }
        for (s, f) in r.axial_stresses.iter().zip(&r.axial_forces) {
            assert_eq!(*s, f / 500.0);
        }
    }

    #[test]
    fn reference_system_dimension_and_symmetry() {
        let d = derive_design(DesignParams::new(1500.0, 2000.0, 1800.0, 20.0, 35.0)).unwrap();
        let g = build_load_case(&build_geometry(&d).unwrap(), 12_000.0);
        let sys = assemble(&g, &Material::al6061_t6(), &Section::default()).unwrap();
        assert_eq!(sys.matrix.rows(), 13);
        assert!(sys.matrix.asymmetry() <= 1e-9);
    }

    #[test]
    fn f32_analysis_tracks_f64() {
        let d64 = derive_design(DesignParams::new(1500.0, 2000.0, 1800.0, 20.0, 35.0)).unwrap();
        let d32 = derive_design(DesignParams::new(1500.0f32, 2000.0, 1800.0, 20.0, 35.0)).unwrap();
        let r64 = analyze(&d64, &Material::al6061_t6(), &Section::default(), 12_000.0);
        let r32 = analyze(&d32, &Material::al6061_t6(), &Section::default(), 12_000.0f32);
        assert_eq!(r32.failure_mode, r64.failure_mode);
        assert_relative_eq!(f64::from(r32.max_abs_stress), r64.max_abs_stress, max_relative = 1e-3);
    }
}
