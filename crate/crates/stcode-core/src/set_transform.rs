//! Set allocation and pairwise coupling for one `alpha x beta` sub-array,
//! with `alpha <= beta < 2*alpha`.
//!
//! The construction runs in three steps.
//!
//! **Division.** Writing `a = 2*alpha - beta` (so `0 < a <= alpha`), the
//! array splits into four blocks: `A` (rows < a, cols < a), `B1` (rows < a,
//! cols >= a), `B2` (rows >= a, cols < a) and `C` (rows >= a, cols >= a).
//!
//! **Set allocation.** Every row is cut into `alpha` sets indexed by a
//! "set column" `j`: set `(i, j)` holds the single cell `(i, j)` when
//! `j < a`, and the adjacent pair `(i, 2j - a)`, `(i, 2j - a + 1)` when
//! `j >= a`. Singletons tile `A`/`B2`; doubletons tile `B1`/`C`.
//!
//! **Coupling.** Sets `(i, j)` and `(j, i)` with `i != j` are coupled by an
//! invertible linear mix using a coefficient `theta` outside {0, 1}; the
//! diagonal sets `(i, i)` stay untouched, so every stored column keeps one
//! pristine row — the row a repair later decodes. Three coupled shapes
//! occur, and each [`CouplingGroup`] records which one it is:
//!
//! * two singletons (`A` with `A`): `x_u = b_u + b_v`, `x_v = theta*b_u + b_v`;
//! * a doubleton and a singleton (`B1` with `B2`): the first doubleton cell
//!   absorbs the singleton (`x_1 = b_1 + b_3`), the second stays original
//!   (`x_2 = b_2`), and the singleton absorbs the doubleton's sum
//!   (`x_3 = theta*(b_1 + b_2) + b_3`);
//! * two doubletons (`C` with `C`): coupled component-wise like the
//!   singleton case, with a separate theta per component.

use crate::galois::{Field, Gf, GfMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Local cell coordinate inside one sub-array: `(row, column)`.
pub type Cell = (usize, usize);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("invalid sub-array shape {alpha}x{beta}: need alpha <= beta < 2*alpha")]
    Geometry { alpha: usize, beta: usize },
    #[error("coupling coefficient {0} is not allowed (must differ from 0 and 1)")]
    ThetaDomain(Gf),
    #[error("grid has {got} cells, expected {expected}")]
    GridShape { expected: usize, got: usize },
}

/// The block a set's cells fall into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    A,
    B1,
    B2,
    C,
}

/// Shape bookkeeping for one sub-array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubArrayGeometry {
    pub alpha: usize,
    pub beta: usize,
    /// Width of the singleton-set block: `2*alpha - beta`.
    pub a_cols: usize,
}

impl SubArrayGeometry {
    pub fn new(alpha: usize, beta: usize) -> Result<SubArrayGeometry, TransformError> {
        if alpha == 0 || beta < alpha || beta >= 2 * alpha {
            return Err(TransformError::Geometry { alpha, beta });
        }
        Ok(SubArrayGeometry {
            alpha,
            beta,
            a_cols: 2 * alpha - beta,
        })
    }

    /// Columns of set `(i, j)` for any row `i` (depends only on `j`).
    pub fn set_cols(&self, j: usize) -> Vec<usize> {
        debug_assert!(j < self.alpha);
        if j < self.a_cols {
            vec![j]
        } else {
            let first = 2 * j - self.a_cols;
            vec![first, first + 1]
        }
    }

    /// The set column whose cells include array column `col`.
    pub fn set_index_of_col(&self, col: usize) -> usize {
        debug_assert!(col < self.beta);
        if col < self.a_cols {
            col
        } else {
            (col + self.a_cols) / 2
        }
    }

    /// Region of set `(i, j)`.
    pub fn region(&self, i: usize, j: usize) -> Region {
        match (i < self.a_cols, j < self.a_cols) {
            (true, true) => Region::A,
            (true, false) => Region::B1,
            (false, true) => Region::B2,
            (false, false) => Region::C,
        }
    }
}

/// Full set allocation: the cell list of every set `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetAllocation {
    pub geometry: SubArrayGeometry,
    /// Indexed by `i * alpha + j`.
    sets: Vec<Vec<Cell>>,
}

impl SetAllocation {
    pub fn cells(&self, i: usize, j: usize) -> &[Cell] {
        &self.sets[i * self.geometry.alpha + j]
    }
}

/// Allocates every row of an `alpha x beta` array into `alpha` sets.
pub fn allocate_sets(alpha: usize, beta: usize) -> Result<SetAllocation, TransformError> {
    let geometry = SubArrayGeometry::new(alpha, beta)?;
    let mut sets = Vec::with_capacity(alpha * alpha);
    for i in 0..alpha {
        for j in 0..alpha {
            sets.push(
                geometry
                    .set_cols(j)
                    .into_iter()
                    .map(|c| (i, c))
                    .collect::<Vec<_>>(),
            );
        }
    }
    Ok(SetAllocation { geometry, sets })
}

/// How a group's cells mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    /// Diagonal set: stored symbols equal the underlying symbols.
    Identity,
    /// Two coupled cells `[u, v]`: `x_u = b_u + b_v`, `x_v = theta*b_u + b_v`.
    Pair,
    /// Three coupled cells `[c1, c2, c3]` (doubleton first/second, then the
    /// singleton): `x_1 = b_1 + b_3`, `x_2 = b_2`,
    /// `x_3 = theta*(b_1 + b_2) + b_3`.
    Triple,
}

/// One independently invertible unit of the transform.
///
/// Cell order is canonical (documented on [`GroupKind`]), so a serialized
/// plan is byte-stable for a given `(alpha, beta)` and theta stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingGroup {
    pub kind: GroupKind,
    pub cells: Vec<Cell>,
    /// `None` exactly for [`GroupKind::Identity`].
    pub theta: Option<Gf>,
}

impl CouplingGroup {
    /// The linear map from underlying to stored symbols, in cell order.
    /// `None` for identity groups.
    pub fn forward_matrix(&self) -> Option<GfMatrix> {
        let theta = self.theta?;
        Some(match self.kind {
            GroupKind::Identity => unreachable!("identity groups carry no theta"),
            GroupKind::Pair => GfMatrix::from_rows(&[
                vec![Gf::ONE, Gf::ONE],
                vec![theta, Gf::ONE],
            ]),
            GroupKind::Triple => GfMatrix::from_rows(&[
                vec![Gf::ONE, Gf::ZERO, Gf::ONE],
                vec![Gf::ZERO, Gf::ONE, Gf::ZERO],
                vec![theta, theta, Gf::ONE],
            ]),
        })
    }

    /// Cells whose stored symbol equals the underlying symbol.
    pub fn original_cells(&self) -> &[Cell] {
        match self.kind {
            GroupKind::Identity => &self.cells,
            GroupKind::Pair => &[],
            GroupKind::Triple => &self.cells[1..2],
        }
    }
}

/// The complete transform of one sub-array: a partition of all cells into
/// identity, pair and triple groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingPlan {
    pub geometry: SubArrayGeometry,
    pub groups: Vec<CouplingGroup>,
    /// Group index of every cell, indexed `row * beta + col`.
    cell_group: Vec<usize>,
}

impl CouplingPlan {
    pub fn alpha(&self) -> usize {
        self.geometry.alpha
    }

    pub fn beta(&self) -> usize {
        self.geometry.beta
    }

    /// The group containing local cell `(row, col)`.
    pub fn group_of(&self, row: usize, col: usize) -> &CouplingGroup {
        &self.groups[self.cell_group[row * self.geometry.beta + col]]
    }

    pub fn count(&self, kind: GroupKind) -> usize {
        self.groups.iter().filter(|g| g.kind == kind).count()
    }
}

/// Builds the coupling plan for an `alpha x beta` sub-array, drawing one
/// coefficient per coupled pair (and one per component for doubleton pairs)
/// from `theta_source`.
///
/// Group emission order is canonical: the `alpha` diagonal groups first,
/// then the groups of each unordered set pair `(i, j)`, `i < j`, row-major.
/// Coefficients equal to 0 or 1 are rejected — they would make a group
/// singular or collapse two symbols.
pub fn build_plan(
    alpha: usize,
    beta: usize,
    mut theta_source: impl FnMut() -> Gf,
) -> Result<CouplingPlan, TransformError> {
    let geometry = SubArrayGeometry::new(alpha, beta)?;
    let a = geometry.a_cols;
    let mut groups: Vec<CouplingGroup> = Vec::new();
    let mut draw = move || -> Result<Gf, TransformError> {
        let t = theta_source();
        if t == Gf::ZERO || t == Gf::ONE {
            return Err(TransformError::ThetaDomain(t));
        }
        Ok(t)
    };

    for i in 0..alpha {
        groups.push(CouplingGroup {
            kind: GroupKind::Identity,
            cells: geometry.set_cols(i).into_iter().map(|c| (i, c)).collect(),
            theta: None,
        });
    }
    for i in 0..alpha {
        for j in i + 1..alpha {
            if j < a {
                // two singletons: upper cell (i, j), lower cell (j, i)
                groups.push(CouplingGroup {
                    kind: GroupKind::Pair,
                    cells: vec![(i, j), (j, i)],
                    theta: Some(draw()?),
                });
            } else if i < a {
                // doubleton (i, *) with singleton (j, i)
                let first = 2 * j - a;
                groups.push(CouplingGroup {
                    kind: GroupKind::Triple,
                    cells: vec![(i, first), (i, first + 1), (j, i)],
                    theta: Some(draw()?),
                });
            } else {
                // two doubletons, coupled component-wise
                let up = 2 * j - a;
                let lo = 2 * i - a;
                for comp in 0..2 {
                    groups.push(CouplingGroup {
                        kind: GroupKind::Pair,
                        cells: vec![(i, up + comp), (j, lo + comp)],
                        theta: Some(draw()?),
                    });
                }
            }
        }
    }

    let mut cell_group = vec![usize::MAX; alpha * beta];
    for (gi, g) in groups.iter().enumerate() {
        for &(r, c) in &g.cells {
            let slot = &mut cell_group[r * beta + c];
            assert_eq!(*slot, usize::MAX, "cell ({r},{c}) assigned twice");
            *slot = gi;
        }
    }
    assert!(
        cell_group.iter().all(|&g| g != usize::MAX),
        "every cell must belong to exactly one group"
    );

    Ok(CouplingPlan {
        geometry,
        groups,
        cell_group,
    })
}

fn check_shape(plan: &CouplingPlan, grid: &[Gf]) -> Result<(), TransformError> {
    let expected = plan.alpha() * plan.beta();
    if grid.len() != expected {
        return Err(TransformError::GridShape {
            expected,
            got: grid.len(),
        });
    }
    Ok(())
}

/// Applies the transform to a row-major `alpha x beta` grid of underlying
/// symbols, producing the stored grid.
pub fn apply_transform(
    field: &Field,
    plan: &CouplingPlan,
    grid: &[Gf],
) -> Result<Vec<Gf>, TransformError> {
    check_shape(plan, grid)?;
    let beta = plan.beta();
    let at = |&(r, c): &Cell| grid[r * beta + c];
    let mut out = grid.to_vec();
    for g in &plan.groups {
        match g.kind {
            GroupKind::Identity => {}
            GroupKind::Pair => {
                let (u, v) = (g.cells[0], g.cells[1]);
                let theta = g.theta.unwrap();
                out[u.0 * beta + u.1] = at(&u) + at(&v);
                out[v.0 * beta + v.1] = field.mul(theta, at(&u)) + at(&v);
            }
            GroupKind::Triple => {
                let (c1, c2, c3) = (g.cells[0], g.cells[1], g.cells[2]);
                let theta = g.theta.unwrap();
                out[c1.0 * beta + c1.1] = at(&c1) + at(&c3);
                // c2 keeps its original value
                out[c3.0 * beta + c3.1] = field.mul(theta, at(&c1) + at(&c2)) + at(&c3);
            }
        }
    }
    Ok(out)
}

/// Inverts [`apply_transform`]: recovers the underlying grid from the stored
/// grid by solving each group's small linear system.
pub fn invert_transform(
    field: &Field,
    plan: &CouplingPlan,
    grid: &[Gf],
) -> Result<Vec<Gf>, TransformError> {
    check_shape(plan, grid)?;
    let beta = plan.beta();
    let mut out = grid.to_vec();
    for g in &plan.groups {
        let Some(m) = g.forward_matrix() else {
            continue;
        };
        let rhs: Vec<Gf> = g.cells.iter().map(|&(r, c)| grid[r * beta + c]).collect();
        let solved = m
            .solve(field, &rhs)
            .expect("theta outside {0,1} keeps every group invertible");
        for (&(r, c), v) in g.cells.iter().zip(solved) {
            out[r * beta + c] = v;
        }
    }
    Ok(out)
}

/// Splits a wide array (`beta >= 2*alpha`) into transformable pieces: square
/// `alpha x alpha` blocks plus, when `alpha` does not divide `beta`, one
/// final `alpha x (alpha + beta mod alpha)` block.
pub fn split_wide(alpha: usize, beta: usize) -> Vec<(usize, usize)> {
    assert!(alpha >= 1 && beta >= 2 * alpha, "use build_plan directly");
    let rem = beta % alpha;
    if rem == 0 {
        vec![(alpha, alpha); beta / alpha]
    } else {
        let squares = beta / alpha - 1;
        let mut out = vec![(alpha, alpha); squares];
        out.push((alpha, alpha + rem));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::FieldSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf8() -> Field {
        Field::new(FieldSpec::gf8()).unwrap()
    }

    fn theta_stream(seed: u64, q: u32) -> impl FnMut() -> Gf {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        move || Gf(rng.gen_range(2..q) as u16)
    }

    /// All geometries exercised by the sweep tests.
    fn sweep() -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for alpha in 1..=5 {
            for beta in alpha..2 * alpha {
                v.push((alpha, beta));
            }
        }
        v
    }

    #[test]
    fn geometry_validation() {
        assert!(SubArrayGeometry::new(3, 2).is_err());
        assert!(SubArrayGeometry::new(3, 6).is_err());
        assert!(SubArrayGeometry::new(0, 0).is_err());
        let g = SubArrayGeometry::new(3, 4).unwrap();
        assert_eq!(g.a_cols, 2);
    }

    #[test]
    fn set_allocation_3x4_frozen() {
        let alloc = allocate_sets(3, 4).unwrap();
        // singleton sets in the first two set columns
        assert_eq!(alloc.cells(0, 0), &[(0, 0)]);
        assert_eq!(alloc.cells(2, 1), &[(2, 1)]);
        // doubleton sets pair the last two array columns
        assert_eq!(alloc.cells(1, 2), &[(1, 2), (1, 3)]);
        assert_eq!(alloc.cells(2, 2), &[(2, 2), (2, 3)]);
    }

    #[test]
    fn sets_tile_each_row() {
        for (alpha, beta) in sweep() {
            let alloc = allocate_sets(alpha, beta).unwrap();
            for i in 0..alpha {
                let mut seen = vec![false; beta];
                for j in 0..alpha {
                    for &(r, c) in alloc.cells(i, j) {
                        assert_eq!(r, i);
                        assert!(!seen[c], "column {c} covered twice in row {i}");
                        seen[c] = true;
                    }
                }
                assert!(seen.iter().all(|&s| s), "{alpha}x{beta} row {i} not tiled");
            }
        }
    }

    #[test]
    fn region_classification_3x4() {
        let g = SubArrayGeometry::new(3, 4).unwrap();
        assert_eq!(g.region(0, 1), Region::A);
        assert_eq!(g.region(1, 2), Region::B1);
        assert_eq!(g.region(2, 0), Region::B2);
        assert_eq!(g.region(2, 2), Region::C);
    }

    #[test]
    fn set_index_of_col_matches_set_cols() {
        for (alpha, beta) in sweep() {
            let g = SubArrayGeometry::new(alpha, beta).unwrap();
            for j in 0..alpha {
                for c in g.set_cols(j) {
                    assert_eq!(g.set_index_of_col(c), j, "{alpha}x{beta} col {c}");
                }
            }
        }
    }

    #[test]
    fn group_counts_match_closed_forms() {
        for (alpha, beta) in sweep() {
            let plan = build_plan(alpha, beta, theta_stream(1, 256)).unwrap();
            let a = 2 * alpha - beta;
            let d = beta - alpha;
            let choose2 = |x: usize| x * x.saturating_sub(1) / 2;
            assert_eq!(plan.count(GroupKind::Pair), choose2(a) + 2 * choose2(d));
            assert_eq!(plan.count(GroupKind::Triple), a * d);
            assert_eq!(plan.count(GroupKind::Identity), alpha);
            let cells: usize = plan.groups.iter().map(|g| g.cells.len()).sum();
            assert_eq!(cells, alpha * beta, "{alpha}x{beta} cell coverage");
        }
    }

    #[test]
    fn plan_3x4_frozen_shape() {
        let plan = build_plan(3, 4, theta_stream(2, 256)).unwrap();
        assert_eq!(plan.count(GroupKind::Pair), 1);
        assert_eq!(plan.count(GroupKind::Triple), 2);
        assert_eq!(plan.count(GroupKind::Identity), 3);
        // the lone pair couples A cells (0,1) and (1,0)
        let pair = plan
            .groups
            .iter()
            .find(|g| g.kind == GroupKind::Pair)
            .unwrap();
        assert_eq!(pair.cells, vec![(0, 1), (1, 0)]);
        // triples: B1 doubleton of row i with B2 singleton (2, i)
        let triples: Vec<_> = plan
            .groups
            .iter()
            .filter(|g| g.kind == GroupKind::Triple)
            .collect();
        assert_eq!(triples[0].cells, vec![(0, 2), (0, 3), (2, 0)]);
        assert_eq!(triples[1].cells, vec![(1, 2), (1, 3), (2, 1)]);
    }

    #[test]
    fn square_plan_has_no_triples() {
        for alpha in 1..=5 {
            let plan = build_plan(alpha, alpha, theta_stream(3, 256)).unwrap();
            assert_eq!(plan.count(GroupKind::Triple), 0);
            assert_eq!(plan.count(GroupKind::Pair), alpha * (alpha - 1) / 2);
            assert!(plan.groups.iter().all(|g| g.cells.len() <= 2));
        }
    }

    #[test]
    fn theta_domain_enforced() {
        // 3x3 draws three coefficients; the bad one is mid-stream
        let mut vals = vec![Gf(5), Gf(1), Gf(7)].into_iter();
        let err = build_plan(3, 3, move || vals.next().unwrap());
        assert!(matches!(err, Err(TransformError::ThetaDomain(Gf(1)))));
        let mut zeros = std::iter::repeat(Gf(0));
        assert!(matches!(
            build_plan(3, 3, move || zeros.next().unwrap()),
            Err(TransformError::ThetaDomain(Gf(0)))
        ));
    }

    /// Independent re-derivation of the stored grid straight from the
    /// region rules, reading the plan only for its coefficients.
    fn oracle_apply(field: &Field, plan: &CouplingPlan, grid: &[Gf]) -> Vec<Gf> {
        let (alpha, beta, a) = (plan.alpha(), plan.beta(), plan.geometry.a_cols);
        let at = |r: usize, c: usize| grid[r * beta + c];
        let theta_of = |r: usize, c: usize| {
            let g = plan.group_of(r, c);
            g.theta.expect("coupled cell")
        };
        let mut out = grid.to_vec();
        for i in 0..alpha {
            for j in 0..alpha {
                if i == j {
                    continue;
                }
                if i < a && j < a {
                    // A with A: the smaller-row cell takes a plain sum, the
                    // larger-row cell takes a theta-weighted sum.
                    out[i * beta + j] = if i < j {
                        at(i, j) + at(j, i)
                    } else {
                        at(i, j) + field.mul(theta_of(i, j), at(j, i))
                    };
                } else if i < a {
                    // B1 doubleton of set (i, j): first cell absorbs the B2
                    // singleton, second stays original.
                    let c = 2 * j - a;
                    out[i * beta + c] = at(i, c) + at(j, i);
                } else if j < a {
                    // B2 singleton of set (i, j) absorbs its doubleton's sum.
                    let c = 2 * i - a;
                    out[i * beta + j] =
                        at(i, j) + field.mul(theta_of(i, j), at(j, c) + at(j, c + 1));
                } else {
                    // C with C, component-wise.
                    let up = 2 * j - a;
                    let lo = 2 * i - a;
                    for comp in 0..2 {
                        out[i * beta + up + comp] = if i < j {
                            at(i, up + comp) + at(j, lo + comp)
                        } else {
                            at(i, up + comp)
                                + field.mul(theta_of(i, up + comp), at(j, lo + comp))
                        };
                    }
                }
            }
        }
        out
    }

    #[test]
    fn apply_matches_region_rule_oracle() {
        let f = gf8();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (alpha, beta) in sweep() {
            let plan = build_plan(alpha, beta, theta_stream(100 + alpha as u64, 256)).unwrap();
            for _ in 0..20 {
                let grid: Vec<Gf> = (0..alpha * beta)
                    .map(|_| Gf(rng.gen_range(0..256)))
                    .collect();
                let via_groups = apply_transform(&f, &plan, &grid).unwrap();
                let via_rules = oracle_apply(&f, &plan, &grid);
                assert_eq!(via_groups, via_rules, "{alpha}x{beta}");
            }
        }
    }

    #[test]
    fn round_trip_all_geometries_both_fields() {
        for spec in [FieldSpec::gf8(), FieldSpec::gf16()] {
            let f = Field::new(spec).unwrap();
            let q = spec.order() as u32;
            let mut rng = ChaCha8Rng::seed_from_u64(32);
            for (alpha, beta) in sweep() {
                let plan = build_plan(alpha, beta, theta_stream(7, q)).unwrap();
                for _ in 0..10 {
                    let grid: Vec<Gf> = (0..alpha * beta)
                        .map(|_| Gf(rng.gen_range(0..q) as u16))
                        .collect();
                    let stored = apply_transform(&f, &plan, &grid).unwrap();
                    let back = invert_transform(&f, &plan, &stored).unwrap();
                    assert_eq!(back, grid, "{alpha}x{beta} w={}", spec.w);
                }
            }
        }
    }

    #[test]
    fn transform_is_linear() {
        let f = gf8();
        let plan = build_plan(4, 6, theta_stream(8, 256)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let x: Vec<Gf> = (0..24).map(|_| Gf(rng.gen_range(0..256))).collect();
            let y: Vec<Gf> = (0..24).map(|_| Gf(rng.gen_range(0..256))).collect();
            let sum: Vec<Gf> = x.iter().zip(&y).map(|(&a, &b)| a + b).collect();
            let tx = apply_transform(&f, &plan, &x).unwrap();
            let ty = apply_transform(&f, &plan, &y).unwrap();
            let tsum = apply_transform(&f, &plan, &sum).unwrap();
            let expect: Vec<Gf> = tx.iter().zip(&ty).map(|(&a, &b)| a + b).collect();
            assert_eq!(tsum, expect);
        }
    }

    #[test]
    fn original_cell_census_per_row() {
        for (alpha, beta) in sweep() {
            let plan = build_plan(alpha, beta, theta_stream(9, 256)).unwrap();
            let a = 2 * alpha - beta;
            for row in 0..alpha {
                let diag: usize = plan
                    .groups
                    .iter()
                    .filter(|g| g.kind == GroupKind::Identity)
                    .flat_map(|g| g.cells.iter())
                    .filter(|&&(r, _)| r == row)
                    .count();
                assert_eq!(diag, if row < a { 1 } else { 2 }, "{alpha}x{beta} row {row}");
                let kept_in_triples: usize = plan
                    .groups
                    .iter()
                    .filter(|g| g.kind == GroupKind::Triple)
                    .map(|g| g.cells[1])
                    .filter(|&(r, _)| r == row)
                    .count();
                let want = if row < a { beta - alpha } else { 0 };
                assert_eq!(kept_in_triples, want, "{alpha}x{beta} row {row}");
            }
        }
    }

    #[test]
    fn identity_and_kept_cells_store_plaintext() {
        let f = gf8();
        let plan = build_plan(3, 5, theta_stream(10, 256)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let grid: Vec<Gf> = (0..15).map(|_| Gf(rng.gen_range(0..256))).collect();
        let stored = apply_transform(&f, &plan, &grid).unwrap();
        for g in &plan.groups {
            for &(r, c) in g.original_cells() {
                assert_eq!(stored[r * 5 + c], grid[r * 5 + c], "cell ({r},{c})");
            }
        }
    }

    #[test]
    fn split_wide_frozen() {
        assert_eq!(split_wide(3, 10), vec![(3, 3), (3, 3), (3, 4)]);
        assert_eq!(split_wide(2, 4), vec![(2, 2), (2, 2)]);
        assert_eq!(split_wide(3, 7), vec![(3, 3), (3, 4)]);
        assert_eq!(split_wide(4, 8), vec![(4, 4), (4, 4)]);
        for (alpha, beta) in [(2, 4), (3, 7), (3, 10), (4, 9), (5, 23)] {
            let pieces = split_wide(alpha, beta);
            assert_eq!(pieces.iter().map(|p| p.1).sum::<usize>(), beta);
            for (a, b) in pieces {
                assert_eq!(a, alpha);
                assert!(SubArrayGeometry::new(a, b).is_ok());
            }
        }
    }

    #[test]
    fn grid_shape_checked() {
        let f = gf8();
        let plan = build_plan(3, 4, theta_stream(11, 256)).unwrap();
        let short = vec![Gf(0); 5];
        assert_eq!(
            apply_transform(&f, &plan, &short).unwrap_err(),
            TransformError::GridShape {
                expected: 12,
                got: 5
            }
        );
    }
}
