//! Graded group automorphisms induced by linear maps of the horizontal
//! layer.
//!
//! In the free group every invertible map `L` of `span{X1,X2}` extends
//! uniquely to a bracket-compatible graded automorphism; in the Engel group
//! the extension exists only when `L` fixes the `X2` axis up to scale.

use num_traits::Zero;

use crate::group::{bracket_coords, exp_c2, lie_bracket, log_c2, AlgebraVector, Group, GroupPoint};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// A graded automorphism, stored as the `dim x dim` matrix of its
/// differential in the basis `X_1 .. X_dim` (column `j` is the image of
/// `X_{j+1}`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismSpec {
    group: Group,
    horizontal: [[Scalar; 2]; 2],
    matrix: Vec<Vec<Scalar>>,
}

impl AutomorphismSpec {
    pub fn group(&self) -> Group {
        self.group
    }

    /// The inducing horizontal map; `horizontal()[i][j]` is row `i`,
    /// column `j`, so column `j` holds the image of `X_{j+1}`.
    pub fn horizontal(&self) -> &[[Scalar; 2]; 2] {
        &self.horizontal
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.matrix
    }

    /// Image of an algebra vector under the differential.
    pub fn apply_vector(&self, u: &AlgebraVector) -> Result<AlgebraVector> {
        if u.group() != self.group {
            return Err(Error::GroupMismatch {
                left: self.group,
                right: u.group(),
            });
        }
        let dim = self.group.dimension();
        let mut out = vec![Scalar::zero(); dim];
        for (j, c) in u.components().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o = &*o + &(&self.matrix[i][j] * c);
            }
        }
        self.group.vector(out)
    }

    /// Image of a group point: `exp_c2(A log_c2(x))`.
    pub fn apply_point(&self, x: &GroupPoint) -> Result<GroupPoint> {
        if x.group() != self.group {
            return Err(Error::GroupMismatch {
                left: self.group,
                right: x.group(),
            });
        }
        Ok(exp_c2(&self.apply_vector(&log_c2(x))?))
    }

    /// Checks `A[u,v] = [Au, Av]` over the whole basis. This holds by
    /// construction; the method exists so experiments can assert it.
    pub fn preserves_brackets(&self) -> bool {
        let dim = self.group.dimension();
        let cols: Vec<Vec<Scalar>> = (0..dim)
            .map(|j| (0..dim).map(|i| self.matrix[i][j].clone()).collect())
            .collect();
        for i in 0..dim {
            for j in 0..dim {
                let mut eij = vec![Scalar::zero(); dim];
                eij[i] = crate::scalar::int(1);
                let mut ejj = vec![Scalar::zero(); dim];
                ejj[j] = crate::scalar::int(1);
                let br = bracket_coords(self.group, &eij, &ejj);
                // A [Xi, Xj]
                let mut lhs = vec![Scalar::zero(); dim];
                for (k, c) in br.iter().enumerate() {
                    for (r, l) in lhs.iter_mut().enumerate() {
                        *l = &*l + &(&self.matrix[r][k] * c);
                    }
                }
                let rhs = bracket_coords(self.group, &cols[i], &cols[j]);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Checks that column `j` only touches coordinates of the same layer
    /// weight as `j`.
    pub fn preserves_layers(&self) -> bool {
        let w = self.group.weights();
        let dim = self.group.dimension();
        (0..dim).all(|j| (0..dim).all(|i| w[i] == w[j] || self.matrix[i][j].is_zero()))
    }
}

/// Extends an invertible horizontal map `L` (given row-major: `l[i][j]` is
/// the `X_{i+1}` component of the image of `X_{j+1}`) to a graded
/// automorphism.
///
/// For the free group the extension is
/// `Y3 = [Y2,Y1]`, `Y4 = [Y3,Y1]`, `Y5 = [Y3,Y2]`. For Engel it exists
/// only when `L(X2)` is a nonzero multiple of `X2`.
pub fn free_automorphism(l: [[Scalar; 2]; 2], group: Group) -> Result<AutomorphismSpec> {
    let det = &(&l[0][0] * &l[1][1]) - &(&l[0][1] * &l[1][0]);
    if det.is_zero() {
        return Err(Error::SingularMap);
    }
    let dim = group.dimension();
    let y1 = group.horizontal(l[0][0].clone(), l[1][0].clone());
    let y2 = group.horizontal(l[0][1].clone(), l[1][1].clone());
    let columns: Vec<AlgebraVector> = match group {
        Group::F23 => {
            let y3 = lie_bracket(&y2, &y1)?;
            let y4 = lie_bracket(&y3, &y1)?;
            let y5 = lie_bracket(&y3, &y2)?;
            vec![y1, y2, y3, y4, y5]
        }
        Group::Engel => {
            // a graded automorphism of Engel must fix the X2 axis up to scale
            if !l[0][1].is_zero() {
                return Err(Error::UnsupportedDirection(
                    "an Engel automorphism must map X2 into span{X2}".into(),
                ));
            }
            let y3 = lie_bracket(&y1, &y2)?;
            let y4 = lie_bracket(&y1, &y3)?;
            vec![y1, y2, y3, y4]
        }
    };
    let matrix: Vec<Vec<Scalar>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| columns[j].components()[i].clone())
                .collect()
        })
        .collect();
    Ok(AutomorphismSpec {
        group,
        horizontal: l,
        matrix,
    })
}

/// Rotation of the horizontal layer taking `X2` to the exact unit vector
/// `e = (e1, e2)`; requires `e1^2 + e2^2 = 1`.
pub fn rotation_to(group: Group, e1: &Scalar, e2: &Scalar) -> Result<AutomorphismSpec> {
    let one: Scalar = crate::scalar::int(1);
    if &(e1 * e1) + &(e2 * e2) != one {
        return Err(Error::NotUnit);
    }
    // columns: X1 -> (e2, -e1), X2 -> (e1, e2); determinant exactly 1
    free_automorphism([[e2.clone(), e1.clone()], [-e1.clone(), e2.clone()]], group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;

    fn id2() -> [[Scalar; 2]; 2] {
        [[int(1), int(0)], [int(0), int(1)]]
    }

    #[test]
    fn identity_extends_to_identity() {
        for g in [Group::F23, Group::Engel] {
            let a = free_automorphism(id2(), g).unwrap();
            for i in 0..g.dimension() {
                for j in 0..g.dimension() {
                    let expect = if i == j { int(1) } else { int(0) };
                    assert_eq!(a.matrix()[i][j], expect);
                }
            }
        }
    }

    #[test]
    fn quarter_turn_table() {
        // X1 -> X2, X2 -> -X1 maps (X3,X4,X5) -> (X3, X5, -X4)
        let l = [[int(0), int(-1)], [int(1), int(0)]];
        let a = free_automorphism(l, Group::F23).unwrap();
        let g = Group::F23;
        let images: Vec<AlgebraVector> = (0..5)
            .map(|j| a.apply_vector(&g.basis(j, int(1))).unwrap())
            .collect();
        assert_eq!(images[0], g.basis(1, int(1)));
        assert_eq!(images[1], g.basis(0, int(-1)));
        assert_eq!(images[2], g.basis(2, int(1)));
        assert_eq!(images[3], g.basis(4, int(1)));
        assert_eq!(images[4], g.basis(3, int(-1)));
    }

    #[test]
    fn singular_map_rejected() {
        let l = [[int(1), int(2)], [int(2), int(4)]];
        assert!(matches!(
            free_automorphism(l, Group::F23),
            Err(Error::SingularMap)
        ));
    }

    #[test]
    fn engel_axis_restriction() {
        // diag(1, b) is accepted
        let l = [[int(1), int(0)], [int(0), rat(3, 7)]];
        let a = free_automorphism(l, Group::Engel).unwrap();
        assert!(a.preserves_brackets());
        assert!(a.preserves_layers());
        // anything moving X2 off its axis is not
        let bad = [[int(1), int(1)], [int(0), int(1)]];
        assert!(matches!(
            free_automorphism(bad, Group::Engel),
            Err(Error::UnsupportedDirection(_))
        ));
    }

    #[test]
    fn rotation_to_unit_vector() {
        let a = rotation_to(Group::F23, &rat(3, 5), &rat(4, 5)).unwrap();
        let e2_image = a.apply_vector(&Group::F23.basis(1, int(1))).unwrap();
        assert_eq!(e2_image.components()[0], rat(3, 5));
        assert_eq!(e2_image.components()[1], rat(4, 5));
        assert!(rotation_to(Group::F23, &int(1), &int(1)).is_err());
    }

    fn arb_invertible() -> impl Strategy<Value = [[Scalar; 2]; 2]> {
        (-6i64..=6, -6i64..=6, -6i64..=6, -6i64..=6)
            .prop_map(|(a, b, c, d)| [[rat(a, 2), rat(b, 3)], [rat(c, 3), rat(d, 2)]])
            .prop_filter("invertible", |l| {
                !(&(&l[0][0] * &l[1][1]) - &(&l[0][1] * &l[1][0])).is_zero()
            })
    }

    fn arb_point() -> impl Strategy<Value = GroupPoint> {
        proptest::collection::vec((-20i64..=20, 1i64..=8).prop_map(|(n, d)| rat(n, d)), 5)
            .prop_map(|v| Group::F23.point(v).unwrap())
    }

    proptest! {
        #[test]
        fn bracket_and_layer_preservation(l in arb_invertible()) {
            let a = free_automorphism(l, Group::F23).unwrap();
            prop_assert!(a.preserves_brackets());
            prop_assert!(a.preserves_layers());
        }

        #[test]
        fn homomorphism_law(l in arb_invertible(), x in arb_point(), y in arb_point()) {
            let a = free_automorphism(l, Group::F23).unwrap();
            let lhs = a.apply_point(&x.mul(&y).unwrap()).unwrap();
            let rhs = a.apply_point(&x).unwrap().mul(&a.apply_point(&y).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn commutes_with_dilations(l in arb_invertible(), x in arb_point(), n in 1i64..=9) {
            let a = free_automorphism(l, Group::F23).unwrap();
            let lam = rat(n, 4);
            let lhs = a.apply_point(&x.dilate(&lam).unwrap()).unwrap();
            let rhs = a.apply_point(&x).unwrap().dilate(&lam).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn identity_application_is_identity() {
        let a = free_automorphism(id2(), Group::F23).unwrap();
        let x = Group::F23
            .point(vec![int(1), int(2), rat(-1, 3), int(0), rat(5, 2)])
            .unwrap();
        assert_eq!(a.apply_point(&x).unwrap(), x);
    }
}
