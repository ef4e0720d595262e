//! Direct sums of truncations with integer-spaced lowest weights.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::SpectralFunction;

use super::{ModuleTruncation, OperatorMatrix};

/// Tolerance on the fractional part of `h_j − h_{j′}`.
pub const SPACING_TOL: f64 = 1e-9;

fn check_blocks(blocks: &[ModuleTruncation]) -> Result<()> {
    let first =
        blocks.first().ok_or_else(|| Error::InvalidArgument("direct sum needs at least one block".into()))?.weight();
    for b in &blocks[1..] {
        let w = b.weight();
        if (w.c - first.c).abs() > 1e-12 {
            return Err(Error::CentralChargeMismatch(first.c, w.c));
        }
        let gap = w.h - first.h;
        if (gap - gap.round()).abs() > SPACING_TOL {
            return Err(Error::NonIntegerSpacing(first.h, w.h));
        }
    }
    Ok(())
}

fn block_diagonal(parts: Vec<OperatorMatrix>) -> OperatorMatrix {
    let dim: usize = parts.iter().map(OperatorMatrix::dim).sum();
    let mut out = DMatrix::zeros(dim, dim);
    let mut levels = Vec::with_capacity(dim);
    let mut at = 0;
    for p in parts {
        out.view_mut((at, at), (p.dim(), p.dim())).copy_from(p.entries());
        at += p.dim();
        levels.extend_from_slice(p.levels());
    }
    OperatorMatrix::new(out, levels)
}

/// Block-diagonal `T(f)` over blocks sharing `c` with integer-spaced `h`.
pub fn direct_sum(blocks: &[ModuleTruncation], f: &SpectralFunction) -> Result<OperatorMatrix> {
    check_blocks(blocks)?;
    Ok(block_diagonal(blocks.iter().map(|b| b.t_matrix(f)).collect::<Result<_>>()?))
}

/// `‖e^{2πiL₀^⊕} − e^{2πih₁}·I‖_F`; zero exactly when the rotation by `2π` acts
/// as a scalar on the direct sum.
pub fn rotation_2pi_scalar_defect(blocks: &[ModuleTruncation]) -> Result<f64> {
    check_blocks(blocks)?;
    rotation_2pi_scalar_defect_unchecked(blocks)
}

/// Same as [`rotation_2pi_scalar_defect`] without the spacing precondition.
pub fn rotation_2pi_scalar_defect_unchecked(blocks: &[ModuleTruncation]) -> Result<f64> {
    let first = blocks.first().ok_or_else(|| Error::InvalidArgument("direct sum needs at least one block".into()))?;
    let one = SpectralFunction::constant(1.0);
    let rot = block_diagonal(blocks.iter().map(|b| b.exp_t(&one, TAU)).collect::<Result<_>>()?);
    let scalar = Complex64::cis(TAU * first.weight().h);
    let target = OperatorMatrix::new(DMatrix::identity(rot.dim(), rot.dim()) * scalar, rot.levels().to_vec());
    Ok(rot.distance(&target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::virasoro::LowestWeight;

    fn block(h: f64) -> ModuleTruncation {
        ModuleTruncation::build(LowestWeight::new(1.0, h), 4, true).unwrap()
    }

    #[test]
    fn integer_spacing_is_scalar() {
        let blocks: Vec<_> = [0.5, 1.5, 2.5].into_iter().map(block).collect();
        assert!(rotation_2pi_scalar_defect(&blocks).unwrap() < 1e-10);
        assert!(rotation_2pi_scalar_defect(&blocks[..1]).unwrap() < 1e-10);
    }

    #[test]
    fn fractional_spacing_rejected() {
        let blocks = vec![block(0.5), block(0.75)];
        assert!(matches!(rotation_2pi_scalar_defect(&blocks), Err(Error::NonIntegerSpacing(..))));
        assert!(direct_sum(&blocks, &SpectralFunction::cos(1)).is_err());
        let other_c = ModuleTruncation::build(LowestWeight::new(2.0, 0.5), 2, true).unwrap();
        assert!(matches!(
            direct_sum(&[block(0.5), other_c], &SpectralFunction::cos(1)),
            Err(Error::CentralChargeMismatch(..))
        ));
    }

    #[test]
    fn bypass_defect_closed_form() {
        let blocks = vec![block(0.0), block(1.0 / 3.0)];
        let d = rotation_2pi_scalar_defect_unchecked(&blocks).unwrap();
        let expected = (Complex64::cis(TAU / 3.0) - 1.0).norm() * (blocks[1].dim() as f64).sqrt();
        assert!((d - expected).abs() < 1e-10);
    }

    #[test]
    fn single_block_sum_is_t_matrix() {
        let b = block(0.5);
        let f = SpectralFunction::from_trig(&[0.1, 0.2], &[0.0, 0.3]);
        assert_eq!(direct_sum(std::slice::from_ref(&b), &f).unwrap(), b.t_matrix(&f).unwrap());
    }
}
