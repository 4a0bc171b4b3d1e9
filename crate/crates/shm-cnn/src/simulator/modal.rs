//! Undamped modal analysis of the lumped-mass chain.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::simulator::{StructureParams, DOF};

/// Mass and stiffness matrices of a ground-anchored spring-mass chain.
/// `springs[0]` connects mass 0 to ground, `springs[i]` connects mass `i-1`
/// to mass `i`.
pub fn chain_matrices(masses: &[f64], springs: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    assert_eq!(masses.len(), springs.len(), "one spring per mass in a chain");
    let n = masses.len();
    let mass = DMatrix::from_diagonal(&DVector::from_row_slice(masses));
    let mut stiffness = DMatrix::zeros(n, n);
    for i in 0..n {
        stiffness[(i, i)] += springs[i];
        if i + 1 < n {
            stiffness[(i, i)] += springs[i + 1];
            stiffness[(i, i + 1)] -= springs[i + 1];
            stiffness[(i + 1, i)] -= springs[i + 1];
        }
    }
    (mass, stiffness)
}

/// Natural frequencies (Hz, ascending) of `K phi = w^2 M phi` for a chain
/// with diagonal mass. Solved as the symmetric standard problem on
/// `M^-1/2 K M^-1/2`.
pub fn chain_frequencies(masses: &[f64], springs: &[f64]) -> Result<Vec<f64>> {
    Ok(chain_modes(masses, springs)?.0)
}

fn chain_modes(masses: &[f64], springs: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if masses.iter().any(|m| !(*m > 0.0)) {
        return Err(Error::Config("mass matrix is not positive definite".into()));
    }
    let (_, stiffness) = chain_matrices(masses, springs);
    let n = masses.len();
    let inv_sqrt_m = DVector::from_iterator(n, masses.iter().map(|m| 1.0 / m.sqrt()));
    let mut reduced = stiffness;
    for i in 0..n {
        for j in 0..n {
            reduced[(i, j)] *= inv_sqrt_m[i] * inv_sqrt_m[j];
        }
    }
    let eigen = nalgebra::SymmetricEigen::new(reduced);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .partial_cmp(&eigen.eigenvalues[b])
            .unwrap()
    });

    let mut freqs = Vec::with_capacity(n);
    let mut shapes = DMatrix::zeros(n, n);
    for (col, &idx) in order.iter().enumerate() {
        let lambda = eigen.eigenvalues[idx];
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Config(format!(
                "stiffness matrix is not positive definite (eigenvalue {lambda})"
            )));
        }
        freqs.push(lambda.sqrt() / (2.0 * std::f64::consts::PI));
        // Back-transform to physical mode shapes: phi = M^-1/2 psi.
        for i in 0..n {
            shapes[(i, col)] = eigen.eigenvectors[(i, idx)] * inv_sqrt_m[i];
        }
    }
    Ok((freqs, shapes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalResult {
    /// Natural frequencies in Hz, ascending.
    pub frequencies_hz: Vec<f64>,
    /// Mode shapes as columns, same ordering as the frequencies.
    pub mode_shapes: DMatrix<f64>,
}

/// Undamped natural frequencies and mode shapes of the linearized structure
/// (bumper ignored).
pub fn modal_analysis(params: &StructureParams) -> Result<ModalResult> {
    params.validate()?;
    let (frequencies_hz, mode_shapes) = chain_modes(&params.masses, &params.spring_chain())?;
    Ok(ModalResult {
        frequencies_hz,
        mode_shapes,
    })
}

/// Per-state natural frequencies and shifts relative to state 1, as CSV
/// text: `state,f1_hz,f2_hz,f3_hz,f4_hz,shift1_hz,...,shift4_hz`.
pub fn modal_report(base: &StructureParams) -> Result<String> {
    use std::fmt::Write as _;
    let baseline = modal_analysis(&crate::simulator::build_params(
        crate::simulator::state_by_id(1)?,
        base,
    ))?;
    let mut out = String::from("state,f1_hz,f2_hz,f3_hz,f4_hz,shift1_hz,shift2_hz,shift3_hz,shift4_hz\n");
    for state in crate::simulator::state_catalogue() {
        let modal = modal_analysis(&crate::simulator::build_params(state, base))?;
        let _ = write!(out, "{}", state.id);
        for f in &modal.frequencies_hz {
            let _ = write!(out, ",{f}");
        }
        for (f, f0) in modal.frequencies_hz.iter().zip(&baseline.frequencies_hz) {
            let _ = write!(out, ",{}", f - f0);
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{build_params, calibrate_baseline, state_by_id, state_catalogue};

    #[test]
    fn two_dof_uniform_chain_matches_closed_form() {
        // m = 1, k = 1 chain: w^2 = (3 +- sqrt(5)) / 2.
        let freqs = chain_frequencies(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        let w_sq: Vec<f64> = freqs
            .iter()
            .map(|f| (2.0 * std::f64::consts::PI * f).powi(2))
            .collect();
        let expected_low = (3.0 - 5.0_f64.sqrt()) / 2.0;
        let expected_high = (3.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((w_sq[0] - expected_low).abs() < 1e-12, "{w_sq:?}");
        assert!((w_sq[1] - expected_high).abs() < 1e-12, "{w_sq:?}");
    }

    #[test]
    fn doubling_stiffness_scales_frequencies_by_sqrt_two() {
        let masses = [2.0, 3.0, 1.5, 2.5];
        let springs = [100.0, 250.0, 175.0, 300.0];
        let base = chain_frequencies(&masses, &springs).unwrap();
        let doubled: Vec<f64> = springs.iter().map(|k| 2.0 * k).collect();
        let scaled = chain_frequencies(&masses, &doubled).unwrap();
        for (f, g) in base.iter().zip(&scaled) {
            assert!((g / f - 2.0_f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenpairs_satisfy_the_generalized_problem() {
        // Independent residual check: K phi = w^2 M phi for every mode.
        let params = calibrate_baseline();
        let modal = modal_analysis(&params).unwrap();
        let (mass, stiffness) = chain_matrices(&params.masses, &params.spring_chain());
        for mode in 0..DOF {
            let shape = modal.mode_shapes.column(mode);
            let w = 2.0 * std::f64::consts::PI * modal.frequencies_hz[mode];
            let residual = &stiffness * shape - &mass * shape * (w * w);
            let scale = (&stiffness * shape).norm();
            assert!(
                residual.norm() / scale < 1e-10,
                "mode {mode} residual {}",
                residual.norm() / scale
            );
        }
    }

    #[test]
    fn reducing_any_story_never_raises_any_frequency() {
        let base = calibrate_baseline();
        let baseline = modal_analysis(&base).unwrap().frequencies_hz;
        for state in state_catalogue() {
            if state.stiffness_scale == [1.0, 1.0, 1.0] {
                continue;
            }
            let reduced = modal_analysis(&build_params(state, &base))
                .unwrap()
                .frequencies_hz;
            for (f_red, f_base) in reduced.iter().zip(&baseline) {
                assert!(
                    f_red <= &(f_base + 1e-9),
                    "state {}: {f_red} > {f_base}",
                    state.id
                );
            }
        }
    }

    #[test]
    fn mass_and_stiffness_states_shift_frequencies() {
        let base = calibrate_baseline();
        let baseline = modal_analysis(&base).unwrap().frequencies_hz;
        for id in 2..=9u8 {
            let modal = modal_analysis(&build_params(state_by_id(id).unwrap(), &base)).unwrap();
            let max_shift = modal
                .frequencies_hz
                .iter()
                .zip(&baseline)
                .map(|(f, f0)| (f - f0).abs())
                .fold(0.0, f64::max);
            assert!(max_shift > 0.01, "state {id} shifted only {max_shift} Hz");
        }
    }

    #[test]
    fn report_covers_all_states_with_zero_shift_for_state_one() {
        let report = modal_report(&calibrate_baseline()).unwrap();
        let lines: Vec<&str> = report.lines().collect();
        assert_eq!(lines.len(), 18);
        let state1: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(state1[0], "1");
        for shift in &state1[5..9] {
            assert_eq!(*shift, "0");
        }
    }

    #[test]
    fn nonpositive_mass_is_rejected() {
        assert!(chain_frequencies(&[1.0, -1.0], &[1.0, 1.0]).is_err());
    }
}
