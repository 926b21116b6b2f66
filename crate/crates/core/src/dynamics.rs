//! Energy, gradient flow and Euler integration of a bistable gradient network.
//!
//! Each neuron sits in the double-well potential `-x²/2 + x⁴/4` and is
//! linearly coupled to the others through a symmetric, zero-diagonal weight
//! matrix. The state follows the negative energy gradient
//!
//! ```text
//! dx_i/dt = (x_i - x_i³) + Σ_j w_ij x_j
//! ```
//!
//! so with valid weights every trajectory slides downhill into a fixed point.

use crate::error::{ensure_dims, Error, Result};
use crate::patterns::BipolarPattern;

/// Continuous neuron outputs. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Largest absolute entry; zero for an empty state.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl From<&BipolarPattern> for StateVector {
    fn from(pattern: &BipolarPattern) -> Self {
        Self(pattern.values().iter().map(|&v| f64::from(v)).collect())
    }
}

/// Symmetric coupling matrix with an exactly zero diagonal.
///
/// Stored row-major. Every constructor either builds the matrix so the
/// invariants hold by construction or checks them exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl WeightMatrix {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            entries: vec![0.0; size * size],
        }
    }

    /// Wraps a row-major buffer, rejecting it unless it is already exactly
    /// symmetric, zero on the diagonal and finite.
    pub fn from_row_major(size: usize, entries: Vec<f64>) -> Result<Self> {
        ensure_dims(size * size, entries.len())?;
        for i in 0..size {
            let d = entries[i * size + i];
            if d != 0.0 {
                return Err(Error::InvalidWeights(format!(
                    "w[{i}][{i}] = {d}, expected 0"
                )));
            }
            for j in 0..size {
                let w = entries[i * size + j];
                if !w.is_finite() {
                    return Err(Error::InvalidWeights(format!("w[{i}][{j}] is not finite")));
                }
                if j > i && w != entries[j * size + i] {
                    return Err(Error::InvalidWeights(format!(
                        "w[{i}][{j}] = {w} differs from w[{j}][{i}] = {}",
                        entries[j * size + i]
                    )));
                }
            }
        }
        Ok(Self { size, entries })
    }

    /// Builds a matrix from nested rows, with the same checks as
    /// [`WeightMatrix::from_row_major`].
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != size) {
            return Err(Error::NotSquare {
                rows: size,
                cols: bad.len(),
            });
        }
        Self::from_row_major(size, rows.concat())
    }

    /// Constructor for code paths that establish the invariants themselves.
    pub(crate) fn from_trusted(size: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), size * size);
        Self { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `W x`
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|i| self.row(i).iter().zip(x).map(|(w, v)| w * v).sum())
            .collect()
    }
}

/// Parameters for Euler relaxation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub step_size: f64,
    pub max_steps: usize,
    /// Relaxation stops once the max-norm of the drift falls below this.
    /// Zero disables early stopping.
    pub convergence_tol: f64,
    pub snapshot_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            max_steps: 25,
            convergence_tol: 1e-6,
            snapshot_stride: 5,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "step_size",
                reason: format!("must be positive, got {}", self.step_size),
            });
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "max_steps",
                reason: "must be at least 1".into(),
            });
        }
        if self.convergence_tol.is_nan() || self.convergence_tol < 0.0 {
            return Err(Error::InvalidParameter {
                name: "convergence_tol",
                reason: format!("must be non-negative, got {}", self.convergence_tol),
            });
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParameter {
                name: "snapshot_stride",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub bistable: f64,
    pub couple: f64,
    pub total: f64,
}

/// Evaluates the network energy: double-well terms summed over neurons plus
/// `-½ Σ_i Σ_j w_ij x_i x_j` over all ordered pairs.
pub fn energy(state: &StateVector, weights: &WeightMatrix) -> Result<EnergyBreakdown> {
    ensure_dims(weights.size(), state.len())?;
    let x = state.as_slice();
    let bistable: f64 = x.iter().map(|&v| -0.5 * v * v + 0.25 * v.powi(4)).sum();
    let wx = weights.apply(x);
    let couple = -0.5 * x.iter().zip(&wx).map(|(a, b)| a * b).sum::<f64>();
    Ok(EnergyBreakdown {
        bistable,
        couple,
        total: bistable + couple,
    })
}

fn drift_raw(x: &[f64], weights: &WeightMatrix) -> Vec<f64> {
    let mut field = weights.apply(x);
    for (f, &v) in field.iter_mut().zip(x) {
        *f += v - v * v * v;
    }
    field
}

/// Time derivative of the state, `-∂V/∂x`.
pub fn drift(state: &StateVector, weights: &WeightMatrix) -> Result<StateVector> {
    ensure_dims(weights.size(), state.len())?;
    StateVector::new(drift_raw(state.as_slice(), weights))
}

/// One explicit Euler step `x + dt · drift(x)`.
pub fn euler_step(state: &StateVector, weights: &WeightMatrix, dt: f64) -> Result<StateVector> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be positive, got {dt}"),
        });
    }
    ensure_dims(weights.size(), state.len())?;
    let x = state.as_slice();
    let next = drift_raw(x, weights)
        .into_iter()
        .zip(x)
        .map(|(d, v)| v + dt * d)
        .collect();
    StateVector::new(next)
}

/// A recorded state along a relaxation trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub state: StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    pub final_state: StateVector,
    /// The initial state, every `snapshot_stride`-th step and the final state,
    /// in step order without duplicates.
    pub trajectory: Vec<Snapshot>,
    pub converged: bool,
    /// Number of Euler steps actually taken.
    pub steps: usize,
}

/// Integrates the dynamics until the drift max-norm drops below the
/// tolerance or the step budget runs out.
///
/// Fails with [`Error::Diverged`] if the state leaves the finite range, which
/// happens when the coupling is too strong for the chosen step size.
pub fn relax(
    initial: &StateVector,
    weights: &WeightMatrix,
    cfg: &IntegratorConfig,
) -> Result<Relaxation> {
    cfg.validate()?;
    ensure_dims(weights.size(), initial.len())?;

    let dt = cfg.step_size;
    let mut x = initial.as_slice().to_vec();
    let mut trajectory = vec![Snapshot {
        step: 0,
        state: initial.clone(),
    }];
    let mut converged = false;
    let mut steps = 0;

    loop {
        let d = drift_raw(&x, weights);
        let norm = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm < cfg.convergence_tol {
            converged = true;
            break;
        }
        if steps == cfg.max_steps {
            break;
        }
        for (v, dv) in x.iter_mut().zip(&d) {
            *v += dt * dv;
        }
        steps += 1;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { step: steps });
        }
        if steps % cfg.snapshot_stride == 0 {
            trajectory.push(Snapshot {
                step: steps,
                state: StateVector(x.clone()),
            });
        }
    }

    let final_state = StateVector(x);
    if trajectory.last().map(|s| s.step) != Some(steps) {
        trajectory.push(Snapshot {
            step: steps,
            state: final_state.clone(),
        });
    }
    Ok(Relaxation {
        final_state,
        trajectory,
        converged,
        steps,
    })
}

/// Maps each neuron to active (+1) or inactive (-1) by sign. Exactly zero
/// counts as active.
pub fn binarize(state: &StateVector) -> BipolarPattern {
    BipolarPattern::from_signs(state.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(rows: &[&[f64]]) -> WeightMatrix {
        WeightMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn s(v: &[f64]) -> StateVector {
        StateVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&s(&[0.0]), &w(&[&[0.0]])).unwrap().total, 0.0);
        assert_eq!(energy(&s(&[1.0]), &w(&[&[0.0]])).unwrap().total, -0.25);
        let e = energy(&s(&[1.0, 1.0]), &w(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert_eq!(e.bistable, -0.5);
        assert_eq!(e.couple, -1.0);
        assert_eq!(e.total, -1.5);
        assert_eq!(e.total, e.bistable + e.couple);
    }

    #[test]
    fn energy_dimension_mismatch() {
        let err = energy(&s(&[1.0, 2.0]), &w(&[&[0.0]])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn drift_examples() {
        let zero = w(&[&[0.0]]);
        assert_eq!(drift(&s(&[1.0]), &zero).unwrap(), s(&[0.0]));
        assert_eq!(drift(&s(&[-1.0]), &zero).unwrap(), s(&[0.0]));
        assert_eq!(drift(&s(&[0.5]), &zero).unwrap(), s(&[0.375]));
        let neg = w(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        assert_eq!(drift(&s(&[1.0, 1.0]), &neg).unwrap(), s(&[-1.0, -1.0]));
        assert!(drift(&s(&[1.0]), &neg).is_err());
    }

    #[test]
    fn euler_step_examples() {
        let zero = w(&[&[0.0]]);
        assert_eq!(euler_step(&s(&[1.0]), &zero, 0.1).unwrap(), s(&[1.0]));
        assert_eq!(euler_step(&s(&[0.5]), &zero, 0.1).unwrap(), s(&[0.5375]));
        let neg = w(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        let next = euler_step(&s(&[1.0, 1.0]), &neg, 0.1).unwrap();
        for v in next.as_slice() {
            assert!((v - 0.9).abs() < 1e-15);
        }
    }

    #[test]
    fn euler_step_rejects_bad_dt() {
        let zero = w(&[&[0.0]]);
        assert!(matches!(
            euler_step(&s(&[1.0]), &zero, 0.0),
            Err(Error::InvalidParameter { name: "dt", .. })
        ));
        assert!(euler_step(&s(&[1.0]), &zero, -0.1).is_err());
    }

    #[test]
    fn relax_to_sqrt_two() {
        let pos = w(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let cfg = IntegratorConfig {
            max_steps: 10_000,
            convergence_tol: 1e-12,
            ..Default::default()
        };
        let r = relax(&s(&[1.0, 1.0]), &pos, &cfg).unwrap();
        assert!(r.converged);
        for v in r.final_state.as_slice() {
            assert!((v - 2f64.sqrt()).abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn relax_pulls_weak_neuron_up() {
        let pos = w(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let cfg = IntegratorConfig {
            max_steps: 1000,
            ..Default::default()
        };
        let r = relax(&s(&[0.9, -0.1]), &pos, &cfg).unwrap();
        assert_eq!(binarize(&r.final_state).values(), &[1, 1]);
    }

    #[test]
    fn relax_from_bipolar_with_zero_weights_is_immediate() {
        let zero = WeightMatrix::zeros(4);
        let x0 = s(&[1.0, -1.0, -1.0, 1.0]);
        let r = relax(&x0, &zero, &IntegratorConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.steps, 0);
        assert_eq!(r.final_state, x0);
        assert_eq!(r.trajectory.len(), 1);
    }

    #[test]
    fn trajectory_has_stride_snapshots() {
        let zero = WeightMatrix::zeros(2);
        let cfg = IntegratorConfig {
            convergence_tol: 0.0,
            ..Default::default()
        };
        let r = relax(&s(&[0.3, -0.2]), &zero, &cfg).unwrap();
        let steps: Vec<_> = r.trajectory.iter().map(|t| t.step).collect();
        assert_eq!(steps, vec![0, 5, 10, 15, 20, 25]);
        assert!(!r.converged);
        assert_eq!(r.trajectory.last().unwrap().state, r.final_state);

        let cfg = IntegratorConfig {
            max_steps: 7,
            ..cfg
        };
        let r = relax(&s(&[0.3, -0.2]), &zero, &cfg).unwrap();
        let steps: Vec<_> = r.trajectory.iter().map(|t| t.step).collect();
        assert_eq!(steps, vec![0, 5, 7]);
    }

    #[test]
    fn relax_reports_divergence() {
        let strong = w(&[&[0.0, 1000.0], &[1000.0, 0.0]]);
        let cfg = IntegratorConfig {
            max_steps: 100,
            ..Default::default()
        };
        assert!(matches!(
            relax(&s(&[1.0, 1.0]), &strong, &cfg),
            Err(Error::Diverged { .. })
        ));
    }

    #[test]
    fn binarize_examples() {
        assert_eq!(binarize(&s(&[1.414, -0.98])).values(), &[1, -1]);
        assert_eq!(binarize(&s(&[0.0])).values(), &[1]);
        assert_eq!(binarize(&s(&[-0.001, 0.001])).values(), &[-1, 1]);
    }

    #[test]
    fn weight_matrix_rejects_invalid() {
        assert!(WeightMatrix::from_rows(&[vec![1.0]]).is_err());
        assert!(WeightMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(matches!(
            WeightMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0]]),
            Err(Error::NotSquare { .. })
        ));
        assert!(WeightMatrix::from_rows(&[vec![0.0, f64::NAN], vec![f64::NAN, 0.0]]).is_err());
    }

    #[test]
    fn state_rejects_non_finite() {
        assert_eq!(
            StateVector::new(vec![0.0, f64::INFINITY]),
            Err(Error::NonFinite { index: 1 })
        );
    }
}
