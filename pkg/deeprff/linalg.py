"""Fourier design matrices and Tikhonov-regularized least squares.

Complex features e^{i w.x} are stored as real column pairs
[cos(w.x), -sin(w.x)], so a complex amplitude a + ib enters as the real
pair (a, b) and contributes a*cos - b*sin = Re((a + ib) e^{i w.x}).
"""
import numpy as np
import scipy.linalg

__all__ = [
    'RidgeProblem', 'assemble_design_x', 'assemble_design_resid',
    'solve_ridge', 'to_complex', 'from_complex', 'ridge_objective',
    'ridge_gradient',
]


def _as_rows(values, name):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim != 2:
        raise ValueError('{} must be a sequence of vectors'.format(name))
    return values


def _feature_pairs(phase):
    design = np.empty((phase.shape[0], 2 * phase.shape[1]))
    design[:, 0::2] = np.cos(phase)
    design[:, 1::2] = -np.sin(phase)
    return design


def assemble_design_x(points, frequencies):
    """Return the N x 2K real design matrix of e^{i w_k . x_n}.

    >>> assemble_design_x([[0.0]], [[0.0]]).tolist()
    [[1.0, -0.0]]
    """
    points = _as_rows(points, 'points')
    frequencies = _as_rows(frequencies, 'frequencies')
    if frequencies.shape[0] and points.shape[1] != frequencies.shape[1]:
        raise ValueError(
            'dimension mismatch: points in R^{}, frequencies in R^{}'.format(
                points.shape[1], frequencies.shape[1]))
    return _feature_pairs(points @ frequencies.T)


def assemble_design_resid(points, states, freq_x, freq_z):
    """Design matrix of a residual block: x-features then z-features."""
    points = _as_rows(points, 'points')
    states = np.asarray(states, dtype=float).ravel()
    freq_z = np.asarray(freq_z, dtype=float).ravel()
    if states.shape[0] != points.shape[0]:
        raise ValueError('got {} points but {} states'.format(
            points.shape[0], states.shape[0]))
    design_x = assemble_design_x(points, freq_x)
    design_z = _feature_pairs(np.outer(states, freq_z))
    return np.hstack([design_x, design_z])


class RidgeProblem:
    def __init__(self, design, targets, tikhonov=0.0):
        self.design = np.asarray(design, dtype=float)
        self.targets = np.asarray(targets, dtype=float).ravel()
        self.tikhonov = float(tikhonov)
        if self.design.ndim != 2:
            raise ValueError('design must be a matrix')
        if self.tikhonov < 0 or not np.isfinite(self.tikhonov):
            raise ValueError('tikhonov must be non-negative')
        if self.targets.shape[0] != self.design.shape[0]:
            raise ValueError('got {} targets for {} design rows'.format(
                self.targets.shape[0], self.design.shape[0]))

    @property
    def scale(self):
        return self.design.shape[0]


def solve_ridge(problem):
    """Minimize N^-1 |S b - y|^2 + tikhonov |b|^2 over real vectors b.

    The penalty enters as sqrt(N tikhonov) I rows appended to S. The
    augmented system goes to a complete orthogonal factorization (QR with
    column pivoting), which yields the minimum-norm solution when the
    design is rank deficient.
    """
    design, targets = problem.design, problem.targets
    n, cols = design.shape
    if cols == 0:
        return np.zeros(0)
    if problem.tikhonov > 0:
        weight = np.sqrt(n * problem.tikhonov)
        design = np.vstack([design, weight * np.eye(cols)])
        targets = np.concatenate([targets, np.zeros(cols)])
    coef, _, _, _ = scipy.linalg.lstsq(
        design, targets, lapack_driver='gelsy', check_finite=True)
    return coef


def to_complex(coef):
    coef = np.asarray(coef, dtype=float)
    return coef[0::2] + 1j * coef[1::2]


def from_complex(amplitudes):
    amplitudes = np.asarray(amplitudes, dtype=complex)
    coef = np.empty(2 * amplitudes.shape[0])
    coef[0::2] = amplitudes.real
    coef[1::2] = amplitudes.imag
    return coef


def ridge_objective(problem, coef):
    residual = problem.design @ coef - problem.targets
    return residual @ residual / problem.scale + problem.tikhonov * coef @ coef


def ridge_gradient(problem, coef):
    residual = problem.design @ coef - problem.targets
    return (2 * problem.design.T @ residual / problem.scale
            + 2 * problem.tikhonov * coef)
