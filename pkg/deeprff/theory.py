"""Numerical checks of the approximation theory behind residual networks.

Every integral runs on a truncated grid with trapezoidal quadrature. The
mollifier h is truncated to |z| <= H_SUPPORT, where it is below 1e-50.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp, trapezoid
from scipy.interpolate import PchipInterpolator
from scipy.stats import chisquare

__all__ = [
    'DensitySpec', 'CheckReport', 'BoundConstants', 'TimeDependentDensities',
    'mc_moments', 'mc_moments_check', 'optimal_density', 'optimal_control_check',
    'h_eval', 'h_prime', 'hhat', 'hhat_derivative', 'identity_lipschitz',
    'derivative_density', 'bound_constants', 'constant_density_bound',
    'time_dependent_bound', 'bang_bang_check', 'stratified_times',
    'time_dependent_densities', 'remark_regime_check', 'run_all',
]

logger = logging.getLogger(__name__)

H_SUPPORT = 12.0
H_POINTS = 12001
OMEGA_RADIUS = 40.0
CHUNK = 128


class DensitySpec:
    """A probability density on a one-dimensional grid.

    Values are rescaled to unit trapezoidal mass; between grid points the
    density is linear, outside the grid it is zero.
    """

    def __init__(self, grid, values):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.shape[0] < 2:
            raise ValueError('grid and values must be matching 1-d arrays')
        if np.any(np.diff(grid) <= 0):
            raise ValueError('grid must be strictly increasing')
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError('density values must be finite and non-negative')
        mass = trapezoid(values, grid)
        if not mass > 0:
            raise ValueError('density has zero mass')
        self.grid = grid
        self.values = values / mass

    @classmethod
    def from_function(cls, fn, lo, hi, points=2001):
        grid = np.linspace(lo, hi, points)
        return cls(grid, np.abs(fn(grid)))

    @classmethod
    def uniform(cls, lo=0.0, hi=1.0, points=2001):
        return cls(np.linspace(lo, hi, points), np.ones(points))

    @property
    def mass(self):
        return float(trapezoid(self.values, self.grid))

    def integrate(self, values):
        return float(trapezoid(values, self.grid))

    def pdf(self, points):
        return np.interp(points, self.grid, self.values, left=0.0, right=0.0)

    def cdf_values(self):
        cdf = cumulative_trapezoid(self.values, self.grid, initial=0.0)
        return cdf / cdf[-1]

    @cached_property
    def _inverse(self):
        cdf = self.cdf_values()
        if np.any(np.diff(cdf) < 0):
            raise ValueError('cumulative distribution is not monotone')
        # last point of every flat run
        keep = np.append(np.diff(cdf) > 0, True)
        if keep.sum() < 2:
            raise ValueError('cumulative distribution is not monotone')
        return PchipInterpolator(cdf[keep], self.grid[keep])

    def inverse_cdf(self, u):
        return self._inverse(np.clip(u, 0.0, 1.0))

    def sample(self, size, rng):
        return self.inverse_cdf(rng.random(size))


@dataclass
class CheckReport:
    name: str
    passed: bool
    values: dict = field(default_factory=dict)

    def format(self):
        status = 'PASS' if self.passed else 'FAIL'
        details = ', '.join('{}={:.6g}'.format(key, value)
                            for key, value in self.values.items())
        return '{} {}: {}'.format(status, self.name, details)


def _values_on(fn, grid):
    return fn(grid) if callable(fn) else np.asarray(fn, dtype=float)


def _check_support(numerator, density, what):
    if np.any((numerator != 0) & (density == 0)):
        raise ValueError('{}: density vanishes where the integrand does not'
                         .format(what))


def _safe_ratio(numerator, density):
    out = np.zeros_like(numerator, dtype=float)
    mask = numerator != 0
    out[mask] = numerator[mask] / density[mask]
    return out


def mc_moments(a, p, J):
    """Closed-form moments of the J-sample estimator of the integral of a.

    Returns the integral, the variance and the fourth central moment
    together with the two-term form J^-2 var^2 + J^-3 mu_4.
    """
    values = _values_on(a, p.grid)
    _check_support(values, p.values, 'mc_moments')
    integral = p.integrate(values)
    second = p.integrate(_safe_ratio(values ** 2, p.values))
    sigma2 = max(second - integral ** 2, 0.0)
    ratio = _safe_ratio(values, p.values)
    mu4 = p.integrate((ratio - integral) ** 4 * p.values)
    return {
        'integral': integral,
        'variance': sigma2 / J,
        'fourth': (3 * (J - 1) * sigma2 ** 2 + mu4) / J ** 3,
        'fourth_bound': sigma2 ** 2 / J ** 2 + mu4 / J ** 3,
    }


def mc_moments_check(a, p, J, replications, seed, sigmas=5.0):
    """Compare replicated J-sample estimators with the closed forms."""
    if J < 1 or replications < 2:
        raise ValueError('need J >= 1 and at least 2 replications')
    exact = mc_moments(a, p, J)
    rng = np.random.default_rng(seed)
    omega = p.sample((replications, J), rng)
    estimates = np.mean(_values_on(a, omega) / p.pdf(omega), axis=1)
    mean = float(estimates.mean())
    variance = float(estimates.var(ddof=1))
    centred = estimates - exact['integral']
    fourth = float(np.mean(centred ** 4))
    se_mean = np.sqrt(variance / replications)
    se_variance = np.sqrt(max(fourth - variance ** 2, 0.0) / replications)
    tol = 1e-12 * max(1.0, abs(exact['integral']))
    passed = (abs(mean - exact['integral']) <= sigmas * se_mean + tol and
              abs(variance - exact['variance']) <= sigmas * se_variance + tol)
    return CheckReport('monte carlo moments (J={})'.format(J), bool(passed), {
        'mean': mean, 'integral': exact['integral'],
        'variance': variance, 'exact_variance': exact['variance'],
        'fourth': fourth, 'exact_fourth': exact['fourth'],
        'se_mean': float(se_mean), 'se_variance': float(se_variance),
    })


def _spread_objective(spec, g):
    return spec.integrate(_safe_ratio(g ** 2, spec.values))


def optimal_density(grid, g, perturbations=20, magnitudes=(0.01, 0.05, 0.1,
                    0.2, 0.5), seed=0):
    """Return p = |g| / int |g| and check that perturbing it never helps.

    The returned report carries the objective int |g|^2 / p at the optimum
    and the smallest increase seen over the perturbed densities.
    """
    grid = np.asarray(grid, dtype=float)
    g = np.abs(_values_on(g, grid))
    if not np.any(g > 0):
        raise ValueError('g vanishes identically')
    best = DensitySpec(grid, g)
    optimum = _spread_objective(best, g)
    rng = np.random.default_rng(seed)
    span = grid[-1] - grid[0]
    margin = np.inf
    for _ in range(perturbations):
        freqs = rng.integers(1, 6, size=3)
        weights = rng.standard_normal(3)
        direction = np.cos(np.outer((grid - grid[0]) / span * np.pi, freqs)
                           ) @ weights
        direction /= np.max(np.abs(direction))
        for eps in magnitudes:
            other = DensitySpec(grid, best.values * (1 + eps * direction))
            margin = min(margin, _spread_objective(other, g) - optimum)
    l1 = best.integrate(g)
    report = CheckReport('optimal density', bool(
        margin >= -1e-10 * optimum and abs(optimum - l1 ** 2) <= 1e-8 * l1 ** 2),
        {'objective': optimum, 'l1_squared': l1 ** 2, 'margin': float(margin)})
    return best, report


def optimal_control_check(delta, residuals, points=11):
    """Integrate the optimal state equation and compare with the linear path.

    The state solves dz/dt = r / (1 + delta) from z(0) = 0; the objective is
    |z(1) - r|^2 + delta * int |dz/dt|^2 dt averaged over the residuals r.
    """
    if not delta > 0:
        raise ValueError('delta must be positive, got {}'.format(delta))
    r = np.asarray(residuals, dtype=float).ravel()
    n = r.shape[0]
    if not n:
        raise ValueError('no residual values')
    speed = r / (1 + delta)

    def rhs(t, y):
        return np.concatenate([speed, delta * speed ** 2])

    times = np.linspace(0.0, 1.0, points)
    solution = solve_ivp(rhs, (0.0, 1.0), np.zeros(2 * n), method='DOP853',
                         t_eval=times, rtol=1e-13, atol=1e-14)
    if not solution.success:
        raise RuntimeError('state integration failed: ' + solution.message)
    path = solution.y[:n]
    path_error = float(np.max(np.abs(path - np.outer(speed, times))))
    final = path[:, -1]
    energy = r @ r / n
    terminal = float(np.mean((final - r) ** 2))
    objective = terminal + float(np.mean(solution.y[n:, -1]))
    exact_terminal = energy * delta ** 2 / (1 + delta) ** 2
    exact_objective = energy * delta / (1 + delta)
    passed = (path_error <= 1e-10 and
              abs(terminal - exact_terminal) <= 1e-10 and
              abs(objective - exact_objective) <= 1e-10)
    return CheckReport('optimal control (delta={:g})'.format(delta),
                       bool(passed), {
        'path_error': path_error, 'terminal': terminal,
        'exact_terminal': exact_terminal, 'objective': objective,
        'exact_objective': exact_objective,
    })


def _scalar(value):
    return float(value) if np.ndim(value) == 0 else value


def h_eval(z):
    """Smooth cut-off equal to one on [-1, 1].

    >>> h_eval(0.5)
    1.0
    >>> h_eval(-3.0) == h_eval(3.0)
    True
    """
    z = np.asarray(z, dtype=float)
    u = 1 - np.abs(z)
    out = np.ones_like(u)
    outer = u < 0
    uo = u[outer]
    out[outer] = (1 + np.exp(1 / uo)) * np.exp(-uo ** 2)
    return _scalar(out)


def h_prime(z):
    z = np.asarray(z, dtype=float)
    u = 1 - np.abs(z)
    out = np.zeros_like(u)
    outer = u < 0
    uo = u[outer]
    spike = np.exp(1 / uo - 2 * np.log(-uo))
    out[outer] = np.sign(z[outer]) * (
        spike + 2 * uo * (1 + np.exp(1 / uo))) * np.exp(-uo ** 2)
    return _scalar(out)


def _h_grid():
    z = np.linspace(0.0, H_SUPPORT, H_POINTS)
    return z, h_eval(z)


def _cosine_transform(omega, weights, z, kernel):
    omega = np.asarray(omega, dtype=float)
    flat = omega.ravel()
    out = np.empty(flat.shape[0])
    for start in range(0, flat.shape[0], CHUNK):
        block = flat[start:start + CHUNK]
        out[start:start + CHUNK] = trapezoid(
            weights * kernel(np.outer(block, z)), z, axis=1)
    return _scalar(out.reshape(omega.shape))


def hhat(omega):
    """Fourier transform (1 / 2pi) int h(z) e^{-i omega z} dz of h."""
    z, h = _h_grid()
    return _cosine_transform(omega, h, z, np.cos) / np.pi


def hhat_derivative(omega, method='spectral', eps=1e-4):
    """Derivative of hhat by transforming -z h(z), or by central differences."""
    if method == 'spectral':
        z, h = _h_grid()
        return -_cosine_transform(omega, z * h, z, np.sin) / np.pi
    if method == 'difference':
        omega = np.asarray(omega, dtype=float)
        return (hhat(omega + eps) - hhat(omega - eps)) / (2 * eps)
    raise ValueError('unknown method "{}"'.format(method))


def identity_lipschitz(points=240001):
    """sup over z of |d/dz (z h(z / F))|, which does not depend on F."""
    u = np.linspace(0.0, H_SUPPORT, points)
    return float(np.max(np.abs(h_eval(u) + u * h_prime(u))))


def derivative_density(F=1.0, points=2001, method='spectral'):
    """The density proportional to |hhat'(F omega)|."""
    radius = OMEGA_RADIUS / F
    grid = np.linspace(-radius, radius, points)
    return DensitySpec(grid, np.abs(hhat_derivative(F * grid, method)))


@dataclass(frozen=True)
class BoundConstants:
    F: float
    A: float
    A_star: float
    B_prime: float
    B: float
    B_star: float
    lipschitz: float

    @property
    def C_timedep(self):
        return time_dependent_bound(self.A_star, self.B_star)

    @property
    def C_const(self):
        return constant_density_bound(self.A, self.B)

    @property
    def t_star(self):
        return min(1.0, self.B_star / self.A_star)

    @property
    def tau_star(self):
        return min(1.0, np.sqrt(self.B / self.A))

    def to_dict(self):
        values = dict(self.__dict__)
        values.update(C_timedep=self.C_timedep, C_const=self.C_const,
                      t_star=self.t_star, tau_star=self.tau_star)
        return values


def constant_density_bound(A, B):
    """Minimum of A tau + B (1/tau - 1) over tau in (0, 1].

    This is min(2 sqrt(AB) - B, A) for B <= A, and A once the switch
    point sqrt(B/A) clamps at 1.

    >>> constant_density_bound(4.0, 1.0)
    3.0
    >>> constant_density_bound(1.0, 5.0)
    1.0
    """
    if B >= A:
        return float(A)
    return float(min(2 * np.sqrt(A * B) - B, A))


def time_dependent_bound(A_star, B_star):
    """B*^2 (1 + log(A*/B*))^2, or A*^2 once B* >= A* and t* clamps at 1."""
    if B_star >= A_star:
        return float(A_star ** 2)
    return float(B_star ** 2 * (1 + np.log(A_star / B_star)) ** 2)


def bound_constants(grid, fhat_abs, F, pbar, pbar_prime, method='spectral',
                    lipschitz=None):
    """Constants of the generalization bound for a given |f hat| profile.

    fhat_abs is sampled on grid; pbar is the z-branch frequency density and
    pbar_prime the x-branch one.
    """
    if not F > 0:
        raise ValueError('F must be positive')
    grid = np.asarray(grid, dtype=float)
    fhat_abs = np.abs(_values_on(fhat_abs, grid))
    density = pbar_prime.pdf(grid)
    _check_support(fhat_abs, density, 'A')
    A = float(trapezoid(_safe_ratio(fhat_abs ** 2, density), grid))
    A_star = float(trapezoid(fhat_abs, grid))
    g = np.abs(hhat_derivative(F * pbar.grid, method))
    _check_support(g, pbar.values, "B'")
    lipschitz = identity_lipschitz() if lipschitz is None else lipschitz
    B_prime = F ** 2 * pbar.integrate(_safe_ratio(g ** 2, pbar.values))
    B = B_prime * np.exp(2 * lipschitz)
    B_star = F * pbar.integrate(g) * np.exp(lipschitz)
    return BoundConstants(float(F), A, A_star, float(B_prime), float(B),
                          float(B_star), float(lipschitz))


def bang_bang_check(A, B, grid=None):
    """Minimize A tau + B (1/tau - 1) over tau in (0, 1] on a grid."""
    if not (A > 0 and B > 0):
        raise ValueError('A and B must be positive')
    if grid is None:
        grid = np.linspace(1e-5, 1.0, 100000)
    grid = np.asarray(grid, dtype=float)
    values = A * grid + B * (1 / grid - 1)
    best = int(np.argmin(values))
    tau = min(1.0, np.sqrt(B / A))
    cell = np.max(np.diff(grid)) if grid.shape[0] > 1 else 0.0
    formula = constant_density_bound(A, B)
    passed = (abs(grid[best] - tau) <= cell * (1 + 1e-9) and
              abs(values[best] - formula) <= 1e-6)
    return CheckReport('bang-bang switch (A={:g}, B={:g})'.format(A, B),
                       bool(passed), {
        'tau_grid': float(grid[best]), 'tau_star': float(tau),
        'min_grid': float(values[best]), 'min_formula': formula,
    })


def stratified_times(q, L, K, seed):
    """Stratified layer times: row l holds K draws of Q^-1 on [l/L, (l+1)/L).

    Returns the L x K times and the L + 1 levels Q^-1(l / L).
    """
    if L < 1 or K < 1:
        raise ValueError('L and K must be positive')
    if q.grid[0] < 0 or q.grid[-1] > 1:
        raise ValueError('time density must live on [0, 1]')
    rng = np.random.default_rng(seed)
    tau = (np.arange(L)[:, None] + rng.random((L, K))) / L
    return q.inverse_cdf(tau), q.inverse_cdf(np.arange(L + 1) / L)


class TimeDependentDensities:
    """Optimal time-frequency densities for the x- and z-branch.

    The x-branch density |f hat| / (A* t*) lives on [0, t*) and the z-branch
    density |hhat'(F w)| / (t ||hhat'(F .)||_1 log(1/t*)) on [t*, 1].
    """

    def __init__(self, x_density, z_density, t_star):
        self.x_density = x_density
        self.z_density = z_density
        self.t_star = float(t_star)

    def q_prime(self, t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= 0) & (t < self.t_star), 1 / self.t_star, 0.0)

    def q(self, t):
        t = np.asarray(t, dtype=float)
        if self.t_star >= 1:
            return np.zeros_like(t)
        inside = (t >= self.t_star) & (t <= 1)
        safe = np.where(inside, t, 1.0)
        return np.where(inside, 1 / (safe * np.log(1 / self.t_star)), 0.0)

    def p_prime(self, t, omega):
        return np.multiply.outer(self.q_prime(t), self.x_density.pdf(omega))

    def p(self, t, omega):
        return np.multiply.outer(self.q(t), self.z_density.pdf(omega))

    def masses(self, points=2001):
        """Total masses of p' and p on their time-frequency supports."""
        t = np.linspace(0.0, self.t_star, points)
        # q'(t) is 1 / t* on [0, t*); close the interval for quadrature
        x_mass = trapezoid(np.full(points, 1 / self.t_star), t) \
            * self.x_density.mass
        if self.t_star >= 1:
            return float(x_mass), None
        s = np.linspace(np.log(self.t_star), 0.0, points)
        z_mass = trapezoid(self.q(np.exp(s)) * np.exp(s), s) \
            * self.z_density.mass
        return float(x_mass), float(z_mass)


def time_dependent_densities(grid, fhat_abs, F, points=2001, method='spectral'):
    grid = np.asarray(grid, dtype=float)
    x_density = DensitySpec(grid, np.abs(_values_on(fhat_abs, grid)))
    z_density = derivative_density(F, points, method)
    constants = bound_constants(grid, fhat_abs, F, z_density, x_density,
                                method)
    return TimeDependentDensities(x_density, z_density, constants.t_star)


def _gaussian_profile(grid, l1):
    shape = np.exp(-grid ** 2 / 2)
    return l1 * shape / trapezoid(shape, grid)


def remark_regime_check(ratio=1e-3, F=1.0):
    """With B*/A* = ratio, compare the deep bound with the shallow A*^2."""
    pbar = derivative_density(F)
    grid = np.linspace(-10.0, 10.0, 2001)
    reference = bound_constants(grid, _gaussian_profile(grid, 1.0), F, pbar,
                                DensitySpec(grid, np.exp(-grid ** 2 / 2)))
    fhat_abs = _gaussian_profile(grid, reference.B_star / ratio)
    constants = bound_constants(grid, fhat_abs, F, pbar,
                                DensitySpec(grid, fhat_abs),
                                lipschitz=reference.lipschitz)
    relative = constants.C_timedep / constants.A_star ** 2
    return CheckReport('deep vs shallow constant (B*/A*={:g})'.format(ratio),
                       bool(relative < 0.1), {
        'A_star': constants.A_star, 'B_star': constants.B_star,
        'C_timedep': constants.C_timedep, 'relative': relative,
    })


def _check_h_continuity():
    gaps = [abs(h_eval(1 + 10.0 ** -k) - 1.0) for k in range(3, 9)]
    return CheckReport('cut-off continuity at 1', gaps[-1] <= 1e-6,
                       {'gap': gaps[-1]})


def _check_b_prime_methods(F=1.0):
    pbar = derivative_density(F)
    values = {}
    for method in ('spectral', 'difference'):
        g = np.abs(hhat_derivative(F * pbar.grid, method))
        values[method] = F ** 2 * pbar.integrate(
            _safe_ratio(g ** 2, pbar.values))
    relative = abs(values['spectral'] - values['difference']) \
        / values['spectral']
    return CheckReport("B' by two methods", bool(relative <= 1e-4), {
        'spectral': values['spectral'], 'difference': values['difference'],
        'relative': relative,
    })


def _check_density_supports(F=1.0):
    grid = np.linspace(-10.0, 10.0, 2001)
    densities = time_dependent_densities(
        grid, _gaussian_profile(grid, 50.0), F)
    x_mass, z_mass = densities.masses()
    t = np.linspace(0.0, 1.0, 1001)
    omega = densities.x_density.grid
    late = t >= densities.t_star
    supports = (not np.any(densities.p_prime(t[late], omega)) and
                not np.any(densities.p(t[~late], omega)))
    masses_ok = abs(x_mass - 1) <= 1e-8 and (
        z_mass is None or abs(z_mass - 1) <= 1e-8)
    return CheckReport('time-dependent densities', bool(supports and masses_ok),
                       {'t_star': densities.t_star, 'x_mass': x_mass,
                        'z_mass': float('nan') if z_mass is None else z_mass})


def _check_stratified(name, q, cdf, L=4, K=25000, seed=0):
    times, levels = stratified_times(q, L, K, seed)
    u = L * cdf(times) - np.arange(L)[:, None]
    counts, _ = np.histogram(u.ravel(), bins=20, range=(0.0, 1.0))
    result = chisquare(counts)
    in_strata = np.all((times >= levels[:-1, None] - 1e-12) &
                       (times < levels[1:, None] + 1e-12))
    return CheckReport('stratified times ({})'.format(name),
                       bool(result.pvalue > 0.01 and in_strata),
                       {'chi2': float(result.statistic),
                        'pvalue': float(result.pvalue)})


def run_all(seed=0):
    """Run every check and return the reports in a fixed order."""
    rng = np.random.default_rng(seed)
    reports = [
        mc_moments_check(lambda w: w, DensitySpec.uniform(), 100, 10000, seed),
        optimal_density(np.linspace(-6, 6, 2001),
                        lambda w: np.exp(-w ** 2 / 2), seed=seed)[1],
    ]
    residuals = rng.standard_normal(50)
    reports += [optimal_control_check(delta, residuals)
                for delta in (0.01, 0.3, 1.0)]
    pairs = [(a, a * ratio) for a, ratio in zip(
        rng.uniform(0.1, 10.0, 50), rng.uniform(0.01, 1.0, 50))]
    bang_bang = [bang_bang_check(A, B) for A, B in pairs]
    reports.append(CheckReport(
        'bang-bang switch ({} pairs)'.format(len(pairs)),
        all(r.passed for r in bang_bang),
        {'failures': sum(not r.passed for r in bang_bang)}))
    reports += [
        _check_h_continuity(),
        _check_b_prime_methods(),
        remark_regime_check(),
        _check_density_supports(),
        _check_stratified('uniform', DensitySpec.uniform(), lambda t: t,
                          seed=seed),
        _check_stratified('linear', DensitySpec(
            np.linspace(0, 1, 2001), np.linspace(0, 1, 2001)),
            lambda t: t ** 2, seed=seed),
    ]
    for report in reports:
        logger.info(report.format())
    return reports
