"""Position information carried by observed configurations.

Per-element Fisher information of the quantized (or continuous) noisy phase
as a function of UE position, aggregate information, the resulting lower
bound on localization accuracy, an area-coverage metric, and a two-device
bearing-intersection baseline.

Spatial derivatives of bin log-probabilities are central finite differences
with a configurable step (default 0.01 m); probabilities are clamped at
1e-300 before taking logs and clamped stencils are flagged as unreliable
rather than silently zeroed.
"""
from dataclasses import dataclass

import numpy as np

from . import _backend
from .control import TWO_PI
from .errors import (DegenerateGeometryError, InvalidArgumentError,
                     UnreachablePositionError)
from .geometry import (Visibility, as_vec3, classify_visibility, mirror_image,
                       transmitter_surface_block)

DEFAULT_FD_STEP = 0.01
PROB_CLAMP = 1e-300
CRB_UNLOCALIZABLE = np.inf
_COND_LIMIT = 1e12


def _stencil_positions(u, fd_step):
    u = as_vec3(u)
    ex = np.array([fd_step, 0.0, 0.0])
    ey = np.array([0.0, fd_step, 0.0])
    return np.array([u, u + ex, u - ex, u + ey, u - ey])


class _ScenarioKernel:
    """Precomputed static pieces shared by every grid-point evaluation."""

    def __init__(self, scenario):
        self.scenario = scenario
        self.elem = scenario.ris.element_positions
        self.ris_ref = scenario.ris.ref_position
        self.bs_pos = scenario.bs_element_positions()
        self.bs_ref = scenario.bs_position
        self.h_rb = transmitter_surface_block(scenario)
        self.pl = scenario.pathloss

    def phases(self, u_ru, u_d):
        return _backend.coherent_phases(
            self.elem, self.ris_ref, self.bs_pos, self.bs_ref, self.h_rb,
            self.pl.gamma0, self.pl.d0, self.pl.beta,
            self.scenario.wavelength, u_ru, u_d)

    def visibility(self, u):
        if self.scenario.scene is None:
            return Visibility.LOS
        return classify_visibility(self.scenario.scene, u, self.scenario.ris.center)

    def stencil(self, u, fd_step):
        """Noiseless phases at the five-point stencil, shape (5, N).

        With a scene present, the centre point's visibility class is applied
        to the whole stencil (a reflected point images every displaced
        position), so the derivative is taken within one propagation regime.
        """
        pos = _stencil_positions(u, fd_step)
        vis = self.visibility(u)
        if vis is Visibility.EXCLUDED:
            raise UnreachablePositionError(f"position {np.asarray(u)} is not reachable")
        if vis is Visibility.REFLECTED:
            u_ru = np.array([mirror_image(self.scenario.scene, p) for p in pos])
        else:
            u_ru = pos
        return self.phases(u_ru, pos)


def phase_stencil(scenario, u, fd_step=DEFAULT_FD_STEP):
    return _ScenarioKernel(scenario).stencil(u, fd_step)


def pmf_log_gradient(scenario, u, n, m, fd_step=DEFAULT_FD_STEP):
    """Central-difference gradient of ln P(bin m) for element n.

    Returns (gradient, reliable); ``reliable`` is False when any stencil
    probability needed clamping, in which case the value should be excluded
    from maps.
    """
    q = scenario.quantization_bits
    if q < 1:
        raise InvalidArgumentError("bin probabilities need a quantized configuration")
    if not 0 <= m < (1 << q):
        raise InvalidArgumentError(f"bin index {m} out of range for {q} bits")
    theta = phase_stencil(scenario, u, fd_step)[:, n]
    probs = _backend.quantized_pmf(theta, scenario.phase_noise_sigma, q)[:, m]
    reliable = bool(np.all(probs >= PROB_CLAMP))
    lnp = np.log(np.clip(probs, PROB_CLAMP, None))
    grad = np.array([lnp[1] - lnp[2], lnp[3] - lnp[4]]) / (2.0 * fd_step)
    return grad, reliable


def element_fi_general(scenario, u, n, fd_step=DEFAULT_FD_STEP):
    """Information matrix of one element's observed phase about the position.

    Quantized mode averages the outer product of bin log-probability
    gradients under the centre-point bin distribution. Continuous mode
    (zero quantization bits) uses the Gaussian-observation score instead:
    the outer product of the noiseless-phase gradient over the noise
    variance.
    """
    sigma = scenario.phase_noise_sigma
    if sigma <= 0:
        raise InvalidArgumentError("phase_noise_sigma must be positive")
    theta = phase_stencil(scenario, u, fd_step)[:, n]
    q = scenario.quantization_bits
    inv2h = 1.0 / (2.0 * fd_step)
    if q == 0:
        dx = ((theta[1] - theta[2] + np.pi) % TWO_PI - np.pi) * inv2h
        dy = ((theta[3] - theta[4] + np.pi) % TWO_PI - np.pi) * inv2h
        g = np.array([dx, dy])
        return np.outer(g, g) / (sigma * sigma)
    probs = _backend.quantized_pmf(theta, sigma, q)  # (5, B)
    lnp = np.log(np.clip(probs, PROB_CLAMP, None))
    gx = (lnp[1] - lnp[2]) * inv2h
    gy = (lnp[3] - lnp[4]) * inv2h
    grads = np.stack([gx, gy], axis=1)  # (B, 2)
    return np.einsum("b,bi,bj->ij", probs[0], grads, grads)


def element_fi_binary(scenario, u, n, fd_step=DEFAULT_FD_STEP):
    """One-bit shortcut: the two-atom information needs only the gradient of
    the single bin probability p = P(phase = delta), giving
    (p / (1 - p)) * grad(ln p) grad(ln p)^T."""
    if scenario.quantization_bits != 1:
        raise InvalidArgumentError("the binary shortcut needs exactly 1 quantization bit")
    grad, _ = pmf_log_gradient(scenario, u, n, 1, fd_step)
    theta = phase_stencil(scenario, u, fd_step)[0, n]
    p1 = _backend.quantized_pmf(np.array([theta]), scenario.phase_noise_sigma, 1)[0, 1]
    p1 = min(max(p1, PROB_CLAMP), 1.0 - 1e-16)
    return (p1 / (1.0 - p1)) * np.outer(grad, grad)


def total_fi(scenario, u, fd_step=DEFAULT_FD_STEP):
    """Aggregate information: elementwise sum over all surface elements."""
    kern = _ScenarioKernel(scenario)
    theta = kern.stencil(u, fd_step)
    j_xx, j_xy, j_yy, _, _ = _backend.fi_stencil(
        theta, scenario.phase_noise_sigma, scenario.quantization_bits, fd_step, PROB_CLAMP)
    return np.array([[j_xx.sum(), j_xy.sum()], [j_xy.sum(), j_yy.sum()]])


def crb_accuracy(j):
    """Achievable accuracy sqrt(tr(J^-1)) in metres; an ill-conditioned or
    singular matrix yields the unlocalizable marker (inf)."""
    j = np.asarray(j, float)
    eig = np.linalg.eigvalsh(j)
    if eig[0] <= 0 or eig[-1] / eig[0] >= _COND_LIMIT:
        return CRB_UNLOCALIZABLE
    return float(np.sqrt(np.trace(np.linalg.inv(j))))


@dataclass(frozen=True)
class AreaMetricParams:
    """Coverage threshold sigma_min (metres) and sigmoid sharpness (per metre)."""

    sigma_min: float
    sharpness: float = 10.0

    def __post_init__(self):
        if self.sigma_min <= 0 or self.sharpness <= 0:
            raise InvalidArgumentError("sigma_min and sharpness must be positive")


@dataclass
class FiMapResult:
    """Per-grid-point information summary."""

    grid: np.ndarray               # (P, 3)
    j_matrices: np.ndarray         # (P, 2, 2)
    crb: np.ndarray                # (P,)
    per_element_info: np.ndarray | None  # (P, N) traces, when stored
    reliable: np.ndarray           # (P,) no probability clamping occurred
    excluded: np.ndarray           # (P,) unreachable under the scene


def fi_map(scenario, grid, fd_step=DEFAULT_FD_STEP, chunk=128, store_element_info=True):
    """Evaluate information and accuracy over a grid of candidate positions.

    Grid points are independent; evaluation is chunked only to bound memory.
    Excluded points carry a zero matrix and the unlocalizable marker.
    """
    grid = np.atleast_2d(np.asarray(grid, float))
    p_total = grid.shape[0]
    if p_total == 0:
        raise InvalidArgumentError("grid must be nonempty")
    kern = _ScenarioKernel(scenario)
    n = scenario.ris.n_elements
    sigma = scenario.phase_noise_sigma
    q = scenario.quantization_bits

    vis = np.array([kern.visibility(u) for u in grid])
    excluded = vis == Visibility.EXCLUDED

    j_mats = np.zeros((p_total, 2, 2))
    crb = np.full(p_total, CRB_UNLOCALIZABLE)
    reliable = np.zeros(p_total, dtype=bool)
    info = np.zeros((p_total, n)) if store_element_info else None

    keep = np.flatnonzero(~excluded)
    for start in range(0, keep.size, chunk):
        idx = keep[start:start + chunk]
        c = idx.size
        pos = np.concatenate([_stencil_positions(grid[i], fd_step) for i in idx])
        pos = pos.reshape(c, 5, 3).transpose(1, 0, 2).reshape(5 * c, 3)
        if scenario.scene is None:
            u_ru = pos
        else:
            u_ru = pos.copy()
            refl = vis[idx] == Visibility.REFLECTED
            for k_local in np.flatnonzero(refl):
                for s in range(5):
                    row = s * c + k_local
                    u_ru[row] = mirror_image(scenario.scene, pos[row])
        theta = kern.phases(u_ru, pos).reshape(5, c * n)
        j_xx, j_xy, j_yy, tr_n, flags = _backend.fi_stencil(theta, sigma, q, fd_step, PROB_CLAMP)
        j_xx = j_xx.reshape(c, n).sum(axis=1)
        j_xy = j_xy.reshape(c, n).sum(axis=1)
        j_yy = j_yy.reshape(c, n).sum(axis=1)
        tr_n = tr_n.reshape(c, n)
        flags = flags.reshape(c, n)
        for k_local, i in enumerate(idx):
            j = np.array([[j_xx[k_local], j_xy[k_local]], [j_xy[k_local], j_yy[k_local]]])
            j_mats[i] = j
            crb[i] = crb_accuracy(j)
            reliable[i] = not flags[k_local].any()
            if info is not None:
                info[i] = tr_n[k_local]
    return FiMapResult(grid=grid, j_matrices=j_mats, crb=crb,
                       per_element_info=info, reliable=reliable, excluded=excluded)


def area_metric(crb_map, params):
    """Fraction of the area reaching the accuracy target, as the grid mean of
    a sigmoid of the accuracy value.

    The contribution tends to 1 where the bound is far below sigma_min and to
    0 far above it (exactly 0 for unlocalizable points); 0.5 on the threshold.
    """
    crb = crb_map.crb if isinstance(crb_map, FiMapResult) else np.asarray(crb_map, float)
    if crb.size == 0:
        raise InvalidArgumentError("empty accuracy map")
    arg = np.clip((crb - params.sigma_min) * params.sharpness, -700.0, 700.0)
    s = np.where(np.isfinite(crb), 1.0 / (1.0 + np.exp(arg)), 0.0)
    return float(s.mean())


def average_element_information(scenario, grid, fd_step=DEFAULT_FD_STEP, chunk=128):
    """Mean over grid positions of each element's information trace."""
    result = fi_map(scenario, grid, fd_step=fd_step, chunk=chunk, store_element_info=True)
    keep = ~result.excluded
    if not keep.any():
        raise InvalidArgumentError("every grid point is excluded by the scene")
    return result.per_element_info[keep].mean(axis=0)


@dataclass(frozen=True)
class AoaResult:
    estimate: np.ndarray
    hpbw_pair: tuple
    uncertainty_radius: float
    region: np.ndarray  # (4, 2) corner points of the wedge intersection


def horizontal_hpbw(wavelength, n_y, spacing, off_boresight):
    """Half-power beamwidth 0.886 * lambda / (N * d * cos(phi)) of a steered
    uniform array with N elements at spacing d, phi off boresight."""
    c = np.cos(off_boresight)
    if c <= 0:
        raise DegenerateGeometryError("target lies at or behind the array plane")
    return 0.886 * wavelength / (n_y * spacing * c)


def _ray_intersection(p0, d0, p1, d1):
    denom = d0[0] * d1[1] - d0[1] * d1[0]
    if abs(denom) < 1e-14:
        raise DegenerateGeometryError("bearing rays are parallel")
    dp = p1 - p0
    t = (dp[0] * d1[1] - dp[1] * d1[0]) / denom
    s = (dp[0] * d0[1] - dp[1] * d0[0]) / denom
    if t <= 0 or s <= 0:
        raise DegenerateGeometryError("bearing rays do not meet in front of both arrays")
    return p0 + t * d0


def region_area(region):
    """Shoelace area of the (4, 2) wedge-intersection polygon."""
    x, y = region[:, 0], region[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def aoa_baseline(ris_positions, layouts, u, wavelength, normals_azimuth=(0.0, 0.0)):
    """Bearing-intersection baseline with two surfaces steering at the target.

    Each device contributes its true bearing widened by the half-power
    beamwidth; the uncertainty region is the intersection of the two angular
    wedges and the estimate its corner centroid. ``normals_azimuth`` gives
    each array's boresight direction in the horizontal plane.
    """
    u = as_vec3(u)
    p = [as_vec3(r)[:2] for r in ris_positions]
    bearings, widths = [], []
    for i in range(2):
        delta = u[:2] - p[i]
        if np.linalg.norm(delta) == 0:
            raise DegenerateGeometryError("target coincides with an array position")
        bearing = np.arctan2(delta[1], delta[0])
        phi = (bearing - normals_azimuth[i] + np.pi) % TWO_PI - np.pi
        widths.append(horizontal_hpbw(wavelength, layouts[i].n_y, layouts[i].spacing, phi))
        bearings.append(bearing)

    def ray(i, side):
        ang = bearings[i] + side * widths[i] / 2.0
        return np.array([np.cos(ang), np.sin(ang)])

    corners = [
        _ray_intersection(p[0], ray(0, +1), p[1], ray(1, +1)),
        _ray_intersection(p[0], ray(0, +1), p[1], ray(1, -1)),
        _ray_intersection(p[0], ray(0, -1), p[1], ray(1, -1)),
        _ray_intersection(p[0], ray(0, -1), p[1], ray(1, +1)),
    ]
    region = np.array(corners)
    centroid = region.mean(axis=0)
    radius = float(np.max(np.linalg.norm(region - centroid, axis=1)))
    estimate = np.array([centroid[0], centroid[1], u[2]])
    return AoaResult(estimate=estimate, hpbw_pair=(widths[0], widths[1]),
                     uncertainty_radius=radius, region=region)
