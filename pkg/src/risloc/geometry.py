"""Deployment geometry, array responses, path gains and channel synthesis.

Positions are 3D numpy arrays in metres. The reflecting surface is a uniform
planar array in a yz-plane through its centre; the transmitter is modelled as
a uniform linear array (half-wavelength spacing) along a configurable axis,
referenced at its centroid. Obstacle scenes live in the horizontal xy-plane:
a specular mirror segment (ideal, lossless) and a fully absorbing blockage
segment, both treated as infinite-height vertical walls.
"""
import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, SingularGeometryError, UnreachablePositionError

SPEED_OF_LIGHT = 299792458.0


def vec3(x, y, z):
    return np.array([float(x), float(y), float(z)])


def as_vec3(p):
    a = np.asarray(p, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError(f"position has non-finite components: {a}")
    return a


@dataclass(frozen=True)
class PathLossParams:
    """Power-law path gain: gamma0 * (d0 / distance) ** beta."""

    gamma0: float = 1.0
    d0: float = 1.0
    beta: float = 2.0

    def __post_init__(self):
        if self.gamma0 <= 0 or self.d0 <= 0 or self.beta <= 0:
            raise InvalidArgumentError("gamma0, d0 and beta must all be positive")


@dataclass(frozen=True)
class RisLayout:
    """Element grid of the reflecting surface plus its reference element.

    ``element_positions`` is (N, 3) with N = n_y * n_z, ordered row-major over
    (z row, y column) with y fastest. ``build_upa_layout`` guarantees a regular
    grid; direct construction is allowed for special layouts (e.g. rotated
    scenes in tests) and skips that guarantee.
    """

    n_y: int
    n_z: int
    spacing: float
    center: np.ndarray
    ref_index: int
    element_positions: np.ndarray

    def __post_init__(self):
        if self.element_positions.shape != (self.n_y * self.n_z, 3):
            raise InvalidArgumentError("element_positions must have shape (n_y*n_z, 3)")
        if not 0 <= self.ref_index < self.n_elements:
            raise InvalidArgumentError("ref_index out of range")

    @property
    def n_elements(self):
        return self.n_y * self.n_z

    @property
    def ref_position(self):
        return self.element_positions[self.ref_index]

    def element_grid_index(self, n):
        """(row, col) = (z index, y index) of element n."""
        return divmod(int(n), self.n_y)


def build_upa_layout(n_y, n_z, spacing, center, ref_choice="geometric_center"):
    """Lay out an n_y x n_z grid in the yz-plane through ``center``.

    ``ref_choice`` selects the reference element: "geometric_center" picks the
    element nearest the centroid (lowest index on ties), "corner" the element
    with minimal y and z, and an integer picks that index directly.
    """
    if n_y < 1 or n_z < 1:
        raise InvalidArgumentError("grid dimensions must be at least 1")
    if spacing <= 0:
        raise InvalidArgumentError(f"element spacing must be positive, got {spacing}")
    center = as_vec3(center)
    y_off = (np.arange(n_y) - (n_y - 1) / 2.0) * spacing
    z_off = (np.arange(n_z) - (n_z - 1) / 2.0) * spacing
    zz, yy = np.meshgrid(z_off, y_off, indexing="ij")
    pos = np.column_stack([
        np.full(n_y * n_z, center[0]),
        center[1] + yy.ravel(),
        center[2] + zz.ravel(),
    ])
    if isinstance(ref_choice, (int, np.integer)):
        ref_index = int(ref_choice)
        if not 0 <= ref_index < n_y * n_z:
            raise InvalidArgumentError(f"ref index {ref_index} out of range")
    elif ref_choice == "geometric_center":
        ref_index = int(np.argmin(np.linalg.norm(pos - center, axis=1)))
    elif ref_choice == "corner":
        ref_index = 0  # minimal y and z by construction
    else:
        raise InvalidArgumentError(f"unknown ref_choice: {ref_choice!r}")
    return RisLayout(n_y, n_z, float(spacing), center, ref_index, pos)


@dataclass(frozen=True)
class NlosScene:
    """Mirror and blockage segments, given as (2, 2) xy endpoint arrays."""

    mirror: np.ndarray
    blockage: np.ndarray

    def __post_init__(self):
        for name, seg in (("mirror", self.mirror), ("blockage", self.blockage)):
            seg = np.asarray(seg, float)
            if seg.shape != (2, 2):
                raise InvalidArgumentError(f"{name} must be two xy endpoints")
            if np.linalg.norm(seg[1] - seg[0]) == 0:
                raise InvalidArgumentError(f"{name} segment has zero length")


def make_scene(mirror, blockage):
    return NlosScene(np.asarray(mirror, float), np.asarray(blockage, float))


@dataclass(frozen=True)
class Scenario:
    """Full deployment description used by every downstream stage."""

    bs_position: np.ndarray
    bs_antennas: int
    ris: RisLayout
    carrier_hz: float
    pathloss: PathLossParams = PathLossParams()
    tx_power: float = 1.0
    noise_power: float = 1e-12
    phase_noise_sigma: float = np.pi / 6
    quantization_bits: int = 1
    scene: NlosScene | None = None
    bs_axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))

    def __post_init__(self):
        object.__setattr__(self, "bs_position", as_vec3(self.bs_position))
        axis = as_vec3(self.bs_axis)
        norm = np.linalg.norm(axis)
        if norm == 0:
            raise InvalidArgumentError("bs_axis must be a nonzero direction")
        object.__setattr__(self, "bs_axis", axis / norm)
        if self.bs_antennas < 1:
            raise InvalidArgumentError("bs_antennas must be at least 1")
        if self.carrier_hz <= 0:
            raise InvalidArgumentError("carrier_hz must be positive")
        if self.tx_power <= 0 or self.noise_power <= 0:
            raise InvalidArgumentError("powers must be positive")
        if self.phase_noise_sigma < 0:
            raise InvalidArgumentError("phase_noise_sigma must be nonnegative")
        if self.quantization_bits < 0:
            raise InvalidArgumentError("quantization_bits must be nonnegative")

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_hz

    def bs_element_positions(self):
        """Transmit array: half-wavelength ULA along ``bs_axis``, centred on
        ``bs_position`` (which is also the array phase reference)."""
        m = np.arange(self.bs_antennas) - (self.bs_antennas - 1) / 2.0
        return self.bs_position[None, :] + m[:, None] * (self.wavelength / 2.0) * self.bs_axis[None, :]


@dataclass(frozen=True)
class ChannelSet:
    """Channel blocks for one UE position: surface-transmitter matrix (N, M),
    surface-UE vector (N,), direct transmitter-UE vector (M,)."""

    h_rb: np.ndarray
    h_ru: np.ndarray
    h_d: np.ndarray

    def __post_init__(self):
        n, m = self.h_rb.shape
        if self.h_ru.shape != (n,) or self.h_d.shape != (m,):
            raise InvalidArgumentError("channel block dimensions are inconsistent")
        for block in (self.h_rb, self.h_ru, self.h_d):
            if not np.all(np.isfinite(block.view(float))):
                raise InvalidArgumentError("channel entries must be finite")


def path_gain(x, y, params):
    """gamma0 * (d0 / ||x - y||) ** beta; symmetric in its two endpoints."""
    d = np.linalg.norm(as_vec3(x) - as_vec3(y))
    if d == 0:
        raise SingularGeometryError("path gain undefined for coincident points")
    return params.gamma0 * (params.d0 / d) ** params.beta


def steering_vector(positions, ref_position, wavelength, p):
    """Unit-modulus response referenced to ``ref_position``:
    exp(-j*2*pi/lambda * (||p - p_n|| - ||p - p_ref||))."""
    p = as_vec3(p)
    d = np.linalg.norm(p[None, :] - positions, axis=1)
    if np.any(d == 0):
        raise SingularGeometryError("evaluation point coincides with an array element")
    d_ref = np.linalg.norm(p - ref_position)
    return np.exp(-1j * (2 * np.pi / wavelength) * (d - d_ref))


def array_response(layout, wavelength, p):
    return steering_vector(layout.element_positions, layout.ref_position, wavelength, p)


class Visibility(enum.Enum):
    LOS = "los"
    REFLECTED = "reflected"
    EXCLUDED = "excluded"


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def segments_intersect(a0, a1, b0, b1):
    """True when closed segments a0-a1 and b0-b1 share at least one point."""
    d1 = _cross2(b0, b1, a0)
    d2 = _cross2(b0, b1, a1)
    d3 = _cross2(a0, a1, b0)
    d4 = _cross2(a0, a1, b1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0:
        return True

    def on_segment(p, q, r):
        return (min(p[0], r[0]) - 1e-12 <= q[0] <= max(p[0], r[0]) + 1e-12 and
                min(p[1], r[1]) - 1e-12 <= q[1] <= max(p[1], r[1]) + 1e-12)

    if d1 == 0 and on_segment(b0, a0, b1):
        return True
    if d2 == 0 and on_segment(b0, a1, b1):
        return True
    if d3 == 0 and on_segment(a0, b0, a1):
        return True
    if d4 == 0 and on_segment(a0, b1, a1):
        return True
    return False


def mirror_image(scene, u):
    """Reflection of ``u`` across the vertical plane through the mirror
    segment; the z coordinate is preserved and the map is an involution."""
    u = as_vec3(u)
    a = np.asarray(scene.mirror[0], float)
    b = np.asarray(scene.mirror[1], float)
    d = b - a
    d = d / np.linalg.norm(d)
    v = u[:2] - a
    v_ref = 2.0 * (v @ d) * d - v
    return np.array([a[0] + v_ref[0], a[1] + v_ref[1], u[2]])


def _mirror_line_crossing(scene, p0, p1):
    """Intersection of segment p0-p1 with the mirror segment, or None."""
    a, b = np.asarray(scene.mirror[0], float), np.asarray(scene.mirror[1], float)
    r = p1 - p0
    s = b - a
    denom = r[0] * s[1] - r[1] * s[0]
    if denom == 0:
        return None
    qp = a - p0
    t = (qp[0] * s[1] - qp[1] * s[0]) / denom
    w = (qp[0] * r[1] - qp[1] * r[0]) / denom
    if 0.0 <= t <= 1.0 and 0.0 <= w <= 1.0:
        return p0 + t * r
    return None


def classify_visibility(scene, u, ris_center):
    """Direct / reflected / excluded reachability of ``u`` from the surface.

    A clear direct segment is line of sight. A direct segment crossing the
    mirror puts the point behind the mirror: excluded (its image lies on the
    surface side, so no reflected route exists either). A blocked direct
    segment is recoverable when the image-to-surface segment crosses the
    mirror and both physical legs of the reflected route clear the blockage.
    """
    u = as_vec3(u)
    r2 = as_vec3(ris_center)[:2]
    u2 = u[:2]
    mirror_hit = segments_intersect(u2, r2, scene.mirror[0], scene.mirror[1])
    block_hit = segments_intersect(u2, r2, scene.blockage[0], scene.blockage[1])
    if not mirror_hit and not block_hit:
        return Visibility.LOS
    if mirror_hit:
        return Visibility.EXCLUDED
    img = mirror_image(scene, u)[:2]
    bounce = _mirror_line_crossing(scene, img, r2)
    if bounce is None:
        return Visibility.EXCLUDED
    for leg in ((u2, bounce), (bounce, r2)):
        if segments_intersect(leg[0], leg[1], scene.blockage[0], scene.blockage[1]):
            return Visibility.EXCLUDED
    return Visibility.REFLECTED


def effective_ru_position(scenario, u):
    """Position the surface actually 'sees': the point itself under line of
    sight, its mirror image under a reflected route."""
    if scenario.scene is None:
        return as_vec3(u), Visibility.LOS
    vis = classify_visibility(scenario.scene, u, scenario.ris.center)
    if vis is Visibility.EXCLUDED:
        raise UnreachablePositionError(f"position {np.asarray(u)} is not reachable by the surface")
    if vis is Visibility.REFLECTED:
        return mirror_image(scenario.scene, u), vis
    return as_vec3(u), vis


def transmitter_surface_block(scenario):
    """Static surface-transmitter channel block (N, M).

    Pairs the surface response evaluated at each transmit antenna with the
    conjugate transmit response evaluated at each surface element; the common
    ||p_n - p_m|| leg cancels, leaving the two reference-offset phases of a
    rank-one LoS block scaled by per-pair square-root path gains.
    """
    lam = scenario.wavelength
    elem = scenario.ris.element_positions
    ris_ref = scenario.ris.ref_position
    bs_pos = scenario.bs_element_positions()
    bs_ref = scenario.bs_position
    pl = scenario.pathloss

    k = 2 * np.pi / lam
    d_nm = np.linalg.norm(elem[:, None, :] - bs_pos[None, :, :], axis=2)  # (N, M)
    if np.any(d_nm == 0):
        raise SingularGeometryError("transmit antenna coincides with a surface element")
    gain_nm = pl.gamma0 * (pl.d0 / d_nm) ** pl.beta
    d_ris_ref = np.linalg.norm(bs_pos - ris_ref[None, :], axis=1)  # (M,)
    d_bs_ref = np.linalg.norm(elem - bs_ref[None, :], axis=1)  # (N,)
    return np.sqrt(gain_nm) * np.exp(1j * k * (d_ris_ref[None, :] - d_bs_ref[:, None]))


def assemble_channels(scenario, u):
    """Synthesize the three channel blocks for a UE at ``u``.

    Entries are products of the square-root path gain and the unit-modulus
    array responses. Under a reflected route only the surface-UE vector
    switches to the mirror image (total path length through the bounce
    point); the direct block is unaffected by the scene.
    """
    u = as_vec3(u)
    lam = scenario.wavelength
    elem = scenario.ris.element_positions
    ris_ref = scenario.ris.ref_position
    bs_pos = scenario.bs_element_positions()
    bs_ref = scenario.bs_position
    pl = scenario.pathloss

    u_ru, _ = effective_ru_position(scenario, u)

    h_rb = transmitter_surface_block(scenario)

    d_e = np.linalg.norm(u_ru[None, :] - elem, axis=1)
    if np.any(d_e == 0):
        raise SingularGeometryError("UE position coincides with a surface element")
    gain_e = pl.gamma0 * (pl.d0 / d_e) ** pl.beta
    h_ru = np.sqrt(gain_e) * steering_vector(elem, ris_ref, lam, u_ru)

    d_b = np.linalg.norm(u[None, :] - bs_pos, axis=1)
    if np.any(d_b == 0):
        raise SingularGeometryError("UE position coincides with a transmit antenna")
    gain_b = pl.gamma0 * (pl.d0 / d_b) ** pl.beta
    h_d = np.sqrt(gain_b) * steering_vector(bs_pos, bs_ref, lam, u)

    return ChannelSet(h_rb=h_rb, h_ru=h_ru, h_d=h_d)
