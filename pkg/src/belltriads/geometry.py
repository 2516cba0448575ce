"""Bloch-sphere geometry: unit directions, orthonormal measurement triads,
Haar-uniform orientation sampling, and the reduction of a triad pair to
three canonical angles.

A *triad* is a right-handed orthonormal set of three measurement directions
on a party's Bloch sphere.  All functions here are pure; random sampling
takes an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Construction tolerance for unit norm / orthogonality / handedness.
ORTHO_TOL = 1e-12

# Reference triad: the directions obtained at (theta, phi, chi) = (0, 0, 0).
REFERENCE_FRAME = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])

# Bounds of the canonical bipartite region: theta in [0, pi/3],
# chi_minus in [0, pi/4], chi_plus in [0, pi/2].
REGION_THETA_MAX = math.pi / 3
REGION_CHI_MINUS_MAX = math.pi / 4
REGION_CHI_PLUS_MAX = math.pi / 2


@dataclass(frozen=True)
class BlochVector:
    """A unit direction on the Bloch sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm_sq = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(norm_sq - 1.0) > ORTHO_TOL:
            raise ValueError(f"Bloch vector must be unit length, got |v|^2 = {norm_sq!r}")

    @classmethod
    def from_array(cls, arr) -> "BlochVector":
        arr = np.asarray(arr, dtype=float)
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "BlochVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z


@dataclass(frozen=True)
class Triad:
    """Three mutually orthogonal measurement directions forming a
    right-handed frame (determinant +1)."""

    omega0: BlochVector
    omega1: BlochVector
    omega2: BlochVector

    def __post_init__(self):
        m = self.as_matrix()
        gram = m @ m.T
        if np.max(np.abs(gram - np.eye(3))) > ORTHO_TOL:
            raise ValueError("triad directions must be orthonormal")
        if abs(np.linalg.det(m) - 1.0) > ORTHO_TOL:
            raise ValueError("triad must be right-handed (determinant +1)")

    @classmethod
    def from_matrix(cls, m) -> "Triad":
        """Build a triad from a 3x3 matrix whose rows are the directions."""
        m = np.asarray(m, dtype=float)
        return cls(BlochVector.from_array(m[0]), BlochVector.from_array(m[1]),
                   BlochVector.from_array(m[2]))

    def as_matrix(self) -> np.ndarray:
        """Rows are the three directions."""
        return np.array([self.omega0.as_array(), self.omega1.as_array(),
                         self.omega2.as_array()])

    @property
    def directions(self) -> tuple[BlochVector, BlochVector, BlochVector]:
        return (self.omega0, self.omega1, self.omega2)


@dataclass(frozen=True)
class TriadAngles:
    """Orientation angles of a triad: polar angle ``theta`` in [0, pi],
    azimuth ``phi`` and in-plane angle ``chi`` in [-pi, pi]."""

    theta: float
    phi: float
    chi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must be in [0, pi], got {self.theta!r}")
        if not -math.pi <= self.phi <= math.pi:
            raise ValueError(f"phi must be in [-pi, pi], got {self.phi!r}")
        if not -math.pi <= self.chi <= math.pi:
            raise ValueError(f"chi must be in [-pi, pi], got {self.chi!r}")


@dataclass(frozen=True)
class CanonicalBipartite:
    """Reduced coordinates of a pair of triads: the angle ``theta`` between
    the two canonical z-like axes and the sum/difference in-plane angles.

    The fields are constrained to the canonical region
    theta in [0, pi/3], chi_minus in [0, pi/4], chi_plus in [0, pi/2].
    """

    theta: float
    chi_minus: float
    chi_plus: float

    def __post_init__(self):
        eps = 1e-9
        if not -eps <= self.theta <= REGION_THETA_MAX + eps:
            raise ValueError(f"theta outside [0, pi/3]: {self.theta!r}")
        if not -eps <= self.chi_minus <= REGION_CHI_MINUS_MAX + eps:
            raise ValueError(f"chi_minus outside [0, pi/4]: {self.chi_minus!r}")
        if not -eps <= self.chi_plus <= REGION_CHI_PLUS_MAX + eps:
            raise ValueError(f"chi_plus outside [0, pi/2]: {self.chi_plus!r}")


@dataclass(frozen=True)
class RelabelingRecord:
    """The relabelings and joint rotation that map an input triad pair to
    canonical form.

    ``first_permutation[a]`` is the source axis of the first canonical
    party's slot ``a``, with sign ``first_signs[a]`` (outcome relabeling);
    likewise for the second party.  If ``swapped`` is true, the first
    canonical party is the *second* input triad.  ``rotation`` is the joint
    rotation applied to both parties after relabeling.  Re-applying the
    record (see :func:`apply_record`) reproduces a configuration with the
    same violation structure as the input pair.
    """

    swapped: bool
    first_permutation: tuple[int, int, int]
    first_signs: tuple[int, int, int]
    second_permutation: tuple[int, int, int]
    second_signs: tuple[int, int, int]
    rotation: np.ndarray


def triad_from_angles(angles: TriadAngles) -> Triad:
    """Construct the measurement triad at the given orientation angles.

    The third direction points along (sin(theta)cos(phi), sin(theta)sin(phi),
    cos(theta)); the first two span the tangent plane, rotated by ``chi``
    inside it.  At all angles zero this returns the reference frame
    ((0,-1,0), (1,0,0), (0,0,1)).
    """
    th, ph, ch = angles.theta, angles.phi, angles.chi
    x_axis = np.array([math.sin(ph), -math.cos(ph), 0.0])
    y_axis = np.array([math.cos(th) * math.cos(ph), math.cos(th) * math.sin(ph),
                       -math.sin(th)])
    omega0 = x_axis * math.cos(ch) + y_axis * math.sin(ch)
    omega1 = -x_axis * math.sin(ch) + y_axis * math.cos(ch)
    omega2 = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph),
                       math.cos(th)])
    return Triad.from_matrix(np.array([omega0, omega1, omega2]))


def triad_to_angles(triad: Triad) -> TriadAngles:
    """Recover orientation angles from a triad.

    Inverse of :func:`triad_from_angles` away from the polar singularities
    theta in {0, pi}.  At the poles phi is set to 0 by convention and chi
    absorbs the residual in-plane rotation.
    """
    m = triad.as_matrix()
    o2 = m[2]
    theta = math.atan2(math.hypot(o2[0], o2[1]), o2[2])
    if math.hypot(o2[0], o2[1]) < 1e-12:
        phi = 0.0
    else:
        phi = math.atan2(o2[1], o2[0])
    x_axis = np.array([math.sin(phi), -math.cos(phi), 0.0])
    y_axis = np.array([math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi),
                       -math.sin(theta)])
    chi = math.atan2(float(m[0] @ y_axis), float(m[0] @ x_axis))
    return TriadAngles(theta=theta, phi=phi, chi=chi)


def rotations_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Map uniform [0,1) triples to Haar-uniform rotation matrices.

    Uses the uniform-quaternion construction: three uniforms pick a point
    on the unit 3-sphere, which double-covers the rotation group uniformly.

    Args:
        u: array of shape (..., 3) of independent uniforms in [0, 1).

    Returns:
        Array of shape (..., 3, 3) of proper rotation matrices.
    """
    u = np.asarray(u, dtype=float)
    u1, u2, u3 = u[..., 0], u[..., 1], u[..., 2]
    a, b = np.sqrt(1.0 - u1), np.sqrt(u1)
    w = a * np.sin(2.0 * np.pi * u2)
    x = a * np.cos(2.0 * np.pi * u2)
    y = b * np.sin(2.0 * np.pi * u3)
    z = b * np.cos(2.0 * np.pi * u3)
    rot = np.empty(u.shape[:-1] + (3, 3))
    rot[..., 0, 0] = 1 - 2 * (y * y + z * z)
    rot[..., 0, 1] = 2 * (x * y - z * w)
    rot[..., 0, 2] = 2 * (x * z + y * w)
    rot[..., 1, 0] = 2 * (x * y + z * w)
    rot[..., 1, 1] = 1 - 2 * (x * x + z * z)
    rot[..., 1, 2] = 2 * (y * z - x * w)
    rot[..., 2, 0] = 2 * (x * z - y * w)
    rot[..., 2, 1] = 2 * (y * z + x * w)
    rot[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return rot


def triad_matrices_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Map uniform triples of shape (..., 3) to triad row-matrices of shape
    (..., 3, 3): the reference frame rotated by a Haar-uniform rotation."""
    rot = rotations_from_uniforms(u)
    # rows[i] = rot @ reference[i]
    return np.einsum("ia,...ba->...ib", REFERENCE_FRAME, rot)


def haar_random_triads(rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` independent Haar-uniform triads as (count, 3, 3) rows."""
    return triad_matrices_from_uniforms(rng.random((count, 3)))


def haar_random_triad(rng: np.random.Generator) -> Triad:
    """Draw one triad oriented uniformly over the rotation group."""
    return Triad.from_matrix(haar_random_triads(rng, 1)[0])


def rotation_about_axis(axis, angle: float) -> np.ndarray:
    """Rotation matrix about an arbitrary axis (Rodrigues formula)."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]],
                  [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)


def apply_rotation(rotation, triad: Triad) -> Triad:
    """Rotate every direction of a triad by a proper rotation matrix.

    Raises:
        ValueError: if the matrix is not orthogonal with determinant +1
            within 1e-10.
    """
    rotation = np.asarray(rotation, dtype=float)
    if rotation.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got shape {rotation.shape}")
    if np.max(np.abs(rotation @ rotation.T - np.eye(3))) > 1e-10:
        raise ValueError("rotation matrix is not orthogonal")
    if abs(np.linalg.det(rotation) - 1.0) > 1e-10:
        raise ValueError("rotation matrix must have determinant +1")
    return Triad.from_matrix(triad.as_matrix() @ rotation.T)


# In-plane quarter turn as a signed row permutation: (o0, o1) -> (o1, -o0).
_QUARTER_TURN = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
# Axis-2 outcome flip combined with an o0/o1 swap; keeps the frame right-handed.
_FLIP_Z_SWAP = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])


def _chi_first(frame: np.ndarray) -> float:
    # frame row 2 is +z; omega0 = (sin chi, -cos chi, 0)
    return math.atan2(frame[0, 0], -frame[0, 1])


def _chi_second(frame: np.ndarray) -> float:
    # frame row 2 in the xz-plane; omega0_y = -cos chi, omega1_y = sin chi
    return math.atan2(frame[1, 1], -frame[0, 1])


def _quarter_shifts(chi_minus: float, chi_plus: float) -> tuple[int, int]:
    """Quarter-turn counts (k1, k2) for the two parties that bring
    chi_minus into [-pi/4, pi/4) and chi_plus into [-pi/2, pi/2)."""
    j = -int(math.floor(chi_minus / (math.pi / 2) + 0.5))
    m = -int(math.floor((chi_plus + j * math.pi / 2) / math.pi + 0.5))
    return j + m, m


def canonicalize_pair(t1: Triad, t2: Triad) -> tuple[CanonicalBipartite, RelabelingRecord]:
    """Reduce a pair of triads to the three canonical angles.

    A joint rotation aligns the first party's third axis with +z and puts
    the second party's canonical axis in the xz-plane.  The second party's
    axes are relabeled so that the axis closest to +/-z (there always is
    one within pi/3, since the squared projections on z sum to 1) becomes
    the third one.  In-plane quarter turns, a joint half-turn about y with
    outcome flips, and a party swap then move (chi_minus, chi_plus) into
    [0, pi/4] x [0, pi/2].  All relabelings are collected in the returned
    record; the canonical pair it produces has the same maximal violation
    as the input pair.
    """
    frames = [t1.as_matrix(), t2.as_matrix()]
    perms = [np.eye(3), np.eye(3)]  # signed permutations, rows: slot <- source
    rotation = np.eye(3)
    swapped = False

    def joint_rotate(r):
        nonlocal rotation
        rotation = r @ rotation
        frames[0] = frames[0] @ r.T
        frames[1] = frames[1] @ r.T

    def relabel(slot, p):
        frames[slot] = p @ frames[slot]
        perms[slot] = p @ perms[slot]

    # Gauge: first party's axis 2 to +z.
    a2 = frames[0][2]
    seed_axis = np.array([1.0, 0, 0]) if abs(a2[0]) < 0.9 else np.array([0, 1.0, 0])
    u = seed_axis - (seed_axis @ a2) * a2
    u /= np.linalg.norm(u)
    joint_rotate(np.array([u, np.cross(a2, u), a2]))

    # Relabel the second party: the axis closest to +/-z becomes axis 2,
    # sign-flipped onto the +z hemisphere; cyclic completion keeps the
    # frame right-handed.  argmax ties pick the lowest axis index.
    dots = frames[1][:, 2]
    j = int(np.argmax(np.abs(dots)))
    sign = 1.0 if dots[j] >= 0 else -1.0
    p = np.zeros((3, 3))
    p[0, (j + 1) % 3] = 1.0
    p[1, (j + 2) % 3] = sign
    p[2, j] = sign
    relabel(1, p)

    def align_azimuth():
        # Rotate about z so the second party's axis 2 lies in the xz-plane
        # with non-negative x.  At theta ~ 0 the azimuth is pure gauge; zero
        # the second party's in-plane angle instead.
        x, y = frames[1][2, 0], frames[1][2, 1]
        if math.hypot(x, y) > 1e-12:
            joint_rotate(rotation_about_axis([0, 0, 1], -math.atan2(y, x)))
        else:
            joint_rotate(rotation_about_axis([0, 0, 1], -_chi_second(frames[1])))

    def reduce_in_plane():
        k1, k2 = _quarter_shifts(_chi_first(frames[0]) - _chi_second(frames[1]),
                                 _chi_first(frames[0]) + _chi_second(frames[1]))
        relabel(0, np.linalg.matrix_power(_QUARTER_TURN, k1 % 4))
        relabel(1, np.linalg.matrix_power(_QUARTER_TURN, k2 % 4))

    align_azimuth()
    reduce_in_plane()

    def chi_pm():
        c1, c2 = _chi_first(frames[0]), _chi_second(frames[1])
        return c1 - c2, c1 + c2

    def negate_both():
        # Joint half-turn about y maps chi_n -> -chi_n up to a per-party
        # outcome flip of axis 2 plus an o0/o1 swap (recorded relabelings).
        joint_rotate(rotation_about_axis([0, 1, 0], math.pi))
        relabel(0, _FLIP_Z_SWAP)
        relabel(1, _FLIP_Z_SWAP)

    def swap_parties():
        nonlocal swapped
        theta = math.atan2(math.hypot(frames[1][2, 0], frames[1][2, 1]),
                           frames[1][2, 2])
        frames[0], frames[1] = frames[1], frames[0]
        perms[0], perms[1] = perms[1], perms[0]
        swapped = not swapped
        joint_rotate(rotation_about_axis([0, 0, 1], math.pi)
                     @ rotation_about_axis([0, 1, 0], -theta))

    cm, cp = chi_pm()
    if cm < 0 and cp < 0:
        negate_both()
    elif cm < 0:
        swap_parties()
    elif cp < 0:
        negate_both()
        swap_parties()
    reduce_in_plane()

    cm, cp = chi_pm()
    # Negative values only occur at roundoff or at the exact interval
    # boundaries -pi/4 / -pi/2, where both reduced inequalities are even
    # in the angle; fold them onto the region by absolute value.
    cm, cp = abs(cm), abs(cp)
    theta = math.atan2(math.hypot(frames[1][2, 0], frames[1][2, 1]), frames[1][2, 2])

    def perm_tuple(p):
        idx = tuple(int(np.argmax(np.abs(p[a]))) for a in range(3))
        sgn = tuple(int(round(p[a, idx[a]])) for a in range(3))
        return idx, sgn

    perm1, signs1 = perm_tuple(perms[0])
    perm2, signs2 = perm_tuple(perms[1])
    record = RelabelingRecord(swapped=swapped, first_permutation=perm1,
                              first_signs=signs1, second_permutation=perm2,
                              second_signs=signs2, rotation=rotation)
    return CanonicalBipartite(theta=theta, chi_minus=cm, chi_plus=cp), record


def apply_record(record: RelabelingRecord, t1: Triad, t2: Triad) -> tuple[Triad, Triad]:
    """Re-apply a relabeling record to a triad pair, reproducing the
    canonical configuration it was derived from."""
    sources = (t2, t1) if record.swapped else (t1, t2)
    out = []
    for triad, perm, signs in ((sources[0], record.first_permutation, record.first_signs),
                               (sources[1], record.second_permutation, record.second_signs)):
        m = triad.as_matrix()
        relabeled = np.array([signs[a] * m[perm[a]] for a in range(3)])
        out.append(Triad.from_matrix(relabeled @ record.rotation.T))
    return out[0], out[1]
