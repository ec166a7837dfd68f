"""Quaternionic Hadamard families.

Two 4x4 families (a two-parameter one with a real entry and a generic
three-parameter one) and the six 3x3 families that are unbiased to the
Fourier matrix.  The 3x3 matrices share the frame

    [[1, 1,   1  ],
     [a, a*z, a*z^2],
     [b, b*z^2, b*z]]

with z = -1/2 + s*i + t*j on the circle s^2 + t^2 = 3/4; such a frame is
automatically Hadamard, and the families pin down which (a, b, z) are also
unbiased to the Fourier matrix.  Array-valued helpers (suffix _arr) power
the grid sweeps in the MUB search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParams, DegenerateP, NoRealSolution, WrongSize
from .qmatrix import QMatrix, qconj, qmul
from .quaternion import I as QI
from .quaternion import ONE, Quaternion

R32 = math.sqrt(3.0) / 2.0
OMEGA = Quaternion(-0.5, R32, 0.0, 0.0)

FAMILY_IDS = ("generic", "s1", "s2", "s3", "s4", "s5")


def zeta_from_angle(theta: float) -> Quaternion:
    return Quaternion(-0.5, R32 * math.cos(theta), R32 * math.sin(theta), 0.0)


def circle_point(theta: float) -> tuple[float, float]:
    return R32 * math.cos(theta), R32 * math.sin(theta)


# ---------------------------------------------------------------------------
# 4x4 families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Special4Params:
    """Unit a in span{1,i} and unit b in span{1,j}."""

    a: Quaternion
    b: Quaternion

    def __post_init__(self):
        if abs(self.a.norm() - 1.0) > 1e-9 or abs(self.b.norm() - 1.0) > 1e-9:
            raise BadParams("a and b must be unit quaternions")
        if self.a.y != 0.0 or self.a.z != 0.0:
            raise BadParams("a must lie in span{1,i}")
        if self.b.x != 0.0 or self.b.z != 0.0:
            raise BadParams("b must lie in span{1,j}")


def special4(params: Special4Params) -> QMatrix:
    """Two-parameter 4x4 Hadamard family with a -1 entry."""
    a, b = params.a, params.b
    x = (ONE + a + b - a * b) * -0.5
    z = (ONE + a - b + a * b) * -0.5
    y = (ONE - a + b + a * b) * -0.5
    w = (ONE - a - b - a * b) * -0.5
    return QMatrix.from_entries([
        [ONE, ONE, ONE, ONE],
        [ONE, -ONE, b, -b],
        [ONE, a, x, z],
        [ONE, -a, y, w],
    ])


@dataclass(frozen=True)
class Generic4Params:
    """Unit a in span{1,i,j} away from -1, and unit pure x in span{i,j}."""

    a: Quaternion
    x: Quaternion

    def __post_init__(self):
        if abs(self.a.norm() - 1.0) > 1e-9 or abs(self.x.norm() - 1.0) > 1e-9:
            raise BadParams("a and x must be unit quaternions")
        if self.a.z != 0.0:
            raise BadParams("a must lie in span{1,i,j}")
        if self.x.w != 0.0 or self.x.z != 0.0:
            raise BadParams("x must be pure in span{i,j}")
        if (ONE + self.a).norm() <= 1e-9:
            raise BadParams("a = -1 is a pole of the family")


def generic4(params: Generic4Params) -> QMatrix:
    """Three-parameter 4x4 Hadamard family without real entries beyond the
    dephased frame.  The second and third rows are squares of unit
    quaternions built from a and x; the last row closes the column sums."""
    a, x = params.a, params.x
    ahat = Quaternion(a.w, a.x, 0.0, 0.0)
    u_hat_i = (ONE + ahat).normalized() * QI
    u_full = (ONE + a).normalized()
    b = u_hat_i * u_hat_i
    c = (x * u_full) * (x * u_full)
    d = (x * u_hat_i) * (x * u_hat_i)
    return QMatrix.from_entries([
        [ONE, ONE, ONE, ONE],
        [ONE, a, b, -(ONE + a + b)],
        [ONE, c, d, -(ONE + c + d)],
        [ONE, -(ONE + a + c), -(ONE + b + d), ONE + a + b + c + d],
    ])


# ---------------------------------------------------------------------------
# scalar invariants of the 3x3 problem
# ---------------------------------------------------------------------------


def p_value(a: Quaternion, s: float, t: float) -> float:
    """(a3^2 + a4^2) s + (a1 a4 - a2 a3) t."""
    return (a.y * a.y + a.z * a.z) * s + (a.w * a.z - a.x * a.y) * t


def alpha_coeffs(a: Quaternion) -> tuple[float, float, float]:
    a1, a2, a3, a4 = a.w, a.x, a.y, a.z
    alpha0 = 1 - a1 + 4 * a1 * a2 ** 2 + 2 * a1 * a4 ** 2 + 2 * a2 * a3 * a4 \
        - 2 * a3 ** 2 - 2 * a4 ** 2
    alpha1 = a1 ** 2 * a4 - a2 ** 2 * a4 + 2 * a1 * a2 * a3 - a1 * a4 + a2 * a3
    alpha2 = 1 - a1 + 4 * a1 * a2 ** 2 + 4 * a1 * a3 ** 2 - 2 * a1 * a4 ** 2 \
        - 6 * a2 * a3 * a4
    return alpha0, alpha1, alpha2


def phi_value(a: Quaternion, s: float, t: float) -> float:
    """4 alpha0 s^2 + 8 alpha1 s t + alpha2; vanishing selects the generic family."""
    alpha0, alpha1, alpha2 = alpha_coeffs(a)
    return 4 * alpha0 * s * s + 8 * alpha1 * s * t + alpha2


_BASIS = [Quaternion(1, 0, 0, 0), Quaternion(0, 1, 0, 0),
          Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)]


def _qpow3(q: Quaternion, k: int) -> Quaternion:
    out = ONE
    for _ in range(k % 3):
        out = out * q
    return out


def unbiased_system(a: Quaternion, s: float, t: float):
    """Linear system B b = v expressing unbiasedness to the Fourier matrix.

    The four equations are <1 + w^-i a z^j, 1 + w^i b z^-j> = 1 for
    i, j in {0,1}, written with the real inner product <p,q> = Re(conj(p) q).
    Rows are ordered (0,0),(0,1),(1,0),(1,1); with this order the five
    signed determinants d_i of the augmented matrix (drop column i) satisfy
    d5 = 3 p(a,s,t)^2 and 8(sum d_i^2 - d5^2) = 9 d5 phi(a,s,t).
    """
    if abs(a.norm() - 1.0) > 1e-9:
        raise BadParams("a must be a unit quaternion")
    if abs(s * s + t * t - 0.75) > 1e-9:
        raise BadParams("(s, t) must satisfy s^2 + t^2 = 3/4")
    zeta = Quaternion(-0.5, s, t, 0.0)
    abar = a.conjugate()
    b_mat = np.zeros((4, 4))
    v = np.zeros(4)
    for r, (i, j) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        wi = _qpow3(OMEGA, i)
        w2i = _qpow3(OMEGA, 2 * i)
        wmi = _qpow3(OMEGA, -i)
        zj = _qpow3(zeta, j)
        zmj = _qpow3(zeta, -j)
        for m in range(4):
            e = _BASIS[m]
            b_mat[r, m] = (wi * e * zmj).w + (zmj * abar * w2i * e * zmj).w
        v[r] = -(wmi * a * zj).w
    aug = np.hstack([b_mat, v[:, None]])
    dets = tuple(float(np.linalg.det(np.delete(aug, i, axis=1))) for i in range(5))
    return b_mat, v, dets


def family3_matrix(a: Quaternion, b: Quaternion, zeta: Quaternion) -> QMatrix:
    """The shared 3x3 Hadamard frame for the six families."""
    return QMatrix.from_entries([
        [ONE, ONE, ONE],
        [a, a * zeta, a * zeta * zeta],
        [b, b * zeta * zeta, b * zeta],
    ])


# ---------------------------------------------------------------------------
# generic 3x3 family
# ---------------------------------------------------------------------------

_SCAN_POINTS = 720


def _phi_of_theta(a: Quaternion, theta: float) -> float:
    s, t = circle_point(theta)
    return phi_value(a, s, t)


def phi_circle_roots_scan(a: Quaternion) -> list[float]:
    """Roots of phi on the (s,t) circle by bracketing a 720-point scan of the
    angle and bisecting each sign change."""
    thetas = np.linspace(0.0, 2.0 * np.pi, _SCAN_POINTS + 1)
    values = np.array([_phi_of_theta(a, th) for th in thetas])
    roots: list[float] = []
    for k in range(_SCAN_POINTS):
        lo, hi = thetas[k], thetas[k + 1]
        flo, fhi = values[k], values[k + 1]
        if flo == 0.0:
            roots.append(lo)
            continue
        if (flo < 0.0) == (fhi < 0.0):
            continue
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            fm = _phi_of_theta(a, mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm < 0.0) == (flo < 0.0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    deduped: list[float] = []
    for r in roots:
        if all(abs(r - d) > 1e-9 for d in deduped):
            deduped.append(r)
    return deduped


def solve_b(a: Quaternion, s: float, t: float) -> Quaternion:
    """Phase vector of the third row, by Cramer's rule with validated signs.

    With d_i the determinants of unbiased_system, b_m = (-1)^(m+1) d_m / d5
    (0-based m).  Falls back to a direct solve if the residual check fails.
    """
    b_mat, v, dets = unbiased_system(a, s, t)
    d5 = dets[4]
    if abs(d5) < 1e-14:
        raise DegenerateP("system determinant vanishes")
    coords = np.array([(-1) ** (m + 1) * dets[m] / d5 for m in range(4)])
    if (abs(np.linalg.norm(coords) - 1.0) > 1e-7
            or np.linalg.norm(b_mat @ coords - v) > 1e-9):
        coords = np.linalg.solve(b_mat, v)
    return Quaternion(*coords)


def generic3(a: Quaternion, branch: str = "+") -> QMatrix | None:
    """Member of the generic family above a: solve phi(a,s,t) = 0 on the
    circle, then the third-row phases by Cramer.  Returns None when phi has
    no root for this a; raises DegenerateP when p vanishes at the root (one
    of the special families covers that stratum)."""
    if abs(a.norm() - 1.0) > 1e-9:
        raise BadParams("a must be a unit quaternion")
    if branch not in ("+", "-"):
        raise BadParams("branch must be '+' or '-'")
    roots = phi_circle_roots_scan(a)
    if not roots:
        return None
    theta = roots[0] if branch == "+" or len(roots) == 1 else roots[1]
    s, t = circle_point(theta)
    if abs(p_value(a, s, t)) <= 1e-6:
        raise DegenerateP("p(a,s,t) vanishes at the selected root")
    b = solve_b(a, s, t)
    return family3_matrix(a, b, Quaternion(-0.5, s, t, 0.0))


# ---------------------------------------------------------------------------
# special 3x3 families
# ---------------------------------------------------------------------------


def _ellipse_solution(b0: np.ndarray, bw: np.ndarray, psi: float) -> np.ndarray:
    """Point with |b0 + bw @ w| = 1 along direction psi from the ellipse center."""
    m = bw.T @ bw
    c = bw.T @ b0
    center = np.linalg.solve(m, -c)
    rho = 1.0 - b0 @ b0 + c @ np.linalg.solve(m, c)
    if rho < 0.0:
        raise NoRealSolution("unit-norm constraint has no real solution here")
    u = np.array([math.cos(psi), math.sin(psi)])
    r = math.sqrt(rho / (u @ m @ u))
    w = center + r * u
    return b0 + bw @ w


def _signs(variant: int, bits: int) -> list[float]:
    if not 0 <= variant < (1 << bits):
        raise BadParams(f"variant must be in [0, {1 << bits})")
    return [1.0 if (variant >> k) & 1 == 0 else -1.0 for k in range(bits)]


def special3(family_id: str, params, variant: int = 0) -> QMatrix:
    """Member of one of the five special families.

    Continuous parameters per family (all angles in radians):
      s1: (beta, theta)   b = -1/2 + (sqrt3/2)(cos beta i + sin beta j), zeta(theta)
      s2: (theta, psi)    a = zeta or zeta^2 (variant bit 0), b completed from psi
      s3: (theta, psi)    a = omega or omega^2 (variant bit 0)
      s4: (psi,)          variant bits: sign(a2), sign(a3), sign(t)
      s5: (a1, psi)       variant bits: sign(a2), sign(a3), sign(a4), sign(t)
    The completion solves the family's linear constraints plus |b| = 1;
    NoRealSolution signals an infeasible sign combination.
    """
    params = tuple(float(p) for p in params)
    if family_id == "s1":
        if len(params) != 2:
            raise BadParams("s1 takes (beta, theta)")
        beta, theta = params
        b = Quaternion(-0.5, R32 * math.cos(beta), R32 * math.sin(beta), 0.0)
        return family3_matrix(ONE, b, zeta_from_angle(theta))
    if family_id == "s2":
        if len(params) != 2:
            raise BadParams("s2 takes (theta, psi)")
        theta, psi = params
        (sel,) = _signs(variant, 1)
        zeta = zeta_from_angle(theta)
        a = zeta if sel > 0 else zeta * zeta
        g = a.x * math.cos(psi) + a.y * math.sin(psi)
        h = a.y * math.cos(psi) - a.x * math.sin(psi)
        b = Quaternion(1.0 - 2.0 * g * g, g * math.cos(psi), g * math.sin(psi),
                       2.0 * g * h)
        return family3_matrix(a, b, zeta)
    if family_id == "s3":
        if len(params) != 2:
            raise BadParams("s3 takes (theta, psi)")
        theta, psi = params
        (sel,) = _signs(variant, 1)
        a = Quaternion(-0.5, sel * R32, 0.0, 0.0)
        b2 = a.x / 2.0 + (math.sqrt(3.0) / 4.0) * math.cos(psi)
        b3 = (math.sqrt(3.0) / 4.0) * math.sin(psi)
        b = Quaternion(1.0 - 2.0 * a.x * b2, b2, b3, 2.0 * a.x * b3)
        return family3_matrix(a, b, zeta_from_angle(theta))
    if family_id == "s4":
        if len(params) != 1:
            raise BadParams("s4 takes (psi,)")
        (psi,) = params
        e2, e3, et = _signs(variant, 3)
        a2, a3 = e2 * math.sqrt(3.0) / 4.0, e3 * math.sqrt(3.0) / 4.0
        a4 = 4.0 * a2 * a3
        a = Quaternion(0.25, a2, a3, a4)
        zeta = Quaternion(-0.5, 0.0, et * R32, 0.0)
        b0 = np.array([-0.5, 0.0, 2.0 * a3, 0.0])
        bw = np.zeros((4, 2))
        bw[0, 1] = -(4.0 / 3.0) * a4
        bw[1, 0] = 1.0
        bw[2, 0] = -(16.0 / 3.0) * a2 * a3
        bw[2, 1] = (32.0 / 9.0) * a3 * a4
        bw[3, 1] = 1.0
        b = Quaternion(*_ellipse_solution(b0, bw, psi))
        return family3_matrix(a, b, zeta)
    if family_id == "s5":
        if len(params) != 2:
            raise BadParams("s5 takes (a1, psi)")
        a1, psi = params
        if not -0.5 < a1 < 1.0:
            raise NoRealSolution("a1 must lie in (-1/2, 1)")
        e2, e3, e4, et = _signs(variant, 4)
        a2 = e2 * (1.0 - a1) / math.sqrt(3.0)
        q = (1.0 - a1) * (1.0 + 2.0 * a1) / 6.0
        a3 = e3 * math.sqrt(q)
        a4 = e4 * math.sqrt(3.0 * q)
        a = Quaternion(a1, a2, a3, a4)
        t = et * 2.0 * abs(a3)
        s = -(a1 * a4 - a2 * a3) * t / (a3 * a3 + a4 * a4)
        if abs(s * s + t * t - 0.75) > 1e-9:
            raise NoRealSolution("sign combination leaves the (s,t) circle")
        zeta = Quaternion(-0.5, s, t, 0.0)
        b0 = np.array([-0.5, (1.0 - a1) / (2.0 * a2), 0.0, 0.0])
        bw = np.zeros((4, 2))
        bw[0, 1] = -a2 / a3
        bw[1, 0] = -a3 / a2
        bw[1, 1] = 1.0 / (2.0 * a3)
        bw[2, 0] = 1.0
        bw[3, 1] = 1.0
        b = Quaternion(*_ellipse_solution(b0, bw, psi))
        return family3_matrix(a, b, zeta)
    raise BadParams(f"unknown special family {family_id!r}")


# ---------------------------------------------------------------------------
# family membership verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Family3Params:
    """Parameters read off a 3x3 family-frame matrix."""

    family_id: str
    a: Quaternion
    b: Quaternion
    s: float
    t: float


def read_family3(m: QMatrix) -> tuple[Quaternion, Quaternion, Quaternion]:
    """(a, b, zeta) read from the frame: a = M21, b = M31, zeta = conj(a) M22."""
    if m.rows != 3 or m.cols != 3:
        raise WrongSize("family frames are 3x3")
    a = m.entry(1, 0)
    b = m.entry(2, 0)
    zeta = a.conjugate() * m.entry(1, 1)
    return a, b, zeta


def read_family3_params(m: QMatrix, family_id: str) -> Family3Params:
    a, b, zeta = read_family3(m)
    return Family3Params(family_id, a, b, zeta.x, zeta.y)


def _frame_residual(m: QMatrix, a: Quaternion, b: Quaternion,
                    zeta: Quaternion) -> float:
    frame = family3_matrix(a, b, zeta)
    return float(np.max(np.abs(m.data - frame.data)))


def verify_family3(m: QMatrix, family_id: str, tol: float = 1e-9) -> bool:
    """Check the defining constraints of the named family on the parameters
    read off the matrix."""
    if family_id not in FAMILY_IDS:
        raise BadParams(f"unknown family {family_id!r}")
    a, b, zeta = read_family3(m)
    params = Family3Params(family_id, a, b, zeta.x, zeta.y)
    s, t = params.s, params.t
    checks = [
        abs(a.norm() - 1.0), abs(b.norm() - 1.0), abs(zeta.norm() - 1.0),
        abs(zeta.w + 0.5), abs(zeta.z),
        _frame_residual(m, a, b, zeta),
    ]
    if max(checks) > tol:
        return False
    pv = p_value(a, s, t)
    if family_id == "generic":
        b_mat, v, _ = unbiased_system(a, s, t)
        residuals = [abs(phi_value(a, s, t)),
                     float(np.linalg.norm(b_mat @ b.as_array() - v))]
        return max(residuals) <= tol and abs(pv) > 1e-6
    if family_id == "s1":
        residuals = [(a - ONE).norm(), abs(b.w + 0.5), abs(b.z)]
    elif family_id == "s2":
        match = min((a - zeta).norm(), (a - zeta * zeta).norm())
        residuals = [match,
                     abs(b.w - (1 - 2 * (a.x * b.x + a.y * b.y))),
                     abs(b.z - 2 * (a.y * b.x - a.x * b.y))]
    elif family_id == "s3":
        match = min((a - OMEGA).norm(), (a - OMEGA * OMEGA).norm())
        residuals = [match,
                     abs(b.w - (1 - 2 * a.x * b.x)),
                     abs(b.z - 2 * a.x * b.y)]
    elif family_id == "s4":
        residuals = [abs(a.w - 0.25), abs(a.x ** 2 - 3.0 / 16.0),
                     abs(a.y ** 2 - 3.0 / 16.0), abs(a.z - 4 * a.x * a.y),
                     abs(b.w + 0.5 + (4.0 / 3.0) * a.z * b.z),
                     abs(b.y - (2 * a.y / 3.0) * (1 - 4 * b.w - 8 * a.x * b.x)),
                     abs(s)]
    else:  # s5
        residuals = [abs(3 * a.x ** 2 - (1 - a.w) ** 2),
                     abs(6 * a.y ** 2 - (1 - a.w) * (1 + 2 * a.w)),
                     abs(a.z ** 2 - 3 * a.y ** 2),
                     abs(pv),
                     abs(b.w + 0.5 + a.x * b.z / a.y),
                     abs(b.x - ((1 - a.w) / (2 * a.x) - a.y * b.y / a.x
                                + b.z / (2 * a.y))),
                     abs(t * t - 4 * a.y ** 2)]
    return max(residuals) <= tol


# ---------------------------------------------------------------------------
# vectorized internals for grid sweeps
# ---------------------------------------------------------------------------


def alphas_arr(a: np.ndarray):
    """alpha coefficients for an (N,4) array of unit quaternions."""
    a1, a2, a3, a4 = a[:, 0], a[:, 1], a[:, 2], a[:, 3]
    alpha0 = 1 - a1 + 4 * a1 * a2 ** 2 + 2 * a1 * a4 ** 2 + 2 * a2 * a3 * a4 \
        - 2 * a3 ** 2 - 2 * a4 ** 2
    alpha1 = a1 ** 2 * a4 - a2 ** 2 * a4 + 2 * a1 * a2 * a3 - a1 * a4 + a2 * a3
    alpha2 = 1 - a1 + 4 * a1 * a2 ** 2 + 4 * a1 * a3 ** 2 - 2 * a1 * a4 ** 2 \
        - 6 * a2 * a3 * a4
    return alpha0, alpha1, alpha2


def p_arr(a: np.ndarray, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    return (a[:, 2] ** 2 + a[:, 3] ** 2) * s + (a[:, 0] * a[:, 3]
                                                - a[:, 1] * a[:, 2]) * t


def phi_circle_roots_arr(a: np.ndarray):
    """Analytic roots of phi on the circle for a batch of a values.

    On the circle phi(theta) = K + Pc cos 2theta + Qc sin 2theta, so roots
    come from a single arccos; each a contributes up to four angles.
    Returns (thetas (N,4), valid (N,4)).
    """
    alpha0, alpha1, alpha2 = alphas_arr(a)
    k = 1.5 * alpha0 + alpha2
    pc = 1.5 * alpha0
    qc = 3.0 * alpha1
    mag = np.hypot(pc, qc)
    delta = np.arctan2(qc, pc)
    with np.errstate(divide="ignore", invalid="ignore"):
        cosval = np.where(mag > 0, -k / np.where(mag > 0, mag, 1.0), 2.0)
    valid_base = (mag > 1e-15) & (np.abs(cosval) <= 1.0)
    psi = np.arccos(np.clip(cosval, -1.0, 1.0))
    th0 = 0.5 * (delta + psi)
    th1 = 0.5 * (delta - psi)
    thetas = np.stack([th0, th1, th0 + np.pi, th1 + np.pi], axis=1) % (2 * np.pi)
    valid = np.repeat(valid_base[:, None], 4, axis=1)
    return thetas, valid


def mub3_system_arr(a: np.ndarray, zeta: np.ndarray):
    """Batched unbiasedness system: (N,4,4) matrices and (N,4) right sides."""
    n = a.shape[0]
    one = np.array([1.0, 0.0, 0.0, 0.0])
    omega = OMEGA.as_array()
    b_mat = np.zeros((n, 4, 4))
    v = np.zeros((n, 4))
    abar = qconj(a)
    zeta2 = qmul(zeta, zeta)
    w_pows = [one, omega, qmul(omega, omega)]
    z_pows = [np.broadcast_to(one, a.shape), zeta, zeta2]
    basis = np.eye(4)
    for r, (i, j) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        wi = w_pows[i % 3]
        w2i = w_pows[(2 * i) % 3]
        wmi = w_pows[(-i) % 3]
        zj = z_pows[j % 3]
        zmj = z_pows[(-j) % 3]
        pre = qmul(zmj, qmul(abar, w2i))
        for m in range(4):
            e = basis[m]
            b_mat[:, r, m] = qmul(wi, qmul(e, zmj))[:, 0] \
                + qmul(pre, qmul(e, zmj))[:, 0]
        v[:, r] = -qmul(wmi, qmul(a, zj))[:, 0]
    return b_mat, v


def system_dets_arr(a: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """The five drop-a-column determinants of the augmented system, (N,5)."""
    b_mat, v = mub3_system_arr(a, zeta)
    aug = np.concatenate([b_mat, v[:, :, None]], axis=2)
    dets = np.empty((a.shape[0], 5))
    for i in range(5):
        cols = [c for c in range(5) if c != i]
        dets[:, i] = np.linalg.det(aug[:, :, cols])
    return dets


def family3_matrix_arr(a: np.ndarray, b: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """Batched family frames, shape (N,3,3,4)."""
    n = a.shape[0]
    one = np.zeros((n, 4))
    one[:, 0] = 1.0
    zeta2 = qmul(zeta, zeta)
    out = np.empty((n, 3, 3, 4))
    out[:, 0, 0] = one
    out[:, 0, 1] = one
    out[:, 0, 2] = one
    out[:, 1, 0] = a
    out[:, 1, 1] = qmul(a, zeta)
    out[:, 1, 2] = qmul(a, zeta2)
    out[:, 2, 0] = b
    out[:, 2, 1] = qmul(b, zeta2)
    out[:, 2, 2] = qmul(b, zeta)
    return out


def _zeta_arr(theta: np.ndarray) -> np.ndarray:
    out = np.zeros(theta.shape + (4,))
    out[..., 0] = -0.5
    out[..., 1] = R32 * np.cos(theta)
    out[..., 2] = R32 * np.sin(theta)
    return out


def generic_family_chunks(resolution: int, chunk_size: int = 8192,
                          p_floor: float = 1e-6):
    """Yield (N,3,3,4) batches sweeping the generic family.

    The base point a runs over a resolution^3 Euler grid on the unit
    3-sphere (offset to avoid poles); each grid point contributes its
    analytic phi roots with p bounded away from zero.
    """
    res = int(resolution)
    chi = (np.arange(res) + 0.5) * np.pi / res
    eta = (np.arange(res) + 0.5) * np.pi / res
    xi = np.arange(res) * 2.0 * np.pi / res
    grid = np.stack(np.meshgrid(chi, eta, xi, indexing="ij"), axis=-1).reshape(-1, 3)
    for start in range(0, grid.shape[0], chunk_size):
        block = grid[start:start + chunk_size]
        c1, e1, x1 = block[:, 0], block[:, 1], block[:, 2]
        a = np.stack([
            np.cos(c1),
            np.sin(c1) * np.cos(e1),
            np.sin(c1) * np.sin(e1) * np.cos(x1),
            np.sin(c1) * np.sin(e1) * np.sin(x1),
        ], axis=1)
        thetas, valid = phi_circle_roots_arr(a)
        a_rep = np.repeat(a, 4, axis=0)
        th_flat = thetas.reshape(-1)
        mask = valid.reshape(-1)
        s = R32 * np.cos(th_flat)
        t = R32 * np.sin(th_flat)
        mask &= np.abs(p_arr(a_rep, s, t)) > p_floor
        if not mask.any():
            continue
        a_sel = a_rep[mask]
        zeta = _zeta_arr(th_flat[mask])
        b_mat, v = mub3_system_arr(a_sel, zeta)
        det = np.linalg.det(b_mat)
        solvable = np.abs(det) > 1e-12
        if not solvable.any():
            continue
        a_sel, zeta = a_sel[solvable], zeta[solvable]
        b = np.linalg.solve(b_mat[solvable], v[solvable][:, :, None])[:, :, 0]
        yield family3_matrix_arr(a_sel, b, zeta)


def special_family_points(family_id: str, resolution: int) -> np.ndarray:
    """All grid points of a special family at the given per-axis resolution,
    as an (N,3,3,4) array.  Infeasible sign combinations are skipped."""
    res = int(resolution)
    angles = np.arange(res) * 2.0 * np.pi / res
    frames = []
    if family_id == "s1":
        combos = [(b, th) for b in angles for th in angles]
        for prm in combos:
            frames.append(special3("s1", prm).data)
    elif family_id in ("s2", "s3"):
        for variant in (0, 1):
            for th in angles:
                for psi in angles:
                    frames.append(special3(family_id, (th, psi), variant).data)
    elif family_id == "s4":
        for variant in range(8):
            for psi in angles:
                try:
                    frames.append(special3("s4", (psi,), variant).data)
                except NoRealSolution:
                    continue
    elif family_id == "s5":
        a1_grid = -0.5 + (np.arange(res) + 0.5) * 1.5 / res
        for variant in range(16):
            for a1 in a1_grid:
                for psi in angles:
                    try:
                        frames.append(special3("s5", (a1, psi), variant).data)
                    except NoRealSolution:
                        continue
    else:
        raise BadParams(f"unknown special family {family_id!r}")
    if not frames:
        return np.zeros((0, 3, 3, 4))
    return np.array(frames)
