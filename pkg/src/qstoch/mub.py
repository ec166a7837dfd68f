"""Mutually unbiased bases over H^n.

A basis is a symplectic matrix whose columns are the basis vectors; a set
of bases is unbiased when every cross inner product has squared norm 1/n.
The size of such a set is at most 2n+1; the bound is attained for n = 2.
For n = 3 the module carries the two explicit four-element families, a
grid-plus-stabilizer extension search over the third-basis families, and a
direct descent search used to cross-check maximality claims.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hadamard
from .errors import (BadParams, DimensionMismatch, NotNormalized,
                     NotSymplectic, TooManyBases)
from .qmatrix import (QMatrix, fourier, gram_schmidt_columns, identity, qconj,
                      qmat_adjoint, qmat_eye, qmat_mul, qmul, qnormsq,
                      random_quaternion_array, read_matrix_text, write_qmat)
from .quaternion import ONE, Quaternion

UNBIASED_TOL = 1e-9
SYMPLECTIC_TOL = 1e-9


def cross_gram_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """Max deviation of the squared norms of (A* B) entries from 1/n."""
    n = a.shape[0]
    gram = qmat_mul(qmat_adjoint(a), b)
    return float(np.max(np.abs(qnormsq(gram) - 1.0 / n)))


def is_unbiased(a: QMatrix, b: QMatrix, tol: float = UNBIASED_TOL) -> bool:
    """True when all squared cross inner products equal 1/n within tol.

    Equivalently sqrt(n) A*B is a Hadamard matrix.
    """
    if a.rows != b.rows or a.cols != b.cols or not a.is_square:
        raise DimensionMismatch("unbiasedness needs two square matrices of one size")
    for m in (a, b):
        if m.unitary_defect() > 1e-8:
            raise NotSymplectic("bases must be symplectic within 1e-8")
    return cross_gram_deviation(a.data, b.data) <= tol


@dataclass(frozen=True)
class MubSet:
    """Ordered collection of pairwise unbiased orthonormal bases."""

    n: int
    bases: tuple[QMatrix, ...]

    def __post_init__(self):
        if len(self.bases) > 2 * self.n + 1:
            raise TooManyBases(
                f"{len(self.bases)} bases exceed the bound {2 * self.n + 1}")
        for b in self.bases:
            if b.rows != self.n or b.cols != self.n:
                raise DimensionMismatch("all bases must be n x n")
            if b.unitary_defect() > SYMPLECTIC_TOL:
                raise NotSymplectic("basis fails the symplectic check at 1e-9")
        for i in range(len(self.bases)):
            for j in range(i + 1, len(self.bases)):
                dev = cross_gram_deviation(self.bases[i].data, self.bases[j].data)
                if dev > UNBIASED_TOL:
                    raise BadParams(
                        f"bases {i} and {j} are not unbiased (deviation {dev:.2e})")

    def __len__(self) -> int:
        return len(self.bases)


# ---------------------------------------------------------------------------
# explicit families
# ---------------------------------------------------------------------------


def complete_mub_h2() -> MubSet:
    """The five-element (= 2n+1) set for n = 2: identity plus the four
    sign matrices with second rows (q, -q) for q in {1, i, j, k}."""
    s = 1.0 / math.sqrt(2.0)
    bases = [identity(2)]
    for axis in range(4):
        arr = np.zeros((2, 2, 4))
        arr[0, 0, 0] = arr[0, 1, 0] = s
        arr[1, 0, axis] = s
        arr[1, 1, axis] = -s
        bases.append(QMatrix(arr))
    return MubSet(2, tuple(bases))


def _check_cube_root(q: Quaternion, name: str) -> None:
    if (abs(q.norm() - 1.0) > 1e-9 or abs(q.w + 0.5) > 1e-9
            or abs(q.z) > 1e-9):
        raise BadParams(f"{name} must be -1/2 + s i + t j with s^2 + t^2 = 3/4")


def one_param_h3(s: float, t: float) -> MubSet:
    """Four bases {I, F_3, A(s,t)/sqrt3, A(-s,-t)/sqrt3} with A the circulant
    with diagonal zeta = -1/2 + s i + t j."""
    if abs(s * s + t * t - 0.75) > 1e-9:
        raise BadParams("(s,t) must lie on the circle s^2 + t^2 = 3/4")
    root3 = math.sqrt(3.0)

    def circ(sv: float, tv: float) -> QMatrix:
        zeta = Quaternion(-0.5, sv, tv, 0.0)
        return QMatrix.from_entries([
            [zeta, ONE, ONE],
            [ONE, zeta, ONE],
            [ONE, ONE, zeta],
        ]) / root3

    return MubSet(3, (identity(3), fourier(3), circ(s, t), circ(-s, -t)))


def three_param_h3(a: Quaternion, b: Quaternion, c: Quaternion) -> MubSet:
    """Four bases {I, F_3, A/sqrt3, B/sqrt3} indexed by three quaternionic
    cube roots of unity orthogonal to k."""
    for q, name in ((a, "a"), (b, "b"), (c, "c")):
        _check_cube_root(q, name)
    root3 = math.sqrt(3.0)
    bbar = b.conjugate()
    mat_a = QMatrix.from_entries([
        [ONE, ONE, ONE],
        [ONE, a, a * a],
        [b, b * a * a, b * a],
    ]) / root3
    mat_b = QMatrix.from_entries([
        [ONE, ONE, ONE],
        [ONE, c, c * c],
        [bbar, bbar * c * c, bbar * c],
    ]) / root3
    return MubSet(3, (identity(3), fourier(3), mat_a, mat_b))


# ---------------------------------------------------------------------------
# operator-frame orthogonality
# ---------------------------------------------------------------------------


def qtrace(m: np.ndarray) -> float:
    """Trace of a quaternion matrix: twice the sum of the diagonal scalar parts."""
    return 2.0 * float(np.sum(m[np.arange(m.shape[0]), np.arange(m.shape[0]), 0]))


def operator_frame_orthogonality(mubset) -> float:
    """Max |Tr(E_i F_j)| over cross-basis pairs, where E_i is the projector
    onto the i-th basis vector minus I/n.  Vanishes exactly on unbiased
    sets.  Accepts a MubSet or a plain sequence of bases (the latter is
    handy for measuring how far a biased collection is from unbiased)."""
    bases = mubset.bases if isinstance(mubset, MubSet) else tuple(mubset)
    n = bases[0].rows
    eyeq = qmat_eye(n) / n
    ops = []
    for basis in bases:
        cols = basis.data  # (n, n, 4), column j is cols[:, j, :]
        basis_ops = []
        for j in range(n):
            e = cols[:, j, :]
            outer = qmul(e[:, None, :], qconj(e[None, :, :]))
            basis_ops.append(outer - eyeq)
        ops.append(basis_ops)
    worst = 0.0
    for bi in range(len(ops)):
        for bj in range(bi + 1, len(ops)):
            for ei in ops[bi]:
                for fj in ops[bj]:
                    worst = max(worst, abs(qtrace(qmat_mul(ei, fj))))
    return worst


# ---------------------------------------------------------------------------
# mub set files: concatenated QMAT blocks separated by blank lines
# ---------------------------------------------------------------------------


def write_mubset(mubset: MubSet) -> str:
    return "\n".join(write_qmat(b) for b in mubset.bases)


def read_mubset_matrices(text: str) -> list[QMatrix]:
    blocks = [blk for blk in text.split("\n\n") if blk.strip()]
    bases = []
    for blk in blocks:
        kind, m = read_matrix_text(blk)
        bases.append(m if kind == "qmat" else QMatrix.from_real(m))
    if not bases:
        raise BadParams("no matrices in mub set file")
    return bases


def read_mubset(text: str) -> MubSet:
    bases = read_mubset_matrices(text)
    return MubSet(bases[0].rows, tuple(bases))


# ---------------------------------------------------------------------------
# descent on Sp(n): shared by the polish step and the direct search
# ---------------------------------------------------------------------------

_HAMILTON = np.zeros((4, 4, 4))
for _a in range(4):
    for _b in range(4):
        _ea, _eb = np.zeros(4), np.zeros(4)
        _ea[_a] = 1.0
        _eb[_b] = 1.0
        _HAMILTON[_a, _b] = qmul(_ea, _eb)
_CONJ_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])


def _violation(w: np.ndarray, targets: list[np.ndarray]) -> float:
    return max(cross_gram_deviation(w, b) for b in targets)


def _smooth_objective(w: np.ndarray, targets: list[np.ndarray]):
    """Sum of squared deviations of |(W*B)_ij|^2 from 1/n, with its
    Euclidean gradient in the 4n^2 real coordinates of W."""
    n = w.shape[0]
    grad = np.zeros_like(w)
    value = 0.0
    wadj = qmat_adjoint(w)
    for b in targets:
        y = qmat_mul(wadj, b)
        dev = qnormsq(y) - 1.0 / n
        value += float(np.sum(dev * dev))
        gy = 4.0 * dev[..., None] * y
        grad += _CONJ_SIGNS[None, None, :] * np.einsum(
            "abc,kjb,ijc->kia", _HAMILTON, b, gy, optimize=True)
    return value, grad


def _riemannian_grad(w: np.ndarray, euclid: np.ndarray) -> np.ndarray:
    """Project the Euclidean gradient onto the tangent space at W."""
    wg = qmat_mul(qmat_adjoint(w), euclid)
    herm = 0.5 * (wg + qmat_adjoint(wg))
    return euclid - qmat_mul(w, herm)


def _descend(start: np.ndarray, targets: list[np.ndarray], max_iter: int = 2000,
             viol_goal: float = 1e-10):
    """Backtracking gradient descent with a Gram-Schmidt retraction."""
    w = gram_schmidt_columns(start.copy())
    value, grad = _smooth_objective(w, targets)
    step = 0.1
    for _ in range(max_iter):
        rgrad = _riemannian_grad(w, grad)
        gnorm2 = float(np.sum(rgrad * rgrad))
        if gnorm2 < 1e-30 or _violation(w, targets) <= viol_goal:
            break
        moved = False
        while step > 1e-14:
            cand = gram_schmidt_columns(w - step * rgrad)
            cand_value, cand_grad = _smooth_objective(cand, targets)
            if cand_value <= value - 0.3 * step * gnorm2:
                w, value, grad = cand, cand_value, cand_grad
                step *= 1.5
                moved = True
                break
            step *= 0.5
        if not moved:
            break
    return w, _violation(w, targets)


def direct_maximality_search(mubset: MubSet, restarts: int = 50,
                             seed: int = 0) -> tuple[float, QMatrix]:
    """Descent over Sp(n) for a basis unbiased to every member of the set.

    Returns the smallest violation found and the achieving matrix.  A
    violation bounded away from zero across restarts is evidence (not
    proof) that the set is maximal; a violation below 1e-8 exhibits an
    extension.
    """
    targets = [b.data for b in mubset.bases]
    n = mubset.n
    best_viol = np.inf
    best_w = None
    for r in range(restarts):
        rng = np.random.default_rng(seed * 1_000_003 + r)
        start = gram_schmidt_columns(random_quaternion_array((n, n), rng))
        w, viol = _descend(start, targets)
        if viol < best_viol:
            best_viol = viol
            best_w = w
    return float(best_viol), QMatrix(best_w)


# ---------------------------------------------------------------------------
# extension search over the third-basis families
# ---------------------------------------------------------------------------


def _conj_transforms(conj_grid: int) -> np.ndarray:
    """Component maps of entrywise conjugation by e^{i theta} and by
    j e^{i theta}: a rotation by 2 theta in the (j,k) plane, optionally
    followed by the flip that negates i and k."""
    thetas = np.arange(conj_grid) * np.pi / conj_grid
    out = np.zeros((2 * conj_grid, 4, 4))
    flip = np.diag([1.0, -1.0, 1.0, -1.0])
    for g, th in enumerate(thetas):
        c, s = np.cos(2 * th), np.sin(2 * th)
        rot = np.array([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, c, -s],
            [0.0, 0.0, s, c],
        ])
        out[g] = rot
        out[conj_grid + g] = flip @ rot
    return out


_OMEGA_ARR = hadamard.OMEGA.as_array()
_OMEGA2_ARR = qmul(_OMEGA_ARR, _OMEGA_ARR)
_W_POWS = [np.array([1.0, 0.0, 0.0, 0.0]), _OMEGA_ARR, _OMEGA2_ARR]


def _left_move(batch: np.ndarray, shift: int, zpow: int) -> np.ndarray:
    """Apply the cyclic row shift and the clock-phase row scaling that
    stabilize the identity/Fourier pair up to right monomials."""
    out = np.roll(batch, -shift, axis=-3)
    if zpow % 3:
        for row in range(3):
            scale = _W_POWS[(zpow * row) % 3]
            out[..., row, :, :] = qmul(scale, out[..., row, :, :])
    return out


_MOVES = [(m, p) for m in range(3) for p in range(3)]
_SURVIVOR_BATCH = 1 << 15


@dataclass
class _SearchState:
    checked: int = 0
    near_misses: int = 0


def _family_batches(grid: int, chunk: int = 4096):
    for batch in hadamard.generic_family_chunks(grid, chunk_size=chunk):
        for start in range(0, batch.shape[0], chunk):
            yield "generic", batch[start:start + chunk]
    for fam in ("s1", "s2", "s3", "s4", "s5"):
        pts = hadamard.special_family_points(fam, grid)
        for start in range(0, pts.shape[0], chunk):
            yield fam, pts[start:start + chunk]


def extend_search(mubset: MubSet, grid: int = 64, conj_grid: int = 32,
                  state: _SearchState | None = None) -> QMatrix | None:
    """Grid search for a basis extending a normalized 3x3 set.

    Sweeps the six third-basis families at the given per-parameter grid
    resolution; each family matrix is pushed through the stabilizer moves
    of the (I, F_3) pair (cyclic row shifts and clock-phase row scalings)
    and entrywise conjugations by e^{i theta} and j e^{i theta}.  A
    candidate within 1e-3 of unbiasedness to the whole set is polished by
    local descent and accepted only below 1e-9.  Candidates are scanned in
    a fixed order (family, grid point, move, conjugation angle), so the
    first hit is deterministic.  Returns None when the sweep is exhausted,
    which is maximality evidence at this resolution only.
    """
    if mubset.n != 3:
        raise NotNormalized("extension search is implemented for n = 3")
    if len(mubset.bases) < 2:
        raise NotNormalized("need at least the identity/Fourier prefix")
    if not mubset.bases[0].approx_eq(identity(3), 1e-9) \
            or not mubset.bases[1].approx_eq(fourier(3), 1e-9):
        raise NotNormalized("set must start with the identity and Fourier bases")
    if state is None:
        state = _SearchState()
    targets = [b.data for b in mubset.bases]
    transforms = _conj_transforms(conj_grid)
    n_conj = transforms.shape[0]
    root3 = math.sqrt(3.0)
    probe = targets[2][:, 0, :] if len(targets) > 2 else targets[1][:, 0, :]
    coarse_tol = 1e-3

    for _fam, batch in _family_batches(grid):
        count = batch.shape[0]
        if count == 0:
            continue
        moved = np.stack([_left_move(batch, m, p) for m, p in _MOVES])
        # prefilter on a single cross inner product: first candidate column
        # against the probe column, under every conjugation at once
        col0 = qconj(moved[:, :, :, 0, :])  # (9, N, 3, 4)
        rotated = np.einsum("xcd,mnkd->mxnkc", transforms, col0, optimize=True)
        inner = qmul(rotated, probe[None, None, None, :, :]).sum(axis=-2)
        pre_dev = np.abs(qnormsq(inner) / 3.0 - 1.0 / 3.0)
        mask = pre_dev <= coarse_tol + 1e-9  # (9, n_conj, N)
        state.checked += mask.size
        if not mask.any():
            continue
        midx, xidx, nidx = np.nonzero(mask)
        order = np.lexsort((xidx, midx, nidx))
        midx, xidx, nidx = midx[order], xidx[order], nidx[order]
        for lo in range(0, midx.size, _SURVIVOR_BATCH):
            hi = min(lo + _SURVIVOR_BATCH, midx.size)
            cands = np.einsum("scd,sijd->sijc", transforms[xidx[lo:hi]],
                              moved[midx[lo:hi], nidx[lo:hi]],
                              optimize=True) / root3
            devs = np.empty(cands.shape[0])
            for t in targets:
                grams = qmat_mul(np.swapaxes(qconj(cands), -3, -2), t[None])
                dv = np.max(np.abs(qnormsq(grams) - 1.0 / 3.0), axis=(-2, -1))
                devs = dv if t is targets[0] else np.maximum(devs, dv)
            for pos in range(cands.shape[0]):
                if devs[pos] <= 1e-9:
                    return QMatrix(cands[pos])
                if devs[pos] <= coarse_tol:
                    state.near_misses += 1
                    polished, viol = _descend(cands[pos], targets)
                    if viol <= 1e-9:
                        return QMatrix(polished)
    return None
