"""Metric-based existence construction on the quaternion bundle.

The bundle of unit quaternions over the 2-sphere is a Riemannian
submersion for the round metrics, so minimizing base arcs have unique
horizontal lifts.  Translating the lift endpoint onto the second point of
a pair defines a discrete connection form; this module implements that
construction by explicit Runge-Kutta integration, the equivalent closed
form, and a known variant (geodesic in the total space, then project and
lift) that fails equivariance and serves as the counterexample.

The per-stage velocity solves three conditions: tangency to the total
sphere, horizontality with respect to the vertical direction i*q, and
matching the base velocity under the differential of the projection,
d(project)(q)[h] = conj(h) i q + conj(q) i h.  The resulting linear
system is solved in least-squares form (normal equations) at every
stage, and the state is renormalized to the sphere after each step.

All constructions are pure; forms built here are immutable and safe for
concurrent evaluation.  Evaluation of many pairs at once runs the same
integrator vectorized over the batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import CircleElement, Q_I, Quaternion, UnitQuaternion
from .bundle import HopfBundle
from .connection import DiscreteConnectionForm
from .errors import AntipodalPoints, OutOfRange, SolveFailed

#: pairs whose fiber phase square sum falls below this are out of domain
DOMAIN_BUFFER = 1e-12
#: inner-product guard below which base points count as antipodal
ANTIPODAL_DOT_BUFFER = 1e-9
#: fiber tolerance applied when translating integrated endpoints
LIFT_FIBER_ATOL = 1e-3
#: looser endpoint guard for the variant construction, whose projected
#: paths can approach length 2*pi on near-antipodal total-space pairs
LMW_FIBER_ATOL = 5e-2
#: default number of Runge-Kutta steps
DEFAULT_STEPS = 256

_HOPF = HopfBundle()


# ---------------------------------------------------------------------------
# tangent vectors and the continuous connection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TangentVector:
    """Displacement ``vec`` attached at ``base``; tangent for sphere bases."""

    base: object
    vec: Quaternion

    def __post_init__(self):
        if isinstance(self.base, Quaternion):
            inner = self.base.dot(self.vec)
            if abs(inner) > 1e-9:
                raise ValueError(f"vector is not tangent: <vec, base> = {inner:.3e}")


@dataclass(frozen=True)
class ConnectionSplit:
    """Vertical coordinate and the vertical/horizontal parts of a tangent vector."""

    xi: float
    vertical: TangentVector
    horizontal: TangentVector


def infinitesimal_generator(xi: float, q: UnitQuaternion) -> TangentVector:
    """Velocity xi * (i q) of the circle action through q."""
    return TangentVector(q, xi * (Q_I * q))


def continuous_connection_form(v: TangentVector) -> ConnectionSplit:
    """Vertical coordinate of a tangent vector at a total point, with its split.

    The vertical direction at q is i*q, of unit length for unit q, so the
    coordinate is the plain inner product and v decomposes as
    xi * (i q) + horizontal with the horizontal part orthogonal to i*q.
    """
    q = v.base
    vertical_dir = Q_I * q
    xi = v.vec.dot(vertical_dir)
    vertical = xi * vertical_dir
    horizontal = v.vec - vertical
    return ConnectionSplit(xi, TangentVector(q, vertical), TangentVector(q, horizontal))


# ---------------------------------------------------------------------------
# base geodesics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicSegment:
    """Constant-speed minimizing arc on the base sphere over the unit interval."""

    start: Quaternion
    end: Quaternion
    evaluator: Callable[[float], Quaternion]
    velocity: Callable[[float], TangentVector]
    length: float


def base_geodesic(r0: Quaternion, r1: Quaternion) -> GeodesicSegment:
    """Great-circle arc between non-antipodal base points, unit-interval parametrized.

    Arcs are invariant under rescaling the round metric, so lengths are
    reported in the plain round metric.
    """
    dot = r0.dot(r1)
    if dot <= -1.0 + ANTIPODAL_DOT_BUFFER:
        raise AntipodalPoints("no unique minimizing arc between antipodal base points")
    omega = math.acos(min(1.0, max(-1.0, dot)))
    sin_omega = math.sin(omega)

    if sin_omega < 1e-9:
        def evaluator(t: float) -> Quaternion:
            p = r0 + t * (r1 - r0)
            return p.normalized()

        def velocity(t: float) -> TangentVector:
            return TangentVector(evaluator(t), r1 - r0)
    else:
        def evaluator(t: float) -> Quaternion:
            return (math.sin((1.0 - t) * omega) / sin_omega) * r0 \
                + (math.sin(t * omega) / sin_omega) * r1

        def velocity(t: float) -> TangentVector:
            vec = (omega / sin_omega) * (
                (-math.cos((1.0 - t) * omega)) * r0 + math.cos(t * omega) * r1)
            return TangentVector(evaluator(t), vec)

    return GeodesicSegment(r0, r1, evaluator, velocity, omega)


# ---------------------------------------------------------------------------
# vectorized quaternion helpers (rows are w, x, y, z components)
# ---------------------------------------------------------------------------

def _qmul_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    w1, x1, y1, z1 = a[:, 0], a[:, 1], a[:, 2], a[:, 3]
    w2, x2, y2, z2 = b[:, 0], b[:, 1], b[:, 2], b[:, 3]
    out = np.empty_like(a)
    out[:, 0] = w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2
    out[:, 1] = w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2
    out[:, 2] = w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2
    out[:, 3] = w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2
    return out


def _conj_rows(a: np.ndarray) -> np.ndarray:
    out = a.copy()
    out[:, 1:] *= -1.0
    return out


def _project_rows(q: np.ndarray) -> np.ndarray:
    """Base points of total rows: imaginary components of conj(q) i q."""
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    out = np.empty((q.shape[0], 3))
    out[:, 0] = w * w + x * x - y * y - z * z
    out[:, 1] = 2.0 * (x * y - w * z)
    out[:, 2] = 2.0 * (w * y + x * z)
    return out


def _normalize_rows(q: np.ndarray) -> np.ndarray:
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def _slerp_rows(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    """Row-wise great-circle interpolation, valid for parameters beyond [0, 1]."""
    dot = np.clip(np.sum(a * b, axis=1), -1.0, 1.0)
    omega = np.arccos(dot)
    sin_omega = np.sin(omega)
    small = sin_omega < 1e-9
    safe = np.where(small, 1.0, sin_omega)
    out = (np.sin((1.0 - t) * omega) / safe)[:, None] * a \
        + (np.sin(t * omega) / safe)[:, None] * b
    if small.any():
        out[small] = (a + t * (b - a))[small]
    return _normalize_rows(out)


# ---------------------------------------------------------------------------
# the horizontal integrator
# ---------------------------------------------------------------------------

def _stage_rows(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Per-row horizontal velocity solving tangency, horizontality and the
    base-velocity condition in least-squares form via normal equations."""
    n = q.shape[0]
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    a = np.empty((n, 5, 4))
    # row 0: tangency <h, q> = 0
    a[:, 0, 0] = w; a[:, 0, 1] = x; a[:, 0, 2] = y; a[:, 0, 3] = z
    # row 1: horizontality <h, i q> = 0
    a[:, 1, 0] = -x; a[:, 1, 1] = w; a[:, 1, 2] = -z; a[:, 1, 3] = y
    # rows 2-4: imaginary components of conj(h) i q + conj(q) i h
    a[:, 2, 0] = 2.0 * w; a[:, 2, 1] = 2.0 * x; a[:, 2, 2] = -2.0 * y; a[:, 2, 3] = -2.0 * z
    a[:, 3, 0] = -2.0 * z; a[:, 3, 1] = 2.0 * y; a[:, 3, 2] = 2.0 * x; a[:, 3, 3] = -2.0 * w
    a[:, 4, 0] = 2.0 * y; a[:, 4, 1] = 2.0 * z; a[:, 4, 2] = 2.0 * w; a[:, 4, 3] = 2.0 * x
    b = np.zeros((n, 5))
    b[:, 2:] = v
    at = a.transpose(0, 2, 1)
    gram = at @ a
    rhs = at @ b[:, :, None]
    try:
        h = np.linalg.solve(gram, rhs)[:, :, 0]
    except np.linalg.LinAlgError as exc:
        raise SolveFailed("singular stage system in the horizontal lift") from exc
    if not np.all(np.isfinite(h)):
        raise SolveFailed("non-finite stage velocity in the horizontal lift")
    return h


def _integrate_rows(q0: np.ndarray,
                    velocity_fn: Callable[[float], np.ndarray],
                    steps: int,
                    collect: bool = False):
    """Classical four-stage Runge-Kutta over the unit interval.

    ``velocity_fn(t)`` returns the base velocities (rows) at time t; the
    state is renormalized to the sphere after every step.  Returns the
    final rows plus, when ``collect``, the sampled times, states and the
    first-stage velocities.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    q = q0.copy()
    dt = 1.0 / steps
    v_t = velocity_fn(0.0)
    times = [0.0]
    path = [q.copy()] if collect else None
    vels = [] if collect else None
    for n in range(steps):
        t = n * dt
        v_mid = velocity_fn(t + 0.5 * dt)
        v_next = velocity_fn((n + 1) * dt)
        k1 = _stage_rows(q, v_t)
        k2 = _stage_rows(q + (0.5 * dt) * k1, v_mid)
        k3 = _stage_rows(q + (0.5 * dt) * k2, v_mid)
        k4 = _stage_rows(q + dt * k3, v_next)
        q = q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        q = _normalize_rows(q)
        if collect:
            vels.append(k1)
            path.append(q.copy())
            times.append((n + 1) * dt)
        v_t = v_next
    return q, times, path, vels


def _slerp_velocity_rows(r0: np.ndarray, r1: np.ndarray) -> Callable[[float], np.ndarray]:
    """Velocity field of the row-wise constant-speed arcs from r0 to r1."""
    dot = np.clip(np.sum(r0 * r1, axis=1), -1.0, 1.0)
    if np.any(dot <= -1.0 + ANTIPODAL_DOT_BUFFER):
        raise AntipodalPoints("no unique minimizing arc between antipodal base points")
    omega = np.arccos(dot)
    sin_omega = np.sin(omega)
    small = sin_omega < 1e-9
    scale = np.where(small, 0.0, omega / np.where(small, 1.0, sin_omega))

    def velocity(t: float) -> np.ndarray:
        v = scale[:, None] * (-np.cos((1.0 - t) * omega)[:, None] * r0
                              + np.cos(t * omega)[:, None] * r1)
        if small.any():
            v[small] = (r1 - r0)[small]
        return v

    return velocity


# ---------------------------------------------------------------------------
# single-path lifting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftResult:
    """Outcome of lifting one base arc: endpoint, optional samples, step count."""

    endpoint: UnitQuaternion
    trajectory: Optional[list]
    velocity_samples: Optional[list]
    steps: int


def horizontal_lift_path(segment: GeodesicSegment, q0: UnitQuaternion,
                         steps: int, *, store_path: bool = False) -> LiftResult:
    """Horizontal lift of a base arc starting at q0.

    The start of the segment must be the base point of q0 (within 1e-9).
    With ``store_path`` the sampled trajectory and the per-step stage
    velocities are retained; each stored velocity is horizontal by
    construction, which the trajectory invariants test.
    """
    r_start = _HOPF.project(q0)
    if _HOPF.base_distance(r_start, segment.evaluator(0.0)) > 1e-9:
        raise ValueError("q0 does not lie over the start of the base segment")

    def velocity_fn(t: float) -> np.ndarray:
        vec = segment.velocity(t).vec
        return np.array([[vec.x, vec.y, vec.z]])

    rows = np.array([q0.components()])
    end, times, path, vels = _integrate_rows(rows, velocity_fn, steps,
                                             collect=store_path)
    endpoint = UnitQuaternion(*end[0])
    trajectory = None
    velocity_samples = None
    if store_path:
        trajectory = [(t, UnitQuaternion(*p[0])) for t, p in zip(times, path)]
        velocity_samples = [
            TangentVector(trajectory[n][1], Quaternion(*k[0]))
            for n, k in enumerate(vels)
        ]
    return LiftResult(endpoint, trajectory, velocity_samples, steps)


# ---------------------------------------------------------------------------
# connection forms on the quaternion bundle
# ---------------------------------------------------------------------------

def _phase_square_sum(q0: UnitQuaternion, q1: UnitQuaternion) -> float:
    u = q1 * q0.conj()
    return u.w * u.w + u.x * u.x


def _hopf_in_domain(q0, q1) -> bool:
    return _phase_square_sum(q0, q1) > DOMAIN_BUFFER


def hopf_closed_form() -> DiscreteConnectionForm:
    """Closed-form connection on the quaternion bundle.

    The value at (q0, q1) is the phase of the complex part of
    q1 * conj(q0), defined whenever that part is nonzero.
    """
    def ev(q0: UnitQuaternion, q1: UnitQuaternion) -> CircleElement:
        u = q1 * q0.conj()
        return CircleElement(math.atan2(u.x, u.w))

    return DiscreteConnectionForm(_HOPF, ev, _hopf_in_domain, "closed-form")


def _translate_endpoints(end_rows: np.ndarray, q1s: Sequence[UnitQuaternion],
                         atol: float = LIFT_FIBER_ATOL):
    q1_rows = np.array([q.components() for q in q1s])
    base_err = np.linalg.norm(_project_rows(end_rows) - _project_rows(q1_rows),
                              axis=1)
    if np.any(base_err > atol):
        raise SolveFailed(
            f"integrated endpoint strayed {base_err.max():.3e} from the target fiber")
    u = _qmul_rows(q1_rows, _conj_rows(end_rows))
    return [CircleElement(math.atan2(row[1], row[0])) for row in u]


def riemannian_form(steps: int = DEFAULT_STEPS) -> DiscreteConnectionForm:
    """Connection built by lifting base arcs and translating endpoints.

    evaluate(q0, q1) lifts the minimizing base arc between the projections
    of q0 and q1, starting at q0, with ``steps`` Runge-Kutta steps, then
    translates the endpoint onto q1.  Batch evaluation vectorizes the same
    integrator over all pairs.
    """
    def ev(q0: UnitQuaternion, q1: UnitQuaternion) -> CircleElement:
        segment = base_geodesic(_HOPF.project(q0), _HOPF.project(q1))
        result = horizontal_lift_path(segment, q0, steps)
        return _HOPF.fiber_translation(result.endpoint, q1, atol=LIFT_FIBER_ATOL)

    def ev_many(pairs) -> list[CircleElement]:
        q0_rows = np.array([p[0].components() for p in pairs])
        q1_rows = np.array([p[1].components() for p in pairs])
        velocity = _slerp_velocity_rows(_project_rows(q0_rows), _project_rows(q1_rows))
        end, _, _, _ = _integrate_rows(q0_rows, velocity, steps)
        return _translate_endpoints(end, [p[1] for p in pairs])

    return DiscreteConnectionForm(_HOPF, ev, _hopf_in_domain, "geodesic-built",
                                  evaluate_many_fn=ev_many)


def _lmw_in_domain(q0: UnitQuaternion, q1: UnitQuaternion) -> bool:
    return q0.dot(q1) > -1.0 + ANTIPODAL_DOT_BUFFER


def lmw_form(steps: int = DEFAULT_STEPS) -> DiscreteConnectionForm:
    """Variant construction: total-space arc, projected, then lifted.

    For a pair (q0, q1) the minimizing arc from q0 to q1 in the total
    sphere is projected to the base (in general not a geodesic there),
    the projected path is lifted horizontally from q0 using its velocity
    obtained by central finite differences with step 1/steps, and the
    endpoint is translated onto q1.  The result intentionally fails
    equivariance, so the returned object is flagged as a non-connection.
    """
    def angles(pairs) -> list[CircleElement]:
        q0_rows = np.array([p[0].components() for p in pairs])
        q1_rows = np.array([p[1].components() for p in pairs])
        delta = 1.0 / steps

        def projected(t: float) -> np.ndarray:
            return _project_rows(_slerp_rows(q0_rows, q1_rows, t))

        def velocity(t: float) -> np.ndarray:
            return (projected(t + delta) - projected(t - delta)) / (2.0 * delta)

        end, _, _, _ = _integrate_rows(q0_rows, velocity, steps)
        return _translate_endpoints(end, [p[1] for p in pairs], atol=LMW_FIBER_ATOL)

    def ev(q0, q1) -> CircleElement:
        return angles([(q0, q1)])[0]

    return DiscreteConnectionForm(
        _HOPF, ev, _lmw_in_domain, "lmw-variant",
        evaluate_many_fn=angles,
        flagged_non_connection=True,
        out_of_domain_error=AntipodalPoints,
    )


def beta_formula(theta: float) -> float:
    """Closed-form phase of the variant construction along the witness family.

    Defined for theta in the open interval (-pi/4, pi/4); its derivative
    at zero is arccos(1/sqrt(2)) = pi/4, against the equivariant
    prediction of slope one.
    """
    if not (-math.pi / 4.0 < theta < math.pi / 4.0):
        raise OutOfRange("theta must lie in the open interval (-pi/4, pi/4)")
    c = math.cos(theta)
    return math.sin(theta) * math.acos(c / math.sqrt(2.0)) / math.sqrt(2.0 - c * c)
