"""Solver-agnostic conic standard form for the two convex subproblems, plus a
Clarabel-backed solver honoring a deterministic accuracy contract.

A program maximizes a single epigraph variable subject to linear inequalities,
second-order cones ||Ax+b|| <= c.x+d, and rotated cones ||Ax+b||^2 <= 2 u v.
Complex decision quantities are stored as interleaved (real, imag) pairs so a
squared magnitude is exactly a 2-vector norm squared.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import clarabel
import numpy as np
from scipy import sparse

from .config import SystemConfig

OPTIMAL = "optimal"
NEAR_OPTIMAL = "near_optimal"
INFEASIBLE = "infeasible"
NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class LinearConstraint:
    """a . x <= ub"""
    a: np.ndarray
    ub: float


@dataclass(frozen=True)
class SocConstraint:
    """||A x + b|| <= c . x + d"""
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float


@dataclass(frozen=True)
class RotatedConeConstraint:
    """||A x + b||^2 <= 2 (cu.x + du)(cv.x + dv), both factors >= 0"""
    A: np.ndarray
    b: np.ndarray
    cu: np.ndarray
    du: float
    cv: np.ndarray
    dv: float


@dataclass(frozen=True)
class ConicProgram:
    num_vars: int
    objective_var: int            # maximize x[objective_var]
    constraints: tuple
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SolveOutcome:
    status: str                   # optimal | near_optimal | infeasible | numerical_failure
    objective: float
    x: np.ndarray
    iterations: int
    wall_ms: float


def constraint_residuals(program: ConicProgram, x: np.ndarray) -> np.ndarray:
    """Signed violation per constraint (<= 0 means satisfied)."""
    out = []
    for con in program.constraints:
        if isinstance(con, LinearConstraint):
            out.append(float(con.a @ x - con.ub))
        elif isinstance(con, SocConstraint):
            out.append(float(np.linalg.norm(con.A @ x + con.b) - (con.c @ x + con.d)))
        else:
            u = con.cu @ x + con.du
            v = con.cv @ x + con.dv
            quad = float(np.sum((con.A @ x + con.b) ** 2) - 2 * u * v)
            out.append(max(quad, -u, -v))
    return np.array(out)


def dump_program(program: ConicProgram) -> str:
    """Plain-text form, one constraint per line, for external cross-checking."""
    lines = [f"vars {program.num_vars} maximize x{program.objective_var}"]

    def vec(a):
        return " ".join(f"{v:.17g}" for v in np.asarray(a).ravel())

    for con in program.constraints:
        if isinstance(con, LinearConstraint):
            lines.append(f"lin {vec(con.a)} <= {con.ub:.17g}")
        elif isinstance(con, SocConstraint):
            rows = ";".join(vec(r) for r in con.A)
            lines.append(f"soc ||[{rows}]x + [{vec(con.b)}]|| <= [{vec(con.c)}]x + {con.d:.17g}")
        else:
            rows = ";".join(vec(r) for r in con.A)
            lines.append(
                f"rot ||[{rows}]x + [{vec(con.b)}]||^2 <= 2([{vec(con.cu)}]x + {con.du:.17g})"
                f"([{vec(con.cv)}]x + {con.dv:.17g})"
            )
    return "\n".join(lines) + "\n"


def _settings() -> clarabel.DefaultSettings:
    s = clarabel.DefaultSettings()
    s.verbose = False
    s.tol_gap_abs = 1e-12
    s.tol_gap_rel = 1e-10
    s.tol_feas = 1e-10
    s.max_iter = 200
    return s


_STATUS_MAP = {
    "Solved": OPTIMAL,
    "AlmostSolved": NEAR_OPTIMAL,
    "PrimalInfeasible": INFEASIBLE,
    "DualInfeasible": INFEASIBLE,
    "AlmostPrimalInfeasible": INFEASIBLE,
    "AlmostDualInfeasible": INFEASIBLE,
}


def solve(program: ConicProgram) -> SolveOutcome:
    """Lower the program to Clarabel cones and solve.

    Deterministic for identical inputs; rotated cones are rewritten as standard
    second-order cones via ||[u-v, sqrt(2) y]|| <= u+v.
    """
    n = program.num_vars
    lin_rows, lin_rhs = [], []
    cone_rows, cone_rhs, cones = [], [], []
    for con in program.constraints:
        if isinstance(con, LinearConstraint):
            lin_rows.append(con.a)
            lin_rhs.append(con.ub)
        elif isinstance(con, SocConstraint):
            block = np.vstack([-con.c, -con.A])
            rhs = np.concatenate([[con.d], con.b])
            cone_rows.append(block)
            cone_rhs.append(rhs)
            cones.append(clarabel.SecondOrderConeT(block.shape[0]))
        else:
            s2 = np.sqrt(2.0)
            block = np.vstack([-(con.cu + con.cv), -(con.cu - con.cv), -s2 * con.A])
            rhs = np.concatenate([[con.du + con.dv], [con.du - con.dv], s2 * con.b])
            cone_rows.append(block)
            cone_rhs.append(rhs)
            cones.append(clarabel.SecondOrderConeT(block.shape[0]))

    blocks, rhs, cone_list = [], [], []
    if lin_rows:
        blocks.append(np.vstack(lin_rows))
        rhs.append(np.asarray(lin_rhs, dtype=float))
        cone_list.append(clarabel.NonnegativeConeT(len(lin_rows)))
    blocks.extend(cone_rows)
    rhs.extend(cone_rhs)
    cone_list.extend(cones)

    A = sparse.csc_matrix(np.vstack(blocks))
    b = np.concatenate(rhs)
    q = np.zeros(n)
    q[program.objective_var] = -1.0
    P = sparse.csc_matrix((n, n))

    t0 = time.perf_counter()
    solver = clarabel.DefaultSolver(P, q, A, b, cone_list, _settings())
    sol = solver.solve()
    wall_ms = (time.perf_counter() - t0) * 1e3

    status = _STATUS_MAP.get(str(sol.status), NUMERICAL_FAILURE)
    x = np.asarray(sol.x) if status in (OPTIMAL, NEAR_OPTIMAL) else np.full(n, np.nan)
    objective = float(x[program.objective_var]) if status in (OPTIMAL, NEAR_OPTIMAL) else np.nan
    return SolveOutcome(status, objective, x, int(sol.iterations), wall_ms)


# ---------------------------------------------------------------------------
# Beamforming subproblem: max t s.t. per-user surrogate >= t, total power cone.
# ---------------------------------------------------------------------------

def _w_index(m: int, n_ant: int, n: int) -> tuple[int, int]:
    base = 2 * (m * n_ant + n)
    return base, base + 1


def build_beamforming_program(h: np.ndarray, z: np.ndarray, group_of: np.ndarray,
                              config: SystemConfig) -> ConicProgram:
    """Lower the fixed-pointing precoder subproblem to conic form.

    Internally rescales to unit noise and unit power budget (h_hat = h sqrt(Pt)/sigma,
    w_hat = w/sqrt(Pt), z_hat = z sigma); the substitution is exact, keeps every
    residual identical to the watts-scale quadratic, and keeps the coefficient
    dynamic range within what equilibration can handle. Decision vector:
    [interleaved Re/Im of w_hat (2NM), t, one interference slack per user (M>=2)].
    """
    h = np.asarray(h)
    z = np.asarray(z, dtype=complex)
    group_of = np.asarray(group_of, dtype=int)
    k_users, n_ant = h.shape
    m_groups = config.num_groups
    if z.shape != (k_users,) or group_of.shape != (k_users,):
        raise ValueError("h, z, group_of disagree on the number of users")
    if n_ant != config.num_antennas or group_of.max() >= m_groups:
        raise ValueError("dimensions inconsistent with config")
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(z))):
        raise ValueError("nonfinite channel or auxiliary values")

    sigma = np.sqrt(config.noise_power)
    w_scale = np.sqrt(config.transmit_power_budget)
    h_hat = h * (w_scale / sigma)
    z_hat = z * sigma

    nw = 2 * n_ant * m_groups
    t_idx = nw
    has_slack = m_groups >= 2
    num_vars = nw + 1 + (k_users if has_slack else 0)

    cons = []
    for k in range(k_users):
        m = group_of[k]
        alpha = np.conj(z_hat[k]) * h_hat[k]          # (N,)
        a = np.zeros(num_vars)
        for n in range(n_ant):
            re_i, im_i = _w_index(m, n_ant, n)
            a[re_i] = -2 * alpha[n].real
            a[im_i] = 2 * alpha[n].imag
        a[t_idx] = 1.0
        zsq = float(np.abs(z_hat[k]) ** 2)
        if has_slack:
            q_idx = nw + 1 + k
            a[q_idx] = zsq
            cons.append(LinearConstraint(a, -zsq))
            rows = []
            for j in range(m_groups):
                if j == m:
                    continue
                re_row = np.zeros(num_vars)
                im_row = np.zeros(num_vars)
                for n in range(n_ant):
                    re_i, im_i = _w_index(j, n_ant, n)
                    re_row[re_i] = h_hat[k, n].real
                    re_row[im_i] = -h_hat[k, n].imag
                    im_row[re_i] = h_hat[k, n].imag
                    im_row[im_i] = h_hat[k, n].real
                rows.extend([re_row, im_row])
            cu = np.zeros(num_vars)
            cu[q_idx] = 1.0
            cons.append(
                RotatedConeConstraint(np.vstack(rows), np.zeros(len(rows)),
                                      cu, 0.0, np.zeros(num_vars), 0.5)
            )
        else:
            cons.append(LinearConstraint(a, -zsq))

    power_A = np.zeros((nw, num_vars))
    power_A[np.arange(nw), np.arange(nw)] = 1.0
    cons.append(SocConstraint(power_A, np.zeros(nw), np.zeros(num_vars), 1.0))

    meta = {"kind": "beamforming", "num_antennas": n_ant, "num_groups": m_groups,
            "num_users": k_users, "w_scale": w_scale, "t_index": t_idx,
            "noise_scale": sigma}
    return ConicProgram(num_vars, t_idx, tuple(cons), meta)


def unpack_beamforming(program: ConicProgram, x: np.ndarray) -> tuple[np.ndarray, float]:
    """Recover (W in watts^(1/2), t) from a beamforming program solution."""
    meta = program.meta
    n_ant, m_groups = meta["num_antennas"], meta["num_groups"]
    w = np.empty((n_ant, m_groups), dtype=complex)
    for m in range(m_groups):
        for n in range(n_ant):
            re_i, im_i = _w_index(m, n_ant, n)
            w[n, m] = x[re_i] + 1j * x[im_i]
    return w * meta["w_scale"], float(x[meta["t_index"]])


def embed_beamforming_point(program: ConicProgram, w: np.ndarray, h: np.ndarray,
                            group_of: np.ndarray, config: SystemConfig) -> np.ndarray:
    """Decision vector for a given W with exact interference slacks (test aid)."""
    meta = program.meta
    x = np.zeros(program.num_vars)
    w_hat = w / meta["w_scale"]
    for m in range(meta["num_groups"]):
        for n in range(meta["num_antennas"]):
            re_i, im_i = _w_index(m, meta["num_antennas"], n)
            x[re_i] = w_hat[n, m].real
            x[im_i] = w_hat[n, m].imag
    if meta["num_groups"] >= 2:
        h_hat = h * (meta["w_scale"] / meta["noise_scale"])
        power = np.abs(h_hat @ w_hat) ** 2
        kk = np.arange(h.shape[0])
        interference = power.sum(axis=1) - power[kk, group_of]
        x[meta["t_index"] + 1:] = interference
    return x


# ---------------------------------------------------------------------------
# Boresight subproblem: max t s.t. linearized surrogate minus shared proximal
# term >= t per user, unit ball per antenna, zenith cone per antenna.
# ---------------------------------------------------------------------------

def build_boresight_program(bundle, config: SystemConfig, f_prev: np.ndarray | None = None) -> ConicProgram:
    """Lower one surrogate step over the pointing matrix to conic form.

    All user constraints share the same ||F - F_prev||_F^2 regularizer, so a
    single rotated cone defines r >= ||vec(F) - vec(F_prev)||^2 and each user
    row charges it with its own aggregate curvature Lambda_k / 2.
    """
    if f_prev is None:
        f_prev = bundle.f_prev
    n_ant = f_prev.shape[1]
    lam = np.asarray(bundle.curvature)
    grad = np.asarray(bundle.grad)                 # (K, 3N)
    const = np.asarray(bundle.const)
    if np.any(lam < 0):
        raise ValueError("negative aggregate curvature")
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(grad)) and np.all(np.isfinite(const))):
        raise ValueError("nonfinite surrogate coefficients")

    nf = 3 * n_ant
    t_idx = nf
    r_idx = nf + 1
    num_vars = nf + 2
    vec_prev = f_prev.reshape(-1, order="F")       # f_n contiguous at [3n:3n+3]

    cons = []
    for k in range(const.shape[0]):
        a = np.zeros(num_vars)
        a[:nf] = -grad[k]
        a[t_idx] = 1.0
        a[r_idx] = lam[k] / 2.0
        cons.append(LinearConstraint(a, float(const[k] - grad[k] @ vec_prev)))

    prox_A = np.zeros((nf, num_vars))
    prox_A[np.arange(nf), np.arange(nf)] = 1.0
    cu = np.zeros(num_vars)
    cu[r_idx] = 1.0
    cons.append(RotatedConeConstraint(prox_A, -vec_prev, cu, 0.0, np.zeros(num_vars), 0.5))

    cos_max = float(np.cos(config.max_zenith))
    for n in range(n_ant):
        ball_A = np.zeros((3, num_vars))
        ball_A[np.arange(3), 3 * n + np.arange(3)] = 1.0
        cons.append(SocConstraint(ball_A, np.zeros(3), np.zeros(num_vars), 1.0))
        a = np.zeros(num_vars)
        a[3 * n] = -1.0
        cons.append(LinearConstraint(a, -cos_max))

    meta = {"kind": "pointing", "num_antennas": n_ant, "t_index": t_idx}
    return ConicProgram(num_vars, t_idx, tuple(cons), meta)


def unpack_pointing(program: ConicProgram, x: np.ndarray) -> tuple[np.ndarray, float]:
    n_ant = program.meta["num_antennas"]
    f = x[: 3 * n_ant].reshape(3, n_ant, order="F")
    return f, float(x[program.meta["t_index"]])
