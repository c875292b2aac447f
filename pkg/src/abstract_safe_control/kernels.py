"""Compiled inner loops shared by the kinematics, abstraction and sampling layers.

Everything here works on packed arrays (see ``KinematicChain.packed``) so the
functions stay numba-compatible: serial chains as (axis, offset) rows, control
points as (link index, local offset) rows, joint angles as one full-length
vector with frozen entries pre-filled.

All distances are signed sphere distances (to the obstacle surface), all
derivative kernels are central finite differences with the nearest control
point held fixed to the one selected at the evaluation state, which keeps the
differentiated function smooth across nearest-point switches.
"""

import numpy as np

from ._accel import jit

# Interval/assumption tolerance for a usable abstract control radius (m/s^2).
M_EPS = 1e-6


@jit
def _fk_frames(axes, offs, theta, Rs, ps):
    """Fill per-link rotations ``Rs`` and origins ``ps`` for angles ``theta``.

    Frame j = frame_{j-1} * translate(offs[j]) * rotate(axes[j], theta[j]).
    """
    n_j = axes.shape[0]
    r00 = 1.0
    r01 = 0.0
    r02 = 0.0
    r10 = 0.0
    r11 = 1.0
    r12 = 0.0
    r20 = 0.0
    r21 = 0.0
    r22 = 1.0
    px = 0.0
    py = 0.0
    pz = 0.0
    for j in range(n_j):
        ox = offs[j, 0]
        oy = offs[j, 1]
        oz = offs[j, 2]
        px += r00 * ox + r01 * oy + r02 * oz
        py += r10 * ox + r11 * oy + r12 * oz
        pz += r20 * ox + r21 * oy + r22 * oz

        kx = axes[j, 0]
        ky = axes[j, 1]
        kz = axes[j, 2]
        c = np.cos(theta[j])
        s = np.sin(theta[j])
        v = 1.0 - c
        a00 = c + kx * kx * v
        a01 = kx * ky * v - kz * s
        a02 = kx * kz * v + ky * s
        a10 = ky * kx * v + kz * s
        a11 = c + ky * ky * v
        a12 = ky * kz * v - kx * s
        a20 = kz * kx * v - ky * s
        a21 = kz * ky * v + kx * s
        a22 = c + kz * kz * v

        t00 = r00 * a00 + r01 * a10 + r02 * a20
        t01 = r00 * a01 + r01 * a11 + r02 * a21
        t02 = r00 * a02 + r01 * a12 + r02 * a22
        t10 = r10 * a00 + r11 * a10 + r12 * a20
        t11 = r10 * a01 + r11 * a11 + r12 * a21
        t12 = r10 * a02 + r11 * a12 + r12 * a22
        t20 = r20 * a00 + r21 * a10 + r22 * a20
        t21 = r20 * a01 + r21 * a11 + r22 * a21
        t22 = r20 * a02 + r21 * a12 + r22 * a22
        r00 = t00
        r01 = t01
        r02 = t02
        r10 = t10
        r11 = t11
        r12 = t12
        r20 = t20
        r21 = t21
        r22 = t22

        Rs[j, 0, 0] = r00
        Rs[j, 0, 1] = r01
        Rs[j, 0, 2] = r02
        Rs[j, 1, 0] = r10
        Rs[j, 1, 1] = r11
        Rs[j, 1, 2] = r12
        Rs[j, 2, 0] = r20
        Rs[j, 2, 1] = r21
        Rs[j, 2, 2] = r22
        ps[j, 0] = px
        ps[j, 1] = py
        ps[j, 2] = pz


@jit
def _point_world(Rs, ps, pt_link, pt_off, i):
    l = pt_link[i]
    ox = pt_off[i, 0]
    oy = pt_off[i, 1]
    oz = pt_off[i, 2]
    x = ps[l, 0] + Rs[l, 0, 0] * ox + Rs[l, 0, 1] * oy + Rs[l, 0, 2] * oz
    y = ps[l, 1] + Rs[l, 1, 0] * ox + Rs[l, 1, 1] * oy + Rs[l, 1, 2] * oz
    z = ps[l, 2] + Rs[l, 2, 0] * ox + Rs[l, 2, 1] * oy + Rs[l, 2, 2] * oz
    return x, y, z


@jit
def _min_distance(Rs, ps, pt_link, pt_off, cx, cy, cz, r):
    """Signed distance and argmin control point (lowest index wins ties)."""
    n_p = pt_link.shape[0]
    best = np.inf
    pid = 0
    for i in range(n_p):
        x, y, z = _point_world(Rs, ps, pt_link, pt_off, i)
        di = np.sqrt((x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2) - r
        if di < best:
            best = di
            pid = i
    return best, pid


@jit
def _point_distance(Rs, ps, pt_link, pt_off, pid, cx, cy, cz, r):
    x, y, z = _point_world(Rs, ps, pt_link, pt_off, pid)
    return np.sqrt((x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2) - r


@jit
def forward_points(axes, offs, pt_link, pt_off, theta):
    """World positions of every control point at full angle vector ``theta``."""
    n_j = axes.shape[0]
    n_p = pt_link.shape[0]
    Rs = np.empty((n_j, 3, 3))
    ps = np.empty((n_j, 3))
    _fk_frames(axes, offs, theta, Rs, ps)
    pts = np.empty((n_p, 3))
    for i in range(n_p):
        x, y, z = _point_world(Rs, ps, pt_link, pt_off, i)
        pts[i, 0] = x
        pts[i, 1] = y
        pts[i, 2] = z
    return pts


@jit
def chain_distance(axes, offs, pt_link, pt_off, theta, cx, cy, cz, r):
    n_j = axes.shape[0]
    Rs = np.empty((n_j, 3, 3))
    ps = np.empty((n_j, 3))
    _fk_frames(axes, offs, theta, Rs, ps)
    return _min_distance(Rs, ps, pt_link, pt_off, cx, cy, cz, r)


@jit
def _fill_theta(theta0, free_idx, q, theta):
    n_j = theta0.shape[0]
    for j in range(n_j):
        theta[j] = theta0[j]
    for i in range(free_idx.shape[0]):
        theta[free_idx[i]] = q[i]


@jit
def distance_jacobian(
    axes, offs, pt_link, pt_off, theta0, free_idx, q, cx, cy, cz, r, h
):
    """Signed distance, nearest point id, d(d)/dq and per-joint switch flags.

    The derivative differentiates the distance of the point that is nearest at
    ``q``; ``switched[i] != 0`` marks joints where the global argmin changes
    within +-h (a one-sided difference from the non-switching side is used
    there).
    """
    n_j = axes.shape[0]
    n_q = free_idx.shape[0]
    Rs = np.empty((n_j, 3, 3))
    ps = np.empty((n_j, 3))
    theta = np.empty(n_j)
    _fill_theta(theta0, free_idx, q, theta)
    _fk_frames(axes, offs, theta, Rs, ps)
    d0, pid = _min_distance(Rs, ps, pt_link, pt_off, cx, cy, cz, r)

    jac = np.empty(n_q)
    switched = np.zeros(n_q, dtype=np.uint8)
    for i in range(n_q):
        j = free_idx[i]
        tj = theta[j]

        theta[j] = tj + h
        _fk_frames(axes, offs, theta, Rs, ps)
        dp = _point_distance(Rs, ps, pt_link, pt_off, pid, cx, cy, cz, r)
        _, pid_p = _min_distance(Rs, ps, pt_link, pt_off, cx, cy, cz, r)

        theta[j] = tj - h
        _fk_frames(axes, offs, theta, Rs, ps)
        dm = _point_distance(Rs, ps, pt_link, pt_off, pid, cx, cy, cz, r)
        _, pid_m = _min_distance(Rs, ps, pt_link, pt_off, cx, cy, cz, r)

        theta[j] = tj
        plus_ok = pid_p == pid
        minus_ok = pid_m == pid
        if plus_ok and minus_ok:
            jac[i] = (dp - dm) / (2.0 * h)
        elif plus_ok:
            jac[i] = (dp - d0) / h
            switched[i] = 1
        elif minus_ok:
            jac[i] = (d0 - dm) / h
            switched[i] = 1
        else:
            jac[i] = (dp - dm) / (2.0 * h)
            switched[i] = 1
    return d0, pid, jac, switched


@jit
def _jac_fixed_pid(
    axes, offs, pt_link, pt_off, theta0, free_idx, q, pid, cx, cy, cz, r, h, Rs, ps, theta, jac
):
    """d(d_pid)/dq with the control point pinned; scratch buffers supplied."""
    n_q = free_idx.shape[0]
    _fill_theta(theta0, free_idx, q, theta)
    for i in range(n_q):
        j = free_idx[i]
        tj = theta[j]
        theta[j] = tj + h
        _fk_frames(axes, offs, theta, Rs, ps)
        dp = _point_distance(Rs, ps, pt_link, pt_off, pid, cx, cy, cz, r)
        theta[j] = tj - h
        _fk_frames(axes, offs, theta, Rs, ps)
        dm = _point_distance(Rs, ps, pt_link, pt_off, pid, cx, cy, cz, r)
        theta[j] = tj
        jac[i] = (dp - dm) / (2.0 * h)


@jit
def abstract_eval(
    axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot, cx, cy, cz, r, h_q, h_x
):
    """Evaluate the distance abstraction at one state.

    Returns ``(d, pid, ddot, C, off, n_switched)`` where ``ddot = C . qdot``
    and ``dddot = C . u + off`` for the double-integrator chain.  ``off`` is a
    central difference of ``ddot`` along the drift flow (u = 0), with the
    nearest control point held fixed throughout so the differentiated map is
    smooth.
    """
    n_j = axes.shape[0]
    n_q = free_idx.shape[0]
    Rs = np.empty((n_j, 3, 3))
    ps = np.empty((n_j, 3))
    theta = np.empty(n_j)
    _fill_theta(theta0, free_idx, q, theta)
    _fk_frames(axes, offs, theta, Rs, ps)
    d0, pid = _min_distance(Rs, ps, pt_link, pt_off, cx, cy, cz, r)

    d_chk, pid_chk, C, switched = distance_jacobian(
        axes, offs, pt_link, pt_off, theta0, free_idx, q, cx, cy, cz, r, h_q
    )
    n_sw = 0
    for i in range(n_q):
        if switched[i] != 0:
            n_sw += 1

    ddot = 0.0
    for i in range(n_q):
        ddot += C[i] * qdot[i]

    qnorm = 0.0
    for i in range(n_q):
        qnorm += qdot[i] * qdot[i]
    qnorm = np.sqrt(qnorm)

    off = 0.0
    if qnorm > 0.0:
        delta = h_x / qnorm
        qp = np.empty(n_q)
        qm = np.empty(n_q)
        for i in range(n_q):
            qp[i] = q[i] + delta * qdot[i]
            qm[i] = q[i] - delta * qdot[i]
        jac_p = np.empty(n_q)
        jac_m = np.empty(n_q)
        _jac_fixed_pid(
            axes, offs, pt_link, pt_off, theta0, free_idx, qp, pid,
            cx, cy, cz, r, h_q, Rs, ps, theta, jac_p,
        )
        _jac_fixed_pid(
            axes, offs, pt_link, pt_off, theta0, free_idx, qm, pid,
            cx, cy, cz, r, h_q, Rs, ps, theta, jac_m,
        )
        dd_p = 0.0
        dd_m = 0.0
        for i in range(n_q):
            dd_p += jac_p[i] * qdot[i]
            dd_m += jac_m[i] * qdot[i]
        off = (dd_p - dd_m) / (2.0 * delta)
    return d0, pid, ddot, C, off, n_sw


@jit
def interval_box(C, off, u_lo, u_hi):
    """Exact image interval of a box under v = C.u + off."""
    lo = off
    hi = off
    for i in range(C.shape[0]):
        a = C[i] * u_lo[i]
        b = C[i] * u_hi[i]
        if a < b:
            lo += a
            hi += b
        else:
            lo += b
            hi += a
    return lo, hi


@jit
def m_eval(
    axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot,
    cx, cy, cz, r, u_lo, u_hi, h_q, h_x,
):
    """Zero-centered inner radius of the abstract control interval.

    Returns ``(M, lo, hi)``; M < M_EPS means the zero-in-interior assumption
    fails at this state.
    """
    d0, pid, ddot, C, off, n_sw = abstract_eval(
        axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot, cx, cy, cz, r, h_q, h_x
    )
    lo, hi = interval_box(C, off, u_lo, u_hi)
    m = hi if hi < -lo else -lo
    return m, lo, hi


@jit
def m_gradient(
    axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot,
    cx, cy, cz, r, u_lo, u_hi, h_q, h_x, step, kink_tol,
):
    """Central-difference gradient of M over the (q, qdot) state.

    Returns ``(M0, grad, kinked, n_bad)``.  At a detected kink the one-sided
    value of larger magnitude is kept (conservative for downstream bounds).
    Coordinates where a perturbed evaluation loses the zero-in-interior
    assumption fall back to the valid side; ``n_bad`` counts coordinates where
    both sides are invalid (gradient reported as 0 there).
    """
    n_q = free_idx.shape[0]
    m0, lo0, hi0 = m_eval(
        axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot,
        cx, cy, cz, r, u_lo, u_hi, h_q, h_x,
    )
    grad = np.zeros(2 * n_q)
    kinked = np.zeros(2 * n_q, dtype=np.uint8)
    n_bad = 0
    qp = np.empty(n_q)
    qdp = np.empty(n_q)
    for c in range(2 * n_q):
        for i in range(n_q):
            qp[i] = q[i]
            qdp[i] = qdot[i]
        if c < n_q:
            qp[c] += step
        else:
            qdp[c - n_q] += step
        m_plus, _, _ = m_eval(
            axes, offs, pt_link, pt_off, theta0, free_idx, qp, qdp,
            cx, cy, cz, r, u_lo, u_hi, h_q, h_x,
        )
        if c < n_q:
            qp[c] -= 2.0 * step
        else:
            qdp[c - n_q] -= 2.0 * step
        m_minus, _, _ = m_eval(
            axes, offs, pt_link, pt_off, theta0, free_idx, qp, qdp,
            cx, cy, cz, r, u_lo, u_hi, h_q, h_x,
        )
        plus_ok = m_plus > M_EPS
        minus_ok = m_minus > M_EPS
        if plus_ok and minus_ok:
            fwd = (m_plus - m0) / step
            bwd = (m0 - m_minus) / step
            diff = fwd - bwd
            if diff < 0.0:
                diff = -diff
            scale = 1.0
            if abs(fwd) > scale:
                scale = abs(fwd)
            if abs(bwd) > scale:
                scale = abs(bwd)
            if diff > kink_tol * scale:
                kinked[c] = 1
                grad[c] = fwd if abs(fwd) >= abs(bwd) else bwd
            else:
                grad[c] = (m_plus - m_minus) / (2.0 * step)
        elif plus_ok:
            grad[c] = (m_plus - m0) / step
            kinked[c] = 1
        elif minus_ok:
            grad[c] = (m0 - m_minus) / step
            kinked[c] = 1
        else:
            n_bad += 1
    return m0, grad, kinked, n_bad


@jit
def mdot_max_box(grad, qdot, u_lo, u_hi):
    """max over box controls of grad(M) . (f + g u) for the double integrator."""
    n_q = qdot.shape[0]
    val = 0.0
    for i in range(n_q):
        val += grad[i] * qdot[i]
    for i in range(n_q):
        w = grad[n_q + i]
        a = w * u_lo[i]
        b = w * u_hi[i]
        val += b if b > a else a
    return val


@jit
def ee_jacobian(axes, offs, pt_link, pt_off, theta0, free_idx, q, ee_pid, h):
    """End-effector control point position and its 3 x n_q position Jacobian."""
    n_j = axes.shape[0]
    n_q = free_idx.shape[0]
    Rs = np.empty((n_j, 3, 3))
    ps = np.empty((n_j, 3))
    theta = np.empty(n_j)
    _fill_theta(theta0, free_idx, q, theta)
    _fk_frames(axes, offs, theta, Rs, ps)
    px, py, pz = _point_world(Rs, ps, pt_link, pt_off, ee_pid)
    p = np.empty(3)
    p[0] = px
    p[1] = py
    p[2] = pz
    J = np.empty((3, n_q))
    for i in range(n_q):
        j = free_idx[i]
        tj = theta[j]
        theta[j] = tj + h
        _fk_frames(axes, offs, theta, Rs, ps)
        xp, yp, zp = _point_world(Rs, ps, pt_link, pt_off, ee_pid)
        theta[j] = tj - h
        _fk_frames(axes, offs, theta, Rs, ps)
        xm, ym, zm = _point_world(Rs, ps, pt_link, pt_off, ee_pid)
        theta[j] = tj
        J[0, i] = (xp - xm) / (2.0 * h)
        J[1, i] = (yp - ym) / (2.0 * h)
        J[2, i] = (zp - zm) / (2.0 * h)
    return p, J


@jit
def sample_stats_loop(
    axes, offs, pt_link, pt_off, theta0, free_idx,
    states, obstacles, u_lo, u_hi, h_q, h_x, grad_step, kink_tol,
):
    """Per-sample M and max-over-u Mdot for a batch of states.

    ``states`` is (N, 2 n_q) rows of (q, qdot); ``obstacles`` is (N, 4) rows of
    (cx, cy, cz, radius).  ``ok[i] == 0`` marks states where the
    zero-in-interior assumption fails (M, Mdot left as 0).
    """
    n = states.shape[0]
    n_q = free_idx.shape[0]
    m_out = np.zeros(n)
    mdot_out = np.zeros(n)
    ok = np.zeros(n, dtype=np.uint8)
    for s in range(n):
        q = states[s, :n_q].copy()
        qdot = states[s, n_q:].copy()
        cx = obstacles[s, 0]
        cy = obstacles[s, 1]
        cz = obstacles[s, 2]
        r = obstacles[s, 3]
        m, lo, hi = m_eval(
            axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot,
            cx, cy, cz, r, u_lo, u_hi, h_q, h_x,
        )
        if m <= M_EPS:
            continue
        m0, grad, kinked, n_bad = m_gradient(
            axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot,
            cx, cy, cz, r, u_lo, u_hi, h_q, h_x, grad_step, kink_tol,
        )
        m_out[s] = m
        mdot_out[s] = mdot_max_box(grad, qdot, u_lo, u_hi)
        ok[s] = 1
    return m_out, mdot_out, ok


@jit
def lipschitz_loop(
    axes, offs, pt_link, pt_off, theta0, free_idx,
    states, deltas, obstacles, u_lo, u_hi, h_q, h_x,
):
    """|M(x + delta) - M(x)| / ||delta|| over sample pairs; ok=0 when either
    endpoint violates the zero-in-interior assumption."""
    n = states.shape[0]
    n_q = free_idx.shape[0]
    ratio = np.zeros(n)
    ok = np.zeros(n, dtype=np.uint8)
    for s in range(n):
        q = states[s, :n_q].copy()
        qdot = states[s, n_q:].copy()
        cx = obstacles[s, 0]
        cy = obstacles[s, 1]
        cz = obstacles[s, 2]
        r = obstacles[s, 3]
        m_a, _, _ = m_eval(
            axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot,
            cx, cy, cz, r, u_lo, u_hi, h_q, h_x,
        )
        if m_a <= M_EPS:
            continue
        nrm = 0.0
        for i in range(n_q):
            q[i] += deltas[s, i]
            qdot[i] += deltas[s, n_q + i]
            nrm += deltas[s, i] ** 2 + deltas[s, n_q + i] ** 2
        nrm = np.sqrt(nrm)
        if nrm == 0.0:
            continue
        m_b, _, _ = m_eval(
            axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot,
            cx, cy, cz, r, u_lo, u_hi, h_q, h_x,
        )
        if m_b <= M_EPS:
            continue
        ratio[s] = abs(m_b - m_a) / nrm
        ok[s] = 1
    return ratio, ok
