import time

import numpy as np

from abstract_safe_control import kernels
from abstract_safe_control._accel import backend_name

axes = np.array(
    [
        [0, 0, 1.0],
        [0, 1.0, 0],
        [0, 0, 1.0],
        [0, 1.0, 0],
        [0, 0, 1.0],
        [0, 1.0, 0],
        [0, 0, 1.0],
    ]
)
offs = np.array(
    [
        [0, 0, 0.333],
        [0, 0, 0],
        [0, 0, 0.316],
        [0.0825, 0, 0],
        [-0.0825, 0, 0.384],
        [0, 0, 0],
        [0.088, 0, 0.107],
    ]
)
pt_link = np.array([1, 3, 4, 5, 6, 6], dtype=np.int64)
pt_off = np.array(
    [
        [0, 0, 0],
        [0, 0, 0],
        [0, 0, 0],
        [0, 0, 0],
        [0, 0, 0],
        [0, 0, 0.1],
    ]
)
theta0 = np.zeros(7)
free_idx = np.arange(7, dtype=np.int64)
q = np.array([0.3, -0.5, 0.2, -1.2, 0.1, 0.8, 0.0])
qdot = np.array([0.2, -0.1, 0.3, 0.2, -0.2, 0.1, 0.05])
u_lo = -10.0 * np.ones(7)
u_hi = 10.0 * np.ones(7)
cx, cy, cz, r = 0.45, 0.1, 0.45, 0.1

print("backend:", backend_name())

t0 = time.time()
d, pid = kernels.chain_distance(axes, offs, pt_link, pt_off, theta0 + 0.1, cx, cy, cz, r)
print("compile chain_distance %.1fs d=%.4f pid=%d" % (time.time() - t0, d, pid))

t0 = time.time()
out = kernels.abstract_eval(axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot, cx, cy, cz, r, 1e-5, 1e-5)
print("compile abstract_eval %.1fs" % (time.time() - t0), out[0], out[2], out[4])

t0 = time.time()
m = kernels.m_eval(axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot, cx, cy, cz, r, u_lo, u_hi, 1e-5, 1e-5)
print("compile m_eval %.1fs M=%.3f" % (time.time() - t0, m[0]))

t0 = time.time()
g = kernels.m_gradient(axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot, cx, cy, cz, r, u_lo, u_hi, 1e-5, 1e-5, 1e-5, 0.05)
print("compile m_gradient %.1fs M0=%.3f nbad=%d" % (time.time() - t0, g[0], g[3]))

t0 = time.time()
p, J = kernels.ee_jacobian(axes, offs, pt_link, pt_off, theta0, free_idx, q, 5, 1e-5)
print("compile ee_jacobian %.1fs" % (time.time() - t0))

# timing
n = 20000
t0 = time.time()
for _ in range(n):
    kernels.abstract_eval(axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot, cx, cy, cz, r, 1e-5, 1e-5)
dt = (time.time() - t0) / n
print("abstract_eval: %.1f us" % (dt * 1e6))

n = 2000
t0 = time.time()
for _ in range(n):
    kernels.m_gradient(axes, offs, pt_link, pt_off, theta0, free_idx, q, qdot, cx, cy, cz, r, u_lo, u_hi, 1e-5, 1e-5, 1e-5, 0.05)
dt = (time.time() - t0) / n
print("m_gradient: %.1f us" % (dt * 1e6))

n = 20000
t0 = time.time()
for _ in range(n):
    kernels.ee_jacobian(axes, offs, pt_link, pt_off, theta0, free_idx, q, 5, 1e-5)
dt = (time.time() - t0) / n
print("ee_jacobian: %.1f us" % (dt * 1e6))

# batch sampling probe
N = 2000
rng = np.random.default_rng(0)
states = rng.uniform(-1, 1, size=(N, 14))
obstacles = np.tile(np.array([cx, cy, cz, r]), (N, 1))
t0 = time.time()
m_out, mdot_out, ok = kernels.sample_stats_loop(
    axes, offs, pt_link, pt_off, theta0, free_idx, states, obstacles, u_lo, u_hi, 1e-5, 1e-5, 1e-5, 0.05
)
el = time.time() - t0
print("sample_stats_loop (incl compile): N=%d %.2fs" % (N, el))
t0 = time.time()
m_out, mdot_out, ok = kernels.sample_stats_loop(
    axes, offs, pt_link, pt_off, theta0, free_idx, states, obstacles, u_lo, u_hi, 1e-5, 1e-5, 1e-5, 0.05
)
el = time.time() - t0
print("sample_stats_loop: %.2fs -> %.1f us/sample, ok=%.2f" % (el, el / N * 1e6, ok.mean()))
