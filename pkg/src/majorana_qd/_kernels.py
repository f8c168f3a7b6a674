"""Inner loops of the memory-kernel integrator.

Two implementations share one contract:

* ``*_loops`` -- explicit loops, compiled with numba when available;
* ``*_numpy`` -- vectorised numpy, used when numba is disabled.

All arrays are complex128 8x8 in the Hamiltonian eigenbasis unless noted.
The dissipator is evaluated as

    rhs = -i w*rho + Y + Y^dag,
    Y   = [Lp rho, d] + [Lm rho, d^dag],   Lp = Gp * D,  Lm = Gm * D^dag

with ``D = <E_j|d^dag|E_l>`` and ``w = E_j - E_l`` (``*`` is elementwise).
"""

import numpy as np

from ._accel import HAVE_NUMBA, njit


def simpson_weights(n_points):
    w = np.ones(n_points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w


# -- numpy path ---------------------------------------------------------------


def simpson_accumulate_numpy(gp, gm, ap, am, u0, du, omega):
    n = ap.shape[0]
    w = simpson_weights(n) * (du / 3.0)
    u = u0 + du * np.arange(n)
    phase = np.exp(-1j * u[:, None, None] * omega)
    gp += np.tensordot(w * ap, phase, 1)
    gm += np.tensordot(w * am, phase, 1)


def rhs_numpy(rho, omega, lp, lm, d, dh):
    a = lp @ rho
    b = lm @ rho
    y = a @ dh - dh @ a + b @ d - d @ b
    return -1j * omega * rho + y + y.conj().T


def rk4_steps_numpy(rho, gp, gm, omega, d, dh, ap, am, k0, nsteps, du, m):
    h = 4 * m * du
    half = 2 * m
    for step in range(nsteps):
        k = k0 + step * 2 * half
        lp0, lm0 = gp * d, gm * dh
        simpson_accumulate_numpy(gp, gm, ap[k : k + half + 1], am[k : k + half + 1], k * du, du, omega)
        lp1, lm1 = gp * d, gm * dh
        k2_ = k + half
        simpson_accumulate_numpy(gp, gm, ap[k2_ : k2_ + half + 1], am[k2_ : k2_ + half + 1], k2_ * du, du, omega)
        lp2, lm2 = gp * d, gm * dh
        s1 = rhs_numpy(rho, omega, lp0, lm0, d, dh)
        s2 = rhs_numpy(rho + 0.5 * h * s1, omega, lp1, lm1, d, dh)
        s3 = rhs_numpy(rho + 0.5 * h * s2, omega, lp1, lm1, d, dh)
        s4 = rhs_numpy(rho + h * s3, omega, lp2, lm2, d, dh)
        rho += (h / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4)


# -- loop path ----------------------------------------------------------------


def simpson_accumulate_loops(gp, gm, ap, am, u0, du, omega):
    n = ap.shape[0]
    dim = omega.shape[0]
    for k in range(n):
        if k == 0 or k == n - 1:
            w = 1.0
        elif k % 2 == 1:
            w = 4.0
        else:
            w = 2.0
        cp = ap[k] * (w * du / 3.0)
        cm = am[k] * (w * du / 3.0)
        u = u0 + k * du
        for j in range(dim):
            for l in range(j, dim):
                ph = np.exp(-1j * u * omega[j, l])
                gp[j, l] += cp * ph
                gm[j, l] += cm * ph
                if l != j:
                    phc = np.conj(ph)
                    gp[l, j] += cp * phc
                    gm[l, j] += cm * phc


def _matmul_loops(a, b, out):
    dim = a.shape[0]
    for i in range(dim):
        for j in range(dim):
            acc = 0j
            for k in range(dim):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc


def rhs_loops(rho, omega, lp, lm, d, dh, out):
    dim = rho.shape[0]
    a = np.empty_like(rho)
    b = np.empty_like(rho)
    t1 = np.empty_like(rho)
    t2 = np.empty_like(rho)
    y = np.zeros_like(rho)
    _matmul_loops(lp, rho, a)
    _matmul_loops(lm, rho, b)
    _matmul_loops(a, dh, t1)
    _matmul_loops(dh, a, t2)
    for i in range(dim):
        for j in range(dim):
            y[i, j] = t1[i, j] - t2[i, j]
    _matmul_loops(b, d, t1)
    _matmul_loops(d, b, t2)
    for i in range(dim):
        for j in range(dim):
            y[i, j] += t1[i, j] - t2[i, j]
    for i in range(dim):
        for j in range(dim):
            out[i, j] = -1j * omega[i, j] * rho[i, j] + y[i, j] + np.conj(y[j, i])


def rk4_steps_loops(rho, gp, gm, omega, d, dh, ap, am, k0, nsteps, du, m):
    dim = rho.shape[0]
    h = 4 * m * du
    half = 2 * m
    lp0 = np.empty_like(rho)
    lm0 = np.empty_like(rho)
    lp1 = np.empty_like(rho)
    lm1 = np.empty_like(rho)
    lp2 = np.empty_like(rho)
    lm2 = np.empty_like(rho)
    s1 = np.empty_like(rho)
    s2 = np.empty_like(rho)
    s3 = np.empty_like(rho)
    s4 = np.empty_like(rho)
    tmp = np.empty_like(rho)
    for step in range(nsteps):
        k = k0 + step * 2 * half
        for i in range(dim):
            for j in range(dim):
                lp0[i, j] = gp[i, j] * d[i, j]
                lm0[i, j] = gm[i, j] * dh[i, j]
        simpson_accumulate_loops(gp, gm, ap[k : k + half + 1], am[k : k + half + 1], k * du, du, omega)
        for i in range(dim):
            for j in range(dim):
                lp1[i, j] = gp[i, j] * d[i, j]
                lm1[i, j] = gm[i, j] * dh[i, j]
        k2_ = k + half
        simpson_accumulate_loops(gp, gm, ap[k2_ : k2_ + half + 1], am[k2_ : k2_ + half + 1], k2_ * du, du, omega)
        for i in range(dim):
            for j in range(dim):
                lp2[i, j] = gp[i, j] * d[i, j]
                lm2[i, j] = gm[i, j] * dh[i, j]
        rhs_loops(rho, omega, lp0, lm0, d, dh, s1)
        for i in range(dim):
            for j in range(dim):
                tmp[i, j] = rho[i, j] + 0.5 * h * s1[i, j]
        rhs_loops(tmp, omega, lp1, lm1, d, dh, s2)
        for i in range(dim):
            for j in range(dim):
                tmp[i, j] = rho[i, j] + 0.5 * h * s2[i, j]
        rhs_loops(tmp, omega, lp1, lm1, d, dh, s3)
        for i in range(dim):
            for j in range(dim):
                tmp[i, j] = rho[i, j] + h * s3[i, j]
        rhs_loops(tmp, omega, lp2, lm2, d, dh, s4)
        for i in range(dim):
            for j in range(dim):
                rho[i, j] += (h / 6.0) * (s1[i, j] + 2.0 * s2[i, j] + 2.0 * s3[i, j] + s4[i, j])


if HAVE_NUMBA:
    simpson_accumulate_loops = njit(simpson_accumulate_loops)
    _matmul_loops = njit(_matmul_loops)
    rhs_loops = njit(rhs_loops)
    rk4_steps_loops = njit(rk4_steps_loops)
    simpson_accumulate = simpson_accumulate_loops
    rk4_steps = rk4_steps_loops
else:
    simpson_accumulate = simpson_accumulate_numpy
    rk4_steps = rk4_steps_numpy
