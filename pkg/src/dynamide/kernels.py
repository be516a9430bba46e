"""Time-stepping kernels.

Every kernel exists twice: a ``*_nb`` version written as explicit loops and
compiled with numba, and a ``*_np`` version using whole-array numpy
operations per step.  The unsuffixed name is bound to one of them depending
on :data:`dynamide._accel.USE_NUMBA`.  Both versions take and return the
same arrays so they can be swapped freely (the test suite checks they agree).
"""
import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = [
    "verlet_chain",
    "rk4_two_level",
    "rk4_secular",
    "rk4_full",
    "rk4_driven",
    "KERNELS",
]


# ---------------------------------------------------------------------------
# dynamide chain, velocity Verlet
#
# Cell j holds u-[j] and u+[j].  chi_t couples the pair, k couples u+[j] to
# u-[j+1] (periodic).

def _chain_forces_np(um, up, chi_t, k):
    ump1 = np.roll(um, -1)
    upm1 = np.roll(up, 1)
    fm = -chi_t * (um - up) - k * (um - upm1)
    fp = -chi_t * (up - um) - k * (up - ump1)
    return fm, fp


def _chain_energy_np(um, up, vm, vp, chi_t, k, theta):
    kin = 0.5 * theta * (np.dot(vm, vm) + np.dot(vp, vp))
    d_in = up - um
    d_out = np.roll(um, -1) - up
    return kin + 0.5 * chi_t * np.dot(d_in, d_in) + 0.5 * k * np.dot(d_out, d_out)


def verlet_chain_np(um, up, vm, vp, chi_t, k, theta, dt, n_steps, stride):
    n = um.shape[0]
    um = um.astype(np.float64).copy()
    up = up.astype(np.float64).copy()
    vm = vm.astype(np.float64).copy()
    vp = vp.astype(np.float64).copy()
    n_samples = n_steps // stride + 1
    disp = np.empty((n_samples, n, 2))
    vel = np.empty((n_samples, n, 2))
    energy = np.empty(n_steps + 1)
    disp[0, :, 0], disp[0, :, 1] = um, up
    vel[0, :, 0], vel[0, :, 1] = vm, vp
    energy[0] = _chain_energy_np(um, up, vm, vp, chi_t, k, theta)
    fm, fp = _chain_forces_np(um, up, chi_t, k)
    half = 0.5 * dt / theta
    for step in range(1, n_steps + 1):
        vm += half * fm
        vp += half * fp
        um += dt * vm
        up += dt * vp
        fm, fp = _chain_forces_np(um, up, chi_t, k)
        vm += half * fm
        vp += half * fp
        energy[step] = _chain_energy_np(um, up, vm, vp, chi_t, k, theta)
        if step % stride == 0:
            i = step // stride
            disp[i, :, 0], disp[i, :, 1] = um, up
            vel[i, :, 0], vel[i, :, 1] = vm, vp
    return disp, vel, energy


@njit
def _chain_forces_nb(um, up, chi_t, k, fm, fp):
    n = um.shape[0]
    for j in range(n):
        jm = j - 1 if j > 0 else n - 1
        jp = j + 1 if j < n - 1 else 0
        fm[j] = -chi_t * (um[j] - up[j]) - k * (um[j] - up[jm])
        fp[j] = -chi_t * (up[j] - um[j]) - k * (up[j] - um[jp])


@njit
def _chain_energy_nb(um, up, vm, vp, chi_t, k, theta):
    n = um.shape[0]
    kin = 0.0
    pot = 0.0
    for j in range(n):
        jp = j + 1 if j < n - 1 else 0
        kin += vm[j] * vm[j] + vp[j] * vp[j]
        d_in = up[j] - um[j]
        d_out = um[jp] - up[j]
        pot += chi_t * d_in * d_in + k * d_out * d_out
    return 0.5 * theta * kin + 0.5 * pot


@njit
def verlet_chain_nb(um, up, vm, vp, chi_t, k, theta, dt, n_steps, stride):
    n = um.shape[0]
    um = um.astype(np.float64).copy()
    up = up.astype(np.float64).copy()
    vm = vm.astype(np.float64).copy()
    vp = vp.astype(np.float64).copy()
    n_samples = n_steps // stride + 1
    disp = np.empty((n_samples, n, 2))
    vel = np.empty((n_samples, n, 2))
    energy = np.empty(n_steps + 1)
    for j in range(n):
        disp[0, j, 0] = um[j]
        disp[0, j, 1] = up[j]
        vel[0, j, 0] = vm[j]
        vel[0, j, 1] = vp[j]
    energy[0] = _chain_energy_nb(um, up, vm, vp, chi_t, k, theta)
    fm = np.empty(n)
    fp = np.empty(n)
    _chain_forces_nb(um, up, chi_t, k, fm, fp)
    half = 0.5 * dt / theta
    for step in range(1, n_steps + 1):
        for j in range(n):
            vm[j] += half * fm[j]
            vp[j] += half * fp[j]
            um[j] += dt * vm[j]
            up[j] += dt * vp[j]
        _chain_forces_nb(um, up, chi_t, k, fm, fp)
        for j in range(n):
            vm[j] += half * fm[j]
            vp[j] += half * fp[j]
        energy[step] = _chain_energy_nb(um, up, vm, vp, chi_t, k, theta)
        if step % stride == 0:
            i = step // stride
            for j in range(n):
                disp[i, j, 0] = um[j]
                disp[i, j, 1] = up[j]
                vel[i, j, 0] = vm[j]
                vel[i, j, 1] = vp[j]
    return disp, vel, energy


# ---------------------------------------------------------------------------
# two-level emission equations, classical RK4
#   l1' =  A l1 |l2|^2,  l2' = -A l2 |l1|^2

def rk4_two_level_np(l1, l2, rate, h, n_steps):
    out = np.empty((n_steps + 1, 2), dtype=np.complex128)
    y = np.array([l1, l2], dtype=np.complex128)
    sign = np.array([rate, -rate])
    out[0] = y

    def f(y):
        w = np.abs(y[::-1]) ** 2
        return sign * y * w

    for i in range(1, n_steps + 1):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i] = y
    return out


@njit
def rk4_two_level_nb(l1, l2, rate, h, n_steps):
    out = np.empty((n_steps + 1, 2), dtype=np.complex128)
    a = complex(l1)
    b = complex(l2)
    out[0, 0] = a
    out[0, 1] = b
    for i in range(1, n_steps + 1):
        wa = a.real * a.real + a.imag * a.imag
        wb = b.real * b.real + b.imag * b.imag
        ka1 = rate * a * wb
        kb1 = -rate * b * wa
        a2 = a + 0.5 * h * ka1
        b2 = b + 0.5 * h * kb1
        wa = a2.real * a2.real + a2.imag * a2.imag
        wb = b2.real * b2.real + b2.imag * b2.imag
        ka2 = rate * a2 * wb
        kb2 = -rate * b2 * wa
        a3 = a + 0.5 * h * ka2
        b3 = b + 0.5 * h * kb2
        wa = a3.real * a3.real + a3.imag * a3.imag
        wb = b3.real * b3.real + b3.imag * b3.imag
        ka3 = rate * a3 * wb
        kb3 = -rate * b3 * wa
        a4 = a + h * ka3
        b4 = b + h * kb3
        wa = a4.real * a4.real + a4.imag * a4.imag
        wb = b4.real * b4.real + b4.imag * b4.imag
        ka4 = rate * a4 * wb
        kb4 = -rate * b4 * wa
        a = a + (h / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4)
        b = b + (h / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)
        out[i, 0] = a
        out[i, 1] = b
    return out


# ---------------------------------------------------------------------------
# s-level coefficient equations
#
# secular:  l_n' = -kappa sum_s l_n |l_s|^2 (w_n - w_s)^3 g[n, s]
# full:     l_n' = -kappa sum_{l,k,s} l_l conj(l_k) l_s (w_l - w_k)^3
#                    rr[l, k, s, n] exp(i (w_k - w_l + w_n - w_s) t)

def _secular_np(lam, cube, g, kappa):
    w = np.abs(lam) ** 2
    return -kappa * lam * ((cube * g) @ w)


def _full_np(lam, omega, cube, rr, kappa, t):
    phase = np.exp(1j * t * (omega[None, :] - omega[:, None]))  # [l, k] -> w_k - w_l
    a = lam[:, None] * np.conj(lam)[None, :] * cube * phase  # [l, k]
    b = lam[:, None] * np.exp(-1j * omega[:, None] * t)  # [s] factor (w_n - w_s)
    m = np.einsum("lk,lksn->sn", a, rr)
    return -kappa * np.exp(1j * omega * t) * np.einsum("s,sn->n", b[:, 0], m)


def rk4_secular_np(lam0, omega, g, kappa, h, n_steps, stride):
    cube = (omega[:, None] - omega[None, :]) ** 3
    y = lam0.astype(np.complex128).copy()
    out = np.empty((n_steps // stride + 1, y.shape[0]), dtype=np.complex128)
    out[0] = y
    for i in range(1, n_steps + 1):
        k1 = _secular_np(y, cube, g, kappa)
        k2 = _secular_np(y + 0.5 * h * k1, cube, g, kappa)
        k3 = _secular_np(y + 0.5 * h * k2, cube, g, kappa)
        k4 = _secular_np(y + h * k3, cube, g, kappa)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if i % stride == 0:
            out[i // stride] = y
    return out


def rk4_full_np(lam0, omega, rr, kappa, t0, h, n_steps, stride):
    cube = (omega[:, None] - omega[None, :]) ** 3
    y = lam0.astype(np.complex128).copy()
    out = np.empty((n_steps // stride + 1, y.shape[0]), dtype=np.complex128)
    out[0] = y
    t = t0
    for i in range(1, n_steps + 1):
        k1 = _full_np(y, omega, cube, rr, kappa, t)
        k2 = _full_np(y + 0.5 * h * k1, omega, cube, rr, kappa, t + 0.5 * h)
        k3 = _full_np(y + 0.5 * h * k2, omega, cube, rr, kappa, t + 0.5 * h)
        k4 = _full_np(y + h * k3, omega, cube, rr, kappa, t + h)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t0 + i * h
        if i % stride == 0:
            out[i // stride] = y
    return out


@njit
def _secular_nb(lam, omega, g, kappa, out):
    s_dim = lam.shape[0]
    for n in range(s_dim):
        acc = 0.0
        for s in range(s_dim):
            d = omega[n] - omega[s]
            acc += (lam[s].real ** 2 + lam[s].imag ** 2) * d * d * d * g[n, s]
        out[n] = -kappa * lam[n] * acc


@njit
def _full_nb(lam, omega, rr, kappa, t, out):
    s_dim = lam.shape[0]
    for n in range(s_dim):
        acc = 0.0 + 0.0j
        for l in range(s_dim):
            for k in range(s_dim):
                d = omega[l] - omega[k]
                if d == 0.0:
                    continue
                lk = lam[l] * np.conj(lam[k]) * d * d * d
                for s in range(s_dim):
                    c = rr[l, k, s, n]
                    if c == 0.0:
                        continue
                    ph = (omega[k] - omega[l] + omega[n] - omega[s]) * t
                    acc += lk * lam[s] * c * complex(np.cos(ph), np.sin(ph))
        out[n] = -kappa * acc


@njit
def rk4_secular_nb(lam0, omega, g, kappa, h, n_steps, stride):
    s_dim = lam0.shape[0]
    y = lam0.astype(np.complex128).copy()
    out = np.empty((n_steps // stride + 1, s_dim), dtype=np.complex128)
    out[0] = y
    k1 = np.empty(s_dim, dtype=np.complex128)
    k2 = np.empty_like(k1)
    k3 = np.empty_like(k1)
    k4 = np.empty_like(k1)
    for i in range(1, n_steps + 1):
        _secular_nb(y, omega, g, kappa, k1)
        _secular_nb(y + 0.5 * h * k1, omega, g, kappa, k2)
        _secular_nb(y + 0.5 * h * k2, omega, g, kappa, k3)
        _secular_nb(y + h * k3, omega, g, kappa, k4)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if i % stride == 0:
            out[i // stride] = y
    return out


@njit
def rk4_full_nb(lam0, omega, rr, kappa, t0, h, n_steps, stride):
    s_dim = lam0.shape[0]
    y = lam0.astype(np.complex128).copy()
    out = np.empty((n_steps // stride + 1, s_dim), dtype=np.complex128)
    out[0] = y
    k1 = np.empty(s_dim, dtype=np.complex128)
    k2 = np.empty_like(k1)
    k3 = np.empty_like(k1)
    k4 = np.empty_like(k1)
    t = t0
    for i in range(1, n_steps + 1):
        _full_nb(y, omega, rr, kappa, t, k1)
        _full_nb(y + 0.5 * h * k1, omega, rr, kappa, t + 0.5 * h, k2)
        _full_nb(y + 0.5 * h * k2, omega, rr, kappa, t + 0.5 * h, k3)
        _full_nb(y + h * k3, omega, rr, kappa, t + h, k4)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t0 + i * h
        if i % stride == 0:
            out[i // stride] = y
    return out


# ---------------------------------------------------------------------------
# driven oscillator with order-reduced radiation reaction
#
#   r'' = -wc^2 r - qm E + tau (-wc^2 r' - qm E')
#   E(t) = Re(E_amp exp(-i w t)) = er cos(wt) + ei sin(wt)

def rk4_driven_np(r0, v0, er, ei, omega, omega_c, tau, qm, h, n_steps, stride, first):
    wc2 = omega_c * omega_c

    def acc(t, r, v):
        c, s = np.cos(omega * t), np.sin(omega * t)
        e = er * c + ei * s
        edot = omega * (ei * c - er * s)
        return -wc2 * r - qm * e + tau * (-wc2 * v - qm * edot)

    r = r0.astype(np.float64).copy()
    v = v0.astype(np.float64).copy()
    n_out = (n_steps - first) // stride + 1 if n_steps >= first else 0
    rs = np.empty((n_out, 3))
    vs = np.empty((n_out, 3))
    as_ = np.empty((n_out, 3))
    j = 0
    for i in range(n_steps + 1):
        t = i * h
        if i >= first and (i - first) % stride == 0:
            rs[j], vs[j], as_[j] = r, v, acc(t, r, v)
            j += 1
        if i == n_steps:
            break
        k1r, k1v = v, acc(t, r, v)
        k2r, k2v = v + 0.5 * h * k1v, acc(t + 0.5 * h, r + 0.5 * h * k1r, v + 0.5 * h * k1v)
        k3r, k3v = v + 0.5 * h * k2v, acc(t + 0.5 * h, r + 0.5 * h * k2r, v + 0.5 * h * k2v)
        k4r, k4v = v + h * k3v, acc(t + h, r + h * k3r, v + h * k3v)
        r = r + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return rs, vs, as_


@njit
def _driven_acc_nb(t, r, v, er, ei, omega, wc2, tau, qm, out):
    c = np.cos(omega * t)
    s = np.sin(omega * t)
    for j in range(3):
        e = er[j] * c + ei[j] * s
        edot = omega * (ei[j] * c - er[j] * s)
        out[j] = -wc2 * r[j] - qm * e + tau * (-wc2 * v[j] - qm * edot)


@njit
def rk4_driven_nb(r0, v0, er, ei, omega, omega_c, tau, qm, h, n_steps, stride, first):
    wc2 = omega_c * omega_c
    r = r0.astype(np.float64).copy()
    v = v0.astype(np.float64).copy()
    n_out = (n_steps - first) // stride + 1 if n_steps >= first else 0
    rs = np.empty((n_out, 3))
    vs = np.empty((n_out, 3))
    as_ = np.empty((n_out, 3))
    a1 = np.empty(3)
    a2 = np.empty(3)
    a3 = np.empty(3)
    a4 = np.empty(3)
    rt = np.empty(3)
    vt = np.empty(3)
    j = 0
    for i in range(n_steps + 1):
        t = i * h
        _driven_acc_nb(t, r, v, er, ei, omega, wc2, tau, qm, a1)
        if i >= first and (i - first) % stride == 0:
            for c in range(3):
                rs[j, c] = r[c]
                vs[j, c] = v[c]
                as_[j, c] = a1[c]
            j += 1
        if i == n_steps:
            break
        for c in range(3):
            rt[c] = r[c] + 0.5 * h * v[c]
            vt[c] = v[c] + 0.5 * h * a1[c]
        _driven_acc_nb(t + 0.5 * h, rt, vt, er, ei, omega, wc2, tau, qm, a2)
        v2 = vt.copy()
        for c in range(3):
            rt[c] = r[c] + 0.5 * h * v2[c]
            vt[c] = v[c] + 0.5 * h * a2[c]
        _driven_acc_nb(t + 0.5 * h, rt, vt, er, ei, omega, wc2, tau, qm, a3)
        v3 = vt.copy()
        for c in range(3):
            rt[c] = r[c] + h * v3[c]
            vt[c] = v[c] + h * a3[c]
        _driven_acc_nb(t + h, rt, vt, er, ei, omega, wc2, tau, qm, a4)
        for c in range(3):
            r[c] = r[c] + (h / 6.0) * (v[c] + 2.0 * v2[c] + 2.0 * v3[c] + vt[c])
            v[c] = v[c] + (h / 6.0) * (a1[c] + 2.0 * a2[c] + 2.0 * a3[c] + a4[c])
    return rs, vs, as_


KERNELS = {
    "verlet_chain": (verlet_chain_nb, verlet_chain_np),
    "rk4_two_level": (rk4_two_level_nb, rk4_two_level_np),
    "rk4_secular": (rk4_secular_nb, rk4_secular_np),
    "rk4_full": (rk4_full_nb, rk4_full_np),
    "rk4_driven": (rk4_driven_nb, rk4_driven_np),
}
"""Kernel name -> (numba version, numpy version)."""

_pick = 0 if USE_NUMBA else 1
verlet_chain = KERNELS["verlet_chain"][_pick]
rk4_two_level = KERNELS["rk4_two_level"][_pick]
rk4_secular = KERNELS["rk4_secular"][_pick]
rk4_full = KERNELS["rk4_full"][_pick]
rk4_driven = KERNELS["rk4_driven"][_pick]
