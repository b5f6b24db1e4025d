"""Compiled pair kernels (numba).

All pair loops run serially over a half pair list in a fixed order, so results
are bit-reproducible. Positions must be wrapped into [0, L); displacements are
then folded into [-L/2, L/2) by a single conditional shift.
"""

import math

import numba as nb
import numpy as np

_JIT = dict(cache=True)


@nb.njit(**_JIT)
def _wrap(d, L):
    if d >= 0.5 * L:
        return d - L
    if d < -0.5 * L:
        return d + L
    return d


@nb.njit(**_JIT)
def _cell_of(x, L, nc):
    c = int(x / L * nc)
    if c >= nc:
        c = nc - 1
    elif c < 0:
        c = 0
    return c


@nb.njit(**_JIT)
def _build_cells(pos, L, nc):
    n = pos.shape[0]
    head = -np.ones(nc * nc * nc, dtype=np.int64)
    nxt = -np.ones(n, dtype=np.int64)
    # reverse insertion keeps ascending atom order inside each cell
    for i in range(n - 1, -1, -1):
        cx = _cell_of(pos[i, 0], L, nc)
        cy = _cell_of(pos[i, 1], L, nc)
        cz = _cell_of(pos[i, 2], L, nc)
        c = (cx * nc + cy) * nc + cz
        nxt[i] = head[c]
        head[c] = i
    return head, nxt


@nb.njit(**_JIT)
def _scan_pairs(pos, L, rlist, molecule, exclude_same, nc, fill, pi, pj):
    """Count (fill=False) or write (fill=True) pairs i<j with r < rlist."""
    n = pos.shape[0]
    r2max = rlist * rlist
    count = 0
    if nc < 4:
        for i in range(n):
            for j in range(i + 1, n):
                if exclude_same and molecule[i] == molecule[j]:
                    continue
                dx = _wrap(pos[i, 0] - pos[j, 0], L)
                dy = _wrap(pos[i, 1] - pos[j, 1], L)
                dz = _wrap(pos[i, 2] - pos[j, 2], L)
                if dx * dx + dy * dy + dz * dz < r2max:
                    if fill:
                        pi[count] = i
                        pj[count] = j
                    count += 1
        return count
    head, nxt = _build_cells(pos, L, nc)
    for i in range(n):
        cx = _cell_of(pos[i, 0], L, nc)
        cy = _cell_of(pos[i, 1], L, nc)
        cz = _cell_of(pos[i, 2], L, nc)
        for ox in range(-1, 2):
            for oy in range(-1, 2):
                for oz in range(-1, 2):
                    c = (((cx + ox) % nc) * nc + (cy + oy) % nc) * nc + (cz + oz) % nc
                    j = head[c]
                    while j >= 0:
                        if j > i and not (exclude_same and molecule[i] == molecule[j]):
                            dx = _wrap(pos[i, 0] - pos[j, 0], L)
                            dy = _wrap(pos[i, 1] - pos[j, 1], L)
                            dz = _wrap(pos[i, 2] - pos[j, 2], L)
                            if dx * dx + dy * dy + dz * dz < r2max:
                                if fill:
                                    pi[count] = i
                                    pj[count] = j
                                count += 1
                        j = nxt[j]
    return count


def build_pair_list(pos, L, rlist, molecule, exclude_same):
    """Half pair list (i < j) of all pairs closer than ``rlist``.

    Uses a cell list with edge >= rlist when the box holds at least four cells
    per dimension; with three or fewer the 27-cell stencil covers the whole box
    and a plain all-pairs scan is cheaper.
    """
    nc = int(L // rlist)
    dummy = np.empty(0, dtype=np.int64)
    n = _scan_pairs(pos, L, rlist, molecule, exclude_same, nc, False, dummy, dummy)
    pi = np.empty(n, dtype=np.int64)
    pj = np.empty(n, dtype=np.int64)
    _scan_pairs(pos, L, rlist, molecule, exclude_same, nc, True, pi, pj)
    # cell traversal visits neighbours out of order; sort for a canonical list
    if nc >= 4 and n:
        order = np.lexsort((pj, pi))
        pi, pj = pi[order], pj[order]
    return pi, pj


@nb.njit(**_JIT)
def pair_forces(pos, L, pi, pj, types, eps, sig, rc):
    """Truncated LJ forces over a pair list.

    Returns (forces, energy, virial, min_r2) where virial = sum f_ij . r_ij / 3.
    """
    n = pos.shape[0]
    f = np.zeros((n, 3))
    energy = 0.0
    virial = 0.0
    min_r2 = np.inf
    for p in range(pi.shape[0]):
        i = pi[p]
        j = pj[p]
        dx = _wrap(pos[i, 0] - pos[j, 0], L)
        dy = _wrap(pos[i, 1] - pos[j, 1], L)
        dz = _wrap(pos[i, 2] - pos[j, 2], L)
        r2 = dx * dx + dy * dy + dz * dz
        if r2 < min_r2:
            min_r2 = r2
        ti = types[i]
        tj = types[j]
        rcut = rc[ti, tj]
        if r2 >= rcut * rcut or r2 == 0.0:
            # coincident atoms are reported through min_r2 by the caller
            continue
        ir2 = 1.0 / r2
        s2 = sig[ti, tj] * sig[ti, tj] * ir2
        s6 = s2 * s2 * s2
        e4 = 4.0 * eps[ti, tj]
        energy += e4 * (s6 * s6 - s6)
        fr = 6.0 * e4 * (2.0 * s6 * s6 - s6) * ir2
        virial += fr * r2
        f[i, 0] += fr * dx
        f[i, 1] += fr * dy
        f[i, 2] += fr * dz
        f[j, 0] -= fr * dx
        f[j, 1] -= fr * dy
        f[j, 2] -= fr * dz
    return f, energy, virial / 3.0, min_r2


@nb.njit(**_JIT)
def pair_force_diffs(pos, L, pi, pj, types, eps0, sig0, rc0, eps_alt, sig_alt, rc_alt):
    """Force differences F_alt[m] - F_ref for M alternative LJ tables.

    The difference is formed per pair, so pairs outside every cutoff cost one
    distance evaluation only.
    """
    n = pos.shape[0]
    m_alt = eps_alt.shape[0]
    df = np.zeros((m_alt, n, 3))
    for p in range(pi.shape[0]):
        i = pi[p]
        j = pj[p]
        dx = _wrap(pos[i, 0] - pos[j, 0], L)
        dy = _wrap(pos[i, 1] - pos[j, 1], L)
        dz = _wrap(pos[i, 2] - pos[j, 2], L)
        r2 = dx * dx + dy * dy + dz * dz
        ti = types[i]
        tj = types[j]
        f0 = 0.0
        if r2 < rc0[ti, tj] * rc0[ti, tj]:
            s2 = sig0[ti, tj] * sig0[ti, tj] / r2
            s6 = s2 * s2 * s2
            f0 = 24.0 * eps0[ti, tj] * (2.0 * s6 * s6 - s6) / r2
        for m in range(m_alt):
            fm = 0.0
            rcm = rc_alt[m, ti, tj]
            if r2 < rcm * rcm:
                s2 = sig_alt[m, ti, tj] * sig_alt[m, ti, tj] / r2
                s6 = s2 * s2 * s2
                fm = 24.0 * eps_alt[m, ti, tj] * (2.0 * s6 * s6 - s6) / r2
            d = fm - f0
            if d != 0.0:
                df[m, i, 0] += d * dx
                df[m, i, 1] += d * dy
                df[m, i, 2] += d * dz
                df[m, j, 0] -= d * dx
                df[m, j, 1] -= d * dy
                df[m, j, 2] -= d * dz
    return df


@nb.njit(**_JIT)
def pair_jacobian(pos, L, pi, pj, types, eps, sig, rc, cls, n_classes):
    """Analytic dF/d(epsilon_c) and dF/d(sigma_c); columns 2c and 2c+1.

    The cutoff is held fixed in absolute units when sigma varies.
    """
    n = pos.shape[0]
    jac = np.zeros((n, 3, 2 * n_classes))
    for p in range(pi.shape[0]):
        i = pi[p]
        j = pj[p]
        dx = _wrap(pos[i, 0] - pos[j, 0], L)
        dy = _wrap(pos[i, 1] - pos[j, 1], L)
        dz = _wrap(pos[i, 2] - pos[j, 2], L)
        r2 = dx * dx + dy * dy + dz * dz
        ti = types[i]
        tj = types[j]
        if r2 >= rc[ti, tj] * rc[ti, tj]:
            continue
        s = sig[ti, tj]
        s2 = s * s / r2
        s6 = s2 * s2 * s2
        s12 = s6 * s6
        d_eps = 24.0 * (2.0 * s12 - s6) / r2
        d_sig = 24.0 * eps[ti, tj] * (24.0 * s12 - 6.0 * s6) / (s * r2)
        c = cls[ti, tj]
        for col, g in ((2 * c, d_eps), (2 * c + 1, d_sig)):
            jac[i, 0, col] += g * dx
            jac[i, 1, col] += g * dy
            jac[i, 2, col] += g * dz
            jac[j, 0, col] -= g * dx
            jac[j, 1, col] -= g * dy
            jac[j, 2, col] -= g * dz
    return jac


@nb.njit(**_JIT)
def pair_distance_histogram(pos, L, r_max, n_bins):
    """Counts of all pair distances below r_max in equal-width bins."""
    n = pos.shape[0]
    counts = np.zeros(n_bins, dtype=np.int64)
    width = r_max / n_bins
    r2max = r_max * r_max
    for i in range(n):
        for j in range(i + 1, n):
            dx = _wrap(pos[i, 0] - pos[j, 0], L)
            dy = _wrap(pos[i, 1] - pos[j, 1], L)
            dz = _wrap(pos[i, 2] - pos[j, 2], L)
            r2 = dx * dx + dy * dy + dz * dz
            if r2 < r2max:
                b = int(math.sqrt(r2) / width)
                if b < n_bins:
                    counts[b] += 1
    return counts
