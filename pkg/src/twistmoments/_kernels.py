"""Numba kernels for the two hot loops: ternary-lattice enumeration and
tensor-product contour quadrature.

Float arithmetic appears only in loop bounds (widened by one and re-checked
with exact integers) and in the quadrature accumulators; every lattice-point
membership decision is int64-exact.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def representation_counts(b1, b2, b3, b4, b5, b6, xbound, xmax, out):
    """Histogram of f(x,y,z) = b1 x^2 + b2 y^2 + b3 z^2 + b4 yz + b5 xz + b6 xy
    over all lattice points with f <= xmax, into out[0..xmax].

    xbound is a safe outer bound for |x| (ellipsoid projection + 1).  Inner
    bounds come from the quadratic formula, widened by one; the exact integer
    value gates every increment, so float roundoff cannot miscount.
    """
    # min over z of f for fixed (x, y) is a quadratic in y; its coefficients
    q33 = float(b3)
    ay = b2 - 0.25 * b4 * b4 / q33
    for x in range(-xbound, xbound + 1):
        # y-range: ay*y^2 + 2*by*y + cy <= xmax
        by = 0.5 * b6 * x - 0.25 * b4 * b5 * x / q33
        cy = (b1 - 0.25 * b5 * b5 / q33) * x * x
        disc = by * by - ay * (cy - xmax)
        if disc < 0.0:
            continue
        rad = disc ** 0.5
        ylo = int(np.floor((-by - rad) / ay)) - 1
        yhi = int(np.ceil((-by + rad) / ay)) + 1
        for y in range(ylo, yhi + 1):
            # z-range: b3 z^2 + bz z + cz <= xmax
            bz = b4 * y + b5 * x
            cz = b1 * x * x + b2 * y * y + b6 * x * y
            disc2 = 0.25 * bz * bz - q33 * (cz - xmax)
            if disc2 < 0.0:
                continue
            rad2 = disc2 ** 0.5
            zlo = int(np.floor((-0.5 * bz - rad2) / q33)) - 1
            zhi = int(np.ceil((-0.5 * bz + rad2) / q33)) + 1
            # incremental exact value: f(x,y,z+1) - f(x,y,z) = b3(2z+1) + bz
            val = b1 * x * x + b2 * y * y + b3 * zlo * zlo + b4 * y * zlo + b5 * x * zlo + b6 * x * y
            step = b3 * (2 * zlo + 1) + bz
            for _z in range(zlo, zhi + 1):
                if 0 <= val <= xmax:
                    out[val] += 1
                val += step
                step += 2 * b3


@njit(cache=True)
def tensor_contour_plain(per_axis, pair, k, m_nodes):
    """sum over node tuples of prod_j per_axis[j, m_j] * prod_{i<j} pair[i,j,m_i,m_j].

    per_axis: (k, M) complex; pair: (k, k, M, M) complex (upper triangle used).
    Specialised straight-line code per k keeps the loop nest tight.
    """
    acc = 0.0 + 0.0j
    if k == 1:
        for m0 in range(m_nodes):
            acc += per_axis[0, m0]
        return acc
    if k == 2:
        for m0 in range(m_nodes):
            a0 = per_axis[0, m0]
            for m1 in range(m_nodes):
                acc += a0 * per_axis[1, m1] * pair[0, 1, m0, m1]
        return acc
    if k == 3:
        for m0 in range(m_nodes):
            a0 = per_axis[0, m0]
            for m1 in range(m_nodes):
                a01 = a0 * per_axis[1, m1] * pair[0, 1, m0, m1]
                for m2 in range(m_nodes):
                    acc += a01 * per_axis[2, m2] * pair[0, 2, m0, m2] * pair[1, 2, m1, m2]
        return acc
    for m0 in range(m_nodes):
        a0 = per_axis[0, m0]
        for m1 in range(m_nodes):
            a01 = a0 * per_axis[1, m1] * pair[0, 1, m0, m1]
            for m2 in range(m_nodes):
                a012 = a01 * per_axis[2, m2] * pair[0, 2, m0, m2] * pair[1, 2, m1, m2]
                for m3 in range(m_nodes):
                    acc += (
                        a012
                        * per_axis[3, m3]
                        * pair[0, 3, m0, m3]
                        * pair[1, 3, m1, m3]
                        * pair[2, 3, m2, m3]
                    )
    return acc


@njit(cache=True)
def tensor_contour_euler(per_axis, pair, nodes, u_tab, v_tab, c_add, c_mul,
                         snap_pos, snap_wt, k, m_nodes, n_mom):
    """Contour accumulation with the per-prime Euler factor.

    Per node tuple the local-factor product over good primes g is

        prod_g ( c_add[g] + c_mul[g] * (prod_j u_tab[j, m_j, g]
                                        + prod_j v_tab[j, m_j, g]) ),

    evaluated with a tapered cutoff: running products are snapshotted at the
    prime indices snap_pos and recombined as prod_s snapshot_s^snap_wt[s]
    (a staircase version of a log-weight taper over the top octave).

    u_tab, v_tab: (k, M, G) complex, contiguous in the prime axis.
    nodes: (k, M) complex quadrature nodes (for the e^{x sum z} powers).
    Returns acc[m] = sum over tuples of integrand * (sum_j z_j)^m, m <= n_mom.
    """
    n_good = u_tab.shape[2]
    n_snap = snap_pos.shape[0]
    acc = np.zeros(n_mom + 1, dtype=np.complex128)
    pu = np.empty(n_good, dtype=np.complex128)
    pv = np.empty(n_good, dtype=np.complex128)
    snaps = np.empty(n_snap, dtype=np.complex128)

    if k == 1:
        for m0 in range(m_nodes):
            r = 1.0 + 0.0j
            si = 0
            for g in range(n_good):
                r *= c_add[g] + c_mul[g] * (u_tab[0, m0, g] + v_tab[0, m0, g])
                while si < n_snap and snap_pos[si] == g + 1:
                    snaps[si] = r
                    si += 1
            lf = 0.0 + 0.0j
            for s2 in range(n_snap):
                lf += snap_wt[s2] * np.log(snaps[s2])
            base = per_axis[0, m0] * np.exp(lf)
            ssum = nodes[0, m0]
            for m in range(n_mom + 1):
                acc[m] += base
                base = base * ssum
        return acc

    if k == 2:
        for m0 in range(m_nodes):
            for g in range(n_good):
                pu[g] = c_mul[g] * u_tab[0, m0, g]
                pv[g] = c_mul[g] * v_tab[0, m0, g]
            for m1 in range(m_nodes):
                fk = per_axis[0, m0] * per_axis[1, m1] * pair[0, 1, m0, m1]
                r = 1.0 + 0.0j
                si = 0
                for g in range(n_good):
                    r *= c_add[g] + pu[g] * u_tab[1, m1, g] + pv[g] * v_tab[1, m1, g]
                    while si < n_snap and snap_pos[si] == g + 1:
                        snaps[si] = r
                        si += 1
                lf = 0.0 + 0.0j
                for s2 in range(n_snap):
                    lf += snap_wt[s2] * np.log(snaps[s2])
                base = fk * np.exp(lf)
                ssum = nodes[0, m0] + nodes[1, m1]
                for m in range(n_mom + 1):
                    acc[m] += base
                    base = base * ssum
        return acc

    if k == 3:
        pu2 = np.empty(n_good, dtype=np.complex128)
        pv2 = np.empty(n_good, dtype=np.complex128)
        for m0 in range(m_nodes):
            for g in range(n_good):
                pu[g] = c_mul[g] * u_tab[0, m0, g]
                pv[g] = c_mul[g] * v_tab[0, m0, g]
            for m1 in range(m_nodes):
                p01 = pair[0, 1, m0, m1]
                for g in range(n_good):
                    pu2[g] = pu[g] * u_tab[1, m1, g]
                    pv2[g] = pv[g] * v_tab[1, m1, g]
                for m2 in range(m_nodes):
                    fk = (
                        per_axis[0, m0] * per_axis[1, m1] * per_axis[2, m2]
                        * p01 * pair[0, 2, m0, m2] * pair[1, 2, m1, m2]
                    )
                    r = 1.0 + 0.0j
                    si = 0
                    for g in range(n_good):
                        r *= c_add[g] + pu2[g] * u_tab[2, m2, g] + pv2[g] * v_tab[2, m2, g]
                        while si < n_snap and snap_pos[si] == g + 1:
                            snaps[si] = r
                            si += 1
                    lf = 0.0 + 0.0j
                    for s2 in range(n_snap):
                        lf += snap_wt[s2] * np.log(snaps[s2])
                    base = fk * np.exp(lf)
                    ssum = nodes[0, m0] + nodes[1, m1] + nodes[2, m2]
                    for m in range(n_mom + 1):
                        acc[m] += base
                        base = base * ssum
        return acc

    pu2 = np.empty(n_good, dtype=np.complex128)
    pv2 = np.empty(n_good, dtype=np.complex128)
    pu3 = np.empty(n_good, dtype=np.complex128)
    pv3 = np.empty(n_good, dtype=np.complex128)
    for m0 in range(m_nodes):
        for g in range(n_good):
            pu[g] = c_mul[g] * u_tab[0, m0, g]
            pv[g] = c_mul[g] * v_tab[0, m0, g]
        for m1 in range(m_nodes):
            p01 = pair[0, 1, m0, m1]
            for g in range(n_good):
                pu2[g] = pu[g] * u_tab[1, m1, g]
                pv2[g] = pv[g] * v_tab[1, m1, g]
            for m2 in range(m_nodes):
                f012 = (
                    per_axis[0, m0] * per_axis[1, m1] * per_axis[2, m2]
                    * p01 * pair[0, 2, m0, m2] * pair[1, 2, m1, m2]
                )
                for g in range(n_good):
                    pu3[g] = pu2[g] * u_tab[2, m2, g]
                    pv3[g] = pv2[g] * v_tab[2, m2, g]
                s012 = nodes[0, m0] + nodes[1, m1] + nodes[2, m2]
                for m3 in range(m_nodes):
                    fk = (
                        f012 * per_axis[3, m3]
                        * pair[0, 3, m0, m3] * pair[1, 3, m1, m3] * pair[2, 3, m2, m3]
                    )
                    r = 1.0 + 0.0j
                    si = 0
                    for g in range(n_good):
                        r *= c_add[g] + pu3[g] * u_tab[3, m3, g] + pv3[g] * v_tab[3, m3, g]
                        while si < n_snap and snap_pos[si] == g + 1:
                            snaps[si] = r
                            si += 1
                    lf = 0.0 + 0.0j
                    for s2 in range(n_snap):
                        lf += snap_wt[s2] * np.log(snaps[s2])
                    base = fk * np.exp(lf)
                    ssum = s012 + nodes[3, m3]
                    for m in range(n_mom + 1):
                        acc[m] += base
                        base = base * ssum
    return acc


@njit(cache=True)
def quadratic_char_sums(ps, a_coef, b_coef):
    """a_p = -sum_x chi_p(x^3 + a x + b) for each odd prime p > 3 in ps."""
    out = np.empty(len(ps), dtype=np.int64)
    for i in range(len(ps)):
        p = ps[i]
        chi = np.full(p, -1, dtype=np.int8)
        for x in range(p):
            chi[(x * x) % p] = 1
        chi[0] = 0
        a = a_coef % p
        b = b_coef % p
        s = 0
        for x in range(p):
            fx = (x * x % p * x + a * x + b) % p
            s += chi[fx]
        out[i] = -s
    return out
