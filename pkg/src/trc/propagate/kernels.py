"""Compiled inner loops over the flat region/edge layout of :mod:`.layout`.

All tables live in log space in one flat float array; region ``r`` owns
``logb[roff[r]:roff[r] + rsize[r]]``.  Edge ``e`` (parent -> child) owns a
map ``emap[moff[e]:moff[e] + rsize[parent]]`` sending each parent entry to a
child entry, and a child-sized slot ``[loff[e]:loff[e] + rsize[child]]`` in the
multiplier / message arrays.
"""
import numpy as np
from numba import njit, prange

NEG = -1e300


@njit(cache=True)
def normalize_region(logb, off, size):
    mx = NEG
    for j in range(size):
        if logb[off + j] > mx:
            mx = logb[off + j]
    s = 0.0
    for j in range(size):
        s += np.exp(logb[off + j] - mx)
    z = mx + np.log(s)
    for j in range(size):
        logb[off + j] -= z


@njit(cache=True)
def normalize_all(logb, roff, rsize):
    for r in range(roff.shape[0]):
        normalize_region(logb, roff[r], rsize[r])


@njit(cache=True)
def log_marginal(logb, poff, psize, emap, moff, out):
    """``out[x_c] = log sum_{x_p -> x_c} exp(logb_p)`` (out sized to the child)."""
    mx = NEG
    for j in range(psize):
        if logb[poff + j] > mx:
            mx = logb[poff + j]
    for x in range(out.shape[0]):
        out[x] = 0.0
    for j in range(psize):
        out[emap[moff + j]] += np.exp(logb[poff + j] - mx)
    for x in range(out.shape[0]):
        out[x] = np.log(out[x]) + mx if out[x] > 0.0 else NEG


@njit(cache=True)
def assemble_cccp(logh, lam, roff, rsize, eparent, echild, emap, moff, loff, inv_cmax, logb):
    """``log b_r = log h_r + (sum_in lam - sum_out lam) / c_max``, normalized."""
    logb[:] = logh
    for e in range(eparent.shape[0]):
        p = eparent[e]
        c = echild[e]
        for x in range(rsize[c]):
            logb[roff[c] + x] += lam[loff[e] + x] * inv_cmax
        for j in range(rsize[p]):
            logb[roff[p] + j] -= lam[loff[e] + emap[moff[e] + j]] * inv_cmax
    normalize_all(logb, roff, rsize)


TINY = 1e-300


@njit(cache=True)
def _scale_edge(e, b, lam, roff, rsize, eparent, echild, emap, moff, loff, cmax, buf):
    """One multiplicative correction on edge ``e``; ``b`` holds linear, normalized beliefs.

    Half of the correction ``R = (sum_{p minus c} b_p) / b_c`` goes to each side,
    and the multiplier moves by ``(c_max / 2) ln R``.
    """
    p = eparent[e]
    c = echild[e]
    nc = rsize[c]
    po = roff[p]
    co = roff[c]
    mo = moff[e]
    m = buf[:nc]
    for x in range(nc):
        m[x] = 0.0
    for j in range(rsize[p]):
        m[emap[mo + j]] += b[po + j]
    worst = 0.0
    for x in range(nc):
        bc = b[co + x]
        gap = abs(m[x] - bc)
        if gap > worst:
            worst = gap
        r = max(m[x], TINY) / max(bc, TINY)
        lam[loff[e] + x] += 0.5 * cmax * np.log(r)
        m[x] = np.sqrt(r)
        b[co + x] = bc * m[x]
    sp = 0.0
    for j in range(rsize[p]):
        v = b[po + j] / m[emap[mo + j]]
        b[po + j] = v
        sp += v
    for j in range(rsize[p]):
        b[po + j] /= sp
    sc = 0.0
    for x in range(nc):
        sc += b[co + x]
    for x in range(nc):
        b[co + x] /= sc
    return worst


@njit(cache=True)
def _to_linear(logb, b):
    for i in range(logb.shape[0]):
        b[i] = np.exp(logb[i])


@njit(cache=True)
def _to_log(b, logb, roff, rsize):
    for i in range(b.shape[0]):
        logb[i] = np.log(max(b[i], TINY))
    normalize_all(logb, roff, rsize)


@njit(cache=True)
def cccp_inner(logb, lam, roff, rsize, eparent, echild, emap, moff, loff, cmax,
               order, tol, max_iter, maxchild):
    """Iterative scaling of the consistency multipliers, Gauss-Seidel over ``order``.

    Works on linear tables (every region renormalized after each correction)
    and writes log beliefs back.  Returns ``(sweeps, worst consistency gap)``
    where the gap is ``b_c |R - 1|`` for the correction ``R`` of each edge.
    """
    buf = np.empty(maxchild)
    b = np.empty_like(logb)
    _to_linear(logb, b)
    worst = np.inf
    sweeps = max_iter
    for it in range(max_iter):
        worst = 0.0
        for k in range(order.shape[0]):
            w = _scale_edge(order[k], b, lam, roff, rsize, eparent, echild, emap, moff, loff, cmax, buf)
            if w > worst:
                worst = w
        if worst < tol:
            sweeps = it + 1
            break
    _to_log(b, logb, roff, rsize)
    return sweeps, worst


@njit(cache=True, parallel=True)
def cccp_inner_batched(logb, lam, roff, rsize, eparent, echild, emap, moff, loff, cmax,
                       batches, boff, tol, max_iter, maxchild):
    """As :func:`cccp_inner`, but edges inside one batch touch disjoint regions and run in parallel."""
    nb = boff.shape[0] - 1
    b = np.empty_like(logb)
    _to_linear(logb, b)
    worst = np.inf
    sweeps = max_iter
    for it in range(max_iter):
        worst = 0.0
        for bi in range(nb):
            lo = boff[bi]
            hi = boff[bi + 1]
            ws = np.zeros(hi - lo)
            for k in prange(hi - lo):
                buf = np.empty(maxchild)
                ws[k] = _scale_edge(batches[lo + k], b, lam, roff, rsize, eparent, echild,
                                    emap, moff, loff, cmax, buf)
            for k in range(hi - lo):
                if ws[k] > worst:
                    worst = ws[k]
        if worst < tol:
            sweeps = it + 1
            break
    _to_log(b, logb, roff, rsize)
    return sweeps, worst


@njit(cache=True)
def gbp_beliefs(logf, logm, logn, roff, rsize, eparent, echild, emap, moff, loff, logB):
    logB[:] = logf
    for e in range(eparent.shape[0]):
        p = eparent[e]
        c = echild[e]
        for x in range(rsize[c]):
            logB[roff[c] + x] += logm[loff[e] + x]
        for j in range(rsize[p]):
            logB[roff[p] + j] += logn[loff[e] + emap[moff[e] + j]]
    normalize_all(logB, roff, rsize)


@njit(cache=True)
def gbp_sweep(logf, logm, logn, roff, rsize, eparent, echild, emap, moff, loff, beta,
              damping, logB, maxchild):
    """One synchronous two-way GBP update of every edge; ``logB`` gets the new beliefs."""
    gbp_beliefs(logf, logm, logn, roff, rsize, eparent, echild, emap, moff, loff, logB)
    newm = np.empty_like(logm)
    newn = np.empty_like(logn)
    tmp = np.empty(maxchild)
    m0 = np.empty(maxchild)
    for e in range(eparent.shape[0]):
        p = eparent[e]
        c = echild[e]
        nc = rsize[c]
        # pseudo-message parent -> child: marginalize the parent belief without n_{c->p}
        mx = NEG
        for j in range(rsize[p]):
            v = logB[roff[p] + j] - logn[loff[e] + emap[moff[e] + j]]
            if v > mx:
                mx = v
        for x in range(nc):
            tmp[x] = 0.0
        for j in range(rsize[p]):
            v = logB[roff[p] + j] - logn[loff[e] + emap[moff[e] + j]]
            tmp[emap[moff[e] + j]] += np.exp(v - mx)
        for x in range(nc):
            m0[x] = np.log(tmp[x]) + mx if tmp[x] > 0.0 else NEG
        b = beta[c]
        zm = NEG
        zn = NEG
        for x in range(nc):
            n0 = logB[roff[c] + x] - logm[loff[e] + x]
            newm[loff[e] + x] = (b - 1.0) * n0 + b * m0[x]
            newn[loff[e] + x] = b * n0 + (b - 1.0) * m0[x]
            zm = max(zm, newm[loff[e] + x])
            zn = max(zn, newn[loff[e] + x])
        sm = 0.0
        sn = 0.0
        for x in range(nc):
            sm += np.exp(newm[loff[e] + x] - zm)
            sn += np.exp(newn[loff[e] + x] - zn)
        zm += np.log(sm)
        zn += np.log(sn)
        for x in range(nc):
            newm[loff[e] + x] -= zm
            newn[loff[e] + x] -= zn
    for i in range(logm.shape[0]):
        logm[i] = damping * logm[i] + (1.0 - damping) * newm[i]
        logn[i] = damping * logn[i] + (1.0 - damping) * newn[i]
    gbp_beliefs(logf, logm, logn, roff, rsize, eparent, echild, emap, moff, loff, logB)


@njit(cache=True)
def gbp_sequential_sweep(logm, logn, roff, rsize, eparent, echild, emap, moff, loff, beta,
                         damping, order, logB, maxchild):
    """Edge-by-edge two-way GBP; ``logB`` (normalized beliefs) is kept in step after every edge."""
    m0 = np.empty(maxchild)
    tmp = np.empty(maxchild)
    dm = np.empty(maxchild)
    dn = np.empty(maxchild)
    for k in range(order.shape[0]):
        e = order[k]
        p = eparent[e]
        c = echild[e]
        nc = rsize[c]
        po = roff[p]
        co = roff[c]
        mo = moff[e]
        lo = loff[e]
        mx = NEG
        for j in range(rsize[p]):
            v = logB[po + j] - logn[lo + emap[mo + j]]
            if v > mx:
                mx = v
        for x in range(nc):
            tmp[x] = 0.0
        for j in range(rsize[p]):
            tmp[emap[mo + j]] += np.exp(logB[po + j] - logn[lo + emap[mo + j]] - mx)
        for x in range(nc):
            m0[x] = np.log(tmp[x]) + mx if tmp[x] > 0.0 else NEG
        b = beta[c]
        zm = NEG
        zn = NEG
        for x in range(nc):
            n0 = logB[co + x] - logm[lo + x]
            dm[x] = (b - 1.0) * n0 + b * m0[x]
            dn[x] = b * n0 + (b - 1.0) * m0[x]
            zm = max(zm, dm[x])
            zn = max(zn, dn[x])
        sm = 0.0
        sn = 0.0
        for x in range(nc):
            sm += np.exp(dm[x] - zm)
            sn += np.exp(dn[x] - zn)
        zm += np.log(sm)
        zn += np.log(sn)
        for x in range(nc):
            newm = damping * logm[lo + x] + (1.0 - damping) * (dm[x] - zm)
            newn = damping * logn[lo + x] + (1.0 - damping) * (dn[x] - zn)
            dm[x] = newm - logm[lo + x]
            dn[x] = newn - logn[lo + x]
            logm[lo + x] = newm
            logn[lo + x] = newn
            logB[co + x] += dm[x]
        for j in range(rsize[p]):
            logB[po + j] += dn[emap[mo + j]]
        normalize_region(logB, po, rsize[p])
        normalize_region(logB, co, nc)


@njit(cache=True)
def max_abs_change(loga, logb):
    worst = 0.0
    for i in range(loga.shape[0]):
        d = abs(np.exp(loga[i]) - np.exp(logb[i]))
        if d > worst:
            worst = d
    return worst
