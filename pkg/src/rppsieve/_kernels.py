"""Compiled GF(2^r) kernels.

Every kernel takes ``fp``, the tuple from :attr:`GF2m.kernel_params`:
``(r, red, mask, red8, sq, log, exp, clmul)``. Three multiplication modes:

* fields with r <= 16 carry log/exp tables (``log.shape[0] > 1``);
* otherwise, if ``clmul`` is set, the x86 carryless-multiply instruction
  is used and the product is folded back with the sparse modulus;
* otherwise products go through 8-bit windows against a 256-entry table
  of multiples, reduced with ``red8``.

All array arguments are ``uint64`` unless noted. Kernels release the GIL.
"""

import numpy as np
from llvmlite import binding as _llvm
from llvmlite import ir
from numba import njit, types
from numba.extending import intrinsic

_JIT = dict(cache=True, nogil=True)

HAS_CLMUL = bool(_llvm.get_host_cpu_features().get("pclmul", False))

if HAS_CLMUL:

    @intrinsic
    def _clmul(typingctx, a, b):
        """(low, high) 64-bit halves of the carryless product a*b."""
        sig = types.UniTuple(types.uint64, 2)(types.uint64, types.uint64)

        def codegen(context, builder, signature, args):
            i64 = ir.IntType(64)
            i32 = ir.IntType(32)
            v2 = ir.VectorType(i64, 2)
            fnty = ir.FunctionType(v2, [v2, v2, ir.IntType(8)])
            fn = builder.module.declare_intrinsic("llvm.x86.pclmulqdq", fnty=fnty)
            undef = ir.Constant(v2, ir.Undefined)
            va = builder.insert_element(undef, args[0], ir.Constant(i32, 0))
            vb = builder.insert_element(undef, args[1], ir.Constant(i32, 0))
            prod = builder.call(fn, [va, vb, ir.Constant(ir.IntType(8), 0)])
            lo = builder.extract_element(prod, ir.Constant(i32, 0))
            hi = builder.extract_element(prod, ir.Constant(i32, 1))
            return context.make_tuple(builder, signature.return_type, [lo, hi])

        return sig, codegen

else:

    @njit(**_JIT)
    def _clmul(a, b):
        lo = np.uint64(0)
        hi = np.uint64(0)
        for i in range(64):
            if (b >> np.uint64(i)) & np.uint64(1):
                lo ^= a << np.uint64(i)
                if i:
                    hi ^= a >> np.uint64(64 - i)
        return lo, hi

ONE = np.uint64(1)
# below this order the carryless determinant avoids per-pivot inverses
_FRACTION_FREE_MAX = 16
ZERO = np.uint64(0)


@njit(inline="always", **_JIT)
def _is_table(fp):
    return fp[5].shape[0] > 1


@njit(inline="always", **_JIT)
def _use_clmul(fp):
    return fp[5].shape[0] <= 1 and fp[7]


@njit(inline="always", **_JIT)
def _mul_clmul(a, b, fp):
    r = fp[0]
    red = fp[1]
    mask = fp[2]
    lo, hi = _clmul(a, b)
    if r == 64:
        while hi:
            l2, h2 = _clmul(hi, red)
            lo ^= l2
            hi = h2
        return lo
    sh = np.uint64(r)
    back = np.uint64(64 - r)
    high = (lo >> sh) | (hi << back)
    low = lo & mask
    while high:
        l2, h2 = _clmul(high, red)
        low ^= l2 & mask
        high = (l2 >> sh) | (h2 << back)
    return low


@njit(inline="always", **_JIT)
def _xtime(a, fp):
    r = fp[0]
    hi = (a >> np.uint64(r - 1)) & ONE
    a = (a << ONE) & fp[2]
    if hi:
        a ^= fp[1]
    return a


@njit(inline="always", **_JIT)
def gf_mul(a, b, fp):
    if _is_table(fp):
        if a == 0 or b == 0:
            return ZERO
        return fp[6][fp[5][a] + fp[5][b]]
    if _use_clmul(fp):
        return _mul_clmul(a, b, fp)
    r = fp[0]
    red8 = fp[3]
    mask = fp[2]
    a2 = _xtime(a, fp)
    a4 = _xtime(a2, fp)
    a8 = _xtime(a4, fp)
    sh = np.uint64(r - 4)
    res = ZERO
    for k in range((r - 1) // 4, -1, -1):
        top = res >> sh
        res = ((res << np.uint64(4)) & mask) ^ red8[top]
        nib = (b >> np.uint64(4 * k)) & np.uint64(15)
        if nib & np.uint64(1):
            res ^= a
        if nib & np.uint64(2):
            res ^= a2
        if nib & np.uint64(4):
            res ^= a4
        if nib & np.uint64(8):
            res ^= a8
    return res


@njit(inline="always", **_JIT)
def gf_sqr(a, fp):
    if _is_table(fp) or _use_clmul(fp):
        return gf_mul(a, a, fp)
    sq = fp[4]
    res = ZERO
    for j in range(sq.shape[0]):
        res ^= sq[j, (a >> np.uint64(8 * j)) & np.uint64(255)]
    return res


@njit(inline="always", **_JIT)
def _inv_clmul(a, fp):
    """Itoh-Tsujii inversion using only the carryless multiply."""
    n = fp[0] - 1
    top = 0
    while (n >> (top + 1)) > 0:
        top += 1
    beta = a
    t = 1
    for bit in range(top - 1, -1, -1):
        b = beta
        for _ in range(t):
            b = _mul_clmul(b, b, fp)
        beta = _mul_clmul(b, beta, fp)
        t *= 2
        if (n >> bit) & 1:
            beta = _mul_clmul(_mul_clmul(beta, beta, fp), a, fp)
            t += 1
    return _mul_clmul(beta, beta, fp)


@njit(**_JIT)
def gf_inv(a, fp):
    """Inverse of a nonzero element (Itoh-Tsujii for large fields)."""
    if _is_table(fp):
        n = (fp[6].shape[0] - 1) // 2
        return fp[6][n - fp[5][a]]
    if _use_clmul(fp):
        return _inv_clmul(a, fp)
    # beta_t = a^(2^t - 1); a^-1 = beta_{r-1}^2
    n = fp[0] - 1
    top = 0
    while (n >> (top + 1)) > 0:
        top += 1
    beta = a
    t = 1
    for bit in range(top - 1, -1, -1):
        b = beta
        for _ in range(t):
            b = gf_sqr(b, fp)
        beta = gf_mul(b, beta, fp)
        t *= 2
        if (n >> bit) & 1:
            beta = gf_mul(gf_sqr(beta, fp), a, fp)
            t += 1
    return gf_sqr(beta, fp)


@njit(**_JIT)
def gf_sqrt(a, fp):
    for _ in range(fp[0] - 1):
        a = gf_sqr(a, fp)
    return a


@njit(**_JIT)
def gf_pow(a, e, fp):
    res = ONE
    while e > 0:
        if e & 1:
            res = gf_mul(res, a, fp)
        a = gf_sqr(a, fp)
        e >>= 1
    return res


@njit(inline="always", **_JIT)
def _make_tab8(a, tab, fp):
    tab[0] = ZERO
    tab[1] = a
    x = a
    i = 2
    while i < 256:
        x = _xtime(x, fp)
        tab[i] = x
        for j in range(1, i):
            tab[i + j] = x ^ tab[j]
        i *= 2


@njit(inline="always", **_JIT)
def _mul_tab8(tab, b, fp):
    r = fp[0]
    sh = np.uint64(r - 8)
    red8 = fp[3]
    mask = fp[2]
    res = ZERO
    for k in range((r - 1) // 8, -1, -1):
        top = res >> sh
        res = ((res << np.uint64(8)) & mask) ^ red8[top]
        res ^= tab[(b >> np.uint64(8 * k)) & np.uint64(255)]
    return res


@njit(inline="always", **_JIT)
def _prep(c, tab, fp):
    """Prepare repeated multiplication by ``c``; returns log(c) or -1."""
    if _is_table(fp):
        if c == 0:
            return -1
        return fp[5][c]
    if _use_clmul(fp):
        tab[0] = c
        return 0
    _make_tab8(c, tab, fp)
    return 0


@njit(inline="always", **_JIT)
def _mulc(lc, tab, b, fp):
    """Multiply ``b`` by the constant prepared with :func:`_prep`."""
    if _is_table(fp):
        if lc < 0 or b == 0:
            return ZERO
        return fp[6][lc + fp[5][b]]
    if _use_clmul(fp):
        return _mul_clmul(tab[0], b, fp)
    return _mul_tab8(tab, b, fp)


@njit(**_JIT)
def vec_mul(a, b, out, fp):
    fa = a.ravel()
    fb = b.ravel()
    fo = out.ravel()
    for i in range(fa.shape[0]):
        fo[i] = gf_mul(fa[i], fb[i], fp)


@njit(**_JIT)
def power_table(z, n, fp):
    out = np.empty(n + 1, dtype=np.uint64)
    v = ONE
    for i in range(n + 1):
        out[i] = v
        v = gf_mul(v, z, fp)
    return out


@njit(**_JIT)
def det_inplace(M, s, fp, tabs, lrow):
    """Determinant of ``M[:s, :s]`` by Gaussian elimination; destroys M.

    ``tabs`` is scratch of shape (>= s, 256); ``lrow`` int64 scratch (>= s).
    """
    if s == 0:
        return ONE
    if _is_table(fp):
        logt = fp[5]
        expt = fp[6]
        order = (expt.shape[0] - 1) // 2
        logdet = 0
        for c in range(s):
            p = c
            while p < s and M[p, c] == 0:
                p += 1
            if p == s:
                return ZERO
            if p != c:
                for j in range(c, s):
                    t = M[p, j]
                    M[p, j] = M[c, j]
                    M[c, j] = t
            lp = logt[M[c, c]]
            logdet += lp
            for j in range(c + 1, s):
                v = M[c, j]
                if v:
                    lrow[j] = (logt[v] - lp + order) % order
                else:
                    lrow[j] = -1
            for i in range(c + 1, s):
                f = M[i, c]
                if f == 0:
                    continue
                lf = logt[f]
                for j in range(c + 1, s):
                    if lrow[j] >= 0:
                        M[i, j] ^= expt[lf + lrow[j]]
        return expt[logdet % order]

    if _use_clmul(fp):
        det = ONE
        scale = ONE
        for c in range(s):
            p = c
            while p < s and M[p, c] == 0:
                p += 1
            if p == s:
                return ZERO
            if p != c:
                for j in range(c, s):
                    t = M[p, j]
                    M[p, j] = M[c, j]
                    M[c, j] = t
            piv = M[c, c]
            det = _mul_clmul(det, piv, fp)
            if c == s - 1:
                break
            if s <= _FRACTION_FREE_MAX:
                # scale rows by the pivot instead of dividing; undone at the end
                for _ in range(s - c - 1):
                    scale = _mul_clmul(scale, piv, fp)
                for i in range(c + 1, s):
                    f = M[i, c]
                    if f == 0:
                        for j in range(c + 1, s):
                            M[i, j] = _mul_clmul(piv, M[i, j], fp)
                    else:
                        for j in range(c + 1, s):
                            M[i, j] = _mul_clmul(piv, M[i, j], fp) ^ _mul_clmul(f, M[c, j], fp)
                continue
            pinv = _inv_clmul(piv, fp)
            for i in range(c + 1, s):
                f = M[i, c]
                if f == 0:
                    continue
                f = _mul_clmul(f, pinv, fp)
                for j in range(c + 1, s):
                    M[i, j] ^= _mul_clmul(f, M[c, j], fp)
        if s <= _FRACTION_FREE_MAX:
            det = _mul_clmul(det, _inv_clmul(scale, fp), fp)
        return det

    det = ONE
    for c in range(s):
        p = c
        while p < s and M[p, c] == 0:
            p += 1
        if p == s:
            return ZERO
        if p != c:
            for j in range(c, s):
                t = M[p, j]
                M[p, j] = M[c, j]
                M[c, j] = t
        piv = M[c, c]
        det = gf_mul(det, piv, fp)
        if c == s - 1:
            break
        _make_tab8(gf_inv(piv, fp), tabs[c], fp)
        for j in range(c + 1, s):
            v = M[c, j]
            if v:
                _make_tab8(v, tabs[j], fp)
                lrow[j] = 1
            else:
                lrow[j] = 0
        for i in range(c + 1, s):
            f = M[i, c]
            if f == 0:
                continue
            f = _mul_tab8(tabs[c], f, fp)
            for j in range(c + 1, s):
                if lrow[j]:
                    M[i, j] ^= _mul_tab8(tabs[j], f, fp)
    return det


@njit(**_JIT)
def fill_zeta(x, d, pmask, zpow, out, fp, ztabs, zlogs):
    """Per pair (a, b): out[a, b, I] = sum over J <= I of x[a, b, J] z^d[a, b, J].

    Only supersets of ``pmask[a, b]`` are touched (x vanishes elsewhere);
    pairs with a negative mask are skipped. ``ztabs``/``zlogs`` are scratch
    sized to ``zpow``.
    """
    na, nb, size = x.shape
    full = size - 1
    for t in range(zpow.shape[0]):
        zlogs[t] = _prep(zpow[t], ztabs[t], fp)
    for a in range(na):
        for b in range(nb):
            P = pmask[a, b]
            if P < 0:
                continue
            comp = full ^ P
            T = comp
            while True:
                I = P | T
                dd = d[a, b, I]
                out[a, b, I] = _mulc(zlogs[dd], ztabs[dd], x[a, b, I], fp)
                if T == 0:
                    break
                T = (T - 1) & comp
            bit = 1
            while bit < size:
                if comp & bit:
                    T = comp
                    while True:
                        if T & bit:
                            out[a, b, P | T] ^= out[a, b, P | (T ^ bit)]
                        if T == 0:
                            break
                        T = (T - 1) & comp
                bit <<= 1


@njit(**_JIT)
def subset_dets(A, rptr, ridx, cptr, cidx, buf, tabs, lrow, fp, D):
    """D[I] = det of A[rows(I), cols(I), I]; non-square gives 0, empty gives 1."""
    size = A.shape[2]
    for I in range(size):
        r0 = rptr[I]
        nr = rptr[I + 1] - r0
        c0 = cptr[I]
        nc = cptr[I + 1] - c0
        if nr != nc:
            D[I] = ZERO
            continue
        if nr == 0:
            D[I] = ONE
            continue
        for p in range(nr):
            ra = ridx[r0 + p]
            for q in range(nr):
                buf[p, q] = A[ra, cidx[c0 + q], I]
        D[I] = det_inplace(buf, nr, fp, tabs, lrow)


@njit(**_JIT)
def anchored_sum(D, pf, fp):
    """Sum over I avoiding bit 0 of D[I] * D[complement of I].

    With ``pf`` set each factor is replaced by its square root, turning
    determinants of symmetric zero-diagonal matrices into Pfaffians.
    """
    size = D.shape[0]
    full = size - 1
    total = ZERO
    for I in range(0, size, 2):
        a = D[I]
        b = D[full ^ I]
        if pf:
            a = gf_sqrt(a, fp)
            b = gf_sqrt(b, fp)
        total ^= gf_mul(a, b, fp)
    return total


@njit(**_JIT)
def masked_subset_sum(base, req, nreq, pf, buf, tabs, lrow, fp):
    """Sum over S of det(base with entries whose request lies in S zeroed)."""
    n = base.shape[0]
    total = ZERO
    for S in range(1 << nreq):
        for i in range(n):
            for j in range(n):
                q = req[i, j]
                if q >= 0 and (S >> q) & 1:
                    buf[i, j] = ZERO
                else:
                    buf[i, j] = base[i, j]
        dv = det_inplace(buf, n, fp, tabs, lrow)
        if pf:
            dv = gf_sqrt(dv, fp)
        total ^= dv
    return total


@njit(**_JIT)
def lagrange_coefficients(zs, vals, fp):
    """Coefficients of the unique polynomial of degree < len(zs) through the points."""
    n = zs.shape[0]
    tab = np.zeros((2, 256), dtype=np.uint64)
    # master polynomial prod (X + z_i)
    m = np.zeros(n + 1, dtype=np.uint64)
    m[0] = ONE
    for i in range(n):
        lz = _prep(zs[i], tab[0], fp)
        for j in range(i + 1, 0, -1):
            m[j] = m[j - 1] ^ _mulc(lz, tab[0], m[j], fp)
        m[0] = _mulc(lz, tab[0], m[0], fp)
    coeffs = np.zeros(n, dtype=np.uint64)
    q = np.zeros(n, dtype=np.uint64)
    for i in range(n):
        if vals[i] == 0:
            continue
        zi = zs[i]
        lz = _prep(zi, tab[0], fp)
        q[n - 1] = m[n]
        for j in range(n - 1, 0, -1):
            q[j - 1] = m[j] ^ _mulc(lz, tab[0], q[j], fp)
        den = ZERO
        for j in range(n - 1, -1, -1):
            den = _mulc(lz, tab[0], den, fp) ^ q[j]
        w = gf_mul(vals[i], gf_inv(den, fp), fp)
        lw = _prep(w, tab[1], fp)
        for j in range(n):
            coeffs[j] ^= _mulc(lw, tab[1], q[j], fp)
    return coeffs


@njit(**_JIT)
def poly_eval(coeffs, z, fp):
    tab = np.zeros(256, dtype=np.uint64)
    lz = _prep(z, tab, fp)
    acc = ZERO
    for j in range(coeffs.shape[0] - 1, -1, -1):
        acc = _mulc(lz, tab, acc, fp) ^ coeffs[j]
    return acc


@njit(**_JIT)
def path_dp(w, comp, k, cap, sources, targets, out):
    """Component-set Held-Karp from every source.

    ``w``: int64 metric weights. out[a, b, I] receives the minimum weight,
    capped at ``cap``, of a path sources[a] -> targets[b] whose vertices meet
    exactly the components in I, one vertex per component except that a
    shared endpoint component is met at both ends. Entries with I not
    containing both endpoint components are left untouched.
    """
    n = w.shape[0]
    size = 1 << k
    inf = np.int64(1) << 60
    dp = np.empty((size, n), dtype=np.int64)
    for a in range(sources.shape[0]):
        u = sources[a]
        cu = comp[u]
        dp[:, :] = inf
        dp[1 << cu, u] = 0
        for S in range(size):
            if not (S >> cu) & 1:
                continue
            for v in range(n):
                val = dp[S, v]
                if val >= inf:
                    continue
                for v2 in range(n):
                    c2 = comp[v2]
                    if (S >> c2) & 1:
                        continue
                    nv = val + w[v, v2]
                    if nv > cap:
                        nv = cap
                    S2 = S | (1 << c2)
                    if nv < dp[S2, v2]:
                        dp[S2, v2] = nv
        for b in range(targets.shape[0]):
            t = targets[b]
            ct = comp[t]
            need = (1 << cu) | (1 << ct)
            for I in range(size):
                if I & need != need:
                    continue
                if ct != cu:
                    best = dp[I, t]
                else:
                    best = inf
                    for v in range(n):
                        if dp[I, v] < inf and v != t:
                            cand = dp[I, v] + w[v, t]
                            if cand < best:
                                best = cand
                if best > cap:
                    best = cap
                out[a, b, I] = best
