"""Compiled inner loops for the centralized detectors.

The candidate scan is quadratic in the monitoring length (every step K
re-examines every candidate attack step k <= K), so it runs under numba.
Everything here works with grouped bit counts; per-(k, K) cost is O(N).

The scan never calls the CDF per candidate. With q_a the estimated clean
bit-zero probability, the clamp boundary in terms of a window bit mean is

    w >= 1 - qt_c,   qt_c = F(F^-1(q_a) - b),

because the unclamped shift estimate exceeds b exactly when the window
mean is that large; in the unclamped branch the fitted bit-zero
probability is 1 - w exactly, so its two count-ratio logs split over an
x log x table built once per pass. F and F^-1 are evaluated once per
step K and the k-loop is table lookups and arithmetic.

Status codes instead of exceptions (numba cannot raise rich errors):
0 ok, 1 degenerate pooled fraction (a bit fraction hit 0 or 1).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from . import noise as _noise

STATUS_OK = 0
STATUS_DEGENERATE = 1

_norm_cdf = njit(cache=True)(_noise.norm_cdf)
_norm_ppf = njit(cache=True)(_noise.norm_ppf)
_logistic_cdf = njit(cache=True)(_noise.logistic_cdf)
_logistic_ppf = njit(cache=True)(_noise.logistic_ppf)


@njit(cache=True)
def cdf_scalar(code: int, x: float, scale: float) -> float:
    if code == 0:
        return _norm_cdf(x / scale)
    return _logistic_cdf(x / scale)


@njit(cache=True)
def ppf_scalar(code: int, p: float, scale: float) -> float:
    if code == 0:
        return scale * _norm_ppf(p)
    return scale * _logistic_ppf(p)


@njit(cache=True)
def xlogx_table(n):
    """x log x for integer x in 0..n; the 0 entry is the limit value 0."""
    out = np.zeros(n + 1)
    for t in range(2, n + 1):
        out[t] = t * math.log(t)
    return out


@njit(cache=True)
def scan_candidates(prefix, a_prefix, xlx, big_k, lam_m, lam_n, lam_s,
                    m_len, n_sensors, n_secure, b, code, scale):
    """Max over candidate attack steps at monitoring time big_k.

    prefix[j, t] counts bits of insecure sensor j over monitoring steps
    1..t; a_prefix[t] is the same summed over sensors. Returns
    (h_g, h_a, k_hat, status) where h_g carries the attack-step block and
    h_a drops it, both including the shared pooled blocks.
    """
    n_att = prefix.shape[0]
    s_u = (lam_m + lam_n) / ((m_len + big_k) * n_sensors)
    s_a = (lam_m + lam_s) / (m_len * n_sensors + big_k * n_secure)
    if s_u <= 0.0 or s_u >= 1.0 or s_a <= 0.0 or s_a >= 1.0:
        return 0.0, 0.0, 0, STATUS_DEGENERATE
    q_u = 1.0 - s_u
    q_a = 1.0 - s_a
    g1 = math.log(q_a / q_u)
    g2 = math.log(s_a / s_u)
    e1 = (m_len * n_sensors - lam_m) * g1 + lam_m * g2
    e2 = (big_k * n_secure - lam_s) * g1 + lam_s * g2
    qt_c = cdf_scalar(code, ppf_scalar(code, q_a, scale) - b, scale)
    if qt_c <= 0.0 or qt_c >= 1.0:
        return 0.0, 0.0, 0, STATUS_DEGENERATE
    p_thresh = 1.0 - qt_c
    log_qtc_qu = math.log(qt_c / q_u)
    log_1qtc_su = math.log((1.0 - qt_c) / s_u)
    lg_qu = math.log(q_u)
    lg_su = math.log(s_u)
    best_g = -math.inf
    best_a = -math.inf
    k_hat = 1
    for k in range(1, big_k + 1):
        window = big_k - k + 1
        e4 = 0.0
        for j in range(n_att):
            m1 = prefix[j, big_k] - prefix[j, k - 1]
            m0 = window - m1
            w = m1 / window
            if w >= p_thresh:
                # Unclamped shift estimate; fitted bit-zero prob is 1 - w,
                # i.e. m0/window exactly, so the logs come off the table.
                e4 += (xlx[m0] + xlx[m1] - xlx[window]
                       - m0 * lg_qu - m1 * lg_su)
            else:
                e4 += m0 * log_qtc_qu + m1 * log_1qtc_su
        a_before = a_prefix[k - 1]
        e3 = ((k - 1) * n_att - a_before) * g1 + a_before * g2
        if e3 + e4 > best_g:
            best_g = e3 + e4
            k_hat = k
        if e4 > best_a:
            best_a = e4
    return e1 + e2 + best_g, e1 + e2 + best_a, k_hat, STATUS_OK


@njit(cache=True)
def gcusum_run(bits_att, lam_n_cum, lam_s_cum, lam_m, m_len, n_sensors,
               n_secure, b, code, scale, h_stop):
    """Full monitoring pass over bits_att (insecure sensors x steps).

    lam_n_cum / lam_s_cum are cumulative all-sensor / secure-sensor bit
    sums per monitoring step. Stops early once both statistics reach
    h_stop. Returns (h_g, h_a, k_hat, n_steps, status); entries past
    n_steps are unset.
    """
    n_att, k_max = bits_att.shape
    prefix = np.zeros((n_att, k_max + 1), dtype=np.int64)
    for j in range(n_att):
        acc = 0
        for t in range(k_max):
            acc += bits_att[j, t]
            prefix[j, t + 1] = acc
    a_prefix = np.zeros(k_max + 1, dtype=np.int64)
    for t in range(1, k_max + 1):
        total = 0
        for j in range(n_att):
            total += prefix[j, t]
        a_prefix[t] = total
    xlx = xlogx_table(k_max)
    h_g = np.full(k_max, np.nan)
    h_a = np.full(k_max, np.nan)
    k_hat = np.zeros(k_max, dtype=np.int64)
    n_steps = 0
    for big_k in range(1, k_max + 1):
        hg, ha, kh, status = scan_candidates(
            prefix, a_prefix, xlx, big_k, lam_m, lam_n_cum[big_k - 1],
            lam_s_cum[big_k - 1], m_len, n_sensors, n_secure, b, code, scale)
        if status != STATUS_OK:
            return h_g, h_a, k_hat, n_steps, status
        h_g[big_k - 1] = hg
        h_a[big_k - 1] = ha
        k_hat[big_k - 1] = kh
        n_steps = big_k
        if hg >= h_stop and ha >= h_stop:
            break
    return h_g, h_a, k_hat, n_steps, STATUS_OK


@njit(cache=True)
def page_path(increments):
    """CUSUM path s_k = max(s_{k-1}, 0) + x_k from raw increments."""
    out = np.empty(increments.shape[0])
    s = 0.0
    for i in range(increments.shape[0]):
        s = max(s, 0.0) + increments[i]
        out[i] = s
    return out
