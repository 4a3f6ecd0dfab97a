"""Numba kernels for in-place gate application on a flat amplitude array.

Index convention matches the rest of the package: qubit q is bit q of the
basis index.  Each kernel is a single pass with no temporaries; enumeration
inserts the target bit(s) into a compact counter, so every amplitude pair is
visited exactly once.
"""

from numba import njit


@njit(cache=True)
def apply_2x2(amp, q, u00, u01, u10, u11):
    half = 1 << q
    mask = half - 1
    for g in range(len(amp) >> 1):
        i0 = ((g >> q) << (q + 1)) | (g & mask)
        i1 = i0 | half
        a = amp[i0]
        b = amp[i1]
        amp[i0] = u00 * a + u01 * b
        amp[i1] = u10 * a + u11 * b


@njit(cache=True)
def apply_diag(amp, q, d0, d1):
    half = 1 << q
    mask = half - 1
    for g in range(len(amp) >> 1):
        i0 = ((g >> q) << (q + 1)) | (g & mask)
        amp[i0] = d0 * amp[i0]
        amp[i0 | half] = d1 * amp[i0 | half]


@njit(cache=True)
def _insert_two_zeros(g, lo, hi):
    lo_mask = (1 << lo) - 1
    hi_mask = (1 << hi) - 1
    x = ((g >> lo) << (lo + 1)) | (g & lo_mask)
    return ((x >> hi) << (hi + 1)) | (x & hi_mask)


@njit(cache=True)
def apply_cnot(amp, control, target):
    lo = min(control, target)
    hi = max(control, target)
    cbit = 1 << control
    tbit = 1 << target
    for g in range(len(amp) >> 2):
        i0 = _insert_two_zeros(g, lo, hi) | cbit
        i1 = i0 | tbit
        tmp = amp[i0]
        amp[i0] = amp[i1]
        amp[i1] = tmp


@njit(cache=True)
def apply_cphase(amp, a, b, phase):
    lo = min(a, b)
    hi = max(a, b)
    bits = (1 << a) | (1 << b)
    for g in range(len(amp) >> 2):
        i = _insert_two_zeros(g, lo, hi) | bits
        amp[i] = phase * amp[i]


@njit(cache=True)
def apply_swap(amp, a, b):
    lo = min(a, b)
    hi = max(a, b)
    abit = 1 << a
    bbit = 1 << b
    for g in range(len(amp) >> 2):
        base = _insert_two_zeros(g, lo, hi)
        i01 = base | bbit
        i10 = base | abit
        tmp = amp[i01]
        amp[i01] = amp[i10]
        amp[i10] = tmp
