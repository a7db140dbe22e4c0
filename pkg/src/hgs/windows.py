"""Exact arithmetic for modulated piecewise-polynomial windows.

A window is a finite sum of terms

    w(t) = sum_j  p_j(t - mid_j) * exp(2*pi*i*freq_j*t) * 1_{[lo_j, hi_j)}(t)

where p_j is a complex polynomial of degree <= 2 stored in coordinates
centered at the term midpoint mid_j = (lo_j + hi_j)/2.  Indicator windows,
piecewise-linear windows, and everything the Heisenberg translates produce
from them stay inside this family, and L2 inner products reduce to the
closed-form moments

    int_a^b (t - mid)^p exp(2*pi*i*f*t) dt,   p <= 4,

so the headline identities are evaluated without discretization error.
Pointwise evaluation uses half-open cells [lo, hi); membership at cell
boundaries is a measure-zero convention, not a contract.
"""

from __future__ import annotations

import numpy as np

from .errors import WindowStructureError

_TWO_PI = 2.0 * np.pi
# |theta| below this uses the Taylor series for the centered moments; above,
# the boundary recurrence.  0.5 keeps both branches at ~1e-16 relative error.
_SERIES_CUT = 0.5
_SERIES_TERMS = 18

MAX_DEGREE = 2


def centered_moments(theta, pmax):
    """Moments N_p(theta) = int_{-1}^{1} s^p exp(i*theta*s) ds for p = 0..pmax.

    The physical moment over [-h, h] at angular frequency phi is
    h**(p+1) * N_p(phi*h).  Returns an array of shape (pmax+1,) + theta.shape.
    The branch partition keeps scratch memory at O(result size).
    """
    theta = np.asarray(theta, dtype=float)
    shape = theta.shape
    th = theta.ravel()
    out = np.empty((pmax + 1, th.size), dtype=complex)

    small = np.abs(th) < _SERIES_CUT
    ns = np.nonzero(small)[0]
    nb = np.nonzero(~small)[0]
    if ns.size:
        # Series: N_p = 2 * sum_{j: j+p even} (i*theta)^j / (j! * (p+j+1)).
        it = 1j * th[ns]
        power = np.ones(ns.size, dtype=complex)
        acc = np.zeros((pmax + 1, ns.size), dtype=complex)
        fact = 1.0
        for j in range(_SERIES_TERMS):
            if j:
                power = power * it
                fact *= j
            coef = power / fact
            for p in range(pmax + 1):
                if (p + j) % 2 == 0:
                    acc[p] += coef / (p + j + 1)
        out[:, ns] = 2.0 * acc
    if nb.size:
        # Recurrence: N_0 = 2 sin(theta)/theta and
        # N_p = (e^{i th} - (-1)^p e^{-i th})/(i th) - (p/(i th)) N_{p-1}.
        tb = th[nb]
        eip = np.exp(1j * tb)
        ein = np.conj(eip)
        inv_it = 1.0 / (1j * tb)
        prev = (eip - ein) * inv_it
        out[0, nb] = prev
        for p in range(1, pmax + 1):
            sign = -1.0 if p % 2 else 1.0
            prev = (eip - sign * ein) * inv_it - p * inv_it * prev
            out[p, nb] = prev
    return out.reshape((pmax + 1,) + shape)


def interval_moments(lo, hi, freq, pmax):
    """int_lo^hi (t - mid)^p exp(2*pi*i*freq*t) dt, mid = (lo+hi)/2, p = 0..pmax.

    All arguments broadcast; the result has shape (pmax+1,) + broadcast shape.
    Empty intervals (hi <= lo) contribute zero.
    """
    lo, hi, freq = np.broadcast_arrays(
        np.asarray(lo, dtype=float), np.asarray(hi, dtype=float),
        np.asarray(freq, dtype=float))
    h = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    live = h > 0.0
    hs = np.where(live, h, 0.0)
    theta = _TWO_PI * freq * hs
    mom = centered_moments(theta, pmax)
    phase = np.exp(1j * _TWO_PI * freq * mid)
    scale = phase * np.where(live, 1.0, 0.0)
    for p in range(pmax + 1):
        mom[p] *= scale * hs ** (p + 1)
    return mom


def indicator_transform(lo, hi, s):
    """Fourier transform int_lo^hi exp(2*pi*i*s*t) dt of an indicator."""
    return interval_moments(lo, hi, s, 0)[0]


def paired_inner_sweep(loa, hia, mida, coefa, freqa,
                       lob, hib, midb, coefb, freqb, df):
    """Per-pair inner products <a_r, exp(2*pi*i*df*t) * b_r> for paired term
    arrays (same length R) and modulations df of shape (D,) or (R, D).

    Returns a complex (R, D) array.  Pairs with empty overlap contribute
    exact zeros; the moment depth adapts to the polynomial degrees present.
    Shared by Window.inner_freq_sweep and the batched field inner products.
    """
    df = np.asarray(df, dtype=float)
    if df.ndim == 1:
        df = np.broadcast_to(df, (loa.size, df.size))
    lo = np.maximum(loa, lob)
    hi = np.minimum(hia, hib)
    out = np.zeros((lo.size, df.shape[1]), dtype=complex)
    live = hi > lo
    if not live.any():
        return out
    idx = np.nonzero(live)[0]
    lo, hi = lo[idx], hi[idx]
    mid = 0.5 * (lo + hi)
    a = _recenter(coefa[idx], mid - mida[idx])
    b = np.conj(_recenter(coefb[idx], mid - midb[idx]))
    dega = _live_degree(a)
    degb = _live_degree(b)
    pmax = dega + degb
    poly = np.zeros((lo.size, pmax + 1), dtype=complex)
    for p in range(dega + 1):
        for q in range(degb + 1):
            poly[:, p + q] += a[:, p] * b[:, q]
    base = freqa[idx] - freqb[idx]
    freq = base[:, None] - df[idx]
    mom = interval_moments(lo[:, None], hi[:, None], freq, pmax)
    acc = np.zeros(freq.shape, dtype=complex)
    for p in range(pmax + 1):
        acc += poly[:, p, None] * mom[p]
    out[idx] = acc
    return out


def _live_degree(coef):
    for p in range(coef.shape[1] - 1, 0, -1):
        if np.any(coef[:, p] != 0):
            return p
    return 0


def _recenter(coef, shift):
    """Re-expand centered polynomial coefficients about mid + shift.

    coef has shape (..., MAX_DEGREE+1); returns coefficients of the same
    polynomial written in powers of (t - (mid + shift)).
    """
    c0, c1, c2 = coef[..., 0], coef[..., 1], coef[..., 2]
    out = np.empty_like(coef)
    out[..., 0] = c0 + c1 * shift + c2 * shift * shift
    out[..., 1] = c1 + 2.0 * c2 * shift
    out[..., 2] = c2
    return out


class Window:
    """Immutable modulated piecewise-polynomial function of one variable."""

    __slots__ = ("lo", "hi", "coef", "freq")

    def __init__(self, lo, hi, coef, freq):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        coef = np.atleast_2d(np.asarray(coef, dtype=complex))
        freq = np.atleast_1d(np.asarray(freq, dtype=float))
        if coef.shape != (lo.size, MAX_DEGREE + 1):
            raise WindowStructureError(
                f"coef must have shape (n_terms, {MAX_DEGREE + 1})")
        self.lo, self.hi, self.coef, self.freq = lo, hi, coef, freq

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls(np.empty(0), np.empty(0),
                   np.empty((0, MAX_DEGREE + 1), dtype=complex), np.empty(0))

    @classmethod
    def indicator(cls, a, b, scale=1.0):
        """scale * 1_[a, b)."""
        if not b > a:
            return cls.zero()
        coef = np.zeros((1, MAX_DEGREE + 1), dtype=complex)
        coef[0, 0] = scale
        return cls([a], [b], coef, [0.0])

    @classmethod
    def piecewise_linear(cls, breaks, values):
        """Continuous piecewise-linear interpolant of (breaks, values).

        breaks must be strictly increasing; the window vanishes outside
        [breaks[0], breaks[-1]].
        """
        breaks = np.asarray(breaks, dtype=float)
        values = np.asarray(values, dtype=complex)
        if breaks.ndim != 1 or breaks.size < 2 or values.shape != breaks.shape:
            raise WindowStructureError("need matching 1d breaks and values")
        if not np.all(np.diff(breaks) > 0):
            raise WindowStructureError("breaks must be strictly increasing")
        lo, hi = breaks[:-1], breaks[1:]
        mid = 0.5 * (lo + hi)
        slope = np.diff(values) / (hi - lo)
        coef = np.zeros((lo.size, MAX_DEGREE + 1), dtype=complex)
        coef[:, 0] = values[:-1] + slope * (mid - lo)
        coef[:, 1] = slope
        return cls(lo, hi, coef, np.zeros(lo.size))

    @classmethod
    def from_samples(cls, offset, step, samples):
        """Piecewise-linear window through uniformly spaced samples."""
        samples = np.asarray(samples, dtype=complex)
        breaks = offset + step * np.arange(samples.size)
        return cls.piecewise_linear(breaks, samples)

    # -- structure ---------------------------------------------------------

    @property
    def n_terms(self):
        return self.lo.size

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    def degree(self):
        if self.n_terms == 0:
            return 0
        live = np.abs(self.coef) > 0.0
        return int(max(np.nonzero(live.any(axis=0))[0], default=0))

    def support(self):
        """Smallest closed interval containing all terms, or None if empty."""
        if self.n_terms == 0:
            return None
        return float(self.lo.min()), float(self.hi.max())

    def is_plain_indicator(self):
        """Single unmodulated constant-coefficient term."""
        return (self.n_terms == 1 and self.freq[0] == 0.0
                and self.coef[0, 1] == 0 and self.coef[0, 2] == 0)

    # -- algebra -----------------------------------------------------------

    def translate(self, dt):
        """w(t - dt)."""
        phase = np.exp(-1j * _TWO_PI * self.freq * dt)
        return Window(self.lo + dt, self.hi + dt,
                      self.coef * phase[:, None], self.freq)

    def modulate(self, df):
        """exp(2*pi*i*df*t) * w(t)."""
        return Window(self.lo, self.hi, self.coef, self.freq + df)

    def scaled(self, c):
        return Window(self.lo, self.hi, self.coef * c, self.freq)

    def __mul__(self, c):
        return self.scaled(c)

    __rmul__ = __mul__

    def __add__(self, other):
        return Window(np.concatenate([self.lo, other.lo]),
                      np.concatenate([self.hi, other.hi]),
                      np.concatenate([self.coef, other.coef]),
                      np.concatenate([self.freq, other.freq]))

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def conjugate(self):
        return Window(self.lo, self.hi, np.conj(self.coef), -self.freq)

    def affine_substitute(self, c):
        """w(t / c) for real c != 0.  Stays in the family."""
        if c == 0:
            raise WindowStructureError("affine substitution needs c != 0")
        lo, hi = self.lo * c, self.hi * c
        if c < 0:
            lo, hi = hi, lo
        coef = self.coef / (float(c) ** np.arange(MAX_DEGREE + 1))[None, :]
        return Window(lo, hi, coef, self.freq / c)

    def product_conj(self, other):
        """Pointwise product w1(t) * conj(w2(t)) as a window.

        Requires deg(w1) + deg(w2) <= MAX_DEGREE.
        """
        if self.degree() + other.degree() > MAX_DEGREE:
            raise WindowStructureError("product would exceed max degree")
        if self.n_terms == 0 or other.n_terms == 0:
            return Window.zero()
        i, j = np.meshgrid(np.arange(self.n_terms), np.arange(other.n_terms),
                           indexing="ij")
        i, j = i.ravel(), j.ravel()
        lo = np.maximum(self.lo[i], other.lo[j])
        hi = np.minimum(self.hi[i], other.hi[j])
        live = hi > lo
        if not live.any():
            return Window.zero()
        i, j, lo, hi = i[live], j[live], lo[live], hi[live]
        mid = 0.5 * (lo + hi)
        a = _recenter(self.coef[i], mid - self.mid[i])
        b = np.conj(_recenter(other.coef[j], mid - other.mid[j]))
        coef = np.zeros((lo.size, MAX_DEGREE + 1), dtype=complex)
        coef[:, 0] = a[:, 0] * b[:, 0]
        coef[:, 1] = a[:, 0] * b[:, 1] + a[:, 1] * b[:, 0]
        coef[:, 2] = a[:, 0] * b[:, 2] + a[:, 1] * b[:, 1] + a[:, 2] * b[:, 0]
        return Window(lo, hi, coef, self.freq[i] - other.freq[j])

    # -- analysis ----------------------------------------------------------

    def integral(self):
        """int w(t) dt in closed form."""
        if self.n_terms == 0:
            return 0.0 + 0.0j
        mom = interval_moments(self.lo, self.hi, self.freq, MAX_DEGREE)
        total = 0.0 + 0.0j
        for p in range(MAX_DEGREE + 1):
            total += np.sum(self.coef[:, p] * mom[p])
        return complex(total)

    def inner(self, other):
        """<w1, w2> = int w1(t) conj(w2(t)) dt, exact."""
        return complex(np.sum(self.inner_freq_sweep(other, np.zeros(1))))

    def inner_freq_sweep(self, other, df):
        """<w1, exp(2*pi*i*df*t) * w2> for an array of modulations df.

        Returns a complex array with the shape of df.  This is the kernel of
        every Gabor-coefficient sweep: the modulation enters only through the
        frequency difference, so all df values share the overlap structure.
        """
        df = np.asarray(df, dtype=float)
        if self.n_terms == 0 or other.n_terms == 0:
            return np.zeros(df.shape, dtype=complex)
        i, j = np.meshgrid(np.arange(self.n_terms), np.arange(other.n_terms),
                           indexing="ij")
        i, j = i.ravel(), j.ravel()
        vals = paired_inner_sweep(
            self.lo[i], self.hi[i], self.mid[i], self.coef[i], self.freq[i],
            other.lo[j], other.hi[j], other.mid[j], other.coef[j],
            other.freq[j], df.ravel())
        return vals.sum(axis=0).reshape(df.shape)

    def norm2(self):
        """Squared L2 norm, exact and nonnegative."""
        return max(self.inner(self).real, 0.0)

    def __call__(self, t):
        """Pointwise values on half-open cells [lo, hi)."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t)
        out = np.zeros(tt.shape, dtype=complex)
        for j in range(self.n_terms):
            mask = (tt >= self.lo[j]) & (tt < self.hi[j])
            if not mask.any():
                continue
            s = tt[mask] - self.mid[j]
            val = (self.coef[j, 0] + self.coef[j, 1] * s
                   + self.coef[j, 2] * s * s)
            out[mask] += val * np.exp(1j * _TWO_PI * self.freq[j] * tt[mask])
        return complex(out[0]) if scalar else out

    def squared_modulus_pieces(self):
        """|w|^2 as real quadratics on a breakpoint partition.

        Only defined when every term is unmodulated (freq == 0); cross terms
        between modulated pieces would leave the polynomial family.  Returns
        (breaks, quad) with quad[c] = (q0, q1, q2) the coefficients of
        |w|^2 in powers of (t - cell midpoint) on [breaks[c], breaks[c+1]).
        """
        if self.n_terms == 0:
            return np.zeros(0), np.zeros((0, 3))
        if np.any(self.freq != 0.0):
            raise WindowStructureError(
                "squared modulus needs an unmodulated window")
        breaks = np.unique(np.concatenate([self.lo, self.hi]))
        cell_lo, cell_hi = breaks[:-1], breaks[1:]
        cmid = 0.5 * (cell_lo + cell_hi)
        quad = np.zeros((cmid.size, 3))
        for c in range(cmid.size):
            amp = np.zeros(MAX_DEGREE + 1, dtype=complex)
            for j in range(self.n_terms):
                if self.lo[j] <= cell_lo[c] and self.hi[j] >= cell_hi[c]:
                    amp += _recenter(self.coef[j][None, :],
                                     np.array([cmid[c] - self.mid[j]]))[0]
            if amp[2] != 0:
                raise WindowStructureError(
                    "squared modulus needs degree <= 1 per cell")
            a0, a1 = amp[0], amp[1]
            quad[c, 0] = (a0 * np.conj(a0)).real
            quad[c, 1] = 2.0 * (a0 * np.conj(a1)).real
            quad[c, 2] = (a1 * np.conj(a1)).real
        return breaks, quad
