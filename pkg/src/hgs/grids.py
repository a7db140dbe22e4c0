"""Spectral sets, the weighted spectral quadrature, discretized fields,
inner products, and field serialization.

The measure on the spectral axis is |lambda| d(lambda).  A field sample
holds one window per quadrature node, stored in a flat term table so that
inner products and Heisenberg translates run vectorized across nodes.
Node membership of spectral endpoints follows half-open cells; the sets
are only ever used up to measure zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DomainError, EmptyGridError, FieldFormatError,
                     GridMismatchError, WindowStructureError)
from .windows import MAX_DEGREE, Window, paired_inner_sweep

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# spectral sets


@dataclass(frozen=True)
class SpectralSet:
    """Finite union of disjoint bounded intervals on the spectral axis."""

    intervals: tuple

    def __init__(self, intervals):
        ivs = sorted((float(a), float(b)) for a, b in intervals)
        for a, b in ivs:
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise DomainError(f"invalid interval ({a}, {b})")
        for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
            if a2 < b1:
                raise DomainError("intervals must be pairwise disjoint")
        object.__setattr__(self, "intervals", tuple(ivs))

    @classmethod
    def parse(cls, text):
        """Parse 'a,b[;a,b...]' as used by the command line."""
        pieces = []
        for chunk in text.split(";"):
            parts = chunk.split(",")
            if len(parts) != 2:
                raise DomainError(f"bad interval spec {chunk!r}")
            pieces.append((float(parts[0]), float(parts[1])))
        return cls(pieces)

    def measure(self):
        """Exact weighted measure: sum of int_a^b |x| dx in closed form."""
        total = 0.0
        for a, b in self.intervals:
            total += 0.5 * (b * abs(b) - a * abs(a))
        return total

    def total_length(self):
        return sum(b - a for a, b in self.intervals)

    def bounds(self):
        if not self.intervals:
            return None
        return self.intervals[0][0], self.intervals[-1][1]

    def contains(self, x):
        return any(a <= x <= b for a, b in self.intervals)

    def cut(self, lambda_min):
        """Pieces of each interval with the band (-lambda_min, lambda_min)
        removed, keyed by the index of the parent interval."""
        pieces = []
        for idx, (a, b) in enumerate(self.intervals):
            for lo, hi in ((a, min(b, -lambda_min)), (max(a, lambda_min), b)):
                if hi > lo:
                    pieces.append((idx, lo, hi))
        return pieces

    def intersect(self, other):
        out = []
        for a1, b1 in self.intervals:
            for a2, b2 in other.intervals:
                lo, hi = max(a1, a2), min(b1, b2)
                if hi > lo:
                    out.append((lo, hi))
        return SpectralSet(out)


def plancherel_measure(E: SpectralSet) -> float:
    """Weighted measure of the spectral set, exact piecewise-quadratic form."""
    return E.measure()


# ---------------------------------------------------------------------------
# quadrature grids


@dataclass(frozen=True)
class LambdaGrid:
    """Quadrature rule for the weighted spectral integral.

    Nodes never sit at 0 or at interval endpoints; weights carry the
    |lambda| density, so sum(weights) approximates the weighted measure of
    the spectral set outside the excluded band (-lambda_min, lambda_min).
    """

    nodes: np.ndarray
    weights: np.ndarray
    lambda_min: float
    spectral_set: SpectralSet
    rule: str = "midpoint"

    @property
    def n(self):
        return self.nodes.size

    def mass(self):
        return float(self.weights.sum())

    def same_as(self, other):
        return (self.n == other.n
                and np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.weights, other.weights))


def _allocate(pieces, n_per_interval):
    """Largest-remainder split of each parent interval's node budget over
    its surviving pieces."""
    by_parent = {}
    for idx, lo, hi in pieces:
        by_parent.setdefault(idx, []).append((lo, hi))
    alloc = []
    for idx in sorted(by_parent):
        segs = by_parent[idx]
        total = sum(hi - lo for lo, hi in segs)
        raw = [n_per_interval * (hi - lo) / total for lo, hi in segs]
        counts = [max(1, int(r)) for r in raw]
        while sum(counts) < n_per_interval:
            rems = [r - c for r, c in zip(raw, counts)]
            counts[rems.index(max(rems))] += 1
        while sum(counts) > n_per_interval and max(counts) > 1:
            rems = [r - c for r, c in zip(raw, counts)]
            j = rems.index(min(rems))
            if counts[j] > 1:
                counts[j] -= 1
            else:
                break
        alloc.extend((lo, hi, c) for (lo, hi), c in zip(segs, counts))
    return alloc


def lambda_grid(E: SpectralSet, n_per_interval: int,
                lambda_min: float = 0.05) -> LambdaGrid:
    """Composite midpoint rule on E with the band around 0 excluded.

    Each interval of E receives n_per_interval nodes, split proportionally
    among the parts that survive the cut.  Weights are |node| * cell width.
    """
    if n_per_interval < 1:
        raise DomainError("need at least one node per interval")
    if not lambda_min > 0:
        raise DomainError("lambda_min must be positive")
    pieces = E.cut(lambda_min)
    if not pieces:
        raise EmptyGridError(
            f"spectral set lies inside the excluded band (+-{lambda_min})")
    nodes, weights = [], []
    for lo, hi, count in _allocate(pieces, n_per_interval):
        h = (hi - lo) / count
        x = lo + h * (np.arange(count) + 0.5)
        nodes.append(x)
        weights.append(np.abs(x) * h)
    nodes = np.concatenate(nodes)
    order = np.argsort(nodes)
    return LambdaGrid(nodes[order], np.concatenate(weights)[order],
                      lambda_min, E, "midpoint")


def gauss_lambda_grid(E: SpectralSet, n_per_interval: int,
                      lambda_min: float = 0.05, order: int = 8) -> LambdaGrid:
    """Composite Gauss-Legendre rule with the same layout as lambda_grid.

    Plumbing for high-accuracy oracles; nodes are interior, so the
    no-node-at-breakpoints property of the midpoint rule is preserved.
    """
    if n_per_interval < order:
        raise DomainError("need at least `order` nodes per interval")
    pieces = E.cut(lambda_min)
    if not pieces:
        raise EmptyGridError(
            f"spectral set lies inside the excluded band (+-{lambda_min})")
    xg, wg = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for lo, hi, count in _allocate(pieces, n_per_interval):
        cells = max(1, count // order)
        edges = np.linspace(lo, hi, cells + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            x = 0.5 * (b - a) * xg + 0.5 * (a + b)
            nodes.append(x)
            weights.append(np.abs(x) * 0.5 * (b - a) * wg)
    nodes = np.concatenate(nodes)
    order_ix = np.argsort(nodes)
    return LambdaGrid(nodes[order_ix], np.concatenate(weights)[order_ix],
                      lambda_min, E, f"gauss{order}")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid for tabulated slices."""

    offset: float
    step: float
    count: int

    def __post_init__(self):
        if not (self.step > 0 and self.count > 0):
            raise DomainError("need step > 0 and count > 0")

    def times(self):
        return self.offset + self.step * np.arange(self.count)


# ---------------------------------------------------------------------------
# field samples


class FieldSample:
    """Discretized element of the weighted L2 space over E x R.

    One window per spectral node, kept in a flat term table.  Instances are
    immutable; transforms return new objects.  An optional analytic profile
    (a callable lam -> Window) lets verification code evaluate slices off
    the grid exactly.
    """

    def __init__(self, grid: LambdaGrid, term_node, term_lo, term_hi,
                 term_coef, term_freq, profile=None, kinds=None):
        self.grid = grid
        self.term_node = np.asarray(term_node, dtype=np.int64)
        self.term_lo = np.asarray(term_lo, dtype=float)
        self.term_hi = np.asarray(term_hi, dtype=float)
        self.term_coef = np.asarray(term_coef, dtype=complex).reshape(
            -1, MAX_DEGREE + 1)
        self.term_freq = np.asarray(term_freq, dtype=float)
        if not np.all(np.diff(self.term_node) >= 0):
            order = np.argsort(self.term_node, kind="stable")
            self.term_node = self.term_node[order]
            self.term_lo = self.term_lo[order]
            self.term_hi = self.term_hi[order]
            self.term_coef = self.term_coef[order]
            self.term_freq = self.term_freq[order]
        counts = np.bincount(self.term_node, minlength=grid.n)
        self._starts = np.concatenate([[0], np.cumsum(counts)])
        self.profile = profile
        self.kinds = kinds

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_windows(cls, grid, windows, profile=None, kinds=None):
        if len(windows) != grid.n:
            raise GridMismatchError("need one window per node")
        node = np.concatenate([np.full(w.n_terms, i, dtype=np.int64)
                               for i, w in enumerate(windows)]) \
            if windows else np.empty(0, dtype=np.int64)
        cat = (lambda xs, empty: np.concatenate(xs) if xs else empty)
        lo = cat([w.lo for w in windows], np.empty(0))
        hi = cat([w.hi for w in windows], np.empty(0))
        coef = (np.concatenate([w.coef for w in windows])
                if windows else np.empty((0, MAX_DEGREE + 1), dtype=complex))
        freq = cat([w.freq for w in windows], np.empty(0))
        return cls(grid, node, lo, hi, coef, freq, profile, kinds)

    @classmethod
    def from_profile(cls, grid, profile):
        """Sample an analytic profile at the grid nodes, keeping the profile
        attached for off-grid evaluation."""
        return cls.from_windows(grid, [profile(lam) for lam in grid.nodes],
                                profile=profile)

    @classmethod
    def zero(cls, grid):
        return cls.from_windows(grid, [Window.zero()] * grid.n)

    # -- access ------------------------------------------------------------

    @property
    def n_terms(self):
        return self.term_node.size

    def term_mid(self):
        return 0.5 * (self.term_lo + self.term_hi)

    def slice(self, i) -> Window:
        a, b = self._starts[i], self._starts[i + 1]
        return Window(self.term_lo[a:b], self.term_hi[a:b],
                      self.term_coef[a:b], self.term_freq[a:b])

    def slice_at(self, lam, tol=1e-12) -> Window:
        """Window at spectral value lam: exact node match, else the profile,
        else linear interpolation between bracketing node slices."""
        hits = np.nonzero(np.abs(self.grid.nodes - lam) <= tol)[0]
        if hits.size:
            return self.slice(int(hits[0]))
        if self.profile is not None:
            return self.profile(lam)
        nodes = self.grid.nodes
        j = int(np.searchsorted(nodes, lam))
        if j == 0 or j == nodes.size:
            raise DomainError(f"no slice data at lambda={lam}")
        t = (lam - nodes[j - 1]) / (nodes[j] - nodes[j - 1])
        return self.slice(j - 1).scaled(1 - t) + self.slice(j).scaled(t)

    def windows(self):
        return [self.slice(i) for i in range(self.grid.n)]

    # -- algebra -----------------------------------------------------------

    def scaled(self, c):
        prof = self.profile
        new_prof = (lambda lam, p=prof: p(lam).scaled(c)) if prof else None
        return FieldSample(self.grid, self.term_node, self.term_lo,
                           self.term_hi, self.term_coef * c, self.term_freq,
                           profile=new_prof)

    def __add__(self, other):
        if not self.grid.same_as(other.grid):
            raise GridMismatchError("fields live on different grids")
        return FieldSample(
            self.grid,
            np.concatenate([self.term_node, other.term_node]),
            np.concatenate([self.term_lo, other.term_lo]),
            np.concatenate([self.term_hi, other.term_hi]),
            np.concatenate([self.term_coef, other.term_coef]),
            np.concatenate([self.term_freq, other.term_freq]))

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def heisenberg_translate(self, x1, x2, x3):
        """Slice-wise action of the group element (x1, x2, x3):

            g(lam, t) -> e^{2 pi i lam x3} e^{-2 pi i lam x2 t} g(lam, t - x1)

        Exact on the term table; the profile, if any, is transformed too.
        """
        lam = self.grid.nodes[self.term_node]
        coef = self.term_coef * np.exp(
            1j * _TWO_PI * (lam * x3 - self.term_freq * x1))[:, None]
        freq = self.term_freq - lam * x2
        prof = self.profile
        new_prof = None
        if prof is not None:
            def new_prof(lam, p=prof, x1=x1, x2=x2, x3=x3):
                phase = complex(math.cos(_TWO_PI * lam * x3),
                                math.sin(_TWO_PI * lam * x3))
                return p(lam).translate(x1).modulate(-lam * x2).scaled(phase)
        return FieldSample(self.grid, self.term_node, self.term_lo + x1,
                           self.term_hi + x1, coef, freq, profile=new_prof)

    def restrict(self, subset: SpectralSet):
        """Zero out slices whose node lies outside the given spectral set."""
        keep = np.array([subset.contains(x)
                         for x in self.grid.nodes[self.term_node]])
        prof = self.profile
        new_prof = None
        if prof is not None:
            def new_prof(lam, p=prof, s=subset):
                return p(lam) if s.contains(lam) else Window.zero()
        return FieldSample(self.grid, self.term_node[keep],
                           self.term_lo[keep], self.term_hi[keep],
                           self.term_coef[keep], self.term_freq[keep],
                           profile=new_prof)

    # -- analysis ----------------------------------------------------------

    def slice_norm2(self):
        """Exact per-node squared norms as an array."""
        ia, ib, node = _cross_join(self._starts, self._starts)
        if ia.size == 0:
            return np.zeros(self.grid.n)
        mid = self.term_mid()
        vals = paired_inner_sweep(
            self.term_lo[ia], self.term_hi[ia], mid[ia], self.term_coef[ia],
            self.term_freq[ia],
            self.term_lo[ib], self.term_hi[ib], mid[ib], self.term_coef[ib],
            self.term_freq[ib], np.zeros(1))[:, 0]
        return np.maximum(
            np.bincount(node, weights=vals.real, minlength=self.grid.n), 0.0)

    def norm2(self):
        return max(field_inner(self, self).real, 0.0)

    def eval_point(self, lam, t):
        """Pointwise value g(lam, t); exact for profile-backed fields."""
        return self.slice_at(lam)(t)


def field_sum(fields, coeffs):
    """Linear combination sum_j coeffs[j] * fields[j] on a common grid.

    Unlike repeated addition this keeps an analytic profile when every
    summand carries one, so synthesized test fields stay evaluable off-grid.
    """
    if len(fields) != len(coeffs) or not fields:
        raise DomainError("need matching nonempty fields and coefficients")
    grid = fields[0].grid
    for f in fields[1:]:
        if not grid.same_as(f.grid):
            raise GridMismatchError("fields live on different grids")
    scaled = [f.scaled(c) for f, c in zip(fields, coeffs)]
    out = FieldSample(
        grid,
        np.concatenate([f.term_node for f in scaled]),
        np.concatenate([f.term_lo for f in scaled]),
        np.concatenate([f.term_hi for f in scaled]),
        np.concatenate([f.term_coef for f in scaled]),
        np.concatenate([f.term_freq for f in scaled]))
    if all(f.profile is not None for f in scaled):
        profs = [f.profile for f in scaled]

        def combined(lam, profs=profs):
            acc = profs[0](lam)
            for p in profs[1:]:
                acc = acc + p(lam)
            return acc

        out.profile = combined
    return out


def _cross_join(starts_a, starts_b):
    """Segmented cross join of two term tables sharing node segmentation.

    Returns (ia, ib, node) index arrays covering, per node, every pair of a
    term from table A and a term from table B.
    """
    counts_a = np.diff(starts_a)
    counts_b = np.diff(starts_b)
    pc = counts_a * counts_b
    total = int(pc.sum())
    if total == 0:
        e = np.empty(0, dtype=np.int64)
        return e, e, e
    node = np.repeat(np.arange(counts_a.size), pc)
    first = np.concatenate([[0], np.cumsum(pc)[:-1]])
    rank = np.arange(total, dtype=np.int64) - np.repeat(first, pc)
    cb = np.repeat(counts_b, pc)
    ia = np.repeat(starts_a[:-1], pc) + rank // np.maximum(cb, 1)
    ib = np.repeat(starts_b[:-1], pc) + rank % np.maximum(cb, 1)
    return ia, ib, node


def field_inner_per_node(f: FieldSample, g: FieldSample,
                         max_pairs: int = 4_000_000) -> np.ndarray:
    """Unweighted slice inner products <f(lam_i, .), g(lam_i, .)> as an
    array over nodes; exact, deterministic accumulation order.

    Node blocks are sized so at most max_pairs term pairs are materialized
    at once, which keeps dense reconstructions tractable."""
    if not f.grid.same_as(g.grid):
        raise GridMismatchError("fields live on different grids")
    out = np.zeros(f.grid.n, dtype=complex)
    counts = (np.diff(f._starts) * np.diff(g._starts)).astype(np.int64)
    total = int(counts.sum())
    if total == 0:
        return out
    f_mid = f.term_mid()
    g_mid = g.term_mid()
    zero = np.zeros(1)
    start = 0
    while start < f.grid.n:
        stop = start
        block = 0
        while stop < f.grid.n and (block == 0
                                   or block + counts[stop] <= max_pairs):
            block += counts[stop]
            stop += 1
        # _cross_join on the offset slice yields absolute term indices and
        # block-local node ids
        ia, ib, node = _cross_join(f._starts[start:stop + 1],
                                   g._starts[start:stop + 1])
        if ia.size:
            # drop non-overlapping pairs before gathering full term data;
            # dense reconstructions are dominated by dead pairs
            live = (np.minimum(f.term_hi[ia], g.term_hi[ib])
                    > np.maximum(f.term_lo[ia], g.term_lo[ib]))
            ia, ib, node = ia[live], ib[live], node[live]
        if ia.size:
            vals = paired_inner_sweep(
                f.term_lo[ia], f.term_hi[ia], f_mid[ia], f.term_coef[ia],
                f.term_freq[ia],
                g.term_lo[ib], g.term_hi[ib], g_mid[ib], g.term_coef[ib],
                g.term_freq[ib], zero)[:, 0]
            out[start:stop] += (
                np.bincount(node, weights=vals.real, minlength=stop - start)
                + 1j * np.bincount(node, weights=vals.imag,
                                   minlength=stop - start))
        start = stop
    return out


def field_inner(f: FieldSample, g: FieldSample):
    """<f, g> = sum_i w_i <f(lam_i, .), g(lam_i, .)>, slice inners exact.

    Fails on mismatched grids.  Deterministic: fixed pair order, per-node
    accumulation via bincount, then a single weighted sum over nodes.
    """
    return complex(np.sum(f.grid.weights * field_inner_per_node(f, g)))


# ---------------------------------------------------------------------------
# serialization

_FMT = "%.17g"


def _fmt(x):
    return _FMT % float(x)


def field_save(f: FieldSample, path):
    """Write a field in the line-oriented text format.

    Only plain indicator slices and tabulated (sample-grid) slices are
    representable; fields produced by transforms must be re-tabulated first.
    """
    kinds = f.kinds
    lines = ["hgsfield 1"]
    for a, b in f.grid.spectral_set.intervals:
        lines.append(f"interval {_fmt(a)} {_fmt(b)}")
    lines.append(f"lambda_min {_fmt(f.grid.lambda_min)}")
    lines.append(f"rule {f.grid.rule}")
    lines.append(f"nodes {f.grid.n}")
    for i in range(f.grid.n):
        lines.append(f"node {_fmt(f.grid.nodes[i])} {_fmt(f.grid.weights[i])}")
        kind = kinds[i] if kinds is not None else None
        if kind is None:
            w = f.slice(i)
            if w.n_terms == 0:
                kind = ("indicator", 0.0, 1.0, 0.0 + 0.0j)
            elif w.is_plain_indicator():
                kind = ("indicator", float(w.lo[0]), float(w.hi[0]),
                        complex(w.coef[0, 0]))
            else:
                raise WindowStructureError(
                    f"slice {i} is not serializable; tabulate it first")
        if kind[0] == "indicator":
            _, a, b, s = kind
            lines.append("slice indicator "
                         f"{_fmt(a)} {_fmt(b)} {_fmt(s.real)} {_fmt(s.imag)}")
        elif kind[0] == "samples":
            _, tg, data = kind
            payload = " ".join(f"{_fmt(v.real)} {_fmt(v.imag)}" for v in data)
            lines.append(f"slice samples {_fmt(tg.offset)} {_fmt(tg.step)} "
                         f"{tg.count} {payload}")
        else:
            raise WindowStructureError(f"unknown slice kind {kind[0]!r}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_floats(parts, n, lineno):
    if len(parts) < n:
        raise FieldFormatError("truncated record", lineno)
    try:
        return [float(p) for p in parts[:n]]
    except ValueError as exc:
        raise FieldFormatError(str(exc), lineno) from None


def field_load(path) -> FieldSample:
    """Read a field written by field_save; inverse up to bit-exact floats."""
    with open(path, "r", encoding="ascii") as fh:
        raw = fh.read().splitlines()
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(raw) if ln.strip()]
    if not lines or lines[0][1] != "hgsfield 1":
        raise FieldFormatError("missing 'hgsfield 1' header",
                               lines[0][0] if lines else 1)
    pos = 1
    intervals = []
    lambda_min = None
    rule = "midpoint"
    n_nodes = None
    while pos < len(lines):
        lineno, ln = lines[pos]
        key = ln.split()[0]
        if key == "interval":
            a, b = _parse_floats(ln.split()[1:], 2, lineno)
            intervals.append((a, b))
        elif key == "lambda_min":
            (lambda_min,) = _parse_floats(ln.split()[1:], 1, lineno)
        elif key == "rule":
            rule = ln.split()[1]
        elif key == "nodes":
            try:
                n_nodes = int(ln.split()[1])
            except (IndexError, ValueError):
                raise FieldFormatError("bad node count", lineno) from None
            pos += 1
            break
        else:
            raise FieldFormatError(f"unexpected record {key!r}", lineno)
        pos += 1
    if lambda_min is None or n_nodes is None or not intervals:
        raise FieldFormatError("incomplete header", lines[-1][0])
    nodes, weights, windows, kinds = [], [], [], []
    for _ in range(n_nodes):
        if pos + 1 >= len(lines) + 1:
            raise FieldFormatError("truncated file: missing node record",
                                   lines[-1][0])
        if pos >= len(lines):
            raise FieldFormatError("truncated file: missing node record",
                                   lines[-1][0])
        lineno, ln = lines[pos]
        parts = ln.split()
        if parts[0] != "node":
            raise FieldFormatError("expected node record", lineno)
        lam, w = _parse_floats(parts[1:], 2, lineno)
        pos += 1
        if pos >= len(lines):
            raise FieldFormatError("truncated file: missing slice record",
                                   lines[-1][0])
        lineno, ln = lines[pos]
        parts = ln.split()
        if parts[0] != "slice" or len(parts) < 2:
            raise FieldFormatError("expected slice record", lineno)
        if parts[1] == "indicator":
            a, b, re, im = _parse_floats(parts[2:], 4, lineno)
            scale = complex(re, im)
            windows.append(Window.indicator(a, b, scale) if scale != 0
                           else Window.zero())
            kinds.append(("indicator", a, b, scale))
        elif parts[1] == "samples":
            off, step = _parse_floats(parts[2:4], 2, lineno)
            try:
                count = int(parts[4])
            except (IndexError, ValueError):
                raise FieldFormatError("bad sample count", lineno) from None
            vals = _parse_floats(parts[5:], 2 * count, lineno)
            data = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
            tg = TimeGrid(off, step, count)
            windows.append(Window.from_samples(off, step, data))
            kinds.append(("samples", tg, data))
        else:
            raise FieldFormatError(f"unknown slice kind {parts[1]!r}", lineno)
        nodes.append(lam)
        weights.append(w)
        pos += 1
    grid = LambdaGrid(np.array(nodes), np.array(weights), lambda_min,
                      SpectralSet(intervals), rule)
    return FieldSample.from_windows(grid, windows, kinds=kinds)
