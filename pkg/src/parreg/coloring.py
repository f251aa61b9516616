"""Obstruction colorings and exhaustive monochromatic-solution scans over
finite boxes.

The scan is evidence, not proof: absence of a monochromatic solution over a
finite box supports a non-partition-regularity certificate but every report
carries BOX_CAVEAT saying exactly that.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import DegenerateInput, is_probable_prime

BOX_CAVEAT = "finite box scan: absence here is evidence, not a proof"

ENGINE_BUCKETED = "bucketed"
ENGINE_FULL = "full"


@dataclass(frozen=True)
class ValuationColoring:
    """x maps to the unit left over after stripping all powers of p, mod p.

    The color lies in [1, p-1] and is multiplicative.
    """

    p: int

    def __post_init__(self):
        if not is_probable_prime(self.p):
            raise DegenerateInput("p must be prime")


@dataclass(frozen=True)
class ModColoring:
    """palette[x mod modulus]; defined when the denominator is a unit mod
    modulus.  A probe coloring, never part of a certificate.
    """

    modulus: int
    palette: tuple

    def __post_init__(self):
        if self.modulus < 1 or len(self.palette) != self.modulus:
            raise DegenerateInput("palette must have one entry per residue")


@dataclass(frozen=True)
class TableColoring:
    """Explicit finite color table.  A probe coloring, never part of a
    certificate.
    """

    table: dict


def color_of(x, spec):
    num, den = (x.numerator, x.denominator) if isinstance(x, Fraction) else (int(x), 1)
    if num == 0:
        raise DegenerateInput("0 has no color")
    if isinstance(spec, ValuationColoring):
        p = spec.p
        while num % p == 0:
            num //= p
        while den % p == 0:
            den //= p
        r = num % p
        if den != 1:
            r = r * pow(den, p - 2, p) % p
        return r
    if isinstance(spec, ModColoring):
        m = spec.modulus
        r = num % m
        if den != 1:
            den %= m
            try:
                r = r * pow(den, -1, m) % m
            except ValueError:
                raise DegenerateInput(f"denominator not invertible mod {m}") from None
        return spec.palette[r]
    if isinstance(spec, TableColoring):
        key = Fraction(num, den) if den != 1 else num
        try:
            return spec.table[key]
        except KeyError:
            raise DegenerateInput(f"{key} not in color table") from None
    raise DegenerateInput(f"unknown coloring {type(spec).__name__}")


@dataclass(frozen=True)
class SearchBox:
    """Integer interval [lo, hi]; lo > hi is the empty box.  exclude_zero stays
    True for scans over the nonzero integers.
    """

    lo: int
    hi: int
    exclude_zero: bool = True

    def values(self) -> list[int]:
        if self.lo > self.hi:
            return []
        vs = list(range(self.lo, self.hi + 1))
        if self.exclude_zero and self.lo <= 0 <= self.hi:
            vs.remove(0)
        return vs


def rational_box_values(box: SearchBox) -> list[Fraction]:
    """All fractions num/den with num, den drawn from the box (den != 0),
    deduplicated and sorted.  Small boxes only.
    """
    vs = box.values()
    out = {Fraction(p, q) for p in vs for q in vs if q != 0}
    if box.exclude_zero:
        out.discard(Fraction(0))
    return sorted(out)


@dataclass(frozen=True)
class MonoReport:
    """Outcome of one exhaustive scan.

    found is a single (w, x, y, z) tuple for an equation, or one such tuple
    per row (all sharing a color) for a system; None certifies absence over
    the box.  candidates_scanned is the full triple-space size on a completed
    scan, or the number of triples actually examined when the scan stopped at
    the first hit.
    """

    subject: tuple
    coloring: object
    box: SearchBox
    found: tuple | None
    candidates_scanned: int
    solutions_found: int
    elapsed: float
    caveat: str = field(default=BOX_CAVEAT)


def _eq_params(eq) -> tuple[int, int, int, int, int]:
    if hasattr(eq, "a"):
        t = (eq.a, eq.b, eq.c, eq.m, eq.n)
    else:
        t = tuple(eq)
    a, b, c, m, n = (int(v) for v in t)
    if a == 0 or b == 0 or c == 0:
        raise DegenerateInput("coefficients must be nonzero")
    if m < 1 or n < 1:
        raise DegenerateInput("exponents must be >= 1")
    return a, b, c, m, n


def _color_map(values, spec) -> dict:
    return {v: color_of(v, spec) for v in values}


def _scan_bucketed(values, cmap, params, stop_on_find):
    """Group the box by color first; only same-colored (w, z, x) triples can
    yield a monochromatic tuple, so only those are walked.
    """
    a, b, c, m, n = params
    buckets: dict = {}
    for v in values:
        buckets.setdefault(cmap[v], []).append(v)
    exact = isinstance(values[0], int) if values else True
    count = 0
    best = None
    examined = 0
    for d in sorted(buckets, key=repr):
        vals = buckets[d]
        for w in vals:
            cwm = c * w**m
            for z in vals:
                rhs = cwm * z**n
                for x in vals:
                    examined += 1
                    num = rhs - a * x
                    if exact:
                        y, r = divmod(num, b)
                        if r:
                            continue
                    else:
                        y = num / b
                    if cmap.get(y) != d:
                        continue
                    count += 1
                    t = (w, x, y, z)
                    if best is None or t < best:
                        best = t
                    if stop_on_find:
                        return count, best, examined
    return count, best, examined


def _scan_full_shard(args):
    """One w-shard of the literal (w, z, x) triple walk.  Triples whose w and z
    colors already differ are rejected before the x scan; the walk is still
    exhaustive over the shard.
    """
    values, cmap, params, w_chunk = args
    a, b, c, m, n = params
    exact = isinstance(values[0], int) if values else True
    count = 0
    best = None
    for w in w_chunk:
        d = cmap[w]
        cwm = c * w**m
        for z in values:
            if cmap[z] != d:
                continue
            rhs = cwm * z**n
            for x in values:
                if cmap[x] != d:
                    continue
                num = rhs - a * x
                if exact:
                    y, r = divmod(num, b)
                    if r:
                        continue
                else:
                    y = num / b
                if cmap.get(y) != d:
                    continue
                count += 1
                t = (w, x, y, z)
                if best is None or t < best:
                    best = t
    return count, best


def _merge(parts):
    count = 0
    best = None
    for c, b in parts:
        count += c
        if b is not None and (best is None or b < best):
            best = b
    return count, best


def verify_no_mono_solution(
    eq,
    spec,
    box: SearchBox,
    engine: str = ENGINE_BUCKETED,
    workers: int = 1,
    stop_on_find: bool = False,
    rational: bool = False,
) -> MonoReport:
    """Walk every (w, z, x) triple over the box, solve a*x + b*y = c*w^m*z^n
    for y exactly, and collect monochromatic solutions with y in the box.

    found None certifies absence over this box only.  The full engine shards
    by w across workers; reports are identical for any worker count.
    stop_on_find needs workers=1 and makes candidates_scanned the examined
    count instead of the closed-form total.
    """
    params = _eq_params(eq)
    values = rational_box_values(box) if rational else box.values()
    start = time.perf_counter()
    cmap = _color_map(values, spec)
    total = len(values) ** 3
    if stop_on_find and (workers > 1 or engine != ENGINE_BUCKETED):
        raise DegenerateInput("stop_on_find needs the bucketed engine, workers=1")
    if not values:
        count, best, scanned = 0, None, 0
    elif engine == ENGINE_BUCKETED:
        count, best, examined = _scan_bucketed(values, cmap, params, stop_on_find)
        scanned = examined if stop_on_find else total
    elif engine == ENGINE_FULL:
        if workers <= 1:
            count, best = _scan_full_shard((values, cmap, params, tuple(values)))
        else:
            step = (len(values) + workers - 1) // workers
            shards = [
                (values, cmap, params, tuple(values[i : i + step]))
                for i in range(0, len(values), step)
            ]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                count, best = _merge(pool.map(_scan_full_shard, shards))
        scanned = total
    else:
        raise DegenerateInput(f"unknown engine {engine!r}")
    return MonoReport(
        subject=("equation",) + params,
        coloring=spec,
        box=box,
        found=best,
        candidates_scanned=scanned,
        solutions_found=count,
        elapsed=time.perf_counter() - start,
    )


def _system_params(system) -> tuple[tuple[tuple[int, int, int], ...], int]:
    if hasattr(system, "rows"):
        rows, n = system.rows, system.n
    else:
        rows, n = system
    rows = tuple((int(a), int(b), int(c)) for a, b, c in rows)
    if not rows:
        raise DegenerateInput("need at least one row")
    if any(a == 0 or b == 0 or c == 0 for a, b, c in rows):
        raise DegenerateInput("row coefficients must be nonzero")
    return rows, int(n)


def verify_system_no_mono(system, spec, box: SearchBox) -> MonoReport:
    """Scan each row a_i*x + b_i*y = c_i*w*z^n separately per color class; a
    monochromatic system solution is one per-row tuple for every row with all
    values sharing a single color.  solutions_found multiplies the per-row
    counts within each color (rows have disjoint variables).
    """
    rows, n = _system_params(system)
    start = time.perf_counter()
    if len(rows) == 1:
        a, b, c = rows[0]
        rep = verify_no_mono_solution((a, b, c, 1, n), spec, box)
        return MonoReport(
            subject=("system", rows, n),
            coloring=spec,
            box=box,
            found=(rep.found,) if rep.found is not None else None,
            candidates_scanned=rep.candidates_scanned,
            solutions_found=rep.solutions_found,
            elapsed=time.perf_counter() - start,
        )
    values = box.values()
    cmap = _color_map(values, spec)
    total = len(rows) * len(values) ** 3
    buckets: dict = {}
    for v in values:
        buckets.setdefault(cmap[v], []).append(v)
    count = 0
    best = None
    for d in sorted(buckets, key=repr):
        vals = buckets[d]
        sub = {v: d for v in vals}
        per_row = []
        prod = 1
        for a, b, c in rows:
            rc, rb, _ = _scan_bucketed(vals, sub, (a, b, c, 1, n), False)
            if rc == 0:
                prod = 0
                break
            per_row.append(rb)
            prod *= rc
        count += prod
        if prod and (best is None or tuple(per_row) < best):
            best = tuple(per_row)
    return MonoReport(
        subject=("system", rows, n),
        coloring=spec,
        box=box,
        found=best,
        candidates_scanned=total,
        solutions_found=count,
        elapsed=time.perf_counter() - start,
    )
