"""Fully discrete dynamical systems: iteration, range bounding, computability
certificates, state counting and cycle detection.

A system is an elementwise map on integer arrays over a box domain.  When the
range-bounding box lies inside the domain box, iteration is computable for
every starting point and step count; the orbit of any point must then enter a
cycle no later than the number of distinct states in the box.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .errors import PecrError
from .runtime import ArrV, BoxV, MapBinding


class IterationError(PecrError):
    """An orbit left the machine-number range."""


@dataclass(frozen=True)
class MapSpec:
    name: str
    domain: BoxV
    cell_fn: Callable[[tuple[int, ...]], tuple[int, ...]]
    bounder: Optional[Callable[[BoxV], BoxV]] = None
    params: tuple = ()

    def apply(self, u: ArrV) -> ArrV:
        v = self.cell_fn(u.cells)
        return ArrV(u.dims, v)


def scalar_box(lo: int, hi: int) -> BoxV:
    return BoxV(ArrV.scalar(lo), ArrV.scalar(hi))


def tent_map(n: int) -> MapSpec:
    """x -> min(2x, 2(n - x)) on the interval [0, n]."""
    if n < 1:
        raise PecrError("tent map needs n >= 1")

    def fn(cells):
        return tuple(min(2 * c, 2 * (n - c)) for c in cells)

    return MapSpec("tent", scalar_box(0, n), fn, params=(n,))


def identity_map(domain: BoxV) -> MapSpec:
    return MapSpec("identity", domain, lambda cells: cells, lambda p: p)


def constant_map(value: ArrV, domain: BoxV) -> MapSpec:
    return MapSpec(
        "constant",
        domain,
        lambda cells: value.cells,
        lambda p: BoxV(value, value),
        params=(value,),
    )


def involution_map(n: int) -> MapSpec:
    """x -> n - x on [0, n]; every non-midpoint orbit has period 2."""

    def fn(cells):
        return tuple(n - c for c in cells)

    return MapSpec("involution", scalar_box(0, n), fn, params=(n,))


def shift_map(n: int) -> MapSpec:
    """x -> x + 1 on [0, n]; escapes any box, so certification must refuse."""

    def fn(cells):
        return tuple(c + 1 for c in cells)

    def bounder(p: BoxV) -> BoxV:
        return BoxV(
            ArrV(p.lo.dims, tuple(c + 1 for c in p.lo.cells)),
            ArrV(p.hi.dims, tuple(c + 1 for c in p.hi.cells)),
        )

    return MapSpec("shift", scalar_box(0, n), fn, bounder, params=(n,))


MAP_REGISTRY: dict[str, Callable[..., MapSpec]] = {
    "tent": tent_map,
    "identity": lambda n: identity_map(scalar_box(0, n)),
    "constant": lambda n, c=0: constant_map(ArrV.scalar(c), scalar_box(0, n)),
    "involution": involution_map,
    "shift": shift_map,
}


def make_map(name: str, **params) -> MapSpec:
    factory = MAP_REGISTRY.get(name)
    if factory is None:
        raise PecrError(f"unknown map {name!r}; known: {sorted(MAP_REGISTRY)}")
    return factory(**params)


def _in_box(cells: tuple[int, ...], box: BoxV) -> bool:
    return all(a <= c <= b for a, c, b in zip(box.lo.cells, cells, box.hi.cells))


def state_count(p: BoxV) -> int:
    """Number of distinct arrays inside the box."""
    count = 1
    for a, b in zip(p.lo.cells, p.hi.cells):
        count *= b - a + 1
    return count


def iterate(
    f: MapSpec,
    u: ArrV,
    n: int,
    mnat: int = 2**31 - 1,
    snapshot_every: Optional[int] = None,
    cycle_skip: bool = True,
):
    """Apply f n times; n = 0 returns the input unchanged.

    Raises :class:`IterationError` as soon as a state escapes [0, mnat].
    Without snapshots, once a state repeats the remaining steps are resolved
    along the detected cycle (every state visited from then on has already
    been range-checked, so the result is exact).  With ``snapshot_every`` the
    full timeline runs and states at the given interval are returned too.
    """
    if n < 0:
        raise PecrError("iteration count must be >= 0")
    if u.dims != f.domain.lo.dims or not _in_box(u.cells, f.domain):
        raise IterationError("start state outside the domain box")
    snapshots: list[tuple[int, ArrV]] = []
    state = u.cells
    fn = f.cell_fn
    if snapshot_every is not None:
        if snapshot_every < 1:
            raise PecrError("snapshot interval must be >= 1")
        for t in range(1, n + 1):
            state = fn(state)
            _range_check(state, mnat, t)
            if t % snapshot_every == 0:
                snapshots.append((t, ArrV(u.dims, state)))
        return ArrV(u.dims, state), snapshots
    seen: dict[tuple[int, ...], int] = {}
    t = 0
    while t < n:
        if cycle_skip:
            prev = seen.get(state)
            if prev is not None:
                period = t - prev
                # remaining steps stay on the already-visited cycle
                target = prev + (n - prev) % period
                for known, when in seen.items():
                    if when == target:
                        return ArrV(u.dims, known)
            seen[state] = t
        state = fn(state)
        t += 1
        _range_check(state, mnat, t)
    return ArrV(u.dims, state)


def _range_check(cells: tuple[int, ...], mnat: int, t: int) -> None:
    if any(c < 0 or c > mnat for c in cells):
        raise IterationError(f"state escaped machine range at step {t}")


def bound_range(f: MapSpec, p: BoxV, exhaustive_limit: int = 10**6) -> BoxV:
    """A box containing f(u) for every u in p.

    Exact (componentwise min/max over the whole box) when the box holds at
    most ``exhaustive_limit`` states, otherwise the map's declared bounder.
    """
    count = state_count(p)
    if count <= exhaustive_limit:
        lo = list(p.hi.cells)
        hi = list(p.lo.cells)
        lo_img: Optional[list[int]] = None
        hi_img: Optional[list[int]] = None
        for cells in _box_states(p):
            img = f.cell_fn(cells)
            if lo_img is None:
                lo_img, hi_img = list(img), list(img)
            else:
                for i, c in enumerate(img):
                    lo_img[i] = min(lo_img[i], c)
                    hi_img[i] = max(hi_img[i], c)
        assert lo_img is not None and hi_img is not None
        return BoxV(ArrV(p.lo.dims, tuple(lo_img)), ArrV(p.hi.dims, tuple(hi_img)))
    if f.bounder is None:
        raise PecrError(f"map {f.name!r} has no declared range bounder")
    return f.bounder(p)


def _box_states(p: BoxV):
    ranges = [range(a, b + 1) for a, b in zip(p.lo.cells, p.hi.cells)]
    if not ranges:
        yield ()
        return
    state = [r.start for r in ranges]
    while True:
        yield tuple(state)
        for i in range(len(state) - 1, -1, -1):
            state[i] += 1
            if state[i] <= ranges[i].stop - 1:
                break
            state[i] = ranges[i].start
        else:
            return


@dataclass(frozen=True)
class Certificate:
    ok: bool
    domain: BoxV
    bound: BoxV
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def certify_axc(f: MapSpec, p: BoxV) -> Certificate:
    """Certificate that iteration stays computable on p for all step counts:
    the range-bounding box must be contained in p."""
    q = bound_range(f, p)
    contained = all(a <= c for a, c in zip(p.lo.cells, q.lo.cells)) and all(
        d <= b for d, b in zip(q.hi.cells, p.hi.cells)
    )
    if contained:
        return Certificate(True, p, q)
    return Certificate(False, p, q, "range bound not contained in the domain box")


@dataclass(frozen=True)
class CycleReport:
    tcyc: int  # first entry time into the cycle
    pcyc: int  # minimal period
    witness: ArrV

    @property
    def fixed_point(self) -> bool:
        return self.pcyc == 1


def detect_cycle(
    f: MapSpec,
    u0: ArrV,
    limit: int,
    mnat: int = 2**31 - 1,
    memory_cap: int = 10**6,
) -> Optional[CycleReport]:
    """Find the orbit's entry time and minimal period within ``limit`` steps.

    States are memoised up to ``memory_cap``; past that the search restarts
    with Brent's constant-memory algorithm.  Returns None if no repeat shows
    up within the limit.
    """
    if u0.dims != f.domain.lo.dims or not _in_box(u0.cells, f.domain):
        raise IterationError("start state outside the domain box")
    fn = f.cell_fn
    seen: dict[tuple[int, ...], int] = {}
    state = u0.cells
    for t in range(limit + 1):
        prev = seen.get(state)
        if prev is not None:
            return CycleReport(prev, t - prev, ArrV(u0.dims, state))
        if len(seen) >= memory_cap:
            return _brent(f, u0, limit, mnat)
        seen[state] = t
        state = fn(state)
        _range_check(state, mnat, t + 1)
    return None


def _brent(f: MapSpec, u0: ArrV, limit: int, mnat: int) -> Optional[CycleReport]:
    fn = f.cell_fn
    power = lam = 1
    tortoise = u0.cells
    hare = fn(u0.cells)
    steps = 1
    while tortoise != hare:
        if steps > limit:
            return None
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = fn(hare)
        steps += 1
        _range_check(hare, mnat, steps)
        lam += 1
    tortoise = hare = u0.cells
    for _ in range(lam):
        hare = fn(hare)
    mu = 0
    while tortoise != hare:
        tortoise = fn(tortoise)
        hare = fn(hare)
        mu += 1
        if mu > limit:
            return None
    if mu + lam > limit + 1:
        return None
    witness = u0.cells
    for _ in range(mu):
        witness = fn(witness)
    return CycleReport(mu, lam, ArrV(u0.dims, witness))


def orbit_table(f: MapSpec, u0: ArrV, steps: int, mnat: int = 2**31 - 1) -> list[ArrV]:
    """The raw orbit u0, f(u0), ..., f^steps(u0); brute-force oracle helper."""
    out = [u0]
    state = u0.cells
    for t in range(1, steps + 1):
        state = f.cell_fn(state)
        _range_check(state, mnat, t)
        out.append(ArrV(u0.dims, state))
    return out


def map_binding(f: MapSpec, exhaustive_limit: int = 10**6) -> MapBinding:
    """Adapter wiring a map into the statement evaluator (f/itf/bndf)."""
    return MapBinding(fn=f.apply, bound=lambda p: bound_range(f, p, exhaustive_limit))
