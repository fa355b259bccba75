"""Order-preserving list algebra.

All operations keep first-argument order; ``cap``/``minus``/``unique`` scan
left to right and never reorder, which the rest of the kernel relies on for
deterministic output (binding profiles, connection-list reduction, codecs).
Scalars are promoted to singletons in concatenation contexts.
"""

from __future__ import annotations

from typing import Any, Iterable, Sequence

from .errors import CapacityError


def _as_list(u: Any) -> list:
    if isinstance(u, (list, tuple)):
        return list(u)
    return [u]


def conclst(u: Any, v: Any, bound: int | None = None) -> list:
    """Concatenate two lists, removing one bracket level from each side."""
    w = _as_list(u) + _as_list(v)
    if bound is not None and len(w) > bound:
        raise CapacityError(f"concatenation of length {len(w)} exceeds bound {bound}")
    return w


def chain(*lists: Any, bound: int | None = None) -> list:
    """Fold conclst over any number of lists."""
    if not lists:
        return []
    v = _as_list(lists[0])
    for u in lists[1:]:
        v = conclst(v, u, bound=bound)
    return v


def cap(u: Sequence, v: Sequence) -> list:
    """Elements of u also present in v: first-occurrence order, duplicate-free."""
    w: list = []
    for e in u:
        if e in w:
            continue
        if e in v:
            w.append(e)
    return w


def minus(u: Sequence, v: Sequence) -> list:
    """Elements of u not present in v, keeping u's order and multiplicity."""
    return [e for e in u if e not in v]


def unique(u: Sequence) -> list:
    """Drop repeats, keeping the first occurrence of each element."""
    w: list = []
    for e in u:
        if e not in w:
            w.append(e)
    return w


def order(u: Iterable[int]) -> list[int]:
    """Sort into increasing numerical order (connection-list reduction step)."""
    return sorted(u)


def sublst(u: Sequence, v: Sequence) -> bool:
    """True iff every element of u occurs somewhere in v."""
    return all(e in v for e in u)


def equivlst(u: Sequence, v: Sequence) -> bool:
    return sublst(u, v) and sublst(v, u)


def eqlst(u: Sequence, v: Sequence) -> bool:
    return list(u) == list(v)
