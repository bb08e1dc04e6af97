"""Small immutable mapping used for environments, states, and stores."""

from __future__ import annotations

from collections.abc import Mapping


class FrozenMap(Mapping):
    """Hashable mapping with functional update.

    Keys and values must themselves be hashable; every `set`/`update`
    returns a fresh map and never mutates the receiver.
    """

    __slots__ = ("_d", "_hash")

    def __init__(self, items=()):
        self._d = dict(items)
        self._hash = None

    def __getitem__(self, key):
        return self._d[key]

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, FrozenMap):
            return self._d == other._d
        if isinstance(other, Mapping):
            return dict(self._d) == dict(other)
        return NotImplemented

    def set(self, key, value) -> "FrozenMap":
        d = dict(self._d)
        d[key] = value
        return FrozenMap(d)

    def update(self, items) -> "FrozenMap":
        d = dict(self._d)
        d.update(items)
        return FrozenMap(d)

    def without(self, key) -> "FrozenMap":
        d = dict(self._d)
        d.pop(key, None)
        return FrozenMap(d)

    def __repr__(self):
        inner = ", ".join(f"{k!r}: {v!r}" for k, v in sorted(self._d.items(), key=lambda kv: repr(kv[0])))
        return "{%s}" % inner


EMPTY_MAP = FrozenMap()
