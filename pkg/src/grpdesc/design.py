"""Grouped design matrices."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Malformed input data."""


@dataclass(frozen=True)
class GroupedDesign:
    """Response plus a design whose groups occupy contiguous column blocks.

    Build with :meth:`from_arrays`, which sorts columns into group order
    (stable, by first appearance of each group).
    """

    X: np.ndarray
    y: np.ndarray
    group_of: np.ndarray
    group_labels: tuple[str, ...]
    column_names: tuple[str, ...]
    unpenalized: np.ndarray = field(default=None)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        group_of = np.asarray(self.group_of, dtype=np.int64)
        if X.ndim != 2:
            raise DataError("X must be two-dimensional")
        n, p = X.shape
        if y.shape != (n,):
            raise DataError(f"y has shape {y.shape}, expected ({n},)")
        if group_of.shape != (p,):
            raise DataError(f"group_of has length {group_of.size}, expected {p}")
        if p == 0 or n == 0:
            raise DataError("empty design")
        J = len(self.group_labels)
        if np.any(np.diff(group_of) < 0) or group_of[0] != 0 or group_of[-1] != J - 1:
            raise DataError("groups must be contiguous and numbered 0..J-1 in column order")
        if len(np.unique(group_of)) != J:
            raise DataError("every group needs at least one column")
        if len(self.column_names) != p:
            raise DataError("column_names length does not match X")
        unpen = self.unpenalized
        unpen = np.zeros(J, dtype=bool) if unpen is None else np.asarray(unpen, dtype=bool)
        if unpen.shape != (J,):
            raise DataError("unpenalized must have one flag per group")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DataError("X and y must be finite")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "group_of", group_of)
        object.__setattr__(self, "unpenalized", unpen)
        object.__setattr__(self, "group_labels", tuple(str(g) for g in self.group_labels))
        object.__setattr__(self, "column_names", tuple(str(c) for c in self.column_names))

    @classmethod
    def from_arrays(cls, X, y, groups, column_names=None, unpenalized=()):
        """Build a design from per-column group labels in any order.

        ``unpenalized`` lists group labels that receive no penalty.
        """
        X = np.asarray(X, dtype=float)
        groups = list(groups)
        if X.ndim != 2 or len(groups) != X.shape[1]:
            raise DataError("need one group label per column of X")
        if column_names is None:
            column_names = [f"V{k + 1}" for k in range(X.shape[1])]
        index = {g: i for i, g in enumerate(dict.fromkeys(groups))}
        labels = list(index)
        ids = np.array([index[g] for g in groups])
        order = np.argsort(ids, kind="stable")
        unpen_set = {str(g) for g in unpenalized}
        missing = unpen_set - {str(g) for g in labels}
        if missing:
            raise DataError(f"unpenalized group(s) not in design: {sorted(missing)}")
        return cls(
            X=X[:, order],
            y=y,
            group_of=ids[order],
            group_labels=tuple(str(g) for g in labels),
            column_names=tuple(column_names[k] for k in order),
            unpenalized=np.array([str(g) in unpen_set for g in labels]),
        )

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def J(self):
        return len(self.group_labels)

    @property
    def starts(self):
        """Column offsets, length J + 1."""
        return np.searchsorted(self.group_of, np.arange(self.J + 1)).astype(np.int64)

    @property
    def group_sizes(self):
        return np.diff(self.starts)

    def group_slices(self):
        s = self.starts
        return [slice(s[j], s[j + 1]) for j in range(self.J)]

    def subset(self, rows):
        """Same grouping restricted to ``rows``."""
        rows = np.asarray(rows)
        return GroupedDesign(
            X=self.X[rows],
            y=self.y[rows],
            group_of=self.group_of,
            group_labels=self.group_labels,
            column_names=self.column_names,
            unpenalized=self.unpenalized,
        )
