"""Shared fixtures.

Computing a surface's spectrum takes seconds, and several test modules
(plus most acceptance criteria) need the same 28 results, so they are
computed once per session, lazily, and cached.
"""

from __future__ import annotations

import numpy as np
import pytest

import torusspec as ts
from torusspec import catalog as cat_mod


@pytest.fixture(scope="session")
def surfaces():
    return {s.name: s for s in ts.load_catalog()}


class SurfaceCache:
    def __init__(self, surfaces):
        self._surfaces = surfaces
        self._results: dict[str, cat_mod.SurfaceResult] = {}

    def __call__(self, name: str) -> cat_mod.SurfaceResult:
        if name not in self._results:
            self._results[name] = cat_mod.evaluate_surface(self._surfaces[name])
        return self._results[name]

    def names(self):
        return list(self._surfaces)


@pytest.fixture(scope="session")
def surface_results(surfaces) -> SurfaceCache:
    return SurfaceCache(surfaces)


@pytest.fixture(scope="session")
def u1(surface_results):
    return surface_results("U1")


def constant_problem(c: float, a: float, tol: float = 1e-10) -> ts.SpectralProblem:
    return ts.SpectralProblem(
        V=lambda x: c if np.ndim(x) == 0 else np.full_like(np.asarray(x, float), c),
        a=a,
        mode="periodic_symmetric",
        tol=tol,
    )
