"""Graded operator norms on the truncation.

A mode matrix shifts degree homogeneously, so its restriction to the
filtration space V_{<=n} block-diagonalizes over source degrees.  Norms are
largest singular values after moving each block to orthonormal coordinates
with the per-degree Cholesky factors of the invariant form.  A certified
exact path (characteristic polynomial plus Sturm enclosure of the largest
eigenvalue of the Gram-adjoint composite) is available for small blocks.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import exactlinalg as xl
from .errors import TruncationError
from .graded_fock import BasisState, Model, StateVector
from .mode_engine import _vec_block
from .scalars import ONE, Q, ZERO
from .unitary_structure import family_of


def _as_vector(a) -> StateVector:
    if isinstance(a, BasisState):
        return StateVector.basis(a)
    return a


def _ortho_block(model: Model, blk, src: int, tgt: int) -> np.ndarray:
    """Block in orthonormal coordinates: L_tgt^T A (L_src^T)^{-1}."""
    fam = family_of(model)
    ls = fam.cholesky(src)
    lt = fam.cholesky(tgt)
    a = xl.to_numpy(blk) if model.dim(tgt) and model.dim(src) \
        else np.zeros((model.dim(tgt), model.dim(src)))
    if a.size == 0:
        return a
    # solve X L_src^T = A  <=>  L_src X^T = A^T
    xt = np.linalg.solve(ls, a.T)
    return lt.T @ xt.T


def _sigma_max(mat: np.ndarray) -> float:
    if mat.size == 0:
        return 0.0
    return float(np.linalg.svd(mat, compute_uv=False)[0])


def graded_norm(model: Model, a, m: int, n: int) -> float:
    """Norm of a_m (plain index) restricted to the filtration space V_{<=n}."""
    if n < 0:
        return 0.0
    if n > model.N or n - m > model.N:
        raise TruncationError(max(n, n - m), model.N, "graded norm window")
    avec = _as_vector(a)
    if avec.is_zero():
        return 0.0
    best = 0.0
    for s in range(min(n, model.N) + 1):
        tgt = s - m
        if tgt < 0:
            continue
        blk = _vec_block(model, avec, m, s)
        val = _sigma_max(_ortho_block(model, blk, s, tgt))
        if val > best:
            best = val
    return best


def graded_norm_certified(model: Model, a, m: int, n: int, max_dim: int = 8,
                          tol=Q(1, 10 ** 9)):
    """Exact rational enclosure [lo, hi] of the squared graded norm.

    Uses the characteristic polynomial of the Gram-adjoint composite and a
    Sturm-chain root enclosure, so the interval is a certificate.  Refuses
    blocks larger than max_dim (the exact charpoly gets expensive).
    """
    if n < 0:
        return ZERO, ZERO
    if n > model.N or n - m > model.N:
        raise TruncationError(max(n, n - m), model.N, "graded norm window")
    avec = _as_vector(a)
    fam = family_of(model)
    lo_best, hi_best = ZERO, ZERO
    for s in range(min(n, model.N) + 1):
        tgt = s - m
        if tgt < 0 or model.dim(s) == 0 or model.dim(tgt) == 0:
            continue
        if model.dim(s) > max_dim:
            raise ValueError(
                f"certified norm limited to blocks of dimension <= {max_dim}"
                f" (degree {s} has dimension {model.dim(s)})")
        blk = _vec_block(model, avec, m, s)
        if xl.is_zero(blk):
            continue
        adj = xl.mat_mul(fam.inverse(s),
                         xl.mat_mul(xl.transpose(blk), fam.matrix(tgt)))
        comp = xl.mat_mul(adj, blk)
        coeffs = xl.charpoly(comp)
        lo, hi = xl.largest_root_interval(coeffs, tol)
        if lo < 0:
            lo = ZERO
        if hi > hi_best:
            lo_best, hi_best = lo, hi
    return lo_best, hi_best


def cstar_gap(model: Model, a, m: int, n: int) -> float:
    """|  ||a*_{-m} a_m||_n - ||a_m||_n^2 |, both computed spectrally."""
    if n < 0:
        return 0.0
    if n > model.N or n - m > model.N:
        raise TruncationError(max(n, n - m), model.N, "C*-identity window")
    avec = _as_vector(a)
    from .unitary_structure import family_of as _fam, star

    fam = _fam(model)
    conj = star(model, avec, fam)
    norm = graded_norm(model, avec, m, n)
    best = 0.0
    for s in range(min(n, model.N) + 1):
        tgt = s - m
        if tgt < 0:
            continue
        down = _vec_block(model, avec, m, s)
        up = _vec_block(model, conj, -m, tgt)
        comp = xl.compose(up, down, model.dim(s), model.dim(s))
        val = _sigma_max(_ortho_block(model, comp, s, s))
        if val > best:
            best = val
    return abs(best - norm * norm)


def damped_norm(model: Model, a, q, n: int) -> float:
    """Norm of a_0 q^{L_0} on V_{<=n}, for a damping 0 < q < 1."""
    qf = float(q)
    if not 0.0 < qf < 1.0:
        raise ValueError("damping must lie strictly between 0 and 1")
    if n < 0:
        return 0.0
    if n > model.N:
        raise TruncationError(n, model.N, "damped norm window")
    avec = _as_vector(a)
    best = 0.0
    for s in range(n + 1):
        blk = _vec_block(model, avec, 0, s)
        val = _sigma_max(_ortho_block(model, blk, s, s)) * qf ** s
        if val > best:
            best = val
    return best


@dataclass
class NormTable:
    """Grid of graded norms for one state."""

    owner: str
    model_desc: str
    truncation: int
    tolerance: float
    entries: dict = field(default_factory=dict)   # (m, n) -> float
    failures: dict = field(default_factory=dict)  # (m, n) -> reason str

    def value(self, m: int, n: int):
        return self.entries.get((m, n))

    def cells(self):
        for (m, n) in sorted(self.entries):
            yield m, n, self.entries[(m, n)]

    def to_json(self) -> str:
        payload = {
            "owner": self.owner,
            "model": self.model_desc,
            "truncation": self.truncation,
            "tolerance": self.tolerance,
            "cells": [
                {"m": m, "n": n, "norm": format(v, ".17g")}
                for m, n, v in self.cells()
            ],
            "failures": [
                {"m": m, "n": n, "reason": r}
                for (m, n), r in sorted(self.failures.items())
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "n", "norm"])
            for m, n, v in self.cells():
                writer.writerow([m, n, format(v, ".17g")])


def norm_table(model: Model, a, m_range, n_max: int,
               owner: str = "") -> NormTable:
    table = NormTable(owner=owner or repr(a),
                      model_desc=model.spec.describe(),
                      truncation=model.N, tolerance=1e-9)
    for m in m_range:
        for n in range(n_max + 1):
            try:
                table.entries[(m, n)] = graded_norm(model, a, m, n)
            except TruncationError as exc:
                table.failures[(m, n)] = (
                    f"insufficient truncation (need {exc.required})")
    return table
