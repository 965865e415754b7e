"""Invariant scalar product, star involution, adjoint diagnostics.

The normalized invariant form is built degree by degree with exact
rationals by peeling creation modes against the star data of the
generators: (g_{n} u | v) = (u | (g*)_{-n} v), seeded by (Om|Om) = 1 and
unit-normalized sector tops.  Everything downstream (Cholesky coordinates,
operator norms, trace bounds) reads these matrices.
"""

from __future__ import annotations

import numpy as np

from . import exactlinalg as xl
from .errors import ModelBugError, TruncationError
from .graded_fock import BasisState, Model, StateVector
from .mode_engine import Residual, _vec_block, state_product
from .scalars import ONE, Q, ZERO


def _apply_gen(model: Model, gid: int, m: int, vec: StateVector,
               degree: int) -> StateVector:
    """Generator mode applied to a homogeneous vector of known degree."""
    tgt = degree - m
    out = StateVector()
    if tgt < 0 or vec.is_zero():
        return out
    mat = model.gen_block(gid, m, degree)
    image = xl.mat_vec(mat, model.coords(vec, degree))
    for pos, val in enumerate(image):
        out.add_term(model.basis.states(tgt)[pos], val)
    return out


class GramFamily:
    """Per-degree exact matrices of the normalized invariant form."""

    def __init__(self, model: Model):
        self.model = model
        self._mats = {}
        self._invs = {}
        self._pair_cache = {}
        self._chol = {}
        self._radicals = {}

    # -- exact pairing ----------------------------------------------------

    def pair_states(self, u: BasisState, v: BasisState):
        basis = self.model.basis
        du = basis.degree_of(u)
        if du != basis.degree_of(v):
            return ZERO
        g = self.matrix(du)
        return g[basis.position_of(u)][basis.position_of(v)]

    def pairing(self, u: StateVector, v: StateVector):
        model = self.model
        by_degree = {}
        for sv, cv in v.terms.items():
            d = model.basis.degree_of(sv)
            by_degree.setdefault(d, [ZERO] * model.dim(d))
            by_degree[d][model.basis.position_of(sv)] = cv
        total = ZERO
        for su, cu in u.terms.items():
            d = model.basis.degree_of(su)
            if d not in by_degree:
                continue
            row = self.matrix(d)[model.basis.position_of(su)]
            for x, y in zip(row, by_degree[d]):
                if x and y:
                    total += cu * x * y
        return total

    # -- matrices ---------------------------------------------------------

    def matrix(self, degree: int):
        """Exact Gram matrix, built row-by-row from lower degrees.

        The row of u = g_{n0} tail is the row of tail at degree + n0
        multiplied by the block of (g*)_{-n0}, which is the peeling
        identity applied to all columns at once.
        """
        if degree > self.model.N:
            raise TruncationError(degree, self.model.N, "Gram degree")
        hit = self._mats.get(degree)
        if hit is not None:
            return hit
        model = self.model
        states = model.basis.states(degree)
        dim = len(states)
        sparse_blocks = {}
        g = []
        for u in states:
            if not u.factors:
                row = [ZERO] * dim
                row[model.basis.position_of(u)] = ONE
                g.append(row)
                continue
            gid, n0 = u.factors[0]
            star_gid = model.generators[gid].star
            dt = degree + n0
            block = sparse_blocks.get((star_gid, n0))
            if block is None:
                dense = model.gen_block(star_gid, -n0, degree)
                block = [[(j, b) for j, b in enumerate(r) if b]
                         for r in dense]
                sparse_blocks[(star_gid, n0)] = block
            lower = self.matrix(dt)
            tail = model.reduce_word(u.sector, u.factors[1:])
            tail_row = [ZERO] * model.dim(dt)
            for st, co in tail.terms.items():
                pos = model.basis.position_of(st)
                for j, x in enumerate(lower[pos]):
                    if x:
                        tail_row[j] += co * x
            row = [ZERO] * dim
            for i, w in enumerate(tail_row):
                if not w:
                    continue
                for j, b in block[i]:
                    row[j] += w * b
            g.append(row)
        if xl.transpose(g) != g:
            raise ModelBugError(
                f"invariant form not symmetric at degree {degree}; "
                "star data is inconsistent")
        self._mats[degree] = g
        return g

    def inverse(self, degree: int):
        hit = self._invs.get(degree)
        if hit is None:
            hit = xl.inverse(self.matrix(degree))
            self._invs[degree] = hit
        return hit

    def radical(self, degree: int):
        hit = self._radicals.get(degree)
        if hit is None:
            hit = xl.kernel_basis(self.matrix(degree))
            self._radicals[degree] = hit
        return hit

    def positive_definite(self, degree: int) -> bool:
        """Exact Sylvester check via symmetric elimination pivots."""
        g = [list(row) for row in self.matrix(degree)]
        n = len(g)
        for k in range(n):
            piv = g[k][k]
            if piv <= 0:
                return False
            for i in range(k + 1, n):
                f = g[i][k] / piv
                if not f:
                    continue
                for j in range(k, n):
                    g[i][j] -= f * g[k][j]
        return True

    def cholesky(self, degree: int) -> np.ndarray:
        """Floating lower-triangular factor of G_degree."""
        hit = self._chol.get(degree)
        if hit is None:
            gm = self.matrix(degree)
            if not gm:
                hit = np.zeros((0, 0))
            else:
                try:
                    hit = np.linalg.cholesky(xl.to_numpy(gm))
                except np.linalg.LinAlgError as exc:
                    raise ModelBugError(
                        f"Gram matrix at degree {degree} is not positive "
                        "definite") from exc
            self._chol[degree] = hit
        return hit

    def exact_cholesky(self, degree: int):
        """Exact LDL^T factors (L unit lower-triangular, D diagonal list)."""
        g = [list(row) for row in self.matrix(degree)]
        n = len(g)
        low = xl.identity(n)
        diag = []
        for k in range(n):
            piv = g[k][k]
            if piv <= 0:
                raise ModelBugError(
                    f"Gram matrix at degree {degree} is not positive "
                    "definite")
            diag.append(piv)
            for i in range(k + 1, n):
                f = g[i][k] / piv
                low[i][k] = f
                if not f:
                    continue
                for j in range(k, n):
                    g[i][j] -= f * g[k][j]
        return low, diag


def gram_family(model: Model) -> GramFamily:
    fam = GramFamily(model)
    if fam.matrix(0) != [[ONE]]:
        raise ModelBugError("vacuum normalization broken")
    return fam


def family_of(model: Model) -> GramFamily:
    """Cached Gram family of a model."""
    fam = getattr(model, "_gram_family", None)
    if fam is None:
        fam = gram_family(model)
        model._gram_family = fam
    return fam


def _translate_up(model: Model, vec: StateVector, times: int) -> StateVector:
    """L_{-1}^times applied to a homogeneous vector."""
    out = vec
    for _ in range(times):
        if out.is_zero():
            return out
        deg = model.degree_of(out)
        blk = _vec_block(model, model.nu, -1, deg)
        out = model.from_coords(deg + 1,
                                xl.mat_vec(blk, model.coords(out, deg)))
    return out


def star(model: Model, a, fam: GramFamily = None) -> StateVector:
    """Conjugate state: the unique a* with (a*_{-n} b | c) = (b | a_n c).

    For a of degree d the conjugate has components in every degree up to d
    (only the top one survives when a is quasi-primary).  They are
    recovered triangularly from the Gram adjoints of the annihilation
    blocks a_e : V_e -> V_0, since applying the defining relation to the
    vacuum gives (a_e)^dag Om = sum_{e' <= e} L_{-1}^{e-e'}/(e-e')!
    applied to the degree-e' component.
    """
    if isinstance(a, BasisState):
        a = StateVector.basis(a)
    if a.is_zero():
        return StateVector()
    if fam is None:
        fam = gram_family(model)
    by_degree = {}
    for st, co in a.terms.items():
        by_degree.setdefault(model.basis.degree_of(st), StateVector()) \
            .add_term(st, co)
    if len(by_degree) > 1:
        total = StateVector()
        for part in by_degree.values():
            total = total + star(model, part, fam)
        return total
    d = model.degree_of(a)
    if d == 0:
        return a.copy()
    if d > model.N:
        raise TruncationError(d, model.N, "star degree")
    comps = {}
    total = StateVector()
    for e in range(d + 1):
        if model.dim(e) == 0:
            continue
        down = _vec_block(model, a, e, e)  # V_e -> V_0, one row
        coords = xl.mat_vec(fam.inverse(e), [row[0] for row in
                                             xl.transpose(down)])
        corr = model.from_coords(e, coords)
        for ep in sorted(comps, reverse=True):
            k = e - ep
            fact = ONE
            for i in range(k):
                fact = fact * Q(i + 1)
            corr = corr - _translate_up(model, comps[ep], k) \
                .scale(ONE / fact)
        if not corr.is_zero():
            comps[e] = corr
            total = total + corr
    return total


def adjoint_residual(model: Model, a, m: int,
                     fam: GramFamily = None) -> Residual:
    """Exact deviation of the G-adjoint of a_m from (a*)_{-m}.

    Plain index m; compares G_s^{-1} (a_m block)^T G_{s-m} with the block
    of (a*)_{-m} on every source degree where both sides live.
    """
    if isinstance(a, BasisState):
        a = StateVector.basis(a)
    if fam is None:
        fam = gram_family(model)
    conj = star(model, a, fam)
    worst = ZERO
    checked = []
    for s in range(model.N + 1):
        t = s - m
        if t < 0 or t > model.N:
            continue
        blk = _vec_block(model, a, m, s)
        if model.dim(s) == 0 or model.dim(t) == 0:
            adj = xl.zeros(model.dim(s), model.dim(t))
        else:
            adj = xl.mat_mul(fam.inverse(s),
                             xl.mat_mul(xl.transpose(blk), fam.matrix(t)))
        other = _vec_block(model, conj, -m, t)
        val = xl.max_abs(xl.mat_sub(adj, other)) if model.dim(s) and \
            model.dim(t) else ZERO
        checked.append(s)
        if val > worst:
            worst = val
    return Residual("adjoint", worst, {"m": m, "sources": checked})


def kac_moody_residual(model: Model, a, b, m: int, n: int,
                       fam: GramFamily = None) -> Residual:
    """Current-algebra bracket check for degree-1 states.

    [a_m, b_n] must equal ([a,b])_{m+n} + m (a*|b) delta_{m,-n} id, with
    [a,b] = a_(0) b.
    """
    if isinstance(a, BasisState):
        a = StateVector.basis(a)
    if isinstance(b, BasisState):
        b = StateVector.basis(b)
    if model.degree_of(a) != 1 or model.degree_of(b) != 1:
        raise ValueError("current-algebra check needs degree-1 states")
    if fam is None:
        fam = gram_family(model)
    bracket = state_product(model, a, 0, b)
    central = Q(m) * fam.pairing(star(model, a, fam), b) if m == -n else ZERO
    sources = [s for s in range(model.N + 1)
               if 0 <= s - m - n <= model.N and s - m <= model.N
               and s - n <= model.N]
    if not sources:
        raise TruncationError(max(m + n, m, n), model.N,
                              "current bracket window")
    worst = ZERO
    for s in sources:
        tgt_dim = model.dim(s - m - n)
        comm = xl.zeros(tgt_dim, model.dim(s))
        if s - n >= 0:
            bn = _vec_block(model, b, n, s)
            am_after = _vec_block(model, a, m, s - n)
            comm = xl.mat_add(comm, xl.compose(am_after, bn, tgt_dim,
                                               model.dim(s)))
        if s - m >= 0:
            am = _vec_block(model, a, m, s)
            bn_after = _vec_block(model, b, n, s - m)
            comm = xl.mat_sub(comm, xl.compose(bn_after, am, tgt_dim,
                                               model.dim(s)))
        rhs = _vec_block(model, bracket, m + n, s) if not bracket.is_zero() \
            else xl.zeros(tgt_dim, model.dim(s))
        if central and m + n == 0:
            rhs = xl.mat_add(rhs, xl.mat_scale(xl.identity(model.dim(s)),
                                               central))
        val = xl.max_abs(xl.mat_sub(comm, rhs))
        if val > worst:
            worst = val
    return Residual("kac_moody", worst,
                    {"m": m, "n": n, "central": central})
