"""Kan operations derived from extension structures.

An extension space is a family of sets with an ``ext`` operation that
extends partial elements.  From such spaces we derive weak composition
(filler plus correction path), centers of contraction with paths between
any two elements, and fibrancy of families over pseudo-reflexive graphs.
Every derivation returns a :class:`~rezk.certificates.Certificate` listing
the boundary equations it checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from . import cofib
from .certificates import REFL, UNIT, Certificate, _Marker
from .cofib import Cofibration, Eq
from .cube import (CubeError, IExpr, Substitution, check_ctx, factor_through,
                   fresh_name, is_const, projection)
from .rewrite import IncompatiblePieces, Normalizer
from .terms import (ExtSet, GlueIsoFwd, GlueOb, Inv, IsoTerm, PartialElement,
                    Term, ctx_of, restrict_partial_raw)

TRUNCATION_NOTE = ("correction path: the alpha-piece is taken at level r, t(r), "
                   "the only level in scope for a path living over X(r)")
PRG_NOTE = ("correction path: the (i=0)-piece is w(r), the filler at level r, "
            "since the path lives over B(a(r))")


class ProviderFailure(RuntimeError):
    def __init__(self, step: str, reason: str):
        self.step = step
        self.reason = reason
        super().__init__(f"{step}: {reason}")


def map_value(x: Any, fn: Callable[[Term], Term]) -> Any:
    if isinstance(x, Term):
        return fn(x)
    if isinstance(x, IsoTerm):
        return IsoTerm(fn(x.fwd), fn(x.inv))
    if isinstance(x, tuple):
        return tuple(map_value(p, fn) for p in x)
    if isinstance(x, _Marker):
        return x
    raise TypeError(f"not a term-valued object: {x!r}")


def first(x: Any) -> Any:
    return x[0] if isinstance(x, tuple) else x


# ---------------------------------------------------------------------------
# extension spaces


class Space:
    """A set over ``ctx`` (with its parameters) carrying an extension structure."""

    nz: Normalizer
    ctx: tuple

    def reindex(self, f: Substitution) -> "Space":
        raise NotImplementedError

    def ext(self, pieces: Sequence[tuple]) -> Any:
        raise NotImplementedError

    def restrict(self, value: Any, f: Substitution) -> Any:
        return map_value(value, lambda t: self.nz.restrict_nf(t, f))

    def normal(self, value: Any) -> Any:
        return map_value(value, self.nz.nf)

    def weaken(self, value: Any, ctx: Sequence[str]) -> Any:
        return self.restrict(value, projection(tuple(ctx), self.ctx))


@dataclass
class TruncationSpace(Space):
    """Elements of the free set with ``ext``; extensions use ``basepoint``."""

    nz: Normalizer
    basepoint: Term

    @property
    def ctx(self) -> tuple:
        return ctx_of(self.basepoint)

    def reindex(self, f: Substitution) -> "TruncationSpace":
        return TruncationSpace(self.nz, self.nz.restrict_nf(self.basepoint, f))

    def ext(self, pieces: Sequence[tuple]) -> Term:
        return self.nz.nf(ExtSet(self.basepoint, PartialElement(self.ctx, tuple(pieces))))


@dataclass
class IsoExtensionSpace(Space):
    """Pairs ``(y, e : x ~ y)``; extension glues a new object onto ``x``."""

    nz: Normalizer
    x: Term

    @property
    def ctx(self) -> tuple:
        return ctx_of(self.x)

    def reindex(self, f: Substitution) -> "IsoExtensionSpace":
        return IsoExtensionSpace(self.nz, self.nz.restrict_nf(self.x, f))

    def ext(self, pieces: Sequence[tuple]) -> tuple:
        p = PartialElement(self.ctx, tuple(pieces))
        g = GlueIsoFwd(self.x, p)
        return (self.nz.nf(GlueOb(self.x, p)),
                IsoTerm(self.nz.nf(g), self.nz.nf(Inv(g))))


@dataclass
class WithMarker(Space):
    """Pairs ``(v, marker)`` where the second factor is a singleton."""

    inner: Space
    marker: Any = UNIT

    @property
    def nz(self) -> Normalizer:
        return self.inner.nz

    @property
    def ctx(self) -> tuple:
        return self.inner.ctx

    def reindex(self, f: Substitution) -> "WithMarker":
        return WithMarker(self.inner.reindex(f), self.marker)

    def ext(self, pieces: Sequence[tuple]) -> tuple:
        for c, pl in pieces:
            if pl[1] is not self.marker:
                raise ProviderFailure("ext", f"second component on {c} is not {self.marker}")
        return (self.inner.ext([(c, pl[0]) for c, pl in pieces]), self.marker)


@dataclass
class SingletonSpace(Space):
    """A set with exactly one element; extension checks every piece is it."""

    nz: Normalizer
    ctx: tuple
    element: Any
    label: str = "singleton"

    def reindex(self, f: Substitution) -> "SingletonSpace":
        return SingletonSpace(self.nz, f.dom, self.restrict(self.element, f), self.label)

    def ext(self, pieces: Sequence[tuple]) -> Any:
        for c, pl in pieces:
            want = self.restrict(self.element, cofib.quotient(c))
            if self.normal(pl) != want:
                raise ProviderFailure(self.label, f"piece on {c} differs from the unique element")
        return self.normal(self.element)


def build_partial(space: Space, ctx: Sequence[str], entries: Sequence[tuple]) -> tuple:
    """Pieces of ``[phi_1 -> v_1, ...]`` (total values over ``ctx``), after
    checking the entries agree on every overlap."""
    ctx = tuple(ctx)
    entries = list(entries)
    for k in range(len(entries)):
        for l in range(k + 1, len(entries)):
            (pk, vk), (pl, vl) = entries[k], entries[l]
            for m in cofib.dnf(cofib.And(pk, pl), ctx):
                q = cofib.quotient(m)
                a, b = space.restrict(vk, q), space.restrict(vl, q)
                if a != b:
                    raise IncompatiblePieces(m, m, q, a, b)
    dnfs = [cofib.dnf(phi, ctx) for phi, _ in entries]
    pieces = []
    for c in cofib.dnf(cofib.disj(*(phi for phi, _ in entries)), ctx):
        for (phi, v), d in zip(entries, dnfs):
            if any(cofib.conjunct_entails(c, e) for e in d):
                pieces.append((c, space.restrict(v, cofib.quotient(c))))
                break
    return tuple(pieces)


# ---------------------------------------------------------------------------
# filling problems


@dataclass(frozen=True)
class FillingProblem:
    """Weak composition data: tube ``t`` on ``alpha`` along the filling
    dimension ``z``, base ``b`` at level ``r``; ``s`` is an endpoint, a name of
    ``ctx``, or a fresh name standing for a generic level."""

    ctx: tuple
    r: IExpr
    s: IExpr
    alpha: Cofibration
    tube: PartialElement
    base: Any
    z: str = "z"
    base_line: Any = None

    def __post_init__(self):
        check_ctx(self.ctx)
        if self.z in self.ctx:
            raise CubeError(f"filling dimension {self.z!r} clashes with {self.ctx}")
        if self.tube.ctx != self.ctx + (self.z,):
            raise CubeError(f"tube lives over {self.tube.ctx}, expected {self.ctx + (self.z,)}")
        if self.tube.conjuncts != cofib.dnf(self.alpha, self.tube.ctx):
            raise cofib.CofError("tube conjuncts do not match alpha")
        for e, label in ((self.r, "r"), (self.s, "s")):
            if not is_const(e) and (e == self.z or (label == "r" and e not in self.ctx)):
                raise CubeError(f"{label}={e!r} is not an endpoint or a name of {self.ctx}")

    @property
    def generic_s(self) -> bool:
        return not is_const(self.s) and self.s not in self.ctx

    @property
    def target_ctx(self) -> tuple:
        return self.ctx + (self.s,) if self.generic_s else self.ctx

    def level_map(self, e: IExpr, ctx: Sequence[str]) -> Substitution:
        """``ctx -> ctx_I + z`` fixing the names of ``ctx_I`` and sending z to ``e``."""
        return Substitution(tuple(ctx), self.ctx + (self.z,), self.ctx + (e,))

    def tube_at(self, e: IExpr, ctx: Sequence[str], nz: Normalizer) -> PartialElement:
        """``t(e)`` as a partial element over ``ctx``."""
        return restrict_partial_raw(self.tube, self.level_map(e, ctx),
                                    lambda t, r: nz.restrict_nf(t, r))

    def line_under(self, q: Substitution, nz: Normalizer) -> Term:
        """The tube's line (over ``q.dom + z``) where the conjunct of ``q`` holds."""
        z = self.z
        if z in q.dom:
            raise CubeError(f"filling dimension {z!r} clashes with {q.dom}")
        h = Substitution(q.dom + (z,), self.ctx + (z,),
                         tuple(q[v] for v in self.ctx) + (z,))
        p = restrict_partial_raw(self.tube, h, lambda t, r: nz.restrict_nf(t, r))
        if not p.decided:
            raise cofib.CofError(f"alpha does not hold under {q}")
        return p.pieces[0][1]


@dataclass
class WcomResult:
    filler: Any
    path: Any
    path_dim: str
    filler_rr: Any
    certificate: Certificate
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.certificate.passed


def _sub_at(ctx: tuple, name: str, value: IExpr) -> Substitution:
    """``ctx - name -> ctx`` sending ``name`` to ``value``."""
    dom = tuple(v for v in ctx if v != name)
    return Substitution(dom, ctx, tuple(value if v == name else v for v in ctx))


def _check_agreement(problem: FillingProblem, nz: Normalizer, cert: Certificate) -> None:
    tr = problem.tube_at(problem.r, problem.ctx, nz)
    for c, pl in tr.pieces:
        q = cofib.quotient(c)
        cert.check_values("tube agrees with base at r", q, pl,
                          map_value(first(problem.base), lambda t: nz.restrict_nf(t, q)), nz)


def _certify(problem: FillingProblem, nz: Normalizer, cert: Certificate,
             fill: Callable[[IExpr, tuple], Any], filler: Any, filler_rr: Any,
             path: Any, i: str) -> None:
    """Boundary checks shared by every weak composition derivation; ``fill``
    recomputes the filler for a given level and context."""
    I, J = problem.ctx, problem.target_ctx
    ts = problem.tube_at(problem.s, J, nz)
    for c, pl in ts.pieces:
        q = cofib.quotient(c)
        cert.check("filler extends t(s) on alpha", q, nz.restrict_nf(first(filler), q), pl, nz)
    if problem.generic_s:
        for e in (0, 1, problem.r):
            sigma = _sub_at(J, problem.s, e)
            here = nz.restrict_nf(first(filler), sigma)
            cert.check(f"filler at s:={e} matches direct computation", sigma, here,
                       first(fill(e, I)), nz)
            for c, pl in problem.tube_at(e, I, nz).pieces:
                q = cofib.quotient(c)
                cert.check(f"filler at s:={e} extends t({e}) on alpha", q,
                           nz.restrict_nf(here, q), pl, nz)
    K = I + (i,)
    b = first(problem.base)
    cert.check("path(0) = filler at r->r", f"{{{i}:=0}}",
               nz.restrict_nf(path, _sub_at(K, i, 0)), first(filler_rr), nz)
    cert.check("path(1) = base", f"{{{i}:=1}}", nz.restrict_nf(path, _sub_at(K, i, 1)), b, nz)
    bk = nz.restrict_nf(b, projection(K, I))
    for c in cofib.dnf(problem.alpha, K):
        q = cofib.quotient(c)
        cert.check("path constant on alpha", q, nz.restrict_nf(path, q),
                   nz.restrict_nf(bk, q), nz)


def wcom_from_ext(problem: FillingProblem, nz: Optional[Normalizer] = None) -> WcomResult:
    """Weak composition in the free set with ``ext``:
    ``wcom^{r->s} = ext(b, [alpha -> t(s)])`` and the correction path
    ``ext(b, [alpha -> t(r), (i=0) -> wcom^{r->r}, (i=1) -> b])``."""
    nz = nz or Normalizer()
    cert = Certificate()
    _check_agreement(problem, nz, cert)
    b = problem.base
    I, J = problem.ctx, problem.target_ctx

    def fill(e: IExpr, ctx: tuple) -> Term:
        space = TruncationSpace(nz, nz.restrict_nf(b, projection(ctx, I)))
        return space.ext(problem.tube_at(e, ctx, nz).pieces)

    filler = fill(problem.s, J)
    filler_rr = fill(problem.r, I)
    i = fresh_name("i", I + (problem.z, problem.s if problem.generic_s else problem.z))
    K = I + (i,)
    space_k = TruncationSpace(nz, nz.restrict_nf(b, projection(K, I)))
    tr = PartialElement(K, problem.tube_at(problem.r, K, nz).pieces)
    space_i = TruncationSpace(nz, b)
    entries = [(problem.alpha, None), (Eq(i, 0), space_i.weaken(filler_rr, K)),
               (Eq(i, 1), space_i.weaken(b, K))]
    cert.note(TRUNCATION_NOTE)
    try:
        pieces = _with_partial_first(space_k, K, tr, entries)
    except IncompatiblePieces as err:
        # only reachable when the tube disagrees with the base
        cert.fail("incompatible pieces", err.meet, str(err))
        return WcomResult(filler, None, i, filler_rr, cert)
    path = space_k.ext(pieces)
    _certify(problem, nz, cert, fill, filler, filler_rr, path, i)
    return WcomResult(filler, path, i, filler_rr, cert)


def _with_partial_first(space: Space, ctx: tuple, partial: PartialElement,
                        entries: list) -> tuple:
    """Like :func:`build_partial`, but the first entry is given per conjunct
    (a partial element) rather than as a total value."""
    total = [(phi, v) for phi, v in entries[1:]]
    build_partial(space, ctx, total)
    # check the partial entry against the total ones on overlaps
    for c, pl in partial.pieces:
        q = cofib.quotient(c)
        for phi, v in total:
            for m in cofib.dnf(cofib.subst_cof(phi, q), q.dom):
                qm = cofib.quotient(m)
                a = space.restrict(pl, qm)
                bq = space.restrict(space.restrict(v, q), qm)
                if a != bq:
                    raise IncompatiblePieces(c, m, qm, a, bq)
    pieces = []
    head = entries[0][0]
    dnfs = [cofib.dnf(phi, ctx) for phi, _ in total]
    for c in cofib.dnf(cofib.disj(head, *(phi for phi, _ in total)), ctx):
        q = cofib.quotient(c)
        chosen = None
        for c0, pl in partial.pieces:
            r = _factor(c0, q)
            if r is not None:
                chosen = space.restrict(pl, r)
                break
        if chosen is None:
            for (phi, v), d in zip(total, dnfs):
                if any(cofib.conjunct_entails(c, e) for e in d):
                    chosen = space.restrict(v, q)
                    break
        pieces.append((c, chosen))
    return tuple(pieces)


def _factor(c0: cofib.ConjunctSystem, q: Substitution) -> Optional[Substitution]:
    return factor_through(cofib.quotient(c0), q)


# ---------------------------------------------------------------------------
# contractibility


@dataclass
class CenterPath:
    center: Any
    path: Any
    path_dim: str
    certificate: Certificate


def center_and_path(space: Space, x: Any, y: Any, dim: str = "i") -> CenterPath:
    """Center ``ext([])`` and the path ``ext([(i=0) -> x, (i=1) -> y])``."""
    nz = space.nz
    ctx = space.ctx
    center = space.ext(())
    i = fresh_name(dim, ctx)
    K = ctx + (i,)
    sk = space.reindex(projection(K, ctx))
    pieces = build_partial(sk, K, [(Eq(i, 0), space.weaken(x, K)),
                                   (Eq(i, 1), space.weaken(y, K))])
    path = sk.ext(pieces)
    cert = Certificate()
    cert.check_values("path(0) = x", f"{{{i}:=0}}", sk.restrict(path, _sub_at(K, i, 0)), x, nz)
    cert.check_values("path(1) = y", f"{{{i}:=1}}", sk.restrict(path, _sub_at(K, i, 1)), y, nz)
    return CenterPath(center, path, i, cert)


# ---------------------------------------------------------------------------
# fibrancy from pseudo-reflexive graphs


@dataclass(frozen=True)
class PRGInstance:
    """A family ``B`` over a pseudo-reflexive graph ``A`` with coercion data
    and the two homotopicality extension spaces.

    * ``e_space(nz, b, a_e)``: pairs ``(b2, b_e : E_B(a_e, b, b2))``
    * ``r_space(nz, b, a_r)``: pairs ``(b_e : E_B(a_e, b, b), b_r)``
    * ``fiber_wcoe(nz, line, z, r, s)``, ``fiber_wcoh(nz, line, z, r)``
    * ``base_wcoe(nz, a_line, z, r, s)``, ``base_wcoh(nz, a_line, z, r)``
      (None when the base is the point)
    """

    name: str
    e_space: Callable
    r_space: Callable
    fiber_wcoe: Callable
    fiber_wcoh: Callable
    base_wcoe: Optional[Callable] = None
    base_wcoh: Optional[Callable] = None


def set_instance() -> PRGInstance:
    """The free set with ``ext`` over the point, with trivial edges and loops."""
    return PRGInstance(
        "set",
        e_space=lambda nz, b, a_e: WithMarker(TruncationSpace(nz, b), UNIT),
        r_space=lambda nz, b, a_r: SingletonSpace(nz, ctx_of(b), (UNIT, UNIT), "R_B"),
        fiber_wcoe=lambda nz, line, z, r, s: UNIT,
        fiber_wcoh=lambda nz, line, z, r: UNIT,
    )


def _line_level(line: Term, z: str, e: IExpr, ctx: tuple, nz: Normalizer) -> Term:
    lctx = ctx_of(line)
    return nz.restrict_nf(line, Substitution(tuple(ctx), lctx, tuple(e if v == z else v for v in lctx)))


def _base_line(problem: FillingProblem, ctx: tuple, nz: Normalizer) -> Any:
    I, z = problem.ctx, problem.z
    w = Substitution(tuple(ctx) + (z,), I + (z,), I + (z,))
    return map_value(problem.base_line, lambda t: nz.restrict_nf(t, w))


def fibrancy_from_prg(instance: PRGInstance, problem: FillingProblem,
                      nz: Optional[Normalizer] = None) -> WcomResult:
    """Weak composition from coercion data and homotopicality:
    ``w(s)`` extends ``[alpha -> (t(s), wcoe_t^{r->s})]``, ``d`` extends
    ``[alpha -> (wcoe_t^{r->r}, wcoh_t^r)]``, and the correction path ``w_(i)``
    extends ``[alpha -> (t(r), wcoe_t^{r->r}), (i=0) -> w(r), (i=1) -> (b, d.1)]``."""
    nz = nz or Normalizer()
    cert = Certificate()
    cert.note(PRG_NOTE)
    _check_agreement(problem, nz, cert)
    I, J, z = problem.ctx, problem.target_ctx, problem.z
    b = problem.base

    def a_edge(e_r: IExpr, e_s: IExpr, ctx: tuple) -> Any:
        if instance.base_wcoe is None:
            return None
        return instance.base_wcoe(nz, _base_line(problem, ctx, nz), z, e_r, e_s)

    def a_loop(ctx: tuple) -> Any:
        if instance.base_wcoh is None:
            return None
        return instance.base_wcoh(nz, _base_line(problem, ctx, nz), z, problem.r)

    def coe_pieces(e_s: IExpr, ctx: tuple, with_value: bool) -> tuple:
        """Pieces ``alpha -> (t(e_s), wcoe_t^{r->e_s})`` over ``ctx``."""
        out = []
        for c in cofib.dnf(problem.alpha, ctx):
            q = cofib.quotient(c)
            line = problem.line_under(q, nz)
            r_q, s_q = q.apply(problem.r), q.apply(e_s) if e_s in ctx or is_const(e_s) else e_s
            coe = instance.fiber_wcoe(nz, line, z, r_q, s_q)
            if with_value:
                out.append((c, (_line_level(line, z, s_q, q.dom, nz), coe)))
            else:
                out.append((c, (coe, instance.fiber_wcoh(nz, line, z, r_q))))
        return tuple(out)

    def w(e_s: IExpr, ctx: tuple) -> Any:
        bc = nz.restrict_nf(first(b), projection(ctx, I))
        space = instance.e_space(nz, bc, a_edge(problem.r, e_s, ctx))
        pieces = coe_pieces(e_s, ctx, True)
        try:
            out = space.ext(pieces)
        except ProviderFailure as err:
            raise ProviderFailure(f"w({e_s})", err.reason) from None
        for c, pl in pieces:
            q = cofib.quotient(c)
            cert.check_values(f"w({e_s}) extends (t, wcoe_t) on alpha", q,
                              space.restrict(out, q), pl, nz)
        return out

    try:
        ws = w(problem.s, J)
        wr = w(problem.r, I)
        r_space = instance.r_space(nz, first(b), a_loop(I))
        d_pieces = coe_pieces(problem.r, I, False)
        d = r_space.ext(d_pieces)
        for c, pl in d_pieces:
            q = cofib.quotient(c)
            cert.check_values("d extends (wcoe_t^{r->r}, wcoh_t^r) on alpha", q,
                              r_space.restrict(d, q), pl, nz)
        i = fresh_name("i", I + (z, problem.s if problem.generic_s else z))
        K = I + (i,)
        e_space = instance.e_space(nz, first(b), a_edge(problem.r, problem.r, I))
        ek = e_space.reindex(projection(K, I))
        tube_k = coe_pieces(problem.r, K, True)
        entries = [(problem.alpha, None), (Eq(i, 0), e_space.weaken(wr, K)),
                   (Eq(i, 1), e_space.weaken((first(b), d[0]), K))]
        pieces = _with_partial_first(ek, K, PartialElement(K, tube_k), entries)
        wpath = ek.ext(pieces)
    except ProviderFailure as err:
        cert.fail(err.step, "", err.reason)
        return WcomResult(None, None, "", None, cert)
    except IncompatiblePieces as err:
        cert.fail("incompatible pieces", err.meet, str(err))
        return WcomResult(None, None, "", None, cert)

    def fill(e: IExpr, ctx: tuple) -> Any:
        return w(e, ctx)

    _certify(problem, nz, cert, fill, first(ws), first(wr), first(wpath), i)
    return WcomResult(first(ws), first(wpath), i, first(wr), cert,
                      extras={"w_s": ws, "w_r": wr, "d": d, "w_path": wpath})


# ---------------------------------------------------------------------------
# building problems


def problem_from_total(ctx: Sequence[str], r: IExpr, s: IExpr, alpha: Cofibration,
                       line: Term, z: str = "z", base: Optional[Term] = None,
                       nz: Optional[Normalizer] = None, base_line: Any = None) -> FillingProblem:
    """A problem whose tube is ``[alpha -> line]`` for a total line over
    ``ctx + z``; the base defaults to ``line`` at ``r``."""
    nz = nz or Normalizer()
    ctx = check_ctx(ctx)
    K = ctx + (z,)
    pieces = tuple((c, nz.restrict_nf(line, cofib.quotient(c))) for c in cofib.dnf(alpha, K))
    tube = PartialElement(K, pieces)
    if base is None:
        base = nz.restrict_nf(line, Substitution(ctx, K, ctx + (r,)))
    return FillingProblem(ctx, r, s, alpha, tube, base, z, base_line)


__all__ = [
    "Space", "TruncationSpace", "IsoExtensionSpace", "WithMarker", "SingletonSpace",
    "build_partial", "FillingProblem", "WcomResult", "wcom_from_ext", "CenterPath",
    "center_and_path", "PRGInstance", "set_instance", "fibrancy_from_prg",
    "problem_from_total", "ProviderFailure", "map_value", "first", "REFL", "UNIT",
    "TRUNCATION_NOTE", "PRG_NOTE",
]
