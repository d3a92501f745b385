"""Kan composition, by cases on the head of the type line.

``comp(line, phi, tube, cap)`` takes the line ``i ↦ A(i)`` as an interval
closure, the face ``phi`` as a DNF, a tube ``i ↦ u(i)`` whose values are
systems under ``phi`` and a cap ``u0 : A(0)``.  Lines whose head is a
universe, a neutral or a type system stay stuck.
"""

from __future__ import annotations

from .interval_face import F_BOT, F_TOP, I_ONE, I_ZERO, IDnf, eq0_dnf, eq1_dnf, f_join, i_join, i_meet, i_neg
from .semantics import (
    FDnf,
    IClosure,
    NComp,
    Thunk,
    Value,
    VBool,
    VBox,
    VFalse,
    VModal,
    VNeu,
    VPair,
    VPath,
    VPi,
    VPLam,
    VSigma,
    VSys,
    VTrue,
    VLam,
    Closure,
    act,
    app,
    fresh_name,
    fst,
    ivar,
    mk_sys,
    papp,
    snd,
    unbox,
    value_thunk,
)


EMPTY_TUBE = IClosure(None, fn=lambda _r: VSys(()))


def under(face: FDnf, fn) -> Value:
    """A one-branch system whose body is computed from the clause assignment."""
    return mk_sys([(face, Thunk(fn))])


def tube_of(face: FDnf, body) -> IClosure:
    """Wrap ``r ↦ body(r)`` as a tube defined only under ``face``."""
    return IClosure(None, fn=lambda r: under(face, lambda a: act(body(r), a)))


def comp(line: IClosure, phi: FDnf, tube: IClosure, cap: Value) -> Value:
    if frozenset() in phi:
        return tube(I_ONE)
    probe = line(ivar(fresh_name()))
    match probe:
        case VPi():
            return comp_pi(line, phi, tube, cap)
        case VSigma():
            return comp_sigma(line, phi, tube, cap)
        case VPath():
            return comp_path(line, phi, tube, cap)
        case VModal():
            out = comp_mod(line, phi, tube, cap)
            if out is not None:
                return out
        case VBool():
            out = comp_bool(phi, tube, cap)
            if out is not None:
                return out
    return VNeu(NComp(line, phi, tube, cap), line(I_ONE))


def transp(line: IClosure, cap: Value) -> Value:
    return comp(line, F_BOT, EMPTY_TUBE, cap)


def fill(line: IClosure, phi: FDnf, tube: IClosure, cap: Value, r: IDnf) -> Value:
    """``fill`` at ``r``: compose along ``j ↦ A(r ∧ j)`` pinning ``r = 0`` to the cap."""
    sub_line = IClosure(None, fn=lambda j: line(i_meet(r, j)))
    face = f_join(phi, eq0_dnf(r))

    def sub_tube(j: IDnf) -> Value:
        return mk_sys(
            [
                (phi, Thunk(lambda a: act(tube(i_meet(r, j)), a))),
                (eq0_dnf(r), value_thunk(cap)),
            ]
        )

    return comp(sub_line, face, IClosure(None, fn=sub_tube), cap)


def transport_back(line: IClosure, x: Value, r: IDnf) -> Value:
    """Carry ``x : A(1)`` back to ``A(r)``; the result is ``x`` at ``r = 1``."""
    sub_line = IClosure(None, fn=lambda j: line(i_join(r, i_neg(j))))
    face = eq1_dnf(r)
    return comp(sub_line, face, IClosure(None, fn=lambda _j: under(face, lambda a: act(x, a))), x)


def comp_pi(line, phi, tube, cap) -> Value:
    top = line(I_ONE)
    dom_line = IClosure(None, fn=lambda r: line(r).dom)

    def body(x: Value) -> Value:
        xs = lambda r: transport_back(dom_line, x, r)  # noqa: E731
        cod_line = IClosure(None, fn=lambda r: line(r).cod(xs(r)))
        new_tube = IClosure(None, fn=lambda r: app(tube(r), xs(r)))
        return comp(cod_line, phi, new_tube, app(cap, xs(I_ZERO)))

    return VLam(top.mu, Closure(None, fn=body), top.name)


def comp_sigma(line, phi, tube, cap) -> Value:
    fst_line = IClosure(None, fn=lambda r: line(r).dom)
    fst_tube = IClosure(None, fn=lambda r: fst(tube(r)))
    a = lambda r: fill(fst_line, phi, fst_tube, fst(cap), r)  # noqa: E731
    snd_line = IClosure(None, fn=lambda r: line(r).cod(a(r)))
    snd_tube = IClosure(None, fn=lambda r: snd(tube(r)))
    return VPair(a(I_ONE), comp(snd_line, phi, snd_tube, snd(cap)))


def comp_path(line, phi, tube, cap) -> Value:
    def at(j: IDnf) -> Value:
        j0, j1 = eq0_dnf(j), eq1_dnf(j)
        inner_line = IClosure(None, fn=lambda r: line(r).line(j))

        def inner_tube(r: IDnf) -> Value:
            return mk_sys(
                [
                    (phi, Thunk(lambda a: act(papp(tube(r), j), a))),
                    (j0, Thunk(lambda a: act(line(r).a0, a))),
                    (j1, Thunk(lambda a: act(line(r).a1, a))),
                ]
            )

        return comp(inner_line, f_join(phi, f_join(j0, j1)), IClosure(None, fn=inner_tube), papp(cap, j))

    return VPLam(IClosure(None, fn=at), line(I_ONE).name)


def comp_mod(line, phi, tube, cap) -> Value | None:
    """Reduces only when the cap and every clause of the tube are boxes."""
    if not isinstance(cap, VBox):
        return None
    probe = tube(ivar(fresh_name()))
    for clause in phi:
        if not isinstance(act(probe, dict(clause)), VBox):
            return None
    mu = cap.mu
    inner_line = IClosure(None, fn=lambda r: line(r).ty)
    inner_tube = IClosure(None, fn=lambda r: unbox(tube(r)))
    return VBox(mu, comp(inner_line, phi, inner_tube, cap.v))


def comp_bool(phi, tube, cap) -> Value | None:
    """Reduces to a literal cap when the tube agrees with it on every clause."""
    if not isinstance(cap, (VTrue, VFalse)):
        return None
    if not phi:
        return cap
    probe = tube(ivar(fresh_name()))
    for clause in phi:
        if type(act(probe, dict(clause))) is not type(cap):
            return None
    return cap


__all__ = ["comp", "fill", "transp", "transport_back", "EMPTY_TUBE", "F_TOP"]
