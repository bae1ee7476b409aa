"""Elaboration: type checking, interface conformance and runtime setup."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..lang.errors import InterfaceMismatch, LangError, TypeMismatch, UnboundVariable
from ..lang.evaluator import DEFAULT_FUEL, Runtime
from ..lang.syntax import Expr, FunDecl, Program, free_vars
from ..lang.typecheck import Checker
from ..lang.types import (
    BOOL,
    Datatypes,
    TAbstract,
    TArrow,
    TProd,
    Type,
    contains_abstract,
    is_arrow_free,
    substitute_abstract,
    uncurry,
)
from ..lang.values import is_true
from .diagnostics import DiagnosticError
from .parser import parse_program


@dataclass(frozen=True)
class AlphaPositions:
    """Where the abstract type occurs in an operation's (uncurried) signature."""

    args: tuple[int, ...]
    result: tuple[tuple[int, ...], ...]  # paths into the result product; () is the whole result

    def describe(self) -> str:
        parts = [f"arg{i}" for i in self.args]
        if self.result:
            parts.append("result")
        return "->".join(parts) if parts else "none"


def abstract_paths(t: Type, prefix=()) -> list[tuple[int, ...]]:
    if isinstance(t, TAbstract):
        return [prefix]
    if isinstance(t, TProd):
        return abstract_paths(t.left, prefix + (1,)) + abstract_paths(t.right, prefix + (2,))
    return []


def alpha_positions(t: Type) -> AlphaPositions:
    args, res = uncurry(t)
    return AlphaPositions(
        tuple(i for i, a in enumerate(args) if contains_abstract(a)),
        tuple(abstract_paths(res)) if not isinstance(res, TArrow) else (),
    )


def _arrow_args_with_abstract(t: Type) -> bool:
    """True if some function-typed argument mentions the abstract type."""
    if isinstance(t, TArrow):
        if isinstance(t.dom, TArrow) and contains_abstract(t.dom):
            return True
        if isinstance(t.dom, TProd) and not is_arrow_free(t.dom) and contains_abstract(t.dom):
            return True
        return _arrow_args_with_abstract(t.dom) or _arrow_args_with_abstract(t.cod)
    if isinstance(t, TProd):
        return _arrow_args_with_abstract(t.left) or _arrow_args_with_abstract(t.right)
    return False


@dataclass(frozen=True)
class Helper:
    """A function the synthesizer may call inside candidate invariants."""

    name: str
    type: Type  # abstract type already replaced by the concrete one
    arity: int


@dataclass
class ElaboratedProgram:
    name: str
    program: Program
    dts: Datatypes
    runtime: Runtime
    tau_c: Type
    interface: dict[str, Type]
    alpha: dict[str, AlphaPositions]
    quantifiers: tuple[tuple[str, Type], ...]
    spec_fn: Callable
    helpers: tuple[Helper, ...]
    higher_order: bool = False
    annotations: dict[str, str] = field(default_factory=dict)

    @property
    def ops(self) -> dict[str, object]:
        return {n: self.runtime.lookup(n) for n in self.interface}

    def op(self, name: str):
        return self.runtime.lookup(name)

    def concrete_type(self, t: Type) -> Type:
        return substitute_abstract(t, self.tau_c)

    @property
    def abstract_quantifiers(self) -> list[int]:
        return [i for i, (_, t) in enumerate(self.quantifiers) if contains_abstract(t)]

    def spec_holds(self, *values) -> bool:
        return is_true(self.runtime.call_n(self.spec_fn, *values))

    def compile_predicate(self, e: Expr) -> Callable:
        """Compile a closed ``tau_c -> bool`` expression to a Python callable."""
        return self.runtime.compile(e)

    def check_predicate_expr(self, e: Expr) -> None:
        ctx = {h.name: h.type for h in self.helpers}
        chk = Checker(self.dts, self.tau_c)
        t = chk.norm(chk.check(ctx, e))
        want = TArrow(self.tau_c, BOOL)
        if t != want:
            raise TypeMismatch(f"an invariant must have type {want}, found {t}", e.span)


    def parse_predicate(self, text: str) -> Expr:
        """Parse and type check an invariant written in the object language."""
        from .parser import parse_expr

        arity = {c.name: c.arity for adt in self.dts.adts.values() for c in adt.ctors}
        try:
            e = parse_expr(text, arity)
            self.check_predicate_expr(e)
        except LangError as err:
            raise DiagnosticError.from_lang(err) from None
        return e


def _decl_ctx_type(d: FunDecl) -> Type:
    return d.type


def elaborate(
    program: Program,
    interface: str | None = None,
    higher_order: bool = False,
    fuel: int = DEFAULT_FUEL,
    name: str = "<program>",
) -> ElaboratedProgram:
    """Check ``program`` and prepare it for inference.

    ``interface`` names a ``module type`` to check the module against, overriding
    the module's own ascription. Raises ``DiagnosticError`` on failure.
    """
    try:
        return _elaborate(program, interface, higher_order, fuel, name)
    except LangError as err:
        raise DiagnosticError.from_lang(err) from None


def _elaborate(program: Program, interface_name, higher_order, fuel, name) -> ElaboratedProgram:
    dts = Datatypes()
    for td in program.types:
        for _, fields in td.ctors:
            for f in fields:
                if not is_arrow_free(f):
                    raise TypeMismatch(f"constructor fields of `{td.name}` must not be functions", td.span)
        dts.declare(td.name, td.ctors, span=td.span)

    checker = Checker(dts)
    ctx: dict[str, Type] = {}
    seen: dict[str, str] = {}

    def claim(n, where, span):
        if n in seen:
            raise TypeMismatch(f"`{n}` is defined twice ({seen[n]} and {where})", span)
        seen[n] = where

    def check_decl(d: FunDecl, chk: Checker, scope: dict[str, Type]):
        for _, pt in d.params:
            dts.check_type(chk.norm(pt), allow_abstract=chk.concrete is not None, span=d.span)
        dts.check_type(chk.norm(d.ret_type), allow_abstract=chk.concrete is not None, span=d.span)
        local = dict(scope)
        if d.recursive:
            local[d.name] = chk.norm(d.type)
        for pn, pt in d.params:
            local[pn] = chk.norm(pt)
        chk.expect(local, d.body, d.ret_type)

    for d in program.prelude:
        claim(d.name, "prelude", d.span)
        if contains_abstract(d.type):
            raise TypeMismatch(f"prelude function `{d.name}` mentions the abstract type `t`", d.span)
        check_decl(d, checker, ctx)
        ctx[d.name] = d.type

    mod = program.module
    tau_c = mod.concrete
    if contains_abstract(tau_c):
        raise TypeMismatch("the concrete type cannot mention `t`", mod.span)
    dts.check_type(tau_c, span=mod.span)
    if not is_arrow_free(tau_c):
        raise TypeMismatch("the concrete type must be first-order data", mod.span)
    inner = Checker(dts, tau_c)
    mctx = dict(ctx)
    declared: dict[str, Type] = {}
    for d in mod.defs:
        claim(d.name, f"module {mod.name}", d.span)
        check_decl(d, inner, mctx)
        mctx[d.name] = inner.norm(d.type)
        declared[d.name] = d.type

    sig_name = interface_name or mod.sig_name
    if sig_name is not None:
        sigs = {s.name: s for s in program.sigs}
        if sig_name not in sigs:
            raise InterfaceMismatch(f"unknown module type `{sig_name}`", mod.span)
        sig = sigs[sig_name]
        iface: dict[str, Type] = {}
        for n, t in sig.members:
            if n not in declared:
                raise InterfaceMismatch(f"module {mod.name} does not implement `{n}` required by {sig_name}", mod.span)
            if substitute_abstract(t, tau_c) != inner.norm(declared[n]):
                raise InterfaceMismatch(
                    f"`{n}` has type {inner.norm(declared[n])} but {sig_name} requires {t} with t = {tau_c}", mod.span
                )
            iface[n] = t
    else:
        iface = dict(declared)

    for n, t in iface.items():
        if not higher_order and _arrow_args_with_abstract(t):
            raise InterfaceMismatch(
                f"`{n} : {t}` takes a function over the abstract type; enable higher-order mode (--ho)", mod.span
            )

    spec = program.spec
    sctx = dict(ctx)
    for n, t in iface.items():
        sctx[n] = t
    for qn, qt in spec.quantifiers:
        dts.check_type(qt, allow_abstract=True, span=spec.span)
        if not is_arrow_free(qt):
            raise TypeMismatch(f"quantifier `{qn}` must range over first-order data", spec.span)
        sctx[qn] = qt
    unknown = free_vars(spec.body) - set(sctx)
    if unknown:
        n = sorted(unknown)[0]
        raise UnboundVariable(f"unbound operation `{n}` in spec", spec.span)
    checker.expect(sctx, spec.body, BOOL)

    rt = Runtime(fuel)
    for d in program.prelude:
        rt.define(d)
    for d in mod.defs:
        rt.define(d)
    spec_fn = rt.compile(spec.body, tuple(q for q, _ in spec.quantifiers))

    helpers = []
    for d in program.prelude:
        helpers.append(Helper(d.name, d.type, len(d.params)))
    for n, t in iface.items():
        ct = substitute_abstract(t, tau_c)
        helpers.append(Helper(n, ct, len(uncurry(ct)[0])))

    return ElaboratedProgram(
        name=name,
        program=program,
        dts=dts,
        runtime=rt,
        tau_c=tau_c,
        interface=iface,
        alpha={n: alpha_positions(t) for n, t in iface.items()},
        quantifiers=spec.quantifiers,
        spec_fn=spec_fn,
        helpers=tuple(helpers),
        higher_order=higher_order,
    )


def load(path: str, higher_order: bool | None = None, interface: str | None = None, fuel: int = DEFAULT_FUEL):
    """Parse and elaborate a benchmark file; ``@ho`` annotations enable higher-order mode."""
    import os

    from .lexer import annotations

    with open(path, encoding="utf-8") as fh:
        src = fh.read()
    ann = annotations(src)
    ho = ("ho" in ann) if higher_order is None else higher_order
    prog = parse_program(src)
    name = os.path.splitext(os.path.basename(path))[0]
    ep = elaborate(prog, interface=interface, higher_order=ho, fuel=fuel, name=name)
    ep.annotations = ann
    return ep


def load_source(src: str, name="<input>", higher_order: bool | None = None, interface=None, fuel=DEFAULT_FUEL):
    from .lexer import annotations

    ann = annotations(src)
    ho = ("ho" in ann) if higher_order is None else higher_order
    ep = elaborate(parse_program(src), interface=interface, higher_order=ho, fuel=fuel, name=name)
    ep.annotations = ann
    return ep
