"""Recursive-descent parser for benchmark files.

Grammar sketch (see README for the full version)::

    program  ::= item* sig module spec
    item     ::= type NAME [= ctor ('|' ctor)*]
               | let [rec] NAME param* : ty = expr
               | module type NAME = sig [type t] (val NAME : ty)* end
    module   ::= module NAME [: NAME] = struct type t = ty (let ...)* end
    spec     ::= spec forall param+ . expr
"""
from __future__ import annotations

from ..lang.errors import Span
from ..lang.syntax import (
    App,
    Ctor,
    Eq,
    Expr,
    Fun,
    FunDecl,
    Let,
    LetRec,
    Match,
    ModuleDecl,
    PAny,
    PCtor,
    Pair,
    PPair,
    Program,
    Proj,
    SigDecl,
    SpecDecl,
    TypeDecl,
    Var,
    and_,
    if_,
    implies_,
    nat_lit,
    not_,
    or_,
)
from ..lang.types import ALPHA, TArrow, TNamed, TProd, Type
from .diagnostics import DiagnosticError
from .lexer import Token, tokenize

BUILTIN_ARITY = {"True": 0, "False": 0, "Z": 0, "S": 1}


def _join(a: Span, b: Span) -> Span:
    return Span(a.line, a.col, b.end_line, b.end_col)


class Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.pos = 0
        self.arity = dict(BUILTIN_ARITY)

    # ------------------------------------------------------------ token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def at_kw(self, text):
        return self.at("kw", text)

    def at_op(self, text):
        return self.at("op", text)

    def next(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message, tok: Token | None = None, hint=None):
        tok = tok or self.tok
        return DiagnosticError.single(message, tok.span, hint)

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            want = text or kind
            got = self.tok.text or "end of input"
            raise self.error(f"expected `{want}`, found `{got}`")
        return self.next()

    def expect_kw(self, text):
        return self.expect("kw", text)

    def expect_op(self, text):
        return self.expect("op", text)

    def lident(self) -> Token:
        if not self.at("lident"):
            raise self.error(f"expected a name, found `{self.tok.text or 'end of input'}`")
        return self.next()

    # ------------------------------------------------------------ program

    def program(self) -> Program:
        types, prelude, sigs, order = [], [], [], []
        module = spec = None
        while not self.at("eof"):
            if self.at_kw("type"):
                d = self.type_decl()
                types.append(d)
                order.append(d.name)
            elif self.at_kw("let"):
                if module is not None:
                    raise self.error("definitions after the module block are not allowed")
                d = self.fun_decl()
                prelude.append(d)
                order.append(d.name)
            elif self.at_kw("module") and self.peek().kind == "kw" and self.peek().text == "type":
                d = self.sig_decl()
                sigs.append(d)
                order.append(d.name)
            elif self.at_kw("module"):
                if module is not None:
                    raise self.error("only one module block is allowed per file")
                module = self.module_decl()
            elif self.at_kw("spec"):
                if module is None:
                    raise self.error("missing module block", hint="declare `module M = struct ... end` before the spec")
                spec = self.spec_decl()
                if not self.at("eof"):
                    raise self.error("the spec block must be the last item in the file")
            else:
                raise self.error(f"unexpected `{self.tok.text}` at top level")
        if module is None:
            raise self.error("missing module block")
        if spec is None:
            raise self.error("missing spec block")
        return Program(tuple(types), tuple(prelude), tuple(sigs), module, spec, tuple(order))

    def type_decl(self) -> TypeDecl:
        start = self.expect_kw("type")
        name = self.lident()
        if name.text == "t":
            raise self.error("`t` is reserved for the abstract type", name)
        ctors = []
        if self.at_op("="):
            self.next()
            if self.at_op("|"):
                self.next()
            while True:
                c = self.expect("uident")
                fields: list[Type] = []
                if self.at_kw("of"):
                    self.next()
                    fields.append(self.ty_atom())
                    while self.at_op("*"):
                        self.next()
                        fields.append(self.ty_atom())
                if c.text in self.arity:
                    raise self.error(f"duplicate constructor `{c.text}`", c)
                self.arity[c.text] = len(fields)
                ctors.append((c.text, tuple(fields)))
                if not self.at_op("|"):
                    break
                self.next()
        return TypeDecl(name.text, tuple(ctors), _join(start.span, self.toks[self.pos - 1].span))

    def params(self) -> list[tuple[str, Type]]:
        out = []
        while self.at_op("(") and self.peek().kind == "lident":
            self.next()
            n = self.lident()
            self.expect_op(":")
            t = self.ty()
            self.expect_op(")")
            out.append((n.text, t))
        return out

    def fun_decl(self) -> FunDecl:
        start = self.expect_kw("let")
        rec = False
        if self.at_kw("rec"):
            self.next()
            rec = True
        name = self.lident()
        params = self.params()
        if not self.at_op(":"):
            raise self.error(
                f"top-level definition `{name.text}` needs a return type annotation", hint="write `let f (x : T) : R = ...`"
            )
        self.next()
        ret = self.ty()
        self.expect_op("=")
        body = self.expr()
        if rec and not params:
            raise self.error("`let rec` needs at least one parameter", name)
        return FunDecl(name.text, tuple(params), ret, body, rec, _join(start.span, self.toks[self.pos - 1].span))

    def sig_decl(self) -> SigDecl:
        start = self.expect_kw("module")
        self.expect_kw("type")
        name = self.expect("uident")
        self.expect_op("=")
        self.expect_kw("sig")
        if self.at_kw("type"):
            self.next()
            t = self.lident()
            if t.text != "t":
                raise self.error("the abstract type must be named `t`", t)
        members = []
        while self.at_kw("val"):
            self.next()
            n = self.lident()
            self.expect_op(":")
            members.append((n.text, self.ty()))
        self.expect_kw("end")
        return SigDecl(name.text, tuple(members), _join(start.span, self.toks[self.pos - 1].span))

    def module_decl(self) -> ModuleDecl:
        start = self.expect_kw("module")
        name = self.expect("uident")
        sig = None
        if self.at_op(":"):
            self.next()
            sig = self.expect("uident").text
        self.expect_op("=")
        self.expect_kw("struct")
        self.expect_kw("type")
        t = self.lident()
        if t.text != "t":
            raise self.error("the module must start with `type t = ...`", t)
        self.expect_op("=")
        concrete = self.ty()
        defs = []
        while self.at_kw("let"):
            defs.append(self.fun_decl())
        self.expect_kw("end")
        return ModuleDecl(name.text, sig, concrete, tuple(defs), _join(start.span, self.toks[self.pos - 1].span))

    def spec_decl(self) -> SpecDecl:
        start = self.expect_kw("spec")
        self.expect_kw("forall")
        qs = self.params()
        if not qs:
            raise self.error("`forall` needs at least one `(name : type)` binder")
        self.expect_op(".")
        body = self.expr()
        return SpecDecl(tuple(qs), body, _join(start.span, self.toks[self.pos - 1].span))

    # ------------------------------------------------------------ types

    def ty(self) -> Type:
        left = self.ty_prod()
        if self.at_op("->"):
            self.next()
            return TArrow(left, self.ty())
        return left

    def ty_prod(self) -> Type:
        parts = [self.ty_atom()]
        while self.at_op("*"):
            self.next()
            parts.append(self.ty_atom())
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = TProd(p, out)
        return out

    def ty_atom(self) -> Type:
        if self.at_op("("):
            self.next()
            t = self.ty()
            self.expect_op(")")
            return t
        n = self.lident()
        if n.text == "t":
            return ALPHA
        return TNamed(n.text)

    # ------------------------------------------------------------ expressions

    def expr(self) -> Expr:
        t = self.tok
        if self.at_kw("fun"):
            self.next()
            params = self.params()
            if not params:
                raise self.error("`fun` needs at least one `(name : type)` parameter")
            self.expect_op("->")
            body = self.expr()
            for n, ty in reversed(params):
                body = Fun(n, ty, body, _join(t.span, self.toks[self.pos - 1].span))
            return body
        if self.at_kw("let"):
            return self.let_expr()
        if self.at_kw("if"):
            self.next()
            c = self.expr()
            self.expect_kw("then")
            a = self.expr()
            self.expect_kw("else")
            b = self.expr()
            return _with_span(if_(c, a, b), _join(t.span, self.toks[self.pos - 1].span))
        if self.at_kw("match"):
            return self.match_expr()
        return self.implies()

    def let_expr(self) -> Expr:
        start = self.expect_kw("let")
        rec = False
        if self.at_kw("rec"):
            self.next()
            rec = True
        name = self.lident()
        params = self.params()
        ret = None
        if self.at_op(":"):
            self.next()
            ret = self.ty()
        self.expect_op("=")
        bound = self.expr()
        self.expect_kw("in")
        body = self.expr()
        span = _join(start.span, self.toks[self.pos - 1].span)
        if rec:
            if not params or ret is None:
                raise self.error("`let rec` needs parameters and a return type annotation", name)
            inner = bound
            for n, ty in reversed(params[1:]):
                inner = Fun(n, ty, inner)
            fn = Fun(params[0][0], params[0][1], inner)
            ret_t = ret
            for _, ty in reversed(params[1:]):
                ret_t = TArrow(ty, ret_t)
            return LetRec(name.text, fn, ret_t, body, span)
        for n, ty in reversed(params):
            bound = Fun(n, ty, bound)
        return Let(name.text, bound, body, span)

    def match_expr(self) -> Expr:
        start = self.expect_kw("match")
        scrut = self.expr()
        self.expect_kw("with")
        if self.at_op("|"):
            self.next()
        branches = []
        while True:
            pat = self.pattern()
            self.expect_op("->")
            body = self.expr()
            branches.append((pat, body))
            if not self.at_op("|"):
                break
            self.next()
        return Match(scrut, tuple(branches), _join(start.span, self.toks[self.pos - 1].span))

    def binder(self) -> str | None:
        n = self.lident()
        return None if n.text == "_" else n.text

    def pattern(self):
        t = self.tok
        if self.at_kw("true") or self.at_kw("false"):
            self.next()
            return PCtor(t.text.capitalize())
        if t.kind == "int" and t.text == "0":
            self.next()
            return PCtor("Z")
        if t.kind == "lident":
            return PAny(self.binder())
        if self.at_op("("):
            self.next()
            left = self.binder()
            self.expect_op(",")
            right = self.binder()
            self.expect_op(")")
            return PPair(left, right)
        if t.kind == "uident":
            self.next()
            arity = self.arity.get(t.text)
            if arity is None:
                raise self.error(f"unknown constructor `{t.text}`", t)
            if arity == 0:
                return PCtor(t.text)
            if arity == 1 and self.at("lident"):
                return PCtor(t.text, (self.binder(),))
            self.expect_op("(")
            bs = [self.binder()]
            while self.at_op(","):
                self.next()
                bs.append(self.binder())
            self.expect_op(")")
            return PCtor(t.text, tuple(bs))
        raise self.error(f"expected a pattern, found `{t.text or 'end of input'}`")

    def _rhs(self, parse):
        # allow `a && if ...` style right operands without parentheses
        if self.tok.kind == "kw" and self.tok.text in ("fun", "let", "if", "match"):
            return self.expr()
        return parse()

    def implies(self) -> Expr:
        left = self.or_expr()
        if self.at_op("==>"):
            self.next()
            right = self._rhs(self.implies)
            return implies_(left, right)
        return left

    def or_expr(self) -> Expr:
        left = self.and_expr()
        if self.at_op("||"):
            self.next()
            return or_(left, self._rhs(self.or_expr))
        return left

    def and_expr(self) -> Expr:
        left = self.cmp_expr()
        if self.at_op("&&"):
            self.next()
            return and_(left, self._rhs(self.and_expr))
        return left

    def cmp_expr(self) -> Expr:
        t = self.tok
        left = self.app_expr()
        if self.at_op("="):
            self.next()
            right = self.app_expr()
            return Eq(left, right, _join(t.span, self.toks[self.pos - 1].span))
        if self.at_op("<>"):
            self.next()
            right = self.app_expr()
            return not_(Eq(left, right, _join(t.span, self.toks[self.pos - 1].span)))
        return left

    def _starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("lident", "int"):
            return True
        if t.kind == "uident":
            return True
        if t.kind == "kw" and t.text in ("true", "false"):
            return True
        return t.kind == "op" and t.text == "("

    def app_expr(self) -> Expr:
        t = self.tok
        if self.at_kw("not"):
            self.next()
            return not_(self.atom())
        if self.at_kw("fst") or self.at_kw("snd"):
            self.next()
            arg = self.atom()
            return Proj(1 if t.text == "fst" else 2, arg, _join(t.span, self.toks[self.pos - 1].span))
        if t.kind == "uident":
            return self.ctor_app()
        head = self.atom()
        while self._starts_atom():
            arg = self.atom()
            head = App(head, arg, _join(t.span, self.toks[self.pos - 1].span))
        return head

    def ctor_app(self) -> Expr:
        t = self.next()
        arity = self.arity.get(t.text)
        if arity is None:
            raise self.error(f"unknown constructor `{t.text}`", t)
        if arity == 0:
            return Ctor(t.text, (), t.span)
        if arity == 1:
            arg = self.atom()
            return Ctor(t.text, (arg,), _join(t.span, self.toks[self.pos - 1].span))
        if not self.at_op("("):
            raise self.error(f"constructor `{t.text}` takes {arity} arguments written `{t.text} (a, b, ...)`")
        self.next()
        args = [self.expr()]
        while self.at_op(","):
            self.next()
            args.append(self.expr())
        self.expect_op(")")
        if len(args) != arity:
            raise DiagnosticError.single(
                f"constructor `{t.text}` expects {arity} argument(s), got {len(args)}",
                _join(t.span, self.toks[self.pos - 1].span),
            )
        return Ctor(t.text, tuple(args), _join(t.span, self.toks[self.pos - 1].span))

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "lident":
            self.next()
            if t.text == "_":
                raise self.error("`_` is not an expression", t)
            return Var(t.text, t.span)
        if t.kind == "int":
            self.next()
            n = int(t.text)
            if n > 10_000:
                raise self.error("numeric literal too large for a Peano encoding", t)
            return _with_span(nat_lit(n), t.span)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.next()
            return Ctor(t.text.capitalize(), (), t.span)
        if t.kind == "uident":
            if self.arity.get(t.text, 0) != 0:
                raise self.error(f"constructor `{t.text}` needs arguments here; add parentheses", t)
            return self.ctor_app()
        if self.at_op("("):
            self.next()
            items = [self.expr()]
            while self.at_op(","):
                self.next()
                items.append(self.expr())
            end = self.expect_op(")")
            out = items[-1]
            for it in reversed(items[:-1]):
                out = Pair(it, out, _join(t.span, end.span))
            return out
        raise self.error(f"expected an expression, found `{t.text or 'end of input'}`")


def _with_span(e: Expr, span: Span) -> Expr:
    from dataclasses import replace

    try:
        return replace(e, span=span)
    except TypeError:
        return e


def parse_program(src: str) -> Program:
    """Parse a benchmark file. Raises ``DiagnosticError`` on malformed input."""
    return Parser(src).program()


def parse_expr(src: str, ctor_arity: dict[str, int] | None = None) -> Expr:
    p = Parser(src)
    if ctor_arity:
        p.arity.update(ctor_arity)
    e = p.expr()
    if not p.at("eof"):
        raise p.error(f"unexpected `{p.tok.text}` after expression")
    return e


def parse_type(src: str) -> Type:
    p = Parser(src)
    t = p.ty()
    if not p.at("eof"):
        raise p.error(f"unexpected `{p.tok.text}` after type")
    return t
