"""Object-language types and the datatype registry."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import LangError


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class TNamed(Type):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TAbstract(Type):
    def __str__(self):
        return "t"


@dataclass(frozen=True)
class TProd(Type):
    left: Type
    right: Type

    def __str__(self):
        left = f"({self.left})" if isinstance(self.left, (TProd, TArrow)) else str(self.left)
        right = f"({self.right})" if isinstance(self.right, TArrow) else str(self.right)
        return f"{left} * {right}"


@dataclass(frozen=True)
class TArrow(Type):
    dom: Type
    cod: Type

    def __str__(self):
        dom = f"({self.dom})" if isinstance(self.dom, TArrow) else str(self.dom)
        return f"{dom} -> {self.cod}"


BOOL = TNamed("bool")
NAT = TNamed("nat")
ALPHA = TAbstract()


def arrow(*types: Type) -> Type:
    """arrow(a, b, c) == a -> b -> c"""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = TArrow(t, result)
    return result


def substitute_abstract(t: Type, concrete: Type) -> Type:
    if isinstance(t, TAbstract):
        return concrete
    if isinstance(t, TProd):
        return TProd(substitute_abstract(t.left, concrete), substitute_abstract(t.right, concrete))
    if isinstance(t, TArrow):
        return TArrow(substitute_abstract(t.dom, concrete), substitute_abstract(t.cod, concrete))
    return t


def contains_abstract(t: Type) -> bool:
    if isinstance(t, TAbstract):
        return True
    if isinstance(t, TProd):
        return contains_abstract(t.left) or contains_abstract(t.right)
    if isinstance(t, TArrow):
        return contains_abstract(t.dom) or contains_abstract(t.cod)
    return False


def is_arrow_free(t: Type) -> bool:
    if isinstance(t, TArrow):
        return False
    if isinstance(t, TProd):
        return is_arrow_free(t.left) and is_arrow_free(t.right)
    return True


def uncurry(t: Type) -> tuple[list[Type], Type]:
    args = []
    while isinstance(t, TArrow):
        args.append(t.dom)
        t = t.cod
    return args, t


def has_positive_abstract(t: Type, positive: bool = True) -> bool:
    """True if some occurrence of the abstract type flows out of a value of type t."""
    if isinstance(t, TAbstract):
        return positive
    if isinstance(t, TProd):
        return has_positive_abstract(t.left, positive) or has_positive_abstract(t.right, positive)
    if isinstance(t, TArrow):
        return has_positive_abstract(t.dom, not positive) or has_positive_abstract(t.cod, positive)
    return False


def is_first_order_interface(t: Type) -> bool:
    """The 1-type grammar: tau ::= sigma | sigma -> tau | tau * tau, sigma arrow-free."""
    if isinstance(t, TArrow):
        return is_arrow_free(t.dom) and is_first_order_interface(t.cod)
    if isinstance(t, TProd):
        return is_first_order_interface(t.left) and is_first_order_interface(t.right)
    return True


@dataclass(frozen=True)
class Constructor:
    name: str
    fields: tuple[Type, ...]
    adt: str
    index: int

    @property
    def arity(self):
        return len(self.fields)


@dataclass
class ADT:
    name: str
    ctors: tuple[Constructor, ...] = ()
    builtin: bool = False


class DatatypeError(LangError):
    pass


@dataclass
class Datatypes:
    """Registry of algebraic datatypes; bool and nat are always present."""

    adts: dict[str, ADT] = field(default_factory=dict)
    ctors: dict[str, Constructor] = field(default_factory=dict)

    def __post_init__(self):
        if "bool" not in self.adts:
            self.declare("bool", [("False", ()), ("True", ())], builtin=True)
        if "nat" not in self.adts:
            self.declare("nat", [("Z", ()), ("S", (NAT,))], builtin=True)

    def declare(self, name, ctors, builtin=False, span=None) -> ADT:
        if name in self.adts or name == "t":
            raise DatatypeError(f"duplicate type `{name}`", span)
        adt = ADT(name, builtin=builtin)
        built = []
        for i, (cname, fields) in enumerate(ctors):
            if cname in self.ctors or any(c.name == cname for c in built):
                raise DatatypeError(f"duplicate constructor `{cname}`", span)
            built.append(Constructor(cname, tuple(fields), name, i))
        adt.ctors = tuple(built)
        self.adts[name] = adt
        for c in built:
            self.ctors[c.name] = c
        for c in built:
            for f in c.fields:
                self.check_type(f, span=span)
        return adt

    def check_type(self, t: Type, allow_abstract=False, span=None):
        if isinstance(t, TNamed):
            if t.name not in self.adts:
                raise DatatypeError(f"unknown type `{t.name}`", span)
        elif isinstance(t, TAbstract):
            if not allow_abstract:
                raise DatatypeError("abstract type `t` is not allowed here", span)
        elif isinstance(t, TProd):
            self.check_type(t.left, allow_abstract, span)
            self.check_type(t.right, allow_abstract, span)
        elif isinstance(t, TArrow):
            self.check_type(t.dom, allow_abstract, span)
            self.check_type(t.cod, allow_abstract, span)

    def adt(self, name) -> ADT:
        return self.adts[name]

    def ctor(self, name) -> Constructor:
        return self.ctors[name]

    def user_adts(self):
        return [a for a in self.adts.values() if not a.builtin]

    def is_recursive_field(self, adt_name: str, t: Type) -> bool:
        return isinstance(t, TNamed) and t.name == adt_name
