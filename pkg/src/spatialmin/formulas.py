"""Spatial formulas: AST, concrete syntax, and the desugaring pass.

Concrete syntax (EBNF)::

    formula  := or ;
    or       := and ("|" and)* ;
    and      := not ("&" not)* ;
    not      := "!" not | atomexpr ;
    atomexpr := "true" | "false" | IDENT | STRING
              | fn "(" formula ("," formula)? ")" | "(" formula ")" ;
    fn       := "reachFwd" | "reachBwd" | "near" | "surrounded" | "propagate" ;

``near`` takes one argument, the other operators take two.  Atoms are
bare identifiers or double-quoted strings (the quoted form admits colour
atoms such as ``"#ff0000"``).  Precedence: ``!`` binds tighter than
``&``, which binds tighter than ``|``.

``&`` chains parse to a single n-ary conjunction node; an empty
conjunction is the same as ``true``.  ``near``, ``surrounded`` and
``propagate`` are derived operators: :func:`desugar` rewrites them into
the reachability core

    near(f)            ->  reachBwd(f, false)
    surrounded(f, g)   ->  f & !reachFwd(!(f | g), !g)
    propagate(f, g)    ->  g & reachBwd(f, g)

Formulas are immutable; large machine-generated formulas are shared
DAGs, so every traversal here memoizes on node identity.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "Formula", "Atom", "TrueF", "FalseF", "Not", "Or", "And",
    "ReachFwd", "ReachBwd", "Near", "Surrounded", "Propagate",
    "TRUE", "FALSE", "conjunction",
    "SourceSpan", "FormulaSyntaxError",
    "parse", "format_formula", "desugar",
    "is_sublogic_minus", "is_iml_formula", "formula_atoms",
]


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {format_formula(self)!r}>"


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str


@dataclass(frozen=True, repr=False)
class TrueF(Formula):
    pass


@dataclass(frozen=True, repr=False)
class FalseF(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Not(Formula):
    child: Formula


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    children: tuple = ()


@dataclass(frozen=True, repr=False)
class ReachFwd(Formula):
    target: Formula
    via: Formula


@dataclass(frozen=True, repr=False)
class ReachBwd(Formula):
    source: Formula
    via: Formula


@dataclass(frozen=True, repr=False)
class Near(Formula):
    child: Formula


@dataclass(frozen=True, repr=False)
class Surrounded(Formula):
    inner: Formula
    border: Formula


@dataclass(frozen=True, repr=False)
class Propagate(Formula):
    seed: Formula
    medium: Formula


TRUE = TrueF()
FALSE = FalseF()


def conjunction(parts) -> Formula:
    """N-ary conjunction, collapsing the 0- and 1-element cases."""
    parts = tuple(parts)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(parts)


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets of a token or error region in parsed text."""

    start: int
    end: int


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} (at {span.start}..{span.end})")
        self.span = span


_FUNCTIONS = {"reachFwd": 2, "reachBwd": 2, "near": 1, "surrounded": 2, "propagate": 2}
_KEYWORDS = {"true", "false"} | set(_FUNCTIONS)


# -- lexer ----------------------------------------------------------------

_PUNCT = {"!", "&", "|", "(", ")", ","}


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _PUNCT:
            tokens.append((c, c, SourceSpan(i, i + 1)))
            i += 1
            continue
        if c == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise FormulaSyntaxError("unterminated string", SourceSpan(i, n))
            tokens.append(("STRING", "".join(buf), SourceSpan(i, j + 1)))
            i = j + 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("IDENT", text[i:j], SourceSpan(i, j)))
            i = j
            continue
        raise FormulaSyntaxError(f"unexpected character {c!r}", SourceSpan(i, i + 1))
    tokens.append(("EOF", "", SourceSpan(n, n)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            raise FormulaSyntaxError(
                f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2]
            )
        return self.advance()

    def parse(self) -> Formula:
        f = self.or_expr()
        tok = self.peek()
        if tok[0] != "EOF":
            raise FormulaSyntaxError(f"unexpected trailing input {tok[1]!r}", tok[2])
        return f

    def or_expr(self) -> Formula:
        f = self.and_expr()
        while self.peek()[0] == "|":
            self.advance()
            f = Or(f, self.and_expr())
        return f

    def and_expr(self) -> Formula:
        parts = [self.not_expr()]
        while self.peek()[0] == "&":
            self.advance()
            parts.append(self.not_expr())
        if len(parts) == 1:
            return parts[0]
        return And(tuple(parts))

    def not_expr(self) -> Formula:
        if self.peek()[0] == "!":
            self.advance()
            return Not(self.not_expr())
        return self.atom_expr()

    def atom_expr(self) -> Formula:
        kind, value, span = self.advance()
        if kind == "(":
            f = self.or_expr()
            self.expect(")")
            return f
        if kind == "STRING":
            return Atom(value)
        if kind == "IDENT":
            if value == "true":
                return TrueF()
            if value == "false":
                return FalseF()
            if self.peek()[0] == "(":
                if value not in _FUNCTIONS:
                    raise FormulaSyntaxError(f"unknown operator {value!r}", span)
                self.advance()
                args = [self.or_expr()]
                while self.peek()[0] == ",":
                    self.advance()
                    args.append(self.or_expr())
                self.expect(")")
                arity = _FUNCTIONS[value]
                if len(args) != arity:
                    raise FormulaSyntaxError(
                        f"{value} takes {arity} argument{'s' if arity > 1 else ''},"
                        f" got {len(args)}", span
                    )
                return _FUNCTION_NODES[value](*args)
            if value in _FUNCTIONS:
                raise FormulaSyntaxError(f"expected '(' after {value!r}", span)
            return Atom(value)
        raise FormulaSyntaxError(f"expected a formula, found {value or 'end of input'!r}", span)


_FUNCTION_NODES = {
    "reachFwd": ReachFwd,
    "reachBwd": ReachBwd,
    "near": Near,
    "surrounded": Surrounded,
    "propagate": Propagate,
}


def parse(text: str) -> Formula:
    """Parse concrete syntax into a formula AST."""
    return _Parser(text).parse()


# -- printer --------------------------------------------------------------

_IDENT_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


def _atom_text(name: str) -> str:
    if (
        name
        and name not in _KEYWORDS
        and not name[0].isdigit()
        and all(ch in _IDENT_OK for ch in name)
    ):
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


# precedence levels: or=1, and=2, not=3, atoms/functions=4
def _fmt(f: Formula, memo: dict) -> tuple[str, int]:
    key = id(f)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(f, Atom):
        out = (_atom_text(f.name), 4)
    elif isinstance(f, TrueF):
        out = ("true", 4)
    elif isinstance(f, FalseF):
        out = ("false", 4)
    elif isinstance(f, Not):
        body, prec = _fmt(f.child, memo)
        if prec < 3:
            body = f"({body})"
        out = (f"!{body}", 3)
    elif isinstance(f, And):
        if not f.children:
            out = ("true", 4)
        else:
            parts = []
            for c in f.children:
                body, prec = _fmt(c, memo)
                parts.append(f"({body})" if prec < 3 else body)
            out = (" & ".join(parts), 2 if len(parts) > 1 else _fmt(f.children[0], memo)[1])
    elif isinstance(f, Or):
        lbody, lprec = _fmt(f.left, memo)
        rbody, rprec = _fmt(f.right, memo)
        if lprec < 1:
            lbody = f"({lbody})"
        if rprec <= 1:
            rbody = f"({rbody})"
        out = (f"{lbody} | {rbody}", 1)
    else:
        for cls, name in (
            (ReachFwd, "reachFwd"), (ReachBwd, "reachBwd"), (Near, "near"),
            (Surrounded, "surrounded"), (Propagate, "propagate"),
        ):
            if isinstance(f, cls):
                args = [getattr(f, fld.name) for fld in f.__dataclass_fields__.values()]
                inner = ", ".join(_fmt(a, memo)[0] for a in args)
                out = (f"{name}({inner})", 4)
                break
        else:
            raise TypeError(f"not a formula node: {f!r}")
    memo[key] = out
    return out


def format_formula(f: Formula) -> str:
    """Concrete syntax for a formula; ``parse`` inverts it."""
    return _fmt(f, {})[0]


# -- desugaring -----------------------------------------------------------

def desugar(f: Formula) -> Formula:
    """Rewrite derived operators into the reachability core.

    The result contains only atoms, constants, boolean connectives and
    the two reachability operators.  Idempotent.
    """
    memo: dict = {}

    def go(node: Formula) -> Formula:
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, (Atom, TrueF, FalseF)):
            out = node
        elif isinstance(node, Not):
            c = go(node.child)
            out = node if c is node.child else Not(c)
        elif isinstance(node, Or):
            l, r = go(node.left), go(node.right)
            out = node if (l is node.left and r is node.right) else Or(l, r)
        elif isinstance(node, And):
            kids = tuple(go(c) for c in node.children)
            out = node if all(a is b for a, b in zip(kids, node.children)) else And(kids)
        elif isinstance(node, ReachFwd):
            t, v = go(node.target), go(node.via)
            out = node if (t is node.target and v is node.via) else ReachFwd(t, v)
        elif isinstance(node, ReachBwd):
            s, v = go(node.source), go(node.via)
            out = node if (s is node.source and v is node.via) else ReachBwd(s, v)
        elif isinstance(node, Near):
            out = ReachBwd(go(node.child), FALSE)
        elif isinstance(node, Surrounded):
            f1, f2 = go(node.inner), go(node.border)
            out = And((f1, Not(ReachFwd(Not(Or(f1, f2)), Not(f2)))))
        elif isinstance(node, Propagate):
            f1, f2 = go(node.seed), go(node.medium)
            out = And((f2, ReachBwd(f1, f2)))
        else:
            raise TypeError(f"not a formula node: {node!r}")
        memo[key] = out
        return out

    return go(f)


# -- fragments ------------------------------------------------------------

def is_sublogic_minus(f: Formula) -> bool:
    """Whether a desugared formula stays in the one-step reachability
    sublogic: both reachability operators only ever take ``false`` as
    their second argument."""
    seen: set = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, (Near, Surrounded, Propagate)):
            return False
        if isinstance(node, (ReachFwd, ReachBwd)):
            second = node.via
            if not isinstance(second, FalseF):
                return False
            stack.append(node.target if isinstance(node, ReachFwd) else node.source)
        elif isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, Or):
            stack.extend((node.left, node.right))
        elif isinstance(node, And):
            stack.extend(node.children)
        elif not isinstance(node, (Atom, TrueF, FalseF)):
            raise TypeError(f"not a formula node: {node!r}")
    return True


def is_iml_formula(f: Formula) -> bool:
    """Whether a formula stays in the modal fragment: atoms, boolean
    connectives, finite conjunction and a primitive ``near`` only.

    Reachability operators (and the derived operators that expand into
    them) are rejected.  ``true``/``false``/``|`` are admitted since the
    fragment's negation and conjunction define them.
    """
    seen: set = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, (ReachFwd, ReachBwd, Surrounded, Propagate)):
            return False
        if isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, Near):
            stack.append(node.child)
        elif isinstance(node, Or):
            stack.extend((node.left, node.right))
        elif isinstance(node, And):
            stack.extend(node.children)
        elif not isinstance(node, (Atom, TrueF, FalseF)):
            raise TypeError(f"not a formula node: {node!r}")
    return True


def formula_atoms(f: Formula) -> frozenset:
    """All atom names occurring in a formula."""
    seen: set = set()
    out: set = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Atom):
            out.add(node.name)
        elif isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, Near):
            stack.append(node.child)
        elif isinstance(node, Or):
            stack.extend((node.left, node.right))
        elif isinstance(node, And):
            stack.extend(node.children)
        elif isinstance(node, ReachFwd):
            stack.extend((node.target, node.via))
        elif isinstance(node, ReachBwd):
            stack.extend((node.source, node.via))
        elif isinstance(node, Surrounded):
            stack.extend((node.inner, node.border))
        elif isinstance(node, Propagate):
            stack.extend((node.seed, node.medium))
    return frozenset(out)
