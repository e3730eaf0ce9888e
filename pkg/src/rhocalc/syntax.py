"""Concrete syntax: lexer, parser and printer.

Grammar sketch::

    file  := stmt (';' stmt)* [';']
    stmt  := 'sig' decl (',' decl)*          decl := name '/' arity
           | 'type' name ':' [type ('*' type)* '-o'] type
           | 'var' name ':' type
           | term
    term  := atom ['->' term]                right-associative
    atom  := '[' term ']' '(' term ')' | '{' terms '}' | '<' terms '>'
           | '<<' terms '>>' | '(' term ')' | keyword ... | name ['(' terms ')']
           | name ':' type                   typed binder / variable

Identifiers declared in a signature are function symbols; everything else
is a variable.  Without any signature, call syntax marks a symbol, bare
names starting with u..z are variables, other bare names are constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from .terms import (Term, Var, Fun, Set, Rule, App, First, Choice, Dc,
                    UChoice, Signature, free_vars, VAR, FUN, SET, RULE, APP,
                    FIRST, CHOICE, DC, UCHOICE, PHI, PSI)
from .stypes import Atom, Arrow
from .subst import Fresh, RESERVED_PREFIX

KEYWORDS = {"id", "fail", "try", "first", "dc", "phi", "psi", "theta",
            "bottomup", "topdown", "oncebu", "oncetd", "repeat*", "im", "om",
            "seq", "sig", "type", "var"}


class ParseError(Exception):
    def __init__(self, msg, line=0, col=0):
        super().__init__("line %d, col %d: %s" % (line, col, msg))
        self.msg = msg
        self.line = line
        self.col = col


_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<lolli>-o\b)
  | (?P<ident>repeat\*|[A-Za-z0-9_][A-Za-z0-9_']*)
  | (?P<punct>[\[\](){}<>,;:/*])
""", re.X)


@dataclass
class Tok:
    kind: str
    text: str
    pos: int
    line: int
    col: int


def tokenize(text):
    out = []
    i, line, lstart = 0, 1, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError("unexpected character %r" % text[i], line, i - lstart + 1)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            out.append(Tok(kind if kind != "punct" else s, s, i, line, i - lstart + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            lstart = i + s.rfind("\n") + 1
        i = m.end()
    out.append(Tok("eof", "", i, line, i - lstart + 1))
    return out


@dataclass
class SourceFile:
    sig: Signature
    terms: list = field(default_factory=list)
    var_types: dict = field(default_factory=dict)   # free variable typing
    free_annotations: dict = field(default_factory=dict)


class Parser:
    def __init__(self, text, sig=None, allow_reserved=False,
                 expand_traverse=False, fresh=None):
        self.toks = tokenize(text)
        self.i = 0
        self.closed = sig is not None
        self.sig = sig if sig is not None else Signature()
        self.allow_reserved = allow_reserved
        self.expand_traverse = expand_traverse
        self.fresh = fresh or Fresh("_k")
        self.var_types = {}
        self.annotations = {}

    # -- token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def eat(self, kind):
        t = self.tok
        if t.kind != kind:
            self.error("expected %r, found %r" % (kind, t.text or "end of input"))
        self.i += 1
        return t

    def at(self, kind):
        return self.tok.kind == kind

    def adjacent(self, kind):
        """Next token is `kind` and touches the current one."""
        a, b = self.tok, self.peek()
        return b.kind == kind and b.pos == a.pos + len(a.text)

    # -- file level
    def parse_file(self):
        src = SourceFile(self.sig)
        while not self.at("eof"):
            if self.at(";"):
                self.i += 1
                continue
            t = self.tok
            if t.kind == "ident" and t.text == "sig" and self.peek().kind == "ident":
                self.parse_sig()
            elif t.kind == "ident" and t.text == "type" and self.peek(2).kind == ":":
                self.parse_profile()
            elif t.kind == "ident" and t.text == "var" and self.peek(2).kind == ":":
                self.i += 1
                name = self.eat("ident").text
                self.eat(":")
                self.var_types[name] = self.parse_type()
            else:
                self.annotations = {}
                src.terms.append(self.parse_term())
                src.free_annotations.update(self.annotations)
            if not self.at("eof"):
                self.eat(";")
        src.var_types = dict(self.var_types)
        return src

    def parse_sig(self):
        self.eat("ident")
        self.closed = True
        while True:
            t = self.eat("ident")
            self.check_name(t)
            self.eat("/")
            n = self.eat("ident")
            if not n.text.isdigit():
                self.error("arity must be a number", n)
            try:
                self.sig.declare(t.text, int(n.text))
            except ValueError as e:
                self.error(str(e), t)
            if not self.at(","):
                break
            self.i += 1

    def parse_profile(self):
        self.eat("ident")
        t = self.eat("ident")
        self.eat(":")
        tys = [self.parse_type_atom()]
        while self.at("*"):
            self.i += 1
            tys.append(self.parse_type_atom())
        if self.at("lolli"):
            self.i += 1
            res = self.parse_type()
            argtys = tys
        else:
            if len(tys) != 1:
                self.error("profile with several arguments needs -o result")
            res, argtys = tys[0], []
        try:
            self.sig.add_profile(t.text, argtys, res)
        except ValueError as e:
            self.error(str(e), t)
        self.closed = True

    # -- types
    def parse_type(self):
        a = self.parse_type_atom()
        if self.at("lolli"):
            self.i += 1
            return Arrow(a, self.parse_type())
        return a

    def parse_type_atom(self):
        if self.at("("):
            self.i += 1
            ty = self.parse_type()
            self.eat(")")
            return ty
        t = self.eat("ident")
        return Atom(t.text)

    # -- names
    def check_name(self, t):
        if t.text.startswith(RESERVED_PREFIX) and not self.allow_reserved:
            self.error("identifier %r uses the reserved prefix %r"
                       % (t.text, RESERVED_PREFIX), t)

    def is_symbol(self, name, called):
        if name in self.sig.symbols:
            return True
        if self.closed:
            return False
        if called:
            return True
        return not (name[0] in "uvwxyz" or name.startswith(RESERVED_PREFIX))

    # -- terms
    def parse_term(self):
        saved = self.annotations
        self.annotations = {}
        left = self.parse_atom()
        lhs_ann = self.annotations
        if self.at("arrow"):
            self.i += 1
            self.annotations = {}
            right = self.parse_term()
            rhs_ann = self.annotations
            bound = free_vars(left)
            ctx = {n: ty for n, ty in lhs_ann.items() if n in bound} or None
            outer = dict(saved)
            for n, ty in list(lhs_ann.items()) + list(rhs_ann.items()):
                if n not in bound:
                    self.merge_ann(outer, n, ty)
            self.annotations = outer
            return Rule(left, right, ctx)
        for n, ty in lhs_ann.items():
            self.merge_ann(saved, n, ty)
        self.annotations = saved
        return left

    def merge_ann(self, d, n, ty):
        if n in d and d[n] != ty:
            self.error("variable %s annotated with two types (%s, %s)"
                       % (n, d[n], ty))
        d[n] = ty

    def parse_list(self, close):
        items = []
        if self.at(close):
            return items
        while True:
            items.append(self.parse_term())
            if not self.at(","):
                return items
            self.i += 1

    def parse_atom(self):
        t = self.tok
        k = t.kind
        if k == "[":
            self.i += 1
            f = self.parse_term()
            self.eat("]")
            self.eat("(")
            a = self.parse_term()
            self.eat(")")
            return App(f, a)
        if k == "{":
            self.i += 1
            items = self.parse_list("}")
            self.eat("}")
            return Set(items)
        if k == "(":
            self.i += 1
            x = self.parse_term()
            self.eat(")")
            return x
        if k == "<":
            if self.adjacent("<"):
                self.i += 2
                items = self.parse_list(">")
                if not (self.at(">") and self.adjacent(">")):
                    self.error("expected '>>'")
                self.i += 2
                return UChoice(items)
            self.i += 1
            items = self.parse_list(">")
            self.eat(">")
            return Choice(items)
        if k == "ident":
            return self.parse_ident()
        self.error("unexpected %r" % (t.text or "end of input"))

    def parse_ident(self):
        t = self.eat("ident")
        name = t.text
        called = self.at("(")
        if name in KEYWORDS and name not in self.sig.symbols:
            return self.parse_keyword(t, called)
        self.check_name(t)
        if self.is_symbol(name, called):
            args = []
            if called:
                self.i += 1
                args = self.parse_list(")")
                self.eat(")")
            known = self.sig.arity(name)
            if known is None:
                self.sig.declare(name, len(args))
            elif known != len(args):
                self.error("arity mismatch for %s: expected %d, got %d"
                           % (name, known, len(args)), t)
            return Fun(name, args)
        if called:
            self.error("%s is a variable and cannot take arguments" % name, t)
        if self.at(":"):
            self.i += 1
            ty = self.parse_type()
            self.merge_ann(self.annotations, name, ty)
        return Var(name)

    def parse_keyword(self, t, called):
        from . import combinators as C
        name = t.text
        args = []
        if called:
            self.i += 1
            args = self.parse_list(")")
            self.eat(")")
        nullary = {"id", "fail", "theta"}
        if name in nullary:
            if called:
                self.error("%s takes no arguments" % name, t)
        elif name in ("first", "dc"):
            if not args:
                self.error("%s needs at least one argument" % name, t)
        elif name == "seq":
            if len(args) != 2:
                self.error("seq takes two arguments", t)
        elif name in ("sig", "type", "var"):
            self.error("%s is reserved" % name, t)
        elif len(args) != 1:
            self.error("%s takes one argument" % name, t)
        fr = self.fresh
        if name == "id":
            return C.make_basic("Id", fr)
        if name == "fail":
            return C.make_basic("Fail", fr)
        if name == "theta":
            return C.make_fixpoint(fr)
        if name == "first":
            return First(args)
        if name == "dc":
            return Dc(args)
        if name == "seq":
            return C.make_seq(args[0], args[1], fr)
        if name == "try":
            return C.make_try(args[0], fr)
        if name in ("phi", "psi"):
            kind = "Phi" if name == "phi" else "Psi"
            if self.expand_traverse:
                return C.make_traverse(kind, args[0], self.sig, expand=True, fresh=fr)
            return C.make_traverse(kind, args[0])
        table = {"bottomup": "BottomUp", "topdown": "TopDown",
                 "oncebu": "OnceBu", "oncetd": "OnceTd",
                 "repeat*": "RepeatStar"}
        if name in table:
            return C.make_recursor(table[name], args[0], fr,
                                   sig=self.sig if self.expand_traverse else None)
        if name in ("im", "om"):
            return C.make_normalizer("Im" if name == "im" else "Om", args[0], fr,
                                     sig=self.sig if self.expand_traverse else None)
        self.error("unknown keyword %s" % name, t)


def parse(text, sig=None, allow_reserved=False, expand_traverse=False):
    """Parse a whole source file."""
    p = Parser(text, sig, allow_reserved, expand_traverse)
    return p.parse_file()


def parse_term(text, sig=None, allow_reserved=False, expand_traverse=False):
    p = Parser(text, sig, allow_reserved, expand_traverse)
    t = p.parse_term()
    if not p.at("eof"):
        p.error("trailing input %r" % p.tok.text)
    return t


def parse_type(text):
    p = Parser(text)
    ty = p.parse_type()
    if not p.at("eof"):
        p.error("trailing input")
    return ty


# ---------------------------------------------------------------------------
# printing

def show_type(ty):
    return str(ty)


def _ann_type(ty):
    s = str(ty)
    return "(" + s + ")" if isinstance(ty, Arrow) else s


def show(t: Term, ann=None) -> str:
    parts = []
    _show(t, parts, ann)
    return "".join(parts)


def _join(items, out, ann):
    for i, x in enumerate(items):
        if i:
            out.append(", ")
        _show(x, out, ann)


def _show(t, out, ann):
    tag = t.tag
    if tag == VAR:
        out.append(t.name)
        if ann and t.name in ann:
            out.append(":" + _ann_type(ann.pop(t.name)))
    elif tag == FUN:
        out.append(t.sym)
        if t.args:
            out.append("(")
            _join(t.args, out, ann)
            out.append(")")
    elif tag == SET:
        out.append("{")
        _join(t.elems, out, ann)
        out.append("}")
    elif tag == RULE:
        lann = dict(t.ctx) if t.ctx else None
        if t.lhs.tag == RULE:
            out.append("(")
            _show(t.lhs, out, lann)
            out.append(")")
        else:
            _show(t.lhs, out, lann)
        out.append(" -> ")
        _show(t.rhs, out, ann)
    elif tag == APP:
        out.append("[")
        _show(t.fun, out, ann)
        out.append("](")
        _show(t.arg, out, ann)
        out.append(")")
    elif tag in (FIRST, DC):
        out.append("first(" if tag == FIRST else "dc(")
        _join(t.args, out, ann)
        out.append(")")
    elif tag in (CHOICE, UCHOICE):
        o, c = ("<", ">") if tag == CHOICE else ("<<", ">>")
        inner = []
        _join(t.args, inner, ann)
        s = "".join(inner)
        if s.startswith("<"):
            s = " " + s
        if s.endswith(">"):
            s = s + " "
        out.append(o + s + c)
    elif tag in (PHI, PSI):
        out.append("phi(" if tag == PHI else "psi(")
        _show(t.arg, out, ann)
        out.append(")")
    else:
        raise TypeError("not a term: %r" % (t,))
