"""Simple types: atoms and right-associative arrows."""


class Type:
    __slots__ = ()

    def is_arrow(self):
        return isinstance(self, Arrow)


class Atom(Type):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __eq__(self, other):
        return isinstance(other, Atom) and other.name == self.name

    def __hash__(self):
        return hash(("atom", self.name))

    def __repr__(self):
        return "Atom(%r)" % self.name

    def __str__(self):
        return self.name


class Arrow(Type):
    __slots__ = ("dom", "cod", "_h")

    def __init__(self, dom: Type, cod: Type):
        self.dom = dom
        self.cod = cod
        self._h = hash(("arrow", dom, cod))

    def __eq__(self, other):
        return (isinstance(other, Arrow) and self._h == other._h
                and self.dom == other.dom and self.cod == other.cod)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return "Arrow(%r, %r)" % (self.dom, self.cod)

    def __str__(self):
        d = str(self.dom)
        if isinstance(self.dom, Arrow):
            d = "(" + d + ")"
        return d + " -o " + str(self.cod)


def arrows(*ts):
    """arrows(A, B, C) is A -o (B -o C)."""
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Arrow(t, out)
    return out


def type_size(t):
    if isinstance(t, Arrow):
        return 1 + type_size(t.dom) + type_size(t.cod)
    return 1
