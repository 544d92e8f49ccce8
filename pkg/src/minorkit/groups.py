"""Group specifications, normal forms, and Cayley-ball generation.

Supported families are built recursively from

    FreeAbelian(n), Cyclic(k), Free(n), DirectProduct(a, b), FreeProduct(a, b)

Every element carries a unique normal form (a hashable nested tuple), so
the word problem is tuple equality:

    FreeAbelian(n)    integer n-vector, e.g. (1, -2)
    Cyclic(k)         residue in 0..k-1
    Free(n)           reduced letter tuple, letter i>0 = generator i,
                      i<0 = its inverse, no adjacent cancelling pair
    DirectProduct     pair (left element, right element)
    FreeProduct       tuple of (side, letter) pairs, sides 0/1 strictly
                      alternating, every letter a non-identity factor
                      element; read left to right as a product

Cayley graphs are right-invariant: u ~ v iff u = s*v for a generator s,
so the generator acts by multiplication on the left.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import CapExceeded, SpecSyntaxError
from .graphs import Graph

# -- group terms -----------------------------------------------------------


@dataclass(frozen=True)
class FreeAbelian:
    rank: int


@dataclass(frozen=True)
class Cyclic:
    order: int

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("cyclic factor needs order >= 2")


@dataclass(frozen=True)
class Free:
    rank: int


@dataclass(frozen=True)
class DirectProduct:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class FreeProduct:
    left: "Term"
    right: "Term"


Term = FreeAbelian | Cyclic | Free | DirectProduct | FreeProduct


# -- element algebra --------------------------------------------------------

def identity(term: Term):
    if isinstance(term, FreeAbelian):
        return (0,) * term.rank
    if isinstance(term, Cyclic):
        return 0
    if isinstance(term, Free):
        return ()
    if isinstance(term, DirectProduct):
        return (identity(term.left), identity(term.right))
    if isinstance(term, FreeProduct):
        return ()
    raise TypeError(f"not a group term: {term!r}")


def validate_element(term: Term, a):
    """Raise ValueError unless `a` is a normal form for `term`."""
    if isinstance(term, FreeAbelian):
        if not (isinstance(a, tuple) and len(a) == term.rank
                and all(isinstance(x, int) for x in a)):
            raise ValueError(f"bad FreeAbelian({term.rank}) element: {a!r}")
    elif isinstance(term, Cyclic):
        if not (isinstance(a, int) and 0 <= a < term.order):
            raise ValueError(f"bad Cyclic({term.order}) element: {a!r}")
    elif isinstance(term, Free):
        if not isinstance(a, tuple):
            raise ValueError(f"bad Free element: {a!r}")
        for x in a:
            if not (isinstance(x, int) and x != 0 and abs(x) <= term.rank):
                raise ValueError(f"bad Free letter {x!r} in {a!r}")
        for x, y in zip(a, a[1:]):
            if x == -y:
                raise ValueError(f"unreduced Free word: {a!r}")
    elif isinstance(term, DirectProduct):
        if not (isinstance(a, tuple) and len(a) == 2):
            raise ValueError(f"bad DirectProduct element: {a!r}")
        validate_element(term.left, a[0])
        validate_element(term.right, a[1])
    elif isinstance(term, FreeProduct):
        if not isinstance(a, tuple):
            raise ValueError(f"bad FreeProduct element: {a!r}")
        factors = (term.left, term.right)
        prev = None
        for pair in a:
            if not (isinstance(pair, tuple) and len(pair) == 2 and pair[0] in (0, 1)):
                raise ValueError(f"bad FreeProduct letter {pair!r}")
            side, letter = pair
            if side == prev:
                raise ValueError(f"non-alternating FreeProduct word: {a!r}")
            validate_element(factors[side], letter)
            if letter == identity(factors[side]):
                raise ValueError(f"identity letter in FreeProduct word: {a!r}")
            prev = side
    else:
        raise TypeError(f"not a group term: {term!r}")


def multiply(term: Term, a, b):
    """Normal form of a*b."""
    if isinstance(term, FreeAbelian):
        return tuple(x + y for x, y in zip(a, b))
    if isinstance(term, Cyclic):
        return (a + b) % term.order
    if isinstance(term, Free):
        word = list(a)
        for x in b:
            if word and word[-1] == -x:
                word.pop()
            else:
                word.append(x)
        return tuple(word)
    if isinstance(term, DirectProduct):
        return (multiply(term.left, a[0], b[0]), multiply(term.right, a[1], b[1]))
    if isinstance(term, FreeProduct):
        factors = (term.left, term.right)
        word = list(a)
        for side, letter in b:
            if word and word[-1][0] == side:
                merged = multiply(factors[side], word[-1][1], letter)
                word.pop()
                if merged != identity(factors[side]):
                    word.append((side, merged))
            else:
                word.append((side, letter))
        return tuple(word)
    raise TypeError(f"not a group term: {term!r}")


def inverse(term: Term, a):
    if isinstance(term, FreeAbelian):
        return tuple(-x for x in a)
    if isinstance(term, Cyclic):
        return (-a) % term.order
    if isinstance(term, Free):
        return tuple(-x for x in reversed(a))
    if isinstance(term, DirectProduct):
        return (inverse(term.left, a[0]), inverse(term.right, a[1]))
    if isinstance(term, FreeProduct):
        factors = (term.left, term.right)
        return tuple((side, inverse(factors[side], letter)) for side, letter in reversed(a))
    raise TypeError(f"not a group term: {term!r}")


def power(term: Term, a, n: int):
    if n < 0:
        return power(term, inverse(term, a), -n)
    acc = identity(term)
    for _ in range(n):
        acc = multiply(term, acc, a)
    return acc


# -- formatting and parsing of elements -------------------------------------

def _flat_widths(term: Term) -> list[int] | None:
    """Coordinate widths when `term` is a direct-product tree of abelian
    factors, else None.  Such elements read naturally as one flat tuple."""
    if isinstance(term, FreeAbelian):
        return [term.rank]
    if isinstance(term, Cyclic):
        return [1]
    if isinstance(term, DirectProduct):
        lt, rt = _flat_widths(term.left), _flat_widths(term.right)
        if lt is None or rt is None:
            return None
        return lt + rt
    return None


def _flatten(term: Term, a) -> list[int]:
    if isinstance(term, FreeAbelian):
        return list(a)
    if isinstance(term, Cyclic):
        return [a]
    if isinstance(term, DirectProduct):
        return _flatten(term.left, a[0]) + _flatten(term.right, a[1])
    raise TypeError("not flat")


def _unflatten(term: Term, coords: list[int]):
    if isinstance(term, FreeAbelian):
        return tuple(coords)
    if isinstance(term, Cyclic):
        return coords[0] % term.order
    if isinstance(term, DirectProduct):
        lw = sum(_flat_widths(term.left))
        return (_unflatten(term.left, coords[:lw]), _unflatten(term.right, coords[lw:]))
    raise TypeError("not flat")


def format_element(term: Term, a) -> str:
    if isinstance(term, FreeAbelian):
        return "(" + ",".join(str(x) for x in a) + ")"
    if isinstance(term, Cyclic):
        if a == 0:
            return "e"
        return "c" if a == 1 else f"c^{a}"
    if isinstance(term, Free):
        if not a:
            return "e"
        return ".".join(f"x{x}" if x > 0 else f"x{-x}^-1" for x in a)
    if isinstance(term, DirectProduct):
        if _flat_widths(term) is not None:
            return "(" + ",".join(str(x) for x in _flatten(term, a)) + ")"
        return f"({format_element(term.left, a[0])};{format_element(term.right, a[1])})"
    if isinstance(term, FreeProduct):
        if not a:
            return "e"
        parts = []
        for side, letter in a:
            sub = format_element((term.left, term.right)[side], letter)
            parts.append(("l:" if side == 0 else "r:") + sub)
        return "*".join(parts)
    raise TypeError(f"not a group term: {term!r}")


def _split_top(text: str, seps: str) -> list[str]:
    """Split at top-level separator characters (depth 0 w.r.t. parens)."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise SpecSyntaxError(f"unbalanced parentheses in {text!r}")
        if depth == 0 and ch in seps:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise SpecSyntaxError(f"unbalanced parentheses in {text!r}")
    out.append("".join(cur))
    return out


def parse_element(term: Term, text: str):
    """Parse a normal-form literal for `term` (inverse of format_element
    on the supported shapes)."""
    s = text.strip()
    try:
        if isinstance(term, FreeAbelian):
            if not (s.startswith("(") and s.endswith(")")):
                raise ValueError
            coords = [int(p) for p in s[1:-1].split(",")] if s != "()" else []
            if len(coords) != term.rank:
                raise ValueError
            return tuple(coords)
        if isinstance(term, Cyclic):
            if s == "e":
                return 0
            if s == "c":
                return 1 % term.order
            if s.startswith("c^"):
                return int(s[2:]) % term.order
            return int(s) % term.order
        if isinstance(term, Free):
            if s == "e":
                return ()
            el = ()
            for tok in s.replace("*", ".").split("."):
                tok = tok.strip()
                if tok.endswith("^-1"):
                    letter = -int(tok[1:-3])
                else:
                    letter = int(tok[1:])
                if not (tok.startswith("x") and 1 <= abs(letter) <= term.rank):
                    raise ValueError
                el = multiply(term, el, (letter,))
            return el
        if isinstance(term, DirectProduct):
            widths = _flat_widths(term)
            if widths is not None and s.startswith("(") and ";" not in s:
                coords = [int(p) for p in s[1:-1].split(",")]
                if len(coords) != sum(widths):
                    raise ValueError
                return _unflatten(term, coords)
            if not (s.startswith("(") and s.endswith(")")):
                raise ValueError
            parts = _split_top(s[1:-1], ";")
            if len(parts) != 2:
                raise ValueError
            return (parse_element(term.left, parts[0]), parse_element(term.right, parts[1]))
        if isinstance(term, FreeProduct):
            if s == "e":
                return ()
            el = ()
            for tok in _split_top(s, "*"):
                tok = tok.strip()
                if tok.startswith("l:"):
                    side, sub = 0, parse_element(term.left, tok[2:])
                elif tok.startswith("r:"):
                    side, sub = 1, parse_element(term.right, tok[2:])
                else:
                    raise ValueError
                el = multiply(term, el, ((side, sub),))
            return el
    except (ValueError, IndexError) as exc:
        raise SpecSyntaxError(f"cannot parse element {text!r} for {format_term(term)}") from exc
    raise TypeError(f"not a group term: {term!r}")


# -- group specs (term + generating set) ------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    """A group term together with a finite symmetric generating set.

    Generators exclude the identity; s in gens implies s^-1 in gens.
    """

    term: Term
    gens: tuple

    def __post_init__(self):
        e = identity(self.term)
        seen = set()
        for s in self.gens:
            validate_element(self.term, s)
            if s == e:
                raise ValueError("generating set must not contain the identity")
            if s in seen:
                raise ValueError(f"duplicate generator {s!r}")
            seen.add(s)
        for s in self.gens:
            if inverse(self.term, s) not in seen:
                raise ValueError(f"generating set not symmetric: missing inverse of {s!r}")

    def __str__(self):
        gens = ",".join(format_element(self.term, s) for s in self.gens)
        return f"{format_term(self.term)} | gens={gens}"


def standard_generators(term: Term) -> tuple:
    """The default symmetric generating set of a term (factor gens embedded
    for products)."""
    if isinstance(term, FreeAbelian):
        out = []
        for i in range(term.rank):
            v = tuple(1 if j == i else 0 for j in range(term.rank))
            out.append(v)
            out.append(tuple(-x for x in v))
        return tuple(out)
    if isinstance(term, Cyclic):
        if term.order == 2:
            return (1,)
        return (1, term.order - 1)
    if isinstance(term, Free):
        out = []
        for i in range(1, term.rank + 1):
            out.append((i,))
            out.append((-i,))
        return tuple(out)
    if isinstance(term, DirectProduct):
        return embed_product_gens(term, standard_generators(term.left),
                                  standard_generators(term.right))
    if isinstance(term, FreeProduct):
        return embed_product_gens(term, standard_generators(term.left),
                                  standard_generators(term.right))
    raise TypeError(f"not a group term: {term!r}")


def embed_product_gens(term, left_gens, right_gens) -> tuple:
    """Embed factor generators into a direct or free product."""
    if isinstance(term, DirectProduct):
        er, el = identity(term.right), identity(term.left)
        return tuple([(g, er) for g in left_gens] + [(el, h) for h in right_gens])
    if isinstance(term, FreeProduct):
        return tuple([((0, g),) for g in left_gens] + [((1, h),) for h in right_gens])
    raise TypeError("not a product term")


def check_generates(spec: GroupSpec, max_radius: int = 8) -> bool:
    """Desk-scale generation check: every product of at most two standard
    generators must appear within `max_radius` steps of spec.gens."""
    term = spec.term
    std = standard_generators(term)
    targets = set(std)
    for a in std:
        for b in std:
            targets.add(multiply(term, a, b))
    targets.discard(identity(term))
    frontier = {identity(term)}
    seen = set(frontier)
    for _ in range(max_radius):
        nxt = set()
        for v in frontier:
            for s in spec.gens:
                w = multiply(term, s, v)
                if w not in seen:
                    seen.add(w)
                    nxt.add(w)
        frontier = nxt
        if targets <= seen:
            return True
        if not frontier:
            break
    return targets <= seen


# -- term formatting / spec text format --------------------------------------

def format_term(term: Term) -> str:
    if isinstance(term, FreeAbelian):
        return "Z" if term.rank == 1 else f"Z^{term.rank}"
    if isinstance(term, Cyclic):
        return f"C{term.order}"
    if isinstance(term, Free):
        return f"F{term.rank}"
    if isinstance(term, DirectProduct):
        return f"({format_term(term.left)} x {format_term(term.right)})"
    if isinstance(term, FreeProduct):
        return f"({format_term(term.left)} * {format_term(term.right)})"
    raise TypeError(f"not a group term: {term!r}")


def _parse_atom(text: str) -> Term:
    s = text.strip()
    if s == "Z":
        return FreeAbelian(1)
    if s.startswith("Z^"):
        return FreeAbelian(int(s[2:]))
    if s.startswith("C"):
        return Cyclic(int(s[1:].lstrip("_")))
    if s.startswith("F"):
        return Free(int(s[1:]))
    raise SpecSyntaxError(f"unknown group atom {s!r}")


def parse_group_spec(text: str) -> GroupSpec:
    """Parse the spec text format.

    Examples:
        Z^2 | gens=(1,0),(2,0),(0,1),sym
        F2 | gens=basis
        Z^2 x C2 | gens=auto
        (Z^2|gens=(1,0),(2,0),(0,1),sym) * C2
    """
    parts = _split_top(text, "|")
    if len(parts) > 2:
        raise SpecSyntaxError(f"too many '|' clauses in {text!r}")
    term_text = parts[0].strip()
    gens_text = parts[1].strip() if len(parts) == 2 else "auto"
    if gens_text.startswith("gens="):
        gens_text = gens_text[5:].strip()
    elif len(parts) == 2:
        raise SpecSyntaxError(f"expected gens=... after '|' in {text!r}")

    spec = _parse_term_expr(term_text)
    if gens_text in ("auto", "basis"):
        return spec
    tokens = [t.strip() for t in _split_top(gens_text, ",")]
    # element literals may themselves contain top-level commas inside
    # parentheses only, so _split_top keeps them intact
    symmetric_close = False
    gens = []
    for tok in tokens:
        if tok == "sym":
            symmetric_close = True
            continue
        if not tok:
            continue
        gens.append(parse_element(spec.term, tok))
    if symmetric_close:
        closed = list(dict.fromkeys(gens))
        for gen in gens:
            inv = inverse(spec.term, gen)
            if inv not in closed:
                closed.append(inv)
        gens = closed
    try:
        return GroupSpec(spec.term, tuple(gens))
    except ValueError as exc:
        raise SpecSyntaxError(str(exc)) from exc


def _parse_term_expr(text: str) -> GroupSpec:
    """A product expression over atoms and parenthesized sub-specs.

    '*' builds free products, 'x' direct products, left-associative.
    Sub-specs in parentheses may carry their own gens clause; a product
    without an explicit outer clause inherits the embedded factor gens.
    """
    tokens = _tokenize_term(text)
    if not tokens:
        raise SpecSyntaxError("empty group spec")
    spec = _parse_factor(tokens.pop(0))
    while tokens:
        op = tokens.pop(0)
        if op not in ("*", "x"):
            raise SpecSyntaxError(f"expected '*' or 'x', got {op!r}")
        if not tokens:
            raise SpecSyntaxError("dangling product operator")
        rhs = _parse_factor(tokens.pop(0))
        ctor = FreeProduct if op == "*" else DirectProduct
        term = ctor(spec.term, rhs.term)
        gens = embed_product_gens(term, spec.gens, rhs.gens)
        spec = GroupSpec(term, gens)
    return spec


def _parse_factor(token: str) -> GroupSpec:
    token = token.strip()
    if token.startswith("("):
        return parse_group_spec(token[1:-1])
    term = _parse_atom(token)
    return GroupSpec(term, standard_generators(term))


def _tokenize_term(text: str) -> list[str]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == "(":
            depth, j = 1, i + 1
            while j < n and depth:
                if text[j] == "(":
                    depth += 1
                elif text[j] == ")":
                    depth -= 1
                j += 1
            if depth:
                raise SpecSyntaxError(f"unbalanced parentheses in {text!r}")
            tokens.append(text[i:j])
            i = j
        elif ch in "*":
            tokens.append("*")
            i += 1
        elif ch == "x" and (i + 1 == n or not text[i + 1].isalnum()):
            tokens.append("x")
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "*(":
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


# -- Cayley balls ------------------------------------------------------------

DEFAULT_BALL_CAP = 5_000_000


@dataclass
class CayleyBall:
    """The radius-r ball of a right-invariant Cayley graph.

    Vertex ids are BFS discovery order from the identity (vertex 0), so
    word length is nondecreasing in the id.  Edges are restricted to
    endpoints inside the ball; boundary vertices have incomplete degree.
    """

    spec: GroupSpec
    radius: int
    graph: Graph
    elements: list
    index: dict
    word_length: list[int]

    def vertex_of(self, element) -> int:
        try:
            return self.index[element]
        except KeyError:
            raise KeyError(f"element {element!r} outside ball of radius {self.radius}")

    def boundary(self) -> frozenset:
        return frozenset(v for v, w in enumerate(self.word_length) if w == self.radius)


def cayley_ball(spec: GroupSpec, radius: int, cap: int = DEFAULT_BALL_CAP,
                labels: bool = True) -> CayleyBall:
    """All elements of word length <= radius with generator edges.

    Deterministic: ids follow BFS order with generators applied in the
    order listed in spec.gens.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    term = spec.term
    e = identity(term)
    elements = [e]
    index = {e: 0}
    word_length = [0]
    q = deque([0])
    edge_set = set()
    while q:
        v = q.popleft()
        wl = word_length[v]
        gv = elements[v]
        for s in spec.gens:
            w = multiply(term, s, gv)
            j = index.get(w)
            if j is None:
                if wl == radius:
                    continue
                j = len(elements)
                if j >= cap:
                    raise CapExceeded(
                        f"ball of radius {radius} exceeds cap {cap}", size=j, cap=cap)
                index[w] = j
                elements.append(w)
                word_length.append(wl + 1)
                q.append(j)
            if v < j:
                edge_set.add((v, j))
    lab = {v: format_element(term, g) for v, g in enumerate(elements)} if labels else None
    g = Graph(len(elements), sorted(edge_set), lab)
    return CayleyBall(spec, radius, g, elements, index, word_length)


# -- quotient by translates of a transversal (coset collapse) ----------------

def babai_collapse(x: Graph, class_of) -> tuple[Graph, list[list[int]]]:
    """Collapse each class of the given vertex partition to one vertex.

    `class_of` maps vertex id -> class key.  Every class must induce a
    connected subgraph (the translated-transversal hypothesis); classes
    must cover all vertices.  Returns the quotient graph (no self-loops)
    plus the member list per quotient vertex.  Quotient ids follow the
    smallest original vertex of each class.
    """
    members: dict = {}
    for v in range(x.n):
        if v not in class_of:
            raise ValueError(f"vertex {v} missing from the class map")
        members.setdefault(class_of[v], []).append(v)
    from .graphs import is_connected_subset

    for key, mem in members.items():
        if not is_connected_subset(x, mem):
            raise ValueError(f"class {key!r} induces a disconnected subgraph")
    ordered = sorted(members.values(), key=lambda mem: mem[0])
    qid = {}
    for i, mem in enumerate(ordered):
        for v in mem:
            qid[v] = i
    qedges = set()
    for u, v in x.edges():
        a, b = qid[u], qid[v]
        if a != b:
            qedges.add((a, b) if a < b else (b, a))
    return Graph(len(ordered), sorted(qedges)), ordered


# -- generating-set enlargement ----------------------------------------------

def enlarged_generating_set(spec: GroupSpec) -> GroupSpec:
    """Close the generators under products of length two and three.

    Returns the same group with gens S0 u S0S0 u S0S0S0, identity removed,
    duplicates removed; the result is symmetric because S0 is.
    """
    term = spec.term
    e = identity(term)
    out = list(spec.gens)
    seen = set(out)
    pairs = []
    for a in spec.gens:
        for b in spec.gens:
            ab = multiply(term, a, b)
            pairs.append(ab)
            if ab != e and ab not in seen:
                seen.add(ab)
                out.append(ab)
    for ab in pairs:
        for c in spec.gens:
            abc = multiply(term, ab, c)
            if abc != e and abc not in seen:
                seen.add(abc)
                out.append(abc)
    return GroupSpec(term, tuple(out))
