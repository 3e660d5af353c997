"""Text file formats for spaces, functions, free vectors, operators and liftings.

Every parser is strict: any deviation raises :class:`ParseError` with a
1-based line/column position.  Files that reference other files (a
function names its space, an operator names two spaces) resolve those
paths relative to their own directory.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import arith
from .errors import InvalidSpace, ParseError
from .free_space import FreeVector
from .lifting import LiftingMatrix, LipOperator
from .lipschitz import LipschitzFunction
from .metric_space import new_space


def digest(path):
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def parse_number(token, exact, path=None, line=None, column=None):
    try:
        if "/" in token:
            value = Fraction(token)
        elif exact:
            value = Fraction(token)
        else:
            value = float(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a number: {token!r}", path, line, column) from None
    if isinstance(value, float) and not np.isfinite(value):
        raise ParseError(f"non-finite number {token!r}", path, line, column)
    return value if exact else float(value)


def _tokens(text):
    """``(token, column)`` pairs of a whitespace-separated line."""
    out, col = [], 0
    for tok in text.split():
        col = text.index(tok, col)
        out.append((tok, col + 1))
        col += len(tok)
    return out


def _lines(text):
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    return lines


def _keyword(lines, k, word, path, nargs=None):
    if k >= len(lines):
        raise ParseError(f"missing `{word}` line", path, k + 1)
    toks = _tokens(lines[k])
    if not toks or toks[0][0] != word:
        got = toks[0][0] if toks else "empty line"
        raise ParseError(f"expected `{word}`, got {got!r}", path, k + 1, toks[0][1] if toks else 1)
    args = toks[1:]
    if nargs is not None and len(args) != nargs:
        raise ParseError(f"`{word}` takes {nargs} argument(s), got {len(args)}", path, k + 1)
    return args


def _int_arg(tok, path, line):
    text, col = tok
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected an integer, got {text!r}", path, line, col) from None


# -- spaces -----------------------------------------------------------------


def parse_space(text, exact=False, path=None):
    lines = _lines(text)
    (n_tok,) = _keyword(lines, 0, "points", path, 1)
    n = _int_arg(n_tok, path, 1)
    if n < 1:
        raise ParseError(f"need at least one point, got {n}", path, 1, n_tok[1])
    (b_tok,) = _keyword(lines, 1, "base", path, 1)
    base = _int_arg(b_tok, path, 2)
    if not 0 <= base < n:
        raise ParseError(f"base index {base} out of range 0..{n - 1}", path, 2, b_tok[1])
    labels = _keyword(lines, 2, "labels", path, n)
    rows = lines[3:]
    if len(rows) != n:
        raise ParseError(f"expected {n} distance rows, found {len(rows)}", path, 4 + min(len(rows), n))
    dist = np.empty((n, n), dtype=object)
    for i, row in enumerate(rows):
        toks = _tokens(row)
        if len(toks) != n:
            raise ParseError(f"expected {n} distances, found {len(toks)}", path, 4 + i)
        for j, (tok, col) in enumerate(toks):
            dist[i, j] = parse_number(tok, exact, path, 4 + i, col)
    try:
        return new_space([lab for lab, _ in labels], dist, base, exact=exact)
    except InvalidSpace as exc:
        raise ParseError(str(exc), path, 3) from exc


def format_space(space):
    lines = [f"points {space.n}", f"base {space.base_index}", "labels " + " ".join(space.labels)]
    for row in space.dist:
        lines.append(" ".join(arith.format_number(v) for v in row))
    return "\n".join(lines) + "\n"


class Loader:
    """Reads files in one arithmetic mode, sharing space objects by path."""

    def __init__(self, exact=False):
        self.exact = exact
        self.spaces = {}
        self.inputs = {}

    def _read(self, path):
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ParseError("file not found", str(path)) from None
        except UnicodeDecodeError:
            raise ParseError("file is not valid UTF-8", str(path)) from None
        self.inputs[str(path)] = digest(path)
        return text

    def _ref(self, base_file, tok, line):
        name, col = tok
        ref = Path(base_file).parent / name
        if not ref.exists():
            raise ParseError(f"referenced file {name!r} not found", str(base_file), line, col)
        return ref

    def space(self, path):
        key = str(Path(path).resolve())
        if key not in self.spaces:
            self.spaces[key] = parse_space(self._read(path), self.exact, str(path))
        return self.spaces[key]

    def function(self, path):
        lines = _lines(self._read(path))
        (ref,) = _keyword(lines, 0, "function", str(path), 1)
        space = self.space(self._ref(path, ref, 1))
        return LipschitzFunction(space, self._labelled_values(space, lines[1:], path))

    def free_vector(self, path):
        lines = _lines(self._read(path))
        (ref,) = _keyword(lines, 0, "freevector", str(path), 1)
        space = self.space(self._ref(path, ref, 1))
        return FreeVector(space, self._labelled_values(space, lines[1:], path))

    def _labelled_values(self, space, lines, path):
        values = arith.zeros(space.dim, self.exact)
        seen = set()
        for k, line in enumerate(lines, start=2):
            toks = _tokens(line)
            if len(toks) != 2:
                raise ParseError("expected `label value`", str(path), k, toks[0][1] if toks else 1)
            (label, lcol), (num, ncol) = toks
            if label in seen:
                raise ParseError(f"duplicate label {label!r}", str(path), k, lcol)
            seen.add(label)
            try:
                i = space.index(label)
            except KeyError:
                raise ParseError(f"unknown label {label!r}", str(path), k, lcol) from None
            if i == space.base_index:
                raise ParseError(f"{label!r} is the base point; its value is fixed", str(path), k, lcol)
            values[space.slot[i]] = parse_number(num, self.exact, str(path), k, ncol)
        return values

    def operator(self, path):
        lines = _lines(self._read(path))
        dom_tok, cod_tok = _keyword(lines, 0, "operator", str(path), 2)
        M = self.space(self._ref(path, dom_tok, 1))
        N = self.space(self._ref(path, cod_tok, 1))
        body = lines[1:]
        if M.dim == 0 and all(not ln.strip() for ln in body):
            body = [""] * N.dim
        if len(body) != N.dim:
            raise ParseError(f"expected {N.dim} matrix rows, found {len(body)}", str(path), 2 + min(len(body), N.dim))
        A = arith.zeros((N.dim, M.dim), self.exact)
        for r, line in enumerate(body):
            toks = _tokens(line)
            if len(toks) != M.dim:
                raise ParseError(f"expected {M.dim} entries, found {len(toks)}", str(path), r + 2)
            for c, (tok, col) in enumerate(toks):
                A[r, c] = parse_number(tok, self.exact, str(path), r + 2, col)
        return LipOperator(M, N, A)

    def point_map(self, path):
        """``pointmap <source> <target>`` then ``<source-label> <target-label>`` lines."""
        lines = _lines(self._read(path))
        src_tok, tgt_tok = _keyword(lines, 0, "pointmap", str(path), 2)
        N = self.space(self._ref(path, src_tok, 1))
        M = self.space(self._ref(path, tgt_tok, 1))
        gamma = {}
        for k, line in enumerate(lines[1:], start=2):
            toks = _tokens(line)
            if len(toks) != 2:
                raise ParseError("expected `source-label target-label`", str(path), k)
            (a, acol), (b, bcol) = toks
            if a not in N.labels:
                raise ParseError(f"unknown source label {a!r}", str(path), k, acol)
            if b not in M.labels:
                raise ParseError(f"unknown target label {b!r}", str(path), k, bcol)
            if a in gamma:
                raise ParseError(f"duplicate source label {a!r}", str(path), k, acol)
            gamma[a] = b
        missing = [lab for lab in N.labels if lab not in gamma and lab != N.base_label]
        if missing:
            raise ParseError(f"point map undefined at {', '.join(missing)}", str(path), len(lines) + 1)
        return gamma, N, M

    def lifting(self, path, domain, codomain):
        lines = _lines(self._read(path))
        _keyword(lines, 0, "lifting", str(path), 2)
        cols = _keyword(lines, 1, "columns", str(path), len(domain.pairs))
        want = [domain.pair_label(p) for p in domain.pairs]
        for (tok, col), w in zip(cols, want):
            if tok != w:
                raise ParseError(f"column {tok!r}, expected {w!r}", str(path), 2, col)
        body = lines[2:]
        rows = [codomain.pair_label(p) for p in codomain.pairs]
        if len(body) != len(rows):
            raise ParseError(f"expected {len(rows)} rows, found {len(body)}", str(path), 3 + min(len(body), len(rows)))
        L = arith.zeros((len(rows), len(want)), self.exact)
        for r, (line, name) in enumerate(zip(body, rows)):
            toks = _tokens(line)
            if not toks or toks[0][0] != name:
                raise ParseError(f"expected row label {name!r}", str(path), r + 3, toks[0][1] if toks else 1)
            if len(toks) != len(want) + 1:
                raise ParseError(f"expected {len(want)} entries, found {len(toks) - 1}", str(path), r + 3)
            for c, (tok, col) in enumerate(toks[1:]):
                L[r, c] = parse_number(tok, self.exact, str(path), r + 3, col)
        return LiftingMatrix(domain, codomain, L)


def format_lifting(L, domain_name, codomain_name):
    lines = [
        f"lifting {domain_name} {codomain_name}",
        "columns " + " ".join(L.domain.pair_label(p) for p in L.domain.pairs),
    ]
    for pair, row in zip(L.codomain.pairs, L.matrix):
        lines.append(" ".join([L.codomain.pair_label(pair)] + [arith.format_number(v) for v in row]))
    return "\n".join(lines) + "\n"


def format_operator(S, domain_name, codomain_name):
    lines = [f"operator {domain_name} {codomain_name}"]
    for row in S.matrix:
        lines.append(" ".join(arith.format_number(v) for v in row))
    return "\n".join(lines) + "\n"


def format_function(f, space_name, keyword="function"):
    lines = [f"{keyword} {space_name}"]
    values = f.values if isinstance(f, LipschitzFunction) else f.coeffs
    for i, v in zip(f.space.nonbase, values):
        lines.append(f"{f.space.labels[i]} {arith.format_number(v)}")
    return "\n".join(lines) + "\n"


def format_free_vector(mu, space_name):
    return format_function(mu, space_name, keyword="freevector")
