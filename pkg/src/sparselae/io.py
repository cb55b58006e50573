"""Reading and writing dense matrices as headerless CSV or MatrixMarket."""

import os

import numpy as np

from .errors import InvalidArgumentError, ParseError

FORMATS = ("csv", "matrix-market")


def infer_format(path):
    ext = os.path.splitext(str(path))[1].lower()
    return "matrix-market" if ext in (".mtx", ".mm") else "csv"


def _float(token, line, path):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric token {token!r}", line, path) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite value {token!r}", line, path)
    return value


def parse_csv(text, path=None):
    rows, width, first_line = [], None, None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = [t.strip() for t in line.split(",")]
        if width is None:
            width, first_line = len(tokens), lineno
        elif len(tokens) != width:
            raise ParseError(
                f"ragged row: {len(tokens)} fields, expected {width} (from line {first_line})",
                lineno,
                path,
            )
        rows.append([_float(t, lineno, path) for t in tokens])
    if not rows:
        raise ParseError("no data rows", None, path)
    return np.array(rows, dtype=np.float64)


def parse_matrix_market(text, path=None):
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1, path)
    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket" or header[1].lower() != "matrix":
        raise ParseError("missing '%%MatrixMarket matrix <layout> <field> <symmetry>' header", 1, path)
    layout, kind, symmetry = (h.lower() for h in header[2:])
    if layout not in ("array", "coordinate"):
        raise ParseError(f"unsupported layout {layout!r}", 1, path)
    if kind not in ("real", "integer", "double", "pattern"):
        raise ParseError(f"unsupported field {kind!r}", 1, path)
    if symmetry not in ("general", "symmetric", "skew-symmetric"):
        raise ParseError(f"unsupported symmetry {symmetry!r}", 1, path)
    if kind == "pattern" and layout == "array":
        raise ParseError("pattern field requires coordinate layout", 1, path)

    body = [
        (no, ln.split())
        for no, ln in enumerate(lines[1:], start=2)
        if ln.strip() and not ln.lstrip().startswith("%")
    ]
    if not body:
        raise ParseError("missing size line", len(lines), path)
    size_no, size = body[0]
    want = 2 if layout == "array" else 3
    if len(size) != want:
        raise ParseError(f"size line needs {want} integers", size_no, path)
    try:
        dims = [int(t) for t in size]
    except ValueError:
        raise ParseError("size line must contain integers", size_no, path) from None
    m, n = dims[0], dims[1]
    if m < 1 or n < 1:
        raise ParseError(f"invalid dimensions {m}x{n}", size_no, path)
    if symmetry != "general" and m != n:
        raise ParseError(f"{symmetry} matrix must be square, got {m}x{n}", size_no, path)
    A = np.zeros((m, n))
    entries = body[1:]

    if layout == "array":
        if symmetry == "general":
            positions = [(i, j) for j in range(n) for i in range(m)]
        elif symmetry == "symmetric":
            positions = [(i, j) for j in range(n) for i in range(j, m)]
        else:
            positions = [(i, j) for j in range(n) for i in range(j + 1, m)]
        if len(entries) != len(positions):
            at = entries[len(positions)][0] if len(entries) > len(positions) else (entries[-1][0] if entries else size_no)
            raise ParseError(
                f"dimension mismatch: expected {len(positions)} values, found {len(entries)}", at, path
            )
        for (no, tokens), (i, j) in zip(entries, positions):
            if len(tokens) != 1:
                raise ParseError("array entries must have one value per line", no, path)
            A[i, j] = _float(tokens[0], no, path)
    else:
        nnz = dims[2]
        if len(entries) != nnz:
            at = entries[nnz][0] if len(entries) > nnz else (entries[-1][0] if entries else size_no)
            raise ParseError(f"dimension mismatch: expected {nnz} entries, found {len(entries)}", at, path)
        width = 2 if kind == "pattern" else 3
        for no, tokens in entries:
            if len(tokens) != width:
                raise ParseError(f"coordinate entries need {width} fields", no, path)
            try:
                i, j = int(tokens[0]) - 1, int(tokens[1]) - 1
            except ValueError:
                raise ParseError("non-integer coordinate index", no, path) from None
            if not (0 <= i < m and 0 <= j < n):
                raise ParseError(f"index ({i + 1}, {j + 1}) outside {m}x{n}", no, path)
            value = 1.0 if kind == "pattern" else _float(tokens[2], no, path)
            A[i, j] += value
    if symmetry == "symmetric":
        A = A + np.tril(A, -1).T
    elif symmetry == "skew-symmetric":
        A = A - np.tril(A, -1).T
    return A


def load_matrix(path, fmt=None):
    """Load a dense matrix from ``path`` (format inferred from the extension if omitted)."""
    fmt = fmt or infer_format(path)
    if fmt not in FORMATS:
        raise InvalidArgumentError(f"unknown matrix format {fmt!r}; expected one of {FORMATS}")
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "csv":
        return parse_csv(text, path)
    return parse_matrix_market(text, path)


def format_matrix(A, fmt="csv"):
    """Text serialisation using shortest round-trip decimals."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    if fmt == "csv":
        return "".join(",".join(repr(float(x)) for x in row) + "\n" for row in A)
    if fmt == "matrix-market":
        m, n = A.shape
        out = ["%%MatrixMarket matrix array real general", f"{m} {n}"]
        out.extend(repr(float(x)) for x in A.T.ravel())
        return "\n".join(out) + "\n"
    raise InvalidArgumentError(f"unknown matrix format {fmt!r}")


def save_matrix(path, A, fmt=None):
    fmt = fmt or infer_format(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(A, fmt))
