"""Matrix Market (real/integer, general) reader and writer for dense matrices."""
import numpy as np

from ..errors import ParseError, ReportIOError, UnsupportedFormatError
from ..linalg import as_matrix

_BANNER = "%%matrixmarket"


def _fields(line):
    return line.strip().split()


def _parse_header(line):
    parts = line.strip().lower().split()
    if not parts or parts[0] != _BANNER:
        raise ParseError("missing %%MatrixMarket banner", 1)
    if len(parts) != 5:
        raise ParseError(f"banner needs 5 fields, got {len(parts)}", 1)
    _, obj, fmt, field, symmetry = parts
    if obj != "matrix":
        raise UnsupportedFormatError(f"object {obj!r} is not supported")
    if fmt not in ("coordinate", "array"):
        raise ParseError(f"unknown format {fmt!r}", 1)
    if field not in ("real", "integer", "double"):
        raise UnsupportedFormatError(f"field {field!r} is not supported (real/integer only)")
    if symmetry != "general":
        raise UnsupportedFormatError(f"symmetry {symmetry!r} is not supported (general only)")
    return fmt


def _number(tok, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"bad number {tok!r}", lineno) from None


def _int(tok, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad {what} {tok!r}", lineno) from None


def parse_matrix_market(text):
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    fmt = _parse_header(lines[0])
    body = [
        (no, line) for no, line in enumerate(lines[1:], start=2)
        if line.strip() and not line.lstrip().startswith("%")
    ]
    if not body:
        raise ParseError("missing size line", len(lines))
    size_no, size_line = body[0]
    size = _fields(size_line)
    data = body[1:]
    if fmt == "array":
        if len(size) != 2:
            raise ParseError("array size line needs 'rows cols'", size_no)
        m, n = (_int(t, size_no, "size") for t in size)
        if m < 0 or n < 0:
            raise ParseError("negative dimension", size_no)
        values = []
        for no, line in data:
            toks = _fields(line)
            if len(toks) != 1:
                raise ParseError(f"expected one value, got {len(toks)}", no)
            values.append(_number(toks[0], no))
        if len(values) != m * n:
            last = data[-1][0] if data else size_no
            raise ParseError(f"expected {m * n} values, got {len(values)}", last)
        return as_matrix(np.array(values, dtype=np.float64).reshape((m, n), order="F"))
    if len(size) != 3:
        raise ParseError("coordinate size line needs 'rows cols nnz'", size_no)
    m, n, nnz = (_int(t, size_no, "size") for t in size)
    if m < 0 or n < 0 or nnz < 0:
        raise ParseError("negative size", size_no)
    A = np.zeros((m, n), order="F")
    if len(data) != nnz:
        last = data[-1][0] if data else size_no
        raise ParseError(f"expected {nnz} entries, got {len(data)}", last)
    for no, line in data:
        toks = _fields(line)
        if len(toks) != 3:
            raise ParseError(f"expected 'row col value', got {len(toks)} fields", no)
        i = _int(toks[0], no, "row index")
        j = _int(toks[1], no, "column index")
        if not (1 <= i <= m and 1 <= j <= n):
            raise ParseError(f"index ({i}, {j}) outside {m}x{n}", no)
        A[i - 1, j - 1] = _number(toks[2], no)
    return as_matrix(A)


def read_matrix_market(path):
    """Read a Matrix Market file into a dense Fortran-ordered array."""
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        return parse_matrix_market(fh.read())


def format_matrix_market(A, comment=None):
    A = as_matrix(A)
    m, n = A.shape
    out = ["%%MatrixMarket matrix array real general"]
    if comment:
        out.extend(f"% {line}" for line in comment.splitlines())
    out.append(f"{m} {n}")
    out.extend(format(float(x), ".17g") for x in A.ravel(order="F"))
    return "\n".join(out) + "\n"


def write_matrix_market(A, path, comment=None):
    """Write ``A`` in array format with 17 significant digits (exact round trip)."""
    text = format_matrix_market(A, comment)
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportIOError(f"cannot write {path}: {exc}") from exc
