"""State files and CSV output.

A state file is UTF-8 text::

    kind: pure            # or: density
    dim: 3
    0.894427191,0 0.4472135955,0 0,0

Pure states list their ``dim`` amplitudes as ``re,im`` pairs separated by
whitespace (line breaks allowed).  Density matrices give one line per row,
each with ``dim`` pairs.
"""

import csv
import io as _io

import numpy as np

from .validation import check_density_matrix, check_pure_state


class StateFileError(ValueError):
    """Malformed state file; ``line`` is 1-based."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _header(lines, idx, key):
    if idx >= len(lines):
        raise StateFileError(idx + 1, f"missing '{key}:' header")
    name, sep, value = lines[idx].partition(":")
    if not sep or name.strip() != key:
        raise StateFileError(idx + 1, f"expected '{key}: ...', got {lines[idx]!r}")
    return value.strip()


def _pair(token, lineno):
    re_s, sep, im_s = token.partition(",")
    if not sep:
        raise StateFileError(lineno, f"expected 're,im' pair, got {token!r}")
    try:
        return complex(float(re_s), float(im_s))
    except ValueError:
        raise StateFileError(lineno, f"cannot parse number in {token!r}") from None


def parse_state(text):
    """Parse state file text into ``(kind, array)`` without checking state invariants."""
    lines = text.splitlines()
    kind = _header(lines, 0, "kind")
    if kind not in ("pure", "density"):
        raise StateFileError(1, f"kind must be 'pure' or 'density', got {kind!r}")
    dim_s = _header(lines, 1, "dim")
    try:
        dim = int(dim_s)
    except ValueError:
        raise StateFileError(2, f"dim must be an integer, got {dim_s!r}") from None
    if dim < 1:
        raise StateFileError(2, "dim must be positive")
    body = [(i + 1, ln) for i, ln in enumerate(lines) if i >= 2 and ln.strip()]
    if kind == "pure":
        values = [_pair(tok, no) for no, ln in body for tok in ln.split()]
        if len(values) != dim:
            last = body[-1][0] if body else 3
            raise StateFileError(last, f"expected {dim} amplitudes, got {len(values)}")
        return kind, np.array(values, dtype=complex)
    if len(body) != dim:
        last = body[-1][0] if body else 3
        raise StateFileError(last, f"expected {dim} rows, got {len(body)}")
    rows = []
    for no, ln in body:
        row = [_pair(tok, no) for tok in ln.split()]
        if len(row) != dim:
            raise StateFileError(no, f"expected {dim} entries in row, got {len(row)}")
        rows.append(row)
    return kind, np.array(rows, dtype=complex)


def load_state(path):
    """Read and validate a state file.

    Raises :class:`StateFileError` for syntax problems and
    :class:`~modcoherence.validation.ValidationError` for invariant violations.
    """
    with open(path, encoding="utf-8") as fh:
        kind, arr = parse_state(fh.read())
    if kind == "pure":
        return kind, check_pure_state(arr)
    return kind, check_density_matrix(arr)


def _fmt_pair(z):
    return f"{float(z.real)!r},{float(z.imag)!r}"


def format_state(state):
    """Serialize a state vector or density matrix (round-trips exactly)."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        lines = ["kind: pure", f"dim: {state.size}", " ".join(_fmt_pair(z) for z in state)]
    else:
        lines = ["kind: density", f"dim: {state.shape[0]}"]
        lines += [" ".join(_fmt_pair(z) for z in row) for row in state]
    return "\n".join(lines) + "\n"


def save_state(path, state):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_state(state))


def fmt_float(x):
    """12 significant digits; blank for None."""
    if x is None:
        return ""
    return format(float(x), ".12g")


SWEEP_COLUMNS = ["n", "k", "samples", "hits", "estimate", "ci_halfwidth", "exact", "seed",
                 "excluded", "note"]


def sweep_rows(results, seed):
    for n, k, rep in results:
        if rep is None:
            yield [n, k, "", "", "", "", "", seed, "", "skipped: k > n"]
            continue
        yield [n, k, rep.samples, rep.hits, fmt_float(rep.estimate), fmt_float(rep.ci_halfwidth),
               fmt_float(rep.exact), seed, rep.excluded, "flagged" if rep.flagged else ""]


def write_csv(fh, header, rows):
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)


def csv_text(header, rows):
    buf = _io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()
