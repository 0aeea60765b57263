"""Set files: binary PGM (P5) renders, PPM (P6) overlays and 1D run-length text.

A PGM written here carries the grid in a header comment, so it reads back
into the same :class:`GridSet`.  1D sets render as an ``N x 32`` strip; 2D
sets put the x axis horizontally with the largest y on the top row.
Member cells are white (255) on black.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .sets import GridSet, make_grid

STRIP = 32
MAGIC = "ifs-grid"


def _grid_comment(grid):
    lo = " ".join(f"{v:.17g}" for v in grid.domain.lower)
    hi = " ".join(f"{v:.17g}" for v in grid.domain.upper)
    res = " ".join(str(r) for r in grid.resolution)
    return f"# {MAGIC} dim={grid.dimension} lower={lo} upper={hi} resolution={res}"


def _parse_grid_comment(line):
    fields = {}
    key = None
    for tok in line.lstrip("#").split()[1:]:
        if "=" in tok:
            key, tok = tok.split("=", 1)
            fields[key] = []
        if tok:
            fields[key].append(tok)
    dim = int(fields["dim"][0])
    lower = [float(v) for v in fields["lower"]]
    upper = [float(v) for v in fields["upper"]]
    res = [int(v) for v in fields["resolution"]]
    if not len(lower) == len(upper) == len(res) == dim:
        raise ValueError(f"inconsistent grid comment: {line!r}")
    return make_grid(lower, upper, res if dim > 1 else res[0])


def _image(A):
    bm = A.bitmap
    if A.grid.dimension == 1:
        return np.repeat(bm[None, :], STRIP, axis=0)
    return bm.T[::-1, :]  # rows = y descending, columns = x


def _bitmap_from_image(img, grid):
    if grid.dimension == 1:
        return img[0, :]
    return img[::-1, :].T


def encode_pgm(A):
    img = _image(A)
    h, w = img.shape
    head = f"P5\n{_grid_comment(A.grid)}\n{w} {h}\n255\n".encode("ascii")
    return head + (img.astype(np.uint8) * 255).tobytes()


def write_pgm(A, path):
    Path(path).write_bytes(encode_pgm(A))


def _read_header(data, magic):
    """Parse a netpbm header; returns (comments, width, height, maxval, offset)."""
    if not data.startswith(magic.encode()):
        raise ValueError(f"not a {magic} file")
    pos = 2
    tokens, comments = [], []
    while len(tokens) < 3:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            end = data.index(b"\n", pos)
            comments.append(data[pos:end].decode("ascii"))
            pos = end + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(int(data[pos:end]))
        pos = end
    return comments, tokens[0], tokens[1], tokens[2], pos + 1  # one whitespace byte ends the header


def decode_pgm(data, grid=None):
    comments, w, h, maxval, off = _read_header(data, "P5")
    if maxval > 255:
        raise ValueError("16-bit PGM is not supported")
    img = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=off).reshape(h, w)
    if grid is None:
        tagged = [c for c in comments if MAGIC in c]
        if not tagged:
            raise ValueError("PGM has no grid comment; pass the grid explicitly")
        grid = _parse_grid_comment(tagged[0])
    return GridSet(grid, _bitmap_from_image(img > maxval // 2, grid))


def read_pgm(path, grid=None):
    return decode_pgm(Path(path).read_bytes(), grid)


def encode_overlay(A, B):
    """PPM P6 with ``A`` in the red channel and ``B`` in the green channel."""
    A.grid.check_compatible(B.grid)
    a, b = _image(A), _image(B)
    rgb = np.zeros(a.shape + (3,), dtype=np.uint8)
    rgb[..., 0] = a * 255
    rgb[..., 1] = b * 255
    h, w = a.shape
    return f"P6\n{_grid_comment(A.grid)}\n{w} {h}\n255\n".encode("ascii") + rgb.tobytes()


def write_overlay(A, B, path):
    Path(path).write_bytes(encode_overlay(A, B))


def decode_overlay(data):
    comments, w, h, maxval, off = _read_header(data, "P6")
    grid = _parse_grid_comment([c for c in comments if MAGIC in c][0])
    rgb = np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=off).reshape(h, w, 3)
    return tuple(GridSet(grid, _bitmap_from_image(rgb[..., c] > maxval // 2, grid)) for c in (0, 1))


# -- 1D run-length text --------------------------------------------------------------
def encode_rle(A):
    """One ``start length`` line per run of member cells, after a grid comment."""
    if A.grid.dimension != 1:
        raise ValueError("run-length text is for 1D sets")
    bm = A.bitmap.astype(np.int8)
    edges = np.diff(np.concatenate([[0], bm, [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    lines = [_grid_comment(A.grid)] + [f"{s} {e - s}" for s, e in zip(starts, ends)]
    return "\n".join(lines) + "\n"


def decode_rle(text):
    grid = None
    bm = None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if MAGIC in line and grid is None:
                grid = _parse_grid_comment(line)
                bm = np.zeros(grid.resolution, dtype=bool)
            continue
        if grid is None:
            raise ValueError("run-length file has no grid comment")
        try:
            s, length = (int(v) for v in line.split())
        except ValueError:
            raise ValueError(f"line {n}: expected 'start length', got {line!r}") from None
        if s < 0 or length < 1 or s + length > bm.size:
            raise ValueError(f"line {n}: run {s}+{length} outside the grid")
        bm[s:s + length] = True
    if grid is None:
        raise ValueError("run-length file has no grid comment")
    return GridSet(grid, bm)


def write_rle(A, path):
    Path(path).write_text(encode_rle(A))


def read_rle(path):
    return decode_rle(Path(path).read_text())


def load_set(path):
    """Read a set file, choosing the format from the extension (``.pgm`` or run-length text)."""
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return read_pgm(path)
    return read_rle(path)


def save_set(A, path):
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        write_pgm(A, path)
    else:
        write_rle(A, path)
