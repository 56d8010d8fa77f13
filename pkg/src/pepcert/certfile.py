"""Line-oriented certificate files (format tag pepcert/1).

Header of `key value` lines (format, N, alpha, r, delta) followed by labeled
vector blocks, one value per line:

    format pepcert/1
    N 5
    alpha 1.7...
    r 0.0...
    delta 0.0
    d:
    ...
    a:
    ...

Numbers render as the shortest decimal that round-trips the 64-bit binary
value (Python repr), so parse(render(x)) is bit-identical. The d block is
required and is the single source of truth; a, b, c, eps are advisory and
verification re-derives them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .rates import RateParams
from .recursion import derive_full
from .solver import SolveReport

__all__ = [
    "FORMAT_TAG",
    "CertificateFormatError",
    "CertificateFile",
    "render_certificate",
    "parse_certificate",
    "write_certificate",
    "read_certificate",
    "certificate_from_report",
    "default_path",
    "params_from_file",
]

FORMAT_TAG = "pepcert/1"
_HEADER_KEYS = ("N", "alpha", "r", "delta")
_BLOCKS = ("d", "a", "b", "c", "eps")


class CertificateFormatError(ValueError):
    """The file does not parse as a pepcert/1 certificate."""


@dataclass
class CertificateFile:
    N: int
    alpha: float
    r: float
    delta: float
    d: np.ndarray
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    c: np.ndarray | None = None
    eps: np.ndarray | None = None
    version: str = FORMAT_TAG

    def __post_init__(self):
        self.d = np.asarray(self.d, dtype=float)
        if self.d.shape != (self.N - 1,):
            raise CertificateFormatError(
                f"d must have length N-1={self.N - 1}, got {self.d.shape}"
            )
        for name, expect in (("a", self.N), ("b", self.N - 1),
                             ("c", self.N + 1), ("eps", self.N + 1)):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=float)
            setattr(self, name, arr)
            if arr.shape != (expect,):
                raise CertificateFormatError(
                    f"{name} must have length {expect}, got {arr.shape}"
                )


def certificate_from_report(report: SolveReport) -> CertificateFile:
    """File payload for a converged solve: stored d plus derived vectors."""
    cert = derive_full(report.params, report.d)
    return CertificateFile(
        N=report.params.N, alpha=report.params.alpha, r=report.params.r,
        delta=report.delta, d=cert.d, a=cert.a, b=cert.b, c=cert.c,
        eps=cert.eps,
    )


def render_certificate(cf: CertificateFile) -> str:
    lines = [f"format {cf.version}"]
    lines.append(f"N {cf.N}")
    for key in ("alpha", "r", "delta"):
        lines.append(f"{key} {getattr(cf, key)!r}")
    for name in _BLOCKS:
        vec = getattr(cf, name)
        if vec is None:
            continue
        lines.append(f"{name}:")
        lines.extend(repr(float(x)) for x in vec)
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> CertificateFile:
    header: dict[str, str] = {}
    blocks: dict[str, list[float]] = {}
    current: list[float] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.endswith(":"):
            name = line[:-1]
            if name not in _BLOCKS:
                raise CertificateFormatError(f"line {lineno}: unknown block '{name}'")
            if name in blocks:
                raise CertificateFormatError(f"line {lineno}: duplicate block '{name}'")
            current = blocks.setdefault(name, [])
            continue
        if current is not None:
            try:
                current.append(float(line))
            except ValueError as exc:
                raise CertificateFormatError(
                    f"line {lineno}: bad numeric value {line!r}"
                ) from exc
            continue
        key, _, value = line.partition(" ")
        if not value:
            raise CertificateFormatError(f"line {lineno}: malformed header line {raw!r}")
        if key in header:
            raise CertificateFormatError(f"line {lineno}: duplicate key '{key}'")
        header[key] = value
    if header.get("format") != FORMAT_TAG:
        raise CertificateFormatError(
            f"missing or unsupported format tag {header.get('format')!r}"
        )
    for key in _HEADER_KEYS:
        if key not in header:
            raise CertificateFormatError(f"missing header key '{key}'")
    if "d" not in blocks:
        raise CertificateFormatError("missing required block 'd'")
    try:
        n = int(header["N"])
        alpha = float(header["alpha"])
        r = float(header["r"])
        delta = float(header["delta"])
    except ValueError as exc:
        raise CertificateFormatError(f"bad header value: {exc}") from exc
    kwargs = {name: np.array(vals) for name, vals in blocks.items()}
    return CertificateFile(N=n, alpha=alpha, r=r, delta=delta, **kwargs)


def default_path(outdir, n: int) -> str:
    return os.path.join(os.fspath(outdir), f"cert_N{n:05d}.txt")


def write_certificate(cf: CertificateFile, path=None, outdir=None) -> str:
    """Write to `path`, or to the canonical name cert_N#####.txt in `outdir`."""
    if path is None:
        if outdir is None:
            raise ValueError("need either path or outdir")
        path = default_path(outdir, cf.N)
    os.makedirs(os.path.dirname(os.path.abspath(os.fspath(path))), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(render_certificate(cf))
    return os.fspath(path)


def read_certificate(path) -> CertificateFile:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CertificateFormatError(f"cannot read {path}: {exc}") from exc
    return parse_certificate(text)


def params_from_file(cf: CertificateFile) -> RateParams:
    """RateParams from stored header values; the balance validation doubles as
    a corruption check on (N, alpha, r)."""
    try:
        return RateParams(N=cf.N, alpha=cf.alpha, r=cf.r)
    except ValueError as exc:
        raise CertificateFormatError(f"inconsistent rate parameters: {exc}") from exc
