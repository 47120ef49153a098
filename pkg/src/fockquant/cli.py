"""Command-line harness: symbol mini-language, experiment configs and reports.

Symbol grammar (mode indices are 1-based, ``zs`` is the starred variable)::

    expression  := ['+'|'-'] term (('+'|'-') term)*
    term        := coefficient ['*'] factor* | factor+
    factor      := ('zs'|'z') index ['^' power]
    coefficient := decimal | '(' decimal ',' decimal ')'
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .bosonization import (
    FermionVector,
    bosonize,
    conjugate_operator,
    debosonize,
    fermion_basis,
    fermion_inner,
    super_ccr_residual,
)
from .errors import ConfigError, DimensionError, FockQuantError, SymbolSyntaxError
from .fock import fock_basis, inner_product, resolution_of_identity_residual
from .propagator import SliceConfig, convergence_sweep
from .quantization import antinormal_quantize, antinormal_symbol_of, normal_quantize, normal_symbol_from_antinormal
from .symbols import PolySymbol

PROPAGATE_COLUMNS = ["N", "n", "amp_re", "amp_im", "exact_re", "exact_im", "abs_error", "trunc_loss", "wall_ms"]
COMMANDS = ("symbols", "quantize", "propagate", "bosonize", "identity-check")

# symbol parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>zs|z)
  | (?P<op>[-+*^(),])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SymbolSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, d: int | None):
        self.toks = _tokenize(text)
        self.k = 0
        self.d = d
        self.terms: list[tuple[complex, dict, dict]] = []

    def peek(self):
        return self.toks[self.k]

    def take(self, kind=None, value=None):
        tok = self.toks[self.k]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise SymbolSyntaxError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.k += 1
        return tok

    def is_op(self, value):
        tok = self.peek()
        return tok[0] == "op" and tok[1] == value

    def expression(self):
        sign = 1.0
        if self.is_op("+") or self.is_op("-"):
            sign = -1.0 if self.take()[1] == "-" else 1.0
        self.term(sign)
        while self.is_op("+") or self.is_op("-"):
            sign = -1.0 if self.take()[1] == "-" else 1.0
            self.term(sign)
        self.take("end")

    def number(self) -> float:
        sign = 1.0
        if self.is_op("-") or self.is_op("+"):
            sign = -1.0 if self.take()[1] == "-" else 1.0
        return sign * float(self.take("num")[1])

    def term(self, sign: float):
        tok = self.peek()
        coeff = complex(sign)
        have_coeff = False
        if tok[0] == "num":
            coeff *= float(self.take()[1])
            have_coeff = True
        elif self.is_op("("):
            self.take()
            re_ = self.number()
            self.take("op", ",")
            im = self.number()
            self.take("op", ")")
            coeff *= complex(re_, im)
            have_coeff = True
        if have_coeff and self.is_op("*"):
            self.take()
            if self.peek()[0] != "var":
                raise SymbolSyntaxError("expected a factor after '*'", self.peek()[2])
        beta: dict[int, int] = {}
        alpha: dict[int, int] = {}
        nfactors = 0
        while self.peek()[0] == "var" or (nfactors and self.is_op("*")):
            if self.is_op("*"):
                self.take()
            _, var, vpos = self.take("var")
            idx_tok = self.take("num")
            if not idx_tok[1].isdigit() or int(idx_tok[1]) < 1:
                raise SymbolSyntaxError("mode index must be a positive integer", idx_tok[2])
            mode = int(idx_tok[1])
            power = 1
            if self.is_op("^"):
                self.take()
                p_tok = self.take("num")
                if not p_tok[1].isdigit():
                    raise SymbolSyntaxError("power must be a non-negative integer", p_tok[2])
                power = int(p_tok[1])
            if self.d is not None and mode > self.d:
                raise DimensionError(f"mode index {mode} exceeds d={self.d} (position {vpos})")
            target = beta if var == "zs" else alpha
            target[mode] = target.get(mode, 0) + power
            nfactors += 1
        if not have_coeff and not nfactors:
            tok = self.peek()
            raise SymbolSyntaxError(f"expected a term, found {tok[1] or 'end of input'!r}", tok[2])
        self.terms.append((coeff, beta, alpha))


def parse_symbol_spec(text: str, d: int | None = None) -> PolySymbol:
    """Parse the symbol mini-language; ``d`` defaults to the largest mode index used."""
    if not text or not text.strip():
        raise SymbolSyntaxError("empty symbol", 0)
    parser = _Parser(text, d)
    parser.expression()
    used = max((max([*b, *a], default=0) for _, b, a in parser.terms), default=0)
    dd = d if d is not None else max(used, 1)
    out: dict = {}
    for coeff, b, a in parser.terms:
        key = (tuple(b.get(i + 1, 0) for i in range(dd)), tuple(a.get(i + 1, 0) for i in range(dd)))
        out[key] = out.get(key, 0) + coeff
    return PolySymbol(dd, out)


def _fmt_real(x: float) -> str:
    return repr(float(x))


def format_symbol(p: PolySymbol) -> str:
    """Canonical text form; parse_symbol_spec(format_symbol(p), p.d) == p."""
    if p.is_zero():
        return "0"
    pieces = []
    for (beta, alpha), c in p.terms.items():
        factors = [f"zs{i + 1}" + (f"^{b}" if b > 1 else "") for i, b in enumerate(beta) if b]
        factors += [f"z{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(alpha) if a]
        if c.imag == 0:
            sign = "-" if math.copysign(1.0, c.real) < 0 else "+"
            mag = abs(c.real)
            coeff = "" if (mag == 1.0 and factors) else _fmt_real(mag)
        else:
            sign = "+"
            coeff = f"({_fmt_real(c.real)},{_fmt_real(c.imag)})"
        body = " ".join(([coeff] if coeff else []) + factors)
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


@dataclass(frozen=True)
class SymbolSpec:
    text: str
    parsed: PolySymbol
    is_real: bool

    @classmethod
    def from_text(cls, text: str, d: int | None = None) -> SymbolSpec:
        p = parse_symbol_spec(text, d)
        return cls(text, p, p.is_real())


# configuration


def _parse_complex_list(value) -> list[complex]:
    if value is None:
        return []
    if isinstance(value, str):
        try:
            return [complex(v.strip().replace("i", "j")) for v in value.split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"cannot parse complex vector {value!r}") from exc
    out = []
    for v in value:
        if isinstance(v, (list, tuple)) and len(v) == 2:
            out.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, str):
            out.append(complex(v.replace("i", "j")))
        else:
            out.append(complex(v))
    return out


def _parse_int_list(value) -> list[int]:
    if value is None:
        return []
    if isinstance(value, str):
        try:
            return [int(v) for v in value.split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"cannot parse integer list {value!r}") from exc
    return [int(v) for v in value]


@dataclass
class ExperimentConfig:
    command: str
    d: int = 1
    M: int = 16
    t: float = 1.0
    N_list: list[int] = field(default_factory=lambda: [8, 16, 32, 64])
    n_list: list[int] = field(default_factory=list)
    quad_nodes: int | None = None
    series_degree: int = 24
    backend: str = "auto"
    symbol: str = "zs1 z1"
    z0: list[complex] = field(default_factory=list)
    z1: list[complex] = field(default_factory=list)
    format: str = "json"
    output: str = "-"

    def validate(self) -> ExperimentConfig:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.d < 1:
            raise ConfigError("modes must be >= 1")
        if self.M < 0:
            raise ConfigError("cutoff must be >= 0")
        if not math.isfinite(self.t) or self.t < 0:
            raise ConfigError("time must be finite and non-negative")
        if not self.N_list or any(n < 1 for n in self.N_list):
            raise ConfigError("slices must be a nonempty list of positive integers")
        if not self.n_list:
            self.n_list = [self.d]
        if any(not 1 <= n <= self.d for n in self.n_list):
            raise ConfigError(f"flag modes must lie in 1..{self.d}")
        if self.quad_nodes is not None and self.quad_nodes < 1:
            raise ConfigError("quad-nodes must be >= 1")
        if self.series_degree < 1:
            raise ConfigError("series-degree must be >= 1")
        if self.backend not in ("series", "quadrature", "auto"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        self.z0 = self.z0 or [0j] * self.d
        self.z1 = self.z1 or [0j] * self.d
        if len(self.z0) != self.d or len(self.z1) != self.d:
            raise ConfigError(f"z0 and z1 must have {self.d} components")
        return self

    def to_json(self) -> dict:
        out = asdict(self)
        out["z0"] = [[c.real, c.imag] for c in self.z0]
        out["z1"] = [[c.real, c.imag] for c in self.z1]
        return out

    @classmethod
    def from_mapping(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        data = dict(data)
        for key in ("z0", "z1"):
            if key in data:
                data[key] = _parse_complex_list(data[key])
        for key in ("N_list", "n_list"):
            if key in data:
                data[key] = _parse_int_list(data[key])
        if "command" not in data:
            raise ConfigError("missing command")
        return cls(**data)


# reports


@dataclass
class Report:
    command: str
    config: dict
    columns: list[str]
    rows: list[dict]
    summary: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls(**json.loads(text))


def emit_report(report: Report, fmt: str = "json", path: str = "-") -> str:
    """Serialize ``report``; writes to ``path`` unless it is ``'-'``. Returns the text."""
    if fmt == "json":
        text = report.to_json()
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=report.columns, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in report.rows:
            writer.writerow({k: _csv_value(v) for k, v in row.items()})
        text = buf.getvalue()
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if path != "-":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def _csv_value(v):
    if isinstance(v, float):
        return repr(v)
    return v


def load_report(path: str) -> Report:
    with open(path, encoding="utf-8") as fh:
        return Report.from_json(fh.read())


def _matrix_rows(name: str, mat: np.ndarray, tol: float = 0.0) -> list[dict]:
    rows = []
    for r, c in zip(*np.nonzero(np.abs(mat) > tol)):
        v = complex(mat[r, c])
        rows.append({"matrix": name, "row": int(r), "col": int(c), "re": v.real, "im": v.imag})
    return rows


def _cmd_symbols(cfg: ExperimentConfig, sym: PolySymbol) -> Report:
    summary = {
        "symbol": format_symbol(sym),
        "real": sym.is_real(),
        "degree": sym.degree,
        "antinormal_of_normal": format_symbol(antinormal_symbol_of(sym)),
        "normal_of_antinormal": format_symbol(normal_symbol_from_antinormal(sym)),
    }
    rows = [{"key": k, "value": v} for k, v in summary.items()]
    return Report(cfg.command, cfg.to_json(), ["key", "value"], rows, summary)


def _cmd_quantize(cfg: ExperimentConfig, sym: PolySymbol) -> Report:
    normal = normal_quantize(sym, cfg.M).data
    anti = antinormal_quantize(sym, cfg.M).data
    summary = {
        "basis": [list(a) for a in fock_basis(cfg.d, cfg.M).labels],
        "normal_re": normal.real.tolist(),
        "normal_im": normal.imag.tolist(),
        "antinormal_re": anti.real.tolist(),
        "antinormal_im": anti.imag.tolist(),
    }
    rows = _matrix_rows("normal", normal) + _matrix_rows("antinormal", anti)
    return Report(cfg.command, cfg.to_json(), ["matrix", "row", "col", "re", "im"], rows, summary)


def _cmd_propagate(cfg: ExperimentConfig, sym: PolySymbol) -> Report:
    q = cfg.quad_nodes if cfg.quad_nodes is not None else (128 if cfg.d == 1 else 24)
    base = SliceConfig(sym, cfg.t, 1, cfg.M, cfg.backend, cfg.series_degree, q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sweep = convergence_sweep(base, cfg.N_list, cfg.n_list, cfg.z0, cfg.z1)
    rows = []
    for r in sweep.reports:
        rows.append(
            {
                "N": r.N,
                "n": r.n,
                "amp_re": r.amplitude.real,
                "amp_im": r.amplitude.imag,
                "exact_re": r.exact.real,
                "exact_im": r.exact.imag,
                "abs_error": r.abs_error,
                "trunc_loss": r.truncation_loss,
                "wall_ms": round(r.wall_time * 1e3, 3),
            }
        )
    summary = {"monotone": {str(n): v for n, v in sweep.monotone.items()}}
    return Report(cfg.command, cfg.to_json(), PROPAGATE_COLUMNS, rows, summary)


def _cmd_bosonize(cfg: ExperimentConfig, sym: PolySymbol) -> Report:
    d = cfg.d
    M = max(cfg.M, d)
    basis = fermion_basis(d)
    eye = np.eye(len(basis))
    gram = np.empty((len(basis), len(basis)), dtype=complex)
    inverse = 0.0
    vecs = [FermionVector(d, {s: 1.0}) for s in basis]
    bos = [bosonize(f, M) for f in vecs]
    for i, bi in enumerate(bos):
        back = debosonize(bi)
        inverse = max(inverse, max(abs(back.coeffs.get(s, 0) - vecs[i].coeffs.get(s, 0)) for s in basis))
        for j, bj in enumerate(bos):
            gram[i, j] = inner_product(bi, bj) - fermion_inner(vecs[i], vecs[j])
    number = sum(
        (PolySymbol.monomial(tuple(int(k == i) for k in range(d)), tuple(int(k == i) for k in range(d))) for i in range(d)),
        PolySymbol(d),
    )
    conj_n = conjugate_operator(normal_quantize(number, M))
    number_defect = float(np.max(np.abs(conj_n - np.diag([len(s) for s in basis]))))
    ccr = super_ccr_residual(d) if d >= 2 else {}
    summary = {
        "isometry_residual": float(np.max(np.abs(gram))),
        "inverse_residual": float(inverse),
        "grade_dims": [math.comb(d, n) for n in range(d + 1)],
        "number_operator_residual": number_defect,
        "car_residuals": ccr,
        "identity_residual": float(np.max(np.abs(conjugate_operator(normal_quantize(PolySymbol.constant(1, d), M)) - eye))),
    }
    rows = [{"key": k, "value": json.dumps(v, sort_keys=True)} for k, v in summary.items()]
    return Report(cfg.command, cfg.to_json(), ["key", "value"], rows, summary)


def _cmd_identity(cfg: ExperimentConfig, sym: PolySymbol) -> Report:
    q = cfg.quad_nodes if cfg.quad_nodes is not None else cfg.M + 1
    res = resolution_of_identity_residual(cfg.M, q, cfg.d)
    summary = {"d": cfg.d, "M": cfg.M, "quad_nodes": q, "residual": res}
    rows = [summary]
    return Report(cfg.command, cfg.to_json(), ["d", "M", "quad_nodes", "residual"], rows, summary)


_DISPATCH = {
    "symbols": _cmd_symbols,
    "quantize": _cmd_quantize,
    "propagate": _cmd_propagate,
    "bosonize": _cmd_bosonize,
    "identity-check": _cmd_identity,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    cfg.validate()
    sym = parse_symbol_spec(cfg.symbol, cfg.d)
    return _DISPATCH[cfg.command](cfg, sym)


# argument handling


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message.replace("\n", " "))


_FLAGS = {
    "command": ("--command", str),
    "d": ("--modes", int),
    "M": ("--cutoff", int),
    "t": ("--time", float),
    "N_list": ("--slices", str),
    "n_list": ("--flag-modes", str),
    "symbol": ("--symbol", str),
    "z0": ("--z0", str),
    "z1": ("--z1", str),
    "quad_nodes": ("--quad-nodes", int),
    "series_degree": ("--series-degree", int),
    "backend": ("--backend", str),
    "output": ("--output", str),
    "format": ("--format", str),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="fockquant", description="Bargmann-Fock quantization experiments.")
    for dest, (flag, typ) in _FLAGS.items():
        parser.add_argument(flag, dest=dest, type=typ, default=None)
    parser.add_argument("--config", default=None, help="JSON config file; flags override its values")
    return parser


def config_from_args(argv) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    data: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    for dest in _FLAGS:
        value = getattr(args, dest)
        if value is not None:
            data[dest] = value
    return ExperimentConfig.from_mapping(data)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        report = run_experiment(cfg)
        text = emit_report(report, cfg.format, cfg.output)
    except FockQuantError as exc:
        print(f"{exc.code}: {' '.join(str(exc).split())}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"E_VALUE: {' '.join(str(exc).split())}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"E_IO: {' '.join(str(exc).split())}", file=sys.stderr)
        return 3
    if cfg.output == "-":
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
