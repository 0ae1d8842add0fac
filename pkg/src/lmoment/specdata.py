"""Hecke eigenvalue ingestion and the direct non-vanishing path: evaluate
L(1/2, f) * L(1/2, Sym^2 f) per form and report whether the product clears
the truncation noise floor.

File format (UTF-8 text): header lines

    # level=<int> weight=<int> label=<text> normalization=hecke [norm=<float>]

followed by lines "<n> <lambda_n>" with n consecutive from 1; records are
separated by a line "---".  The normalization flag is mandatory so files in
other conventions fail loudly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .afe import (
    AfeValue,
    WeightSpec,
    WeightTables,
    _decay_cutoff,
    _tail_envelope,
    afe_L_f,
    afe_L_sym2,
)
from .arith import divisor_count, is_prime
from .errors import CoverageError, ParseError, ValidationError

BUNDLED_SAMPLE = "delta_k12_hecke.txt"

# tolerances for the ingestion-time identity checks
_EXACT_TOL = 1e-12
_HECKE_TOL = 1e-9


@dataclass(frozen=True)
class EigenvalueRecord:
    """One form's Hecke-normalized eigenvalue sequence (lambdas[0] is
    lambda(1) = 1)."""

    level: int
    weight: int
    label: str
    lambdas: tuple[float, ...]
    petersson_norm: float | None = None
    source: str = ""

    def lam(self, n: int) -> float:
        return self.lambdas[n - 1]

    def spectral_weight(self) -> float:
        """w_f^(-1) = Gamma(k-1) / ((4 pi)^(k-1) |f|^2); needs the norm."""
        if self.petersson_norm is None:
            raise ValidationError(
                f"record {self.label}: spectral weight needs petersson norm data"
            )
        k = self.weight
        return math.exp(
            math.lgamma(k - 1) - (k - 1) * math.log(4 * math.pi)
        ) / self.petersson_norm


def _validate_record(rec: EigenvalueRecord) -> None:
    lam = rec.lambdas
    n_max = len(lam)
    if n_max < 1 or abs(lam[0] - 1.0) > _EXACT_TOL:
        raise ValidationError(f"record {rec.label}: lambda(1) must be 1")
    # multiplicativity on coprime pairs
    for m in range(2, min(40, n_max) + 1):
        for n in range(m + 1, n_max // m + 1):
            if math.gcd(m, n) != 1:
                continue
            if abs(lam[m - 1] * lam[n - 1] - lam[m * n - 1]) > _HECKE_TOL:
                raise ValidationError(
                    f"record {rec.label}: multiplicativity fails at "
                    f"lambda({m})*lambda({n}) != lambda({m * n})"
                )
    p = 2
    while p <= n_max:
        if is_prime(p):
            if abs(lam[p - 1]) > 2.0 + _HECKE_TOL:
                raise ValidationError(
                    f"record {rec.label}: Deligne bound fails at lambda({p})"
                )
            if p != rec.level and p * p <= n_max:
                if abs(lam[p - 1] ** 2 - lam[p * p - 1] - 1.0) > _HECKE_TOL:
                    raise ValidationError(
                        f"record {rec.label}: Hecke relation "
                        f"lambda({p})^2 = lambda({p * p}) + 1 fails"
                    )
        p += 1


def _parse_header_line(line: str, lineno: int, fields: dict) -> None:
    for token in line[1:].split():
        if "=" not in token:
            raise ParseError(f"line {lineno}: malformed header token {token!r}")
        key, value = token.split("=", 1)
        fields[key] = value


def _finish_record(fields: dict, pairs: list, lineno: int) -> EigenvalueRecord:
    for required in ("level", "weight", "label"):
        if required not in fields:
            raise ParseError(f"line {lineno}: record header missing {required}=")
    if fields.get("normalization") != "hecke":
        raise ParseError(
            f"line {lineno}: record {fields.get('label')!r} lacks "
            "normalization=hecke (mixed conventions fail loudly)"
        )
    for i, (n, _) in enumerate(pairs, start=1):
        if n != i:
            raise ParseError(
                f"line {lineno}: record {fields['label']!r} indices must be "
                f"consecutive from 1 (found {n} at position {i})"
            )
    rec = EigenvalueRecord(
        level=int(fields["level"]),
        weight=int(fields["weight"]),
        label=fields["label"],
        lambdas=tuple(v for _, v in pairs),
        petersson_norm=float(fields["norm"]) if "norm" in fields else None,
        source=fields.get("source", ""),
    )
    _validate_record(rec)
    return rec


def parse_eigenfile(stream) -> list[EigenvalueRecord]:
    """Parse and validate an eigenvalue file (text stream or string)."""
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = stream.read().splitlines()
    records: list[EigenvalueRecord] = []
    fields: dict = {}
    pairs: list[tuple[int, float]] = []
    started = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "---":
            if started:
                records.append(_finish_record(fields, pairs, lineno))
            fields, pairs, started = {}, [], False
            continue
        if line.startswith("#"):
            started = True
            _parse_header_line(line, lineno, fields)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected '<n> <lambda>', got {raw!r}")
        try:
            pairs.append((int(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        started = True
    if started:
        records.append(_finish_record(fields, pairs, len(lines)))
    return records


def serialize_records(records: list[EigenvalueRecord]) -> str:
    """Inverse of parse_eigenfile (round-trips exactly via repr)."""
    blocks = []
    for rec in records:
        header = (
            f"# level={rec.level} weight={rec.weight} label={rec.label} "
            "normalization=hecke"
        )
        if rec.petersson_norm is not None:
            header += f" norm={rec.petersson_norm!r}"
        body = "\n".join(f"{n} {v!r}" for n, v in enumerate(rec.lambdas, start=1))
        blocks.append(header + "\n" + body)
    return "\n---\n".join(blocks) + "\n"


def load_bundled_sample() -> list[EigenvalueRecord]:
    """The packaged weight-12 level-1 fixture."""
    text = resources.files("lmoment").joinpath(f"data/{BUNDLED_SAMPLE}").read_text()
    return parse_eigenfile(text)


@dataclass(frozen=True)
class NonvanishingReport:
    label: str
    L_f: float
    L_sym2: float
    product: float
    verdict: str  # "nonzero" | "below-threshold"
    truncation_tail: float
    mode: str

    CSV_COLUMNS = ("label", "L_f", "L_sym2", "product", "verdict", "truncation_tail", "mode")

    def csv_row(self) -> tuple:
        return (
            self.label,
            repr(self.L_f),
            repr(self.L_sym2),
            repr(self.product),
            self.verdict,
            repr(self.truncation_tail),
            self.mode,
        )

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "L_f": self.L_f,
            "L_sym2": self.L_sym2,
            "product": self.product,
            "verdict": self.verdict,
            "truncation_tail": self.truncation_tail,
            "mode": self.mode,
        }


def _level1_tables(k: int, contour) -> WeightTables:
    # conductor-1 machinery test: level factor off, unit argument scale
    return WeightTables(k, 2, contour=contour, include_level_factor=False)


def level1_L_f(lambdas, k: int, contour=None, min_cutoff: int = 0) -> AfeValue:
    """Machinery-test variant of the degree-two AFE at conductor 1: the
    level factor and the root-number term are switched off."""
    lam = np.asarray(lambdas, dtype=np.float64)
    tables = _level1_tables(k, contour)
    cutoff = max(_decay_cutoff(tables.w_at, 1.0), min_cutoff)
    if lam.size < cutoff:
        raise CoverageError(f"level1_L_f: need lambda(m) for m <= {cutoff}")
    m = np.arange(1, cutoff + 1)
    value = float(np.sum(lam[:cutoff] / np.sqrt(m) * tables.w_at(m.astype(float))))
    tail = _tail_envelope(tables.w_at, 1.0, cutoff)
    return AfeValue(value=value, tail_bound=tail, cutoff=cutoff)


def level1_L_sym2(lambdas, k: int, contour=None, min_cutoff: int = 0) -> AfeValue:
    """Machinery-test variant of the symmetric-square AFE at conductor 1."""
    lam = np.asarray(lambdas, dtype=np.float64)
    tables = _level1_tables(k, contour)
    cutoff = max(_decay_cutoff(tables.v_at, 1.0), min_cutoff)
    if lam.size < cutoff * cutoff:
        raise CoverageError(
            f"level1_L_sym2: need lambda(n^2) for n <= {cutoff} "
            f"(sequence through {cutoff * cutoff})"
        )
    n = np.arange(1, cutoff + 1)
    value = 2.0 * float(
        np.sum(lam[n * n - 1] / np.sqrt(n) * tables.v_at(n.astype(float)))
    )
    ext = np.arange(cutoff + 1, 4 * cutoff + 1)
    vals = np.abs(tables.v_at(ext.astype(float)))
    tau = np.array([divisor_count(int(x * x)) for x in ext], dtype=np.float64)
    tail = 2.0 * (float(np.sum(tau / np.sqrt(ext) * vals)) + 10.0 * float(vals[-1]))
    return AfeValue(value=value, tail_bound=tail, cutoff=cutoff)


def _report_one(rec: EigenvalueRecord, spec: WeightSpec) -> NonvanishingReport:
    if rec.weight != spec.weight:
        raise ValidationError(
            f"record {rec.label}: weight {rec.weight} does not match spec "
            f"weight {spec.weight}"
        )
    if rec.level == 1:
        mode = "level1-machinery-test"
        lf = level1_L_f(rec.lambdas, rec.weight, spec.contour)
        ls = level1_L_sym2(rec.lambdas, rec.weight, spec.contour)
    else:
        if rec.level != spec.level:
            raise ValidationError(
                f"record {rec.label}: level {rec.level} does not match spec "
                f"level {spec.level}"
            )
        mode = "prime-level"
        lf = afe_L_f(rec.lambdas, spec)
        ls = afe_L_sym2(rec.lambdas, spec)
    product = lf.value * ls.value
    combined = (
        abs(lf.value) * ls.tail_bound
        + abs(ls.value) * lf.tail_bound
        + lf.tail_bound * ls.tail_bound
    )
    verdict = "nonzero" if abs(product) > 10.0 * combined else "below-threshold"
    return NonvanishingReport(
        label=rec.label,
        L_f=lf.value,
        L_sym2=ls.value,
        product=product,
        verdict=verdict,
        truncation_tail=combined,
        mode=mode,
    )


def nonvanishing_report(
    records: list[EigenvalueRecord], spec: WeightSpec, threads: int = 1
) -> list[NonvanishingReport]:
    """Per-form central-value products with honest tail accounting.

    Level-1 records run in the conductor-1 machinery-test mode; prime-level
    records must match spec.level and use the full AFE with root-number term.
    """
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda r: _report_one(r, spec), records))
    return [_report_one(r, spec) for r in records]
