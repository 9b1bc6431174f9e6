"""Line-delimited run report.

Every line is one JSON object whose ``record`` field names its kind: ``config``, ``transcript``,
``eigen``, ``accuracy``, ``storage``, ``keys``, ``conformance`` or ``qr_bench`` / ``compare_bench``
for the benchmark commands. Measured wall time only appears in ``timing`` records, which ``e2e`` writes
when asked to; everything else is a function of the configuration and seed. :func:`parse_report`
validates each line against its schema.
"""

from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from .transcript import Transcript


class ReportRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConfigRecord(ReportRecord):
    record: Literal["config"] = "config"
    values: dict[str, Any]
    graph: Annotated[str, Field(examples=["synthetic:pa,1000,5"])]
    n_nodes: Annotated[int, Field(ge=0)]
    n_arcs: Annotated[int, Field(ge=0)]
    d_max: Annotated[int, Field(ge=1)]
    compare_backend: str


class TranscriptRecord(ReportRecord):
    record: Literal["transcript"] = "transcript"
    transcript: Transcript


class TimingRecord(ReportRecord):
    record: Literal["timing"] = "timing"
    phase: str
    compute_ms: Annotated[float, Field(ge=0)]
    wall_ms: Annotated[float, Field(ge=0)]


class EigenRecord(ReportRecord):
    record: Literal["eigen"] = "eigen"
    eigenvalues: list[float]
    sigma: Annotated[float, Field(gt=0)]
    shift: float
    max_subdiagonal: Annotated[float, Field(ge=0)]
    converged: bool


class AccuracyRecord(ReportRecord):
    record: Literal["accuracy"] = "accuracy"
    oracle_eigenvalues: list[float] | None
    plaintext_eigenvalues: list[float]
    rmse_secure_vs_plaintext: Annotated[float, Field(ge=0)]
    rmse_secure_vs_oracle: Annotated[float, Field(ge=0)] | None
    rmse_plaintext_vs_oracle: Annotated[float, Field(ge=0)] | None
    eigenvector_rmse_secure_vs_plaintext: Annotated[float, Field(ge=0)]
    oracle_note: str | None = None


class StorageRecord(ReportRecord):
    record: Literal["storage"] = "storage"
    epsilon: Annotated[float, Field(gt=0)]
    bins: Annotated[int, Field(ge=1)]
    binning_map: str
    dense_bytes: Annotated[int, Field(ge=0)] | None
    single_bin_bytes: Annotated[int, Field(ge=0)]
    binned_bytes: Annotated[int, Field(ge=0)]
    saving_vs_dense: float | None
    saving_vs_single_bin: float | None


class KeysRecord(ReportRecord):
    record: Literal["keys"] = "keys"
    count: Annotated[int, Field(ge=0)]
    total_bytes: Annotated[int, Field(ge=0)]
    domain_bits: Annotated[int, Field(ge=1)]


class ConformanceCheck(BaseModel):
    """One measured quantity against its closed form (``exact``) or asymptotic exponent."""

    phase: str
    quantity: str
    expected: float
    measured: float
    exact: bool
    passed: bool


class ConformanceRecord(ReportRecord):
    record: Literal["conformance"] = "conformance"
    checks: list[ConformanceCheck]
    passed: bool


class QrBenchRecord(ReportRecord):
    record: Literal["qr_bench"] = "qr_bench"
    m: Annotated[int, Field(ge=2)]
    sweeps: Annotated[int, Field(ge=1)]
    ring_bits: Annotated[int, Field(ge=8)] = 128
    basic_elements: Annotated[int, Field(ge=0)]
    optimized_elements: Annotated[int, Field(ge=0)]
    basic_bytes: Annotated[int, Field(ge=0)]
    optimized_bytes: Annotated[int, Field(ge=0)]
    saving: float
    formula_saving: float


class CompareBenchRecord(ReportRecord):
    record: Literal["compare_bench"] = "compare_bench"
    backend: str
    bits: Annotated[int, Field(ge=2)]
    latency_ms: Annotated[float, Field(ge=0)]
    count: Annotated[int, Field(ge=1)]
    rounds: Annotated[int, Field(ge=0)]
    bytes: Annotated[int, Field(ge=0)]
    network_ms: Annotated[float, Field(ge=0)]
    wall_ms: Annotated[float, Field(ge=0)]


AnyRecord = Annotated[
    ConfigRecord
    | TranscriptRecord
    | TimingRecord
    | EigenRecord
    | AccuracyRecord
    | StorageRecord
    | KeysRecord
    | ConformanceRecord
    | QrBenchRecord
    | CompareBenchRecord,
    Field(discriminator="record"),
]

_record_adapter: TypeAdapter[Any] = TypeAdapter(AnyRecord)


class RunReport(BaseModel):
    records: list[AnyRecord] = []

    def add(self, record: ReportRecord) -> None:
        self.records.append(record)  # type: ignore[arg-type]

    def of_kind(self, kind: str) -> list[Any]:
        return [record for record in self.records if record.record == kind]

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.of_kind("conformance"))

    def to_lines(self) -> str:
        return "".join(record.model_dump_json() + "\n" for record in self.records)


def parse_record(line: str) -> Any:
    return _record_adapter.validate_json(line)


def parse_report(text: str) -> RunReport:
    """Rebuild a report from its line-delimited form; raises ``pydantic.ValidationError`` on bad lines."""
    return RunReport(records=[parse_record(line) for line in text.splitlines() if line.strip()])
