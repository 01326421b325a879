from pathlib import Path
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from app.models.sieve import SieveKind

CheckStatus = Literal["pass", "fail", "inconclusive", "skipped"]
BACKENDS = {"inline", "threads", "celery"}


# Campaign configuration
class CampaignConfig(BaseModel):
    command: str = Field(..., min_length=1, description="Subcommand name")
    target: Optional[str] = Field(None, description="tau argument: n, a^k or a..b")
    bound: Optional[int] = Field(None, ge=1, description="Bound for powerful numbers")
    p_max: Optional[int] = Field(None, ge=2, description="Largest prime in the smooth search")
    m_max: Optional[int] = Field(None, ge=3, description="Largest m in the smooth search")
    p_limit: int = Field(11, ge=2, description="Smoothness bound P")
    limit: Optional[int] = Field(None, ge=1, description="q-expansion limit")
    kind: Optional[SieveKind] = Field(None, description="Sieve kind")
    kappa: List[int] = Field(default_factory=list, description="kappa values for the sieve")
    q: Optional[int] = Field(None, ge=3, description="Odd prime q")
    modulus: Optional[int] = Field(None, ge=22, description="Sieve modulus M")
    ell_bound: Optional[int] = Field(None, ge=5, description="Bound on ell for the sieve")
    levels: List[int] = Field(default_factory=list, description="Restrict the sieve to these levels")
    eigendata: List[str] = Field(default_factory=list, description="Eigendata files or directories")
    curves: List[str] = Field(default_factory=list, description="Extra curve-model files")
    fixture: Optional[str] = Field(None, description="Diophantine fixture file")
    box: Optional[int] = Field(None, ge=1, description="Box size for box-search")
    exp_cap: Optional[int] = Field(None, ge=0, description="Exponent cap for box-search")
    n_max: Optional[int] = Field(None, ge=1, description="Index bound")
    n: Optional[int] = Field(None, ge=3, description="Form degree for bound calculators")
    s: Optional[int] = Field(None, ge=1, description="Number of primes for bound calculators")
    m: Optional[int] = Field(None, ge=3, description="Conductor for the class-number-regulator bound")
    p: Optional[int] = Field(None, ge=2, description="Prime for the lucas command")
    threads: Optional[int] = Field(None, ge=1, le=256, description="Worker threads")
    backend: Optional[str] = Field(None, description="inline, threads or celery")
    report: Optional[str] = Field(None, description="Report output path")
    output: Optional[str] = Field(None, description="Output path for exported data")
    with_sieves: bool = Field(False, description="Include the rational-level sieve campaigns")
    factor: bool = Field(False, description="Also compute P(tau) with the factorization budget")

    @field_validator("eigendata", "curves")
    @classmethod
    def validate_paths_exist(cls, v):
        missing = [path for path in v if not Path(path).exists()]
        if missing:
            raise ValueError(f"Files not found: {', '.join(missing)}")
        return v

    @field_validator("fixture")
    @classmethod
    def validate_fixture_exists(cls, v):
        if v is not None and not Path(v).is_file():
            raise ValueError(f"Fixture file not found: {v}")
        return v

    @field_validator("backend")
    @classmethod
    def validate_backend(cls, v):
        if v is not None and v not in BACKENDS:
            raise ValueError(f"Invalid backend: {v}. Valid backends: {sorted(BACKENDS)}")
        return v

    @field_validator("kappa")
    @classmethod
    def validate_kappa(cls, v):
        if any(k % 2 == 0 for k in v):
            raise ValueError("kappa values must be odd")
        return v

    @field_validator("levels")
    @classmethod
    def validate_levels(cls, v):
        if any(level <= 0 for level in v):
            raise ValueError("levels must be positive")
        return v

    def parameters(self) -> Dict[str, object]:
        """Explicitly set parameters, in sorted order, for the report echo."""
        values = self.model_dump(mode="json", exclude={"command", "report"}, exclude_defaults=True)
        return dict(sorted(values.items()))


# Report Schemas
class CheckEntry(BaseModel):
    name: str
    status: CheckStatus
    detail: str = ""


class CampaignReport(BaseModel):
    command: str
    parameters: Dict[str, object] = Field(default_factory=dict)
    checks: List[CheckEntry] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    digests: Dict[str, str] = Field(default_factory=dict)
    version: str = ""
    timings: Dict[str, float] = Field(default_factory=dict)

    def add(self, name: str, status: CheckStatus, detail: str = "") -> CheckEntry:
        entry = CheckEntry(name=name, status=status, detail=detail)
        self.checks.append(entry)
        return entry

    def check(self, name: str, ok: bool, detail: str = "") -> CheckEntry:
        return self.add(name, "pass" if ok else "fail", detail)

    def extend(self, other: "CampaignReport") -> None:
        self.checks.extend(other.checks)
        self.notes.extend(other.notes)
        self.digests.update(other.digests)

    def sorted_checks(self) -> List[CheckEntry]:
        return sorted(self.checks, key=lambda c: c.name)

    def count(self, status: CheckStatus) -> int:
        return sum(1 for c in self.checks if c.status == status)

    @property
    def exit_code(self) -> int:
        return 1 if self.count("fail") or self.count("inconclusive") else 0
