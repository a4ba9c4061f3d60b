"""Pydantic request/response models for the HTTP service and the CLI."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

OutputFormat = Literal["json", "csv"]


class AnalyticRequest(BaseModel):
    p: float = Field(gt=0.5, le=1.0)
    b: int = Field(ge=1)
    w: int = Field(ge=1)


class AnalyticReport(BaseModel):
    b: int
    w: int
    p: float
    r0: float
    rstar: float
    r1: float
    F_half: float
    P_eq: Optional[float]
    bound: float


class UrnSimRequest(BaseModel):
    p: float = Field(ge=0.0, le=1.0)
    steps: int = Field(ge=1, le=10**7)
    trials: int = Field(ge=1, le=10**4)
    seed: int
    workers: int = Field(default=1, ge=1, le=64)
    format: OutputFormat = "json"


class TrajectorySummary(BaseModel):
    seed: int
    stream_index: int
    p: float
    steps: int
    leadership_changes: list[int]
    final_total: int
    final_max: int
    final_leader: int
    final_num_colours: int
    records: list[list[int]]  # rows (n, N, M, leader_id, num_colours)


class UrnSimResponse(BaseModel):
    command: str = "simulate-urn"
    seed: int
    trajectories: list[TrajectorySummary]


class TwoColourRequest(BaseModel):
    p: float = Field(ge=0.0, le=1.0)
    b: int = Field(ge=1)
    w: int = Field(ge=1)
    steps: int = Field(ge=1, le=10**7)
    trials: int = Field(ge=1, le=10**5)
    seed: int
    workers: int = Field(default=1, ge=1, le=64)
    record_path: bool = False
    format: OutputFormat = "json"

    @model_validator(mode="after")
    def _path_only_for_small_runs(self):
        if self.record_path and self.trials > 10:
            raise ValueError("record_path is limited to trials <= 10")
        return self


class TwoColourOutcomeRow(BaseModel):
    trial: int
    seed: int
    b: int
    w: int
    p: float
    final_f: float
    absorbed: str
    eq_count: int
    first_eq: Optional[int]
    steps: int


class TwoColourResponse(BaseModel):
    command: str = "two-colour"
    seed: int
    outcomes: list[TwoColourOutcomeRow]
    paths: Optional[list[list[list[int]]]] = None  # per trial: rows (B, W), row index = n


class KColourRequest(BaseModel):
    p: float = Field(ge=0.0, le=1.0)
    counts: list[int] = Field(min_length=2)
    steps: int = Field(ge=1, le=10**7)
    trials: int = Field(ge=1, le=10**5)
    seed: int
    workers: int = Field(default=1, ge=1, le=64)
    format: OutputFormat = "json"

    @model_validator(mode="after")
    def _counts_positive(self):
        if any(c < 1 for c in self.counts):
            raise ValueError("all initial counts must be >= 1")
        return self


class KColourOutcomeRow(BaseModel):
    trial: int
    fractions: list[float]
    steps: int
    single_colour_remaining: bool
    all_extinct: bool


class KColourResponse(BaseModel):
    command: str = "k-colour"
    seed: int
    outcomes: list[KColourOutcomeRow]


class BirthDeathRequest(BaseModel):
    p: float = Field(gt=0.0, le=1.0)
    t_max: Optional[float] = Field(default=None, ge=0.0)
    event_budget: Optional[int] = Field(default=None, ge=1)
    trials: int = Field(ge=1, le=10**6)
    seed: int
    workers: int = Field(default=1, ge=1, le=64)
    record_path: bool = False
    format: OutputFormat = "json"

    @model_validator(mode="after")
    def _horizon_set(self):
        if self.t_max is None and self.event_budget is None:
            raise ValueError("horizon needs t_max or event_budget")
        if self.record_path and self.trials > 10:
            raise ValueError("record_path is limited to trials <= 10")
        return self


class BirthDeathSummaryRow(BaseModel):
    trial: int
    extinct: bool
    final_population: int
    n_events: int


class BirthDeathResponse(BaseModel):
    command: str = "birth-death"
    seed: int
    p: float
    summaries: list[BirthDeathSummaryRow]
    paths: Optional[list[dict]] = None  # per trial: {"times": [...], "populations": [...]}


class VerifyEqualizationRequest(BaseModel):
    p: float = Field(gt=0.5, le=1.0)
    b: int = Field(ge=1)
    w: int = Field(ge=1)
    trials: int = Field(ge=1, le=10**6)
    max_steps: int = Field(default=10**5, ge=1, le=10**7)
    seed: int
    workers: int = Field(default=1, ge=1, le=64)

    @model_validator(mode="after")
    def _order(self):
        if not self.b > self.w:
            raise ValueError("equalization verification needs b > w")
        return self


class VerifyFixedPointRequest(BaseModel):
    p: float = Field(gt=0.5, le=1.0)
    n_samples: int = Field(default=10**5, ge=100, le=10**7)
    seed: int


class VerifyExponentRequest(BaseModel):
    p: float = Field(ge=0.0, le=1.0)
    trajectories: int = Field(default=50, ge=10, le=10**3)
    steps: int = Field(default=10**6, ge=100, le=10**7)
    n_min: int = Field(default=10**4, ge=1)
    seed: int
    workers: int = Field(default=1, ge=1, le=64)


class VerifyDominanceRequest(BaseModel):
    p: float = Field(ge=0.0, le=1.0)
    trajectories: int = Field(default=100, ge=10, le=10**4)
    steps: int = Field(default=10**5, ge=100, le=10**7)
    seed: int
    workers: int = Field(default=1, ge=1, le=64)


class VerifyReport(BaseModel):
    command: str
    params: dict
    seed: int
    results: dict
    passed: bool = Field(serialization_alias="pass")

    def as_json_dict(self) -> dict:
        return self.model_dump(by_alias=True)
