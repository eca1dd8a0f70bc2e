"""
Run configuration schemas
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from qpart.core.config import settings

SCHEMA_VERSION = 1


def _check_nu(v: float) -> float:
    if not 0 <= v < 0.5:
        raise ValueError("nu must lie in [0, 0.5)")
    return v


class FmConfig(BaseModel):
    """Modified Fiduccia-Mattheyses settings"""
    model_config = ConfigDict(frozen=True)

    nu: float = settings.DEFAULT_NU
    max_passes: int = Field(10, ge=1)
    single_pass: bool = False
    audit: bool = False  # compare incremental gains with recomputation after each move

    @field_validator("nu")
    @classmethod
    def validate_nu(cls, v: float) -> float:
        return _check_nu(v)


class IterationConfig(BaseModel):
    """Iterative solver settings"""
    model_config = ConfigDict(frozen=True)

    p: int = Field(5, ge=1)
    delta: float = 1.0
    shots: int = Field(5000, ge=1)
    n_iter: int = Field(10, ge=1)
    top_k: int = Field(50, ge=1)
    eta: int = 1
    c_factor: Optional[int] = Field(None, ge=1)  # None keeps every term
    fm_on_samples: bool = True
    early_stop: bool = False
    seed: int = Field(..., ge=0)

    @field_validator("eta")
    @classmethod
    def validate_eta(cls, v: int) -> int:
        if v not in (-1, 1):
            raise ValueError("eta must be -1 or +1")
        return v


class ScreeningConfig(BaseModel):
    """Spectral coarsening with screening settings"""
    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1)
    d: Optional[int] = Field(None, ge=1)
    n_screen: int = Field(8, ge=1)
    n_trials: int = Field(100, ge=1)
    nu: float = settings.DEFAULT_NU
    seed: int = Field(..., ge=0)

    @field_validator("nu")
    @classmethod
    def validate_nu(cls, v: float) -> float:
        return _check_nu(v)


class DissectionConfig(BaseModel):
    """Nested dissection settings"""
    model_config = ConfigDict(frozen=True)

    levels: int = Field(..., ge=1)
    quantum_levels: List[int] = [1]
    min_block_size: int = Field(settings.MIN_BLOCK_SIZE, ge=1)

    @field_validator("quantum_levels")
    @classmethod
    def validate_quantum_levels(cls, v: List[int]) -> List[int]:
        if any(level < 1 for level in v):
            raise ValueError("quantum levels are 1-based")
        return sorted(set(v))


class RunConfig(BaseModel):
    """Fully resolved command configuration, embedded in every report"""
    model_config = ConfigDict(extra="forbid")

    schema_version: int = SCHEMA_VERSION
    command: str

    # Inputs and outputs
    graph: Optional[str] = None
    matrix: Optional[str] = None
    perm: Optional[str] = None
    out: Optional[str] = None
    report: Optional[str] = None
    log: Optional[str] = None
    coarse_map: Optional[str] = None

    # Objective
    nu: float = settings.DEFAULT_NU
    lam: float = Field(settings.DEFAULT_LAMBDA, gt=0)

    # Coarsening
    k: Optional[int] = Field(None, ge=1)
    d: Optional[int] = Field(None, ge=1)
    n_screen: int = Field(8, ge=1)
    n_trials: int = Field(100, ge=1)

    # Circuit and iterative solver
    preset: Optional[str] = None
    delta: float = 1.0
    p: int = Field(5, ge=1)
    shots: int = Field(5000, ge=0)
    n_iter: int = Field(10, ge=1)
    top_k: int = Field(50, ge=1)
    eta: int = 1
    c_factor: Optional[int] = Field(None, ge=1)
    fm_on_samples: bool = True
    early_stop: bool = False
    single_pass: bool = False
    rank_candidates: int = Field(20, ge=1)

    # Ordering
    levels: int = 4
    quantum_levels: List[int] = [1]
    min_block_size: int = Field(settings.MIN_BLOCK_SIZE, ge=1)

    # Sweep
    deltas: Optional[List[float]] = None
    depths: List[int] = [1, 2, 3, 4, 5, 6]

    seed: Optional[int] = Field(None, ge=0)

    @field_validator("nu")
    @classmethod
    def validate_nu(cls, v: float) -> float:
        return _check_nu(v)

    @field_validator("eta")
    @classmethod
    def validate_eta(cls, v: int) -> int:
        if v not in (-1, 1):
            raise ValueError("eta must be -1 or +1")
        return v

    @field_validator("levels")
    @classmethod
    def validate_levels(cls, v: int) -> int:
        if v < 1:
            raise ValueError("levels must be at least 1")
        return v

    @field_validator("depths")
    @classmethod
    def validate_depths(cls, v: List[int]) -> List[int]:
        if not v or any(p < 1 for p in v):
            raise ValueError("depths must be positive")
        return v

    @model_validator(mode="after")
    def validate_seed(self) -> "RunConfig":
        # every stochastic command needs an explicit seed
        stochastic = self.command in ("partition", "order", "coarsen") or (
            self.command == "sweep" and self.shots > 0
        )
        if stochastic and self.seed is None:
            raise ValueError(f"--seed is required for {self.command}")
        return self

    def fm_config(self, single_pass: Optional[bool] = None) -> FmConfig:
        return FmConfig(
            nu=self.nu,
            single_pass=self.single_pass if single_pass is None else single_pass,
        )

    def iteration_config(self) -> IterationConfig:
        return IterationConfig(
            p=self.p,
            delta=self.delta,
            shots=max(self.shots, 1),
            n_iter=self.n_iter,
            top_k=self.top_k,
            eta=self.eta,
            c_factor=self.c_factor,
            fm_on_samples=self.fm_on_samples,
            early_stop=self.early_stop,
            seed=self.seed or 0,
        )

    def screening_config(self, k: Optional[int] = None) -> ScreeningConfig:
        return ScreeningConfig(
            k=k if k is not None else self.k,
            d=self.d,
            n_screen=self.n_screen,
            n_trials=self.n_trials,
            nu=self.nu,
            seed=self.seed or 0,
        )

    def dissection_config(self) -> DissectionConfig:
        return DissectionConfig(
            levels=self.levels,
            quantum_levels=self.quantum_levels,
            min_block_size=self.min_block_size,
        )
