"""From raw shots to detection events and syndrome-derived error rates.

A detection event is the XOR of an auxiliary's outcomes in consecutive
rounds, with round T+1 inferred from the parity of the final transversal
code-qubit readout. A fault on the central code qubit between two rounds
fires both of its auxiliaries' detectors in the later round, so the
coincidence statistics of that detector pair estimate the central qubit's
idle error probability.

The estimator inverts the shared/independent fault model: with detector
means v_i, v_j and covariance C, the shared-fault probability is

    p = 1/2 - 1/(2 * sqrt(1 + 4C / ((1 - 2 v_i)(1 - 2 v_j))))

which is algebraically exact for that model (and reduces to the familiar
first-order C / ((1-2v_i)(1-2v_j)) for small rates, exposed as a cross-check
mode). Standard errors come from a nonparametric bootstrap over shots,
implemented as multinomial resampling of the 2x2 joint counts.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit

Detector = tuple[int, int]  # (auxiliary qubit, round), rounds 1..T+1

MIN_RECOMMENDED_SHOTS = 1000
DEFAULT_BOOTSTRAP_RESAMPLES = 200


class EstimationError(ValueError):
    """Detector statistics outside what the fault model can describe."""


class AntiCorrelationError(EstimationError):
    """Anti-correlation stronger than the shared-fault model allows."""


@dataclass(frozen=True)
class DetectionMatrix:
    """shots x detectors bit matrix; columns ordered round-major."""

    data: np.ndarray
    detectors: tuple[Detector, ...]
    rounds: int
    encoding: str

    @property
    def shots(self) -> int:
        return int(self.data.shape[0])

    def column(self, detector: Detector) -> np.ndarray:
        return self.data[:, self.detectors.index(detector)]


def detection_events(circuit: Circuit, shots: np.ndarray) -> DetectionMatrix:
    """Derive detection events from raw measurement records.

    d(a, 1) = s(a, 1); d(a, r) = s(a, r) XOR s(a, r-1); and the effective
    final round d(a, T+1) = s(a, T) XOR m_left XOR m_right over the final
    readouts of a's code neighbors. Noise-free circuits give the all-zero
    matrix for either logical value, since equal code bits cancel in parity.
    """
    shots = np.asarray(shots, dtype=np.uint8)
    if shots.ndim != 2 or shots.shape[1] != circuit.n_slots:
        raise ValueError(
            f"shots have {shots.shape[1] if shots.ndim == 2 else '?'} slots, "
            f"circuit has {circuit.n_slots}"
        )
    aux = circuit.aux_qubits
    rounds = circuit.rounds
    columns = []
    detectors: list[Detector] = []
    syndrome = {
        (a, r): shots[:, circuit.aux_slots[(a, r)]] for a in aux for r in range(1, rounds + 1)
    }
    for r in range(1, rounds + 2):
        for a in aux:
            if r == 1:
                col = syndrome[(a, 1)]
            elif r <= rounds:
                col = syndrome[(a, r)] ^ syndrome[(a, r - 1)]
            else:
                left, right = circuit.neighbors_in_line(a)
                final = shots[:, circuit.final_slots[left]] ^ shots[:, circuit.final_slots[right]]
                col = syndrome[(a, rounds)] ^ final
            columns.append(col)
            detectors.append((a, r))
    return DetectionMatrix(
        data=np.stack(columns, axis=1),
        detectors=tuple(detectors),
        rounds=rounds,
        encoding=circuit.encoding,
    )


@dataclass(frozen=True)
class RateEstimate:
    estimate: float
    stderr: float
    shots: int
    detector_pair: tuple[Detector, Detector]
    rate_type: str = ""
    encoding: str = ""
    anticorrelated: bool = False


def estimate_from_moments(v_i: float, v_j: float, joint: float, method: str = "exact") -> float:
    """Shared-fault probability from detector moments (exact inversion, or
    the first-order form as a cross-check).

    Raises EstimationError when a detector mean reaches 1/2 (the model's
    denominator vanishes: broken data) and AntiCorrelationError when the
    covariance is more negative than the model allows (radicand <= 0). Small
    negative returns near p = 0 are ordinary sampling noise.
    """
    c = joint - v_i * v_j
    denom = (1.0 - 2.0 * v_i) * (1.0 - 2.0 * v_j)
    if denom <= 0.0:
        raise EstimationError(
            f"detector rates v_i={v_i:.4f}, v_j={v_j:.4f} reach 1/2; data is "
            "outside the fault model"
        )
    if method == "first_order":
        return c / denom
    radicand = 1.0 + 4.0 * c / denom
    if radicand <= 0.0:
        raise AntiCorrelationError(
            f"covariance {c:.3e} exceeds the model's anti-correlation bound"
        )
    return 0.5 - 0.5 / math.sqrt(radicand)


def correlation_rate(
    dm: DetectionMatrix,
    det_i: Detector,
    det_j: Detector,
    *,
    resamples: int = DEFAULT_BOOTSTRAP_RESAMPLES,
    seed=0,
    method: str = "exact",
    rate_type: str = "",
) -> RateEstimate:
    """Shared-fault probability for a detector pair, with bootstrap SE."""
    if det_i == det_j:
        raise ValueError("detector pair must be two distinct detectors")
    if method not in ("exact", "first_order"):
        raise ValueError(f"unknown method {method!r}")
    n = dm.shots
    if n < MIN_RECOMMENDED_SHOTS:
        warnings.warn(
            f"only {n} shots for detector pair {det_i}/{det_j}; estimates will be noisy",
            stacklevel=2,
        )
    di = dm.column(det_i).astype(np.int64)
    dj = dm.column(det_j).astype(np.int64)
    counts = np.bincount(2 * di + dj, minlength=4)  # n00, n01, n10, n11

    def from_counts(c) -> float:
        total = float(c.sum())
        v_i = (c[2] + c[3]) / total
        v_j = (c[1] + c[3]) / total
        return estimate_from_moments(v_i, v_j, c[3] / total, method)

    anticorrelated = False
    try:
        point = from_counts(counts)
    except AntiCorrelationError:
        point = 0.0
        anticorrelated = True
    rng = np.random.default_rng(seed if isinstance(seed, int) else list(seed))
    resampled = rng.multinomial(n, counts / n, size=resamples)
    values = np.empty(resamples)
    for k in range(resamples):
        try:
            values[k] = from_counts(resampled[k])
        except AntiCorrelationError:
            values[k] = 0.0
        except EstimationError:
            values[k] = 0.5
    stderr = float(np.std(values))
    return RateEstimate(
        estimate=max(0.0, point),
        stderr=stderr,
        shots=n,
        detector_pair=(det_i, det_j),
        rate_type=rate_type,
        encoding=dm.encoding,
        anticorrelated=anticorrelated,
    )


def extract_idle_rates(
    circuit: Circuit,
    dm: DetectionMatrix,
    rnd: int = 2,
    *,
    resamples: int = DEFAULT_BOOTSTRAP_RESAMPLES,
    seed=0,
) -> RateEstimate:
    """Central-qubit idle error rate from the two adjacent detectors of
    round `rnd` (first and effective-final rounds are excluded by
    construction: only 2 <= rnd <= T qualifies).

    The bit-flip encoding resolves the direction by logical value (logical 1
    exposes 1->0 decay, logical 0 exposes 0->1 excitation); the phase-flip
    encoding measures the plus/minus flip rate.
    """
    if len(circuit.line) != 5:
        raise ValueError("idle-rate extraction expects a distance-3 line of five qubits")
    if not 2 <= rnd <= circuit.rounds:
        raise ValueError(f"round {rnd} not in 2..{circuit.rounds}")
    left_aux, right_aux = circuit.aux_qubits
    if circuit.encoding == "phase_flip":
        rate_type = "p_phase"
    else:
        rate_type = "p_1to0" if circuit.logical_value == 1 else "p_0to1"
    return correlation_rate(
        dm,
        (left_aux, rnd),
        (right_aux, rnd),
        resamples=resamples,
        seed=seed,
        rate_type=rate_type,
    )


@dataclass(frozen=True)
class QubitBenchmark:
    """Everything measured for one benchmarked qubit."""

    qubit: int
    line: tuple[int, ...]
    rates: dict[str, RateEstimate]
    guides: dict[str, float]
    exposure_ns: dict[str, int]  # per encoding
    p0_estimate: float | None = None


@dataclass(frozen=True)
class BenchmarkReport:
    results: tuple[QubitBenchmark, ...]
    medians: dict[str, float]
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": "synbench-report@1",
            "metadata": self.metadata,
            "medians": self.medians,
            "qubits": [
                {
                    "qubit": r.qubit,
                    "line": list(r.line),
                    "exposure_ns": r.exposure_ns,
                    "p0_estimate": r.p0_estimate,
                    "rates": {
                        key: {
                            "estimate": est.estimate,
                            "stderr": est.stderr,
                            "shots": est.shots,
                            "anticorrelated": est.anticorrelated,
                        }
                        for key, est in r.rates.items()
                    },
                    "guides": r.guides,
                }
                for r in self.results
            ],
        }


def aggregate_device(results: list[QubitBenchmark], metadata: dict | None = None) -> BenchmarkReport:
    """Assemble per-qubit estimates into a device report with medians.

    Medians use the usual even-count rule (mean of the central pair) and are
    recomputed per rate type over the qubits that measured it.
    """
    if not results:
        raise ValueError("no benchmarked qubits to aggregate")
    ordered = tuple(sorted(results, key=lambda r: r.qubit))
    rate_keys = sorted({key for r in ordered for key in r.rates})
    medians = {
        key: float(np.median([r.rates[key].estimate for r in ordered if key in r.rates]))
        for key in rate_keys
    }
    return BenchmarkReport(results=ordered, medians=medians, metadata=metadata or {})
