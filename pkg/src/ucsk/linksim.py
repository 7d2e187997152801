"""End-to-end link evaluation over the underwater channel.

Constellation points are rendered as per-LED luminous fluxes, converted
to radiant power through the photopic efficacy, attenuated per band by
Beer-Lambert loss, and detected as a 3-vector of photocurrent amplitudes
under additive white Gaussian noise.  The module provides Monte Carlo
symbol-error simulation, the pairwise union bound, and mutual-information
rate estimates for 4-UCSK and an OOK baseline.

Reproducibility contract: all random draws come from a counter-based
Philox stream keyed by (seed, stream index) in which symbol n consumes
exactly one counter block.  Results are therefore bit-identical for a
fixed seed regardless of chunking or of the UCSK_THREADS worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.special import erfc, logsumexp, ndtri

from .channel import WaterProperties, attenuation_coefficient, path_loss
from .colorimetry import (
    ChromaticityPoint,
    OutOfGamutError,
    photopic_efficacy,
    solve_fluxes,
)
from .constellation import Constellation4, default_symbol_map
from .presets import DEFAULT_PRIMARY_CHROMATICITIES, DEFAULT_PRIMARY_WAVELENGTHS

__all__ = [
    "Primary",
    "LinkConfig",
    "HypothesisSet",
    "Curve",
    "InfeasibleConstellationError",
    "default_primaries",
    "build_hypotheses",
    "ook_hypotheses",
    "average_symbol_power",
    "noise_sigma",
    "detect_ml",
    "simulate_ser",
    "simulate_ser_hypotheses",
    "union_bound_ser",
    "union_bound_from_hypotheses",
    "mutual_information",
    "achievable_rate",
    "write_curve_csv",
    "read_curve_csv",
    "config_digest",
    "qfunc",
]

# Luminous-to-radiant conversion: 683 lm/W at the photopic peak.
LUMENS_PER_WATT_PEAK = 683.0

_CHUNK = 1 << 16


class InfeasibleConstellationError(ValueError):
    """A constellation point cannot be rendered by the configured primaries."""


@dataclass(frozen=True)
class Primary:
    """One LED: channel wavelength plus emitted chromaticity."""

    wavelength_nm: float
    chromaticity: ChromaticityPoint


def default_primaries() -> tuple[Primary, Primary, Primary]:
    """Red/green/blue LEDs at 700/550/460 nm; red and green sit on the
    spectral locus, blue keeps the fixed design chromaticity."""
    return tuple(
        Primary(wl, xy)
        for wl, xy in zip(DEFAULT_PRIMARY_WAVELENGTHS, DEFAULT_PRIMARY_CHROMATICITIES)
    )


@dataclass(frozen=True)
class LinkConfig:
    """End-to-end link parameters."""

    water: WaterProperties
    distance_m: float
    primaries: tuple[Primary, Primary, Primary] = None  # type: ignore[assignment]
    total_luminous_flux_lm: float = 12.0
    responsivity_a_per_w: float = 0.85
    electro_optic_factor: float = 0.55
    bandwidth_hz: float = 1e8
    luminous_efficacy: tuple[float, float, float] | None = None

    def __post_init__(self) -> None:
        if self.primaries is None:
            object.__setattr__(self, "primaries", default_primaries())
        if self.distance_m < 0:
            raise ValueError("distance must be >= 0")
        for name in (
            "total_luminous_flux_lm",
            "responsivity_a_per_w",
            "electro_optic_factor",
            "bandwidth_hz",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    def efficacies(self) -> tuple[float, ...]:
        if self.luminous_efficacy is not None:
            return self.luminous_efficacy
        return tuple(photopic_efficacy(p.wavelength_nm) for p in self.primaries)


@dataclass(frozen=True)
class HypothesisSet:
    """Noiseless received amplitude vectors, one row per symbol, plus the
    derivation trace (fluxes, optical powers, per-band losses)."""

    vectors: np.ndarray  # (M, K) received electrical amplitudes
    labels: tuple[str, ...]
    band_wavelengths_nm: tuple[float, ...]
    loss_factors: np.ndarray  # (K,)
    fluxes_lm: np.ndarray  # (M, n_leds)
    optical_powers_w: np.ndarray  # (M, n_leds)

    def __post_init__(self) -> None:
        for name in ("vectors", "loss_factors", "fluxes_lm", "optical_powers_w"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(self.vectors < 0):
            raise ValueError("hypothesis amplitudes must be nonnegative")

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def bands(self) -> int:
        return self.vectors.shape[1]

    def transmit_vectors(self) -> np.ndarray:
        """Amplitudes with the path loss divided back out (distance 0)."""
        return self.vectors / self.loss_factors


def build_hypotheses(c: Constellation4, cfg: LinkConfig) -> HypothesisSet:
    """Map a constellation to noiseless received 3-vectors.

    Per symbol: fluxes solve the color-mixing system at the configured
    primaries for the total flux; optical power applies the transmit
    electro-optic scale and the photopic conversion; the received
    amplitude applies responsivity and per-band Beer-Lambert loss.
    """
    prim_xy = [p.chromaticity for p in cfg.primaries]
    efficacy = cfg.efficacies()
    losses = np.array(
        [
            path_loss(
                attenuation_coefficient(cfg.water, p.wavelength_nm), cfg.distance_m
            )
            for p in cfg.primaries
        ]
    )
    symbol_map = default_symbol_map(c)
    labels = symbol_map.labels_in_symbol_order()
    fluxes = np.zeros((len(labels), 3))
    for i, label in enumerate(labels):
        point = c.point(label)
        try:
            # Designs may graze the triangle boundary within the gamut
            # tolerance; an LED driven fractionally negative floors at 0.
            fluxes[i] = solve_fluxes(
                prim_xy,
                point,
                cfg.total_luminous_flux_lm,
                negative_flux_tol=1e-3,
            )
        except OutOfGamutError as exc:
            raise InfeasibleConstellationError(
                f"symbol {label} at ({point.x}, {point.y}) is outside the "
                "source triangle of the configured primaries"
            ) from exc
    powers = (
        cfg.electro_optic_factor
        * fluxes
        / (LUMENS_PER_WATT_PEAK * np.asarray(efficacy))
    )
    vectors = cfg.responsivity_a_per_w * powers * losses
    return HypothesisSet(
        vectors=vectors,
        labels=labels,
        band_wavelengths_nm=tuple(p.wavelength_nm for p in cfg.primaries),
        loss_factors=losses,
        fluxes_lm=fluxes,
        optical_powers_w=powers,
    )


def ook_hypotheses(wavelength_nm: float, cfg: LinkConfig) -> HypothesisSet:
    """On-off keying over a single LED: hypotheses {0, on-amplitude}."""
    loss = path_loss(
        attenuation_coefficient(cfg.water, wavelength_nm), cfg.distance_m
    )
    flux = cfg.total_luminous_flux_lm
    power = (
        cfg.electro_optic_factor
        * flux
        / (LUMENS_PER_WATT_PEAK * photopic_efficacy(wavelength_nm))
    )
    amplitude = cfg.responsivity_a_per_w * power * loss
    return HypothesisSet(
        vectors=np.array([[0.0], [amplitude]]),
        labels=("off", "on"),
        band_wavelengths_nm=(wavelength_nm,),
        loss_factors=np.array([loss]),
        fluxes_lm=np.array([[0.0], [flux]]),
        optical_powers_w=np.array([[0.0], [power]]),
    )


def average_symbol_power(vectors: np.ndarray) -> float:
    """P_avg = sum of squared amplitudes over 3M (per-band average for an
    equiprobable M-ary alphabet on three nominal bands)."""
    v = np.asarray(vectors, dtype=float)
    return float(np.sum(v * v)) / (3.0 * v.shape[0])


def noise_sigma(
    h: HypothesisSet, snr_db: float, reference: str = "received"
) -> float:
    """Per-band noise standard deviation for an SNR setting.

    ``received`` references P_avg to the attenuated hypotheses (the SER
    convention); ``transmit`` references it to the distance-0 amplitudes,
    so the same knob models a receiver whose noise floor does not shrink
    with path loss (the rate-curve convention).
    """
    if reference == "received":
        p_avg = average_symbol_power(h.vectors)
    elif reference == "transmit":
        p_avg = average_symbol_power(h.transmit_vectors())
    else:
        raise ValueError(f"unknown SNR reference {reference!r}")
    return math.sqrt(p_avg / 10.0 ** (snr_db / 10.0))


def detect_ml(received: np.ndarray, h: HypothesisSet) -> int | np.ndarray:
    """Minimum-distance detection; ties break to the lowest symbol index.

    Accepts a single K-vector (returns an int) or an (N, K) batch
    (returns an int array).
    """
    r = np.asarray(received, dtype=float)
    single = r.ndim == 1
    r2 = np.atleast_2d(r)
    delta = r2[:, None, :] - h.vectors[None, :, :]
    d2 = np.einsum("nmk,nmk->nm", delta, delta)
    idx = np.argmin(d2, axis=1)
    return int(idx[0]) if single else idx


def _threads() -> int:
    raw = os.environ.get("UCSK_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _uniform_blocks(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """(count, 4) doubles in (0, 1); symbol n maps to counter block n."""
    key = np.array([seed, stream], dtype=np.uint64)
    bg = np.random.Philox(key=key, counter=start)
    raw = bg.random_raw(4 * count).reshape(count, 4)
    return (raw >> np.uint64(11)) * 2.0**-53 + 2.0**-54


def _map_chunks(worker, n: int):
    """Evaluate ``worker(start, stop)`` over the fixed chunk grid and
    return the results in chunk order (thread count cannot change it)."""
    spans = [(a, min(a + _CHUNK, n)) for a in range(0, n, _CHUNK)]
    threads = _threads()
    if threads == 1 or len(spans) == 1:
        return [worker(a, b) for a, b in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: worker(*s), spans))


def _draw_symbols_noise(
    h: HypothesisSet, sigma: float, seed: int, stream: int, start: int, stop: int
) -> tuple[np.ndarray, np.ndarray]:
    u = _uniform_blocks(seed, stream, start, stop - start)
    symbols = np.minimum((u[:, 0] * h.m).astype(np.int64), h.m - 1)
    noise = ndtri(u[:, 1 : 1 + h.bands]) * sigma
    return symbols, h.vectors[symbols] + noise


def simulate_ser_hypotheses(
    h: HypothesisSet,
    snr_db_grid,
    n_symbols: int,
    seed: int,
    *,
    snr_reference: str = "received",
) -> "Curve":
    """Monte Carlo symbol error rate over an SNR grid.

    Noise for symbol n of grid point i comes from the (seed, i) Philox
    stream at counter n, so the curve is reproducible bit-for-bit for any
    chunking or worker count.
    """
    grid = [float(s) for s in snr_db_grid]
    if not grid:
        raise ValueError("empty SNR grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("SNR grid must be strictly increasing")
    if n_symbols < 1:
        raise ValueError("n_symbols must be >= 1")
    values = []
    for stream, snr_db in enumerate(grid):
        sigma = noise_sigma(h, snr_db, snr_reference)

        def worker(a: int, b: int) -> int:
            symbols, received = _draw_symbols_noise(h, sigma, seed, stream, a, b)
            detected = detect_ml(received, h)
            return int(np.count_nonzero(detected != symbols))

        errors = sum(_map_chunks(worker, n_symbols))
        values.append(errors / n_symbols)
    return Curve(tuple(grid), tuple(values), seed=seed, n=n_symbols)


def simulate_ser(
    c: Constellation4,
    cfg: LinkConfig,
    snr_db_grid,
    n_symbols: int,
    seed: int,
) -> "Curve":
    """Monte Carlo SER of a 4-UCSK constellation over the configured link."""
    return simulate_ser_hypotheses(
        build_hypotheses(c, cfg), snr_db_grid, n_symbols, seed
    )


def qfunc(x) -> np.ndarray | float:
    """Standard Gaussian tail probability."""
    return 0.5 * erfc(np.asarray(x) / math.sqrt(2.0))


def union_bound_from_hypotheses(h: HypothesisSet, sigma: float) -> float:
    """Pairwise union bound (1/M) sum_i sum_{j != i} Q(d_ij / (2 sigma))."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    delta = h.vectors[:, None, :] - h.vectors[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", delta, delta))
    q = qfunc(d / (2.0 * sigma))
    np.fill_diagonal(q, 0.0)
    return float(q.sum()) / h.m


def union_bound_ser(c: Constellation4, cfg: LinkConfig, snr_db: float) -> float:
    """Union bound at one SNR for a constellation over the configured link."""
    h = build_hypotheses(c, cfg)
    return union_bound_from_hypotheses(h, noise_sigma(h, snr_db))


def mutual_information(
    h: HypothesisSet,
    sigma: float,
    n_samples: int,
    seed: int,
    *,
    stream: int = 0,
) -> float:
    """Monte Carlo mutual information (bits/symbol) of the equiprobable
    discrete input over the AWGN vector channel.

    Averages log2(M p(y|s) / sum_j p(y|s_j)) over draws; the estimate is
    clamped to [0, log2 M].
    """
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    log2_m = math.log2(h.m)
    inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma)
    ln2 = math.log(2.0)

    def worker(a: int, b: int) -> float:
        symbols, received = _draw_symbols_noise(h, sigma, seed, stream, a, b)
        delta = received[:, None, :] - h.vectors[None, :, :]
        ll = -np.einsum("nmk,nmk->nm", delta, delta) * inv_two_sigma2
        own = ll[np.arange(len(symbols)), symbols]
        terms = log2_m + (own - logsumexp(ll, axis=1)) / ln2
        return float(terms.sum())

    total = math.fsum(_map_chunks(worker, n_samples))
    return min(max(total / n_samples, 0.0), log2_m)


def achievable_rate(
    h: HypothesisSet,
    sigma: float,
    bandwidth_hz: float,
    n_samples: int = 100_000,
    seed: int = 0,
    *,
    stream: int = 0,
) -> float:
    """bits/s at one symbol per hertz: bandwidth times mutual information."""
    return bandwidth_hz * mutual_information(
        h, sigma, n_samples, seed, stream=stream
    )


@dataclass(frozen=True)
class Curve:
    """A simulated SER or rate curve over an SNR grid."""

    snr_db: tuple[float, ...]
    values: tuple[float, ...]
    seed: int
    n: int
    config_sha: str = ""

    def with_digest(self, sha: str) -> "Curve":
        return replace(self, config_sha=sha)


def config_digest(payload) -> str:
    """sha256 over the canonical JSON form of a configuration payload."""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def write_curve_csv(path, curve: Curve) -> None:
    """Write ``snr_db,value`` rows with full round-trip float text."""
    lines = [
        f"# seed={curve.seed}",
        f"# n={curve.n}",
        f"# config_sha={curve.config_sha}",
        "snr_db,value",
    ]
    lines.extend(f"{repr(s)},{repr(v)}" for s, v in zip(curve.snr_db, curve.values))
    Path(path).write_text("\n".join(lines) + "\n")


def read_curve_csv(path) -> Curve:
    """Parse a curve written by :func:`write_curve_csv`."""
    meta = {"seed": "0", "n": "0", "config_sha": ""}
    snr, values = [], []
    lines = Path(path).read_text().splitlines()
    body_seen = False
    for line in lines:
        m = re.match(r"#\s*(\w+)=(.*)$", line)
        if m:
            meta[m.group(1)] = m.group(2)
            continue
        if line.strip() == "snr_db,value":
            body_seen = True
            continue
        if line.strip():
            a, b = line.split(",")
            snr.append(float(a))
            values.append(float(b))
    if not body_seen:
        raise ValueError(f"{path}: missing snr_db,value header")
    return Curve(
        tuple(snr),
        tuple(values),
        seed=int(meta["seed"]),
        n=int(meta["n"]),
        config_sha=meta["config_sha"],
    )
