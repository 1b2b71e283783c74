"""Network drops, channel gains, SINR and sum rate for a single downlink cell.

Node numbering inside a :class:`GainTable` is fixed: the base station is
node 0, cellular UEs follow, then every D2D transmitter, then every D2D
receiver.  Resource ``c`` is the downlink channel owned by cellular UE ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .config import PowerProfile, ScenarioConfig
from .errors import UsageError

# Independent RNG streams derived from one trial seed.
_TOPOLOGY_STREAM = 0
_CHANNEL_STREAM = 1


def make_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), stream]))


@dataclass(frozen=True)
class Nodes:
    num_cellular: int
    num_d2d: int

    bs = 0

    @property
    def count(self) -> int:
        return 1 + self.num_cellular + 2 * self.num_d2d

    def ue(self, i: int) -> int:
        return 1 + i

    def tx(self, d: int) -> int:
        return 1 + self.num_cellular + d

    def rx(self, d: int) -> int:
        return 1 + self.num_cellular + self.num_d2d + d


@dataclass(frozen=True, eq=False)
class Topology:
    """Node coordinates in meters; the base station sits at the origin."""

    cellular_pos: np.ndarray  # (C, 2)
    d2d_tx_pos: np.ndarray  # (D, 2)
    d2d_rx_pos: np.ndarray  # (D, 2)
    bs_pos: np.ndarray = field(default_factory=lambda: np.zeros(2))

    @property
    def num_cellular(self) -> int:
        return len(self.cellular_pos)

    @property
    def num_d2d(self) -> int:
        return len(self.d2d_tx_pos)

    def positions(self) -> np.ndarray:
        """All node positions stacked in :class:`Nodes` order."""
        return np.vstack(
            [self.bs_pos.reshape(1, 2), self.cellular_pos, self.d2d_tx_pos, self.d2d_rx_pos]
        )

    def __eq__(self, other):
        if not isinstance(other, Topology):
            return NotImplemented
        return np.array_equal(self.positions(), other.positions())


def _uniform_in_disc(rng: np.random.Generator, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random())
    theta = 2.0 * np.pi * rng.random()
    return np.array([r * np.cos(theta), r * np.sin(theta)])


def generate_topology(config: ScenarioConfig, seed: int) -> Topology:
    """Drop cellular UEs and D2D pairs uniformly in the cell.

    Receivers are placed uniformly within ``d2d_max_dist_m`` of their
    transmitter and re-drawn until they fall inside the cell.  Pairs are
    drawn one after another, so the first k pairs of a drop do not depend on
    how many pairs follow.
    """
    config.validate()
    rng = make_rng(seed, _TOPOLOGY_STREAM)
    radius = config.cell_radius_m
    cellular = [_uniform_in_disc(rng, radius) for _ in range(config.num_cellular)]
    tx_list, rx_list = [], []
    for _ in range(config.num_d2d):
        tx = _uniform_in_disc(rng, radius)
        while True:
            rx = tx + _uniform_in_disc(rng, config.d2d_max_dist_m)
            if np.hypot(*rx) <= radius:
                break
        tx_list.append(tx)
        rx_list.append(rx)
    return Topology(
        cellular_pos=np.array(cellular).reshape(-1, 2),
        d2d_tx_pos=np.array(tx_list).reshape(-1, 2),
        d2d_rx_pos=np.array(rx_list).reshape(-1, 2),
    )


class GainTable:
    """Symmetric linear power gains between every pair of nodes.

    ``matrix[a, b]`` is the gain of the directed link a -> b.  The diagonal is
    never read by the SINR formulas and is stored as 1.0.
    """

    def __init__(self, matrix, num_cellular: int, num_d2d: int):
        nodes = Nodes(num_cellular, num_d2d)
        m = np.array(matrix, dtype=float)
        if m.shape != (nodes.count, nodes.count):
            raise UsageError(f"gain matrix shape {m.shape} does not match {nodes.count} nodes")
        if not np.all(np.isfinite(m)) or not np.all(m > 0):
            raise UsageError("gains must be finite and strictly positive")
        if not np.array_equal(m, m.T):
            raise UsageError("gain matrix must be symmetric")
        m.setflags(write=False)
        self.matrix = m
        self.nodes = nodes
        C, D = num_cellular, num_d2d
        ue = slice(1, 1 + C)
        tx = slice(1 + C, 1 + C + D)
        rx = slice(1 + C + D, 1 + C + 2 * D)
        # Views read by the rate formulas.
        self.bs_ue = m[0, ue]  # (C,)
        self.tx_ue = m[tx, ue]  # (D, C): pair transmitter -> cellular UE
        self.bs_rx = m[0, rx]  # (D,)
        self.tx_rx = m[tx, rx]  # (D, D): [j, k] = transmitter j -> receiver k
        self.direct = np.diagonal(self.tx_rx)  # (D,)

    @property
    def num_cellular(self) -> int:
        return self.nodes.num_cellular

    @property
    def num_d2d(self) -> int:
        return self.nodes.num_d2d

    def gain(self, a: int, b: int) -> float:
        if a == b:
            raise UsageError("no gain is defined from a node to itself")
        return float(self.matrix[a, b])

    def __eq__(self, other):
        if not isinstance(other, GainTable):
            return NotImplemented
        return self.nodes == other.nodes and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


def pathloss_gain(distance, config: ScenarioConfig):
    """Distance-dependent linear gain, distances clamped at ``min_dist_m``."""
    d = np.maximum(np.asarray(distance, dtype=float), config.min_dist_m)
    return 10.0 ** (config.pathloss_const_db / 10.0) * d ** (-config.pathloss_exp)


def build_gain_table(topology: Topology, config: ScenarioConfig, seed: int) -> GainTable:
    """Path loss times log-normal shadowing (and optional Rayleigh power fading).

    One shadowing value per unordered node pair, drawn in row-major order
    over the upper triangle.
    """
    config.validate()
    pos = topology.positions()
    n = len(pos)
    rows, cols = np.triu_indices(n, k=1)
    dist = np.hypot(*(pos[rows] - pos[cols]).T)
    rng = make_rng(seed, _CHANNEL_STREAM)
    shadow_db = rng.normal(0.0, config.shadowing_sigma_db, size=len(rows))
    g = pathloss_gain(dist, config) * 10.0 ** (shadow_db / 10.0)
    if config.fading_enabled:
        g = g * rng.exponential(1.0, size=len(rows))
    # Keep gains strictly positive even for extreme shadowing draws.
    g = np.maximum(g, np.finfo(float).tiny)
    m = np.ones((n, n))
    m[rows, cols] = g
    m[cols, rows] = g
    return GainTable(m, topology.num_cellular, topology.num_d2d)


@dataclass(frozen=True)
class Allocation:
    """Pair-to-resource map; ``resources[d] == -1`` marks an unassigned pair."""

    resources: tuple

    @classmethod
    def empty(cls, num_d2d: int) -> "Allocation":
        return cls((-1,) * num_d2d)

    @classmethod
    def from_mapping(cls, num_d2d: int, mapping: Mapping[int, int]) -> "Allocation":
        res = [-1] * num_d2d
        for d, c in mapping.items():
            res[d] = int(c)
        return cls(tuple(res))

    @property
    def num_d2d(self) -> int:
        return len(self.resources)

    def resource_of(self, d: int):
        c = self.resources[d]
        return None if c < 0 else c

    def is_assigned(self, d: int) -> bool:
        return self.resources[d] >= 0

    @property
    def is_complete(self) -> bool:
        return all(c >= 0 for c in self.resources)

    def unassigned(self) -> list:
        return [d for d, c in enumerate(self.resources) if c < 0]

    def pairs_on(self, c: int) -> list:
        return [d for d, r in enumerate(self.resources) if r == c]

    def assign(self, d: int, c: int) -> "Allocation":
        return self.assign_many([d], c)

    def assign_many(self, pairs: Iterable[int], c: int) -> "Allocation":
        res = list(self.resources)
        for d in pairs:
            if res[d] >= 0:
                raise UsageError(f"pair {d} is already assigned to resource {res[d]}")
            res[d] = int(c)
        return Allocation(tuple(res))

    def without(self, d: int) -> "Allocation":
        res = list(self.resources)
        res[d] = -1
        return Allocation(tuple(res))

    def as_dict(self) -> dict:
        return {d: c for d, c in enumerate(self.resources) if c >= 0}


def _check_alloc(alloc: Allocation, gains: GainTable) -> None:
    if alloc.num_d2d != gains.num_d2d:
        raise UsageError(f"allocation covers {alloc.num_d2d} pairs, gain table {gains.num_d2d}")
    for c in alloc.resources:
        if c >= gains.num_cellular:
            raise UsageError(f"resource index {c} out of range [0, {gains.num_cellular})")


def sinr_cellular(i: int, alloc: Allocation, gains: GainTable, powers: PowerProfile) -> float:
    """Downlink SINR of cellular UE ``i`` given the D2D pairs reusing its resource."""
    if not 0 <= i < gains.num_cellular:
        raise UsageError(f"cellular index {i} out of range [0, {gains.num_cellular})")
    _check_alloc(alloc, gains)
    sharers = alloc.pairs_on(i)
    interference = powers.d2d_power_w * gains.tx_ue[sharers, i].sum()
    return float(powers.bs_power_w * gains.bs_ue[i] / (powers.noise_w + interference))


def sinr_d2d(d: int, alloc: Allocation, gains: GainTable, powers: PowerProfile) -> float:
    """SINR at the receiver of pair ``d``: BS downlink plus co-channel pairs interfere."""
    if not 0 <= d < gains.num_d2d:
        raise UsageError(f"pair index {d} out of range [0, {gains.num_d2d})")
    _check_alloc(alloc, gains)
    c = alloc.resource_of(d)
    if c is None:
        raise UsageError(f"pair {d} is not assigned")
    others = [k for k in alloc.pairs_on(c) if k != d]
    interference = (
        powers.bs_power_w * gains.bs_rx[d] + powers.d2d_power_w * gains.tx_rx[others, d].sum()
    )
    return float(powers.d2d_power_w * gains.direct[d] / (powers.noise_w + interference))


def _co_channel(cross: np.ndarray) -> np.ndarray:
    """Column sums without the diagonal.  Direct gains dwarf cross gains, so
    subtracting the diagonal from the full sum would cancel catastrophically."""
    off = cross.copy()
    np.fill_diagonal(off, 0.0)
    return off.sum(axis=0)


def resource_rates(c: int, pairs, gains: GainTable, powers: PowerProfile):
    """Rates on resource ``c`` when exactly ``pairs`` reuse it.

    Returns ``(cellular_rate, d2d_rates)`` with ``d2d_rates`` aligned to ``pairs``.
    """
    pairs = np.asarray(pairs, dtype=int)
    pd, noise = powers.d2d_power_w, powers.noise_w
    cell_sinr = powers.bs_power_w * gains.bs_ue[c] / (noise + pd * gains.tx_ue[pairs, c].sum())
    co_channel = _co_channel(gains.tx_rx[np.ix_(pairs, pairs)])
    d2d_sinr = (pd * gains.direct[pairs]) / (
        noise + powers.bs_power_w * gains.bs_rx[pairs] + pd * co_channel
    )
    return float(np.log2(1.0 + cell_sinr)), np.log2(1.0 + d2d_sinr)


def resource_sum_rate(c: int, pairs, gains: GainTable, powers: PowerProfile) -> float:
    cell, d2d = resource_rates(c, pairs, gains, powers)
    return cell + float(d2d.sum())


def link_rates(alloc: Allocation, gains: GainTable, powers: PowerProfile):
    """Per-link rates: ``(cellular_rates[C], d2d_rates[D])``; unassigned pairs get 0."""
    _check_alloc(alloc, gains)
    cell = np.zeros(gains.num_cellular)
    d2d = np.zeros(gains.num_d2d)
    for c in range(gains.num_cellular):
        pairs = alloc.pairs_on(c)
        cell[c], rates = resource_rates(c, pairs, gains, powers)
        d2d[pairs] = rates
    return cell, d2d


def sum_rate(alloc: Allocation, gains: GainTable, powers: PowerProfile) -> float:
    """System spectral efficiency in bit/s/Hz, accumulated resource by resource."""
    _check_alloc(alloc, gains)
    total = 0.0
    for c in range(gains.num_cellular):
        total += resource_sum_rate(c, alloc.pairs_on(c), gains, powers)
    return total


def marginal_gain(
    d: int, c: int, alloc: Allocation, gains: GainTable, powers: PowerProfile
) -> float:
    """Change in sum rate from putting unassigned pair ``d`` on resource ``c``.

    Only resource ``c`` is affected, so the other resources are not re-evaluated.
    """
    _check_alloc(alloc, gains)
    if not 0 <= c < gains.num_cellular:
        raise UsageError(f"resource index {c} out of range [0, {gains.num_cellular})")
    if alloc.is_assigned(d):
        raise UsageError(f"pair {d} is already assigned to resource {alloc.resources[d]}")
    pairs = alloc.pairs_on(c)
    return resource_sum_rate(c, pairs + [d], gains, powers) - resource_sum_rate(
        c, pairs, gains, powers
    )
