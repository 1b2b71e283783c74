"""Spectrum allocation mechanisms for D2D pairs reusing cellular downlink resources.

All allocators take an :class:`Instance` (one network drop) and return either
an :class:`Allocation` or an :class:`AuctionOutcome` carrying the round trace.
Values and prices share one unit: one bit/s/Hz of sum rate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import PowerProfile, ScenarioConfig
from .errors import InfeasibleInstanceError, InstanceTooLargeError, UsageError
from .netmodel import (
    Allocation,
    GainTable,
    Topology,
    _co_channel,
    build_gain_table,
    generate_topology,
    make_rng,
    marginal_gain,
    resource_sum_rate,
    sum_rate,
)

_RANDOM_STREAM = 2
EXHAUSTIVE_LIMIT = 10**6


@dataclass(frozen=True, eq=False)
class Instance:
    gains: GainTable
    powers: PowerProfile
    topology: Optional[Topology] = None

    @property
    def num_cellular(self) -> int:
        return self.gains.num_cellular

    @property
    def num_d2d(self) -> int:
        return self.gains.num_d2d


def make_instance(config: ScenarioConfig, seed: int) -> Instance:
    """Draw one network drop from ``(config, seed)``."""
    topology = generate_topology(config, seed)
    gains = build_gain_table(topology, config, seed)
    return Instance(gains=gains, powers=PowerProfile.from_config(config), topology=topology)


@dataclass(frozen=True)
class Bid:
    link: int
    price: float
    bidder: int

    def __post_init__(self):
        if not self.price >= 0:
            raise UsageError(f"bid price {self.price!r} must be >= 0")


@dataclass(frozen=True)
class RicaParams:
    """Clock parameters.  ``price_start=0`` means: start at the best singleton value."""

    price_start: float = 0.0
    price_step: float = 0.05
    package_cap: int = 2

    def __post_init__(self):
        if not self.price_step > 0:
            raise UsageError(f"price_step={self.price_step!r} violates price_step > 0")
        if self.package_cap < 1:
            raise UsageError(f"package_cap={self.package_cap!r} violates package_cap >= 1")
        if self.price_start < 0:
            raise UsageError(f"price_start={self.price_start!r} violates price_start >= 0")


@dataclass(frozen=True)
class Round:
    """One clock step: the price, every bid at that price, and who won what."""

    price: float
    bids: tuple
    winner: Optional[int] = None
    package: tuple = ()
    fallback: bool = False


@dataclass(frozen=True)
class AuctionOutcome:
    allocation: Allocation
    rounds: tuple
    revenue: float
    final_sum_rate: float
    price_start: float = 0.0

    @property
    def prices(self) -> list:
        return [r.price for r in self.rounds]


def _require_feasible(inst: Instance) -> None:
    if inst.num_cellular == 0 and inst.num_d2d > 0:
        raise InfeasibleInstanceError(
            f"{inst.num_d2d} D2D pairs but no cellular resource to reuse"
        )


# -- vectorized package values ------------------------------------------------


class _ResourceView:
    """Interference bookkeeping for one resource given its current sharers."""

    def __init__(self, c: int, pairs: list, inst: Instance):
        g, p = inst.gains, inst.powers
        self.c = c
        self.pairs = np.asarray(pairs, dtype=int)
        self.g, self.p = g, p
        P = self.pairs
        self.base_rate = resource_sum_rate(c, P, g, p)
        # Noise plus interference already present at the cellular UE / each sharer.
        self.cell_interf = p.noise_w + p.d2d_power_w * g.tx_ue[P, c].sum()
        self.sharer_interf = (
            p.noise_w
            + p.bs_power_w * g.bs_rx[P]
            + p.d2d_power_w * _co_channel(g.tx_rx[np.ix_(P, P)])
        )

    def _own_interf(self, cand):
        g, p = self.g, self.p
        return (
            p.noise_w
            + p.bs_power_w * g.bs_rx[cand]
            + p.d2d_power_w * g.tx_rx[np.ix_(self.pairs, cand)].sum(axis=0)
        )

    def singleton_values(self, cand: np.ndarray) -> np.ndarray:
        """Sum-rate change from adding each candidate pair alone."""
        g, p = self.g, self.p
        c, P = self.c, self.pairs
        pd = p.d2d_power_w
        cell = np.log2(
            1.0 + p.bs_power_w * g.bs_ue[c] / (self.cell_interf + pd * g.tx_ue[cand, c])
        )
        # (|P|, U): sharer rates with the candidate switched on.
        hit = pd * g.tx_rx[np.ix_(cand, P)].T
        sharers = np.log2(
            1.0 + (pd * g.direct[P])[:, None] / (self.sharer_interf[:, None] + hit)
        ).sum(axis=0)
        own = np.log2(1.0 + pd * g.direct[cand] / self._own_interf(cand))
        return cell + sharers + own - self.base_rate

    def pair_values(self, cand: np.ndarray) -> np.ndarray:
        """(U, U) sum-rate change from adding candidates a and b together.

        Only the strict upper triangle is meaningful.
        """
        g, p = self.g, self.p
        c, P = self.c, self.pairs
        pd = p.d2d_power_w
        to_ue = pd * g.tx_ue[cand, c]
        cell = np.log2(
            1.0
            + p.bs_power_w * g.bs_ue[c] / (self.cell_interf + to_ue[:, None] + to_ue[None, :])
        )
        hit = pd * g.tx_rx[np.ix_(cand, P)].T  # (|P|, U)
        sharers = np.log2(
            1.0
            + (pd * g.direct[P])[:, None, None]
            / (self.sharer_interf[:, None, None] + hit[:, :, None] + hit[:, None, :])
        ).sum(axis=0)
        mutual = pd * g.tx_rx[np.ix_(cand, cand)]  # [j, k] = tx_j -> rx_k
        # own[a, b]: rate of a while b is also on; interference from b is mutual[b, a].
        own = np.log2(
            1.0 + (pd * g.direct[cand])[:, None] / (self._own_interf(cand)[:, None] + mutual.T)
        )
        return cell + sharers + own + own.T - self.base_rate


def rica_value(
    c: int, package, alloc: Allocation, inst: Instance, package_cap: Optional[int] = None
) -> float:
    """Value of a package to resource ``c``: the sum-rate gain of adding it."""
    package = sorted(set(int(d) for d in package))
    if package_cap is not None and len(package) > package_cap:
        raise UsageError(f"package of size {len(package)} exceeds cap {package_cap}")
    if not 0 <= c < inst.num_cellular:
        raise UsageError(f"resource index {c} out of range [0, {inst.num_cellular})")
    for d in package:
        if alloc.is_assigned(d):
            raise UsageError(f"pair {d} is already assigned to resource {alloc.resources[d]}")
    if not package:
        return 0.0
    pairs = alloc.pairs_on(c)
    g, p = inst.gains, inst.powers
    return resource_sum_rate(c, pairs + package, g, p) - resource_sum_rate(c, pairs, g, p)


def _best_singleton_value(inst: Instance) -> float:
    if inst.num_d2d == 0 or inst.num_cellular == 0:
        return 0.0
    cand = np.arange(inst.num_d2d)
    best = max(
        float(_ResourceView(c, [], inst).singleton_values(cand).max())
        for c in range(inst.num_cellular)
    )
    return max(best, 0.0)


class _PackageMenu:
    """Values of every package of size <= cap that a resource could take next.

    Values depend only on the allocation, so one menu serves every clock
    price until somebody wins.
    """

    def __init__(self, view: _ResourceView, cand: np.ndarray, cap: int):
        self.packages = [(int(d),) for d in cand]
        values = [view.singleton_values(cand)]
        sizes = [np.ones(len(cand))]
        if cap >= 2 and len(cand) >= 2:
            rows, cols = np.triu_indices(len(cand), k=1)
            self.packages += [(int(cand[a]), int(cand[b])) for a, b in zip(rows, cols)]
            values.append(view.pair_values(cand)[rows, cols])
            sizes.append(np.full(len(rows), 2.0))
        self.values = np.concatenate(values)
        self.sizes = np.concatenate(sizes)

    def best(self, price: float):
        """Highest-utility nonempty package at ``price``; ties -> lexicographically smallest."""
        utility = self.values - price * self.sizes
        top = utility.max()
        return float(top), min(self.packages[k] for k in np.flatnonzero(utility == top))


# -- allocators ---------------------------------------------------------------


def allocate_random(inst: Instance, seed: int) -> Allocation:
    """Each pair on an i.i.d. uniformly chosen resource."""
    _require_feasible(inst)
    if inst.num_d2d == 0:
        return Allocation.empty(0)
    rng = make_rng(seed, _RANDOM_STREAM)
    return Allocation(tuple(int(c) for c in rng.integers(0, inst.num_cellular, inst.num_d2d)))


def allocate_rica(inst: Instance, params: RicaParams = RicaParams()) -> AuctionOutcome:
    """Reverse iterative combinatorial auction with a descending price clock.

    Resources bid for packages of unassigned pairs.  At each price every
    resource proposes the package maximizing value minus price times size;
    the single highest-utility bidder wins.  Without bids the price drops by
    ``price_step``.  Pairs still unsold when nobody bids at price 0 are placed
    one by one on their best resource.
    """
    _require_feasible(inst)
    C, D = inst.num_cellular, inst.num_d2d
    g, pw = inst.gains, inst.powers
    price_start = params.price_start or _best_singleton_value(inst)
    alloc = Allocation.empty(D)
    rounds, revenue = [], 0.0
    steps = 0
    menus = None
    while not alloc.is_complete:
        price = max(price_start - steps * params.price_step, 0.0)
        if menus is None:
            cand = np.array(alloc.unassigned())
            menus = [
                _PackageMenu(_ResourceView(c, alloc.pairs_on(c), inst), cand, params.package_cap)
                for c in range(C)
            ]
        bids, offers = [], []
        for c in range(C):
            utility, package = menus[c].best(price)
            if utility >= 0:
                offers.append((-utility, c, package))
                bids += [Bid(d, price, c) for d in package]
        if offers:
            _, winner, package = min(offers)
            alloc = alloc.assign_many(package, winner)
            revenue += price * len(package)
            rounds.append(Round(price, tuple(bids), winner, package))
            menus = None
        elif price > 0.0:
            rounds.append(Round(price, ()))
            steps += 1
        else:
            for d in alloc.unassigned():
                gains_d = [marginal_gain(d, c, alloc, g, pw) for c in range(C)]
                c = int(np.argmax(gains_d))
                alloc = alloc.assign(d, c)
                rounds.append(Round(0.0, (Bid(d, 0.0, c),), c, (d,), fallback=True))
    return AuctionOutcome(
        allocation=alloc,
        rounds=tuple(rounds),
        revenue=revenue,
        final_sum_rate=sum_rate(alloc, g, pw),
        price_start=price_start,
    )


def allocate_new_auction(
    inst: Instance, params: RicaParams = RicaParams(), skip_negative: bool = False
) -> AuctionOutcome:
    """Sum-rate auction: every round, the (pair, resource) with the largest
    sum-rate gain wins, whatever the prices bid.

    Each resource still bids ``{link, price}`` for its favourite link at the
    running clock price, and those bids are logged, but winner selection never
    reads them.  Negative gains are accepted so every pair ends up assigned,
    unless ``skip_negative`` stops the auction at the first negative best gain.
    """
    _require_feasible(inst)
    C, D = inst.num_cellular, inst.num_d2d
    g, pw = inst.gains, inst.powers
    price_start = params.price_start or _best_singleton_value(inst)
    alloc = Allocation.empty(D)
    rounds, revenue = [], 0.0
    for k in range(D):
        price = max(price_start - k * params.price_step, 0.0)
        cand = np.array(alloc.unassigned())
        # values[c, j]: gain of putting cand[j] on resource c.
        values = np.array(
            [_ResourceView(c, alloc.pairs_on(c), inst).singleton_values(cand) for c in range(C)]
        )
        bids = tuple(Bid(int(cand[np.argmax(values[c])]), price, c) for c in range(C))
        best = values.max()
        if skip_negative and best < 0:
            break
        # cand is ascending, so the first hit in pair-major order is lowest pair, then resource.
        j, c = np.argwhere(values.T == best)[0]
        d = int(cand[j])
        alloc = alloc.assign(d, int(c))
        revenue += price
        rounds.append(Round(price, bids, int(c), (d,)))
    return AuctionOutcome(
        allocation=alloc,
        rounds=tuple(rounds),
        revenue=revenue,
        final_sum_rate=sum_rate(alloc, g, pw),
        price_start=price_start,
    )


def allocate_exhaustive(inst: Instance, limit: int = EXHAUSTIVE_LIMIT) -> Allocation:
    """Best complete allocation by enumerating all C**D of them."""
    _require_feasible(inst)
    C, D = inst.num_cellular, inst.num_d2d
    if D > 0 and C**D > limit:
        raise InstanceTooLargeError(f"search space {C}**{D} exceeds limit {limit}")
    g, pw = inst.gains, inst.powers
    cache = {}

    def score(assign):
        total = 0.0
        for c in range(C):
            pairs = tuple(d for d, r in enumerate(assign) if r == c)
            if (c, pairs) not in cache:
                cache[c, pairs] = resource_sum_rate(c, list(pairs), g, pw)
            total += cache[c, pairs]
        return total

    best, best_value = None, -math.inf
    # product() yields assignment vectors in lexicographic order; strict > keeps the first.
    for assign in itertools.product(range(C), repeat=D):
        value = score(assign)
        if value > best_value:
            best, best_value = assign, value
    return Allocation(tuple(best))


ALLOCATORS = ("random", "rica", "new-auction", "exhaustive")
