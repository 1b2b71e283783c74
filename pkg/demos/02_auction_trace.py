"""Watching the two auctions run.

The clock auction lowers its price until some resource finds a package worth
buying.  The sum-rate auction logs the same kind of bids but picks winners by
marginal gain alone, so rescaling its prices changes nothing.
"""

from d2dsim import RicaParams, ScenarioConfig, allocate_new_auction, allocate_rica, make_instance

inst = make_instance(ScenarioConfig(num_cellular=3, num_d2d=5), seed=11)

rica = allocate_rica(inst)
print(f"clock starts at {rica.price_start:.3f}, {len(rica.rounds)} rounds")
for r in rica.rounds:
    if r.winner is not None:
        tag = " (fallback)" if r.fallback else ""
        print(f"  price {r.price:7.3f}: resource {r.winner} takes pairs {r.package}{tag}")
print("R-ICA allocation", rica.allocation.resources, f"sum rate {rica.final_sum_rate:.3f}")

new = allocate_new_auction(inst)
for k, r in enumerate(new.rounds):
    bids = ", ".join(f"r{b.bidder}->{b.link}" for b in r.bids)
    print(f"  round {k}: bids [{bids}] @ {r.price:.3f}; pair {r.package[0]} -> resource {r.winner}")
print("new auction allocation", new.allocation.resources, f"sum rate {new.final_sum_rate:.3f}")

# Prices are only recorded, never read
for factor in (0.1, 10.0):
    params = RicaParams(price_start=factor * new.price_start, price_step=factor * 0.05)
    assert allocate_new_auction(inst, params).allocation == new.allocation
print("allocation unchanged under x0.1 and x10 prices")
