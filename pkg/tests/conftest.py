import numpy as np
import pytest

from d2dsim import GainTable, Instance, PowerProfile
from d2dsim.netmodel import Nodes

# Round numbers that keep hand-computed SINRs exact.
HAND_POWERS = PowerProfile(bs_power_w=1.0, d2d_power_w=0.1, noise_w=1e-13)


def gain_table(C, D, links, fill=1e-15):
    """Build a GainTable from ``{(("tx", 0), ("ue", 1)): g, ...}``; other pairs get ``fill``."""
    nodes = Nodes(C, D)
    index = {"bs": lambda i: 0, "ue": nodes.ue, "tx": nodes.tx, "rx": nodes.rx}
    m = np.full((nodes.count, nodes.count), fill)
    np.fill_diagonal(m, 1.0)
    for ((ka, ia), (kb, ib)), g in links.items():
        a, b = index[ka](ia), index[kb](ib)
        m[a, b] = m[b, a] = g
    return GainTable(m, C, D)


@pytest.fixture
def crafted():
    """C=2, D=2.  Pair 0's transmitter hits UE 0 hard; pair 1 mildly hits UE 1."""
    links = {
        (("bs", 0), ("ue", 0)): 1e-9,
        (("bs", 0), ("ue", 1)): 1e-9,
        (("tx", 0), ("rx", 0)): 1e-6,
        (("tx", 1), ("rx", 1)): 1e-7,
        (("bs", 0), ("rx", 0)): 1e-13,
        (("bs", 0), ("rx", 1)): 1e-13,
        (("tx", 0), ("ue", 0)): 1e-11,
        (("tx", 0), ("ue", 1)): 1e-14,
        (("tx", 1), ("ue", 0)): 1e-14,
        (("tx", 1), ("ue", 1)): 1e-12,
        (("tx", 0), ("rx", 1)): 1e-12,
        (("tx", 1), ("rx", 0)): 1e-12,
    }
    return Instance(gains=gain_table(2, 2, links), powers=HAND_POWERS)


# -- acceptance report ---------------------------------------------------------

_REPORT = []


@pytest.fixture
def report():
    def record(criterion, passed, detail):
        _REPORT.append((criterion, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_REPORT, key=lambda r: r[0]):
        status = {True: "PASS", False: "FAIL", None: "INFO"}[passed]
        terminalreporter.write_line(f"[{status}] {criterion}: {detail}")
