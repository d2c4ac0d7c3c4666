"""Shared fixtures, hypothesis strategies and independent oracles."""

from __future__ import annotations

import itertools
import math
import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from zerosum.group import Element, make_group
from zerosum.sequence import Sequence

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def valid_pairs(lo: int, hi: int, proper_only: bool = False):
    for n in range(lo, hi + 1):
        for s in range(n):
            if (s * s) % n != 1 % n:
                continue
            if proper_only and (s % n in (1 % n, (n - 1) % n)):
                continue
            yield n, s


SMALL_GROUPS = [(8, 3), (8, 5), (12, 5), (12, 7), (6, 5), (5, 1), (16, 7)]


@st.composite
def groups(draw, lo: int = 2, hi: int = 24, proper_only: bool = False):
    pairs = list(valid_pairs(lo, hi, proper_only))
    n, s = draw(st.sampled_from(pairs))
    return make_group(n, s)


@st.composite
def elements(draw, G):
    return Element(draw(st.integers(0, 1)), draw(st.integers(0, G.n - 1)))


@st.composite
def sequences(draw, G, min_size: int = 0, max_size: int = 6):
    items = draw(st.lists(elements(G), min_size=min_size, max_size=max_size))
    return Sequence.from_elements(G, items)


@st.composite
def group_and_sequence(draw, pairs=SMALL_GROUPS, min_size: int = 0, max_size: int = 6):
    n, s = draw(st.sampled_from(pairs))
    G = make_group(n, s)
    return G, draw(sequences(G, min_size, max_size))


# -- oracles built straight from the presentation -------------------------------------


def word_multiply(n: int, s: int, a, b):
    """Normal form of x^e1 y^k1 x^e2 y^k2 by pushing y's across x with
    y^k x = x y^{ks}, written independently of GroupSpec.mul."""
    e1, k1 = a
    e2, k2 = b
    if e2 == 0:
        return (e1, (k1 + k2) % n)
    # y^k1 x = x y^{k1 s}
    return ((e1 + 1) % 2, (k1 * s + k2) % n)


def brute_order(n: int, s: int, g) -> int:
    cur, t = g, 1
    while cur != (0, 0):
        cur = word_multiply(n, s, cur, g)
        t += 1
    return t


def brute_product_set(n: int, s: int, items):
    out = set()
    for perm in itertools.permutations(items):
        cur = (0, 0)
        for g in perm:
            cur = word_multiply(n, s, cur, g)
        out.add(cur)
    return out


def brute_has_k_product_one(n: int, s: int, items, k: int) -> bool:
    seen = set()
    for combo in itertools.combinations(sorted(items), k):
        if combo in seen:
            continue
        seen.add(combo)
        if (0, 0) in brute_product_set(n, s, combo):
            return True
    return False


def lcm_all(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


@pytest.fixture(scope="session")
def g83():
    return make_group(8, 3)


@pytest.fixture(scope="session")
def g85():
    return make_group(8, 5)


# -- acceptance summary ----------------------------------------------------------------

_ACCEPTANCE: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not mark.args:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = dict(item.user_properties).get("detail", "")
        crash = getattr(rep.longrepr, "reprcrash", None)
        if rep.failed and crash is not None:
            detail = " | ".join(filter(None, [detail, crash.message.splitlines()[0]]))
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _ACCEPTANCE[mark.args[0]] = (status, rep.duration, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        status, secs, detail = _ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:>2}: {status}  ({secs:.1f} s)  {detail}")
