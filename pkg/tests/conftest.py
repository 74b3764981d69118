import numpy as np
import pytest

from treecrawl import KeywordSet, RelevanceModel
from treecrawl.simworld import SimPage, SimWorld, SimWorldParams


@pytest.fixture
def keywords():
    return KeywordSet(frozenset({"topic00", "topic01", "topic02"}))


@pytest.fixture
def oracle_model():
    """Handcrafted relevance model: any keyword in the body means relevant.

    kv1 = min(count/mu, 1) with mu = 1 jumps to 1 at the first keyword, so
    sigmoid(10*kv1 - 5) is ~0.9933 with a keyword and ~0.0067 without.
    """
    return RelevanceModel(weights=np.array([10.0, 0.0, 0.0]), bias=-5.0,
                          mu=1.0, threshold=0.5)


def make_world(pages):
    """Assemble a hand-specified world from (url, relevant, title, body, outlinks)."""
    records = {}
    order = []
    from treecrawl.urls import domain_of
    for url, relevant, title, body, outlinks in pages:
        records[url] = SimPage(url=url, domain=domain_of(url), relevant=relevant,
                               title=title, body=body, outlinks=list(outlinks))
        order.append(url)
    params = SimWorldParams(pages=max(10, len(order)))
    return SimWorld(params=params, seed=0, keywords=["topic00", "topic01", "topic02"],
                    seed_urls=[order[0]], pages=records, order=order)


@pytest.fixture
def chain_world():
    """12 pages in a single chain; page i links only to page i+1."""
    pages = []
    for i in range(12):
        url = f"http://chain.sim/p{i:02d}"
        nxt = f"http://chain.sim/p{i+1:02d}"
        relevant = i % 3 != 2  # mixed rewards so splits can happen
        body = "topic00 words here" if relevant else "plain words here"
        outlinks = [(nxt, "next page")] if i < 11 else []
        pages.append((url, relevant, "t", body, outlinks))
    return make_world(pages)
