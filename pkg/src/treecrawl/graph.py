"""Traversed-subgraph state: web paths, per-domain tallies, and the shared
state-action feature vector.

The traversal is a forest rooted at the seeds; each URL is fetched at most
once and keeps the parent that first discovered it, so per-node path
statistics can be maintained incrementally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .reward import PageText, relevance_probability, keyword_count, keyword_in_url
from .text import tokenize
from .urls import domain_of

STATE_ACTION_DIM = 8
STATE_ACTION_DIM_NO_HUB = 6


class ClosureViolationError(ValueError):
    """A URL was registered twice."""


class GraphIntegrityError(ValueError):
    """A non-seed fetch referenced a parent outside the closure."""


@dataclass
class NodeRecord:
    url: str
    parent: str | None
    reward: int
    depth: int
    dist_to_relevant: float  # hops up to the nearest reward-1 node, self counts as 0
    path_relevant: int
    path_length: int


@dataclass(frozen=True)
class OutlinkCandidate:
    """An unfetched outlink: its URL, the anchor text that referenced it, and
    whatever short title text is known for it (may be empty)."""

    url: str
    anchor: str = ""
    title: str = ""


class CrawlGraph:
    def __init__(self):
        self.nodes = {}
        self.domain_stats = {}  # domain -> [fetched_count, relevant_count]
        self.timestep = 0

    @property
    def closure(self):
        return self.nodes.keys()

    def __contains__(self, url):
        return url in self.nodes

    def register_fetch(self, parent, url, reward) -> NodeRecord:
        """Add a fetched URL under its discovering parent (None for a seed)."""
        if url in self.nodes:
            raise ClosureViolationError(f"{url} already fetched")
        reward = int(reward)
        if parent is None:
            node = NodeRecord(url=url, parent=None, reward=reward, depth=0,
                              dist_to_relevant=0 if reward == 1 else math.inf,
                              path_relevant=reward, path_length=1)
        else:
            if parent not in self.nodes:
                raise GraphIntegrityError(f"parent {parent} not in closure")
            p = self.nodes[parent]
            if reward == 1:
                dist = 0
            elif p.dist_to_relevant is math.inf:
                dist = math.inf
            else:
                dist = p.dist_to_relevant + 1
            node = NodeRecord(url=url, parent=parent, reward=reward, depth=p.depth + 1,
                              dist_to_relevant=dist,
                              path_relevant=p.path_relevant + reward,
                              path_length=p.path_length + 1)
            self.timestep += 1
        self.nodes[url] = node
        stats = self.domain_stats.setdefault(domain_of(url), [0, 0])
        stats[0] += 1
        stats[1] += reward
        return node

    def state_features(self, parent) -> np.ndarray:
        """(parent reward, inverse distance to the nearest relevant path node,
        path relevance ratio) for the path ending at `parent`."""
        if parent not in self.nodes:
            raise GraphIntegrityError(f"{parent} not in closure")
        node = self.nodes[parent]
        if node.dist_to_relevant is math.inf:
            inv_dist = 0.0
        else:
            # Relevant parent maps to 1; each hop up to the nearest relevant
            # node halves-then-thirds etc. the signal, matching the worked
            # convention that one hop gives 0.5.
            inv_dist = 1.0 / (1.0 + node.dist_to_relevant)
        ratio = node.path_relevant / node.path_length
        return np.array([float(node.reward), inv_dist, ratio], dtype=np.float64)

    def hub_features(self, url):
        """(domain relevance ratio, known-domain indicator) for the URL's domain."""
        stats = self.domain_stats.get(domain_of(url))
        if stats is None or stats[0] == 0:
            return 0.0, 0.5
        return stats[1] / stats[0], 1.0

    def walk_path(self, url):
        """Root-to-node URL sequence; independent of the stored statistics."""
        chain = []
        cur = url
        while cur is not None:
            node = self.nodes[cur]
            chain.append(cur)
            cur = node.parent
        chain.reverse()
        return chain

    def harvest_rate(self):
        if not self.nodes:
            return 0.0
        return sum(n.reward for n in self.nodes.values()) / len(self.nodes)


def _action_features(candidate: OutlinkCandidate, model, keywords) -> np.ndarray:
    a1 = 1.0 if keyword_in_url(candidate.url, keywords) else 0.0
    a2 = 1.0 if keyword_count(tokenize(candidate.anchor), keywords) > 0 else 0.0
    # Relevance is estimated from the candidate's short text: its title when
    # known, otherwise the anchor text that referenced it.
    short_text = candidate.title or candidate.anchor
    a3 = relevance_probability(model, PageText.title_only(candidate.url, short_text), keywords)
    return np.array([a1, a2, a3], dtype=np.float64)


def build_state_action(graph: CrawlGraph, parent, candidate: OutlinkCandidate,
                       model, keywords, hub_features=True) -> np.ndarray:
    """Concatenated (state, action[, hub]) vector for one frontier candidate."""
    state = graph.state_features(parent)
    action = _action_features(candidate, model, keywords)
    if not hub_features:
        return np.concatenate([state, action])
    h1, h2 = graph.hub_features(candidate.url)
    return np.concatenate([state, action, [h1, h2]])


def seed_state_action(candidate: OutlinkCandidate, model, keywords,
                      hub_features=True) -> np.ndarray:
    """Bootstrap vector for selecting a seed from the empty graph: zero state
    features, action features for the seed itself, unknown-domain hub features."""
    state = np.zeros(3, dtype=np.float64)
    action = _action_features(candidate, model, keywords)
    if not hub_features:
        return np.concatenate([state, action])
    return np.concatenate([state, action, [0.0, 0.5]])
