"""The crawl loop: value-guided frontier selection with per-domain caps,
plus the uniform-random and tree-random baselines and run metrics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from .fetch import FetchFailure
from .frontier_tree import (FlatFrontier, FrontierEntry, FrontierExhaustedError,
                            TreeFrontier)
from .graph import (CrawlGraph, OutlinkCandidate, build_state_action,
                    seed_state_action)
from .qlearn import (AgentConfig, QNetwork, ReplayBuffer, ReplayRecord,
                     seed_replay, sync_target, train_step)
from .reward import PageText, reward as reward_of
from .urls import domain_of, normalize_url

POLICIES = ("tres", "tree_random", "random", "synchronous_tres")


class ConfigError(ValueError):
    pass


@dataclass
class CrawlConfig:
    seeds: list
    budget: int
    policy: str = "tres"
    mode: str = "sim"
    max_domain_visits: int | None = None
    hub_features: bool = True
    warmup_steps: int = 50
    rng_seed: int = 0
    max_text_len: int = 500
    remove_unselected: bool = False
    agent: AgentConfig = field(default_factory=AgentConfig)

    def validate(self):
        if not self.seeds:
            raise ConfigError("at least one seed URL is required")
        if self.budget < 1:
            raise ConfigError("budget must be at least 1")
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}; choose from {POLICIES}")
        if self.mode not in ("sim", "live"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.max_domain_visits is not None and self.max_domain_visits < 1:
            raise ConfigError("max_domain_visits must be >= 1 or unlimited (None)")

    def to_dict(self):
        record = asdict(self)
        record["agent"] = asdict(self.agent)
        return record

    @classmethod
    def from_dict(cls, record):
        record = dict(record)
        agent = record.pop("agent", {})
        cfg = cls(**record)
        cfg.agent = AgentConfig(**agent) if isinstance(agent, dict) else agent
        return cfg


@dataclass
class StepStats:
    timestep: int
    frontier_size: int
    leaf_count: int
    q_evals: int
    split_occurred: int


@dataclass
class CrawlResult:
    fetched: list          # (url, reward, timestep)
    status: str            # completed | exhausted
    steps: list            # StepStats per executed timestep
    log_records: list      # JSONL-ready dicts, one per fetch
    losses: list           # (step, loss, epsilon)
    harvest_rate: float = 0.0
    relevant_domains: int = 0
    unique_domains: int = 0
    tree_snapshot: dict | None = None


def enforce_max_domain(graph: CrawlGraph, url, max_visits) -> bool:
    """True while the URL's domain is still below its fetch cap."""
    if max_visits is None:
        return True
    stats = graph.domain_stats.get(domain_of(url))
    fetched = stats[0] if stats else 0
    return fetched < max_visits


def metrics(result: CrawlResult):
    """(harvest rate, relevant domain count, unique domain count) of a run.

    Harvest rate equals the mean binary reward; a domain counts as relevant
    once any of its fetched pages earned reward 1.
    """
    if not result.fetched:
        warnings.warn("empty crawl result; metrics are all zero")
        return 0.0, 0, 0
    rewards = [r for _, r, _ in result.fetched]
    hr = float(np.mean(rewards))
    domain_hits = {}
    for url, r, _ in result.fetched:
        d = domain_of(url)
        domain_hits[d] = domain_hits.get(d, 0) + r
    unique = len(domain_hits)
    relevant = sum(1 for hits in domain_hits.values() if hits > 0)
    return hr, relevant, unique


def _outlink_entries(graph, source_url, page, model, keywords, hub, timestep):
    entries = []
    for target, anchor in page.outlinks:
        if target in graph:
            continue
        candidate = OutlinkCandidate(url=target, anchor=anchor)
        x = build_state_action(graph, source_url, candidate, model, keywords,
                               hub_features=hub)
        entries.append(FrontierEntry(x=x, url=target, parent=source_url,
                                     anchor=anchor, inserted_at=timestep))
    return entries


def crawl(config: CrawlConfig, fetcher, model, keywords) -> CrawlResult:
    """Run the full selection loop for config.budget fetches.

    The replay buffer starts from the seed experience (zero state features,
    unit rewards); each timestep trains one minibatch, picks a frontier entry
    under the domain cap, fetches it, scores the page for its reward, and
    feeds the new experience and outlinks back into the frontier structure.
    Frontier exhaustion ends the run early with status "exhausted".
    """
    config.validate()
    agent = config.agent
    # Independent streams so selection noise never perturbs training and
    # vice versa; policies fed identical experiences then train identically.
    rng_select = np.random.default_rng([config.rng_seed, 0])
    rng_train = np.random.default_rng([config.rng_seed, 1])
    rng_init = np.random.default_rng([config.rng_seed, 2])
    hub = config.hub_features
    dim = 8 if hub else 6
    uses_q = config.policy in ("tres", "synchronous_tres")

    online = target = None
    replay = None
    if uses_q:
        online = QNetwork(dim, hidden=agent.hidden, activation=agent.activation,
                          rng=rng_init)
        target = online.clone()
        replay = ReplayBuffer(agent.replay_capacity)

    graph = CrawlGraph()
    flat = FlatFrontier() if config.policy == "random" else None
    tree = None if config.policy == "random" else TreeFrontier(
        remove_unselected=config.remove_unselected)

    def url_fetched(url):
        return url in graph

    saturated = None
    if config.max_domain_visits is not None:
        def saturated(url):
            return not enforce_max_domain(graph, url, config.max_domain_visits)

    # Seed bootstrap: seeds are treated as relevant and their outlinks form
    # the initial frontier.
    seed_vectors = []
    initial_entries = []
    for raw in config.seeds:
        url = normalize_url(raw)
        if url in graph:
            continue
        try:
            page = fetcher.fetch(url)
        except FetchFailure as exc:
            warnings.warn(f"seed fetch failed ({exc}); seed kept without outlinks")
            page = None
        graph.register_fetch(None, url, 1)
        candidate = OutlinkCandidate(url=url, anchor="",
                                     title=page.title if page else "")
        seed_vectors.append(seed_state_action(candidate, model, keywords, hub_features=hub))
        if page is not None:
            initial_entries.extend(
                _outlink_entries(graph, url, page, model, keywords, hub, timestep=0))

    if uses_q:
        seed_replay(replay, seed_vectors)
    if tree is not None:
        for x in seed_vectors:
            tree.insert_experience(x, 1.0)
        tree.insert_frontier(initial_entries)
    else:
        flat.insert(initial_entries)

    fetched = []
    log_records = []
    losses = []
    steps = []
    status = "completed"
    pending_experience = None
    pending_entries = []

    for t in range(config.budget):
        epsilon = agent.epsilon(t, config.budget)
        if uses_q and len(replay) > 0:
            batch = replay.sample(rng_train, agent.batch_size)
            loss = train_step(online, target, batch, agent)
            losses.append((t, loss, epsilon))
            if (t + 1) % agent.target_sync_every == 0:
                sync_target(online, target)

        try:
            if config.policy == "random":
                flat.insert(pending_entries)
                entry = flat.select(rng_select, url_fetched, saturated)
                frontier_size = flat.frontier_size + 1
                leaf_count = 1
                q_evals = 0
                split = False
                q_value = None
            elif config.policy == "synchronous_tres":
                entry, info = tree.update_synchronous(
                    pending_experience, pending_entries, online,
                    url_fetched, saturated)
                frontier_size, leaf_count = info.frontier_size, tree.leaf_count
                q_evals, split, q_value = info.q_evaluations, info.split_occurred, info.q_value
            else:
                mode = "explore"
                if config.policy == "tres" and t >= config.warmup_steps \
                        and rng_select.random() >= epsilon:
                    mode = "greedy"
                entry, info = tree.update(pending_experience, pending_entries,
                                          mode, online, rng_select,
                                          url_fetched, saturated)
                frontier_size, leaf_count = info.frontier_size, tree.leaf_count
                q_evals, split, q_value = info.q_evaluations, info.split_occurred, info.q_value
        except FrontierExhaustedError:
            status = "exhausted"
            break

        url = entry.url
        try:
            page = fetcher.fetch(url)
        except FetchFailure:
            page = None  # failed fetches consume the timestep with reward 0
        if page is not None:
            page_text = PageText.from_page(url, page.title, page.body_text,
                                           max_len=config.max_text_len)
            r = reward_of(model, page_text, keywords)
        else:
            r = 0
        graph.register_fetch(entry.parent, url, r)

        new_entries = []
        if page is not None:
            new_entries = _outlink_entries(graph, url, page, model, keywords, hub, t)

        if uses_q:
            if new_entries:
                nxt = np.stack([e.x for e in new_entries])
                if nxt.shape[0] > agent.next_action_cap:
                    keep = np.sort(rng_train.choice(
                        nxt.shape[0], size=agent.next_action_cap, replace=False))
                    nxt = nxt[keep]
            else:
                nxt = np.empty((0, dim))
            replay.add(ReplayRecord(x=entry.x, reward=float(r), next_vectors=nxt))

        fetched.append((url, r, t))
        log_records.append({
            "timestep": t,
            "url": url,
            "parent": entry.parent,
            "reward": r,
            "domain": domain_of(url),
            "features": [float(v) for v in entry.x],
            "q_value_estimate": q_value,
        })
        steps.append(StepStats(timestep=t, frontier_size=frontier_size,
                               leaf_count=leaf_count, q_evals=q_evals,
                               split_occurred=int(bool(split))))
        pending_experience = (entry.x, float(r))
        pending_entries = new_entries

    result = CrawlResult(fetched=fetched, status=status, steps=steps,
                         log_records=log_records, losses=losses,
                         tree_snapshot=tree.snapshot() if tree is not None else None)
    result.harvest_rate, result.relevant_domains, result.unique_domains = metrics(result)
    return result


def run_baseline(config: CrawlConfig, fetcher, model, keywords) -> CrawlResult:
    """Same loop with value-free selection (policy random or tree_random)."""
    if config.policy not in ("random", "tree_random"):
        raise ConfigError(f"{config.policy!r} is not a baseline policy")
    return crawl(config, fetcher, model, keywords)
