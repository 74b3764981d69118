"""
Growing a topic keyword set from word vectors
=============================================

Start with two seed keywords and a tiny hand-made embedding table, then admit
every corpus word whose mean cosine similarity to the seeds reaches the
seeds' own average pairwise similarity.
"""

import math

import numpy as np

from treecrawl import KeywordSet, cosine, expand_keywords, threshold_b
from treecrawl.embeddings import EmbeddingTable, score_candidates


def unit(theta):
    return np.array([math.cos(theta), math.sin(theta)])


# seeds 60 degrees apart: their mutual cosine, and hence the admission
# threshold, is exactly 0.5
entries = {
    "football": unit(0.0),
    "league": unit(math.pi / 3),
    "goalkeeper": unit(math.pi / 6),   # between the seeds: very similar
    "touchdown": unit(math.pi / 4),
    "casserole": unit(2.0),            # far away
    "spreadsheet": unit(-1.5),
}
table = EmbeddingTable(dimension=2, entries=entries)
seeds = KeywordSet(frozenset({"football", "league"}))

b = threshold_b(seeds.initial, table)
print(f"admission threshold b = {b:.4f}")

corpus = [
    "goalkeeper saves touchdown casserole".split(),
    "spreadsheet casserole goalkeeper".split(),
]
scores = score_candidates(seeds, corpus, table)
for token, score in sorted(scores.items(), key=lambda kv: -kv[1]):
    marker = "admitted" if score >= b else "rejected"
    print(f"  {token:12s} mean cosine {score:+.4f}  {marker}")

expanded = expand_keywords(seeds, corpus, table)
print("combined keyword set:", sorted(expanded.combined))

# sanity: the admitted words really are closer to both seeds
for token in expanded.discovered:
    sims = [cosine(entries[token], entries[k]) for k in sorted(seeds.initial)]
    assert np.mean(sims) >= b
