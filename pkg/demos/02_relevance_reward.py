"""
The keyword-feature reward model
================================

Pages are reduced to three keyword statistics: density against the relevant
training mean (clamped), raw density, and a keyword-in-URL flag. A logistic
model over those features supplies the crawl's binary reward. Here the
labeled pages come from a generated world, so we can check the reward
against the generator's ground truth.
"""

import numpy as np

from treecrawl import KeywordSet, SimWorldParams, generate_sim_world, train
from treecrawl.reward import PageText, keyword_vector, relevance_probability, reward
from treecrawl.simworld import training_corpus

world = generate_sim_world(SimWorldParams(pages=2000, domains=80), seed=11)
keywords = KeywordSet(frozenset(world.keywords))

records = training_corpus(world, 60, 600, seed=1)
relevant = [PageText.from_page(r["url"], r["title"], r["text"])
            for r in records if r["label"] == 1]
irrelevant = [PageText.from_page(r["url"], r["title"], r["text"])
              for r in records if r["label"] == 0]

model = train(relevant, irrelevant, keywords, seed=0)
print(f"mu (mean keyword count of relevant pages): {model.mu:.2f}")
print(f"decision threshold (picked for macro-F1): {model.threshold:.4f}")
print(f"feature weights: {np.round(model.weights, 2)}, bias {model.bias:+.2f}")

print("\nsample pages:")
for url in world.order[:3] + world.relevant_urls[:3]:
    page = world.pages[url]
    text = PageText.from_page(page.url, page.title, page.body)
    kv = keyword_vector(text, keywords, model.mu)
    prob = relevance_probability(model, text, keywords)
    print(f"  truth={int(page.relevant)} reward={reward(model, text, keywords)} "
          f"p={prob:.3f} kv={np.round(kv, 3)} {url}")

hits = sum(reward(model, PageText.from_page(p.url, p.title, p.body), keywords)
           == int(p.relevant)
           for p in (world.pages[u] for u in world.order))
print(f"\nagreement with ground truth over the whole world: {hits / len(world.order):.3f}")
