"""Tokenization and stopword handling shared by keyword expansion and page scoring."""

import re

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Compact English stopword list; callers may substitute their own via load_stopwords.
DEFAULT_STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because been
before being below between both but by can cannot could did do does doing down
during each few for from further had has have having he her here hers herself
him himself his how i if in into is it its itself just me more most my myself
no nor not now of off on once only or other our ours ourselves out over own
same she should so some such than that the their theirs them themselves then
there these they this those through to too under until up very was we were
what when where which while who whom why will with would you your yours
yourself yourselves
""".split())


def tokenize(text):
    """Lowercase and split into alphanumeric tokens, dropping punctuation."""
    if not text:
        return []
    return _TOKEN_RE.findall(text.lower())


def load_stopwords(path):
    """Read one stopword per line; blank lines and '#' comments are skipped."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word and not word.startswith("#"):
                words.add(word)
    return frozenset(words)
