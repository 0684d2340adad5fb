"""Fifty high-frequency English words kept out of comment word clouds.

Only words of length 3+ appear because shorter tokens are dropped
before the stopword check ever runs.
"""

STOPWORDS = frozenset(
    {
        "the", "and", "was", "were", "this", "that", "there", "here",
        "with", "for", "are", "but", "not", "you", "all", "can",
        "had", "her", "his", "him", "she", "has", "have", "been",
        "they", "them", "their", "what", "when", "where", "which", "will",
        "would", "could", "should", "from", "very", "just", "some", "than",
        "then", "too", "out", "about", "into", "over", "only", "also",
        "because", "while",
    }
)

assert len(STOPWORDS) == 50
