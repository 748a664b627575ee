"""classabs: label-space coarsening for multi-label text corpora.

Three class-abstraction paths over a common evaluation harness: expert
hierarchy projection, WPGMA clustering of fine classes in LSI space, and
unsupervised k-means labeling on pre-trained embeddings, scored with a
one-vs-rest gradient-boosted-tree classifier and four metrics (exact match,
F1 macro/micro, normalized entropy).
"""

__version__ = "0.1.0"

from .classify import SPLIT_BACKEND  # noqa: F401
