"""Corpus mining of gendered action-phrase stereotypes.

The pipeline: ingest POS/lemma-annotated corpora, detect commonsense
action phrases with a gap-tolerant matcher, attribute each occurrence
to a gender (author metadata for tweets, nearest-left pronoun or proper
name for documents), normalize counts against a binomial baseline, and
evaluate the scores against human ratings.
"""

__version__ = "0.1.0"
