"""
Tests Module - narrative-miner

Contains unit tests for:
- Corpus ingestion and lexicon (tokenizer, dictionary, document-term matrix)
- Term networks, disparity backbone and community detection
- Topic attribution, power-law tails, survival and ordinal regression
- Synthetic generator, pipeline and CLI
"""
