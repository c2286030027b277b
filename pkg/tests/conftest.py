import pytest

from streamlens import snapshot, synth


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """One deterministic synthetic corpus shared by the integration tests."""
    cfg = synth.SynthConfig(
        n_accounts=120, n_tweets=1500, days=10, labeled_accounts=60
    )
    corpus = synth.generate(cfg)
    out = tmp_path_factory.mktemp("corpus")
    paths = synth.write_corpus(corpus, out, shards=2)
    return cfg, corpus, paths


@pytest.fixture(scope="session")
def small_config(small_corpus):
    _cfg, _corpus, paths = small_corpus
    return snapshot.AnalysisConfig(
        streams=tuple(str(p) for p in paths["streams"]),
        scores={"tier1": str(paths["scores"])},
        labels=str(paths["labels"]),
        bias_dictionary=str(paths["bias"]),
        abusive_lexicon=str(paths["lexicon"]),
        state_media=str(paths["statemedia"]),
        audit_fixture=str(paths["audit_fixture"]),
        k_core_k=3,
        lda_k=3,
        lda_iterations=120,
        dtm_v=500,
        audit_sample=None,
    )


@pytest.fixture(scope="session")
def small_snapshot(small_config, tmp_path_factory):
    store_dir = tmp_path_factory.mktemp("store")
    snap = snapshot.snapshot_build(small_config, store_dir)
    return store_dir, snap
