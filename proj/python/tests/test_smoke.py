import pytest

import kernelguard as kg


@pytest.fixture(scope="module")
def corpus():
    return kg.generate_synthetic_corpus(8, 6, 6, pages_per_site=3, seed=11)


def test_synthetic_counts(corpus):
    assert len(corpus) == 20
    assert corpus.count("real") == 8
    assert corpus.count("spoof") == 6
    assert corpus.page_count() == 60


def test_corpus_round_trip(tmp_path, corpus):
    kg.write_corpus(corpus, tmp_path / "c")
    loaded, warnings = kg.load_corpus(tmp_path / "c")
    assert warnings == []
    assert kg.corpus_fingerprint(loaded) == kg.corpus_fingerprint(corpus)


def test_cues_cover_fixed_inventory(corpus):
    site = corpus.websites[0]
    cues = kg.extract_page_cues(site.pages[0], site)
    assert cues["url:https"] in (0.0, 1.0)
    assert "text:token_count" in cues


def test_catalog_and_selection(corpus):
    catalog = kg.build_catalog(corpus)
    selected = kg.select_top_k(catalog, corpus, 10)
    assert len(selected) == 10
    assert len(catalog) >= 10
    assert selected.report_tsv().startswith("name\tcategory\tdoc_freq\tig\n")


def test_train_classify_save(tmp_path, corpus):
    detector, summary = kg.train_detector(corpus, {"seed": 3})
    assert summary["kkt_violations"] == 0
    assert detector.support_vector_count == summary["support_vectors"]
    verdict = detector.classify(corpus.websites[0])
    assert verdict["verdict"] in ("real", "fake")
    detector.save(tmp_path / "m.json")
    again = kg.load_detector(tmp_path / "m.json")
    assert again.to_string() == detector.to_string()
    report = kg.evaluate(again, corpus)
    assert 0.0 <= report["overall_accuracy"] <= 1.0


def test_bad_config_key(corpus):
    with pytest.raises(ValueError):
        kg.train_detector(corpus, {"no_such_key": 1})


def test_website_rejects_unknown_label():
    with pytest.raises(ValueError):
        kg.Website("s", "phishy", "https://a.example/", [kg.Page("p0", "https://a.example/", "<p>x</p>")])
