import json
import os
from pathlib import Path

import pytest

import stairgen

SOURCE_DIR = Path(os.environ.get("STAIRGEN_SOURCE_DIR", Path(__file__).resolve().parents[2]))


def test_stairs_matches_greedy():
    target = stairgen.HashLM(stairgen.Vocabulary.synthetic(32), seed=3, context_window=4)
    draft = stairgen.AgreementDraft(target, 0.9, seed=1)
    cfg = stairgen.GenConfig(max_new_tokens=20, batch_size=5)
    greedy, _ = stairgen.greedy_generate(target, [2, 3], cfg)
    stairs, trace = stairgen.stairs_generate(target, draft, [2, 3], cfg)
    seq, _ = stairgen.sequential_assisted_generate(target, draft, [2, 3], cfg)
    assert stairs == greedy == seq
    assert trace.check_consistency() is None
    assert trace.totals.tokens_generated == 20


def test_golden_greedy_sequence():
    lm = stairgen.HashLM(stairgen.Vocabulary.synthetic(16), seed=7, context_window=4)
    out, _ = stairgen.greedy_generate(lm, [2], stairgen.GenConfig(max_new_tokens=10))
    assert out == [2, 6, 6, 7, 8, 12, 6, 10, 15, 5, 6]


def test_validate_and_batch():
    rows = stairgen.build_stairs_batch([5, 6], [8, 9])
    assert rows == [[5, 6], [5, 6, 8], [5, 6, 8, 9]]
    r = stairgen.stairs_validate([7, 9, 4], [7, 8, 4, 2])
    assert r.accepted_draft_count == 1
    assert r.committed == [7, 8]
    with pytest.raises(stairgen.ContractViolation):
        stairgen.stairs_validate([1], [1])


def test_perfect_draft_simulated_time():
    target = stairgen.HashLM(stairgen.Vocabulary.synthetic(32), seed=3)
    draft = stairgen.AgreementDraft(target, 1.0)
    _, trace = stairgen.stairs_generate(target, draft, [2], stairgen.GenConfig(12, 4))
    assert trace.totals.target_batch_calls == 3
    assert stairgen.simulate_time(trace, stairgen.LatencyModel(0.05, 0.001, 0.002)) == pytest.approx(0.177)


def test_metrics():
    cand = "the cat sat on the mat with a red hat".split()
    ref = "the cat is sitting on the mat with the hat".split()
    assert stairgen.bleu(cand, ref).value == pytest.approx(32.4667915475, abs=1e-8)
    assert stairgen.bleu(ref, ref).value == 100.0
    assert stairgen.speedup_percent(0.4853, 0.4016) == pytest.approx(17.24, abs=0.01)
    stats = stairgen.timing_stats([1.0, 2.0, 3.0, 4.0, 5.0])
    assert (stats.median, stats.p25, stats.p75) == (3.0, 2.0, 4.0)


def test_ngram_and_errors():
    lm = stairgen.train_ngram("the dog the dog", 2)
    vocab = lm.vocabulary
    logits = lm.score_next(vocab.encode("the"))
    assert vocab.token(stairgen.argmax_token(logits)) == "dog"
    with pytest.raises(stairgen.ConfigError):
        stairgen.train_ngram("", 2)
    with pytest.raises(stairgen.ConfigError):
        lm.score_next([999])


def test_sweep_json_is_deterministic():
    config = str(SOURCE_DIR / "tests" / "fixtures" / "ngram.ini")
    a = stairgen.run_sweep_json(config, seed=4)
    b = stairgen.run_sweep_json(config, seed=4)
    assert a == b
    report = json.loads(a)
    assert report["kind"] == "sweep"
    assert report["sweep"]["argmin_batch_size"] in range(2, 7)
