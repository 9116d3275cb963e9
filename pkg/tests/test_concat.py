import json

import numpy as np
import pytest

from planarends import balance as B
from planarends import concat as C
from planarends.configspace import forces, is_balanced

FIB = {0: (0, 1), 1: (0,)}


@pytest.fixture(scope="module")
def lib():
    return tuple(B.make_compatible([B.chain(), B.fan(2), B.ladder22()]))


def test_fibonacci_prefix():
    w = C.Substitution(FIB, (0, 0))
    assert w.power == 2
    assert list(w.indices(0, 12)) == [0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1]


def test_fibonacci_factor_complexity():
    seq = "".join(map(str, C.Substitution(FIB, (0, 0)).indices(0, 3000)))
    for n in range(1, 15):
        assert len({seq[i:i + n] for i in range(len(seq) - n)}) == n + 1


def test_fibonacci_both_sides_have_no_11():
    seq = C.Substitution(FIB, (0, 0)).indices(-500, 500)
    assert not np.any((seq[1:] == 1) & (seq[:-1] == 1))


def test_bad_substitutions():
    with pytest.raises(ValueError):
        C.Substitution({0: (), 1: (0,)}, (0, 0))
    with pytest.raises(ValueError):
        C.Substitution({0: (0, 2)}, (0, 0))
    with pytest.raises(ValueError):
        C.Substitution({0: (0,), 1: (1,)}, (0, 0))


def test_periodic_rule():
    r = C.Periodic((0, 1, 0, 1))
    assert r.minimal_period() == 2
    assert list(r.indices(-3, 2)) == [1, 0, 1, 0, 1, 0]


def test_explicit_rule():
    r = C.Explicit(-1, (2, 0, 1))
    assert r.m_max == 1
    assert list(r.indices_range(-1, 1)) == [2, 0, 1]
    with pytest.raises(C.WindowNotCoverableError):
        r.indices_at(2)
    assert C.Explicit(0, (1,), fill=0).indices_at(7) == 0


def test_incompatible_library():
    with pytest.raises(C.IncompatibleBlocksError):
        C.BlockWord((B.chain(), B.fan(2)), C.Periodic((0, 1)))


def test_rule_index_out_of_library(lib):
    with pytest.raises(ValueError):
        C.BlockWord(lib, C.Periodic((0, 5)))


def test_plan_and_concatenation_balanced(lib):
    word = C.BlockWord(lib, C.Periodic((0, 1, 2)))
    cfg = C.concatenate(word, (-6, 6))
    assert cfg.k_min == -6 and cfg.k_max == 6
    fs = forces(cfg)
    assert fs.interior_max() < 1e-12
    assert is_balanced(cfg)
    # every interior G equals the common residual
    for k in range(-5, 7):
        assert fs.G(k) == pytest.approx(word.residual, abs=1e-12)


def test_block_zero_starts_at_origin(lib):
    word = C.BlockWord(lib, C.Periodic((1, 0)))
    pl = C.plan(word, -3, 3)
    assert pl.translations[-pl.m_lo] == 0
    cfg = C.concatenate(word, (-3, 3))
    assert cfg.level(0)[0] == 0


def test_seams_stored_once(lib):
    word = C.BlockWord(lib, C.Periodic((1,)))
    cfg = C.concatenate(word, (0, 4))
    assert cfg.sizes == (1, 2, 1, 2, 1)


def test_concatenation_type_follows_word(lib):
    word = C.BlockWord(lib, C.Substitution(FIB, (0, 0)))
    cfg = C.concatenate(word, (0, 12))
    idx = word.rule.indices(0, 12)
    expected = []
    for m in idx:
        expected.extend(lib[m].sizes[:-1])
    assert list(cfg.sizes) == expected[:13]


def test_window_not_coverable(lib):
    word = C.BlockWord(lib, C.Explicit(0, (0, 1)))
    with pytest.raises(C.WindowNotCoverableError):
        C.concatenate(word, (-3, 3))


def test_uniform_certificate(lib):
    word = C.BlockWord(lib, C.Substitution(FIB, (0, 0)))
    cert = C.certify_word(word)
    assert cert.passed
    assert cert.sigma_min == pytest.approx(min(b.sigma_min for b in map(B.certify, lib[:2])))


def test_classify_fibonacci(lib):
    v = C.classify(C.BlockWord(lib, C.Substitution(FIB, (0, 0))))
    assert v.kind == "quasiperiodic" and v.period is None
    assert [w for w, _ in v.witnesses] == list(range(1, 33))
    # least return shifts of the Fibonacci word are Fibonacci numbers
    assert {T for _, T in v.witnesses} <= {1, 2, 3, 5, 8, 13, 21, 34, 55, 89}


def test_classify_periodic_minimal(lib):
    v = C.classify(C.BlockWord(lib, C.Periodic((0, 1, 0, 1, 0, 1))))
    assert v.kind == "periodic" and v.period == 2
    v = C.classify(C.BlockWord(lib, C.Periodic((2, 0, 0))))
    assert v.period == 3


def test_classify_periodic_substitution(lib):
    v = C.classify(C.BlockWord(lib, C.Substitution({0: (0, 1), 1: (0, 1)}, (1, 0))))
    assert v.kind == "periodic" and v.period == 2


def test_classify_explicit_not_detected(lib):
    v = C.classify(C.BlockWord(lib, C.Explicit(0, (0, 1, 0))))
    assert v.kind == "not_detected"
    assert "no recurrence" in C.verdict_summary(v)


def test_genus(lib):
    riemann = C.BlockWord(lib, C.Periodic((0,)))
    assert C.genus(riemann) == 0
    one = C.BlockWord(lib, C.Explicit(-3, (0, 0, 0, 1, 0, 0, 0), fill=0))
    assert C.genus(one) == 1
    assert C.genus(one, (-2, 2)) == 1
    assert C.genus(C.BlockWord(lib, C.Substitution(FIB, (0, 0)))) == "infinite"
    assert C.genus(C.BlockWord(lib, C.Periodic((0, 2)))) == "infinite"


def test_word_json_round_trip(lib):
    word = C.BlockWord(lib, C.Substitution(FIB, (0, 0)))
    back = C.word_from_json(json.loads(json.dumps(C.word_to_json(word))))
    assert back.rule == word.rule
    assert back.residual == pytest.approx(word.residual)


def test_word_json_builtin_refs():
    obj = {"library": [{"builtin": "chain"}, {"builtin": "fan", "params": {"n": 3}}],
           "target_residual": [0.0, -0.5],
           "rule": {"kind": "periodic", "word": [0, 1]}}
    word = C.word_from_json(obj)
    assert word.residual == pytest.approx(-0.5j)
    obj["bogus"] = 1
    with pytest.raises(ValueError):
        C.word_from_json(obj)


def test_rule_json_kinds():
    for r in (C.Periodic((0, 1)), C.Explicit(-2, (1, 0), fill=0),
              C.Substitution(FIB, (0, 0))):
        assert C.rule_from_json(C.rule_to_json(r)) == r
    with pytest.raises(ValueError):
        C.rule_from_json({"kind": "sturmian"})
