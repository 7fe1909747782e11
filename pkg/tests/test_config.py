from cpdilation.config import TOL_EQ, TOL_RANK, Tolerances


def test_defaults():
    assert Tolerances() == Tolerances(TOL_RANK, TOL_EQ) == Tolerances(1e-9, 1e-8)


def test_precedence():
    env = {"CPDILATION_TOL_RANK": "1e-6", "CPDILATION_TOL_EQ": "1e-5"}
    t = Tolerances.from_env(env)
    assert t == Tolerances(1e-6, 1e-5)
    assert t.override(rank=1e-12) == Tolerances(1e-12, 1e-5)
    assert Tolerances.from_env({}) == Tolerances()
