"""Smoke test for the cantor_moran extension module.

Build and install first, e.g.

    cd crates/python && maturin build --release -o dist && pip install dist/*.whl
"""

import cmath
import json
from fractions import Fraction

import cantor_moran as cm


def main() -> None:
    quarter = cm.Sequence.periodic([(4, [0, 2])])
    outcome, rule, _ = quarter.verdict()
    assert outcome == "spectral", outcome
    assert rule is not None

    # Single stage of the quarter measure: mask (1 + e(-2 xi / 4)) / 2.
    xi = 0.3
    expected = 1.0
    for k in range(1, 13):
        expected *= (1 + cmath.exp(-2j * cmath.pi * 2 * xi / 4**k)) / 2
    assert abs(quarter.mu_hat(xi, depth=12) - expected) < 1e-12

    spectrum = quarter.spectrum(3)
    assert len(spectrum) == 8
    assert all(isinstance(x, Fraction) for x in spectrum)
    assert quarter.mutually_orthogonal(spectrum, depth=12)
    q = quarter.q_values(spectrum, [0.0, 0.25, 0.5], depth=12)
    assert all(0.0 < v <= 1.0 + 1e-12 for v in q), q

    digits = cm.DigitSet([0, 2, 4], 3)
    assert digits.is_complete_residue_system()
    holds, witness = digits.uniform_zeros()
    assert not holds and witness is not None
    assert cm.DigitSet([0, 1, 2]).mask_vanishes_at(Fraction(1, 3))

    # Only the first scale may fail to be a multiple of the digit count.
    first_free = cm.Sequence.periodic([(6, [0, 1, 2])], prefix=[(4, [0, 1, 2])])
    assert first_free.verdict()[0] == "spectral"
    second_fails = cm.Sequence.periodic([(6, [0, 1, 2])], prefix=[(6, [0, 1, 2]), (4, [0, 1, 2])])
    assert second_fails.verdict()[0] == "not spectral"

    config = '[tail]\nkind = "periodic"\nperiod = [[4, [0, 2]]]\n\n[numeric]\ndepth = 10\nspectrum_depth = 3\nsamples = 8\n'
    report = json.loads(cm.analyze(config))
    assert report["verdict"]["outcome"] == "spectral", report["verdict"]
    assert "verdict" in cm.analyze(config, text=True)
    assert cm.probe(config) == spectrum

    try:
        cm.Sequence.periodic([(4, [])])
    except ValueError:
        pass
    else:
        raise AssertionError("empty digit set accepted")

    print(f"cantor_moran {cm.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
