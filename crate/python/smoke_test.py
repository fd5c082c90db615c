"""Smoke test for the qcontrol Python extension.

Build and run:
    cargo build --release -p qcontrol-py --features extension-module
    cp target/release/libqcontrol_py.so python/qcontrol.so
    python3 python/smoke_test.py
"""
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import qcontrol  # noqa: E402


def close(a, b, tol=1e-9):
    return abs(a - b) < tol


def main():
    x = qcontrol.Operator.named("X")
    assert x.is_unitary()

    cx = qcontrol.add_control(x)
    assert cx.dims == [2, 4]
    assert cx.is_unitary()
    cnot = qcontrol.restrict_to_qubit_levels(cx).matrix()
    expected = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
    assert all(close(cnot[i][j], expected[i][j]) for i in range(4) for j in range(4))

    xa = qcontrol.xa_gate()
    sq = (xa @ xa).matrix()
    assert all(close(sq[i][j], 1.0 if i == j else 0.0) for i in range(4) for j in range(4))

    try:
        qcontrol.Operator([[1, 0], [0, 1]], dims=[3])
    except qcontrol.QControlError:
        pass
    else:
        raise AssertionError("bad dims accepted")

    h = 1 / math.sqrt(2)
    plus_h = qcontrol.State([h, 0, h, 0])
    out = qcontrol.run_entanglement_scheme(1, x, plus_h)
    p_acc = sum(o["probability"] for o in out if o["accepting"])
    assert close(p_acc, 0.25, 1e-9), p_acc

    zero_zero = qcontrol.State([1, 0, 0, 0])
    lc = qcontrol.run_linear_combination(
        qcontrol.Operator.named("I").kron(qcontrol.Operator.named("I")),
        qcontrol.Operator.named("X").kron(qcontrol.Operator.named("X")),
        zero_zero,
    )
    assert set(lc) == {"sum", "difference"}

    rep = qcontrol.experiment("cnot")
    assert isinstance(rep, dict)

    fr = qcontrol.fringe(points=5)
    assert len(fr) == 5
    theta, pp, pm = fr[0]
    assert close(pp, 0.25 * (1 + math.cos(theta)), 1e-9)

    tomo = qcontrol.tomography_run("cnot")
    assert tomo["process_fidelity"] > 0.999, tomo["process_fidelity"]

    rows = qcontrol.compare_report([10])
    assert rows[0]["extension"] == 40
    assert rows[0]["extension_wins"]

    noise = qcontrol.NoiseModel.calibrated()
    noisy = qcontrol.experiment("ef", seed=1, noise=noise)
    assert noisy is not None

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
