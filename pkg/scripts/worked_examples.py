"""Bicycle/unicycle worked examples: recognition, naive weights, and edit locality."""

import numpy as np

from genrecog import (
    ExpectationMatrix,
    SolverConfig,
    SolverKind,
    add_class,
    classify_feedforward,
    naive_weights,
    pseudoinverse,
    set_expectation,
    solve,
    weight_change_report,
)
from genrecog.learning import edit_report

FEATURES = ("wheels", "horizontal", "handlebar", "seat")


def show(title, labels, values):
    print(f"{title}: " + ", ".join(f"{c}={v:.4f}" for c, v in zip(labels, values)))


def main():
    m1 = ExpectationMatrix.from_rows([[2, 1, 1, 1], [1, 0, 0, 1]], FEATURES, ("bicycle", "unicycle"))
    print("M1 (classes as rows):")
    for c, row in zip(m1.class_labels, m1.rows):
        print(f"  {c:12s} {row}")

    for x in ([1, 0, 0, 1], [2, 1, 1, 1]):
        for kind, cfg in ((SolverKind.LEAST_SQUARES, SolverConfig(dt=0.02)), (SolverKind.REGULATORY_FEEDBACK, None)):
            y, trace = solve(m1, x, kind=kind, config=cfg)
            show(f"X={x} {kind.value} ({trace.n_iterations} steps)", m1.class_labels, y)

    show("naive weights on X=[1,0,0,1]", m1.class_labels, classify_feedforward(naive_weights(m1), [1, 0, 0, 1]))
    W1 = pseudoinverse(m1)
    print("W1 =\n", np.round(W1.entries, 6))

    m2 = add_class(m1, "rollerblade", [4, 0, 0, 0])
    m3 = set_expectation(m1, "bicycle", "horizontal", 0.5)
    for name, edited in (("add rollerblade", m2), ("bicycle horizontal -> 0.5", m3)):
        rep = edit_report(m1, edited)
        change = weight_change_report(W1, pseudoinverse(edited))
        print(
            f"{name}: M entries changed {rep.n_changed}, classes added {len(rep.added_classes)}; "
            f"W entries changed {change.n_changed}/{change.n_compared}"
        )
        print("  W =\n", np.round(pseudoinverse(edited).entries, 3))

    for k, c in enumerate(m2.class_labels):
        y, _ = solve(m2, m2.entries[:, k])
        show(f"M2 rf on {c} pattern", m2.class_labels, y)


if __name__ == "__main__":
    main()
