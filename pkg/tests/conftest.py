import numpy as np

from crcg.composer import ScenarioConfig, generate_scenario
from crcg.model import init_params, predict, prepare


def rcam_fd_batch(param_seed=1, tau=0.95):
    """Six graphs relabelled around the initial predictions of a random model.

    At the default tau only part of each graph is marked, so the cosine
    terms are not flat.

    Two predicted classes c, d; per class one correct graph, one graph
    predicted c but labelled d, and so on, so both anchor (true c, predicted
    d) and deceptive (predicted c, true d) marks can occur.
    """
    train_set, _ = generate_scenario(ScenarioConfig(n_train=60, n_test=0), 4)
    params = init_params(4, 5, np.random.default_rng(param_seed))
    preds = predict(train_set.graphs, params)
    counts = np.bincount(preds, minlength=5)
    c, d = np.argsort(-counts, kind="stable")[:2]
    assert counts[d] >= 3, "model predicts fewer than two classes"
    pc, pd = np.flatnonzero(preds == c)[:3], np.flatnonzero(preds == d)[:3]
    labels = {pc[0]: c, pc[1]: c, pc[2]: d, pd[0]: d, pd[1]: d, pd[2]: c}
    graphs = [train_set.graphs[i].replace(label=int(y)) for i, y in labels.items()]
    return prepare(graphs), params, tau


# acceptance criterion lines, echoed in the terminal summary so they survive output capture
ACCEPTANCE: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
