from trc.experiments import ExperimentSpec, InstanceSpec, format_summary, run_experiment, violations
from trc.generators import asia
from trc.io import write_model


def test_matrix_shape_and_errors_collected(tmp_path):
    path = tmp_path / "a.trc"
    write_model(asia(), path)
    spec = ExperimentSpec(instances=[InstanceSpec("kappa", 4, 2, [0, 1]),
                                     InstanceSpec("file", path=str(path), evidence={"a": "2"})],
                          engines=["trc-cccp", "exact"], rgbf=[True, False])
    res = run_experiment(spec)
    assert len(res) == 3 * 2 * 2
    exact = [r for r in res if r.engine == "exact"]
    assert all(r.max_kl == 0 for r in exact)
    assert "max(KL)" in format_summary(res)
    bad = run_experiment(ExperimentSpec(instances=[InstanceSpec("file", path=str(path), evidence={"a": "9"})]))
    assert bad[0].error and violations(bad, {})


def test_parallel_workers_match_serial():
    inst = [InstanceSpec("kappa", 5, 2, [0, 1])]
    a = run_experiment(ExperimentSpec(instances=inst))
    b = run_experiment(ExperimentSpec(instances=inst, workers=2))
    assert [r.max_kl for r in a] == [r.max_kl for r in b]
