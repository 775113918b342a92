import math

import pytest

import copevolve as ce


def half_space(n=3):
    a = [0.0] * n
    a[0] = 1.0
    return ce.Problem("sphere", ce.Bounds.uniform(n), [ce.Constraint.linear(a, 0.0)])


def test_evaluate_reports_violation():
    p = half_space()
    e = ce.evaluate(p, [1.0, 0.0, 0.0])
    assert e["objective"] == pytest.approx(1.0)
    assert e["total_violation"] == pytest.approx(1.0)
    assert not e["feasible"]
    assert ce.evaluate(p, [0.0, 0.0, 0.0])["feasible"]


def test_constructor_contracts():
    with pytest.raises(ValueError):
        ce.Bounds([1.0], [0.0])
    with pytest.raises(ValueError):
        ce.Problem("sphere", ce.Bounds.uniform(2), [ce.Constraint.linear([1.0, 0.0, 0.0], 0.0)])
    with pytest.raises(ValueError):
        ce.Problem("nope", ce.Bounds.uniform(2))


def test_solve_is_deterministic():
    cfg = ce.load_config("desk", ["dimension=3", "solvers.DE.max_fen=3000"])
    p = half_space()
    for solver in ce.SOLVERS:
        first = ce.solve(p, solver, 7, cfg)
        assert first == ce.solve(p, solver, 7, cfg)
        assert first["solved"]
        assert first["fen"] <= cfg.document["solvers"][solver]["max_fen"]


def test_features():
    p = ce.Problem("sphere", ce.Bounds.uniform(2),
                   [ce.Constraint.linear([3.0, 4.0], -2.0), ce.Constraint.linear([0.0, 1.0], 0.0)])
    f = ce.features(p, samples=2000, seed=3)
    assert f["constraint_count"] == 2
    assert f["distances"][0] == pytest.approx(0.4)
    assert len(f["angles"]) == 1
    assert f["angles"][0][2] == pytest.approx(math.degrees(math.acos(0.8)))
    assert 0.0 <= f["feasibility_ratio"] <= 1.0
    with pytest.raises(ArithmeticError):
        ce.shortest_distance(ce.Constraint.quadratic([-1.0, 0.0], -1.0))


def test_instance_round_trip(tmp_path):
    p = half_space()
    ce.write_instance(tmp_path / "i.json", p, {"note": "x"})
    q, meta = ce.read_instance(tmp_path / "i.json")
    assert q == p
    assert meta == {"note": "x"}
    assert ce.Problem.from_dict(p.to_dict()) == p
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ce.DataError):
        ce.read_instance(tmp_path / "bad.json")


def test_config_overrides():
    cfg = ce.load_config("paper", ["evolver.generations=3"])
    assert cfg.dimension == 30
    assert cfg.document["evolver"]["generations"] == 3
    with pytest.raises(ce.DataError):
        ce.load_config("desk", ["evolver.nope=1"])


def test_derive_seed_is_stable():
    assert ce.derive_seed(1, [2, 3]) == ce.derive_seed(1, [2, 3])
    assert ce.derive_seed(1, [2, 3]) != ce.derive_seed(1, [3, 2])


def test_evolve_and_report(tmp_path):
    cfg = ce.load_config("desk", [
        "dimension=3", "evolver.population_size=4", "evolver.generations=1", "evolver.repeats=1",
        "pipeline.objectives=sphere", "pipeline.kinds=linear", "pipeline.counts=1", "pipeline.targets=DE",
        "pipeline.validation_seeds=2", "features.samples=500",
        "solvers.DE.max_fen=1500", "solvers.ES.max_fen=1500", "solvers.PSO.max_fen=1500",
    ])
    cell = ce.evolve_hard_instance(cfg, "sphere", "linear", 1, "DE", 5)
    assert cell["id"] == "sphere-linear-1c-DE-hard"
    assert cell["meta"]["target_solver"] == "DE"
    assert len(cell["problem"].constraints) == 1
    assert set(cell["validation_fen"]) == set(ce.SOLVERS)

    entries = ce.run_pipeline(cfg, 42, tmp_path)
    assert [e["ok"] for e in entries] == [True]
    written = ce.emit_report(tmp_path)
    assert len(written) == 8
    assert (tmp_path / "manifest.json").exists()
