"""End-to-end tests of the command line."""
import json

import pytest
from pydantic import ValidationError

from config import EnvSettings, RunConfig, config
from decomposition_manager import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, DecompositionManager, build_parser, main
from instance_generator import collision_fixture
from instance_io import decomposition_to_wire, instance_to_wire, write_json
from ufss_core import DecompositionResult


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv('UFSS_SLACK_WEBHOOK_URL', raising=False)


@pytest.fixture
def fixture_file(tmp_path):
    path = tmp_path / "fixture.json"
    write_json(path, instance_to_wire(collision_fixture()))
    return path


class RecordingSlack:
    def __init__(self):
        self.summaries = []

    def send_verification_report(self, summary):
        self.summaries.append(summary)
        return True


def test_gen_writes_the_corpus(tmp_path):
    out = tmp_path / "corpus"
    assert main(["gen", "--out", str(out), "--count", "3"]) == EXIT_PASS
    total = 3 + config.generator.linear_count + config.generator.indep_count
    assert sorted(p.name for p in out.iterdir()) == [f"instance_{i:03d}.json" for i in range(total)]
    first = json.loads((out / "instance_000.json").read_text())
    assert first == json.loads(json.dumps(instance_to_wire(collision_fixture())))


def test_roundtrip_then_verify(tmp_path, fixture_file):
    dec, trace = tmp_path / "dec.json", tmp_path / "trace.json"
    code = main(["roundtrip", "--input", str(fixture_file), "--output", str(dec), "--emit-trace", str(trace),
                 "--fail-on-fallback"])
    assert code == EXIT_PASS
    assert json.loads((tmp_path / "dec.report.json").read_text())["status"] == "PASS"
    assert len(json.loads(trace.read_text())) >= 1

    report = tmp_path / "report.json"
    code = main(["verify", "--instance", str(fixture_file), "--decomposition", str(dec), "--output", str(report)])
    assert code == EXIT_PASS
    assert json.loads(report.read_text())["status"] == "PASS"


def test_verify_fails_on_overlapping_pieces(tmp_path, fixture_file):
    bad = tmp_path / "bad.json"
    write_json(bad, decomposition_to_wire(DecompositionResult.single(collision_fixture(), 'LEXMIN')))
    code = main(["verify", "--instance", str(fixture_file), "--decomposition", str(bad), "--grid=-1:1:1"])
    assert code == EXIT_FAIL


def test_linear_case(tmp_path):
    path = tmp_path / "linear.json"
    write_json(path, {
        "kind": "linear", "n": 1, "k": 1, "l": 1, "r": [["2"]], "s": [["3"]], "b": ["1"],
        "S": {"m": 1, "points": [["0"], ["1"]]},
    })
    assert main(["roundtrip", "--case", "linear", "--input", str(path), "--grid=-1:1:1"]) == EXIT_PASS


@pytest.mark.parametrize("argv", [
    ["roundtrip", "--case", "linear"],
    ["decompose", "--grid", "1:0:1"],
])
def test_input_errors(fixture_file, argv):
    assert main(argv + ["--input", str(fixture_file)]) == EXIT_INPUT


def test_unreadable_input(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main(["decompose", "--input", str(broken)]) == EXIT_INPUT
    assert main(["decompose", "--input", str(tmp_path / "missing.json")]) == EXIT_INPUT


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_notify_sends_the_summary(fixture_file):
    manager = DecompositionManager(EnvSettings(slack_webhook_url=None))
    slack = RecordingSlack()
    manager.slack_integration = slack
    cfg = RunConfig(command='roundtrip', input=fixture_file, notify=True, grid="-1:1:1")
    assert manager.run_pipeline(cfg) == EXIT_PASS
    (summary,) = slack.summaries
    assert summary['status'] == 'PASS'
    assert summary['case'] == 'rcf'
    assert summary['fallback_pieces'] == 0
    assert summary['tags']['V1-DESCENT'] >= 1


def test_run_config_rejects_unknown_fields():
    with pytest.raises(ValidationError):
        RunConfig(command='decompose', verbose=True)


def test_verify_rejects_a_case_that_does_not_fit_the_instance(tmp_path, fixture_file):
    dec = tmp_path / "dec.json"
    assert main(["decompose", "--input", str(fixture_file), "--output", str(dec), "--grid=-1:1:1"]) == EXIT_PASS
    for case in ("linear", "indep"):
        code = main(["verify", "--case", case, "--instance", str(fixture_file), "--decomposition", str(dec),
                     "--grid=-1:1:1"])
        assert code == EXIT_INPUT
    assert main(["verify", "--case", "rcf", "--instance", str(fixture_file), "--decomposition", str(dec),
                 "--grid=-1:1:1"]) == EXIT_PASS


def test_grid_with_wrong_arity_is_an_input_error(fixture_file):
    assert main(["decompose", "--input", str(fixture_file), "--grid=-1:1:1,0:1:1,0:1:1"]) == EXIT_INPUT


def test_engine_bugs_are_not_reported_as_input_errors(fixture_file, monkeypatch):
    def broken(*args, **kwargs):
        raise ValueError("engine bug")

    monkeypatch.setattr('decomposition_manager.decompose_family', broken)
    assert main(["decompose", "--input", str(fixture_file), "--grid=-1:1:1"]) == EXIT_FAIL


def test_engine_errors_exit_with_failure(fixture_file, monkeypatch):
    monkeypatch.setattr(config.engine, 'max_recursion_depth', 0)
    assert main(["roundtrip", "--input", str(fixture_file), "--grid=-1:1:1"]) == EXIT_FAIL


def test_default_grid_meets_the_sample_minimum(fixture_file):
    manager = DecompositionManager(EnvSettings(slack_webhook_url=None))
    grid = manager.grid_for(RunConfig(command='decompose', input=fixture_file), 1)
    assert len(grid.points(1)) >= config.grid.min_points
