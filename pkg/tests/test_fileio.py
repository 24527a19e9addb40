"""Round-trip and rejection tests for the on-disk formats."""

import json

import numpy as np
import pytest

from spinsum.errors import ConfigError, ValidationError
from spinsum.fileio import (
    fmt_real,
    load_campaign,
    load_instance,
    load_program,
    program_from_text,
    program_to_text,
    save_instance,
    save_program,
)
from spinsum.model import EsInstance, build_qubo, default_gamma, qubo_to_ising
from spinsum.quantize import quantize
from spinsum.synthetic import make_instance


def small_instance(sentences=None):
    return EsInstance(
        mu=np.array([0.9, 0.8, 0.1]),
        beta=np.array([[0.0, 0.2, 0.1], [0.2, 0.0, 0.3], [0.1, 0.3, 0.0]]),
        summary_len=2,
        name="trio",
        sentences=sentences,
    )


class TestFormat:
    def test_seventeen_digit_reals_round_trip(self):
        rng = np.random.default_rng(7)
        for x in rng.standard_normal(200):
            assert float(fmt_real(x)) == float(x)

    def test_fmt_real_compact_for_simple_values(self):
        assert fmt_real(1.0) == "1"
        assert fmt_real(0.5) == "0.5"


class TestInstanceFiles:
    def test_round_trip_preserves_everything(self, tmp_path):
        inst = small_instance(sentences=("a b.", "c d.", "e f."))
        path = tmp_path / "trio.json"
        save_instance(inst, path)
        back = load_instance(path)
        assert back.name == inst.name
        assert back.sentences == inst.sentences
        assert back.summary_len == inst.summary_len
        assert back.lam == inst.lam
        np.testing.assert_array_equal(back.mu, inst.mu)
        np.testing.assert_array_equal(back.beta, inst.beta)

    def test_round_trip_is_byte_identical(self, tmp_path):
        inst = make_instance(11, n=7, summary_len=3)
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        save_instance(inst, first)
        save_instance(load_instance(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_lambda_defaults_to_one(self, tmp_path):
        payload = {
            "schema_version": 1,
            "name": "x",
            "mu": [0.5, 0.5, 0.5],
            "beta": [[0, 0.1, 0], [0.1, 0, 0], [0, 0, 0]],
            "summary_length": 1,
        }
        path = tmp_path / "x.json"
        path.write_text(json.dumps(payload))
        inst = load_instance(path)
        assert inst.lam == 1.0
        assert inst.sentences is None

    def test_metadata_key_is_tolerated(self, tmp_path):
        payload = {
            "schema_version": 1,
            "name": "x",
            "mu": [0.5, 0.5],
            "beta": [[0, 0.1], [0.1, 0]],
            "summary_length": 1,
            "metadata": {"generator": "unit-test"},
        }
        path = tmp_path / "x.json"
        path.write_text(json.dumps(payload))
        assert load_instance(path).n == 2

    def test_rejections_name_the_violated_invariant(self, tmp_path):
        base = {
            "schema_version": 1,
            "name": "x",
            "mu": [0.5, 0.5],
            "beta": [[0, 0.1], [0.1, 0]],
            "summary_length": 1,
        }

        def rejects(mutate, needle):
            payload = json.loads(json.dumps(base))
            mutate(payload)
            path = tmp_path / "bad.json"
            path.write_text(json.dumps(payload))
            with pytest.raises(ValidationError, match=needle):
                load_instance(path)

        rejects(lambda p: p.update(schema_version=2), "schema_version")
        rejects(lambda p: p.pop("mu"), "missing required key 'mu'")
        rejects(lambda p: p.update(beta=[[0, 0.1], [0.2, 0]]), "beta\\[")
        rejects(lambda p: p.update(summary_length=2), "summary_len")
        rejects(lambda p: p.update(mu=[0.5, None]), "finite")
        rejects(lambda p: p.update(extra=1), "unknown keys")

    def test_non_json_is_a_named_error(self, tmp_path):
        path = tmp_path / "garbage.json"
        path.write_text("{not json")
        with pytest.raises(ValidationError, match="not valid JSON"):
            load_instance(path)


def quantized_program(seed=None, scheme="deterministic"):
    inst = make_instance(3, n=6, summary_len=2)
    form = qubo_to_ising(build_qubo(inst, default_gamma(inst)))
    return quantize(form, 14, scheme, seed=seed)


class TestProgramFiles:
    def test_round_trip_is_byte_identical(self, tmp_path):
        for prog in (quantized_program(), quantized_program(seed=9, scheme="stochastic")):
            first = tmp_path / "p1.prog"
            second = tmp_path / "p2.prog"
            save_program(prog, first)
            save_program(load_program(first), second)
            assert first.read_bytes() == second.read_bytes()

    def test_round_trip_preserves_program(self, tmp_path):
        prog = quantized_program(seed=4, scheme="half")
        path = tmp_path / "p.prog"
        save_program(prog, path)
        back = load_program(path)
        np.testing.assert_array_equal(back.h, prog.h)
        np.testing.assert_array_equal(back.j, prog.j)
        assert back.range_w == prog.range_w
        assert back.scale == prog.scale
        assert back.scheme == prog.scheme
        assert back.seed == prog.seed
        assert back.digest() == prog.digest()

    def test_header_records_dash_for_seedless(self):
        text = program_to_text(quantized_program())
        header = text.splitlines()[0].split()
        assert header[3] == "deterministic"
        assert header[4] == "-"

    def test_offset_is_not_stored(self, tmp_path):
        prog = quantized_program()
        assert prog.source_offset != 0.0  # the constraint penalty shifts it
        path = tmp_path / "p.prog"
        save_program(prog, path)
        assert load_program(path).source_offset == 0.0

    def test_known_small_program_layout(self):
        prog = quantize(
            qubo_to_ising(
                build_qubo(
                    EsInstance(
                        mu=np.array([1.0, 0.2, 0.4]),
                        beta=np.zeros((3, 3)),
                        summary_len=1,
                    ),
                    gamma=2.0,
                )
            ),
            7,
            "deterministic",
        )
        lines = program_to_text(prog).splitlines()
        assert lines[0].split()[:2] == ["3", "7"]
        assert len(lines) == 4  # header + h + two triangle rows
        assert len(lines[1].split()) == 3
        assert len(lines[2].split()) == 2
        assert len(lines[3].split()) == 1

    def test_bad_headers_and_rows_are_rejected(self):
        good = program_to_text(quantized_program())
        lines = good.splitlines()
        with pytest.raises(ValidationError, match="header"):
            program_from_text("1 2 3\n")
        with pytest.raises(ValidationError, match="empty"):
            program_from_text("")
        with pytest.raises(ValidationError, match="integers"):
            program_from_text("\n".join([lines[0], "1.5 " + lines[1][2:]] + lines[2:]) + "\n")
        truncated = "\n".join(lines[:-1]) + "\n"
        with pytest.raises(ValidationError, match="expected"):
            program_from_text(truncated)
        short_row = lines[:]
        short_row[2] = short_row[2].rsplit(" ", 1)[0]
        with pytest.raises(ValidationError, match="coupling row"):
            program_from_text("\n".join(short_row) + "\n")


class TestCampaigns:
    def write(self, tmp_path, payload):
        path = tmp_path / "campaign.json"
        path.write_text(json.dumps(payload))
        return path

    def base_payload(self):
        return {
            "seed": 5,
            "repeats": 2,
            "instances": {"synthetic": {"count": 2, "n": 8, "summary_len": 3}},
            "variants": [
                {"name": "v0", "backend": "exhaustive", "iterations": 1},
                {
                    "name": "v1",
                    "backend": "random",
                    "iterations": 4,
                    "scheme": "stochastic",
                },
            ],
        }

    def test_synthetic_campaign_loads(self, tmp_path):
        path = self.write(tmp_path, self.base_payload())
        instances, suite, bench, threads = load_campaign(path)
        assert [inst.n for inst in instances] == [8, 8]
        assert suite.seed == 5 and suite.repeats == 2
        assert [v.name for v in suite.variants] == ["v0", "v1"]
        assert bench.p_target == 0.95
        assert threads == 1

    def test_instance_paths_resolve_relative_to_config(self, tmp_path):
        inst = make_instance(2, n=5, summary_len=2)
        save_instance(inst, tmp_path / "one.json")
        payload = self.base_payload()
        payload["instances"] = {"paths": ["one.json"]}
        instances, _, _, _ = load_campaign(self.write(tmp_path, payload))
        assert len(instances) == 1 and instances[0].n == 5

    def test_overrides_flow_through(self, tmp_path):
        payload = self.base_payload()
        payload["bench"] = {"p_target": 0.9}
        payload["tabu"] = {"tenure": 4}
        payload["oscillator"] = {"steps": 100}
        payload["threads"] = 3
        payload["variants"].append(
            {
                "name": "windowed",
                "backend": "tabu",
                "iterations": 6,
                "decompose": [4, 2],
            }
        )
        _, suite, bench, threads = load_campaign(self.write(tmp_path, payload))
        assert bench.p_target == 0.9
        assert suite.tabu.tenure == 4
        assert suite.oscillator.steps == 100
        assert threads == 3
        assert suite.variants[-1].decompose == (4, 2)

    def test_bad_campaigns_raise_config_errors(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_campaign(tmp_path / "missing.json")

        payload = self.base_payload()
        payload["typo"] = 1
        with pytest.raises(ConfigError, match="unknown keys"):
            load_campaign(self.write(tmp_path, payload))

        payload = self.base_payload()
        payload["variants"] = []
        with pytest.raises(ConfigError, match="nonempty"):
            load_campaign(self.write(tmp_path, payload))

        payload = self.base_payload()
        payload["variants"][0]["mystery"] = True
        with pytest.raises(ConfigError, match="bad variant entry"):
            load_campaign(self.write(tmp_path, payload))

        payload = self.base_payload()
        payload["instances"] = {}
        with pytest.raises(ConfigError, match="paths.*synthetic|synthetic|paths"):
            load_campaign(self.write(tmp_path, payload))

        payload = self.base_payload()
        payload["tabu"] = {"nonsense": 2}
        with pytest.raises(ConfigError, match="tabu"):
            load_campaign(self.write(tmp_path, payload))
