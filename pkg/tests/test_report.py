import json
import math

import numpy as np
import pytest

from qdpi import report as rp
from qdpi.channels import random_channel
from qdpi.errors import InvalidChannel
from qdpi.jsonio import channel_from_json, channel_to_json, state_from_json
from qdpi.linalg import matrix_to_json
from qdpi.errors import InvalidState


class TestCanonicalJson:
    def test_seventeen_digits(self):
        assert rp.canonical_json(0.1) == "0.10000000000000001"
        assert float(rp.canonical_json(1 / 3)) == 1 / 3

    def test_non_finite(self):
        assert rp.canonical_json(math.inf) == '"inf"'

    def test_parses_back(self, rng):
        obj = {"b": [1.5, 2], "a": {"x": None, "y": True}, "m": matrix_to_json(rng.normal(size=(2, 2)))}
        assert json.loads(rp.canonical_json(obj))["b"] == [1.5, 2]

    def test_key_order_is_insertion(self):
        text = rp.canonical_json({"z": 1, "a": 2})
        assert text.index('"z"') < text.index('"a"')


class TestReport:
    def _report(self):
        return rp.VerificationReport("demo", 10, 0, 0.0, 7, {"tol": 1e-8, "max_x": math.log(2), "b": 1},
                                     None, ("max_violation", "max_x"))

    def test_fields_and_order(self):
        d = json.loads(self._report().to_json())
        assert list(d) == ["check", "trials", "violations", "max_violation", "seed", "config", "pass",
                           "worst_witness"]
        assert list(d["config"]) == sorted(d["config"])
        assert d["pass"] is True

    def test_bits(self):
        r = self._report().in_units("bits")
        assert r.config["max_x"] == pytest.approx(1.0)
        assert r.config["tol"] == 1e-8
        assert r.config["units"] == "bits"
        assert r.passed == self._report().passed

    def test_slack_tally(self):
        t = rp.SlackTally(1e-9)
        t.add(0, 0.5)
        t.add(1, -1e-10)
        t.add(2, -0.25, witness=lambda: {"w": 1})
        r = t.report("x", 0, {})
        assert (r.trials, r.violations, r.max_violation) == (3, 1, 0.25)
        assert r.worst_witness == {"trial": 2, "w": 1}

    def test_trial_rng_independent_of_order(self):
        a = [rp.trial_rng(5, i).normal() for i in range(4)]
        b = [rp.trial_rng(5, i).normal() for i in reversed(range(4))][::-1]
        assert a == b


class TestChannelJson:
    def test_roundtrip(self, rng):
        ch = random_channel(2, 3, 2, rng)
        back = channel_from_json(json.loads(json.dumps(channel_to_json(ch))))
        for x, y in zip(ch.kraus_ops, back.kraus_ops):
            np.testing.assert_array_equal(x, y)

    def test_reports_tp_defect(self):
        bad = {"dim_in": 1, "dim_out": 1, "kraus": [matrix_to_json(np.array([[0.5]]))]}
        with pytest.raises(InvalidChannel, match="defect"):
            channel_from_json(bad)

    def test_shape_mismatch(self):
        bad = {"dim_in": 2, "dim_out": 2, "kraus": [matrix_to_json(np.eye(3))]}
        with pytest.raises(InvalidChannel):
            channel_from_json(bad)

    def test_state(self):
        assert state_from_json(matrix_to_json(np.eye(2) / 2)).dim == 2
        with pytest.raises(InvalidState):
            state_from_json(matrix_to_json(np.eye(2)))
