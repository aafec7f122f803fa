import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qframes import __version__
from qframes.algebra import SignatureBuilder
from qframes.report import ReportEnvelope, plain

json_leaves = st.one_of(st.none(), st.booleans(), st.integers(-10**6, 10**6),
                        st.floats(allow_nan=False, allow_infinity=False), st.text(max_size=8))
json_values = st.recursive(json_leaves, lambda inner: st.one_of(
    st.lists(inner, max_size=4), st.dictionaries(st.text(max_size=6), inner, max_size=4)),
    max_leaves=12)


def test_plain_conversions():
    sig = SignatureBuilder().pair("q", "p").build()
    out = plain({"z": 1 + 2j, "a": np.float64(0.5), "b": np.bool_(True), "n": np.int64(3),
                 "P": sig.parse("q*p"), "t": (1, 2), "inf": float("inf")})
    assert out == {"z": {"re": 1.0, "im": 2.0}, "a": 0.5, "b": True, "n": 3,
                   "P": "q*p", "t": [1, 2], "inf": "inf"}
    json.dumps(out)


@given(json_values, st.sampled_from(["ok", "verdict-failure", "warning"]))
def test_envelope_round_trip(results, status):
    env = ReportEnvelope("analyze", {"file": "x.qf"}, {"r": results}, status)
    text = env.to_json()
    back = ReportEnvelope.from_json(text)
    assert back == env
    assert back.to_json() == text


def test_envelope_fields():
    env = ReportEnvelope("identities")
    d = env.to_dict()
    assert set(d) == {"task", "inputs", "results", "status", "tool_version", "schema_version"}
    assert d["tool_version"] == __version__ and d["schema_version"] == 1
    with pytest.raises(ValueError):
        ReportEnvelope("x", status="maybe")
