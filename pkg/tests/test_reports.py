from fractions import Fraction

import jsonschema
import numpy as np
import pytest

from gcompact.errors import NoIdentity
from gcompact.reports import FORMAT_VERSION, dumps, error_report, make_report, validate, verdict


def test_make_report_shape():
    rep = make_report("x", {"a": 1}, {"b": 2}, [verdict("one", True), verdict("two", False, [1, 2])])
    validate(rep)
    assert rep["formatVersion"] == FORMAT_VERSION and rep["passed"] is False
    assert rep["verdicts"][1]["witness"] == [1, 2]
    assert make_report("x", {}, {})["passed"] is True


def test_plain_values():
    text = dumps({"r": {"n": np.int64(3), "b": np.bool_(True), "s": {3, 1}, "q": Fraction(1, 3),
                        "a": np.arange(2)}})
    assert '"q": "1/3"' in text and '"n": 3' in text and text.endswith("\n")
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


def test_error_report():
    rep = error_report("group validate", {}, NoIdentity())
    validate(rep)
    assert rep["error"]["type"] == "NoIdentity" and not rep["passed"]


def test_schema_rejects_extra_fields():
    rep = make_report("x", {}, {})
    rep["elapsed"] = 1.0
    with pytest.raises(jsonschema.ValidationError):
        validate(rep)
    bad = make_report("x", {}, {})
    del bad["verdicts"]
    with pytest.raises(jsonschema.ValidationError):
        validate(bad)
