import json
import math

import numpy as np
import pytest

from weightseq.definitions import (InputError, SequenceDefinition, builtin_series, claim_from_dict,
                                   function_from_dict, sector_from_dict, series_from_dict)
from weightseq.report import analyze, dumps


class TestSequenceDefinition:
    def test_round_trip(self):
        d = SequenceDefinition.from_dict({"kind": "log_gevrey", "params": {"alpha": 1, "beta": 0.5}})
        assert SequenceDefinition.from_dict(d.to_dict()) == d
        assert d.truncation == 10**4

    def test_custom(self):
        q = [math.log(n + 1) for n in range(20)]
        M = SequenceDefinition.from_dict({"kind": "custom", "custom_log_quotients": q, "truncation": 16}).build()
        assert M.log_m(np.arange(20)) == pytest.approx(q, abs=0)

    @pytest.mark.parametrize("doc,where", [
        ([], "definition"),
        ({}, "definition.kind"),
        ({"kind": 3}, "definition.kind"),
        ({"kind": "gevrey", "truncation": 15}, "definition.truncation"),
        ({"kind": "gevrey", "truncation": 2.5}, "definition.truncation"),
        ({"kind": "gevrey", "params": {"alpha": True}}, "definition.params.alpha"),
        ({"kind": "gevrey", "params": {"alpha": math.inf}}, "definition.params.alpha"),
        ({"kind": "custom", "custom_log_quotients": [1.0] * 15}, "definition.custom_log_quotients"),
        ({"kind": "custom", "custom_log_quotients": "abc"}, "definition.custom_log_quotients"),
    ])
    def test_field_paths(self, doc, where):
        with pytest.raises(InputError) as exc:
            SequenceDefinition.from_dict(doc)
        assert exc.value.where == where


class TestSeries:
    @pytest.mark.parametrize("name", ["factorial", "inverse_factorial", "ones", "alternating", "factorial_squared"])
    def test_builtins_are_exact(self, name):
        s = builtin_series(name, 15)
        p = np.arange(15)
        expected = {"factorial": [math.factorial(n) for n in p], "ones": [1] * 15,
                    "inverse_factorial": [1 / math.factorial(n) for n in p],
                    "alternating": [(-1) ** n for n in p], "factorial_squared": [math.factorial(n) ** 2 for n in p]}
        assert s.coeffs.real.tolist() == [float(x) for x in expected[name]]

    def test_huge_builtin_uses_log_records(self):
        s = builtin_series("factorial_squared", 300)
        assert s.encoding == "log"

    def test_records(self):
        s = series_from_dict({"encoding": "linear", "coefficients": [[1, 0], [0, 2]]})
        assert s.coeffs.tolist() == [1, 2j]
        with pytest.raises(InputError):
            series_from_dict({"encoding": "linear"})
        with pytest.raises(InputError):
            series_from_dict({"builtin": "nope", "terms": 3})


class TestClaim:
    BASE = {"function": {"builtin": "inverse_one_plus"}, "series": {"builtin": "alternating", "terms": 8},
            "weights": {"kind": "custom", "custom_log_quotients": [0.0] * 16},
            "sector": {"opening": 0.5, "radius": 1.0}, "constants": {"C": 4, "A": 1}}

    def test_parse(self):
        c = claim_from_dict(self.BASE)
        assert c.C == 4.0 and c.A == 1.0 and c.sector.radius == 1.0 and not c.fit

    def test_fit_needs_no_constants(self):
        doc = {k: v for k, v in self.BASE.items() if k != "constants"}
        assert claim_from_dict({**doc, "fit": True}).C is None
        with pytest.raises(InputError):
            claim_from_dict(doc)

    @pytest.mark.parametrize("patch,where", [
        ({"sector": {"opening": -1}}, "claim.sector"),
        ({"sector": {"opening": 0.5, "radius": -1}}, "claim.sector"),
        ({"constants": {"C": 0, "A": 1}}, "claim.constants.C"),
        ({"function": {"builtin": "sinc"}}, "claim.function.builtin"),
        ({"function": {"builtin": "inverse_one_plus", "params": {"opening": 3}}}, "claim.function.params"),
        ({"function": {}}, "claim.function"),
        ({"grid": {"density": 3}}, "claim.grid"),
    ])
    def test_errors(self, patch, where):
        with pytest.raises(InputError) as exc:
            claim_from_dict({**self.BASE, **patch})
        assert exc.value.where == where

    def test_table_rejects_points_off_table(self):
        f = function_from_dict({"table": {"modulus": [0.1], "argument": [0.0], "re": [1.0], "im": [0.0],
                                          "domain": {"opening": 0.5}}})
        assert f(np.array([0.1]), np.array([0.0]))[0] == 1.0
        with pytest.raises(ValueError):
            f(np.array([0.2]), np.array([0.0]))

    def test_unbounded_sector(self):
        assert math.isinf(sector_from_dict({"opening": 1.0}).radius)


class TestReport:
    def test_embedded_precondition_failure(self):
        # too short for (beta_2)'s window; that section records the error, the rest still run
        d = SequenceDefinition("gevrey", {"alpha": 1.0}, None, 16)
        rep, complete = analyze(d)
        assert not complete
        assert rep["conditions"]["results"]["beta2"]["error"] == "ValueError"
        assert rep["conditions"]["results"]["lc"]["verdict"] == "Holds"

    def test_dumps_is_canonical(self):
        rep, _ = analyze(SequenceDefinition("gevrey", {"alpha": 1.0}, None, 2000))
        text = dumps(rep)
        assert text.endswith("\n") and json.loads(text) == rep
        assert dumps(json.loads(text)) == text
        assert "NaN" not in text and "Infinity" not in text

    def test_unknown_profile(self):
        with pytest.raises(KeyError):
            analyze(SequenceDefinition("gevrey", {"alpha": 1.0}, None, 2000), "lenient")
