from fractions import Fraction as F

import pytest

from avalanches.combinatorics import tree_census
from avalanches.distributions import AvalancheParams, LimitParams, avalanche_pmf, limit_pmf
from avalanches.errors import DomainError
from avalanches.sampling import SimResult
from avalanches.serialize import (
    census_to_csv,
    census_to_json_dict,
    decimal_str,
    dump_json,
    gof_to_json_dict,
    parse_rational,
    pmf_from_json_dict,
    pmf_to_csv,
    pmf_to_json_dict,
    rational_str,
    simresult_from_json_dict,
    simresult_to_csv,
    simresult_to_json_dict,
)
from avalanches.stats import GofReport


class TestRational:
    def test_roundtrip(self):
        for f in (F(9, 16), F(1), F(0), F(-3, 7)):
            assert parse_rational(rational_str(f)) == f

    def test_bare_integer(self):
        assert parse_rational("7") == F(7)

    def test_rejects_decimals(self):
        with pytest.raises(DomainError):
            parse_rational("0.25")

    def test_rejects_zero_denominator(self):
        with pytest.raises(DomainError):
            parse_rational("1/0")

    def test_rejects_garbage(self):
        with pytest.raises(DomainError):
            parse_rational("1/4/2")


class TestDecimalStr:
    def test_precision(self):
        assert decimal_str(F(1, 3), 5) == "0.33333"
        assert decimal_str(F(2, 1), 3) == "2"

    def test_default_precision_is_17_digits(self):
        assert decimal_str(F(1, 7)).startswith("0.142857142857142")

    def test_float_roundtrips(self):
        assert decimal_str(0.1) == repr(0.1)

    def test_precision_must_be_positive(self):
        with pytest.raises(DomainError):
            decimal_str(F(1, 3), 0)


class TestPmfSerialization:
    def test_exact_roundtrip(self):
        pmf = avalanche_pmf(AvalancheParams(3, F(1, 5)))
        d = pmf_to_json_dict(pmf)
        assert d["exact"] is True
        assert d["probs"][0] == rational_str(pmf.probs[0])
        assert pmf_from_json_dict(d) == pmf

    def test_floating_roundtrip_keeps_deficit(self):
        pmf = limit_pmf(LimitParams(0.5, 50))
        d = pmf_to_json_dict(pmf)
        assert "deficit" in d
        back = pmf_from_json_dict(d)
        assert back.probs == pmf.probs
        assert back.deficit == pmf.deficit

    def test_csv_shape(self):
        text = pmf_to_csv(avalanche_pmf(AvalancheParams(2, F(1, 4))), sig_digits=4)
        assert text == "a,prob\n0,0.5625\n1,0.25\n2,0.1875\n"
        assert "\r" not in text


class TestSimResultSerialization:
    def test_roundtrip_with_params(self):
        res = SimResult(
            histogram={0: 5, 2: 3},
            trials=8,
            seed=42,
            shards=2,
            model="tower",
            params={"coords": [[8, 1, 4], [8, 1, 4]]},
        )
        d = simresult_to_json_dict(res)
        assert d["coords"] == [[8, 1, 4], [8, 1, 4]]
        assert d["histogram"] == {"0": 5, "2": 3}
        assert simresult_from_json_dict(d) == res

    def test_csv(self):
        res = SimResult(histogram={1: 2, 0: 6}, trials=8, seed=0, shards=1, model="urn")
        assert simresult_to_csv(res) == "a,count\n0,6\n1,2\n"


class TestCensusSerialization:
    def test_json_matches_schema(self):
        d = census_to_json_dict(tree_census(3))
        assert d["n"] == 3
        assert d["total"] == "16"
        assert d["profiles"][0] == {"parts": [3], "count": "1"}
        # profiles ordered by part count then lexicographically
        assert [p["parts"] for p in d["profiles"]] == [[3], [1, 2], [2, 1], [1, 1, 1]]

    def test_csv(self):
        text = census_to_csv(tree_census(2))
        assert text == "parts,count\n2,1\n1 1,2\n"


class TestGofSerialization:
    def test_keys(self):
        report = GofReport(
            tv_distance=0.01, chi_square=2.5, dof=3, approx_p_value=0.47, trials=1000
        )
        assert gof_to_json_dict(report) == {
            "tv": 0.01,
            "chi2": 2.5,
            "dof": 3,
            "p": 0.47,
            "trials": 1000,
        }


class TestDumpJson:
    def test_deterministic_and_newline_terminated(self):
        a = dump_json({"b": 1, "a": [1, 2]})
        b = dump_json({"a": [1, 2], "b": 1})
        assert a == b
        assert a.endswith("\n")
