import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockquant.cli import (
    PROPAGATE_COLUMNS,
    ExperimentConfig,
    Report,
    SymbolSpec,
    emit_report,
    format_symbol,
    load_report,
    main,
    parse_symbol_spec,
    run_experiment,
)
from fockquant.errors import ConfigError, DimensionError, SymbolSyntaxError
from fockquant.symbols import PolySymbol

ZZ = PolySymbol.monomial((1,), (1,))


def poly_symbols(d=2):
    exps = st.tuples(*[st.integers(0, 3)] * d)
    real = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
    coeff = st.one_of(real, st.builds(complex, real, real))
    return st.dictionaries(st.tuples(exps, exps), coeff, max_size=5).map(lambda t: PolySymbol(d, t))


class TestParser:
    @pytest.mark.parametrize(
        "text,want",
        [
            ("zs1 z1", ZZ),
            ("zs1*z1", ZZ),
            ("zs1^2 z1^2 - 2 zs1 z1 + 0.5", ZZ * ZZ - 2 * ZZ + 0.5),
            ("-z1 - zs1", -1 * (PolySymbol.z(0, 1) + PolySymbol.zs(0, 1))),
            ("(0,1.5) z1", 1.5j * PolySymbol.z(0, 1)),
            ("3", PolySymbol.constant(3, 1)),
            ("1e-3 zs1 z1", 1e-3 * ZZ),
        ],
    )
    def test_examples(self, text, want):
        assert parse_symbol_spec(text, 1) == want

    def test_modes_inferred(self):
        p = parse_symbol_spec("zs1 z2 + zs2 z1")
        assert p.d == 2 and p.is_real()

    def test_explicit_modes_pad(self):
        assert parse_symbol_spec("zs1 z1", 3).d == 3

    def test_like_terms_collect(self):
        assert parse_symbol_spec("zs1 z1 + z1 zs1", 1) == 2 * ZZ

    @pytest.mark.parametrize(
        "text,pos",
        [("zs1 z1 +", 8), ("zs1 $ z1", 4), ("z0", 1), ("zs1^x", 4), ("", 0), ("(1,2", 4)],
    )
    def test_syntax_errors(self, text, pos):
        with pytest.raises(SymbolSyntaxError) as info:
            parse_symbol_spec(text, 1)
        assert info.value.position == pos
        assert info.value.code == "E_SYNTAX"

    def test_mode_out_of_range(self):
        with pytest.raises(DimensionError):
            parse_symbol_spec("zs1 z3", 2)

    @given(poly_symbols())
    def test_round_trip(self, p):
        text = format_symbol(p)
        assert parse_symbol_spec(text, p.d) == p
        assert format_symbol(parse_symbol_spec(text, p.d)) == text

    def test_format_examples(self):
        assert format_symbol(ZZ - 0.5) == "-0.5 + zs1 z1"
        assert format_symbol(PolySymbol(1)) == "0"

    def test_spec_realness(self):
        assert SymbolSpec.from_text("zs1 z1").is_real
        assert not SymbolSpec.from_text("zs1 z2", 2).is_real


class TestRun:
    def test_identity_check(self):
        rep = run_experiment(ExperimentConfig("identity-check", M=8))
        assert rep.summary["residual"] <= 1e-12 and rep.summary["quad_nodes"] == 9

    def test_quantize_number_operator(self):
        rep = run_experiment(ExperimentConfig("quantize", M=4, symbol="zs1 z1"))
        assert np.allclose(np.diag(rep.summary["normal_re"]), range(5))
        assert np.allclose(np.diag(rep.summary["antinormal_re"]), range(1, 6))

    def test_symbols(self):
        rep = run_experiment(ExperimentConfig("symbols", symbol="zs1^2 z1^2"))
        assert rep.summary["antinormal_of_normal"] == "2.0 - 4.0 zs1 z1 + zs1^2 z1^2"
        assert rep.summary["normal_of_antinormal"] == "2.0 + 4.0 zs1 z1 + zs1^2 z1^2"

    def test_bosonize(self):
        rep = run_experiment(ExperimentConfig("bosonize", d=3, M=3))
        s = rep.summary
        assert s["isometry_residual"] == 0 and s["inverse_residual"] == 0
        assert s["grade_dims"] == [1, 3, 3, 1]
        assert s["car_residuals"]["jordan_wigner"] == 0

    def test_propagate_monotone(self):
        cfg = ExperimentConfig("propagate", M=10, symbol="zs1 z1 + 0.3 z1 + 0.3 zs1", N_list=[4, 8, 16], z0=[0.5], z1=[0.4j])
        rep = run_experiment(cfg)
        assert rep.columns == PROPAGATE_COLUMNS
        assert [r["N"] for r in rep.rows] == [4, 8, 16]
        assert rep.summary["monotone"] == {"1": True}

    def test_validation(self):
        with pytest.raises(ConfigError):
            run_experiment(ExperimentConfig("propagate", d=2, z0=[0.1]))
        with pytest.raises(ConfigError):
            run_experiment(ExperimentConfig("teleport"))
        with pytest.raises(ConfigError):
            run_experiment(ExperimentConfig("propagate", n_list=[2]))


class TestReports:
    def test_csv_header_only(self):
        text = emit_report(Report("propagate", {}, PROPAGATE_COLUMNS, []), "csv")
        assert text == ",".join(PROPAGATE_COLUMNS) + "\n"

    def test_csv_single_cell(self):
        cfg = ExperimentConfig("propagate", M=6, N_list=[4], format="csv")
        text = emit_report(run_experiment(cfg), "csv")
        lines = text.splitlines()
        assert len(lines) == 2
        row = next(csv.DictReader(io.StringIO(text)))
        assert float(row["amp_re"]) == pytest.approx(np.cos(1.0), abs=0.1)

    def test_json_round_trip(self, tmp_path):
        rep = run_experiment(ExperimentConfig("identity-check", M=3))
        path = tmp_path / "r.json"
        emit_report(rep, "json", str(path))
        assert load_report(str(path)) == rep

    def test_config_serializes_complex(self):
        cfg = ExperimentConfig("propagate", z0=[1 + 2j], z1=[0j]).validate()
        assert json.loads(json.dumps(cfg.to_json()))["z0"] == [[1.0, 2.0]]
        back = ExperimentConfig.from_mapping(cfg.to_json())
        assert back.z0 == [1 + 2j]

    def test_unknown_format(self):
        with pytest.raises(ConfigError):
            emit_report(Report("x", {}, [], []), "xml")


class TestMain:
    def test_config_file_with_override(self, tmp_path, capsys):
        conf = tmp_path / "c.json"
        conf.write_text(json.dumps({"command": "identity-check", "M": 2, "format": "csv"}))
        assert main(["--config", str(conf), "--cutoff", "4"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "d,M,quad_nodes,residual"
        assert out[1].startswith("1,4,5,")

    def test_writes_output_file(self, tmp_path, capsys):
        path = tmp_path / "out.json"
        assert main(["--command", "symbols", "--symbol", "zs1 z1", "--output", str(path)]) == 0
        assert capsys.readouterr().out == ""
        assert load_report(str(path)).summary["symbol"] == "zs1 z1"

    @pytest.mark.parametrize(
        "argv,code,prefix",
        [
            (["--command", "symbols", "--symbol", "zs1 +"], 2, "E_SYNTAX"),
            (["--command", "propagate", "--symbol", "(0,1) zs1 z1"], 2, "E_NONREAL"),
            (["--command", "quantize", "--symbol", "z2", "--modes", "1"], 2, "E_DIMENSION"),
            (["--command", "bogus"], 2, "E_CONFIG"),
            (["--nonsense"], 2, "E_CONFIG"),
            (["--command", "identity-check", "--output", "/nonexistent/dir/x.json"], 3, "E_IO"),
        ],
    )
    def test_errors(self, argv, code, prefix, capsys):
        assert main(argv) == code
        err = capsys.readouterr().err
        assert err.startswith(prefix + ": ")
        assert err.count("\n") == 1
