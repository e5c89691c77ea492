import json

import pytest

from fgderiv import FormalGroupLaw, HSDerivation
from fgderiv.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_fgl_build_golden(capsys):
    code, out, _ = run(capsys, "fgl", "honda:2:2", "build", "--deg", "8")
    assert code == 0
    assert out.strip() == "X + Y + X^2*Y^2 + O(deg 8)"


def test_fgl_height(capsys):
    code, out, _ = run(capsys, "fgl", "multiplicative", "height", "--deg", "8")
    assert code == 0
    assert out.strip() == "height 1"
    code, out, _ = run(capsys, "fgl", "additive", "height", "--deg", "8")
    assert code == 0
    assert out.strip() == "height infinite at precision 8"


def test_fgl_check_and_inverse(capsys):
    code, out, _ = run(capsys, "fgl", "honda:2:2", "check", "--deg", "8")
    assert code == 0 and "PASS" in out
    code, out, _ = run(capsys, "fgl", "multiplicative", "inverse", "--deg", "4")
    assert code == 0
    assert out.strip() == "X + X^2 + X^3 + O(deg 4)"  # -X+X^2-X^3 over F_2


def test_fgl_truncate(capsys):
    code, out, _ = run(capsys, "fgl", "honda:2:2", "truncate", "2", "--deg", "8")
    assert code == 0
    assert out.strip() == "v + w + v^2*w^2"


def test_fgl_truncate_insufficient_precision_exit_code(capsys):
    code, _, err = run(capsys, "fgl", "honda:2:2", "truncate", "2", "--deg", "4")
    assert code == 3
    assert "precision" in err.lower()


def test_fgl_coeff(capsys):
    code, out, _ = run(capsys, "fgl", "honda:2:2", "coeff", "4", "--deg", "17", "--probe-deg", "24")
    assert code == 0
    assert "X^12 + X^6" in out and "stabilized: True" in out
    # non-stabilized probe is a meaningful FAIL
    code, out, _ = run(capsys, "fgl", "honda:2:2", "coeff", "4", "--deg", "8", "--probe-deg", "17")
    assert code == 1
    assert "stabilized: False" in out


def test_fgl_bad_descriptor_exit_2(capsys):
    code, _, err = run(capsys, "fgl", "honda:2:0", "build")
    assert code == 2
    assert "height" in err


def test_deriv_canonical_table(capsys):
    code, out, _ = run(capsys, "deriv", "honda:2:2", "canonical", "--orders", "8")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "d_0(t) = t"
    assert lines[4] == "d_4(t) = t^12 + t^6"
    assert lines[6] == "d_6(t) = t^4"


def test_deriv_canonical_deterministic(capsys):
    _, out1, _ = run(capsys, "deriv", "honda:2:2", "canonical", "--orders", "8", "--json")
    _, out2, _ = run(capsys, "deriv", "honda:2:2", "canonical", "--orders", "8", "--json")
    assert out1 == out2


def test_deriv_check_p1_golden(capsys):
    code, out, _ = run(capsys, "deriv", "honda:2:2", "check-p1", "--orders", "8")
    assert code == 1
    assert out.strip() == "FAIL at n=4; offending: t^10, t^4, t"
    code, out, _ = run(capsys, "deriv", "additive", "check-p1", "--orders", "8")
    assert code == 0 and "PASS" in out


def test_deriv_check_iterative(capsys):
    code, out, _ = run(capsys, "deriv", "additive", "check-iterative", "--orders", "8")
    assert code == 0 and out.startswith("PASS")
    code, out, _ = run(capsys, "deriv", "honda:2:2", "check-iterative", "3", "--orders", "8")
    assert code == 0 and "truncated" in out
    code, _, err = run(capsys, "deriv", "honda:2:2", "check-iterative", "3", "--orders", "4")
    assert code == 2  # orders must equal p^m


def test_deriv_apply(capsys):
    code, out, _ = run(capsys, "deriv", "honda:2:2", "apply", "t^-1", "4", "--orders", "8")
    assert code == 0
    assert out.strip() == "d_4(t^-1) = t^10 + t^4 + t + t^-2 + t^-5"


def test_deriv_inverse_image(capsys):
    code, out, _ = run(capsys, "deriv", "multiplicative", "inverse-image", "--orders", "4")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "d_0(1/t) = t^-1"
    assert lines[1] == "d_1(1/t) = t^-1 + t^-2"


def test_deriv_window_flag(capsys):
    code, _, err = run(
        capsys, "deriv", "honda:2:2", "canonical", "--orders", "8", "--window", "-9:8"
    )
    assert code == 3
    assert "window" in err
    code, out, _ = run(
        capsys, "deriv", "honda:2:2", "canonical", "--orders", "8", "--window", "-9:32"
    )
    assert code == 0


def test_deriv_bad_window_flag(capsys):
    code, _, err = run(capsys, "deriv", "additive", "canonical", "--window", "junk")
    assert code == 2


def test_json_reports_and_round_trips(capsys):
    code, out, _ = run(capsys, "fgl", "honda:2:2", "build", "--deg", "8", "--json")
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "fgl"
    law_obj = report["result"]
    text = json.dumps(law_obj)
    law = FormalGroupLaw.from_json(text)
    assert law.to_json() == text  # byte-identical round trip

    code, out, _ = run(capsys, "deriv", "honda:2:2", "canonical", "--orders", "8", "--json")
    table_obj = json.loads(out)["result"]
    text = json.dumps(table_obj)
    deriv = HSDerivation.from_json(text)
    assert deriv.to_json() == text


def test_repro_commands(capsys):
    for name in ("example-3.6", "example-4.5", "theorem-3.1", "heights"):
        code, out, _ = run(capsys, "repro", name)
        assert code == 0, name
        assert out.strip().endswith("PASS"), name


def test_repro_json(capsys):
    code, out, _ = run(capsys, "repro", "example-4.5", "--json")
    assert code == 0
    report = json.loads(out)
    assert report["pass"] is True


def test_unknown_repro_name_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["repro", "example-9.9"])
    assert exc.value.code == 2
