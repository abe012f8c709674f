"""
命令行单元测试
"""
import io
import json
import pytest
import sys
from pathlib import Path

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from cli.main import EXIT_BUDGET, EXIT_INPUT_ERROR, EXIT_OK, run
from qstate.hermitian import Dims
from qstate.states import bell_state, density_from_payload, density_to_payload, maximally_mixed, werner


def _write_state(tmp_path: Path, name: str, rho) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(density_to_payload(rho)), encoding="utf-8")
    return str(path)


def _run(argv, capsys):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestGenerate:
    """测试 generate 子命令"""

    @pytest.mark.parametrize("argv", [
        ["--family", "werner", "--p", "0.5"],
        ["--family", "isotropic", "--d", "3", "--p", "0.8"],
        ["--family", "bell", "--which", "psi-"],
        ["--family", "maximally-mixed", "--M", "2", "--N", "3"],
        ["--family", "random", "--M", "3", "--N", "2", "--seed", "4"],
        ["--family", "random-separable", "--r", "3"],
    ])
    def test_families(self, argv, capsys):
        """生成的 JSON 可以被读回"""
        code, payload = _run(["generate"] + argv, capsys)
        assert code == EXIT_OK
        rho = density_from_payload(payload)
        assert rho.dims.d == len(payload["matrix"])

    def test_deterministic(self, capsys):
        """相同种子输出逐字节相同"""
        run(["generate", "--family", "random", "--seed", "9"])
        first = capsys.readouterr().out
        run(["generate", "--family", "random", "--seed", "9"])
        assert capsys.readouterr().out == first

    def test_invalid_p(self, capsys):
        """p 越界为输入错误"""
        code, payload = _run(["generate", "--family", "werner", "--p", "2"], capsys)
        assert code == EXIT_INPUT_ERROR
        assert "error" in payload


class TestSolveAndPpt:
    """测试 solve / ppt / witness-check"""

    def test_solve_bell(self, tmp_path, capsys):
        """Bell 态：ENTANGLED 并附见证"""
        path = _write_state(tmp_path, "bell.json", bell_state("phi+"))
        code, result = _run(["solve", "--input", path, "--delta", "0.01"], capsys)
        assert code == EXIT_OK
        assert result["verdict"] == "ENTANGLED"
        assert result["witness"]["certified"] is True
        assert len(result["witness"]["coefficients"]) == 16
        assert result["oracle_calls"] >= 1

    def test_ppt_maximally_mixed(self, tmp_path, capsys):
        """最大混态：PPT_POSITIVE，最小特征值 0.25"""
        path = _write_state(tmp_path, "mm.json", maximally_mixed(Dims(2, 2)))
        code, result = _run(["ppt", "--input", path], capsys)
        assert code == EXIT_OK
        assert result["verdict"] == "PPT_POSITIVE"
        assert result["min_eigenvalue"] == pytest.approx(0.25)

    def test_witness_check_roundtrip(self, tmp_path, capsys):
        """solve 输出的见证可直接校验"""
        state = _write_state(tmp_path, "bell.json", bell_state("phi+"))
        verdict_path = tmp_path / "verdict.json"
        code = run(["solve", "--input", state, "--output", str(verdict_path), "--no-trace"])
        capsys.readouterr()
        assert code == EXIT_OK
        assert "trace" not in json.loads(verdict_path.read_text(encoding="utf-8"))

        code, check = _run(["witness-check", "--input", state, "--witness", str(verdict_path)], capsys)
        assert code == EXIT_OK
        assert check["validity"] == "valid_certified"

    def test_budget_exhausted(self, tmp_path, capsys):
        """oracle 调用上限：退出码 3，输出部分运行记录"""
        path = _write_state(tmp_path, "w.json", werner(0.2))
        code, result = _run(["solve", "--input", path, "--max-oracle-calls", "1"], capsys)
        assert code == EXIT_BUDGET
        assert result["type"] == "BudgetExhaustedError"
        assert result["partial"]["termination"] == "budget_exhausted"

    def test_config_file(self, tmp_path, capsys):
        """配置文件中的字段生效，命令行覆盖优先"""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"max_oracle_calls": 1, "oracle": {"backend": "seesaw"}}), encoding="utf-8")
        path = _write_state(tmp_path, "w.json", werner(0.2))
        code, _ = _run(["solve", "--input", path, "--config", str(config)], capsys)
        assert code == EXIT_BUDGET
        # Bell 态在网格后端下第一次调用即得到认证见证
        bell = _write_state(tmp_path, "bell.json", bell_state("phi+"))
        code, result = _run(["solve", "--input", bell, "--config", str(config), "--oracle", "grid"], capsys)
        assert code == EXIT_OK
        assert result["oracle_calls"] == 1


class TestInputErrors:
    """测试输入错误的退出码"""

    def test_malformed_json(self, tmp_path, capsys):
        """JSON 格式错误"""
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        code, result = _run(["solve", "--input", str(path)], capsys)
        assert code == EXIT_INPUT_ERROR
        assert "JSON" in result["error"]

    def test_missing_file(self, capsys):
        """输入文件不存在"""
        code, result = _run(["ppt", "--input", "/nonexistent/state.json"], capsys)
        assert code == EXIT_INPUT_ERROR
        assert result["type"] == "ValidationError"

    def test_not_density_matrix(self, tmp_path, capsys):
        """非半正定矩阵"""
        payload = density_to_payload(maximally_mixed(Dims(2, 2)))
        payload["matrix"][0][0] = [-0.25, 0.0]
        payload["matrix"][1][1] = [0.75, 0.0]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        code, result = _run(["ppt", "--input", str(path)], capsys)
        assert code == EXIT_INPUT_ERROR
        assert result["type"] == "StateValidationError"

    def test_bad_delta(self, tmp_path, capsys):
        """δ 越界"""
        path = _write_state(tmp_path, "bell.json", bell_state())
        code, _ = _run(["solve", "--input", path, "--delta", "1.5"], capsys)
        assert code == EXIT_INPUT_ERROR

    def test_unknown_subcommand(self, capsys):
        """未知子命令"""
        assert run(["oracle"]) == EXIT_INPUT_ERROR


class TestPartialAndNearest:
    """测试 partial / nearest-sep"""

    def test_partial_from_state(self, tmp_path, capsys):
        """由已知态生成 {XX, YY, ZZ} 的期望值"""
        path = _write_state(tmp_path, "bell.json", bell_state("phi+"))
        code, result = _run(["partial", "--from-state", path, "--observables", "XX,YY,ZZ"], capsys)
        assert code == EXIT_OK
        assert result["verdict"] == "ENTANGLED"
        assert result["j"] == 4

    def test_partial_stdin(self, monkeypatch, capsys):
        """测量流从标准输入读取"""
        lines = "\n".join(json.dumps({"observable": "ZZ", "value": 1.0}) for _ in range(2))
        monkeypatch.setattr(sys, "stdin", io.StringIO(lines))
        code, result = _run(["partial"], capsys)
        assert code == EXIT_OK
        assert result["verdict"] == "INCONCLUSIVE"

    def test_partial_inconsistent(self, monkeypatch, capsys):
        """矛盾的测量值"""
        lines = "\n".join([
            json.dumps({"observable": "ZZ", "value": 1.0}),
            json.dumps({"observable": "ZZ", "value": -1.0}),
        ])
        monkeypatch.setattr(sys, "stdin", io.StringIO(lines))
        code, result = _run(["partial"], capsys)
        assert code == EXIT_INPUT_ERROR
        assert result["type"] == "InconsistentMeasurementError"

    def test_nearest_sep(self, tmp_path, capsys):
        """可分态的最近可分近似"""
        path = _write_state(tmp_path, "w.json", werner(0.1))
        code, result = _run(["nearest-sep", "--input", path, "--budget", "200"], capsys)
        assert code == EXIT_OK
        assert result["converged"] is True
        assert result["distance"] <= 0.01
        assert len(result["decomposition"]["terms"]) <= 16
        assert 0 <= result["lower_bound"] <= result["distance"]
        assert "dual_estimate" in result


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
