"""Command-line interface: outputs, determinism, exit codes."""

import numpy as np
import pytest

import opuc_entropy as oe
from opuc_entropy.cli import main


def run(args):
    return main(args)


class TestLemma:
    def test_canonical_table(self, tmp_path):
        out = tmp_path / "run"
        assert run(["lemma", "--L", "0.25", "--C", "10", "--kmax", "4",
                    "--out", str(out), "--plot-data"]) == 0
        bp = (out / "breakpoints.csv").read_text().splitlines()
        assert bp[0] == "k,N_k,gap,gap_ratio"
        assert len(bp) == 5
        assert bp[1].startswith("1,640,")
        gp = (out / "gamma_psi.csv").read_text().splitlines()
        assert len(gp) == 5
        assert all(line.endswith(",1") for line in gp[1:])  # sandwich_ok
        assert (out / "gamma_vs_sqrtN.dat").exists()

    def test_scale_rejected(self, tmp_path):
        assert run(["lemma", "--L", "0.5", "--out", str(tmp_path)]) == 1

    def test_cap_guard(self, tmp_path):
        assert run(["lemma", "--C", "20", "--kmax", "40", "--out", str(tmp_path)]) == 2


class TestConstruct:
    def test_two_stage_outputs_and_determinism(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["construct", "--K", "2", "--L", "0.25,0.25", "--delta", "0.1,0.05"]
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        for name in ("growth.csv", "state.txt", "entropy_matrix.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()
        growth = (a / "growth.csv").read_text().splitlines()
        assert growth[0].startswith("k,M_k,L_k,kappa_k,log_phi_at_one,entropy_hat_log,entropy_over_sqrtM")
        assert len(growth) == 3
        state = oe.load_state(a / "state.txt")
        assert state.stage_count == 2

    def test_k_mismatch_rejected(self, tmp_path):
        assert run(["construct", "--K", "3", "--L", "0.25,0.25",
                    "--delta", "0.1,0.05", "--out", str(tmp_path)]) == 1

    def test_k1_matches_transform(self, tmp_path):
        out = tmp_path / "k1"
        assert run(["construct", "--K", "1", "--L", "0.25", "--delta", "0.1",
                    "--out", str(out)]) == 0
        state = oe.load_state(out / "state.txt")
        tr = oe.transform_step(np.zeros(3), 2, 0.25, 0.1)
        assert state.checkpoints == (tr.n,)

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("L=0.25,0.25\ndelta=0.1,0.05\n")
        out = tmp_path / "cfg"
        assert run(["construct", "--config", str(cfg), "--delta", "0.1,0.06",
                    "--out", str(out)]) == 0
        state = oe.load_state(out / "state.txt")
        assert state.stages[1].delta == 0.06

    def test_stage_failure_writes_partial_outputs(self, tmp_path):
        out = tmp_path / "fail"
        assert run(["construct", "--L", "0.25,0.25", "--delta", "0.1,0.05",
                    "--eps-prime", "1e-9", "--out", str(out)]) == 2
        assert (out / "failure.txt").exists()
        partial = oe.load_state(out / "state_partial.txt")
        assert partial.stage_count == 1


class TestVerify:
    def test_default_passes(self, tmp_path):
        out = tmp_path / "v"
        assert run(["verify", "--out", str(out)]) == 0
        lines = (out / "checks.csv").read_text().splitlines()
        assert lines[0] == "check,measured,threshold,pass"
        assert all(line.endswith(",1") for line in lines[1:])

    def test_injected_fault_named(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("0.3 1.5 0.2\n")
        out = tmp_path / "v"
        assert run(["verify", "--schur-file", str(bad), "--out", str(out)]) == 2
        lines = (out / "checks.csv").read_text().splitlines()
        assert lines[1].startswith("schur_parameter_range,1.5,") and lines[1].endswith(",0")

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(["verify", "--seed", "7", "--out", str(a)]) == 0
        assert run(["verify", "--seed", "7", "--out", str(b)]) == 0
        assert (a / "checks.csv").read_bytes() == (b / "checks.csv").read_bytes()

    def test_doubled_grid_keeps_verdicts(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(["verify", "--out", str(a)]) == 0
        assert run(["verify", "--oversample", "4", "--out", str(b)]) == 0
        verdicts_a = [l.rsplit(",", 1)[1] for l in (a / "checks.csv").read_text().splitlines()[1:]]
        verdicts_b = [l.rsplit(",", 1)[1] for l in (b / "checks.csv").read_text().splitlines()[1:]]
        assert verdicts_a == verdicts_b


class TestRealline:
    def test_chebyshev_fixture(self, tmp_path):
        out = tmp_path / "r"
        assert run(["realline", "--chebyshev", "16", "--out", str(out)]) == 0
        lines = (out / "realline.csv").read_text().splitlines()
        assert len(lines) == 2 and lines[1].startswith("16,")

    def test_state_round(self, tmp_path):
        cdir = tmp_path / "c"
        assert run(["construct", "--K", "1", "--L", "0.25", "--delta", "0.1",
                    "--out", str(cdir)]) == 0
        out = tmp_path / "r"
        assert run(["realline", "--state", str(cdir / "state.txt"), "--out", str(out)]) == 0
        lines = (out / "realline.csv").read_text().splitlines()
        assert len(lines) == 2

    def test_odd_checkpoint(self, tmp_path):
        assert run(["realline", "--chebyshev", "15", "--out", str(tmp_path)]) == 1

    def test_missing_state(self, tmp_path):
        assert run(["realline", "--state", str(tmp_path / "nope.txt"),
                    "--out", str(tmp_path)]) == 3


class TestEntropyTable:
    def test_schur_input(self, tmp_path):
        out = tmp_path / "e"
        assert run(["entropy-table", "--schur", "0.5,0.3", "--degrees", "1,2",
                    "--out", str(out)]) == 0
        lines = (out / "entropy.csv").read_text().splitlines()
        assert lines[0] == "n,monic,entropy,entropy_plus,entropy_minus,ac,atom,quad_err"
        assert len(lines) == 3

    def test_measure_file_input(self, tmp_path):
        mfile = tmp_path / "m.txt"
        oe.save_measure(oe.add_atom(oe.bernstein_szego([0.5]), 0.2), mfile)
        out = tmp_path / "e"
        assert run(["entropy-table", "--measure", str(mfile), "--degrees", "1",
                    "--orthonormal", "--out", str(out)]) == 0
        assert (out / "entropy.csv").exists()

    def test_input_required(self, tmp_path):
        assert run(["entropy-table", "--out", str(tmp_path)]) == 1
