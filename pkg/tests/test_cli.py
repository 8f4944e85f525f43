import json
import os

import pytest

from surfbound.cli import build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


class TestTable:
    def test_human_output(self, capsys):
        code, out, err = run(capsys, "table")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 74
        assert any("(2,3,7)" in line and "84(g-1)" in line for line in lines)

    def test_json_rows(self, capsys):
        code, data, _ = run_json(capsys, "table", "--json")
        assert code == 0
        assert data["schema_version"] == "1"
        assert len(data["rows"]) == 74
        first = data["rows"][0]
        assert set(first) == {"signature", "genus", "periods", "bound_ratio", "flag"}
        ratios = {r["signature"]: r["bound_ratio"] for r in data["rows"]}
        assert ratios["(2,3,7)"] == "84"
        assert ratios["(2,3,11)"] == "132/5"

    def test_check_flag(self, capsys):
        code, out, _ = run(capsys, "table", "--check")
        assert code == 0
        assert "74 signatures verified" in out

    def test_check_flag_json(self, capsys):
        code, data, _ = run_json(capsys, "table", "--check", "--json")
        assert code == 0
        assert data["checked"] == 74
        assert data["consistent"] is True

    def test_corrupt_data_file_exits_1(self, capsys, tmp_path):
        bad = tmp_path / "table.txt"
        bad.write_text("2 3 7 | 1/21 | 84 | verified-by-literature\nnot a row\n")
        code, _, err = run(capsys, "table", "--data", str(bad))
        assert code == 1
        assert "not a row" in err

    def test_wrong_stated_measure_exits_1(self, capsys, tmp_path):
        bad = tmp_path / "table.txt"
        bad.write_text("2 3 7 | 1/20 | 84 | verified-by-literature\n")
        code, _, err = run(capsys, "table", "--data", str(bad))
        assert code == 1
        assert "recomputed 1/21" in err

    def test_missing_data_file_exits_2(self, capsys, tmp_path):
        code, _, err = run(capsys, "table", "--data", str(tmp_path / "no.txt"))
        assert code == 2
        assert "cannot read" in err


class TestMeasure:
    def test_hurwitz_signature(self, capsys):
        code, out, _ = run(capsys, "measure", "2,3,7", "--order", "84")
        assert code == 0
        assert "pi/21" in out
        assert "84(g-1)" in out
        assert "kernel genus   2 at order 84" in out

    def test_json(self, capsys):
        code, data, _ = run_json(capsys, "measure", "g1p2", "--json")
        assert code == 0
        assert data["signature"] == "(1;2)"
        assert data["measure"] == "pi"
        assert data["bound_ratio"] == "4"

    def test_abelianization_line(self, capsys):
        code, out, _ = run(capsys, "measure", "2,3,8")
        assert code == 0
        assert "abelianized    C2" in out

    def test_inadmissible_exits_2(self, capsys):
        code, out, err = run(capsys, "measure", "2,3")
        assert code == 2
        assert "not admissible" in err

    def test_nonintegral_kernel_genus_is_an_answer(self, capsys):
        # order 85 admits no torsion-free kernel under (2,3,7); saying so
        # is a successful computation, not a failure
        code, out, _ = run(capsys, "measure", "2,3,7", "--order", "85")
        assert code == 0
        assert "kernel genus   none at order 85" in out

    def test_nonintegral_kernel_genus_json(self, capsys):
        code, data, _ = run_json(capsys, "measure", "2,3,7",
                                 "--order", "85", "--json")
        assert code == 0
        assert data["kernel_genus"]["genus"] is None
        assert "not an integer" in data["kernel_genus"]["reason"]

    def test_bad_signature_exits_2(self, capsys):
        code, _, err = run(capsys, "measure", "frogs")
        assert code == 2
        assert "bad signature" in err


class TestConstants:
    def test_values(self, capsys):
        code, data, _ = run_json(capsys, "constants", "--json")
        assert code == 0
        assert data["s_max"] == 84
        assert data["r_lcm"] == 210
        assert data["primes"] == [2, 3, 5, 7]
        assert data["s_ranking"][:9] == [84, 48, 40, 36, 30, 24, 24, 24, 21]
        assert data["table_rows"] == 74

    def test_byte_identical_across_runs(self, capsys):
        _, out1, _ = run(capsys, "constants", "--json")
        _, out2, _ = run(capsys, "constants", "--json")
        assert out1 == out2

    def test_keys_sorted(self, capsys):
        _, out, _ = run(capsys, "constants", "--json")
        keys = list(json.loads(out))
        assert keys == sorted(keys)


class TestSkeSearch:
    def test_count_mode(self, capsys):
        code, data, _ = run_json(capsys, "ske", "search", "--signature",
                                 "2,2,2,3", "--group", "dihedral:6",
                                 "--mode", "count", "--json")
        assert code == 0
        assert data["count"] == 36

    def test_first_mode_finds(self, capsys):
        code, data, _ = run_json(capsys, "ske", "search", "--signature",
                                 "2,3,8", "--group", "GL23", "--json")
        assert code == 0
        assert data["found"] is True
        cert = data["certificate"]
        assert cert["type"] == "ske"
        assert cert["group_order"] == 48
        assert cert["kernel_genus"] == 2

    def test_empty_search_is_none_exit_0(self, capsys):
        # exhausting the tree without a hit proves non-existence; that is
        # the answer the command was asked for
        code, out, _ = run(capsys, "ske", "search", "--signature", "2,3,12",
                           "--group", "C24", "--mode", "count")
        assert code == 0
        assert "none" in out

    def test_empty_search_json_shape(self, capsys):
        code, data, _ = run_json(capsys, "ske", "search", "--signature",
                                 "2,3,12", "--group", "C24",
                                 "--mode", "count", "--json")
        assert code == 0
        assert data["found"] is False
        assert data["count"] == 0

    def test_genus1_signature_none(self, capsys):
        code, out, _ = run(capsys, "ske", "search", "--signature", "g1p2",
                           "--group", "klein_four")
        assert code == 0
        assert out.strip() == "none"

    def test_all_mode_with_dedup(self, capsys):
        code, data, _ = run_json(capsys, "ske", "search", "--signature",
                                 "2,2,2,3", "--group", "dihedral:6",
                                 "--mode", "all", "--dedup", "--json")
        assert code == 0
        assert data["count"] == len(data["solutions"]) > 0

    def test_impossible_order_is_none_exit_0(self, capsys):
        # (2,3,7) over order 12 gives a fractional kernel genus, which
        # already proves no epimorphism exists
        code, out, _ = run(capsys, "ske", "search", "--signature", "2,3,7",
                           "--group", "D6")
        assert code == 0
        assert "none" in out
        assert "not an integer" in out

    def test_inadmissible_signature_exits_2(self, capsys):
        code, _, err = run(capsys, "ske", "search", "--signature", "2,3",
                           "--group", "D6")
        assert code == 2
        assert "not admissible" in err

    def test_bad_group_exits_2(self, capsys):
        code, _, err = run(capsys, "ske", "search", "--signature", "2,3,8",
                           "--group", "XYZ")
        assert code == 2
        assert "bad group descriptor" in err


class TestSkeVerify:
    def _cert_file(self, capsys, tmp_path, *argv):
        _, data, _ = run_json(capsys, *argv)
        path = tmp_path / "cert.json"
        path.write_text(json.dumps(data["certificate"]))
        return path

    def test_round_trip(self, capsys, tmp_path):
        path = self._cert_file(capsys, tmp_path, "ske", "search",
                               "--signature", "2,3,8", "--group", "GL23",
                               "--json")
        code, out, _ = run(capsys, "ske", "verify", str(path))
        assert code == 0
        assert "certificate ok" in out

    def test_envelope_accepted(self, capsys, tmp_path):
        _, data, _ = run_json(capsys, "ske", "search", "--signature", "2,3,8",
                              "--group", "GL23", "--json")
        path = tmp_path / "env.json"
        path.write_text(json.dumps({"schema_version": "1",
                                    "certificate": data["certificate"]}))
        code, _, _ = run(capsys, "ske", "verify", str(path))
        assert code == 0

    def test_tampered_exits_1(self, capsys, tmp_path):
        path = self._cert_file(capsys, tmp_path, "ske", "search",
                               "--signature", "2,3,8", "--group", "GL23",
                               "--json")
        doc = json.loads(path.read_text())
        doc["group_order"] = 96
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "ske", "verify", str(path))
        assert code == 1
        assert "verification failed" in out

    def test_genus_certificate(self, capsys, tmp_path):
        _, data, _ = run_json(capsys, "certify", "--genus", "5", "--json")
        path = tmp_path / "genus.json"
        path.write_text(json.dumps(data["certificate"]))
        code, out, _ = run(capsys, "ske", "verify", str(path))
        assert code == 0
        assert "genus 5: bound 24" in out

    def test_cover_certificate(self, capsys, tmp_path):
        _, data, _ = run_json(capsys, "cover", "--case", "g", "--prime", "3",
                              "--json")
        path = tmp_path / "cover.json"
        path.write_text(json.dumps(data["cover"]))
        code, out, _ = run(capsys, "ske", "verify", str(path))
        assert code == 0
        assert "cover" in out and "genus 4" in out

    def test_missing_file_exits_2(self, capsys, tmp_path):
        code, _, err = run(capsys, "ske", "verify", str(tmp_path / "none.json"))
        assert code == 2
        assert "cannot read" in err

    def test_malformed_json_exits_2(self, capsys, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("{nope")
        code, _, err = run(capsys, "ske", "verify", str(path))
        assert code == 2

    def test_unknown_type_exits_2(self, capsys, tmp_path):
        path = tmp_path / "odd.json"
        path.write_text(json.dumps({"type": "warranty"}))
        code, _, err = run(capsys, "ske", "verify", str(path))
        assert code == 2
        assert "unknown certificate type" in err

    def test_missing_fields_exit_2(self, capsys, tmp_path):
        path = tmp_path / "short.json"
        path.write_text(json.dumps({"type": "ske", "signature": "2,3,8"}))
        code, _, err = run(capsys, "ske", "verify", str(path))
        assert code == 2
        assert "malformed" in err


class TestCover:
    def test_build_json(self, capsys):
        code, data, _ = run_json(capsys, "cover", "--case", "g", "--prime", "3",
                                 "--json")
        assert code == 0
        assert data["found"] is True
        assert data["cover"]["cover_genus"] == 4
        assert data["cover"]["cover_group_order"] == 36
        assert data["quotient"]["kernel_genus"] == 4

    def test_no_hyperplane_is_an_answer(self, capsys):
        # case b lifts at no odd prime; reporting that is a success
        code, out, _ = run(capsys, "cover", "--case", "b", "--prime", "3")
        assert code == 0
        assert "no invariant hyperplane" in out

    def test_no_hyperplane_json_shape(self, capsys):
        code, data, _ = run_json(capsys, "cover", "--case", "b", "--prime", "3",
                                 "--json")
        assert code == 0
        assert data["found"] is False
        assert "mod 3" in data["reason"]

    def test_unknown_case_exits_2(self, capsys):
        code, _, err = run(capsys, "cover", "--case", "z", "--prime", "3")
        assert code == 2
        assert "unknown cover case" in err

    def test_nonprime_exits_2(self, capsys):
        code, _, err = run(capsys, "cover", "--case", "a", "--prime", "9")
        assert code == 2
        assert "must be a prime" in err

    def test_missing_flags_exits_2(self, capsys):
        code, _, err = run(capsys, "cover")
        assert code == 2
        assert "need --case and --prime" in err

    def test_check_all_cases(self, capsys):
        code, data, _ = run_json(capsys, "cover", "--check", "--json")
        assert code == 0
        assert data["ok"] is True
        assert len(data["reports"]) == 7
        by_label = {r["case"]: r for r in data["reports"]}
        assert by_label["a"]["with_hyperplane"] == [2, 17]
        assert by_label["d"]["with_hyperplane"] == [5, 11]

    def test_check_filtered(self, capsys):
        code, data, _ = run_json(capsys, "cover", "--check", "--labels", "f",
                                 "--primes", "7,11,19", "--json")
        assert code == 0
        assert len(data["reports"]) == 1
        assert data["reports"][0]["with_hyperplane"] == [7, 19]

    def test_check_with_case_exits_2(self, capsys):
        code, _, err = run(capsys, "cover", "--check", "--case", "a",
                           "--prime", "2")
        assert code == 2
        assert "does not combine" in err

    def test_labels_without_check_exits_2(self, capsys):
        code, _, err = run(capsys, "cover", "--case", "a", "--prime", "2",
                           "--labels", "f")
        assert code == 2

    def test_bad_primes_list_exits_2(self, capsys):
        code, _, err = run(capsys, "cover", "--check", "--primes", "7,x")
        assert code == 2

    def test_nonprime_check_entry_exits_2(self, capsys):
        code, _, err = run(capsys, "cover", "--check", "--primes", "6")
        assert code == 2
        assert "must be prime" in err


class TestCertify:
    def test_attained_genus(self, capsys):
        code, data, _ = run_json(capsys, "certify", "--genus", "24", "--json")
        assert code == 0
        cert = data["certificate"]
        assert cert["bound"] == 92
        assert cert["attained"] is True
        assert cert["discharge"]["complete"] is True
        assert data["lower_bound_only"] is False

    def test_catalog_genus_human(self, capsys):
        code, out, _ = run(capsys, "certify", "--genus", "16")
        assert code == 0
        assert "bound 360" in out
        assert "A6" in out
        assert "lower bound only" in out

    def test_plain_genus_marked_lower_bound(self, capsys):
        code, data, _ = run_json(capsys, "certify", "--genus", "100", "--json")
        assert code == 0
        assert data["lower_bound_only"] is True
        assert data["certificate"]["attained"] is False

    def test_genus_below_two_exits_2(self, capsys):
        code, _, err = run(capsys, "certify", "--genus", "1")
        assert code == 2

    def test_deterministic_json(self, capsys):
        _, out1, _ = run(capsys, "certify", "--genus", "24", "--json")
        _, out2, _ = run(capsys, "certify", "--genus", "24", "--json")
        assert out1 == out2


class TestAttained:
    def test_up_to_300(self, capsys):
        code, data, _ = run_json(capsys, "attained", "--max", "300", "--json")
        assert code == 0
        genera = [row["genus"] for row in data["genera"]]
        assert genera == [24, 48, 60, 84, 108, 168, 180, 228, 240, 264]
        assert all(row["complete"] for row in data["genera"])

    def test_none_below_24(self, capsys):
        code, out, _ = run(capsys, "attained", "--max", "23")
        assert code == 0
        assert "no attained genera" in out

    def test_human_lines(self, capsys):
        code, out, _ = run(capsys, "attained", "--max", "100")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 4
        assert "genus   24" in lines[0] and "bound    92" in lines[0]

    def test_discharge_entries_present(self, capsys):
        code, data, _ = run_json(capsys, "attained", "--max", "24", "--json")
        entry_methods = [e["method"]
                         for e in data["genera"][0]["discharge"]["entries"]]
        assert "sylow-orbit-embedding" in entry_methods


class TestCatalog:
    def test_subset(self, capsys):
        code, data, _ = run_json(capsys, "catalog", "--genera", "2,5,10", "--json")
        assert code == 0
        bounds = {c["genus"]: c["bound"] for c in data["certificates"]}
        assert bounds == {2: 48, 5: 24, 10: 72}

    def test_human_line_shape(self, capsys):
        code, out, _ = run(capsys, "catalog", "--genera", "16")
        assert code == 0
        assert "g= 16" in out and "bound   360" in out and "ske-search" in out

    def test_bad_genus_exits_2(self, capsys):
        code, _, err = run(capsys, "catalog", "--genera", "1")
        assert code == 2


class TestResourceCaps:
    def test_order_cap_exits_3(self, capsys):
        code, _, err = run(capsys, "--order-cap", "100", "ske", "search",
                           "--signature", "2,3,8", "--group", "S8",
                           "--mode", "count")
        assert code == 3
        assert "resource cap" in err

    def test_node_budget_exits_3(self, capsys):
        code, _, err = run(capsys, "--node-budget", "5", "ske", "search",
                           "--signature", "2,2,2,6", "--group", "S3*D11",
                           "--mode", "all")
        assert code == 3
        assert "resource cap" in err

    def test_env_restored_after_flag(self, capsys):
        assert "SURFBOUND_ORDER_CAP" not in os.environ
        run(capsys, "--order-cap", "100", "ske", "search",
            "--signature", "2,3,8", "--group", "S8", "--mode", "count")
        assert "SURFBOUND_ORDER_CAP" not in os.environ

    def test_env_flag_overrides_existing(self, capsys):
        os.environ["SURFBOUND_ORDER_CAP"] = "999999"
        try:
            code, _, _ = run(capsys, "--order-cap", "100", "ske", "search",
                             "--signature", "2,3,8", "--group", "S8",
                             "--mode", "count")
            assert code == 3
            assert os.environ["SURFBOUND_ORDER_CAP"] == "999999"
        finally:
            del os.environ["SURFBOUND_ORDER_CAP"]


class TestParser:
    def test_missing_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["conjugate"])
        assert exc.value.code == 2

    def test_certify_requires_genus_flag(self):
        with pytest.raises(SystemExit) as exc:
            main(["certify", "24"])
        assert exc.value.code == 2

    def test_parser_builds(self):
        parser = build_parser()
        args = parser.parse_args(["measure", "2,3,7"])
        assert args.signature == "2,3,7"
