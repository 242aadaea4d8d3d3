import json

import pytest

from seamorph.cli import main

from .conftest import TABLE_COUNTS, write_coco_fixture, write_count_manifest


def write_mock_config(path, output_root, images_per_source=2, seed=7):
    path.write_text(
        f"""
[backend]
name = "mock"
batch_size = 10
profile = "bld"

[classifier]
mode = "synthetic_feature"

[checker]
mode = "synthetic_feature"

[pipeline]
output_root = "{output_root}"
images_per_source = {images_per_source}
seed = {seed}
""",
        encoding="utf-8",
    )
    return path


class TestExitCodes:
    def test_unknown_subcommand_exits_1_with_help(self, capsys):
        assert main(["frobnicate"]) == 1
        assert "No such command" in capsys.readouterr().err

    def test_usage_error_exits_1(self, capsys):
        assert main(["stats"]) == 1  # missing required --manifest

    def test_help_exits_0(self, capsys):
        assert main(["--help"]) == 0
        out = capsys.readouterr().out
        for sub in ("mask", "generate", "classify", "check", "run", "stats",
                    "train-seastate", "train-checker", "build-negatives", "eval", "review"):
            assert sub in out

    def test_subcommand_help_lists_flags_with_defaults(self, capsys):
        assert main(["run", "--help"]) == 0
        out = capsys.readouterr().out
        for flag in ("--config", "--annotations", "--images", "--output", "--seed", "--workers"):
            assert flag in out
        assert main(["mask", "--help"]) == 0
        assert "--dilation" in capsys.readouterr().out

    def test_runtime_failure_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "manifest.jsonl"
        bad.write_text("not json\nsecond line\n", encoding="utf-8")
        assert main(["stats", "--manifest", str(bad)]) == 2
        assert "error" in capsys.readouterr().err

    def test_unreadable_image_exits_2(self, tmp_path, capsys):
        not_an_image = tmp_path / "fake.png"
        not_an_image.write_text("plain text", encoding="utf-8")
        assert main(["classify", str(not_an_image)]) == 2
        assert "error" in capsys.readouterr().err


class TestStatsCommand:
    def test_table_fixture_prints_passing_rate(self, tmp_path, capsys):
        manifest = write_count_manifest(tmp_path / "m.jsonl", TABLE_COUNTS)
        assert main(["stats", "--manifest", str(manifest)]) == 0
        out = capsys.readouterr().out
        assert "71.85%" in out
        assert "97000" in out and "69694" in out

    def test_json_mode(self, tmp_path, capsys):
        manifest = write_count_manifest(tmp_path / "m.jsonl", {2: (10, 4)})
        assert main(["stats", "--manifest", str(manifest), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["generated_per_state"]["SS2"] == 10
        assert payload["passing_rate"] == pytest.approx(40.0)


class TestRunCommand:
    def test_same_seed_identical_summaries(self, tmp_path, capsys):
        annotations, images = write_coco_fixture(tmp_path, n=3)
        config = write_mock_config(tmp_path / "mock.toml", tmp_path / "ignored")
        args = ["run", "--config", str(config), "--annotations", str(annotations),
                "--images", str(images), "--seed", "7"]
        assert main(args + ["--output", str(tmp_path / "out1")]) == 0
        assert main(args + ["--output", str(tmp_path / "out2")]) == 0
        s1 = (tmp_path / "out1" / "run_summary.json").read_text()
        s2 = (tmp_path / "out2" / "run_summary.json").read_text()
        assert s1 == s2

    def test_flag_overrides_win(self, tmp_path):
        annotations, images = write_coco_fixture(tmp_path, n=1)
        config = write_mock_config(tmp_path / "mock.toml", tmp_path / "from_config", seed=1)
        assert main(["run", "--config", str(config), "--annotations", str(annotations),
                     "--images", str(images), "--output", str(tmp_path / "override"),
                     "--seed", "3"]) == 0
        assert (tmp_path / "override" / "manifest.jsonl").exists()
        assert not (tmp_path / "from_config").exists()
        records = [json.loads(l) for l in
                   (tmp_path / "override" / "manifest.jsonl").read_text().splitlines()]
        assert records[0]["seed"] == 3


class TestStageCommands:
    def test_mask_command(self, tmp_path, capsys):
        annotations, images = write_coco_fixture(tmp_path, n=2)
        out = tmp_path / "masks"
        assert main(["mask", "--annotations", str(annotations), "--images", str(images),
                     "--output", str(out)]) == 0
        assert sorted(p.name for p in out.glob("*.png")) == ["0.mask.png", "1.mask.png"]

    def test_generate_command(self, tmp_path):
        annotations, images = write_coco_fixture(tmp_path, n=2)
        config = write_mock_config(tmp_path / "mock.toml", tmp_path / "gen")
        assert main(["generate", "--config", str(config), "--annotations", str(annotations),
                     "--images", str(images), "--count", "2"]) == 0
        files = list((tmp_path / "gen" / "generated").glob("*.png"))
        assert len(files) == 4
        ledger = (tmp_path / "gen" / "generated" / "generations.jsonl").read_text().splitlines()
        assert len(ledger) == 4
        assert {json.loads(l)["backend_name"] for l in ledger} == {"mock"}

    def test_classify_command_json(self, tmp_path, capsys):
        from PIL import Image

        from seamorph.backends.mock import sea_texture

        img = tmp_path / "tex.png"
        Image.fromarray(sea_texture(32, 32, seed=1, roughness=0.9)).save(img)
        assert main(["classify", str(img), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload[0]["sea_state"] == 4
        assert len(payload[0]["scores"]) == 4

    def test_check_command(self, tmp_path, capsys):
        import shutil

        annotations, images = write_coco_fixture(tmp_path, n=1)
        edited = tmp_path / "edited.png"
        shutil.copy(images / "0.png", edited)  # untouched copy: everything preserved
        assert main(["check", "--annotations", str(annotations), "--images", str(images),
                     "--edited", str(edited), "--source-id", "0", "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["kept"] is True
        assert payload["verdicts"][0]["verdict"] == "boat"

    def test_eval_command(self, tmp_path, capsys):
        annotations, images = write_coco_fixture(tmp_path, n=2)
        config = write_mock_config(tmp_path / "mock.toml", tmp_path / "out")
        assert main(["run", "--config", str(config), "--annotations", str(annotations),
                     "--images", str(images)]) == 0
        capsys.readouterr()  # drain run output before parsing eval's JSON
        manifest = tmp_path / "out" / "manifest.jsonl"
        records = [json.loads(l) for l in manifest.read_text().splitlines()]
        detections = tmp_path / "dets.csv"
        detections.write_text(
            "\n".join(
                f"{r['edited_id']},12,10,16,10,0.9" for r in records if r["kept"]
            ) + "\n",
            encoding="utf-8",
        )
        assert main(["eval", "--manifest", str(manifest), "--detections", str(detections),
                     "--annotations", str(annotations), "--images", str(images),
                     "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        occupied = [v for v in payload.values() if v["n_gt"] > 0]
        assert occupied
        assert all(v["map50"] == pytest.approx(1.0) for v in occupied)

    def test_build_negatives_command(self, tmp_path, capsys):
        annotations, images = write_coco_fixture(tmp_path, n=2, width=96, height=80)
        config = write_mock_config(tmp_path / "mock.toml", tmp_path / "out")
        assert main(["run", "--config", str(config), "--annotations", str(annotations),
                     "--images", str(images)]) == 0
        out = tmp_path / "negatives"
        assert main(["build-negatives", "--annotations", str(annotations),
                     "--images", str(images),
                     "--manifest", str(tmp_path / "out" / "manifest.jsonl"),
                     "--images-root", str(tmp_path / "out"),
                     "--output", str(out), "--seed", "5"]) == 0
        counts = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert counts["background_negative"] > 0
        assert counts["quarter_negative"] > 0
        assert list((out / "not_boat").glob("*.png"))
