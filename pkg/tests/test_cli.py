import json
import os

import numpy as np
import pytest

from ctpatch.cli import main
from ctpatch.imaging import write_pgm
from ctpatch.synthetic import make_composite_image


@pytest.fixture(scope="module")
def demo_files(tmp_path_factory):
    """Composite demo image + mask on disk."""
    root = tmp_path_factory.mktemp("cli")
    image, mask = make_composite_image(tiles_per_side=6, patch_size=32, seed=1)
    image_path = os.path.join(str(root), "scan.pgm")
    mask_path = os.path.join(str(root), "mask.pgm")
    write_pgm(image_path, image.pixels)
    write_pgm(mask_path, mask.labels * 255)
    return {"root": str(root), "image": image_path, "mask": mask_path}


class TestPipelineSubcommands:
    def test_full_pipeline(self, demo_files, capsys):
        root = demo_files["root"]
        patch_dir = os.path.join(root, "patches")
        assert (
            main(
                [
                    "patches",
                    "--image",
                    demo_files["image"],
                    "--mask",
                    demo_files["mask"],
                    "--size",
                    "32",
                    "--out",
                    patch_dir,
                ]
            )
            == 0
        )
        manifest = os.path.join(patch_dir, "manifest.json")
        assert os.path.exists(manifest)

        features_csv = os.path.join(root, "glcm.csv")
        assert (
            main(
                [
                    "features",
                    "--manifest",
                    manifest,
                    "--extractor",
                    "GLCM",
                    "--out",
                    features_csv,
                ]
            )
            == 0
        )
        assert os.path.exists(features_csv)

        cv_dir = os.path.join(root, "cv")
        assert (
            main(
                [
                    "cv",
                    "--features",
                    features_csv,
                    "--k",
                    "5",
                    "--seed",
                    "7",
                    "--out",
                    cv_dir,
                ]
            )
            == 0
        )
        assert os.path.exists(os.path.join(cv_dir, "ensemble.json"))
        assert os.path.exists(os.path.join(cv_dir, "cv_summary.json"))
        out = capsys.readouterr().out
        assert "accuracy:" in out

        overlay_dir = os.path.join(root, "overlay")
        assert (
            main(
                [
                    "classify",
                    "--image",
                    demo_files["image"],
                    "--ensemble",
                    os.path.join(cv_dir, "ensemble.json"),
                    "--extractor",
                    "GLCM",
                    "--size",
                    "32",
                    "--out",
                    overlay_dir,
                ]
            )
            == 0
        )
        assert os.path.exists(os.path.join(overlay_dir, "infected_mask.pgm"))

    def test_run_and_report(self, demo_files, tmp_path, capsys):
        root = demo_files["root"]
        patch_dir = os.path.join(root, "patches")
        if not os.path.exists(os.path.join(patch_dir, "manifest.json")):
            main(
                [
                    "patches",
                    "--image",
                    demo_files["image"],
                    "--mask",
                    demo_files["mask"],
                    "--size",
                    "32",
                    "--out",
                    patch_dir,
                ]
            )
        out_dir = str(tmp_path / "experiment")
        config_path = str(tmp_path / "config.json")
        with open(config_path, "w") as fh:
            json.dump(
                {
                    "subsets": {"demo": os.path.join(patch_dir, "manifest.json")},
                    "extractors": ["GLCM", "GLRLM"],
                    "ks": [2, 5],
                    "seed": 3,
                    "output_dir": out_dir,
                },
                fh,
            )
        assert main(["run", "--config", config_path]) == 0
        report_json = os.path.join(out_dir, "report.json")
        assert os.path.exists(report_json)

        md_path = str(tmp_path / "table.md")
        assert main(["report", "--report", report_json, "--out", md_path]) == 0
        text = open(md_path).read()
        assert "| Stage 2 | GLCM | 19 |" in text

        capsys.readouterr()  # drop output from the earlier subcommands
        assert main(["report", "--report", report_json, "--format", "csv"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("subset,stage,")


class TestExitCodes:
    def test_config_error_is_2(self, tmp_path):
        config_path = str(tmp_path / "bad.json")
        with open(config_path, "w") as fh:
            json.dump({"subsets": {"s": "m.json"}, "extractors": ["NOPE"]}, fh)
        assert main(["run", "--config", config_path]) == 2

    def test_data_error_is_3(self, tmp_path):
        assert main(["features", "--manifest", str(tmp_path / "missing.json"),
                     "--extractor", "GLCM", "--out", str(tmp_path / "o.csv")]) == 3

    def test_wrong_format_image_is_3(self, tmp_path):
        bad = tmp_path / "img.pgm"
        bad.write_bytes(b"P5\n4 4\n255\n" + b"\x00" * 3)  # truncated raster
        mask = tmp_path / "mask.pgm"
        write_pgm(str(mask), np.ones((4, 4), dtype=np.uint8))
        assert main(["patches", "--image", str(bad), "--mask", str(mask),
                     "--size", "16", "--out", str(tmp_path / "p")]) == 3

    def test_cv_requires_seed(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["cv", "--features", "x.csv", "--k", "5", "--out", "o"])
        assert excinfo.value.code == 2

    def test_numeric_failure_is_4(self, tmp_path):
        csv_path = str(tmp_path / "nan.csv")
        with open(csv_path, "w") as fh:
            fh.write("# extractor=GLRLM levels=32 d=1 theta=0 connectivity=8\n")
            fh.write("patch_path,label,f0\n")
            for i in range(4):
                fh.write(f"a{i}.pgm,coronavirus,{'nan' if i == 0 else '1.0'}\n")
            for i in range(4):
                fh.write(f"b{i}.pgm,non-coronavirus,0.5\n")
        assert main(["cv", "--features", csv_path, "--k", "2",
                     "--seed", "1", "--out", str(tmp_path / "cv")]) == 4

    def test_class_too_small_is_3(self, demo_files, tmp_path):
        # k = 10 with a tiny feature CSV: stratification is impossible
        root = demo_files["root"]
        features_csv = os.path.join(root, "glcm.csv")
        if not os.path.exists(features_csv):
            pytest.skip("pipeline test did not run first")
        with open(features_csv) as fh:
            lines = fh.readlines()
        small_csv = str(tmp_path / "small.csv")
        with open(small_csv, "w") as fh:
            fh.writelines(lines[:6])
        assert main(["cv", "--features", small_csv, "--k", "10",
                     "--seed", "1", "--out", str(tmp_path / "cv")]) == 3
