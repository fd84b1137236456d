import os

import numpy as np
import pytest

from ctpatch.errors import ConfigError, ExperimentCellError, ModelMismatchError
from ctpatch.experiment import ExperimentConfig, cell_seed, classify_image, run_experiment
from ctpatch.imaging import CORONAVIRUS, write_manifest, write_pgm
from ctpatch.reporting import render_markdown
from ctpatch.synthetic import make_texture_corpus


@pytest.fixture(scope="module")
def small_manifest(tmp_path_factory):
    patches, _ = make_texture_corpus(n_per_class=12, size=16, seed=2)
    directory = tmp_path_factory.mktemp("subset16")
    write_manifest(patches, str(directory))
    return os.path.join(str(directory), "manifest.json")


def base_config(manifest, out, **overrides):
    payload = {
        "subsets": {"subset1": manifest},
        "extractors": ["GLCM"],
        "ks": [10],
        "seed": 7,
        "output_dir": out,
    }
    payload.update(overrides)
    return ExperimentConfig.from_dict(payload)


class TestExperimentConfig:
    def test_rejects_unknown_extractor(self, small_manifest, tmp_path):
        with pytest.raises(ConfigError):
            base_config(small_manifest, str(tmp_path), extractors=["GLCM", "GABOR"])

    def test_rejects_bad_k(self, small_manifest, tmp_path):
        with pytest.raises(ConfigError):
            base_config(small_manifest, str(tmp_path), ks=[3])

    def test_rejects_empty_subsets(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"subsets": {}, "output_dir": str(tmp_path)})

    def test_fingerprint_tracks_content(self, small_manifest, tmp_path):
        a = base_config(small_manifest, str(tmp_path))
        b = base_config(small_manifest, str(tmp_path), seed=8)
        assert a.fingerprint() != b.fingerprint()
        assert a.fingerprint() == base_config(small_manifest, str(tmp_path)).fingerprint()

    def test_cell_seed_is_stable(self):
        assert cell_seed(7, "s", "GLCM", 10) == cell_seed(7, "s", "GLCM", 10)
        assert cell_seed(7, "s", "GLCM", 10) != cell_seed(7, "s", "GLCM", 5)


class TestRunExperiment:
    def test_single_cell_report(self, small_manifest, tmp_path):
        config = base_config(small_manifest, str(tmp_path / "out"))
        report = run_experiment(config)
        assert len(report.rows) == 1
        row = report.rows[0]
        assert (row.subset, row.extractor, row.k, row.n_features) == ("subset1", "GLCM", 10, 19)
        assert os.path.exists(tmp_path / "out" / "report.json")
        assert os.path.exists(tmp_path / "out" / "report.md")
        assert os.path.exists(tmp_path / "out" / "report.csv")
        assert os.path.exists(tmp_path / "out" / "models" / "subset1__GLCM__10fold.json")

    def test_full_grid_row_count(self, small_manifest, tmp_path):
        config = base_config(
            small_manifest,
            str(tmp_path / "out"),
            extractors=["RAW", "GLCM", "LDP", "GLRLM", "GLSZM", "DWT"],
            ks=[2, 5, 10],
        )
        report = run_experiment(config)
        assert len(report.rows) == 18
        seen = {(r.subset, r.extractor, r.k) for r in report.rows}
        assert len(seen) == 18

    def test_deterministic_rerun(self, small_manifest, tmp_path):
        config_a = base_config(small_manifest, str(tmp_path / "a"))
        config_b = base_config(small_manifest, str(tmp_path / "b"))
        report_a = run_experiment(config_a)
        report_b = run_experiment(config_b)
        assert render_markdown(report_a) == render_markdown(report_b)
        md_a = (tmp_path / "a" / "report.md").read_bytes()
        md_b = (tmp_path / "b" / "report.md").read_bytes()
        assert md_a == md_b

    def test_cache_reused(self, small_manifest, tmp_path):
        out = str(tmp_path / "out")
        config = base_config(small_manifest, out)
        run_experiment(config)
        cache_dir = os.path.join(out, "cache")
        (cache_file,) = os.listdir(cache_dir)
        first_mtime = os.path.getmtime(os.path.join(cache_dir, cache_file))
        run_experiment(config)
        assert os.path.getmtime(os.path.join(cache_dir, cache_file)) == first_mtime

    def test_jobs_parallel_matches_serial(self, small_manifest, tmp_path):
        serial = run_experiment(base_config(small_manifest, str(tmp_path / "s"), ks=[2, 5]))
        threaded = run_experiment(
            base_config(small_manifest, str(tmp_path / "t"), ks=[2, 5], jobs=4)
        )
        assert render_markdown(serial) == render_markdown(threaded)

    def test_cell_error_is_annotated(self, tmp_path):
        patches, _ = make_texture_corpus(n_per_class=4, size=16, seed=3)
        directory = tmp_path / "tiny"
        write_manifest(patches, str(directory))
        config = base_config(str(directory / "manifest.json"), str(tmp_path / "out"))
        with pytest.raises(ExperimentCellError) as excinfo:
            run_experiment(config)  # k=10 needs >= 10 per class
        assert excinfo.value.cell == ("subset1", "GLCM", 10)


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    patches, _ = make_texture_corpus(n_per_class=12, size=32, seed=4)
    directory = tmp_path_factory.mktemp("subset32")
    write_manifest(patches, str(directory))
    out = str(tmp_path_factory.mktemp("trained"))
    config = base_config(os.path.join(str(directory), "manifest.json"), out, ks=[5])
    run_experiment(config)
    return os.path.join(out, "models", "subset1__GLCM__5fold.json")


class TestClassifyImage:
    def test_grid_count_and_overlay(self, trained, tmp_path):
        rng = np.random.default_rng(0)
        image_path = str(tmp_path / "img.pgm")
        write_pgm(image_path, rng.integers(0, 256, (128, 160)).astype(np.uint8))
        out = str(tmp_path / "overlay")
        results = classify_image(image_path, trained, "GLCM", patch_size=32, out_dir=out)
        assert len(results) == (128 // 32) * (160 // 32)
        assert os.path.exists(os.path.join(out, "classification.csv"))
        assert os.path.exists(os.path.join(out, "infected_mask.pgm"))
        with open(os.path.join(out, "classification.csv")) as fh:
            assert len(fh.readlines()) == len(results) + 1

    def test_large_image_grid_arithmetic(self, trained, tmp_path):
        rng = np.random.default_rng(3)
        image_path = str(tmp_path / "big.pgm")
        write_pgm(image_path, rng.integers(0, 256, (512, 512)).astype(np.uint8))
        results = classify_image(image_path, trained, "GLCM", patch_size=32)
        assert len(results) == 256  # (512 / 32)^2 tiles

    def test_uniform_image_uniform_label(self, trained, tmp_path):
        from ctpatch.synthetic import smooth_patch

        tile = smooth_patch(np.random.default_rng(5), 32)
        image = np.tile(tile, (4, 4))
        image_path = str(tmp_path / "tiled.pgm")
        write_pgm(image_path, image)
        results = classify_image(image_path, trained, "GLCM", patch_size=32)
        assert len({r.label for r in results}) == 1
        assert results[0].label == CORONAVIRUS  # blobs are the infected class

    def test_model_mismatch(self, trained, tmp_path):
        rng = np.random.default_rng(1)
        image_path = str(tmp_path / "img.pgm")
        write_pgm(image_path, rng.integers(0, 256, (64, 64)).astype(np.uint8))
        with pytest.raises(ModelMismatchError):
            classify_image(image_path, trained, "GLSZM", patch_size=32)
