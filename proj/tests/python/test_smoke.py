"""Smoke tests for the pybind11 module and the CLI binary."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

import specbench


def test_version():
    assert specbench.__version__


def test_normalize_band_endpoints():
    out = specbench.normalize_band(np.array([[100.0, 200.0, 300.0]], dtype=np.float32))
    assert out.tolist() == [[0.0, 0.5, 1.0]]


def test_constant_band_is_black():
    out = specbench.normalize_band(np.full((4, 4), 7.0, dtype=np.float32))
    assert (out == 0.0).all()


def test_to_byte_rounding():
    out = specbench.to_byte(np.array([[0.0, 0.5, 1.0]], dtype=np.float32))
    assert out.tolist() == [[0, 128, 255]]


def test_normalized_difference():
    plus = np.full((2, 2), 0.8, dtype=np.float32)
    minus = np.full((2, 2), 0.2, dtype=np.float32)
    out = specbench.normalized_difference(plus, minus)
    assert np.allclose(out, 0.6)
    # antisymmetry on random non-negative grids
    rng = np.random.default_rng(0)
    a = rng.uniform(0, 4000, (16, 16)).astype(np.float32)
    b = rng.uniform(0, 4000, (16, 16)).astype(np.float32)
    assert np.array_equal(
        specbench.normalized_difference(a, b), -specbench.normalized_difference(b, a)
    )


def test_ndwi_colormap_interpolation():
    rgb = specbench.apply_colormap(np.full((1, 1), 0.4, dtype=np.float32), "NDWI")
    assert rgb[0, 0].tolist() == [128, 128, 255]
    white = specbench.apply_colormap(np.zeros((1, 1), dtype=np.float32), "NDWI")
    assert white[0, 0].tolist() == [255, 255, 255]


def test_prompt_text_golden_head():
    text = specbench.prompt_text("bigearthnet43", "multispectral")
    assert text.startswith(
        "Instructions: Answer the question asked after the given 6 images of the same scene."
    )
    assert "7. B08: NIR band at 10-meter resolution" in text
    assert text.count("(among 1 to 43)") == 1

    rgb = specbench.prompt_text("eurosat10", "rgb")
    assert "(among 1 to 10) for the single label" in rgb


def test_parse_answer():
    parsed = specbench.parse_answer("(1),(3)", 43, True)
    assert parsed["indices"] == [1, 3]
    assert parsed["mode"] == "strict"
    assert not parsed["failed"]

    lenient = specbench.parse_answer("answer: (2), maybe (10)", 43, True)
    assert lenient["indices"] == [2, 10]
    assert lenient["mode"] == "lenient"

    failed = specbench.parse_answer("(50)", 43, True)
    assert failed["failed"]


def test_sample_prf():
    p, r, f1 = specbench.sample_prf([1, 3], [1])
    assert (p, r) == (0.5, 1.0)
    assert abs(f1 - 2 / 3) < 1e-12


def test_aggregate_against_sklearn():
    sklearn = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(7)
    n_classes = 8
    cases = []
    for _ in range(120):
        pred = sorted(rng.choice(n_classes, rng.integers(0, 4), replace=False) + 1)
        truth = sorted(rng.choice(n_classes, rng.integers(1, 4), replace=False) + 1)
        cases.append(([int(x) for x in pred], [int(x) for x in truth]))

    report = specbench.aggregate(cases, n_classes, True)

    y_pred = np.zeros((len(cases), n_classes), dtype=int)
    y_true = np.zeros((len(cases), n_classes), dtype=int)
    for i, (pred, truth) in enumerate(cases):
        for c in pred:
            y_pred[i, c - 1] = 1
        for c in truth:
            y_true[i, c - 1] = 1

    assert report["sample"]["f1"] == pytest.approx(
        sklearn.f1_score(y_true, y_pred, average="samples", zero_division=0), abs=1e-9
    )
    assert report["micro"]["f1"] == pytest.approx(
        sklearn.f1_score(y_true, y_pred, average="micro", zero_division=0), abs=1e-9
    )
    supported = [c for c in range(n_classes) if y_true[:, c].any()]
    assert report["macro"]["f1"] == pytest.approx(
        sklearn.f1_score(y_true, y_pred, labels=supported, average="macro", zero_division=0),
        abs=1e-9,
    )
    assert report["sample"]["precision"] == pytest.approx(
        sklearn.precision_score(y_true, y_pred, average="samples", zero_division=0), abs=1e-9
    )
    assert report["macro"]["recall"] == pytest.approx(
        sklearn.recall_score(y_true, y_pred, labels=supported, average="macro", zero_division=0),
        abs=1e-9,
    )


def test_map_43_to_19():
    assert specbench.map_43_to_19([6]) == [4]
    assert specbench.map_43_to_19([2]) == []  # dropped class
    assert specbench.map_43_to_19([12, 13]) == [19]


def test_encode_png_signature():
    rgb = np.zeros((4, 4, 3), dtype=np.uint8)
    png = specbench.encode_png(rgb)
    assert png[:8] == b"\x89PNG\r\n\x1a\n"
    assert png == specbench.encode_png(rgb)  # deterministic


def _make_eurosat_dataset(root, n):
    rng = np.random.default_rng(11)
    classes = specbench.class_names("eurosat10")
    bands = [
        "B01", "B02", "B03", "B04", "B05", "B06",
        "B07", "B08", "B8A", "B09", "B11", "B12",
    ]
    patch_dirs = []
    for i in range(n):
        patch_id = f"patch_{i:03d}"
        bundle_dir = os.path.join(root, "bundles", patch_id)
        arrays = {b: rng.integers(0, 4000, (64, 64)).astype(np.uint16) for b in bands}
        label = int(rng.integers(1, 11))
        specbench.write_bundle(bundle_dir, patch_id, "eurosat", [label], arrays)
        patch_dirs.append(bundle_dir)
    manifest = os.path.join(root, "manifest.json")
    specbench.save_manifest(manifest, "eurosat", False, classes, patch_dirs)
    return manifest


def test_render_bundle_shapes(tmp_path):
    manifest = _make_eurosat_dataset(str(tmp_path), 1)
    bundle_dir = os.path.join(str(tmp_path), "bundles", "patch_000")
    images = specbench.render_bundle(bundle_dir)
    assert [name for name, _ in images] == [
        "TrueColor", "FalseColor", "NDVI", "NDWI", "NDMI_B11", "NDMI_B12",
    ]
    for _, arr in images:
        assert arr.shape == (64, 64, 3)
        assert arr.dtype == np.uint8
    labels = specbench.read_bundle_labels(bundle_dir)
    assert len(labels) == 1


@pytest.mark.skipif("SPECBENCH_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_end_to_end(tmp_path):
    cli = os.environ["SPECBENCH_CLI"]
    manifest = _make_eurosat_dataset(str(tmp_path / "ds"), 4)

    out = tmp_path / "run"
    result = subprocess.run(
        [
            cli, "eval",
            "--manifest", manifest,
            "--task", "eurosat",
            "--modality", "multispectral",
            "--backend", "mock-truth",
            "--out", str(out),
            "--label", "smoke-run",
        ],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["accuracy"] == 1.0
    assert metrics["n_records"] == 4
    assert metrics["n_parse_failures"] == 0
    assert (out / "records.jsonl").exists()

    report = subprocess.run(
        [
            cli, "report", str(out / "metrics.json"),
            "--out", str(tmp_path / "cmp"),
        ],
        capture_output=True,
        text=True,
    )
    assert report.returncode == 0, report.stderr
    assert (tmp_path / "cmp.md").exists()
    assert "smoke-run" in (tmp_path / "cmp.md").read_text()


@pytest.mark.skipif("SPECBENCH_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_render_and_prompt(tmp_path):
    cli = os.environ["SPECBENCH_CLI"]
    manifest = _make_eurosat_dataset(str(tmp_path / "ds"), 2)

    render = subprocess.run(
        [
            cli, "render",
            "--manifest", manifest,
            "--out", str(tmp_path / "imgs"),
            "--products", "TrueColor,NDVI",
        ],
        capture_output=True,
        text=True,
    )
    assert render.returncode == 0, render.stderr
    assert (tmp_path / "imgs" / "patch_000" / "TrueColor.png").exists()
    assert (tmp_path / "imgs" / "patch_000" / "NDVI.png").exists()
    assert not (tmp_path / "imgs" / "patch_000" / "NDWI.png").exists()

    prompt = subprocess.run(
        [
            cli, "prompt",
            "--manifest", manifest,
            "--task", "eurosat",
            "--modality", "multispectral",
            "--out", str(tmp_path / "prompts"),
        ],
        capture_output=True,
        text=True,
    )
    assert prompt.returncode == 0, prompt.stderr
    text = (tmp_path / "prompts" / "patch_000" / "prompt.txt").read_text()
    assert text == specbench.prompt_text("eurosat10", "multispectral")
    attachments = json.loads(
        (tmp_path / "prompts" / "patch_000" / "attachments.json").read_text()
    )
    assert [a["product"] for a in attachments] == [
        "TrueColor", "FalseColor", "NDVI", "NDWI", "NDMI_B11", "NDMI_B12",
    ]
