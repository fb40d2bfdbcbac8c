import json
import struct
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from swishnet.activations import ActivationKind
from swishnet.core.error_codes import ErrorCode
from swishnet.core.exceptions import DataFormatError, ValidationError
from swishnet.output import (
    RunDirectory,
    Series,
    TemplateRenderer,
    decode_tensors,
    default_run_dir,
    encode_pgm,
    encode_tensors,
    load_model,
    matrix_frame,
    normalize_channel,
    read_metrics_csv,
    save_model,
    write_feature_maps,
    write_metrics_csv,
)
from swishnet.output.pgm import decode_pgm_header
from swishnet.tensor import Precision
from swishnet.train import EpochMetrics, MatrixRow, build_fcnn, init_parameters

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def two_epochs():
    return [
        EpochMetrics(
            epoch=1, train_accuracy=0.5, train_loss=0.25, test_accuracy=0.75, test_loss=0.125, wall_time_seconds=1.5
        ),
        EpochMetrics(
            epoch=2, train_accuracy=1.0, train_loss=0.0, test_accuracy=1.0, test_loss=0.0625, wall_time_seconds=2.0
        ),
    ]


class TestMetricsFile:
    def test_exact_text(self, tmp_path, two_epochs):
        path = write_metrics_csv(tmp_path / "metrics.csv", two_epochs)
        assert path.read_bytes().decode("ascii") == (
            "epoch,train_acc,train_loss,test_acc,test_loss,wall_time_s\n"
            "1,0.500000,0.250000,0.750000,0.125000,1.500000\n"
            "2,1.000000,0.000000,1.000000,0.062500,2.000000\n"
            "final,1.000000,0.000000,1.000000,0.062500,3.500000\n"
        )

    def test_without_final_row(self, tmp_path, two_epochs):
        path = write_metrics_csv(tmp_path / "m.csv", two_epochs, final=False)
        assert path.read_text().splitlines()[-1].startswith("2,")

    def test_read_back_skips_final_row(self, tmp_path, two_epochs):
        frame = read_metrics_csv(write_metrics_csv(tmp_path / "m.csv", two_epochs))
        assert frame["epoch"].tolist() == [1, 2]
        assert frame["test_loss"].tolist() == [0.125, 0.0625]
        assert len(read_metrics_csv(tmp_path / "m.csv", include_final=True)) == 3

    def test_malformed_value_names_the_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "epoch,train_acc,train_loss,test_acc,test_loss,wall_time_s\n1,0.5,0.1,0.5,0.1,1.0\n2,abc,0,0,0,0\n"
        )
        with pytest.raises(ValidationError) as exc:
            read_metrics_csv(path)
        assert exc.value.error_code == ErrorCode.MALFORMED_METRICS_FILE.value
        assert exc.value.metadata["line"] == 3

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("epoch,acc\n1,0.5\n")
        with pytest.raises(ValidationError) as exc:
            read_metrics_csv(path)
        assert exc.value.metadata["line"] == 1

    def test_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("epoch,train_acc,train_loss,test_acc,test_loss,wall_time_s\n")
        with pytest.raises(ValidationError):
            read_metrics_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError) as exc:
            read_metrics_csv(tmp_path / "absent.csv")
        assert exc.value.error_code == ErrorCode.MISSING_INPUT_FILE.value

    def test_matrix_status_column(self, two_epochs):
        rows = [
            MatrixRow(index=0, conv_activation="relu", dense_activation="relu", final=two_epochs[-1], epochs_run=2),
            MatrixRow(index=1, conv_activation="elu", dense_activation="swishrelu", diverged=True),
            MatrixRow(
                index=2,
                conv_activation="tanh",
                dense_activation="tanh",
                final=two_epochs[0],
                epochs_run=1,
                stopped_early_at=1,
            ),
        ]
        frame = matrix_frame(rows)
        assert frame["status"].tolist() == ["ok", "diverged", "stopped@1"]
        assert frame["dense_activation"].tolist() == [
            ActivationKind.RELU.display_name,
            ActivationKind.SWISHRELU.display_name,
            ActivationKind.TANH.display_name,
        ]
        assert np.isnan(frame["test_acc"][1])


class TestContainer:
    def test_header_and_double_version(self):
        single = encode_tensors({"a": np.ones(2)}, Precision.SINGLE)
        double = encode_tensors({"a": np.ones(2)}, Precision.DOUBLE)
        assert single[:8] == b"SWNN" + struct.pack("<I", 1)
        assert double[:8] == b"SWNN" + struct.pack("<I", 2)
        assert len(double) - len(single) == 2 * 4

    def test_decoded_values_and_order(self):
        tensors = {"layers.1.weight": np.arange(6.0).reshape(2, 3), "layers.1.bias": np.array([0.5, -0.5, 2.0])}
        decoded = decode_tensors(encode_tensors(tensors, Precision.DOUBLE))
        assert list(decoded) == ["layers.1.weight", "layers.1.bias"]
        np.testing.assert_array_equal(decoded["layers.1.weight"], tensors["layers.1.weight"])
        assert decoded["layers.1.bias"].dtype == np.float64

    def test_bad_magic(self):
        with pytest.raises(DataFormatError) as exc:
            decode_tensors(b"NNWS" + struct.pack("<I", 1))
        assert exc.value.error_code == ErrorCode.BAD_MAGIC.value

    def test_truncated_payload(self):
        data = encode_tensors({"w": np.ones((4, 4))}, Precision.SINGLE)
        with pytest.raises(DataFormatError) as exc:
            decode_tensors(data[:-3])
        assert exc.value.error_code == ErrorCode.TRUNCATED_FILE.value

    def test_model_weights_survive_save_and_load(self, tmp_path):
        source = init_parameters(build_fcnn(ActivationKind.SWISHRELU), seed=3)
        path = save_model(tmp_path / "model.swnn", source)
        target = load_model(path, build_fcnn(ActivationKind.SWISHRELU))
        for (_, _, a), (_, _, b) in zip(source.parameters(), target.parameters()):
            np.testing.assert_array_equal(a, b)

    def test_load_into_other_architecture(self, tmp_path):
        path = save_model(tmp_path / "model.swnn", build_fcnn(ActivationKind.RELU))
        with pytest.raises(DataFormatError):
            load_model(path, build_fcnn(ActivationKind.RELU, hidden=(300,)))


class TestPgm:
    def test_header_and_payload(self):
        data = encode_pgm(np.array([[0, 10, 20], [30, 40, 255]], dtype=np.uint8))
        assert data.startswith(b"P5\n3 2\n255\n")
        assert data[-6:] == bytes([0, 10, 20, 30, 40, 255])
        assert decode_pgm_header(data) == (3, 2, 255)

    def test_min_max_normalisation(self):
        np.testing.assert_array_equal(normalize_channel(np.array([[-1.0, 0.0, 1.0]])), [[0, 128, 255]])

    def test_constant_channel_is_black(self):
        assert not normalize_channel(np.full((4, 4), 3.5)).any()

    def test_one_file_per_channel(self, tmp_path):
        maps = [(1, np.random.default_rng(0).random((2, 3, 4))), (4, np.zeros((1, 2, 2)))]
        paths = write_feature_maps(tmp_path, maps)
        assert [p.name for p in paths] == ["layer1_ch0.pgm", "layer1_ch1.pgm", "layer4_ch0.pgm"]
        assert decode_pgm_header(paths[0].read_bytes()) == (4, 3, 255)


class TestTemplateRenderer:
    def test_one_polyline_per_series(self):
        svg = TemplateRenderer().render_line_chart(
            "acc <a & b>",
            [Series("relu", [1, 2, 3], [0.5, 0.6, 0.7]), Series("swishrelu", [1, 2, 3], [0.55, 0.65, 0.8])],
            x_label="epoch",
            y_label="test_acc",
        )
        root = ET.fromstring(svg.encode("utf-8"))
        polylines = root.findall(f"{SVG}polyline")
        assert len(polylines) == 2
        assert all(len(p.get("points").split()) == 3 for p in polylines)
        assert root.find(f"{SVG}title").text == "acc <a & b>"

    def test_flat_series_still_renders(self):
        svg = TemplateRenderer().render_line_chart("flat", [Series("x", [1], [1.0])], x_label="x", y_label="y")
        assert ET.fromstring(svg.encode("utf-8")).find(f"{SVG}polyline") is not None


class TestRunDirectory:
    def test_writes_text_json_and_bytes(self, tmp_path, two_epochs):
        run = RunDirectory(tmp_path / "run")
        run.write_file("notes/a.txt", "x\ny\n")
        run.write_json_file("metrics.json", two_epochs[0])
        run.write_bytes("blob.bin", b"\x00\x01")
        assert (tmp_path / "run/notes/a.txt").read_bytes() == b"x\ny\n"
        assert json.loads(run.path("metrics.json").read_text())["epoch"] == 1
        assert run.path("blob.bin").read_bytes() == b"\x00\x01"
        assert run.create_dir("maps").is_dir()

    def test_default_run_dir_ends_with_seed(self, tmp_path):
        path = default_run_dir(7, tmp_path)
        assert path.parent == tmp_path
        assert path.name.endswith("-7")
