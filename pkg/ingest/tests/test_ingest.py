"""Tests for the ingest converters.

Synthetic source files are generated with the fixture writers; emitted
manifests and payloads are verified by loading them back through the
training pipeline's loaders (the external-interface contract).
"""

import numpy as np
import pytest
from scipy.io import savemat

from ecgingest import canonical, cli, wfdb
from ecgingest.challenge import convert_challenge_set
from ecgingest.database import convert_annotated_db
from ecgingest.segment import (RHYTHM_CLASS, UnknownRhythmError,
                               rhythm_class, segment_record)

# external-interface check: the primary package reads what ingest writes
from ecgcrnn import data as primary_data

from wfdb_fixtures import (write_annotations, write_header,
                           write_signal_16, write_signal_212)


class TestChallengeConverter:
    @pytest.fixture
    def source(self, tmp_path):
        src = tmp_path / "src"
        src.mkdir()
        rng = np.random.default_rng(0)
        rows = []
        for name, code in (("A00001", "N"), ("A00002", "A"),
                           ("A00003", "O"), ("A00004", "~")):
            savemat(src / f"{name}.mat",
                    {"val": (rng.standard_normal(9000) * 500).astype(np.int16)})
            rows.append(f"{name},{code}")
        # one corrupt and one missing record, both labeled
        (src / "A00005.mat").write_bytes(b"not a mat file")
        rows += ["A00005,N", "A00006,N"]
        (src / "REFERENCE.csv").write_text("\n".join(rows) + "\n")
        return src

    def test_labels_and_skips(self, source, tmp_path):
        out = tmp_path / "out"
        records, skipped = convert_challenge_set(source, out)
        assert skipped == 2
        labels = {r.record_id: r.label for r in records}
        assert labels == {"A00001": "normal", "A00002": "afib",
                          "A00003": "other", "A00004": "noise"}
        assert all(r.subject_id == r.record_id for r in records)
        assert all(r.fs == 300.0 for r in records)

    def test_round_trip_through_primary_loader(self, source, tmp_path):
        out = tmp_path / "out"
        convert_challenge_set(source, out)
        loaded = primary_data.load_manifest(out / "manifest.jsonl")
        assert len(loaded) == 4
        for meta in loaded:
            sig = primary_data.load_signal(meta, out)  # checksum verified
            assert sig.samples.size == meta.n_samples == 9000

    def test_unknown_label_code_is_hard_error(self, tmp_path):
        src = tmp_path / "src"
        src.mkdir()
        (src / "REFERENCE.csv").write_text("A00001,X\n")
        with pytest.raises(ValueError, match="unknown label"):
            convert_challenge_set(src, tmp_path / "out")


class TestWfdbReaders:
    def test_format_212_round_trip(self, tmp_path, rng=np.random.default_rng(1)):
        # stored value adc + baseline must stay within the signed 12-bit range
        adc = rng.integers(-2048, 1024, (501, 2))
        write_header(tmp_path / "r1.hea", "r1", 360, 501, 212,
                     gain=200, baseline=1024)
        write_signal_212(tmp_path / "r1.dat", adc + 1024)
        header = wfdb.read_header(tmp_path / "r1.hea")
        assert header.fs == 360 and header.n_samples == 501
        assert [s.name for s in header.signals] == ["MLII", "V5"]
        phys = wfdb.read_signals(header, tmp_path)
        np.testing.assert_allclose(phys, adc / 200.0)

    def test_format_16_round_trip(self, tmp_path, rng=np.random.default_rng(2)):
        adc = rng.integers(-30000, 30000, (400, 2))
        write_header(tmp_path / "r2.hea", "r2", 128, 400, 16,
                     gain=100, baseline=0)
        write_signal_16(tmp_path / "r2.dat", adc)
        phys = wfdb.read_signals(wfdb.read_header(tmp_path / "r2.hea"), tmp_path)
        np.testing.assert_allclose(phys, adc / 100.0)

    def test_unsupported_format_rejected(self, tmp_path):
        write_header(tmp_path / "r3.hea", "r3", 250, 100, 8)
        (tmp_path / "r3.dat").write_bytes(b"\x00" * 300)
        with pytest.raises(wfdb.FormatError, match="format 8"):
            wfdb.read_signals(wfdb.read_header(tmp_path / "r3.hea"), tmp_path)

    def test_annotations_round_trip_with_long_gaps(self, tmp_path):
        events = [(0, "(N"), (900, "(AFIB"), (500_000, "(N"), (2_000_000, "(VT")]
        write_annotations(tmp_path / "r.atr", events)
        anns = wfdb.read_rhythm_annotations(tmp_path / "r.atr")
        assert [(a.sample, a.rhythm) for a in anns] == events


class TestSegmentation:
    FS = 250.0
    SEG = int(30 * FS)

    def _ann(self, *pairs):
        return [wfdb.RhythmAnnotation(s, r) for s, r in pairs]

    def test_uniform_rhythm_all_segments_kept(self):
        x = np.zeros((self.SEG * 20 + 17, 2))
        segs = segment_record(x, self.FS, self._ann((0, "(AFIB")))
        assert len(segs) == 20
        assert all(s.label == "afib" for s in segs)
        assert all(s.samples.shape == (self.SEG, 2) for s in segs)  # exactly 30 s

    def test_transition_inside_segment_discards_it(self):
        x = np.zeros((self.SEG * 3, 2))
        mid = self.SEG + self.SEG // 2  # inside segment 1
        segs = segment_record(x, self.FS, self._ann((0, "(N"), (mid, "(AFIB")))
        assert [s.index for s in segs] == [0, 2]
        assert [s.label for s in segs] == ["normal", "afib"]

    def test_transition_on_boundary_keeps_both(self):
        x = np.zeros((self.SEG * 2, 2))
        segs = segment_record(x, self.FS, self._ann((0, "(N"), (self.SEG, "(AFIB")))
        assert [(s.index, s.label) for s in segs] == [(0, "normal"), (1, "afib")]

    def test_no_annotations_zero_segments(self):
        assert segment_record(np.zeros((self.SEG * 4, 2)), self.FS, []) == []

    def test_rhythm_undefined_before_first_annotation(self):
        x = np.zeros((self.SEG * 2, 2))
        segs = segment_record(x, self.FS, self._ann((self.SEG, "(N")))
        assert [s.index for s in segs] == [1]

    def test_class_map_totality_and_unknown_error(self):
        assert rhythm_class("(N") == "normal"
        assert rhythm_class("(AFIB") == "afib"
        others = [k for k, v in RHYTHM_CLASS.items() if v == "other"]
        assert len(others) >= 14
        assert all(rhythm_class(k) == "other" for k in others)
        with pytest.raises(UnknownRhythmError):
            rhythm_class("(ZZZ")

    def test_exclude_class(self):
        x = np.zeros((self.SEG * 2, 2))
        segs = segment_record(x, self.FS,
                              self._ann((0, "(B"), (self.SEG, "(AFIB")),
                              exclude="other")
        assert [(s.index, s.label) for s in segs] == [(1, "afib")]


class TestDatabaseConverter:
    @pytest.fixture
    def source(self, tmp_path):
        """Two records at 250 Hz: r1 with a rhythm change, r2 uniform."""
        src = tmp_path / "afdb"
        src.mkdir()
        fs, seg = 250, int(30 * 250)
        rng = np.random.default_rng(3)
        for name, events, n_segs in (
                ("r1", [(0, "(N"), (seg + 100, "(AFIB")], 3),
                ("r2", [(0, "(SVTA")], 2)):
            n = seg * n_segs
            adc = rng.integers(-2048, 1024, (n, 2)) + 1024
            write_header(src / f"{name}.hea", name, fs, n, 212)
            write_signal_212(src / f"{name}.dat", adc)
            write_annotations(src / f"{name}.atr", events)
        (src / "RECORDS").write_text("r1\nr2\n")
        return src

    def test_two_leads_per_kept_segment(self, source, tmp_path):
        out = tmp_path / "out"
        records, skipped = convert_annotated_db(source, out, "afdb")
        assert skipped == 0
        # r1: segment 1 has the transition -> segments 0 and 2 kept; r2: both
        by_seg = {}
        for r in records:
            by_seg.setdefault(r.record_id.rsplit("_", 1)[0], []).append(r)
        assert sorted(by_seg) == ["r1_s00000", "r1_s00002",
                                  "r2_s00000", "r2_s00001"]
        for group in by_seg.values():
            assert sorted(r.lead for r in group) == ["MLII", "V5"]
        assert all(r.subject_id in ("r1", "r2") for r in records)

    def test_payloads_load_through_primary_loader(self, source, tmp_path):
        out = tmp_path / "out"
        convert_annotated_db(source, out, "afdb")
        loaded = primary_data.load_manifest(out / "manifest.jsonl")
        assert len(loaded) == 8
        for meta in loaded:
            sig = primary_data.load_signal(meta, out)  # checksum verified
            assert sig.samples.size == int(30 * meta.fs)  # exactly 30 s

    def test_cli_end_to_end(self, source, tmp_path, capsys):
        out = tmp_path / "out"
        rc = cli.main(["wfdb", str(source), str(out)])
        assert rc == 0
        assert "wrote 8 records" in capsys.readouterr().out
        assert primary_data.load_manifest(out / "manifest.jsonl")

    def test_cli_missing_source_exits_2(self, tmp_path, capsys):
        rc = cli.main(["wfdb", str(tmp_path / "nope"), str(tmp_path / "out")])
        assert rc == 2
        assert "data error" in capsys.readouterr().err

    def test_cli_exclude_binary_task(self, source, tmp_path):
        out = tmp_path / "out"
        rc = cli.main(["wfdb", str(source), str(out), "--exclude", "other"])
        assert rc == 0
        loaded = primary_data.load_manifest(out / "manifest.jsonl")
        assert {r.label for r in loaded} <= {"normal", "afib"}
        assert len(loaded) == 4  # r2's SVTA segments dropped


def test_canonical_record_rejects_unknown_class():
    with pytest.raises(ValueError, match="unknown class"):
        canonical.CanonicalRecord("r", "s", "db", "sinus", 250.0, 100, "r.bin")
