import json

import numpy as np
import pytest

from radonroi.index import (
    BarcodeConfig,
    BoundingBox,
    CaseRecord,
    IndexDatabase,
    bbox_from_mask,
    index_case,
    load_index,
    preprocess_image,
    save_index,
)

SMALL_CFG = BarcodeConfig(global_side=32, global_angles=8, roi_side=16, roi_angles=4)


def random_image(rng, rows=40, cols=48):
    return rng.integers(0, 256, size=(rows, cols), dtype=np.uint8)


class TestBoundingBox:
    def test_valid(self):
        box = BoundingBox(1, 2, 5, 9)
        assert box.width == 5 and box.height == 8
        assert box.area() == 40

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            BoundingBox(5, 0, 1, 9)

    def test_negative(self):
        with pytest.raises(ValueError):
            BoundingBox(-1, 0, 3, 3)

    def test_bounds_check(self):
        box = BoundingBox(0, 0, 10, 10)
        with pytest.raises(ValueError):
            box.validate_for(8, 20)

    def test_list_roundtrip(self):
        box = BoundingBox(3, 4, 7, 8)
        assert BoundingBox.from_list(box.as_list()) == box


class TestBboxFromMask:
    def test_single_pixel(self):
        mask = np.zeros((10, 10), dtype=np.uint8)
        mask[7, 3] = 1  # (x, y) = (3, 7)
        assert bbox_from_mask(mask) == BoundingBox(3, 7, 3, 7)

    def test_full_frame(self):
        assert bbox_from_mask(np.ones((10, 10))) == BoundingBox(0, 0, 9, 9)

    def test_two_pixels(self):
        mask = np.zeros((12, 12), dtype=np.uint8)
        mask[5, 2] = 1  # (x, y) = (2, 5)
        mask[1, 8] = 1  # (x, y) = (8, 1)
        assert bbox_from_mask(mask) == BoundingBox(2, 1, 8, 5)

    def test_empty_mask(self):
        with pytest.raises(ValueError, match="nonzero"):
            bbox_from_mask(np.zeros((5, 5)))


class TestConfig:
    def test_defaults_match_expected_bit_lengths(self):
        cfg = BarcodeConfig()
        assert cfg.global_bits == 8192
        assert cfg.roi_bits == 2048
        assert cfg.delta == 0.25
        assert cfg.top_m == 5

    def test_validation(self):
        with pytest.raises(ValueError):
            BarcodeConfig(delta=0.0)
        with pytest.raises(ValueError):
            BarcodeConfig(delta=0.6)
        with pytest.raises(ValueError):
            BarcodeConfig(stick_length=4)
        with pytest.raises(ValueError):
            BarcodeConfig(top_m=0)

    def test_dict_roundtrip(self):
        cfg = BarcodeConfig(beta=2.0, top_m=3, use_enhancement=False)
        assert BarcodeConfig.from_dict(cfg.to_dict()) == cfg


class TestIndexCase:
    def test_default_config_bit_lengths(self):
        rng = np.random.default_rng(10)
        rec = index_case("a", random_image(rng), BoundingBox(5, 5, 30, 25), BarcodeConfig())
        assert len(rec.global_code) == 8192
        assert len(rec.roi_code) == 2048

    def test_deterministic(self):
        rng = np.random.default_rng(11)
        img = random_image(rng)
        box = BoundingBox(2, 3, 20, 22)
        a = index_case("one", img, box, SMALL_CFG)
        b = index_case("two", img.copy(), box, SMALL_CFG)
        assert a.global_code == b.global_code
        assert a.roi_code == b.roi_code
        assert a.bbox == b.bbox

    def test_mask_equivalent_to_bbox(self):
        rng = np.random.default_rng(12)
        img = random_image(rng)
        mask = np.zeros(img.shape, dtype=np.uint8)
        mask[4:21, 3:17] = 1
        from_mask = index_case("m", img, mask, SMALL_CFG)
        from_box = index_case("b", img, bbox_from_mask(mask), SMALL_CFG)
        assert from_mask.bbox == from_box.bbox == BoundingBox(3, 4, 16, 20)
        assert from_mask.global_code == from_box.global_code
        assert from_mask.roi_code == from_box.roi_code

    def test_one_pixel_wide_box(self):
        rng = np.random.default_rng(13)
        img = random_image(rng)
        rec = index_case("thin", img, BoundingBox(7, 2, 7, 30), SMALL_CFG)
        assert len(rec.roi_code) == SMALL_CFG.roi_bits

    def test_box_out_of_bounds(self):
        rng = np.random.default_rng(14)
        with pytest.raises(ValueError, match="exceeds"):
            index_case("bad", random_image(rng, 20, 20), BoundingBox(0, 0, 25, 25), SMALL_CFG)

    def test_enhancement_flag_changes_codes(self):
        rng = np.random.default_rng(15)
        img = random_image(rng)
        raw_cfg = BarcodeConfig(
            global_side=32, global_angles=8, roi_side=16, roi_angles=4, use_enhancement=False
        )
        np.testing.assert_array_equal(preprocess_image(img, raw_cfg), img)
        enhanced = index_case("e", img, BoundingBox(2, 2, 30, 30), SMALL_CFG)
        raw = index_case("r", img, BoundingBox(2, 2, 30, 30), raw_cfg)
        assert enhanced.global_code != raw.global_code


class TestPersistence:
    def build_db(self, n=3):
        rng = np.random.default_rng(20)
        records = [
            index_case(f"case_{i}", random_image(rng), BoundingBox(1 + i, 2, 20, 25), SMALL_CFG)
            for i in range(n)
        ]
        return IndexDatabase(config=SMALL_CFG, cases=tuple(records))

    def test_empty_roundtrip(self, tmp_path):
        db = IndexDatabase(config=SMALL_CFG)
        path = tmp_path / "empty.json"
        save_index(db, path)
        loaded = load_index(path)
        assert loaded.config == SMALL_CFG
        assert len(loaded) == 0

    def test_roundtrip_bit_exact(self, tmp_path):
        db = self.build_db()
        path = tmp_path / "idx.json"
        save_index(db, path)
        loaded = load_index(path)
        assert loaded.config == db.config
        assert len(loaded) == len(db)
        for got, want in zip(loaded.cases, db.cases):
            assert got.case_id == want.case_id
            assert got.bbox == want.bbox
            assert (got.height, got.width) == (want.height, want.width)
            assert got.global_code == want.global_code
            assert got.roi_code == want.roi_code

    def test_corrupted_barcode_length_names_case(self, tmp_path):
        db = self.build_db()
        path = tmp_path / "idx.json"
        save_index(db, path)
        doc = json.loads(path.read_text())
        doc["cases"][1]["global_code"] = doc["cases"][1]["global_code"][:-5]
        path.write_text(json.dumps(doc))
        with pytest.raises(ValueError, match="case_1"):
            load_index(path)

    def test_duplicate_ids_rejected(self, tmp_path):
        db = self.build_db()
        path = tmp_path / "idx.json"
        save_index(db, path)
        doc = json.loads(path.read_text())
        doc["cases"][1]["case_id"] = doc["cases"][0]["case_id"]
        path.write_text(json.dumps(doc))
        with pytest.raises(ValueError, match="duplicate"):
            load_index(path)

    def test_version_mismatch(self, tmp_path):
        db = self.build_db(1)
        path = tmp_path / "idx.json"
        save_index(db, path)
        doc = json.loads(path.read_text())
        doc["format_version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(ValueError, match="format_version"):
            load_index(path)

    def test_bad_bbox_rejected_on_load(self, tmp_path):
        db = self.build_db(1)
        path = tmp_path / "idx.json"
        save_index(db, path)
        doc = json.loads(path.read_text())
        doc["cases"][0]["bbox"] = [0, 0, 500, 500]
        path.write_text(json.dumps(doc))
        with pytest.raises(ValueError):
            load_index(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_index(tmp_path / "missing.json")

    def test_not_json(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("{{{{")
        with pytest.raises(ValueError, match="JSON"):
            load_index(path)
