"""
Tests for metadata filtering, splitting and dataset assembly.
"""

from pathlib import Path

import pytest

from facadelens.exceptions import DuplicatePropertyError
from facadelens.models.labels import (
    BuildingStructure,
    FireproofClass,
    PropertyType,
    Split,
)
from facadelens.models.records import ImageRecord, PropertyRecord
from facadelens.repositories.jsonl_manifest import JsonlManifestRepository
from facadelens.services.ingest import (
    MISSING_VALUE,
    NON_RESIDENTIAL,
    ORPHAN_IMAGE,
    PRE_1915,
    corpus_statistics,
    drop_orphan_images,
    filter_metadata,
    label_images,
    split_properties,
)
from facadelens.use_cases.stages import (
    LABELED,
    MALFORMED_LINE,
    SPLIT,
    IngestUseCase,
    SplitUseCase,
)


def _record(
    property_id: str,
    year: int | None = 1995,
    structure: BuildingStructure | None = BuildingStructure.CONCRETE_LIKE,
    category: str | None = "apartment",
) -> PropertyRecord:
    return PropertyRecord(property_id, year, structure, category)


def _properties(n: int) -> list[PropertyRecord]:
    return [_record(f"p{i:06d}") for i in range(n)]


class TestFilterMetadata:
    """Test the metadata validity filters."""

    def test_valid_apartment_is_retained(self):
        """A complete 1995 apartment survives with derived labels."""
        retained, rejections = filter_metadata([_record("a")])

        assert rejections == []
        assert len(retained) == 1
        assert retained[0].ptype is PropertyType.COMMUNAL
        assert retained[0].fireproof is FireproofClass.M

    def test_pre_1915_is_rejected(self):
        """Year 1900 is dropped as pre_1915."""
        retained, rejections = filter_metadata([_record("old", year=1900)])

        assert retained == []
        assert rejections[0].item_id == "old"
        assert rejections[0].reason == PRE_1915

    def test_1915_is_kept(self):
        """The cut-off year itself is valid."""
        retained, _ = filter_metadata([_record("edge", year=1915)])
        assert [r.property_id for r in retained] == ["edge"]

    def test_office_is_rejected(self):
        """Non-residential categories are dropped."""
        _, rejections = filter_metadata([_record("office", category="Office")])
        assert rejections[0].reason == NON_RESIDENTIAL
        assert rejections[0].detail == "Office"

    def test_missing_values_name_the_fields(self):
        """One missing_value rejection listing every missing field."""
        _, rejections = filter_metadata([_record("m", year=None, structure=None)])

        assert len(rejections) == 1
        assert rejections[0].reason == MISSING_VALUE
        assert rejections[0].detail == "construction_year,structure"

    def test_first_failing_check_wins(self):
        """A pre-1915 office is reported once, as pre_1915."""
        _, rejections = filter_metadata([_record("x", year=1890, category="Office")])
        assert [r.reason for r in rejections] == [PRE_1915]

    def test_derived_labels_follow_rules(self):
        """Steel single-family houses are semi-fireproof."""
        retained, _ = filter_metadata(
            [_record("s", structure=BuildingStructure.STEEL_LIKE, category="house")]
        )
        assert retained[0].ptype is PropertyType.NON_COMMUNAL
        assert retained[0].fireproof is FireproofClass.T


class TestOrphanImages:
    """Test dropping images of rejected properties."""

    def test_orphans_are_dropped(self):
        """Images whose property is unknown are rejected."""
        images = [
            ImageRecord("i1", "a", Path("a.png")),
            ImageRecord("i2", "gone", Path("b.png")),
        ]
        kept, rejections = drop_orphan_images(images, [_record("a")])

        assert [i.image_id for i in kept] == ["i1"]
        assert rejections[0].reason == ORPHAN_IMAGE
        assert rejections[0].detail == "gone"


class TestSplitProperties:
    """Test the property-level train/test split."""

    def test_deterministic(self):
        """Same inputs give the same assignment."""
        records = _properties(200)
        assert (
            split_properties(records, 5).assignments
            == split_properties(records, 5).assignments
        )

    @pytest.mark.parametrize("seed", [0, 7])
    def test_realized_fraction(self, seed):
        """1,000 properties land within two points of 80% train."""
        assignment = split_properties(_properties(1000), seed, 0.8)

        n_train = len(assignment.ids(Split.TRAIN))
        assert 780 <= n_train <= 820
        assert assignment.realized_train_fraction == pytest.approx(0.8, abs=0.02)

    def test_partition(self):
        """Every property appears exactly once and splits are disjoint."""
        records = _properties(300)
        assignment = split_properties(records, 1)

        train, test = assignment.ids(Split.TRAIN), assignment.ids(Split.TEST)
        assert train.isdisjoint(test)
        assert train | test == {r.property_id for r in records}

    def test_adding_records_keeps_assignments(self):
        """Existing properties never move when the corpus grows."""
        small = split_properties(_properties(100), 9)
        large = split_properties(_properties(400), 9)
        for property_id, split in small.assignments.items():
            assert large.split_of(property_id) is split

    def test_duplicate_property_is_an_error(self):
        """Duplicate ids are a hard error."""
        with pytest.raises(DuplicatePropertyError):
            split_properties([_record("a"), _record("a")], 0)

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.5])
    def test_fraction_bounds(self, fraction):
        """The fraction must lie strictly between 0 and 1."""
        with pytest.raises(ValueError):
            split_properties(_properties(3), 0, fraction)


class TestLabelImages:
    """Test joining images with property labels."""

    def test_images_inherit_property_split(self):
        """Every image carries its property's split."""
        properties, _ = filter_metadata(_properties(50))
        images = [
            ImageRecord(f"{p.property_id}-{k}", p.property_id, Path(f"{k}.png"))
            for p in properties
            for k in range(3)
        ]
        assignment = split_properties(properties, 2)

        labeled = label_images(images, properties, assignment)

        assert len(labeled) == 150
        for item in labeled:
            assert item.split is assignment.split_of(item.property_id)

    def test_split_filter(self):
        """Only the requested split is returned."""
        properties, _ = filter_metadata(_properties(40))
        images = [ImageRecord(p.property_id, p.property_id, Path("x.png")) for p in properties]
        assignment = split_properties(properties, 4)

        test_only = label_images(images, properties, assignment, Split.TEST)

        assert {i.property_id for i in test_only} == assignment.ids(Split.TEST)

    def test_unlabeled_properties_are_skipped(self):
        """Records that were never filtered have no derived labels."""
        images = [ImageRecord("i", "a", Path("x.png"))]
        assert label_images(images, [_record("a")]) == []


class TestCorpusStatistics:
    """Test the corpus summary."""

    def test_counts_and_shares(self):
        """Decades and year shares are computed over retained records."""
        records, _ = filter_metadata(
            [
                _record("a", year=1965),
                _record("b", year=1968, category="house"),
                _record("c", year=2001),
                _record("d", year=2010, structure=BuildingStructure.WOODEN_LIKE),
            ]
        )
        stats = corpus_statistics(records)

        assert stats.n_properties == 4
        assert stats.decade_counts == {1960: 2, 2000: 1, 2010: 1}
        assert stats.share_from_2000 == pytest.approx(0.5)
        assert stats.share_before_1980 == pytest.approx(0.5)
        assert stats.fireproof_counts == {"H": 1, "M": 3}
        assert stats.ptype_counts == {"communal": 3, "non_communal": 1}


class TestIngestStages:
    """Test the ingest and split use cases on manifest files."""

    @pytest.fixture
    def repository(self):
        return JsonlManifestRepository()

    def test_malformed_lines_become_rejections(self, tmp_path, repository):
        """A malformed line is reported with its manifest and line number."""
        properties = tmp_path / "properties.jsonl"
        properties.write_text(
            '{"property_id": "a", "construction_year": 1990, "structure": "concrete_like", '
            '"category": "apartment"}\n'
            '{"property_id": "b", "structure": "concrete_like", "category": "apartment"}\n',
            encoding="utf-8",
        )
        images = tmp_path / "images.jsonl"
        images.write_text(
            '{"image_id": "a-0", "property_id": "a", "path": "a-0.png"}\n'
            '{"image_id": "b-0", "property_id": "b", "path": "b-0.png"}\n',
            encoding="utf-8",
        )

        result = IngestUseCase(repository).execute(properties, images, tmp_path / "out")

        assert result.n_properties == 1
        assert result.n_images == 1
        reasons = {(r.item_id, r.reason) for r in result.rejections}
        assert ("properties.jsonl:2", MALFORMED_LINE) in reasons
        assert ("b-0", ORPHAN_IMAGE) in reasons
        assert (tmp_path / "out" / "corpus_stats.json").exists()

    def test_split_rerun_is_byte_identical(self, tmp_path, repository):
        """1,000 properties with 1-5 images: clean partition, identical reruns."""
        properties, _ = filter_metadata(_properties(1000))
        images = [
            ImageRecord(f"{p.property_id}-{k}", p.property_id, tmp_path / "img.png")
            for i, p in enumerate(properties)
            for k in range(1 + i % 5)
        ]
        repository.save_properties(tmp_path / "properties.jsonl", properties)
        repository.save_images(tmp_path / "images.jsonl", images)

        use_case = SplitUseCase(repository)
        for name in ("run1", "run2"):
            use_case.execute(
                tmp_path / "properties.jsonl",
                tmp_path / "images.jsonl",
                tmp_path / name,
                seed=0,
                train_fraction=0.8,
            )

        for file_name in (SPLIT, LABELED):
            first = (tmp_path / "run1" / file_name).read_bytes()
            assert first == (tmp_path / "run2" / file_name).read_bytes()

        labeled = repository.load_labeled(tmp_path / "run1" / LABELED)
        train_ids = {i.property_id for i in labeled if i.split is Split.TRAIN}
        test_ids = {i.property_id for i in labeled if i.split is Split.TEST}
        assert train_ids.isdisjoint(test_ids)
        assert 780 <= len(train_ids) <= 820
