"""Tests for field description parsing and table-axiom validation."""

from pathlib import Path

import pytest

from bcinv.errors import IngestionError
from bcinv.fieldfile import load_field, parse_field_text
from bcinv.ideal_lattices import enumerate_primes, target_class_group

FIXTURES = Path(__file__).resolve().parent.parent / "fields"

TABLE_HEAD = """\
kind = table
name = sample
degree = 4
narrow_class_group = 2
prime_bound = 11
provenance = hand-written test data
"""


def table_text(*extra_lines):
    return TABLE_HEAD + "\n".join(extra_lines) + "\n"


class TestScalarKinds:
    def test_rational(self):
        spec = parse_field_text("kind = rational\n")
        assert spec.kind == "rational"

    def test_quadratic(self):
        spec = parse_field_text("# a comment\nkind = quadratic\nd = -5\n")
        assert spec.kind == "quadratic"
        assert spec.discriminant == -20

    def test_comments_and_spacing(self):
        spec = parse_field_text("\n\n  kind =   quadratic   # trailing\n\td=2\n")
        assert spec.discriminant == 8

    def test_missing_kind(self):
        with pytest.raises(IngestionError, match="kind"):
            parse_field_text("d = -5\n")

    def test_unknown_kind(self):
        with pytest.raises(IngestionError, match="unknown kind"):
            parse_field_text("kind = cubic\n")

    def test_line_without_equals(self):
        with pytest.raises(IngestionError) as exc:
            parse_field_text("kind = rational\nbare words\n")
        assert exc.value.line == 2

    def test_unknown_key_with_line(self):
        with pytest.raises(IngestionError) as exc:
            parse_field_text("kind = rational\ncolor = blue\n")
        assert exc.value.line == 2

    def test_duplicate_key(self):
        with pytest.raises(IngestionError, match="duplicate"):
            parse_field_text("kind = quadratic\nd = 2\nd = 3\n")

    def test_quadratic_needs_d(self):
        with pytest.raises(IngestionError, match="need d"):
            parse_field_text("kind = quadratic\n")

    def test_quadratic_rejects_table_keys(self):
        with pytest.raises(IngestionError, match="does not belong"):
            parse_field_text("kind = quadratic\nd = 2\ndegree = 8\n")

    def test_rational_rejects_extras(self):
        with pytest.raises(IngestionError, match="does not belong"):
            parse_field_text("kind = rational\nd = 2\n")

    def test_bad_d_value(self):
        with pytest.raises(IngestionError) as exc:
            parse_field_text("kind = quadratic\nd = 12\n")
        assert exc.value.line == 2
        with pytest.raises(IngestionError):
            parse_field_text("kind = quadratic\nd = 1\n")
        with pytest.raises(IngestionError, match="integer"):
            parse_field_text("kind = quadratic\nd = five\n")


class TestTableKind:
    def test_minimal_table(self):
        spec = parse_field_text(table_text("primes = 2:1:2:1, 2:1:2:0"))
        assert spec.kind == "table"
        assert spec.table.degree == 4
        assert spec.table.group_factors == (2,)
        assert len(spec.table.primes) == 2
        assert spec.table.relations == ()

    def test_trivial_group_spelling(self):
        text = (
            "kind = table\ndegree = 2\nnarrow_class_group = 1\nprime_bound = 5\n"
            "provenance = test\nprimes = 2:1:2:0, 3:1:2:0, 5:1:1:0, 5:1:1:0\n"
        )
        spec = parse_field_text(text)
        assert spec.table.group_factors == ()
        assert target_class_group(spec).order() == 1

    def test_relations_parse(self):
        spec = parse_field_text(
            table_text(
                "primes = 2:1:2:1, 2:1:2:1",
                "p1_relations = 2.0^2",
                "p1_relations = 2.0 * 2.1",
            )
        )
        assert spec.table.relations == (((2, 0, 2),), ((2, 0, 1), (2, 1, 1)))

    def test_missing_required_key(self):
        for key in ("degree", "narrow_class_group", "prime_bound", "provenance"):
            lines = [l for l in TABLE_HEAD.splitlines() if not l.startswith(key)]
            text = "\n".join(lines) + "\nprimes = 2:1:2:1, 2:1:2:0\n"
            with pytest.raises(IngestionError, match=key):
                parse_field_text(text)

    def test_no_primes(self):
        with pytest.raises(IngestionError, match="at least one prime"):
            parse_field_text(TABLE_HEAD)

    def test_sum_ef_must_match_degree(self):
        with pytest.raises(IngestionError, match=r"sum of e\*f is 6, not the degree 4, at p=7"):
            parse_field_text(
                table_text("primes = 2:1:2:1, 2:1:2:0", "primes = 7:1:2:0, 7:1:4:0")
            )

    def test_malformed_prime_entry(self):
        with pytest.raises(IngestionError, match="p:e:f:class_label") as exc:
            parse_field_text(table_text("primes = 2:1:2"))
        assert exc.value.line == 7

    def test_composite_prime(self):
        with pytest.raises(IngestionError, match="not a prime"):
            parse_field_text(table_text("primes = 9:1:4:0"))

    def test_nonpositive_e_or_f(self):
        with pytest.raises(IngestionError, match="positive"):
            parse_field_text(table_text("primes = 2:0:4:0"))

    def test_label_out_of_range(self):
        with pytest.raises(IngestionError, match="not reduced"):
            parse_field_text(table_text("primes = 2:1:2:2, 2:1:2:0"))

    def test_label_arity(self):
        with pytest.raises(IngestionError, match="coordinates"):
            parse_field_text(table_text("primes = 2:1:2:1.1, 2:1:2:0"))

    def test_labels_must_generate(self):
        with pytest.raises(IngestionError, match="generate"):
            parse_field_text(table_text("primes = 2:1:2:0, 2:1:2:0"))

    def test_prime_beyond_bound(self):
        with pytest.raises(IngestionError, match="prime_bound"):
            parse_field_text(table_text("primes = 2:1:2:1, 2:1:2:0", "primes = 13:1:4:0"))

    def test_factor_one_rejected(self):
        text = TABLE_HEAD.replace("narrow_class_group = 2", "narrow_class_group = 1, 2")
        with pytest.raises(IngestionError, match="trivial group"):
            parse_field_text(text + "primes = 2:1:2:1, 2:1:2:0\n")

    def test_divisibility_chain(self):
        text = TABLE_HEAD.replace("narrow_class_group = 2", "narrow_class_group = 2, 3")
        with pytest.raises(IngestionError, match="divisibility"):
            parse_field_text(text + "primes = 2:1:2:1.1, 2:1:2:0.0\n")

    def test_relation_nontrivial_class(self):
        with pytest.raises(IngestionError, match="nontrivial class") as exc:
            parse_field_text(table_text("primes = 2:1:2:1, 2:1:2:0", "p1_relations = 2.0"))
        assert exc.value.line == 8

    def test_relation_unknown_reference(self):
        with pytest.raises(IngestionError, match="undeclared"):
            parse_field_text(table_text("primes = 2:1:2:1, 2:1:2:0", "p1_relations = 3.0^2"))
        with pytest.raises(IngestionError, match="undeclared"):
            parse_field_text(table_text("primes = 2:1:2:1, 2:1:2:0", "p1_relations = 2.2"))

    def test_relation_bad_exponent(self):
        with pytest.raises(IngestionError, match="positive"):
            parse_field_text(table_text("primes = 2:1:2:1, 2:1:2:0", "p1_relations = 2.0^0"))

    def test_relation_malformed_term(self):
        with pytest.raises(IngestionError, match="p.i"):
            parse_field_text(table_text("primes = 2:1:2:1, 2:1:2:0", "p1_relations = 2^2"))

    def test_empty_provenance(self):
        text = TABLE_HEAD.replace("provenance = hand-written test data", "provenance =")
        with pytest.raises(IngestionError, match="provenance"):
            parse_field_text(text + "primes = 2:1:2:1, 2:1:2:0\n")


class TestFixtureFiles:
    def test_simple_fixtures(self):
        assert load_field(FIXTURES / "q.field").kind == "rational"
        assert load_field(FIXTURES / "q(-5).field").discriminant == -20
        assert load_field(FIXTURES / "q(2).field").discriminant == 8
        assert load_field(FIXTURES / "q(3).field").discriminant == 12

    def test_octic_pair(self):
        a = load_field(FIXTURES / "octic-a.field")
        b = load_field(FIXTURES / "octic-b.field")
        assert a.table.degree == b.table.degree == 8
        assert target_class_group(a).order() == 4
        assert target_class_group(b).order() == 2
        # entry for entry, the splitting data match
        assert [(t.p, t.e, t.f) for t in a.table.primes] == [
            (t.p, t.e, t.f) for t in b.table.primes
        ]
        norms_a = sorted(r.norm_int for r in enumerate_primes(a, 13))
        norms_b = sorted(r.norm_int for r in enumerate_primes(b, 13))
        assert norms_a == norms_b

    def test_missing_file(self):
        with pytest.raises(IngestionError, match="no such"):
            load_field(FIXTURES / "absent.field")

    def test_directory(self):
        with pytest.raises(IngestionError, match="directory"):
            load_field(FIXTURES)

    def test_name_defaults_to_stem(self, tmp_path):
        path = tmp_path / "mystery.field"
        path.write_text(TABLE_HEAD.replace("name = sample\n", "") + "primes = 2:1:2:1, 2:1:2:0\n")
        spec = load_field(path)
        assert spec.table.name == "mystery"

    def test_not_utf8(self, tmp_path):
        path = tmp_path / "bad.field"
        path.write_bytes(b"kind = rational\n\xff\xfe")
        with pytest.raises(IngestionError, match="UTF-8"):
            load_field(path)
