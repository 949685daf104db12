"""Products, powers, inversion, spectral indices, and model files."""

import json
import math
import random
from fractions import Fraction

import pytest

from qhofer import (
    ModelError,
    NotInvertibleError,
    NovikovElement,
    ParseError,
    QHElement,
    SphereClass,
    classical_product,
    exact_inverse,
    hbar,
    invert,
    load_model,
    model_blowup_cp2,
    model_cpn,
    model_from_dict,
    model_to_dict,
    nov_scale,
    power,
    power_walk,
    quantum_product,
    rationality_index,
    save_model,
    valuation,
    validate_model,
)
from qhofer.quantum_homology import ManifoldModel
from helpers import NINE_A2, Q_TEXT, random_qh

A2 = Fraction(1, 4)


@pytest.fixture(scope="module")
def m():
    return model_blowup_cp2(A2)


def basis(m):
    return (m.basis_element(name) for name in ("p", "E", "F", "1"))


class TestGoldenProducts:
    """The six degree-two and point-class products of the blown-up plane."""

    def test_p_p(self, m):
        p, E, F, one = basis(m)
        assert quantum_product(m, p, p) == m.element(
            "E * e^{-1*E + -1*F} + F * e^{-1*E + -1*F}"
        )

    def test_p_E(self, m):
        p, E, F, one = basis(m)
        expected = m.element("F * e^{-1*F}")
        assert quantum_product(m, E, p) == expected
        assert quantum_product(m, p, E) == expected

    def test_p_F(self, m):
        p, E, F, one = basis(m)
        assert quantum_product(m, p, F) == m.element("1 * 1 * e^{-1*E + -1*F}")

    def test_E_E(self, m):
        p, E, F, one = basis(m)
        assert quantum_product(m, E, E) == m.element(
            "-1 * p + E * e^{-1*E} + 1 * e^{-1*F}"
        )

    def test_E_F(self, m):
        p, E, F, one = basis(m)
        assert quantum_product(m, E, F) == m.element("p + -1 * E * e^{-1*E}")

    def test_F_F(self, m):
        p, E, F, one = basis(m)
        assert quantum_product(m, F, F) == m.element("E * e^{-1*E}")

    def test_independent_of_area(self):
        # The product table never sees a^2; only valuations do.
        m1, m2 = model_blowup_cp2(Fraction(1, 10)), model_blowup_cp2(Fraction(9, 10))
        for x in ("p", "E", "F"):
            for y in ("p", "E", "F"):
                a = quantum_product(m1, m1.basis_element(x), m1.basis_element(y))
                b = quantum_product(m2, m2.basis_element(x), m2.basis_element(y))
                assert a == b


class TestClassicalProduct:
    def test_cap_products(self, m):
        p, E, F, one = basis(m)
        assert classical_product(m, E, E) == -p
        assert classical_product(m, E, F) == p
        assert classical_product(m, F, F).is_zero()
        assert classical_product(m, p, F).is_zero()
        assert classical_product(m, p, p).is_zero()

    def test_unit_acts_trivially(self, m):
        one = m.unit()
        for name in ("p", "E", "F", "1"):
            x = m.basis_element(name)
            assert classical_product(m, one, x) == x
            assert quantum_product(m, one, x) == x

    def test_classical_is_zero_exponent_stratum(self, m):
        # On bare basis classes the cap product is exactly the zero-exponent
        # slice of the quantum product.
        zero = m.zero_class()
        for xn, _ in m.basis:
            for yn, _ in m.basis:
                x, y = m.basis_element(xn), m.basis_element(yn)
                full = quantum_product(m, x, y)
                sliced = QHElement(
                    {(i, B): q for (i, B), q in full.terms.items() if B == zero}
                )
                assert classical_product(m, x, y) == sliced


class TestRingAxioms:
    def test_commutative_associative(self, m):
        rng = random.Random(5)
        for _ in range(80):
            x, y, z = (random_qh(rng, m) for _ in range(3))
            assert quantum_product(m, x, y) == quantum_product(m, y, x)
            left = quantum_product(m, quantum_product(m, x, y), z)
            right = quantum_product(m, x, quantum_product(m, y, z))
            assert left == right

    def test_distributive(self, m):
        rng = random.Random(6)
        for _ in range(40):
            x, y, z = (random_qh(rng, m) for _ in range(3))
            lhs = quantum_product(m, x, y + z)
            rhs = quantum_product(m, x, y) + quantum_product(m, x, z)
            assert lhs == rhs

    def test_grading(self, m):
        for i, (xn, dx) in enumerate(m.basis):
            for yn, dy in m.basis:
                x, y = m.basis_element(xn), m.basis_element(yn)
                prod = quantum_product(m, x, y)
                if not prod.is_zero():
                    assert m.degree(prod) == dx + dy - m.dim
                cap = classical_product(m, x, y)
                if not cap.is_zero():
                    assert m.degree(cap) == dx + dy - m.dim

    def test_degree_rejects_mixed(self, m):
        x = m.basis_element("p") + m.basis_element("E")
        with pytest.raises(ValueError):
            m.degree(x)

    def test_scalar_action_and_misuse(self, m):
        x = m.basis_element("E")
        assert (2 * x - x) == x
        with pytest.raises(TypeError):
            x * x  # needs the model


class TestDeformationDepth:
    """The quantum correction sits at least hbar below the classical part."""

    def test_hbar_values(self):
        assert hbar(model_blowup_cp2(Fraction(1, 4))) == Fraction(1, 4)
        assert hbar(model_blowup_cp2(Fraction(1, 2))) == Fraction(1, 2)
        assert hbar(model_blowup_cp2(Fraction(2, 3))) == Fraction(1, 3)
        assert hbar(model_cpn(1)) == 1
        assert hbar(model_cpn(3, Fraction(2, 7))) == Fraction(2, 7)

    def test_hbar_infinite_without_curves(self):
        classical = ManifoldModel(
            name="surface",
            dim=2,
            sphere_generators=("A",),
            basis=(("pt", 0), ("1", 2)),
            pairing=((0, 1), (1, 0)),
            omega=(1,),
            c1=(1,),
            gw=[(("pt", "1", "1"), (0,), 1)],
        )
        assert hbar(classical) == math.inf

    def test_correction_bounded_by_hbar(self, m):
        rng = random.Random(9)
        h = hbar(m)
        for _ in range(100):
            x, y = random_qh(rng, m), random_qh(rng, m)
            diff = quantum_product(m, x, y) - classical_product(m, x, y)
            bound = valuation(x, m.omega) + valuation(y, m.omega) - h
            assert valuation(diff, m.omega) <= bound

    def test_rationality_index(self):
        assert rationality_index(model_blowup_cp2(Fraction(1, 4))) == Fraction(1, 4)
        assert rationality_index(model_blowup_cp2(Fraction(2, 5))) == Fraction(1, 5)
        assert rationality_index(model_cpn(2)) == 1
        assert rationality_index(model_cpn(2, Fraction(3, 4))) == Fraction(3, 4)


class TestPowers:
    def test_golden_positive_powers(self, m):
        q = m.element(Q_TEXT)
        assert power(m, q, 2) == m.element("E * e^{1/2*F}")
        assert power(m, q, 3) == m.element(
            "p * e^{1/2*E + 3/4*F} + -1 * E * e^{-1/2*E + 3/4*F}"
        )
        assert power(m, q, 4) == m.element(
            "-1 * p * e^{1*F} + E * e^{-1*E + 1*F} + 1"
        )
        assert power(m, q, 5) == m.element(
            "p * e^{-1/2*E + 5/4*F} + -1 * E * e^{-3/2*E + 5/4*F}"
            " + F * e^{1/2*E + 1/4*F} + -1 * 1 * e^{-1/2*E + 1/4*F}"
        )

    def test_golden_negative_powers(self, m):
        q = m.element(Q_TEXT)
        assert power(m, q, -1) == m.element("p * e^{1/2*E + 3/4*F}")
        assert power(m, q, -2) == m.element("E * e^{1/2*F} + F * e^{1/2*F}")
        assert power(m, q, -3) == m.element(
            "F * e^{1/2*E + 1/4*F} + 1 * e^{-1/2*E + 1/4*F}"
        )
        assert power(m, q, -4) == m.element("p * e^{1*F} + 1")

    def test_power_zero_is_unit(self, m):
        q = m.element(Q_TEXT)
        assert power(m, q, 0) == m.unit()

    def test_power_additivity(self, m):
        q = m.element(Q_TEXT)
        cache = {k: power(m, q, k) for k in range(-6, 7)}
        for j in range(-3, 4):
            for k in range(-3, 4):
                assert quantum_product(m, cache[j], cache[k]) == cache[j + k]

    def test_power_walk_matches_power(self, m):
        q = m.element(Q_TEXT)
        for k, x in power_walk(m, q, 8):
            assert x == power(m, q, k)

    def test_negative_power_needs_exact_inverse(self, m):
        x = m.unit() + m.basis_element("p")
        with pytest.raises(NotInvertibleError):
            power(m, x, -1)


class TestInversion:
    def test_monomial_inverse_is_exact(self, m):
        q = m.element(Q_TEXT)
        z = invert(m, q)
        assert quantum_product(m, q, z) == m.unit()
        assert z == m.element("p * e^{1/2*E + 3/4*F}")

    def test_square_inverse_matches_golden(self, m):
        q2 = m.element("E * e^{1/2*F}")
        z = exact_inverse(m, q2)
        assert z == m.element("E * e^{1/2*F} + F * e^{1/2*F}")

    def test_unit_inverts_to_itself(self, m):
        assert exact_inverse(m, m.unit()) == m.unit()

    def test_scaled_unit(self, m):
        x = -3 * m.basis_element("1", SphereClass((1, 2)))
        z = exact_inverse(m, x)
        assert z == Fraction(-1, 3) * m.basis_element("1", SphereClass((-1, -2)))

    def test_truncated_inverse_residual_below_floor(self, m):
        x = m.unit() + m.basis_element("p")
        floor = Fraction(-6)
        z = invert(m, x, floor)
        assert all(m.omega(B) >= floor for B in z.support_classes())
        residual = quantum_product(m, x, z) - m.unit()
        assert not residual.is_zero()
        assert valuation(residual, m.omega) < floor

    def test_floor_controls_depth(self, m):
        x = m.unit() + m.basis_element("p")
        shallow = invert(m, x, Fraction(-3))
        deep = invert(m, x, Fraction(-9))
        assert len(shallow) < len(deep)
        # The shallow truncation is exactly the deep one with terms dropped.
        for (i, B), q in shallow.terms.items():
            assert deep.coefficient(i, B) == q

    def test_floor_accepts_plain_rationals(self, m):
        x = m.unit() + m.basis_element("p")
        assert invert(m, x, -3) == invert(m, x, "-3")

    def test_zero_not_invertible(self, m):
        with pytest.raises(NotInvertibleError):
            invert(m, QHElement())

    def test_tied_leading_terms_rejected(self):
        m2 = model_blowup_cp2(Fraction(1, 2))
        x = m2.element("1 * e^{1*E} + -1 * 1 * e^{1*F}")
        with pytest.raises(NotInvertibleError, match="leading"):
            invert(m2, x)

    def test_zero_divisor_rejected(self):
        c1 = model_cpn(1)
        x = c1.element("x + -1 * 1 * e^{-1/2*L}")
        with pytest.raises(NotInvertibleError, match="singular"):
            invert(c1, x)

    def test_random_invertible_elements_verify(self, m):
        rng = random.Random(21)
        floor = Fraction(-6)
        hits = 0
        for _ in range(300):
            if hits >= 15:
                break
            x = random_qh(rng, m, max_terms=2)
            try:
                z = invert(m, x, floor)
            except NotInvertibleError:
                continue
            hits += 1
            residual = quantum_product(m, x, z) - m.unit()
            if not residual.is_zero():
                vx = valuation(x, m.omega)
                slack = vx if vx > 0 else Fraction(0)
                assert valuation(residual, m.omega) < floor + slack
        assert hits >= 15


class TestProjectiveSpace:
    def test_hyperplane_relation(self):
        for n in range(1, 5):
            mn = model_cpn(n)
            x = mn.basis_element("x")
            expected = mn.basis_element("1", SphereClass((-1,)))
            assert power(mn, x, n + 1) == expected

    def test_classical_truncation(self):
        m2 = model_cpn(2)
        x = m2.basis_element("x")
        assert classical_product(m2, x, x) == m2.basis_element("x^2")
        assert classical_product(m2, x, m2.basis_element("x^2")).is_zero()

    def test_quantum_wraparound(self):
        m2 = model_cpn(2)
        x2 = m2.basis_element("x^2")
        assert quantum_product(m2, x2, x2) == m2.basis_element("x", SphereClass((-1,)))

    def test_line_area_scales_valuations(self):
        m2 = model_cpn(2, Fraction(1, 3))
        x = m2.basis_element("x")
        assert valuation(power(m2, x, 3), m2.omega) == Fraction(-1, 3)

    def test_hyperplane_is_invertible(self):
        m3 = model_cpn(3)
        x = m3.basis_element("x")
        z = exact_inverse(m3, x)
        assert quantum_product(m3, x, z) == m3.unit()

    def test_dimension_validated(self):
        with pytest.raises(ValueError):
            model_cpn(0)
        with pytest.raises(ValueError):
            model_cpn(2, 0)


class TestModelValidation:
    def test_builtins_are_clean(self):
        assert validate_model(model_blowup_cp2(Fraction(1, 3))) == []
        assert validate_model(model_cpn(3)) == []

    def test_blowup_area_domain(self):
        for bad in (0, 1, Fraction(6, 5), -1):
            with pytest.raises(ValueError):
                model_blowup_cp2(bad)

    def test_gw_symmetry_enforced(self, m):
        entries = [(("E", "E", "F"), (1, 0), 1), (("F", "E", "E"), (1, 0), -1)]
        with pytest.raises(ModelError, match="conflicting"):
            ManifoldModel(
                name="bad",
                dim=4,
                sphere_generators=("E", "F"),
                basis=m.basis,
                pairing=m.pairing,
                omega=(A2, 1 - A2),
                c1=(1, 2),
                gw=list_golden_gw() + entries,
            )

    def test_gw_lookup_symmetric(self, m):
        e_class = SphereClass((1, 0))
        assert m.gw_value("E", "E", "F", e_class) == 1
        assert m.gw_value("F", "E", "E", e_class) == 1
        assert m.gw_value("E", "F", "E", e_class) == 1
        assert m.gw_value("E", "E", "E", e_class) == -1
        assert m.gw_value("F", "F", "F", e_class) == 1
        assert m.gw_value("p", "p", "p", e_class) == 0

    def test_validation_catches_broken_tables(self, m):
        data = model_to_dict(m)

        asym = json.loads(json.dumps(data))
        asym["pairing"][0][3] = "2"
        with pytest.raises(ModelError, match="symmetric"):
            model_from_dict(asym)

        wrong_dim = json.loads(json.dumps(data))
        wrong_dim["gw"][0]["B"] = ["3", "3"]
        with pytest.raises(ModelError, match="dimension rule"):
            model_from_dict(wrong_dim)

        negative_area = json.loads(json.dumps(data))
        negative_area["omega"] = ["-1/4", "3/4"]
        with pytest.raises(ModelError, match="positive area"):
            model_from_dict(negative_area)

        missing = json.loads(json.dumps(data))
        missing["gw"] = [row for row in missing["gw"] if row["classes"] != ["p", "1", "1"]]
        with pytest.raises(ModelError, match="missing classical entry"):
            model_from_dict(missing)

    def test_malformed_data_rejected(self):
        with pytest.raises(ModelError, match="malformed"):
            model_from_dict({"name": "x"})


def list_golden_gw():
    m = model_blowup_cp2(Fraction(1, 4))
    return [
        (idx, B, value) for (idx, B), value in m.gw.items()
    ]


class TestModelFiles:
    def test_dict_roundtrip(self, m):
        again = model_from_dict(model_to_dict(m))
        assert again.gw == m.gw
        assert again.pairing == m.pairing
        assert again.omega.values == m.omega.values
        assert again.basis == m.basis

    def test_file_roundtrip(self, tmp_path):
        m2 = model_cpn(2, Fraction(2, 3))
        path = tmp_path / "cp2.json"
        save_model(m2, path)
        again = load_model(path)
        assert again.gw == m2.gw
        assert again.omega.values == m2.omega.values

    def test_rationals_stored_as_strings(self, m):
        data = model_to_dict(m)
        assert data["omega"] == ["1/4", "3/4"]
        assert all(isinstance(v, str) for row in data["pairing"] for v in row)


class TestElementText:
    def test_golden_string(self, m):
        x = quantum_product(m, m.basis_element("E"), m.basis_element("F"))
        assert m.format(x) == "1 * p + -1 * E * e^{-1*E}"
        assert m.element("1 * p + -1 * E * e^{-1*E}") == x

    def test_unit_and_scalars(self, m):
        assert m.element("1") == m.unit()
        assert m.element("2 * 1") == 2 * m.unit()
        assert m.element("0").is_zero()
        assert m.format(m.unit()) == "1 * 1"

    def test_roundtrip_random(self, m):
        rng = random.Random(23)
        for _ in range(150):
            x = random_qh(rng, m, max_terms=4)
            assert m.element(m.format(x)) == x

    def test_cpn_roundtrip(self):
        m3 = model_cpn(3)
        x = m3.element("x^2 * e^{-1*L} + 5 * x")
        assert m3.element(m3.format(x)) == x

    @pytest.mark.parametrize(
        "bad",
        [
            "q",                      # unknown basis class
            "2 * 3 * p",              # two coefficients
            "p * e^{0} * e^{0}",      # two exponentials
            "",                       # empty
        ],
    )
    def test_parse_errors(self, bad, m):
        with pytest.raises(ParseError):
            m.element(bad)
