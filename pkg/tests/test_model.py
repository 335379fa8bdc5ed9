"""Domain model: specs, validation, transaction counting, and clamping."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ucpoints.model import (
    MAX_TRANSACTION_LEVEL,
    MIN_TRANSACTION_LEVEL,
    ActorSpec,
    ClampWarning,
    FactorRatings,
    ProjectSpec,
    Scenario,
    TransactionPolicy,
    UseCaseSpec,
    ValidationError,
    count_transactions,
    effective_transactions,
)


class TestTransactionPolicy:
    def test_karner_counts_extensions_in_full(self):
        assert TransactionPolicy.karner().extension_weight == 1.0

    def test_discounted_weight(self):
        assert TransactionPolicy.discounted().extension_weight == 0.3

    @pytest.mark.parametrize("weight", [-0.1, 1.0000001, 5.0])
    def test_weight_outside_unit_interval_rejected(self, weight):
        with pytest.raises(ValidationError):
            TransactionPolicy(extension_weight=weight)

    def test_weight_must_be_finite(self):
        with pytest.raises(ValidationError):
            TransactionPolicy(extension_weight=float("nan"))


class TestScenario:
    def test_valid(self):
        s = Scenario(main_steps=7, extension_steps=8)
        assert (s.main_steps, s.extension_steps) == (7, 8)

    def test_main_steps_must_be_positive(self):
        with pytest.raises(ValidationError):
            Scenario(main_steps=0, extension_steps=3)

    def test_extension_steps_may_be_zero(self):
        assert Scenario(main_steps=1, extension_steps=0).extension_steps == 0

    def test_negative_extensions_rejected(self):
        with pytest.raises(ValidationError):
            Scenario(main_steps=2, extension_steps=-1)

    @pytest.mark.parametrize("bad", [True, 2.0, "3"])
    def test_non_int_steps_rejected(self, bad):
        with pytest.raises(ValidationError):
            Scenario(main_steps=bad, extension_steps=0)


class TestUseCaseSpec:
    def test_direct_transactions(self):
        uc = UseCaseSpec(name="u", transactions=4)
        assert uc.transactions == 4 and uc.scenario is None

    def test_scenario_form(self):
        uc = UseCaseSpec(name="u", scenario=Scenario(main_steps=3, extension_steps=1))
        assert uc.transactions is None

    def test_both_sources_rejected(self):
        with pytest.raises(ValidationError):
            UseCaseSpec(name="u", transactions=3, scenario=Scenario(main_steps=3, extension_steps=0))

    def test_neither_source_rejected(self):
        with pytest.raises(ValidationError):
            UseCaseSpec(name="u")

    @pytest.mark.parametrize("n", [0, -2])
    def test_transactions_must_be_positive(self, n):
        with pytest.raises(ValidationError):
            UseCaseSpec(name="u", transactions=n)

    def test_bool_transactions_rejected(self):
        with pytest.raises(ValidationError):
            UseCaseSpec(name="u", transactions=True)

    def test_unknown_relation_rejected(self):
        with pytest.raises(ValidationError):
            UseCaseSpec(name="u", transactions=2, relation="uses")

    def test_blank_name_rejected(self):
        with pytest.raises(ValidationError):
            UseCaseSpec(name="  ", transactions=2)


class TestActorSpec:
    @pytest.mark.parametrize("kind", ["simple", "average", "complex"])
    def test_valid_kinds(self, kind):
        assert ActorSpec(name="a", kind=kind).kind == kind

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            ActorSpec(name="a", kind="gui")


class TestFactorRatings:
    def test_nominal_is_all_threes(self):
        r = FactorRatings.nominal()
        assert r.technical == (3,) * 13 and r.environmental == (3,) * 8

    def test_wrong_technical_length(self):
        with pytest.raises(ValidationError):
            FactorRatings(technical=(3,) * 12, environmental=(3,) * 8)

    def test_wrong_environmental_length(self):
        with pytest.raises(ValidationError):
            FactorRatings(technical=(3,) * 13, environmental=(3,) * 9)

    @pytest.mark.parametrize("bad", [-1, 6])
    def test_out_of_range_rating_rejected(self, bad):
        env = (3, 3, bad, 3, 3, 3, 3, 3)
        with pytest.raises(ValidationError, match="environmental factor F3"):
            FactorRatings(technical=(3,) * 13, environmental=env)

    def test_error_names_technical_factor(self):
        tech = list((3,) * 13)
        tech[6] = 9
        with pytest.raises(ValidationError, match="technical factor F7"):
            FactorRatings(technical=tuple(tech), environmental=(3,) * 8)

    @pytest.mark.parametrize("bad", [True, 3.0])
    def test_non_int_rating_rejected(self, bad):
        with pytest.raises(ValidationError):
            FactorRatings(technical=(bad,) + (3,) * 12, environmental=(3,) * 8)

    def test_lists_are_coerced_to_tuples(self):
        r = FactorRatings(technical=[3] * 13, environmental=[3] * 8)
        assert isinstance(r.technical, tuple) and isinstance(r.environmental, tuple)


class TestProjectSpec:
    def test_minimal(self, make_project):
        p = make_project()
        assert p.id == "P" and len(p.use_cases) == 1 and len(p.actors) == 1

    def test_empty_use_cases_rejected(self):
        with pytest.raises(ValidationError):
            ProjectSpec(
                id="P",
                use_cases=(),
                actors=(ActorSpec(name="a", kind="simple"),),
                factors=FactorRatings.nominal(),
            )

    def test_empty_actors_rejected(self):
        with pytest.raises(ValidationError):
            ProjectSpec(
                id="P",
                use_cases=(UseCaseSpec(name="u", transactions=2),),
                actors=(),
                factors=FactorRatings.nominal(),
            )

    @pytest.mark.parametrize("field", ["actual_effort_ph", "actual_size_uucp"])
    def test_nonpositive_actuals_rejected(self, make_project, field):
        with pytest.raises(ValidationError):
            make_project(**{field: 0.0})

    def test_actuals_optional(self, make_project):
        p = make_project()
        assert p.actual_effort_ph is None and p.actual_size_uucp is None

    def test_blank_id_rejected(self, make_project):
        with pytest.raises(ValidationError):
            make_project(pid="")


class TestCountTransactions:
    def test_direct_count_ignores_policy(self):
        uc = UseCaseSpec(name="u", transactions=7)
        assert count_transactions(uc, TransactionPolicy.discounted()) == 7.0

    def test_scenario_full_weight_adds_all_extensions(self):
        uc = UseCaseSpec(name="u", scenario=Scenario(main_steps=7, extension_steps=8))
        assert count_transactions(uc, TransactionPolicy.karner()) == 15.0

    def test_scenario_discounted(self):
        uc = UseCaseSpec(name="u", scenario=Scenario(main_steps=7, extension_steps=8))
        assert math.isclose(count_transactions(uc, TransactionPolicy.discounted()), 9.4)

    def test_scenario_zero_weight_counts_main_only(self):
        uc = UseCaseSpec(name="u", scenario=Scenario(main_steps=7, extension_steps=8))
        assert count_transactions(uc, TransactionPolicy(extension_weight=0.0)) == 7.0


class TestEffectiveTransactions:
    def test_rounds_down_below_half(self):
        uc = UseCaseSpec(name="u", scenario=Scenario(main_steps=7, extension_steps=8))
        assert effective_transactions(uc, TransactionPolicy.discounted()) == 9

    def test_rounds_half_away_from_zero(self):
        # 9 + 0.5*1 = 9.5 must round to 10, not banker's 9 (round() would give 9).
        uc = UseCaseSpec(name="u", scenario=Scenario(main_steps=9, extension_steps=1))
        assert effective_transactions(uc, TransactionPolicy(extension_weight=0.5)) == 10

    def test_clamps_to_ceiling_with_warning(self):
        uc = UseCaseSpec(name="u", scenario=Scenario(main_steps=7, extension_steps=8))
        with pytest.warns(ClampWarning):
            assert effective_transactions(uc, TransactionPolicy.karner()) == MAX_TRANSACTION_LEVEL

    def test_exactly_ten_does_not_warn(self, recwarn):
        uc = UseCaseSpec(name="u", transactions=10)
        assert effective_transactions(uc, TransactionPolicy.karner()) == 10
        assert not [w for w in recwarn if issubclass(w.category, ClampWarning)]

    def test_direct_levels_pass_through(self):
        for n in range(1, 11):
            uc = UseCaseSpec(name="u", transactions=n)
            assert effective_transactions(uc, TransactionPolicy.karner()) == n

    @given(
        main=st.integers(min_value=1, max_value=40),
        ext=st.integers(min_value=0, max_value=40),
        weight=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    )
    def test_always_a_valid_level(self, main, ext, weight):
        import warnings

        uc = UseCaseSpec(name="u", scenario=Scenario(main_steps=main, extension_steps=ext))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ClampWarning)
            level = effective_transactions(uc, TransactionPolicy(extension_weight=weight))
        assert MIN_TRANSACTION_LEVEL <= level <= MAX_TRANSACTION_LEVEL
        assert isinstance(level, int)
