import pytest

from defzeta.precision import (
    HodgeSlopes,
    build_plan,
    chi_coeff_precision,
    delta_bound,
    frobenius_precision,
    ladder_precisions,
)

from helpers import K3_EXPONENTS, QUINTIC_EXPONENTS


def test_delta_examples():
    assert delta_bound(3, 2) == 2
    assert delta_bound(2, 5) == 0
    for p in (5, 7, 11):
        assert delta_bound(3, p) == 0  # p >= n
    assert delta_bound(4, 3) > 0


def test_hodge_slopes_k3_and_curve():
    g = HodgeSlopes((1, 19, 1))
    assert [g.value(x) for x in (0, 1, 2, 20, 21)] == [0, 0, 1, 19, 21]
    gc = HodgeSlopes((6, 6))
    assert gc.value(6) == 0
    assert gc.value(12) == 6
    assert gc.value(0) == 0
    # convexity
    vals = [g.value(x) for x in range(22)]
    diffs = [b - a for a, b in zip(vals, vals[1:])]
    assert diffs == sorted(diffs)


def test_chi_coeff_precision_examples():
    assert chi_coeff_precision(1, 21, 3, 20, 3) == 24
    assert chi_coeff_precision(6, 12, 7, 10, 2) == 31
    vals = [chi_coeff_precision(i, 21, 3, 20, 3) for i in range(1, 22)]
    assert vals == sorted(vals)


def test_frobenius_precision_paper_values():
    assert frobenius_precision(12, 7, 10, 2, (6, 6), 0, mode="half") == 31
    assert frobenius_precision(21, 3, 20, 3, (1, 19, 1), 0, mode="full") == 43
    assert frobenius_precision(21, 7, 1, 3, (1, 19, 1), 0, mode="full") == 4


def test_ladder_paper_values_quintic():
    lad = ladder_precisions(31, 1146, 0, 2, 7, 10, 12)
    assert lad["N_phi0"] == 38
    assert lad["N_C"] == 34
    assert lad["N_M"] == 44
    assert lad["Np_C"] == 43
    assert lad["Np_Cinv"] == 40
    # documented formula-vs-paper discrepancies stay within +2
    assert 35 <= lad["N_Cinv"] + 2 and lad["N_Cinv"] in (35, 36, 37)
    assert lad["Np_phi0"] in (39, 40, 41)
    assert lad["Np_M"] == 44


def test_ladder_paper_values_k3():
    lad = ladder_precisions(43, 599, 0, 3, 3, 20, 21)
    assert lad["N_phi0"] == 65
    assert lad["N_C"] == 53
    assert lad["N_Cinv"] == 55
    assert lad["N_M"] == 74
    assert lad["Np_C"] == 73
    assert lad["Np_Cinv"] == 68
    assert lad["Np_phi0"] in (67, 68, 69)
    assert lad["Np_M"] == 75


def test_plan_quintic_p7(quintic_family, quintic_connection):
    plan = build_plan(
        quintic_family, quintic_connection, a=10, exponents_cfg=QUINTIC_EXPONENTS
    )
    assert plan.delta == 0
    assert plan.N_phi == 31
    assert plan.K == 1146
    assert plan.theta_inf == 25
    finite = [d for d in plan.disks if d.ident != "inf"]
    assert all(d.theta in (0, 224) for d in finite)
    assert any(d.theta == 224 and d.method == "exponents" for d in finite)


def test_plan_k3_p3(k3_family, k3_connection):
    plan = build_plan(
        k3_family, k3_connection, a=20, exponents_cfg=K3_EXPONENTS,
        epsilon_mode="full",
    )
    assert plan.delta == 0
    assert plan.N_phi == 43
    assert plan.K == 599
    assert plan.theta_inf == 6
    thetas = sorted(d.theta for d in plan.disks if d.ident.startswith("f"))
    assert thetas == [148, 148, 148]


def test_gerkmann_h_value_example(k3_family):
    # p=7, N=4, n=3: the reduction bound exponent p(n+h)-n must be 67
    from defzeta.precision import _h_of_N

    h = _h_of_N(4, 7, 3)
    assert h == 7
    assert 7 * (3 + h) - 3 == 67


def test_exponent_theta_examples():
    from defzeta.precision import exponent_theta

    # K3 finite disks: exponents {-3/2,-1/2,0}, ord_p(M)=0, N=43
    th = exponent_theta(["-3/2", "-1/2", "0"], 0, 0, 21, 3, 3, 43)
    assert th == 148
    # quintic finite disks at p=7
    th2 = exponent_theta([-1, 0], 0, 0, 12, 2, 7, 31)
    assert th2 == 224
    # infinity with the basis-change corrections
    th_inf = exponent_theta(
        ["-2/3", "2/3", "1", "4/3", "7/3", "8/3", "13/3", "14/3"],
        0, 0, 12, 2, 7, 31, at_special=True, ord_z_W=-2, ord_z_Winv=-2,
    )
    assert th_inf == 25


def test_exponent_denominator_must_be_p_unit():
    from defzeta.precision import ExponentError, exponent_theta

    with pytest.raises(ExponentError):
        exponent_theta(["1/3"], 0, 0, 4, 2, 3, 10)


def test_truncation_monotone_and_manual_override(quintic_family, quintic_connection):
    plan_a = build_plan(
        quintic_family, quintic_connection, a=1, exponents_cfg=QUINTIC_EXPONENTS
    )
    plan_b = build_plan(
        quintic_family,
        quintic_connection,
        a=1,
        exponents_cfg=QUINTIC_EXPONENTS,
        manual_theta={"inf": plan_a.theta_inf + 5},
    )
    assert plan_b.K == plan_a.K + 5
    with pytest.raises(ValueError):
        build_plan(
            quintic_family,
            quintic_connection,
            a=1,
            exponents_cfg=QUINTIC_EXPONENTS,
            manual_theta={"inf": plan_a.theta_inf - 1},
        )


def test_override_may_only_increase(quintic_family, quintic_connection):
    plan = build_plan(
        quintic_family, quintic_connection, a=1, exponents_cfg=QUINTIC_EXPONENTS
    )
    up = build_plan(
        quintic_family,
        quintic_connection,
        a=1,
        exponents_cfg=QUINTIC_EXPONENTS,
        overrides={"N_phi": plan.N_phi + 3},
    )
    assert up.N_phi == plan.N_phi + 3
    with pytest.raises(ValueError):
        build_plan(
            quintic_family,
            quintic_connection,
            a=1,
            exponents_cfg=QUINTIC_EXPONENTS,
            overrides={"N_phi": plan.N_phi - 1},
        )


def test_plan_serialization_roundtrip(quintic_family, quintic_connection):
    import json

    plan = build_plan(
        quintic_family, quintic_connection, a=2, exponents_cfg=QUINTIC_EXPONENTS
    )
    blob = json.dumps(plan.as_dict(), sort_keys=True)
    assert json.loads(blob) == plan.as_dict()
