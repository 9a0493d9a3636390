from memplan import (
    Plan,
    Provenance,
    build_instance,
    render_plan,
    solve_bestfit,
)


def test_one_rect_per_block_with_peak_guide(worked_instance):
    svg = render_plan(worked_instance, solve_bestfit(worked_instance))
    assert svg.count("<title>block") == 3
    assert "peak 6" in svg
    assert "capacity 9" in svg
    assert svg.startswith("<svg ")
    assert svg.rstrip().endswith("</svg>")


def test_empty_plan_renders_axes_only():
    inst = build_instance([])
    svg = render_plan(inst, Plan({}, 0, Provenance.BESTFIT))
    assert "<title>block" not in svg
    assert "<line" in svg  # axes are still drawn


def test_violations_get_distinct_style(worked_instance):
    bad = Plan({1: 0, 2: 0, 3: 2}, peak=5, provenance=Provenance.BESTFIT)
    svg = render_plan(worked_instance, bad)
    assert svg.count("#e15759") == 2  # both blocks of the colliding pair


def test_far_capacity_noted_off_scale():
    inst = build_instance([(2, 0, 2), (2, 1, 3)], capacity=1000)
    svg = render_plan(inst, solve_bestfit(inst))
    assert "off scale" in svg


def test_deterministic(worked_instance):
    plan = solve_bestfit(worked_instance)
    assert render_plan(worked_instance, plan) == render_plan(worked_instance, plan)
