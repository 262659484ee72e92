"""Sanity checks for flip plans, flip-bias thresholds and bias rows."""
from __future__ import annotations

from src.tournament import w_closed_form
from thresholds.outputs import BiasRow, FlipPlan, KappaRow, ValidationIssue


def validate(row: KappaRow) -> list[ValidationIssue]:
    """Run all threshold checks on one ``kappa`` row.

    Parameters
    ----------
    row:
        A :class:`KappaRow` produced by :func:`thresholds.flip_bias.kappa_row`.

    Returns
    -------
    list[ValidationIssue]
        Zero or more warnings / errors sorted by severity.
    """
    issues: list[ValidationIssue] = []

    # 1. Closed-form upper threshold disagrees with the replay value
    if row.upper_delta != 0:
        issues.append(
            ValidationIssue(
                severity="warning",
                dimension="Upper Threshold",
                message=(
                    f"n={row.n}: closed form gives {row.kappa_upper_closed_form} flips, "
                    f"replay needs {row.kappa_upper_exact} (delta {row.upper_delta:+d})."
                ),
                threshold="delta = 0",
            )
        )

    # 2. Sandwich: lower <= upper <= total
    if row.kappa_lower_exact > row.kappa_upper_exact:
        issues.append(
            ValidationIssue(
                severity="error",
                dimension="Sandwich",
                message=(
                    f"n={row.n}: lower threshold {row.kappa_lower_exact} exceeds "
                    f"upper threshold {row.kappa_upper_exact}."
                ),
                threshold="lower <= upper",
            )
        )
    if row.kappa_upper_exact > row.total_flips:
        issues.append(
            ValidationIssue(
                severity="error",
                dimension="Sandwich",
                message=(
                    f"n={row.n}: upper threshold {row.kappa_upper_exact} exceeds the "
                    f"{row.total_flips} flips of the plan."
                ),
                threshold=f"<= {row.total_flips}",
            )
        )

    # 3. Block walk runs past the start of the plan (small n)
    if row.x > row.total_flips:
        issues.append(
            ValidationIssue(
                severity="warning",
                dimension="Block Walk",
                message=(
                    f"n={row.n}: block walk needs x={row.x} unflipped edges but the plan "
                    f"has only {row.total_flips}; the Maker criterion never holds."
                ),
                threshold=f"x <= {row.total_flips}",
            )
        )

    # 4. Block walk and replay disagree on the lower threshold
    elif row.kappa_lower_exact != row.total_flips - row.x:
        issues.append(
            ValidationIssue(
                severity="error",
                dimension="Block Walk",
                message=(
                    f"n={row.n}: replay lower threshold {row.kappa_lower_exact} but "
                    f"block walk gives {row.total_flips - row.x}."
                ),
                threshold="lower = total - x",
            )
        )

    issues.sort(key=lambda i: i.severity != "error")
    return issues


def validate_plan(plan: FlipPlan) -> list[ValidationIssue]:
    """Phase shape, flip total and triangle budget of a flip plan."""
    issues: list[ValidationIssue] = []
    n = plan.n

    # 1. Phase i must reduce by exactly 1, 2, ..., floor((n-i)/2)
    start = 0
    for i, length in enumerate(plan.phases, start=1):
        expected = list(range(1, (n - i) // 2 + 1))
        got = plan.deltas[start:start + length]
        if got != expected:
            issues.append(
                ValidationIssue(
                    severity="error",
                    dimension="Phase Shape",
                    message=f"n={n}, phase {i}: deltas {got}, expected {expected}.",
                    threshold=f"1..{(n - i) // 2}",
                )
            )
        start += length

    # 2. Flip total
    if plan.total != (n - 1) ** 2 // 4:
        issues.append(
            ValidationIssue(
                severity="error",
                dimension="Flip Total",
                message=f"n={n}: {plan.total} flips, expected {(n - 1) ** 2 // 4}.",
                threshold=f"{(n - 1) ** 2 // 4}",
            )
        )

    # 3. Every triangle removed exactly once
    if sum(plan.deltas) != w_closed_form(n):
        issues.append(
            ValidationIssue(
                severity="error",
                dimension="Triangle Budget",
                message=f"n={n}: deltas sum to {sum(plan.deltas)}, w(n) = {w_closed_form(n)}.",
                threshold=f"{w_closed_form(n)}",
            )
        )
    return issues


def validate_bias(row: BiasRow) -> list[ValidationIssue]:
    """Bound ordering and predicate consistency of one ``bias`` row."""
    issues: list[ValidationIssue] = []

    # 1. Lower bound must stay below the upper bound
    if row.lower_bound >= row.upper_bound:
        issues.append(
            ValidationIssue(
                severity="error",
                dimension="Bias Bounds",
                message=(
                    f"n={row.n}: lower bound {row.lower_bound:.4f} is not below "
                    f"upper bound {row.upper_bound:.4f}."
                ),
                threshold="lower < upper",
            )
        )

    # 2. Maker and Breaker guarantees can never both hold
    if row.beck_guarantee and row.b >= row.upper_bound:
        issues.append(
            ValidationIssue(
                severity="error",
                dimension="Predicate Conflict",
                message=(
                    f"n={row.n}, b={row.b}: Maker criterion holds where the Breaker "
                    f"bound {row.upper_bound:.4f} already applies."
                ),
                threshold=f"b < {row.upper_bound:.4f}",
            )
        )

    # 3. Upper bound drops its o(1) term
    if row.n < 100:
        issues.append(
            ValidationIssue(
                severity="warning",
                dimension="Asymptotic Bound",
                message=f"n={row.n}: upper bound is asymptotic and not an exact threshold here.",
                threshold="n >= 100",
            )
        )
    return issues
