"""Guiding questions a decision-maker should work through before deploying.

Static content; :func:`emit_checklist` is byte-identical across calls.
"""

from __future__ import annotations

TITLE = "Guiding questions for an equitable decision-making model"

SECTIONS: tuple[tuple[str, tuple[str, ...]], ...] = (
    (
        "Selection of the proxy model",
        (
            "What class of model functions would be the best to use, H_P?",
            "What features will be the most predictive?",
            "Given a selection of features, X_P, what access obstacles, O_P, "
            "will individuals face to access this model?",
            "Who is most likely to face the most (fewest) access obstacles?",
            "Which policy can alleviate the obstacles individuals face? Do I "
            "have the policy, Phi_P, to alleviate the obstacles? What is the "
            "model access Psi_P?",
            "How well does the model function perform on individuals in "
            "different groups, Omega(P)?",
            "How would a change in features affect accuracy, obstacles faced, "
            "and model access Psi_P?",
            "How well does this model reflect the physical and social "
            "environment in which decisions take form?",
            "Does the chosen model achieve equal access or optimal access "
            "threshold score?",
        ),
    ),
    (
        "Selection of evaluation model",
        (
            "What class of evaluation model functions would be the best to "
            "use, H_T?",
            "What features am I using for evaluation? What is the feature "
            "proxy gap, Gamma_X(X_P, X_T)?",
            "What is the label proxy gap, Gamma_L(h_P, h_T)?",
            "Given a selection of evaluation features, X_T, what utilization "
            "obstacles will individuals face to utilize the model?",
            "What is the obstacle gap?",
            "Who is most likely to face the most (fewest) utilization "
            "obstacles?",
            "If I changed the features, would that increase (decrease) the "
            "accuracy of evaluation results and increase (decrease) "
            "utilization obstacles faced?",
            "Which policy can alleviate the utilization obstacles individuals "
            "face? Do I have the policy, Phi_T, to alleviate the utilization "
            "obstacles?",
            "How well does the evaluation model function perform on "
            "individuals in different groups?",
            "Does the chosen model achieve equal utilization or optimal "
            "utilization threshold score?",
        ),
    ),
    (
        "Curation of ground truth",
        (
            "Given the obstacle gap, label proxy gap, Gamma_L(h_P, h_T), and "
            "feature proxy gap, Gamma_X(X_P, X_T), should I use proxy or "
            "evaluation model features/labels or both?",
            "If I choose these features/labels, given utilization, zeta(P), "
            "access, Psi(P), and outcome, Omega(P), who is most likely to be "
            "misrepresented in the new ground truth? Do I exhaustively "
            "capture obstacles individuals face?",
        ),
    ),
)


def emit_checklist() -> str:
    lines = [TITLE, "=" * len(TITLE), ""]
    for header, questions in SECTIONS:
        lines.append(header)
        lines.append("-" * len(header))
        for k, question in enumerate(questions, start=1):
            lines.append(f"{k}) {question}")
        lines.append("")
    return "\n".join(lines)
