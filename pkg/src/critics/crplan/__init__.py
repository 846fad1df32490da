from critics.crplan.catalog import (
    DEFAULT_PLAN_CRITERION_IDS,
    default_plan_criteria,
    get_criterion,
    load_catalog,
)
from critics.crplan.engine import (
    SessionHooks,
    create_personas,
    evaluate_candidates,
    generate_critique,
    leader_select,
    refine_plan,
    run_crplan,
)
from critics.crplan.types import (
    Criterion,
    CrPlanConfig,
    CrPlanResult,
    Critique,
    LeaderDecision,
    Persona,
    PersonaSet,
    RoundRecord,
)

__all__ = [
    "Criterion",
    "CrPlanConfig",
    "CrPlanResult",
    "Critique",
    "DEFAULT_PLAN_CRITERION_IDS",
    "LeaderDecision",
    "Persona",
    "PersonaSet",
    "RoundRecord",
    "SessionHooks",
    "create_personas",
    "default_plan_criteria",
    "evaluate_candidates",
    "generate_critique",
    "get_criterion",
    "leader_select",
    "load_catalog",
    "refine_plan",
    "run_crplan",
]
