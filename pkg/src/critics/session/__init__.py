from critics.session.http import create_app
from critics.session.model import HumanMark, InterventionEvent, Session, new_session_id
from critics.session.service import SessionService, compute_user_metrics
from critics.session.storage import SessionStore

__all__ = [
    "HumanMark",
    "InterventionEvent",
    "Session",
    "SessionService",
    "SessionStore",
    "compute_user_metrics",
    "create_app",
    "new_session_id",
]
