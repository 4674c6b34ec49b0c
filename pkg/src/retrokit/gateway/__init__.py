"""HTTP service layer."""

from .app import create_app
from .config import AppConfig
from .state import GatewayState, JobRecord

__all__ = ["AppConfig", "GatewayState", "JobRecord", "create_app"]
