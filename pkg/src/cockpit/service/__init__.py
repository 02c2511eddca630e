"""Persistent, network-facing cockpit service."""

from cockpit.service.app import create_app
from cockpit.service.workspace import Workspace, WorkspaceError

__all__ = ["Workspace", "WorkspaceError", "create_app"]
