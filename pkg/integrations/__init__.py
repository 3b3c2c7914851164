"""
Integrations package for verification notifications.
"""

from .slack_integration import SlackIntegration

__all__ = ['SlackIntegration']
