"""
Slack integration for sending verification reports.
"""
import requests
import json
import logging
from typing import Dict, Any
from datetime import datetime

logger = logging.getLogger(__name__)


class SlackIntegration:
    """Handles Slack integration for verification notifications."""

    def __init__(self, webhook_url: str, channel: str = ''):
        """
        Initialize Slack integration.

        Args:
            webhook_url: Slack webhook URL for sending messages
            channel: Channel named in the message header
        """
        self.webhook_url = webhook_url
        self.channel = channel

    def format_verification_message(self, summary: Dict[str, Any]) -> str:
        """
        Format a run summary into a short Slack message.

        Args:
            summary: Run summary as produced by DecompositionManager

        Returns:
            Formatted message string
        """
        status = summary.get('status', 'FAIL')
        mark = "✓" if status == 'PASS' else "✗"

        message = f"UFSS decomposition [{summary.get('case', '?')}] {summary.get('instance', '')}\n"
        message += f"{mark} Verification: {status}\n"
        message += f"✓ Pieces: {summary.get('pieces', 0)}\n"
        message += f"✓ Fallback pieces: {summary.get('fallback_pieces', 0)}"

        failures = summary.get('failures', [])
        if failures:
            message += "\nFailed checks: " + ", ".join(failures)
        return message

    def _post(self, payload: Dict[str, Any]) -> bool:
        try:
            response = requests.post(
                self.webhook_url,
                data=json.dumps(payload),
                headers={'Content-Type': 'application/json'},
                timeout=10
            )

            if response.status_code == 200:
                return True
            logger.error(f"Failed to post to Slack. Status: {response.status_code}")
            return False

        except Exception as e:
            logger.error(f"Error posting to Slack: {e}")
            return False

    def send_message(self, message: str) -> bool:
        """
        Send message to Slack via webhook.

        Args:
            message: Message to send

        Returns:
            True if successful, False otherwise
        """
        sent = self._post({"text": message, "mrkdwn": True})
        if sent:
            logger.info("Message sent to Slack successfully")
        return sent

    def send_verification_report(self, summary: Dict[str, Any]) -> bool:
        """
        Send a run summary to Slack; failed runs go out as alerts.

        Args:
            summary: Run summary as produced by DecompositionManager

        Returns:
            True if successful, False otherwise
        """
        message = self.format_verification_message(summary)
        if summary.get('status') == 'PASS':
            return self.send_message(message)
        return self.send_alert("Verification failed", message, color="danger")

    def send_alert(self, title: str, message: str, color: str = "warning") -> bool:
        """
        Send an alert message to Slack with custom formatting.

        Args:
            title: Alert title
            message: Alert message
            color: Color for the alert (good, warning, danger)

        Returns:
            True if successful, False otherwise
        """
        payload = {
            "attachments": [
                {
                    "title": title,
                    "text": message,
                    "color": color,
                    "footer": f"UFSS Verification {self.channel}".strip(),
                    "ts": int(datetime.now().timestamp())
                }
            ]
        }
        sent = self._post(payload)
        if sent:
            logger.info(f"Alert sent to Slack: {title}")
        return sent
