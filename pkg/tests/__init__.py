"""Tests for EV Tracker integration."""
