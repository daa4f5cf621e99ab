"""Optical IRS-assisted multi-link FSO channel and performance models."""
