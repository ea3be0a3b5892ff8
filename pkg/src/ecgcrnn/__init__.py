"""Convolutional-recurrent networks for arrhythmia classification from single-lead ECG."""

__version__ = "0.1.0"

CLASS_ORDER = ("normal", "afib", "other", "noise")
