"""Converters from public ECG archives to the canonical dataset format.

Two source kinds:
  - ``challenge``: single-lead .mat records with a REFERENCE.csv label file
    (N/A/O/~ labels, 300 Hz).
  - ``wfdb``: annotated two-lead waveform-database records (header +
    signal + rhythm annotation files); cut into non-overlapping 30 s
    segments, keeping single-rhythm segments only, one record per lead.

Output is the primary pipeline's external interface: a JSON-lines
manifest and binary float32 payloads with CRC32 checksums. Nothing here
imports the primary package.
"""

__version__ = "0.1.0"
