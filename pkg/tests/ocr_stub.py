"""Fake OCR engine: prints the lines stored in $OCR_STUB_OUT, or fails on demand."""
import os
import sys

if os.environ.get("OCR_STUB_FAIL"):
    sys.stderr.write("engine crashed\n")
    sys.exit(3)
sys.stdout.write(os.environ.get("OCR_STUB_OUT", ""))
