# config.py
# Centralised configuration. Values come from environment variables, optionally
# provided through a local .env file, with defaults that reproduce the reference runs.

import os
from dotenv import load_dotenv

# Carica le variabili d'ambiente dal file .env (se presente).
load_dotenv()

# --- Logging ---
LOG_LEVEL = os.getenv("LABELING_LOG_LEVEL", "WARNING").upper()

# --- Connectivity wrapper ---
# Largest argument used when checking an inner size function at registration.
SIZE_CHECK_LIMIT = int(os.getenv("LABELING_SIZE_CHECK_LIMIT", str(1 << 20)))

# --- Verification and certification ---
DEFAULT_TRIALS = int(os.getenv("LABELING_DEFAULT_TRIALS", "200"))
# The A2 family has 2^(n-1) - 1 members; pair verification beyond this gets slow.
A2_MAX_N = int(os.getenv("LABELING_A2_MAX_N", "14"))

# --- Reports ---
REPORT_DIR = os.getenv("LABELING_REPORT_DIR", ".")
