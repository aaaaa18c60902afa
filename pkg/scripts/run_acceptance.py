"""Run the acceptance suite with one printed pass/fail line per criterion."""

import subprocess
import sys


def main() -> int:
    cmd = [sys.executable, "-m", "pytest", "tests/test_acceptance.py",
           "-v", "-s", "--no-header"]
    return subprocess.call(cmd)


if __name__ == "__main__":
    sys.exit(main())
