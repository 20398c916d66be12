#!/usr/bin/env python3
"""
Launcher script for GradPlast
Sets up PYTHONPATH to run the solver as a package and forwards the arguments.
"""

import os
import subprocess
import sys


def main():
    """Starts the CLI using the current Python interpreter."""

    # Project root path (the folder above 'gradplast')
    project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

    env = os.environ.copy()
    env['PYTHONPATH'] = project_root + os.pathsep + env.get('PYTHONPATH', '')

    # sys.executable keeps the interpreter (and its numpy/scipy) the same
    cmd = [sys.executable, "-m", "gradplast.main", *sys.argv[1:]]
    print(f"Executing: {' '.join(cmd)}", file=sys.stderr)

    try:
        result = subprocess.run(cmd, env=env, check=False)
        sys.exit(result.returncode)
    except KeyboardInterrupt:
        print("\nRun interrupted by user.", file=sys.stderr)
        sys.exit(130)
    except Exception as e:
        print(f"ERROR during launch: {e}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
