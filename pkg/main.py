from eklimit.cli import main
from datetime import datetime
import sys

if __name__ == "__main__":
    start_time = datetime.now()

    code = main()

    end_time = datetime.now()
    elapsed_seconds = (end_time - start_time).total_seconds()
    print(f"Elapsed Time: {elapsed_seconds}[s]", file=sys.stderr)
    sys.exit(code)
