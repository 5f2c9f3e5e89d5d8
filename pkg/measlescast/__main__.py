import sys
from measlescast import main


if __name__ == "__main__":
    sys.exit(main())
