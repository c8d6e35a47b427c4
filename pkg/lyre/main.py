import sys

from .cli import main

# Execute the main function if this script is run directly
if __name__ == "__main__":
    sys.exit(main())
