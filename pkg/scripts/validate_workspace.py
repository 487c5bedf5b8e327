#!/usr/bin/env python3
import sys
import os
import json
import argparse

# Add the parent directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from perfcorr.errors import PerfCorrError
from perfcorr.workspace import load_workspace


def validate_workspace(file_path):
    """Check that a workspace parses and every named object builds"""
    try:
        ws = load_workspace(file_path)
    except PerfCorrError as e:
        return {
            'valid': False,
            'error': str(e)
        }

    result = ws.check_all()
    result['objects'] = ws.names()
    return result


def main():
    parser = argparse.ArgumentParser(description='Validate perfcorr workspace files')
    parser.add_argument('file_path', help='The workspace JSON file to validate')

    args = parser.parse_args()

    result = validate_workspace(args.file_path)
    print(json.dumps(result))
    sys.exit(0 if result['valid'] else 1)


if __name__ == "__main__":
    main()
