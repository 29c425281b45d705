#!/usr/bin/env python3
"""Start the tutoring gateway with uvicorn.

Usage:
    python scripts/run_server.py --config gateway.json
    TUTOR_LISTEN_PORT=9000 python scripts/run_server.py --config gateway.json

The config file is JSON with the GatewayConfig fields; at minimum supply a
``tokens`` map so someone can authenticate:

    {"tokens": {"secret-token": {"user_id": "t1", "role": "teacher",
                                 "courses": ["demo"]}}}
"""

import argparse

import uvicorn

from coursetutor.engine import TutorEngine
from coursetutor.gateway import create_app, load_config


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None,
                        help="path to a JSON gateway config file")
    args = parser.parse_args()
    config = load_config(args.config)
    engine = TutorEngine(config.data_dir)
    app = create_app(engine, config)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port)


if __name__ == "__main__":
    main()
