# main.py
"""
Entry point for the vilenkin-mra command line.

    python main.py verify mask.json
    vilenkin-mra atlas --p 3          (installed script)
"""
from app.api.commands import cli


def run() -> None:
    cli()


if __name__ == "__main__":
    run()
