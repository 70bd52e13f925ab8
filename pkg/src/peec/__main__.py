"""Module entry point for peec."""

from peec.main import app

if __name__ == "__main__":
    app()
