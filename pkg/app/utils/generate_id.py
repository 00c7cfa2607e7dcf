# app/utils/generate_id.py
import ulid


def generate_id(prefix: str) -> str:
    return f"{prefix}_{ulid.new().str}"
