"""Walk through the configuration rules on a few machine descriptions.

Run from the repository root after installing the package:

    python3 demos/01_validate_configs.py
"""

from pathlib import Path

from mppsoc import parse_config, serialize_config, validate

HERE = Path(__file__).resolve().parent


def check(name):
    config = parse_config((HERE / name).read_text())
    report = validate(config)
    print(f"--- {name}: {config.rows}x{config.cols} PEs, "
          f"neighborhood={config.neighborhood.value if config.neighborhood else '-'}, "
          f"mpnoc={config.mpnoc.value if config.mpnoc else '-'}")
    print(report)
    print()
    return config


def main():
    mesh16 = check("mesh16.cfg")
    check("linear64.cfg")
    check("delta8.cfg")
    check("bad_mesh1x4.cfg")

    print("Canonical serialized form of mesh16.cfg:")
    print(serialize_config(mesh16))


if __name__ == "__main__":
    main()
