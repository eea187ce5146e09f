import json
from pathlib import Path

from config import CLI_DEFAULTS
from spectral.errors import ConfigError


def parse_override(text):
    """Split 'a.b=value' into (['a', 'b'], value); values parse as JSON, falling back to string"""
    if "=" not in text:
        raise ConfigError(f"override '{text}' is not of the form key=value", key_path=text)
    key, raw = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError("empty key in override", key_path=text)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def check_keys(tree, defaults, path=""):
    """Reject keys absent from the default tree (recursively through nested dicts)"""
    if not isinstance(tree, dict):
        raise ConfigError("expected a mapping", key_path=path or "<root>")
    for key, value in tree.items():
        key_path = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError("unknown key", key_path=key_path)
        if isinstance(defaults[key], dict) and not _free_form(key):
            check_keys(value, defaults[key], key_path)


def _free_form(key):
    # built-in symbol/potential parameters and region shapes vary by kind
    return key in ("symbol", "g", "potential", "region", "contour")


def merge(base, update):
    out = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict) and not _free_form(key):
            out[key] = merge(out[key], value)
        else:
            out[key] = value
    return out


def set_path(tree, keys, value):
    node = tree
    for key in keys[:-1]:
        if not isinstance(node.get(key), dict):
            node[key] = {}
        node = node[key]
    node[keys[-1]] = value


def load_config_file(path):
    """Read a JSON run config or a manifest (whose 'config' entry is used)"""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}", key_path="--config") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON ({exc.msg} at line {exc.lineno})", key_path="--config") from exc
    if isinstance(data, dict) and "config" in data and "subcommand" in data:
        return data["config"], data
    return data, None


def resolve_config(subcommand, config_tree=None, overrides=()):
    """CLI defaults <- config file tree <- key=value overrides, validated against the defaults"""
    if subcommand not in CLI_DEFAULTS:
        raise ConfigError(f"unknown subcommand '{subcommand}'", key_path="subcommand")
    defaults = CLI_DEFAULTS[subcommand]
    resolved = json.loads(json.dumps(defaults))
    if config_tree:
        check_keys(config_tree, defaults)
        resolved = merge(resolved, config_tree)
    for text in overrides:
        keys, value = parse_override(text)
        if keys[0] not in defaults:
            raise ConfigError("unknown key", key_path=".".join(keys))
        set_path(resolved, keys, value)
    check_keys(resolved, defaults)
    return resolved


def validate_positive(value, name):
    """Validate a strictly positive number"""
    try:
        number = float(value)
    except (TypeError, ValueError):
        return False, f"{name} must be a number"
    if number <= 0:
        return False, f"{name} must be positive"
    return True, "Valid"


def validate_h(h):
    ok, msg = validate_positive(h, "h")
    if ok and float(h) >= 1:
        return False, "h must be below 1 (semiclassical regime)"
    return ok, msg


def require(check, key_path):
    """Raise ConfigError when a (bool, message) validator fails"""
    ok, msg = check
    if not ok:
        raise ConfigError(msg, key_path=key_path)
