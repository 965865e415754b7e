"""Suite configuration: a flat key=value text format.

Lines look like `model.main.kind = lattice` or `check.ax.type = axioms`;
`#` starts a comment.  Dotted prefixes group models and checks; everything
else is a top-level setting.  Example:

    model.heis.kind = heisenberg
    model.heis.N = 8
    check.ax.type = axioms
    check.ax.model = heis
    check.ax.samples = 500
    tolerance = 1e-8
    output_dir = reports
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .graded_fock import ModelSpec, heisenberg_spec, lattice_spec, \
    virasoro_spec
from .scalars import rat_from_str

CHECK_TYPES = {
    "axioms", "unitarity", "norms", "virasoro_bound", "v1_bound",
    "product_lemma", "primary_bound", "pair_bound", "zero_mode_product",
    "orbifold", "trace_domination", "bootstrap",
}

_CHECK_FIELDS = {
    "type": str, "model": str, "m_max": int, "n_max": int,
    "samples": int, "seed": int, "degree_cap": int, "state": str,
    "q": str, "s": str, "p": int, "degree": int, "d": int,
    "with": str,
}


@dataclass
class SuiteConfig:
    models: dict = field(default_factory=dict)   # name -> ModelSpec
    pads: dict = field(default_factory=dict)     # name -> int or None
    corrupts: dict = field(default_factory=dict)  # name -> tuple or None
    checks: list = field(default_factory=list)   # [{"name", "type", ...}]
    tolerance: float = 1e-8
    output_dir: str = "reports"
    jobs: int = 0  # 0 = auto
    cache_dir: str = ""

    def validate(self):
        for check in self.checks:
            ctype = check.get("type")
            if ctype not in CHECK_TYPES:
                raise ConfigError(
                    f"check {check.get('name')!r}: unknown type {ctype!r}")
            mname = check.get("model")
            if mname not in self.models:
                raise ConfigError(
                    f"check {check.get('name')!r}: unknown model {mname!r}")
            spec = self.models[mname]
            n_max = check.get("n_max", 0)
            m_max = check.get("m_max", 0)
            if ctype in {"virasoro_bound", "v1_bound", "primary_bound"}:
                if n_max + m_max > spec.N:
                    raise ConfigError(
                        f"check {check.get('name')!r}: window n_max+m_max ="
                        f" {n_max + m_max} exceeds truncation N={spec.N}")
            elif n_max > spec.N:
                raise ConfigError(
                    f"check {check.get('name')!r}: n_max={n_max} exceeds "
                    f"truncation N={spec.N}")
        if self.jobs < 0:
            raise ConfigError("jobs must be nonnegative")
        return self


def _build_spec(name: str, fields: dict) -> ModelSpec:
    kind = fields.get("kind")
    try:
        n = int(fields["N"])
    except KeyError:
        raise ConfigError(f"model {name!r}: missing N") from None
    if kind == "heisenberg":
        rank = int(fields.get("rank", 1))
        metric = fields.get("metric")
        if metric:
            rows = tuple(tuple(rat_from_str(x) for x in row.split(","))
                         for row in metric.split(";"))
            return heisenberg_spec(rank, n, rows)
        return heisenberg_spec(rank, n)
    if kind == "virasoro":
        if "c" not in fields:
            raise ConfigError(f"model {name!r}: missing central charge c")
        return virasoro_spec(fields["c"], n)
    if kind == "lattice":
        if "q" not in fields:
            raise ConfigError(f"model {name!r}: missing lattice square q")
        return lattice_spec(int(fields["q"]), n)
    raise ConfigError(f"model {name!r}: unknown kind {kind!r}")


def parse_config(text: str) -> SuiteConfig:
    model_fields = {}
    check_fields = {}
    top = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        parts = key.split(".")
        if parts[0] == "model":
            if len(parts) != 3:
                raise ConfigError(f"line {lineno}: model keys look like "
                                  "model.<name>.<field>")
            model_fields.setdefault(parts[1], {})[parts[2]] = value
        elif parts[0] == "check":
            if len(parts) != 3:
                raise ConfigError(f"line {lineno}: check keys look like "
                                  "check.<name>.<field>")
            check_fields.setdefault(parts[1], {})[parts[2]] = value
        elif len(parts) == 1:
            top[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown section {parts[0]!r}")

    config = SuiteConfig()
    for name, fields in sorted(model_fields.items()):
        config.models[name] = _build_spec(name, fields)
        config.pads[name] = int(fields["pad"]) if "pad" in fields else None
        if "corrupt" in fields:
            parts = fields["corrupt"].split(",")
            if len(parts) != 6:
                raise ConfigError(
                    f"model {name!r}: corrupt takes gid,m,src,row,col,delta")
            config.corrupts[name] = tuple(int(x) for x in parts)
        else:
            config.corrupts[name] = None
    for name, fields in sorted(check_fields.items()):
        check = {"name": name}
        for fname, value in fields.items():
            if fname not in _CHECK_FIELDS:
                raise ConfigError(
                    f"check {name!r}: unknown field {fname!r}")
            caster = _CHECK_FIELDS[fname]
            try:
                check[fname] = caster(value)
            except ValueError:
                raise ConfigError(
                    f"check {name!r}: bad value for {fname}: {value!r}"
                ) from None
        config.checks.append(check)
    if "tolerance" in top:
        config.tolerance = float(top["tolerance"])
    if "output_dir" in top:
        config.output_dir = top["output_dir"]
    if "cache_dir" in top:
        config.cache_dir = top["cache_dir"]
    if "jobs" in top:
        try:
            config.jobs = int(top["jobs"])
        except ValueError:
            raise ConfigError(f"bad jobs value {top['jobs']!r}") from None
    known = {"tolerance", "output_dir", "cache_dir", "jobs"}
    for key in top:
        if key not in known:
            raise ConfigError(f"unknown setting {key!r}")
    return config.validate()


def load_config(path: str) -> SuiteConfig:
    with open(path) as fh:
        return parse_config(fh.read())
