"""JSON schemas of the CLI outputs."""

_num = {"type": "number"}
_nullable_num = {"type": ["number", "null"]}

DISTANCE = {
    "type": "object",
    "required": ["scheme", "N", "u_at_one", "J_h", "distance_from_u", "distance_from_J", "wall_ms"],
    "properties": {
        "scheme": {"type": "string"},
        "N": {"type": "integer", "minimum": 2},
        "u_at_one": _num,
        "J_h": _num,
        "distance_from_u": {"type": "number", "minimum": 0},
        "distance_from_J": {"type": "number", "minimum": 0},
        "wall_ms": {"type": "number", "minimum": 0},
    },
}

REGISTER = {
    "type": "object",
    "required": ["scheme", "N", "u_at_one", "J_h", "n_points", "path_csv", "files"],
    "properties": {
        "scheme": {"type": "string"},
        "N": {"type": "integer"},
        "u_at_one": _num,
        "J_h": _num,
        "n_points": {"type": "integer", "minimum": 2},
        "path_csv": {"type": "string"},
        "files": {"type": "array", "items": {"type": "string"}},
    },
}

GEODESIC = {
    "type": "object",
    "required": ["tau", "distance", "J_h", "n_segments", "files"],
    "properties": {
        "tau": {"type": "array", "items": _num},
        "distance": {"type": "number", "minimum": 0},
        "J_h": _num,
        "n_segments": {"type": "integer"},
        "files": {"type": "array", "items": {"type": "string"}},
    },
}

CONVERGE = {
    "type": "object",
    "required": ["columns", "rows", "reference"],
    "properties": {
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["scheme", "N", "wall_time", "linf_u_error", "dist_u_error", "dist_J_error",
                             "geodesic_error_bound"],
                "properties": {
                    "scheme": {"type": "string"},
                    "N": {"type": "integer"},
                    "wall_time": _num,
                    "linf_u_error": _num,
                    "dist_u_error": _num,
                    "dist_J_error": _num,
                    "geodesic_error_bound": _nullable_num,
                },
            },
        },
        "reference": {"type": "object"},
    },
}

LOCALMAX = {
    "type": "object",
    "required": ["scheme", "N", "max_u_tot", "u_fwd_at_one", "plateau_tol", "maxima"],
    "properties": {
        "scheme": {"type": "string"},
        "N": {"type": "integer"},
        "max_u_tot": _num,
        "u_fwd_at_one": _num,
        "plateau_tol": _num,
        "maxima": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["i", "j", "x1", "x2", "u_tot", "J_h"],
                "properties": {
                    "i": {"type": "integer"}, "j": {"type": "integer"},
                    "x1": _num, "x2": _num, "u_tot": _num, "J_h": _num,
                },
            },
        },
    },
}

SCHEMAS = {"distance": DISTANCE, "register": REGISTER, "geodesic": GEODESIC,
           "converge": CONVERGE, "localmax": LOCALMAX}
