"""Python bindings for the specbench multi-spectral evaluation core."""

from ._specbench import (  # noqa: F401
    SpecbenchError,
    __version__,
    aggregate,
    apply_colormap,
    band_glossary,
    class_names,
    compose_rgb,
    encode_png,
    format_answer,
    map_43_to_19,
    normalize_band,
    normalized_difference,
    parse_answer,
    prompt_text,
    read_bundle_labels,
    render_bundle,
    sample_prf,
    save_manifest,
    to_byte,
    write_bundle,
)

__all__ = [
    "SpecbenchError",
    "__version__",
    "aggregate",
    "apply_colormap",
    "band_glossary",
    "class_names",
    "compose_rgb",
    "encode_png",
    "format_answer",
    "map_43_to_19",
    "normalize_band",
    "normalized_difference",
    "parse_answer",
    "prompt_text",
    "read_bundle_labels",
    "render_bundle",
    "sample_prf",
    "save_manifest",
    "to_byte",
    "write_bundle",
]
