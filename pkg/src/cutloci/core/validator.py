"""Schema validation with readable error reports."""

from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from cutloci.core.errors import ConfigValidationError

ModelT = TypeVar("ModelT", bound=BaseModel)


def _format_validation_error(error: ValidationError, schema_class: type[BaseModel]) -> str:
    """
    Format validation error with actionable suggestions.

    Args:
        error: Pydantic ValidationError
        schema_class: The schema class that failed validation

    Returns:
        Formatted error message listing every field path, error and input
    """
    errors = error.errors()
    if not errors:
        return str(error)

    error_parts = [f"Validation failed for {schema_class.__name__}:", ""]

    for err in errors:
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        error_type = err["type"]
        input_value = err.get("input")
        msg = err.get("msg", "")

        error_parts.append(f"Field: {loc}")
        error_parts.append(f"  Error: {msg}")
        error_parts.append(f"  Type: {error_type}")

        if error_type == "extra_forbidden":
            error_parts.append(f"  Suggestion: '{loc}' is not a known setting; check the spelling.")
        elif error_type == "missing":
            error_parts.append(f"  Suggestion: Required field '{loc}' is missing. Add it to the config file.")
        elif error_type == "too_short" and isinstance(input_value, list):
            error_parts.append("  Suggestion: Give at least one value, or omit the field to use the default.")
        elif error_type == "list_type" and not isinstance(input_value, list):
            error_parts.append("  Suggestion: Expected a list. Wrap the value in brackets: [value]")
        elif error_type == "literal_error":
            ctx = err.get("ctx") or {}
            if "expected" in ctx:
                error_parts.append(f"  Suggestion: Use one of {ctx['expected']}.")

        if input_value is not None and error_type != "missing":
            input_str = str(input_value)
            if len(input_str) > 100:
                input_str = input_str[:97] + "..."
            error_parts.append(f"  Input value: {input_str}")

        error_parts.append("")

    return "\n".join(error_parts).rstrip() + "\n"


def validate_schema(data: Any, schema_class: type[ModelT]) -> ModelT:
    """
    Validate data against a Pydantic schema.

    Args:
        data: Mapping to validate
        schema_class: Pydantic model class to validate against

    Returns:
        Validated model instance

    Raises:
        ConfigValidationError: With every problem listed
    """
    try:
        return schema_class.model_validate(data)
    except ValidationError as e:
        raise ConfigValidationError(_format_validation_error(e, schema_class)) from e
