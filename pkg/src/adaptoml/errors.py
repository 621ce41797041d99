"""Exception hierarchy shared across the engine."""


class AdaptomlError(Exception):
    """Base class for all engine errors."""


class DataError(AdaptomlError):
    """Bad input data: unreadable files, ragged rows, missing columns."""


class ConfigError(AdaptomlError):
    """Invalid run configuration."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class CapabilityError(AdaptomlError):
    """Operation not supported by the model family (e.g. partial_fit on a tree)."""


class SignatureError(AdaptomlError):
    """Feature columns do not match the signature a model was trained on."""


class PersistenceError(AdaptomlError):
    """Malformed, unreadable or wrong-version model bundle."""


class PipelineError(AdaptomlError):
    """A pipeline stage failed; carries the stage name and partial outputs."""

    def __init__(self, stage, message, artifacts=()):
        self.stage = stage
        self.artifacts = list(artifacts)
        lines = [f"stage '{stage}' failed: {message}"]
        if self.artifacts:
            lines.append("partial outputs written: " + ", ".join(str(a) for a in self.artifacts))
        super().__init__("\n".join(lines))
