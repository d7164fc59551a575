"""Exception hierarchy shared across the gateway."""


class LinguomotorError(Exception):
    """Base class for all errors raised by this package."""


# core model

class NotNormalizable(LinguomotorError):
    """Quaternion norm is zero or too far from 1 to be trusted."""


# topic bus

class BusError(LinguomotorError):
    pass


class SchemaConflict(BusError):
    pass


class UnknownTopic(BusError):
    pass


class PayloadInvalid(BusError):
    pass


class FrameTruncated(BusError):
    pass


class FrameMalformed(BusError):
    pass


# simulators

class SimError(LinguomotorError):
    pass


class EStopEngaged(SimError):
    pass


class InvalidCommand(SimError):
    pass


class OutOfWorkspace(SimError):
    """Commanded pose lies outside the reachable workspace sphere."""


# language bridge

class BackendError(LinguomotorError):
    pass


class TransportError(BackendError):
    """Network or HTTP failure talking to the remote backend."""


class BackendProtocolError(BackendError):
    """Remote backend replied with something we cannot parse."""


class InvalidAction(BackendError):
    """Backend produced arguments that fail tool schema validation."""


# gateway

class ConfigError(LinguomotorError):
    pass


class BindError(LinguomotorError):
    pass


class ScriptSyntax(LinguomotorError):
    pass


class TraceMalformed(LinguomotorError):
    pass


class FixtureMismatch(LinguomotorError):
    pass


class UnknownFormat(LinguomotorError):
    pass
