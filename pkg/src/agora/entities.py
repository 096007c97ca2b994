"""Entity tags and value-shape checks shared by the library and policy layers."""

from __future__ import annotations

from enum import Enum
from typing import Any


class Entity(str, Enum):
    """Semantic category of a setting or variable value.

    Entities drive drop-down population and type checking: a Channel setting
    only accepts channel ids or Channel-entity variables, never arbitrary text.
    """

    COMMUNITY_USER = "CommunityUser"
    COMMUNITY_ROLE = "CommunityRole"
    CHANNEL = "Channel"
    TEXT = "Text"
    TIMESTAMP = "Timestamp"
    NUMBER = "Number"
    BOOLEAN = "Boolean"
    DOCUMENT = "Document"
    USER_LIST = "UserList"


class ValueType(str, Enum):
    SCALAR = "scalar"
    LIST = "list"


# Entities whose scalar values are ids into the community (existence-checked
# against a snapshot during validation).
ID_ENTITIES = frozenset({
    Entity.COMMUNITY_USER,
    Entity.COMMUNITY_ROLE,
    Entity.CHANNEL,
    Entity.DOCUMENT,
})


def scalar_shape_ok(entity: Entity, value: Any) -> bool:
    """Check one raw literal against the shape its entity implies.

    Ids (users, channels, roles, documents) stay plain strings; a UserList is
    an ordered list of user-id strings and is itself a scalar value.
    """
    if entity is Entity.NUMBER:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if entity is Entity.BOOLEAN:
        return isinstance(value, bool)
    if entity is Entity.TIMESTAMP:
        return isinstance(value, int) and not isinstance(value, bool)
    if entity is Entity.USER_LIST:
        return isinstance(value, list) and all(isinstance(u, str) for u in value)
    return isinstance(value, str)


def value_shape_ok(entity: Entity, value_type: ValueType, value: Any) -> bool:
    if value_type is ValueType.LIST:
        return isinstance(value, list) and all(scalar_shape_ok(entity, v) for v in value)
    return scalar_shape_ok(entity, value)
