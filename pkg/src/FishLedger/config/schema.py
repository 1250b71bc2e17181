# src/FishLedger/config/schema.py

_RANGE = {
    "type": "array",
    "items": {"type": "number", "minimum": 0},
    "minItems": 2,
    "maxItems": 2,
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "genesis_time": {"type": "integer", "minimum": 0},
        "logging_level": {"type": ["string", "integer"]},
        "logging": {
            "type": "object",
            "properties": {
                "format": {"type": "string"},
                "date_format": {"type": "string"},
                "file_logging": {"type": "boolean"},
                "log_directory": {"type": "string"},
            },
        },
        "organizations": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["org_id", "peers"],
                "additionalProperties": False,
                "properties": {
                    "org_id": {"type": "string", "minLength": 1},
                    "peers": {"type": "array", "items": {"type": "string", "minLength": 1}},
                    "admitted_roles": {
                        "type": "array",
                        "items": {"type": "string", "enum": ["admin", "peer", "client", "orderer"]},
                    },
                    "root_public_key": {"type": "string", "pattern": "^[0-9a-fA-F]{64}$"},
                },
            },
        },
        "orderers": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "org"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "org": {"type": "string", "minLength": 1},
                },
            },
        },
        "channel_policy": {"type": "string", "minLength": 1},
        "chaincode_policy": {"type": "string", "minLength": 1},
        "collections": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "member_orgs"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "member_orgs": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"type": "string"},
                    },
                    "required_peer_count": {"type": "integer", "minimum": 0},
                },
            },
        },
        "ordering": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_message_count": {"type": "integer", "minimum": 1},
                "batch_timeout_ms": {"type": "number", "exclusiveMinimum": 0},
                "election_timeout_ms": _RANGE,
                "heartbeat_ms": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "netsim": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "latency_ms": _RANGE,
                "fault_script": {"type": ["string", "null"]},
                "transport": {"type": "string", "enum": ["simulated", "loopback"]},
            },
        },
        "client": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "endorsing_peers": {"type": ["array", "null"], "items": {"type": "string"}},
                "event_peer": {"type": ["string", "null"]},
                "submit_retries": {"type": "integer", "minimum": 0},
                "retry_backoff_ms": {"type": "number", "minimum": 0},
                "commit_timeout_ms": {"type": "number", "exclusiveMinimum": 0},
                "dissemination_timeout_ms": {"type": "number", "exclusiveMinimum": 0},
                "deliver_poll_ms": {"type": "number", "exclusiveMinimum": 0},
                "staging_retention_blocks": {"type": "integer", "minimum": 1},
            },
        },
        "identity": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"validity_days": {"type": "integer", "minimum": 1}},
        },
        "bench": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "in_flight": {"type": "integer", "minimum": 1},
                "bucket_size": {"type": "integer", "minimum": 1},
                "read_repeats": {"type": "integer", "minimum": 1},
            },
        },
    },
}
