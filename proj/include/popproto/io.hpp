#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "popproto/protocol.hpp"

namespace popproto {

/// Interchange document: states (sorted), transitions (sorted by pre, then
/// post), initial, leaders, output, meta.
nlohmann::json to_json(const Protocol& p);
/// MalformedProtocol on schema violations.
Protocol protocol_from_json(const nlohmann::json& doc);

/// Canonical text form (two-space indent, trailing newline).
std::string dump(const nlohmann::json& doc);

Protocol read_protocol(const std::filesystem::path& path);
void write_protocol(const Protocol& p, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace popproto
