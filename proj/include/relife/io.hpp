#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "relife/error.hpp"

namespace relife {

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, so readers never observe a
/// half-written document.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Parses JSON text; syntax errors become Error{ParseError} with line and
/// column in the message.
nlohmann::json parse_json(std::string_view text, std::string_view source = "document");

/// Converts a JSON value to T, mapping shape errors (missing keys, wrong
/// types) to Error{ParseError}. Domain errors thrown by from_json pass
/// through unchanged.
template <typename T>
T decode(const nlohmann::json& j, std::string_view what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

/// Canonical document rendering: two-space indent, sorted keys, trailing
/// newline.
std::string dump_document(const nlohmann::json& j);

}  // namespace relife
