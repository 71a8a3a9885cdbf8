#pragma once

#include <string>

#include <json.hpp>

namespace fedprune {

/// Reads the TOML subset used by experiment specs — `[section]` tables and
/// `key = value` pairs with strings, integers, floats, booleans and flat
/// (possibly multi-line) arrays — into a json object of the same shape a
/// .json spec file would parse to. Throws FormatError with a line number.
nlohmann::json parse_tomlish(const std::string& text);

}  // namespace fedprune
