#pragma once

#include "pshenv/field.hpp"

#include <filesystem>
#include <string>

namespace pshenv::io {

/// Writes `<stem>.bin` (little-endian float64, x1 fastest, then x2, then t)
/// and `<stem>.json` (grid shape, spacings, offset flag, axis order).
/// Returns the SHA-256 of the binary file.
std::string write_field(const std::filesystem::path& stem, const Field& u);

/// Reads a field written by write_field. Throws InputError on a malformed or
/// inconsistent header.
Field read_field(const std::filesystem::path& stem);

/// Columns x1,x2,t,value, one row per node in storage order.
void write_field_csv(const std::filesystem::path& file, const Field& u);

/// Writes text and returns its SHA-256.
std::string write_text(const std::filesystem::path& file, const std::string& text);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& file);

}  // namespace pshenv::io
