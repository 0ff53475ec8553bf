// Copyright 2026 The shhlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace shhlab {

/// Decimal with 17 significant digits: round-trips any double exactly.
std::string format_full(double v);

/// FNV-1a 64-bit over a byte string, hex-encoded; used for manifest hashes.
std::string fnv1a64_hex(const std::string& bytes);

/// Reads a whole file into a string (throws on failure).
std::string read_file(const std::string& path);

/// Writes a string to a file, creating parent directories (throws on failure).
void write_file(const std::string& path, const std::string& content);

}  // namespace shhlab
