#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace gemlaw {

/// SHA-256 of a byte string, as lowercase hex. Used to fingerprint report
/// inputs so identical reruns are provably over identical data.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's contents. Throws ParseError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace gemlaw
