#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace gridplan {

// Hex SHA-1 of "blob <size>\0<content>", the hash git assigns to file content.
std::string blob_hash(std::string_view content);
std::string file_hash(const std::filesystem::path& path);

}  // namespace gridplan
