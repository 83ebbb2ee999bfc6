#ifndef SMAGDA_CORE_SHA256_HPP
#define SMAGDA_CORE_SHA256_HPP

#include <cstdint>
#include <string>

namespace smagda {

// FIPS 180-4 SHA-256, lowercase hex digest. Used for output manifests.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& data);
std::string sha256_file_hex(const std::string& path);

}  // namespace smagda

#endif  // SMAGDA_CORE_SHA256_HPP
