#pragma once

#include <string>

namespace ratl {

// Content fingerprint for run manifests: 64-bit FNV-1a over the raw bytes,
// rendered as "fnv1a64:<16 hex digits>". Stable across platforms; not a
// cryptographic hash.
std::string digest_bytes(const std::string& bytes);
std::string digest_file(const std::string& path);

} // namespace ratl
