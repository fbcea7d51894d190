#include "core/digest.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace ratl {

std::string digest_bytes(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return digest_bytes(ss.str());
}

} // namespace ratl
