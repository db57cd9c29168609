#include "artism/rng.hpp"

#include <string>

#include "artism/canonical.hpp"
#include "artism/error.hpp"

namespace artism {

std::uint64_t hash64(std::uint64_t seed, std::string_view digest_hex) {
    require(digest_hex.size() >= 16, "hash64 needs at least 16 hex digits");
    std::uint64_t prefix = 0;
    for (std::size_t i = 0; i < 16; ++i) {
        const char c = digest_hex[i];
        std::uint64_t nibble = 0;
        if (c >= '0' && c <= '9') nibble = static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') nibble = static_cast<std::uint64_t>(c - 'a' + 10);
        else fail(ErrorCode::InvalidArgument, "hash64: digest is not lowercase hex");
        prefix = (prefix << 4) | nibble;
    }
    return splitmix64(seed ^ prefix);
}

std::uint64_t derive_agent_seed(std::uint64_t global_seed, std::string_view agent_id) {
    std::string material(8, '\0');
    for (int i = 0; i < 8; ++i) material[static_cast<std::size_t>(i)] = static_cast<char>((global_seed >> (56 - 8 * i)) & 0xff);
    material.append(agent_id);
    const auto d = sha256_bytes(material);
    std::uint64_t low = 0;
    for (std::size_t i = 24; i < 32; ++i) low = (low << 8) | d[i];
    return low;
}

}  // namespace artism
