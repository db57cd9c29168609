#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace artism {

using Json = nlohmann::json;

/// Unicode NFC normalization of a UTF-8 string. Pure ASCII input is returned unchanged.
std::string nfc(std::string_view text);

/// Canonical serialization used by the event log, snapshots, and request digests:
/// keys sorted by code point, no insignificant whitespace, integers in base 10,
/// reals as shortest round-trip decimals, strings (and keys) NFC-normalized.
std::string canonical_dump(const Json& value);

/// Incremental SHA-256.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256& other);
    Sha256& operator=(const Sha256& other);
    Sha256(Sha256&&) noexcept;
    Sha256& operator=(Sha256&&) noexcept;

    void update(std::string_view bytes);
    std::array<std::uint8_t, 32> digest() const;
    std::string hex_digest() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(std::string_view bytes);
std::array<std::uint8_t, 32> sha256_bytes(std::string_view bytes);
std::string to_hex(const std::uint8_t* data, std::size_t size);

}  // namespace artism
