#include "artism/canonical.hpp"

#include <openssl/evp.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <stdexcept>

namespace artism {

namespace {

bool is_ascii(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

const icu::Normalizer2& nfc_normalizer() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || normalizer == nullptr) throw std::runtime_error("ICU NFC normalizer unavailable");
    return *normalizer;
}

Json normalized(const Json& value) {
    switch (value.type()) {
        case Json::value_t::string:
            return nfc(value.get_ref<const std::string&>());
        case Json::value_t::array: {
            Json out = Json::array();
            for (const auto& item : value) out.push_back(normalized(item));
            return out;
        }
        case Json::value_t::object: {
            Json out = Json::object();
            for (const auto& [key, item] : value.items()) out[nfc(key)] = normalized(item);
            return out;
        }
        default:
            return value;
    }
}

}  // namespace

std::string nfc(std::string_view text) {
    if (is_ascii(text)) return std::string(text);
    UErrorCode status = U_ZERO_ERROR;
    const auto& normalizer = nfc_normalizer();
    icu::UnicodeString source = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    if (normalizer.isNormalized(source, status) && U_SUCCESS(status)) return std::string(text);
    status = U_ZERO_ERROR;
    icu::UnicodeString result = normalizer.normalize(source, status);
    if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
    std::string out;
    result.toUTF8String(out);
    return out;
}

std::string canonical_dump(const Json& value) {
    // nlohmann::json objects are std::map-backed, so keys already iterate in byte
    // order, which for UTF-8 coincides with code point order.
    return normalized(value).dump();
}

struct Sha256::Impl {
    EVP_MD_CTX* ctx = nullptr;
    Impl() : ctx(EVP_MD_CTX_new()) {
        if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 init failed");
    }
    Impl(const Impl& other) : ctx(EVP_MD_CTX_new()) {
        if (ctx == nullptr || EVP_MD_CTX_copy_ex(ctx, other.ctx) != 1) throw std::runtime_error("SHA-256 copy failed");
    }
    ~Impl() { EVP_MD_CTX_free(ctx); }
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {}
Sha256::~Sha256() = default;
Sha256::Sha256(const Sha256& other) : impl_(std::make_unique<Impl>(*other.impl_)) {}
Sha256& Sha256::operator=(const Sha256& other) {
    if (this != &other) impl_ = std::make_unique<Impl>(*other.impl_);
    return *this;
}
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

void Sha256::update(std::string_view bytes) {
    if (EVP_DigestUpdate(impl_->ctx, bytes.data(), bytes.size()) != 1) throw std::runtime_error("SHA-256 update failed");
}

std::array<std::uint8_t, 32> Sha256::digest() const {
    Impl copy(*impl_);
    std::array<std::uint8_t, 32> out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(copy.ctx, out.data(), &len) != 1 || len != out.size()) throw std::runtime_error("SHA-256 final failed");
    return out;
}

std::string Sha256::hex_digest() const {
    const auto d = digest();
    return to_hex(d.data(), d.size());
}

std::string to_hex(const std::uint8_t* data, std::size_t size) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(size * 2);
    for (std::size_t i = 0; i < size; ++i) {
        out.push_back(kDigits[data[i] >> 4]);
        out.push_back(kDigits[data[i] & 0x0f]);
    }
    return out;
}

std::string sha256_hex(std::string_view bytes) {
    Sha256 h;
    h.update(bytes);
    return h.hex_digest();
}

std::array<std::uint8_t, 32> sha256_bytes(std::string_view bytes) {
    Sha256 h;
    h.update(bytes);
    return h.digest();
}

}  // namespace artism
