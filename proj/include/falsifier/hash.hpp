#pragma once

// 64-bit FNV-1a, used for dataset fingerprints and run-manifest hashes.
// Not cryptographic: it identifies content for audit trails, nothing more.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace falsifier {

class Fnv1a {
public:
    void update(const void* data, std::size_t size) noexcept {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            state_ ^= bytes[i];
            state_ *= 0x100000001B3ULL;
        }
    }
    void update(std::string_view s) noexcept { update(s.data(), s.size()); }
    void update(double v) noexcept {
        unsigned char buf[sizeof(double)];
        std::memcpy(buf, &v, sizeof(double));
        update(buf, sizeof(buf));
    }
    void update_u64(std::uint64_t v) noexcept { update(&v, sizeof(v)); }

    std::uint64_t digest() const noexcept { return state_; }

    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

inline std::string fnv1a_hex(std::string_view s) {
    Fnv1a h;
    h.update(s);
    return h.hex();
}

}  // namespace falsifier
