#pragma once
// 64-bit FNV-1a, used for medium fingerprints and file checksums.

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>

namespace wk {

class Fnv1a64 {
public:
    void update(const void* data, std::size_t n) {
        auto p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    template <class T>
    void update_value(const T& v) {
        update(&v, sizeof(T));
    }
    void update(std::span<const double> v) { update(v.data(), v.size_bytes()); }

    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

}  // namespace wk
