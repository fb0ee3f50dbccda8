#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowtrace {

/// Fixed-width bit vector. Serialized as hex with nibble j covering bit
/// indices 4j..4j+3, index 4j being the nibble's MSB.
class Bits {
public:
    Bits() = default;
    explicit Bits(int width) : width_(width), words_((width + 63) / 64, 0) {}

    int width() const { return width_; }

    bool get(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    void set(int i, bool v) {
        std::uint64_t bit = std::uint64_t{1} << (i & 63);
        if (v)
            words_[i >> 6] |= bit;
        else
            words_[i >> 6] &= ~bit;
    }

    void setByte(int lo, std::uint8_t value) {
        // MSB of the byte lands at index lo
        for (int k = 0; k < 8; ++k) set(lo + k, (value >> (7 - k)) & 1);
    }

    std::uint8_t getByte(int lo) const {
        std::uint8_t v = 0;
        for (int k = 0; k < 8; ++k) v = static_cast<std::uint8_t>((v << 1) | get(lo + k));
        return v;
    }

    void setWord(int lo, int n, std::uint64_t value) {
        for (int k = 0; k < n; ++k) set(lo + k, (value >> (n - 1 - k)) & 1);
    }

    bool any() const {
        for (std::uint64_t w : words_)
            if (w) return true;
        return false;
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (int i = 0; i < width_; ++i) n += get(i);
        return n;
    }

    bool subsetOf(const Bits& o) const {
        if (width_ != o.width_) return false;
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    bool operator==(const Bits& o) const { return width_ == o.width_ && words_ == o.words_; }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out;
        int nibbles = (width_ + 3) / 4;
        out.reserve(nibbles);
        for (int j = 0; j < nibbles; ++j) {
            int v = 0;
            for (int k = 0; k < 4; ++k) {
                int idx = 4 * j + k;
                v = (v << 1) | ((idx < width_ && get(idx)) ? 1 : 0);
            }
            out += digits[v];
        }
        return out;
    }

    static Bits fromHex(const std::string& hex, int width) {
        Bits out(width);
        int nibbles = (width + 3) / 4;
        if (static_cast<int>(hex.size()) != nibbles)
            throw std::runtime_error("hex state width mismatch: got " +
                                     std::to_string(hex.size() * 4) + " bits, expected " +
                                     std::to_string(width));
        for (int j = 0; j < nibbles; ++j) {
            char c = hex[j];
            int v;
            if (c >= '0' && c <= '9')
                v = c - '0';
            else if (c >= 'a' && c <= 'f')
                v = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F')
                v = c - 'A' + 10;
            else
                throw std::runtime_error(std::string("bad hex digit '") + c + "'");
            for (int k = 0; k < 4; ++k) {
                int idx = 4 * j + k;
                bool bit = (v >> (3 - k)) & 1;
                if (idx < width)
                    out.set(idx, bit);
                else if (bit)
                    throw std::runtime_error("nonzero padding bits in hex state");
            }
        }
        return out;
    }

private:
    int width_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace flowtrace
