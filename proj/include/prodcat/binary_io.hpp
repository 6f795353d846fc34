#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "prodcat/common.hpp"

namespace prodcat {

// Little-endian binary encoding used by the model archive. Doubles are written
// as their raw IEEE-754 bits, so round-trips are exact.
class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) { write_le(v); }
    void u64(std::uint64_t v) { write_le(v); }
    void i32(std::int32_t v) { write_le(static_cast<std::uint32_t>(v)); }
    void f64(double v) { write_le(std::bit_cast<std::uint64_t>(v)); }

    void str(const std::string& s) {
        u64(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

    void f64_vec(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }

    void feature(const FeatureVector& v) {
        u64(v.dim);
        u64(v.entries.size());
        for (const auto& [idx, val] : v.entries) {
            u32(idx);
            f64(val);
        }
    }

private:
    template <typename T>
    void write_le(T v) {
        char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        }
        out_.write(buf, sizeof(T));
    }

    std::ostream& out_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::istream& in) : in_(in) {}

    std::uint8_t u8() {
        int c = in_.get();
        if (c == EOF) fail();
        return static_cast<std::uint8_t>(c);
    }
    std::uint32_t u32() { return read_le<std::uint32_t>(); }
    std::uint64_t u64() { return read_le<std::uint64_t>(); }
    std::int32_t i32() { return static_cast<std::int32_t>(read_le<std::uint32_t>()); }
    double f64() { return std::bit_cast<double>(read_le<std::uint64_t>()); }

    std::string str() {
        std::uint64_t n = u64();
        std::string s(n, '\0');
        in_.read(s.data(), static_cast<std::streamsize>(n));
        if (static_cast<std::uint64_t>(in_.gcount()) != n) fail();
        return s;
    }

    std::vector<double> f64_vec() {
        std::uint64_t n = u64();
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }

    FeatureVector feature() {
        FeatureVector v;
        v.dim = u64();
        std::uint64_t n = u64();
        v.entries.resize(n);
        for (auto& [idx, val] : v.entries) {
            idx = u32();
            val = f64();
        }
        return v;
    }

private:
    template <typename T>
    T read_le() {
        char buf[sizeof(T)];
        in_.read(buf, sizeof(T));
        if (in_.gcount() != sizeof(T)) fail();
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(static_cast<unsigned char>(buf[i])) << (8 * i);
        }
        return v;
    }

    [[noreturn]] void fail() { throw DataError("archive truncated: unexpected end of stream"); }

    std::istream& in_;
};

}  // namespace prodcat
