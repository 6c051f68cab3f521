#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace sxsi {

static_assert(std::endian::native == std::endian::little,
              "index format is little-endian; big-endian hosts need byte swapping");

/// Thrown when serialized data is truncated or inconsistent.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Append-only little-endian byte sink used by every serializable structure.
class Writer {
public:
    template <typename T>
        requires std::is_trivially_copyable_v<T>
    void put(T value) {
        auto const* p = reinterpret_cast<std::uint8_t const*>(&value);
        bytes_.insert(bytes_.end(), p, p + sizeof(T));
    }

    template <typename T>
        requires std::is_trivially_copyable_v<T>
    void put_vector(std::vector<T> const& values) {
        put<std::uint64_t>(values.size());
        auto const* p = reinterpret_cast<std::uint8_t const*>(values.data());
        bytes_.insert(bytes_.end(), p, p + values.size() * sizeof(T));
        align();
    }

    void put_string(std::string_view s) {
        put<std::uint64_t>(s.size());
        bytes_.insert(bytes_.end(), s.begin(), s.end());
        align();
    }

    /// Pads to an 8-byte boundary.
    void align() {
        while (bytes_.size() % 8 != 0) bytes_.push_back(0);
    }

    std::vector<std::uint8_t> const& bytes() const { return bytes_; }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(std::span<std::uint8_t const> data) : data_(data) {}

    template <typename T>
        requires std::is_trivially_copyable_v<T>
    T get() {
        need(sizeof(T));
        T value;
        std::memcpy(&value, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    template <typename T>
        requires std::is_trivially_copyable_v<T>
    std::vector<T> get_vector() {
        auto const n = get<std::uint64_t>();
        if (n > (data_.size() - pos_) / sizeof(T)) throw FormatError("vector length exceeds section");
        std::vector<T> values(n);
        std::memcpy(values.data(), data_.data() + pos_, n * sizeof(T));
        pos_ += n * sizeof(T);
        align();
        return values;
    }

    std::string get_string() {
        auto const n = get<std::uint64_t>();
        need(n);
        std::string s(reinterpret_cast<char const*>(data_.data() + pos_), n);
        pos_ += n;
        align();
        return s;
    }

    void align() {
        pos_ = std::min(data_.size(), (pos_ + 7) / 8 * 8);
    }

    bool at_end() const { return pos_ >= data_.size(); }

private:
    void need(std::size_t n) const {
        if (n > data_.size() - pos_) throw FormatError("unexpected end of serialized data");
    }

    std::span<std::uint8_t const> data_;
    std::size_t pos_ = 0;
};

}  // namespace sxsi
