#pragma once

// Canonical binary encoding shared by events, payloads, blocks and state
// snapshots. All integers are big-endian; variable-length fields carry a u32
// length prefix; optionals carry a 0/1 presence byte. Decoding is strict:
// any input that would not re-encode to the same bytes is rejected.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pl {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void boolean(bool v) { u8(v ? 1 : 0); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }

  /// Length-prefixed.
  void bytes(ByteView v);
  void str(std::string_view v);
  void opt_str(const std::optional<std::string>& v);

  /// Unprefixed.
  void raw(ByteView v) { buf_.insert(buf_.end(), v.begin(), v.end()); }
  template <std::size_t N>
  void fixed(const std::array<std::uint8_t, N>& v) {
    raw(v);
  }

  const Bytes& view() const noexcept { return buf_; }
  Bytes take() && { return std::move(buf_); }

 private:
  Bytes buf_;
};

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  bool boolean();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }

  ByteView bytes();
  std::string str();
  std::optional<std::string> opt_str();
  ByteView raw(std::size_t n);

  template <std::size_t N>
  std::array<std::uint8_t, N> fixed() {
    std::array<std::uint8_t, N> out{};
    auto src = raw(N);
    std::copy(src.begin(), src.end(), out.begin());
    return out;
  }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }
  void expect_end() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace pl
