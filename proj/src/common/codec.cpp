#include "pl/common/codec.hpp"

#include <limits>

namespace pl {

void Writer::u16(std::uint16_t v) {
  u8(static_cast<std::uint8_t>(v >> 8));
  u8(static_cast<std::uint8_t>(v));
}

void Writer::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) u8(static_cast<std::uint8_t>(v >> shift));
}

void Writer::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) u8(static_cast<std::uint8_t>(v >> shift));
}

void Writer::bytes(ByteView v) {
  if (v.size() > std::numeric_limits<std::uint32_t>::max())
    throw std::length_error("field exceeds u32 length prefix");
  u32(static_cast<std::uint32_t>(v.size()));
  raw(v);
}

void Writer::str(std::string_view v) { bytes(as_bytes(v)); }

void Writer::opt_str(const std::optional<std::string>& v) {
  boolean(v.has_value());
  if (v) str(*v);
}

ByteView Reader::raw(std::size_t n) {
  if (remaining() < n) throw DecodeError("truncated input");
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t Reader::u8() { return raw(1)[0]; }

bool Reader::boolean() {
  auto v = u8();
  if (v > 1) throw DecodeError("non-canonical boolean");
  return v == 1;
}

std::uint16_t Reader::u16() {
  auto b = raw(2);
  return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t Reader::u32() {
  auto b = raw(4);
  std::uint32_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t Reader::u64() {
  auto b = raw(8);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

ByteView Reader::bytes() { return raw(u32()); }

std::string Reader::str() {
  auto b = bytes();
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

std::optional<std::string> Reader::opt_str() {
  if (!boolean()) return std::nullopt;
  return str();
}

void Reader::expect_end() const {
  if (remaining() != 0) throw DecodeError("trailing bytes");
}

}  // namespace pl
