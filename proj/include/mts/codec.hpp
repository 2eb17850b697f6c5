#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mts {

// Standard base64 (RFC 4648) with padding.
std::string base64_encode(std::string_view bytes);
// Returns nullopt on any character outside the alphabet, bad padding or a
// length that is not a multiple of four.
std::optional<std::string> base64_decode(std::string_view text);

// Little-endian fixed-width writer for node payloads.
class ByteWriter {
 public:
  void put_u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void put_u16(std::uint16_t v);
  void put_u32(std::uint32_t v);
  void put_i32(std::int32_t v) { put_u32(static_cast<std::uint32_t>(v)); }

  const std::string& bytes() const& { return out_; }
  std::string bytes() && { return std::move(out_); }

 private:
  std::string out_;
};

// Reader counterpart. Each getter throws InputError when the payload is
// too short.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : in_(bytes) {}

  std::uint8_t get_u8();
  std::uint16_t get_u16();
  std::uint32_t get_u32();
  std::int32_t get_i32() { return static_cast<std::int32_t>(get_u32()); }

  std::size_t remaining() const { return in_.size() - pos_; }
  // Throws InputError if unread bytes remain.
  void expect_end() const;

 private:
  void need(std::size_t n) const;

  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace mts
