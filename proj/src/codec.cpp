#include "mts/codec.hpp"

#include <array>

#include "mts/error.hpp"

namespace mts {

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<std::int8_t, 256> make_reverse_table() {
  std::array<std::int8_t, 256> table{};
  for (auto& entry : table) entry = -1;
  for (std::size_t i = 0; i < kAlphabet.size(); ++i)
    table[static_cast<unsigned char>(kAlphabet[i])] = static_cast<std::int8_t>(i);
  return table;
}

constexpr auto kReverse = make_reverse_table();

}  // namespace

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t word = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                               (static_cast<std::uint8_t>(bytes[i + 1]) << 8) |
                               static_cast<std::uint8_t>(bytes[i + 2]);
    out.push_back(kAlphabet[(word >> 18) & 63]);
    out.push_back(kAlphabet[(word >> 12) & 63]);
    out.push_back(kAlphabet[(word >> 6) & 63]);
    out.push_back(kAlphabet[word & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t word = static_cast<std::uint8_t>(bytes[i]) << 16;
    out.push_back(kAlphabet[(word >> 18) & 63]);
    out.push_back(kAlphabet[(word >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t word = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                               (static_cast<std::uint8_t>(bytes[i + 1]) << 8);
    out.push_back(kAlphabet[(word >> 18) & 63]);
    out.push_back(kAlphabet[(word >> 12) & 63]);
    out.push_back(kAlphabet[(word >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::optional<std::string> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) return std::nullopt;
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int pad = 0;
    std::uint32_t word = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        // Padding only in the final quantum, only in the last two slots.
        if (!last || k < 2) return std::nullopt;
        ++pad;
        word <<= 6;
        continue;
      }
      if (pad > 0) return std::nullopt;
      const auto value = kReverse[static_cast<unsigned char>(c)];
      if (value < 0) return std::nullopt;
      word = (word << 6) | static_cast<std::uint32_t>(value);
    }
    out.push_back(static_cast<char>((word >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<char>((word >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<char>(word & 0xff));
    // Reject non-canonical encodings whose discarded bits are set.
    if (pad == 1 && (word & 0xff) != 0) return std::nullopt;
    if (pad == 2 && (word & 0xffff) != 0) return std::nullopt;
  }
  return out;
}

void ByteWriter::put_u16(std::uint16_t v) {
  put_u8(static_cast<std::uint8_t>(v & 0xff));
  put_u8(static_cast<std::uint8_t>(v >> 8));
}

void ByteWriter::put_u32(std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) put_u8(static_cast<std::uint8_t>((v >> shift) & 0xff));
}

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) throw InputError("node payload truncated");
}

std::uint8_t ByteReader::get_u8() {
  need(1);
  return static_cast<std::uint8_t>(in_[pos_++]);
}

std::uint16_t ByteReader::get_u16() {
  need(2);
  const std::uint16_t lo = get_u8();
  const std::uint16_t hi = get_u8();
  return static_cast<std::uint16_t>(lo | (hi << 8));
}

std::uint32_t ByteReader::get_u32() {
  need(4);
  std::uint32_t v = 0;
  for (int shift = 0; shift < 32; shift += 8) v |= static_cast<std::uint32_t>(get_u8()) << shift;
  return v;
}

void ByteReader::expect_end() const {
  if (remaining() != 0) throw InputError("node payload has trailing bytes");
}

}  // namespace mts
