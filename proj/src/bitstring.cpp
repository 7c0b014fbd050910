#include "tfs/bitstring.hpp"

#include <algorithm>

#include "tfs/error.hpp"

namespace tfs {

BitString BitString::from_string(std::string_view text) {
  BitString out;
  out.bits_.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1')
      fail(ErrorCode::ParseError, "bit string may only contain 0 and 1");
    out.bits_.push_back(c == '1');
  }
  return out;
}

BitString BitString::from_uint(uint64_t value, size_t width) {
  BitString out(width);
  for (size_t i = 0; i < width; ++i) {
    size_t shift = width - 1 - i;
    out.bits_[i] = shift < 64 ? (value >> shift) & 1 : 0;
  }
  return out;
}

BitString BitString::from_hex(std::string_view hex, size_t length) {
  if (hex.size() * 4 < length)
    fail(ErrorCode::ParseError, "hex string shorter than declared length");
  BitString out(length);
  for (size_t i = 0; i < length; ++i) {
    char c = hex[i / 4];
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else fail(ErrorCode::ParseError, "bad hex digit");
    out.bits_[i] = (v >> (3 - i % 4)) & 1;
  }
  return out;
}

void BitString::append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

BitString BitString::substr(size_t pos, size_t length) const {
  if (pos + length > bits_.size())
    fail(ErrorCode::InputError, "substr out of range");
  BitString out;
  out.bits_.assign(bits_.begin() + pos, bits_.begin() + pos + length);
  return out;
}

uint64_t BitString::to_uint() const {
  if (bits_.size() > 64) fail(ErrorCode::InputError, "bit string wider than 64");
  uint64_t v = 0;
  for (uint8_t b : bits_) v = (v << 1) | b;
  return v;
}

bool BitString::all_zero() const {
  return std::all_of(bits_.begin(), bits_.end(), [](uint8_t b) { return b == 0; });
}

bool BitString::increment() {
  for (size_t i = bits_.size(); i-- > 0;) {
    if (bits_[i] == 0) {
      bits_[i] = 1;
      return true;
    }
    bits_[i] = 0;
  }
  return false;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (uint8_t b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::string BitString::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (size_t i = 0; i < bits_.size(); i += 4) {
    int v = 0;
    for (size_t k = 0; k < 4; ++k) {
      v <<= 1;
      if (i + k < bits_.size()) v |= bits_[i + k];
    }
    s.push_back(digits[v]);
  }
  return s;
}

std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) return a.size() <=> b.size();
  return std::lexicographical_compare_three_way(a.bits_.begin(), a.bits_.end(),
                                                b.bits_.begin(), b.bits_.end());
}

BitString concat(const BitString& a, const BitString& b) {
  BitString out = a;
  out.append(b);
  return out;
}

size_t BitStringHash::operator()(const BitString& s) const {
  // FNV-1a over bits packed into bytes
  uint64_t h = 1469598103934665603ull ^ s.size();
  const auto& raw = s.raw();
  for (size_t i = 0; i < raw.size(); i += 8) {
    uint8_t byte = 0;
    for (size_t k = 0; k < 8 && i + k < raw.size(); ++k)
      byte |= raw[i + k] << k;
    h ^= byte;
    h *= 1099511628211ull;
  }
  return static_cast<size_t>(h);
}

}  // namespace tfs
