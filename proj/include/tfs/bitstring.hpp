#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace tfs {

// Fixed sequence of bits, index 0 is the most significant position.
// Strings of equal length compare lexicographically; shorter strings sort
// first.
class BitString {
 public:
  BitString() = default;
  explicit BitString(size_t length, bool value = false)
      : bits_(length, value ? 1 : 0) {}

  static BitString from_string(std::string_view text);
  static BitString from_uint(uint64_t value, size_t width);
  static BitString from_hex(std::string_view hex, size_t length);

  size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](size_t i) const { return bits_[i] != 0; }
  void set(size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void push_back(bool v) { bits_.push_back(v ? 1 : 0); }
  void append(const BitString& other);
  void resize(size_t length) { bits_.resize(length, 0); }

  BitString substr(size_t pos, size_t length) const;
  uint64_t to_uint() const;
  bool all_zero() const;

  // Lexicographic successor among strings of the same length.
  // Returns false (and wraps to all-zero) on overflow.
  bool increment();

  std::string to_string() const;
  std::string to_hex() const;

  const std::vector<uint8_t>& raw() const { return bits_; }

  friend bool operator==(const BitString& a, const BitString& b) = default;
  friend std::strong_ordering operator<=>(const BitString& a,
                                          const BitString& b);

 private:
  std::vector<uint8_t> bits_;
};

BitString concat(const BitString& a, const BitString& b);

struct BitStringHash {
  size_t operator()(const BitString& s) const;
};

}  // namespace tfs
