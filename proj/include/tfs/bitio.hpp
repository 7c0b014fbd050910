#pragma once

#include <cstddef>
#include <cstdint>

#include "tfs/bitstring.hpp"
#include "tfs/error.hpp"

namespace tfs {

class BitWriter {
 public:
  void put(uint64_t value, size_t width) {
    for (size_t i = width; i-- > 0;) out_.push_back(i < 64 && ((value >> i) & 1));
  }
  void put_bit(bool b) { out_.push_back(b); }
  void put_bits(const BitString& s) { out_.append(s); }
  BitString take() { return std::move(out_); }
  size_t size() const { return out_.size(); }

 private:
  BitString out_;
};

class BitReader {
 public:
  explicit BitReader(const BitString& in) : in_(in) {}

  uint64_t get(size_t width) {
    if (pos_ + width > in_.size()) fail(ErrorCode::ParseError, "truncated encoding");
    uint64_t v = 0;
    for (size_t i = 0; i < width; ++i) {
      bool b = in_[pos_ + i];
      if (width - i > 64) {
        if (b) fail(ErrorCode::ParseError, "field overflows 64 bits");
        continue;
      }
      v = (v << 1) | (b ? 1 : 0);
    }
    pos_ += width;
    return v;
  }
  bool get_bit() { return get(1) != 0; }
  BitString get_bits(size_t width) {
    if (pos_ + width > in_.size()) fail(ErrorCode::ParseError, "truncated encoding");
    BitString s = in_.substr(pos_, width);
    pos_ += width;
    return s;
  }
  size_t remaining() const { return in_.size() - pos_; }
  void expect_end() const {
    if (pos_ != in_.size()) fail(ErrorCode::ParseError, "trailing bits in encoding");
  }

 private:
  const BitString& in_;
  size_t pos_ = 0;
};

// Number of bits needed to write values 0..v.
inline size_t bits_for(uint64_t v) {
  size_t w = 0;
  while (v) {
    ++w;
    v >>= 1;
  }
  return w;
}

}  // namespace tfs
