#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "ftsc/errors.hpp"

namespace ftsc {

/// Number of bits needed to write any value in [0, count), at least 0.
inline unsigned bits_for(std::uint64_t count) {
  return count <= 1 ? 0u : static_cast<unsigned>(std::bit_width(count - 1));
}

/// Append-only bit string, LSB-first within each byte.
class BitString {
 public:
  BitString() = default;
  BitString(std::vector<std::uint8_t> bytes, std::size_t bit_count)
      : bytes_(std::move(bytes)), size_(bit_count) {
    if (bytes_.size() != (size_ + 7) / 8) throw MalformedBits("bit string length mismatch");
  }

  void push(bool bit) {
    if (size_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_[size_ / 8] |= static_cast<std::uint8_t>(1u << (size_ % 8));
    ++size_;
  }

  void push(std::uint64_t value, unsigned width) {
    for (unsigned i = 0; i < width; ++i) push(((value >> i) & 1u) != 0);
  }

  bool operator[](std::size_t i) const { return (bytes_[i / 8] >> (i % 8)) & 1u; }
  void flip(std::size_t i) { bytes_[i / 8] ^= static_cast<std::uint8_t>(1u << (i % 8)); }
  std::size_t size() const { return size_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const BitString& bits) : bits_(bits) {}

  std::uint64_t read(unsigned width) {
    if (remaining() < width) throw MalformedBits("bit string truncated");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v |= std::uint64_t{bits_[pos_++]} << i;
    return v;
  }

  std::size_t remaining() const { return bits_.size() - pos_; }

 private:
  const BitString& bits_;
  std::size_t pos_ = 0;
};

/// Little-endian base-128 varints and raw bytes.
class ByteWriter {
 public:
  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      out_.push_back(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void byte(std::uint8_t b) { out_.push_back(b); }
  void raw(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  void blob(std::span<const std::uint8_t> bytes) {
    varint(bytes.size());
    raw(bytes);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t>& bytes() { return out_; }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (unsigned shift = 0; shift < 64; shift += 7) {
      std::uint8_t b = byte();
      v |= std::uint64_t{b & 0x7fu} << shift;
      if ((b & 0x80) == 0) return v;
    }
    throw MalformedBits("varint too long");
  }

  /// Varint that must fit below `limit`.
  std::uint64_t varint_below(std::uint64_t limit, const char* what) {
    auto v = varint();
    if (v >= limit) throw MalformedBits(std::string(what) + " out of range");
    return v;
  }

  std::uint8_t byte() {
    if (pos_ >= in_.size()) throw MalformedBits("unexpected end of input");
    return in_[pos_++];
  }

  std::span<const std::uint8_t> raw(std::size_t count) {
    if (in_.size() - pos_ < count) throw MalformedBits("unexpected end of input");
    auto out = in_.subspan(pos_, count);
    pos_ += count;
    return out;
  }

  std::span<const std::uint8_t> blob() { return raw(varint_below(in_.size() - pos_ + 1, "blob length")); }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{byte()} << (8 * i);
    return v;
  }

  bool done() const { return pos_ == in_.size(); }
  std::size_t position() const { return pos_; }

  void expect_done() const {
    if (!done()) throw MalformedBits("trailing bytes after record");
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

inline void write_bits(ByteWriter& out, const BitString& bits) {
  out.varint(bits.size());
  out.raw(bits.bytes());
}

inline BitString read_bits(ByteReader& in) {
  auto count = in.varint();
  auto bytes = in.raw(static_cast<std::size_t>((count + 7) / 8));
  BitString bits(std::vector<std::uint8_t>(bytes.begin(), bytes.end()), static_cast<std::size_t>(count));
  if (count % 8 != 0 && (bits.bytes().back() >> (count % 8)) != 0)
    throw MalformedBits("nonzero padding bits");
  return bits;
}

}  // namespace ftsc
