#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ftsc/errors.hpp"
#include "ftsc/experiment.hpp"
#include "ftsc/scheme.hpp"
#include "ftsc/st_labels.hpp"
#include "ftsc/warmup.hpp"

namespace ftsc {

/// Container: "FTSF", version byte, scheme byte, two zero bytes, record count (u64 LE),
/// count + 1 offsets (u64 LE, relative to the first record), then the records in vertex order.
class LabelFileWriter {
 public:
  static void write(const std::string& path, SchemeKind scheme, const std::vector<Bytes>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write label file '" + path + "'");
    out.write("FTSF", 4);
    const char head[4] = {1, static_cast<char>(scheme == SchemeKind::Main ? 0 : 1), 0, 0};
    out.write(head, 4);
    put_u64(out, records.size());
    std::uint64_t offset = 0;
    put_u64(out, offset);
    for (const auto& r : records) {
      offset += r.size();
      put_u64(out, offset);
    }
    for (const auto& r : records) out.write(reinterpret_cast<const char*>(r.data()), static_cast<std::streamsize>(r.size()));
    if (!out) throw Error("failed writing label file '" + path + "'");
  }

 private:
  static void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), 8);
  }
};

/// Random access to single records; reads only the header, two index slots and the record.
class LabelFileReader {
 public:
  explicit LabelFileReader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw Error("cannot open label file '" + path + "'");
    char magic[8];
    if (!in_.read(magic, 8) || std::string(magic, 4) != "FTSF") throw MalformedBits("not a label file");
    if (magic[4] != 1) throw MalformedBits("unsupported label file version");
    if (magic[5] != 0 && magic[5] != 1) throw MalformedBits("unknown scheme tag in label file");
    scheme_ = magic[5] == 0 ? SchemeKind::Main : SchemeKind::Warmup;
    count_ = get_u64();
    in_.seekg(0, std::ios::end);
    file_size_ = static_cast<std::uint64_t>(in_.tellg());
    if (count_ > file_size_ / 8) throw MalformedBits("label file index larger than the file");
    data_start_ = 16 + 8 * (count_ + 1);
  }

  SchemeKind scheme() const { return scheme_; }
  std::size_t size() const { return static_cast<std::size_t>(count_); }

  Bytes record(Vertex v) {
    if (v >= count_) throw Error("vertex " + std::to_string(v) + " has no label in this file");
    in_.seekg(static_cast<std::streamoff>(16 + 8 * std::uint64_t{v}));
    const auto begin = get_u64();
    const auto end = get_u64();
    if (end < begin || data_start_ + end > file_size_) throw MalformedBits("label file index out of range");
    Bytes out(static_cast<std::size_t>(end - begin));
    in_.seekg(static_cast<std::streamoff>(data_start_ + begin));
    if (!in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size())))
      throw MalformedBits("truncated label record");
    return out;
  }

 private:
  std::uint64_t get_u64() {
    unsigned char b[8];
    if (!in_.read(reinterpret_cast<char*>(b), 8)) throw MalformedBits("truncated label file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | b[i];
    return v;
  }

  std::ifstream in_;
  SchemeKind scheme_ = SchemeKind::Main;
  std::uint64_t count_ = 0;
  std::uint64_t file_size_ = 0;
  std::uint64_t data_start_ = 0;
};

inline void write_label_file(const std::string& path, std::span<const SchemeLabel> labels) {
  std::vector<Bytes> records;
  for (const auto& l : labels) records.push_back(serialize_label(l));
  LabelFileWriter::write(path, SchemeKind::Main, records);
}

inline void write_warmup_label_file(const std::string& path, const std::vector<WarmupRef>& labels, std::size_t f) {
  std::vector<Bytes> records;
  for (const auto& l : labels) records.push_back(serialize_warmup_label(*l, labels.size(), f));
  LabelFileWriter::write(path, SchemeKind::Warmup, records);
}

}  // namespace ftsc
