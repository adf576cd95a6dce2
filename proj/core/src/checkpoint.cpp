#include "cqrl/checkpoint.hpp"

#include <cstdio>
#include <cstring>

#include <json.hpp>

namespace cqrl {

namespace {

constexpr char kMagic[4] = {'C', 'Q', 'R', 'L'};
constexpr uint32_t kFormatVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_u32(std::FILE* f, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  if (std::fwrite(b, 1, 4, f) != 4) throw Error("checkpoint: write failed");
}

uint32_t read_u32(std::FILE* f, const char* what) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, f) != 4) throw Error(std::string("checkpoint: truncated ") + what);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_str(std::FILE* f, const std::string& s) {
  write_u32(f, static_cast<uint32_t>(s.size()));
  if (!s.empty() && std::fwrite(s.data(), 1, s.size(), f) != s.size())
    throw Error("checkpoint: write failed");
}

std::string read_str(std::FILE* f, const char* what) {
  const uint32_t n = read_u32(f, what);
  std::string s(n, '\0');
  if (n && std::fread(s.data(), 1, n, f) != n)
    throw Error(std::string("checkpoint: truncated ") + what);
  return s;
}

nlohmann::json meta_json(const CheckpointMeta& m) {
  return {{"config_hash", m.config_hash},
          {"step", m.step},
          {"seed", m.seed},
          {"algorithm", m.algorithm}};
}

CheckpointMeta meta_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CheckpointMeta m;
  m.config_hash = j.at("config_hash").get<std::string>();
  m.step = j.at("step").get<long>();
  m.seed = j.at("seed").get<uint64_t>();
  m.algorithm = j.at("algorithm").get<std::string>();
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const std::vector<std::pair<std::string, ParameterStorePtr>>& sections) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error("checkpoint: cannot open '" + path + "' for writing");
  if (std::fwrite(kMagic, 1, 4, f.get()) != 4) throw Error("checkpoint: write failed");
  write_u32(f.get(), kFormatVersion);
  write_str(f.get(), meta_json(meta).dump());
  write_u32(f.get(), static_cast<uint32_t>(sections.size()));
  for (const auto& [name, store] : sections) {
    write_str(f.get(), name);
    write_u32(f.get(), static_cast<uint32_t>(store->size()));
    for (int i = 0; i < store->size(); ++i) {
      write_str(f.get(), store->name(i));
      const auto& shape = store->value(i).shape;
      write_u32(f.get(), static_cast<uint32_t>(shape.size()));
      for (int d : shape) write_u32(f.get(), static_cast<uint32_t>(d));
    }
    for (int i = 0; i < store->size(); ++i) {
      const auto& data = store->value(i).data;
      // float32 values are written verbatim; the build targets little-endian
      if (std::fwrite(data.data(), sizeof(float), data.size(), f.get()) != data.size())
        throw Error("checkpoint: write failed");
    }
  }
}

CheckpointMeta peek_checkpoint(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error("checkpoint: cannot open '" + path + "'");
  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, kMagic, 4) != 0)
    throw Error("checkpoint: bad magic in '" + path + "'");
  const uint32_t ver = read_u32(f.get(), "format version");
  if (ver != kFormatVersion)
    throw Error("checkpoint: unsupported format version " + std::to_string(ver));
  return meta_from_json(read_str(f.get(), "metadata"));
}

CheckpointMeta load_checkpoint(
    const std::string& path,
    const std::vector<std::pair<std::string, ParameterStorePtr>>& sections,
    const std::string& expected_hash, bool force) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error("checkpoint: cannot open '" + path + "'");
  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, kMagic, 4) != 0)
    throw Error("checkpoint: bad magic in '" + path + "'");
  const uint32_t ver = read_u32(f.get(), "format version");
  if (ver != kFormatVersion)
    throw Error("checkpoint: unsupported format version " + std::to_string(ver));
  const CheckpointMeta meta = meta_from_json(read_str(f.get(), "metadata"));
  if (!force && !expected_hash.empty() && meta.config_hash != expected_hash)
    throw Error("checkpoint: config hash mismatch (" + meta.config_hash + " vs expected " +
                expected_hash + "); pass force to load anyway");

  const uint32_t n_sections = read_u32(f.get(), "section count");
  if (n_sections != sections.size())
    throw Error("checkpoint: section count mismatch in '" + path + "'");
  for (const auto& [name, store] : sections) {
    const std::string got = read_str(f.get(), "section name");
    if (got != name) throw Error("checkpoint: section '" + got + "' where '" + name +
                                 "' expected");
    const uint32_t n_params = read_u32(f.get(), "parameter count");
    if (static_cast<int>(n_params) != store->size())
      throw Error("checkpoint: parameter count mismatch in section '" + name + "'");
    for (int i = 0; i < store->size(); ++i) {
      const std::string pname = read_str(f.get(), "parameter name");
      if (pname != store->name(i))
        throw Error("checkpoint: parameter '" + pname + "' where '" + store->name(i) +
                    "' expected in section '" + name + "'");
      const uint32_t ndim = read_u32(f.get(), "rank");
      std::vector<int> shape(ndim);
      for (auto& d : shape) d = static_cast<int>(read_u32(f.get(), "dimension"));
      if (shape != store->value(i).shape)
        throw Error("checkpoint: shape mismatch for '" + pname + "' in section '" + name + "'");
    }
    for (int i = 0; i < store->size(); ++i) {
      auto& data = store->value(i).data;
      if (std::fread(data.data(), sizeof(float), data.size(), f.get()) != data.size())
        throw Error("checkpoint: truncated data in section '" + name + "'");
    }
  }
  return meta;
}

}  // namespace cqrl
