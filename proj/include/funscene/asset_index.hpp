#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "funscene/error.hpp"
#include "funscene/random.hpp"

namespace funscene {

static_assert(std::endian::native == std::endian::little, "index I/O assumes a little-endian host");

// Exhaustive-scan store of per-asset text and image vectors.
//
// File layout (little endian):
//   "SFEI" | version u32 | dim u32 | count u64
//   count x (length u32, UTF-8 id bytes)
//   count x dim f32 text matrix, row major
//   count x dim f32 image matrix, row major
class EmbeddingIndex {
 public:
  static constexpr char kMagic[4] = {'S', 'F', 'E', 'I'};
  static constexpr std::uint32_t kVersion = 1;

  EmbeddingIndex() = default;
  explicit EmbeddingIndex(std::uint32_t dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("embedding dimension must be positive");
  }

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::string>& ids() const { return ids_; }

  std::span<const float> text_vec(std::size_t row) const { return {text_.data() + row * dim_, dim_}; }
  std::span<const float> image_vec(std::size_t row) const { return {image_.data() + row * dim_, dim_}; }

  std::optional<std::size_t> row_of(const std::string& id) const {
    const auto it = rows_.find(id);
    if (it == rows_.end()) return std::nullopt;
    return it->second;
  }

  void add(const std::string& id, std::span<const float> text, std::span<const float> image) {
    if (dim_ == 0) throw InvalidArgument("index has no dimension");
    if (text.size() != dim_ || image.size() != dim_)
      throw InvalidArgument("dimension mismatch for entry " + id);
    auto finite = [](std::span<const float> v) {
      return std::all_of(v.begin(), v.end(), [](float f) { return std::isfinite(f); });
    };
    if (!finite(text) || !finite(image)) throw InvalidArgument("non-finite value in entry " + id);
    if (!rows_.emplace(id, ids_.size()).second) throw InvalidArgument("duplicate entry " + id);
    ids_.push_back(id);
    text_.insert(text_.end(), text.begin(), text.end());
    image_.insert(image_.end(), image.begin(), image.end());
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write index " + path.string());
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, dim_);
    put(out, static_cast<std::uint64_t>(ids_.size()));
    for (const auto& id : ids_) {
      put(out, static_cast<std::uint32_t>(id.size()));
      out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    out.write(reinterpret_cast<const char*>(text_.data()), static_cast<std::streamsize>(text_.size() * 4));
    out.write(reinterpret_cast<const char*>(image_.data()), static_cast<std::streamsize>(image_.size() * 4));
    if (!out) throw IoError("short write on index " + path.string());
  }

  static EmbeddingIndex load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open index " + path.string());
    const std::string where = path.string();
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ParseError(where + ": corrupt header (bad magic)");
    const auto version = get<std::uint32_t>(in, where);
    if (version != kVersion) throw ParseError(where + ": unsupported version " + std::to_string(version));
    const auto dim = get<std::uint32_t>(in, where);
    const auto count = get<std::uint64_t>(in, where);
    if (dim == 0) throw ParseError(where + ": corrupt header (zero dimension)");
    // Guard against absurd counts before allocating.
    const auto file_size = std::filesystem::file_size(path);
    if (count > file_size / 4) throw ParseError(where + ": corrupt header (entry count exceeds file size)");

    EmbeddingIndex index(dim);
    std::vector<std::string> ids(count);
    for (auto& id : ids) {
      const auto len = get<std::uint32_t>(in, where);
      if (len > file_size) throw ParseError(where + ": corrupt id table");
      id.resize(len);
      if (!in.read(id.data(), len)) throw ParseError(where + ": truncated id table");
    }
    const std::size_t cells = static_cast<std::size_t>(count) * dim;
    std::vector<float> text(cells), image(cells);
    if (!in.read(reinterpret_cast<char*>(text.data()), static_cast<std::streamsize>(cells * 4)) ||
        !in.read(reinterpret_cast<char*>(image.data()), static_cast<std::streamsize>(cells * 4)))
      throw ParseError(where + ": truncated vector data (dimension mismatch?)");
    if (in.peek() != std::char_traits<char>::eof()) throw ParseError(where + ": trailing bytes (dimension mismatch?)");
    for (std::size_t r = 0; r < count; ++r) {
      try {
        index.add(ids[r], {text.data() + r * dim, dim}, {image.data() + r * dim, dim});
      } catch (const InvalidArgument& e) {
        throw ParseError(where + ": " + e.what());
      }
    }
    return index;
  }

  // Tabular dump: one entry per line, "id<TAB>t1,t2,...<TAB>i1,i2,...".
  // Blank lines and lines starting with '#' are skipped.
  static EmbeddingIndex import_tabular(std::istream& in) {
    EmbeddingIndex index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::istringstream cols(line);
      std::string id, text_col, image_col, extra;
      if (!std::getline(cols, id, '\t') || !std::getline(cols, text_col, '\t') || !std::getline(cols, image_col, '\t') ||
          std::getline(cols, extra, '\t'))
        throw ParseError("line " + std::to_string(lineno) + ": expected 3 tab-separated columns");
      const auto text = parse_floats(text_col, lineno);
      const auto image = parse_floats(image_col, lineno);
      if (index.dim_ == 0) {
        if (text.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty vector");
        index.dim_ = static_cast<std::uint32_t>(text.size());
      }
      try {
        index.add(id, text, image);
      } catch (const InvalidArgument& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (index.dim_ == 0) throw ParseError("no entries in tabular dump");
    return index;
  }

 private:
  template <typename T>
  static void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  template <typename T>
  static T get(std::istream& in, const std::string& where) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError(where + ": corrupt header (truncated)");
    return v;
  }
  static std::vector<float> parse_floats(const std::string& col, std::size_t lineno) {
    std::vector<float> out;
    std::istringstream in(col);
    std::string cell;
    while (std::getline(in, cell, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stof(cell, &used));
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    return out;
  }

  std::uint32_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> text_;
  std::vector<float> image_;
  std::map<std::string, std::size_t> rows_;
};

struct QueryVectors {
  std::vector<float> text;       // for text-text similarity
  std::vector<float> for_image;  // for text-image similarity
};

struct Candidate {
  std::string asset_id;
  double score = 0.0;
  bool operator==(const Candidate&) const = default;
};

inline double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw InvalidArgument("vector dimensions differ");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0.0 || bb == 0.0) throw InvalidArgument("zero-norm vector in cosine similarity");
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

// Weighted mean of the text-text and text-image cosines; weight 0.5 is the
// plain average.
inline double ensemble_score(const QueryVectors& q, const EmbeddingIndex& index, std::size_t row,
                             double text_weight = 0.5) {
  return text_weight * cosine(q.text, index.text_vec(row)) +
         (1.0 - text_weight) * cosine(q.for_image, index.image_vec(row));
}

inline std::vector<Candidate> score_all(const QueryVectors& q, const EmbeddingIndex& index, double text_weight = 0.5) {
  std::vector<Candidate> out;
  out.reserve(index.size());
  for (std::size_t r = 0; r < index.size(); ++r) out.push_back({index.ids()[r], ensemble_score(q, index, r, text_weight)});
  return out;
}

inline bool candidate_order(const Candidate& a, const Candidate& b) {
  return a.score > b.score || (a.score == b.score && a.asset_id < b.asset_id);
}

// Highest ensemble score; ties go to the lexicographically smallest id.
inline std::string retrieve_best(const QueryVectors& q, const EmbeddingIndex& index, double text_weight = 0.5) {
  if (index.empty()) throw InvalidArgument("cannot retrieve from an empty index");
  const auto scored = score_all(q, index, text_weight);
  return std::min_element(scored.begin(), scored.end(), candidate_order)->asset_id;
}

// Every entry scoring strictly above `threshold`, best first.
inline std::vector<Candidate> retrieve_candidates(const QueryVectors& q, const EmbeddingIndex& index, double threshold,
                                                  double text_weight = 0.5) {
  if (!(threshold >= -1.0 && threshold <= 1.0)) throw InvalidArgument("threshold must lie in [-1, 1]");
  auto scored = score_all(q, index, text_weight);
  std::erase_if(scored, [&](const Candidate& c) { return !(c.score > threshold); });
  std::sort(scored.begin(), scored.end(), candidate_order);
  return scored;
}

// Lexical feature-hashing embedder. Not a learned model: it gives offline
// fixtures and the throughput harness vectors that share a space with the
// query side. `salt` separates the "text" and "image" channels.
inline std::vector<float> hashed_text_embedding(const std::string& text, std::uint32_t dim, std::uint64_t salt) {
  std::vector<float> v(dim, 0.0f);
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const auto h = fnv1a(token, 0xcbf29ce484222325ULL ^ salt);
    v[h % dim] += (h >> 63) ? -1.0f : 1.0f;
    token.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      flush();
    }
  }
  flush();
  double n = 0.0;
  for (float f : v) n += static_cast<double>(f) * f;
  if (n == 0.0) {
    v[fnv1a(text) % dim] = 1.0f;  // keep the vector non-zero for empty/symbol-only text
    return v;
  }
  const float inv = static_cast<float>(1.0 / std::sqrt(n));
  for (float& f : v) f *= inv;
  return v;
}

inline constexpr std::uint64_t kTextSalt = 0x7465787400000000ULL;
inline constexpr std::uint64_t kImageSalt = 0x696d616765000000ULL;

inline QueryVectors hashed_query(const std::string& text, std::uint32_t dim) {
  return {hashed_text_embedding(text, dim, kTextSalt), hashed_text_embedding(text, dim, kImageSalt)};
}

// Where query vectors come from: a recorded table (an index file whose ids are
// the query strings) with an optional hashed fallback.
class QueryEmbeddings {
 public:
  QueryEmbeddings() = default;
  QueryEmbeddings(std::optional<EmbeddingIndex> table, bool hashed_fallback, std::uint32_t dim)
      : table_(std::move(table)), hashed_(hashed_fallback), dim_(dim) {}

  QueryVectors lookup(const std::string& text) const {
    if (table_) {
      if (auto row = table_->row_of(text)) {
        const auto t = table_->text_vec(*row);
        const auto i = table_->image_vec(*row);
        return {{t.begin(), t.end()}, {i.begin(), i.end()}};
      }
    }
    if (hashed_) return hashed_query(text, dim_);
    throw InvalidArgument("no query embedding recorded for '" + text + "'");
  }

 private:
  std::optional<EmbeddingIndex> table_;
  bool hashed_ = false;
  std::uint32_t dim_ = 0;
};

}  // namespace funscene
