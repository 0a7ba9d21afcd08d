#pragma once

// Query embeddings (e in R^512) from three sources: a precomputed embedding
// bank file standing in for the frozen image/text encoders, template
// ensembling for text queries, and a learnable per-class table lives with
// the model.
//
// Bank file layout (QEMBANK1): 8-byte magic "QEMBANK1", u32 dim, u32 count,
// `count` records of (u16 id length, utf-8 id, dim little-endian f32),
// then a JSON footer duplicating the index for debuggability.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "clipsep/common.hpp"

namespace clipsep {

constexpr int kEmbedDim = 512;

enum class QueryModality { image, text, label };

struct QueryEmbedding {
  std::vector<float> vector;  // dim 512
  QueryModality modality = QueryModality::image;
  std::string id;
};

class EmbeddingBank {
 public:
  int dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  const std::vector<float>& lookup(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("embedding bank: unknown id \"" + id + "\"");
    return records_[it->second].second;
  }

  void add(const std::string& id, std::vector<float> vec) {
    if (int(vec.size()) != dim_)
      throw InvalidInput("embedding bank: vector for \"" + id + "\" has dimension " +
                         std::to_string(vec.size()) + ", expected " + std::to_string(dim_));
    if (contains(id)) throw InvalidInput("embedding bank: duplicate id \"" + id + "\"");
    index_[id] = records_.size();
    records_.emplace_back(id, std::move(vec));
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.first);
    return out;
  }

  void save(const std::string& path) const {
    std::string buf;
    buf += "QEMBANK1";
    append_u32(buf, std::uint32_t(dim_));
    append_u32(buf, std::uint32_t(records_.size()));
    nlohmann::json footer_index = nlohmann::json::object();
    for (const auto& [id, vec] : records_) {
      footer_index[id] = buf.size();  // byte offset of the record
      if (id.size() > 0xffff) throw InvalidInput("embedding id too long: " + id);
      buf.push_back(char(id.size() & 0xff));
      buf.push_back(char(id.size() >> 8));
      buf += id;
      const std::size_t off = buf.size();
      buf.resize(off + vec.size() * 4);
      std::memcpy(buf.data() + off, vec.data(), vec.size() * 4);
    }
    nlohmann::json footer = {{"dim", dim_}, {"count", records_.size()}, {"index", footer_index}};
    buf += footer.dump();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write embedding bank: " + path);
    os.write(buf.data(), std::streamsize(buf.size()));
  }

  static EmbeddingBank load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open embedding bank: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());

    if (buf.size() < 16) throw FormatError("embedding bank truncated: " + path, buf.size());
    if (std::memcmp(p, "QEMBANK1", 8) != 0)
      throw FormatError("bad embedding bank magic in " + path, 0);
    const std::uint32_t dim = read_u32(p + 8);
    const std::uint32_t count = read_u32(p + 12);
    if (dim != kEmbedDim)
      throw FormatError("embedding bank dim " + std::to_string(dim) + ", expected " +
                            std::to_string(kEmbedDim) + " in " + path,
                        8);

    EmbeddingBank bank;
    std::size_t pos = 16;
    for (std::uint32_t i = 0; i < count; ++i) {
      if (pos + 2 > buf.size()) throw FormatError("truncated record header in " + path, pos);
      const std::size_t id_len = p[pos] | std::size_t(p[pos + 1]) << 8;
      pos += 2;
      if (pos + id_len + dim * 4 > buf.size())
        throw FormatError("truncated record in " + path, pos);
      std::string id(buf.data() + pos, id_len);
      pos += id_len;
      std::vector<float> vec(dim);
      std::memcpy(vec.data(), buf.data() + pos, dim * 4);
      pos += dim * 4;
      if (bank.contains(id)) throw FormatError("duplicate id \"" + id + "\" in " + path, pos);
      bank.add(id, std::move(vec));
    }
    if (pos < buf.size()) {
      // Optional JSON footer; if present it must agree with the records.
      auto footer = nlohmann::json::parse(buf.substr(pos), nullptr, false);
      if (footer.is_discarded()) throw FormatError("bad JSON footer in " + path, pos);
      if (footer.contains("count") && footer["count"].get<std::size_t>() != bank.size())
        throw FormatError("footer count disagrees with records in " + path, pos);
    }
    return bank;
  }

 private:
  static void append_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
  }
  static std::uint32_t read_u32(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
  }

  int dim_ = kEmbedDim;
  std::map<std::string, std::size_t> index_;
  std::vector<std::pair<std::string, std::vector<float>>> records_;
};

// Ordered list of query templates, each with exactly one "{}" placeholder.
struct QueryTemplateSet {
  std::vector<std::string> templates;

  void validate() const {
    if (templates.empty()) throw InvalidInput("query template set is empty");
    for (const auto& t : templates) {
      const auto first = t.find("{}");
      if (first == std::string::npos || t.find("{}", first + 1) != std::string::npos)
        throw InvalidInput("query template must contain exactly one {} placeholder: " + t);
    }
  }

  std::vector<std::string> instantiate(const std::string& text) const {
    validate();
    std::vector<std::string> out;
    out.reserve(templates.size());
    for (const auto& t : templates) {
      std::string s = t;
      s.replace(s.find("{}"), 2, text);
      out.push_back(std::move(s));
    }
    return out;
  }
};

inline QueryTemplateSet default_query_templates() {
  return {{
      "a photo of {}",
      "a photo of the small {}",
      "a low resolution photo of a {}",
      "a photo of many {}",
  }};
}

namespace detail {

inline QueryEmbedding mean_embedding(const EmbeddingBank& bank,
                                     const std::vector<std::string>& ids,
                                     QueryModality modality) {
  if (ids.empty()) throw InvalidInput("mean embedding over an empty id list");
  std::string missing;
  for (const auto& id : ids)
    if (!bank.contains(id)) missing += (missing.empty() ? "" : ", ") + id;
  if (!missing.empty()) throw DataError("embedding bank: missing ids: " + missing);

  QueryEmbedding out;
  out.modality = modality;
  out.id = ids.front();
  out.vector.assign(std::size_t(bank.dim()), 0.0f);
  for (const auto& id : ids) {
    const auto& v = bank.lookup(id);
    for (std::size_t i = 0; i < v.size(); ++i) out.vector[i] += v[i];
  }
  const float inv = 1.0f / float(ids.size());
  for (auto& x : out.vector) x *= inv;
  return out;
}

}  // namespace detail

// Mean embedding of the (typically three) frame ids of a clip.
inline QueryEmbedding frame_query(const EmbeddingBank& bank,
                                  const std::vector<std::string>& frame_ids) {
  return detail::mean_embedding(bank, frame_ids, QueryModality::image);
}

// Mean embedding over the template-instantiated text queries. The bank is
// precomputed offline for the evaluation vocabulary, so each instantiated
// string must be present as an id.
inline QueryEmbedding text_query(const EmbeddingBank& bank, const std::string& user_text,
                                 const QueryTemplateSet& templates = default_query_templates()) {
  auto q = detail::mean_embedding(bank, templates.instantiate(user_text), QueryModality::text);
  q.id = user_text;
  return q;
}

}  // namespace clipsep
