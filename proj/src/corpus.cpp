#include "embedstab/corpus.hpp"

#include "detail/text.hpp"
#include "embedstab/error.hpp"
#include "embedstab/rng.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

namespace embedstab {

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.size();
  return n;
}

std::string_view to_string(SamplingKind kind) {
  switch (kind) {
    case SamplingKind::fixed:
      return "fixed";
    case SamplingKind::shuffled:
      return "shuffled";
    case SamplingKind::bootstrapped:
      return "bootstrapped";
  }
  return "unknown";
}

SamplingKind parse_sampling_kind(std::string_view name) {
  if (name == "fixed") return SamplingKind::fixed;
  if (name == "shuffled") return SamplingKind::shuffled;
  if (name == "bootstrapped") return SamplingKind::bootstrapped;
  throw UsageError("unknown sampling mode '" + std::string(name) +
                   "' (expected fixed, shuffled or bootstrapped)");
}

std::vector<std::string> dedup_lines(const std::vector<std::string>& lines) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(lines.size());
  std::vector<std::string> out;
  for (const auto& line : lines)
    if (seen.insert(line).second) out.push_back(line);
  return out;
}

Corpus sample(const Corpus& corpus, const SamplingMode& mode) {
  Rng rng(mode.seed);
  const std::size_t n = corpus.documents.size();
  switch (mode.kind) {
    case SamplingKind::fixed:
      return corpus;
    case SamplingKind::shuffled: {
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
      Corpus out;
      out.documents.reserve(n);
      for (std::size_t i : order) out.documents.push_back(corpus.documents[i]);
      return out;
    }
    case SamplingKind::bootstrapped: {
      if (n == 0) throw DataError("cannot bootstrap an empty corpus");
      Corpus out;
      out.documents.reserve(n);
      for (std::size_t i = 0; i < n; ++i) out.documents.push_back(corpus.documents[rng.below(n)]);
      return out;
    }
  }
  throw UsageError("invalid sampling mode");
}

Document tokenize(std::string_view line, bool lowercase) {
  Document doc;
  for (auto tok : detail::split_ws(line)) {
    std::string t(tok);
    if (lowercase)
      std::transform(t.begin(), t.end(), t.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    doc.push_back(std::move(t));
  }
  return doc;
}

Corpus load_corpus(const std::filesystem::path& path, bool lowercase, bool dedup) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!detail::trim(line).empty()) lines.push_back(line);
  }
  if (dedup) lines = dedup_lines(lines);
  Corpus c;
  c.documents.reserve(lines.size());
  for (const auto& l : lines) c.documents.push_back(tokenize(l, lowercase));
  return c;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write corpus " + path.string());
  for (const auto& doc : corpus.documents) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (i) out << ' ';
      out << doc[i];
    }
    out << '\n';
  }
  if (!out) throw DataError("I/O failure while writing " + path.string());
}

}  // namespace embedstab
