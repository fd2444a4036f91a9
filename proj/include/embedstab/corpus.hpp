#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace embedstab {

using Document = std::vector<std::string>;

/// Ordered collection of tokenized documents.
struct Corpus {
  std::vector<Document> documents;

  std::size_t token_count() const;
};

enum class SamplingKind { fixed, shuffled, bootstrapped };

struct SamplingMode {
  SamplingKind kind = SamplingKind::fixed;
  std::uint64_t seed = 0;
};

std::string_view to_string(SamplingKind kind);
/// Accepts "fixed", "shuffled", "bootstrapped"; throws UsageError otherwise.
SamplingKind parse_sampling_kind(std::string_view name);

/// Keeps the first occurrence of each distinct line, preserving order.
std::vector<std::string> dedup_lines(const std::vector<std::string>& lines);

/// fixed: identity. shuffled: seeded Fisher-Yates permutation of documents.
/// bootstrapped: |documents| seeded draws with replacement (non-empty input).
Corpus sample(const Corpus& corpus, const SamplingMode& mode);

/// Whitespace tokenization of one line, optionally lowercased (ASCII).
Document tokenize(std::string_view line, bool lowercase = false);

/// One document per line; blank lines are skipped.
Corpus load_corpus(const std::filesystem::path& path, bool lowercase = false,
                   bool dedup = false);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace embedstab
