#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace driverl {

enum class MemoryFamily { mpc_memory, decision_hint };

struct MemoryEntry {
  int id = 0;
  MemoryFamily family = MemoryFamily::mpc_memory;
  std::string text;

  /// "# Memory Entry N:" or "# Hint N:".
  std::string header() const;
  /// Header line followed by the body.
  std::string render() const;
};

/// Lowercase [a-z0-9_] tokens in order of appearance.
std::vector<std::string> tokenize(std::string_view text);

/// |unique(query) ∩ unique(entry)| / sqrt(|unique(entry)|).
double lexical_score(std::string_view query, const MemoryEntry& entry);

using RetrievalScorer = std::function<double(std::string_view query, const MemoryEntry& entry)>;

/// Immutable memory / hint collection.
class MemoryStore {
 public:
  MemoryStore() = default;
  explicit MemoryStore(std::vector<MemoryEntry> entries);

  const std::vector<MemoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Top-k by descending score, ties by ascending id. Throws Error for an
  /// empty store or k < 1.
  std::vector<MemoryEntry> retrieve(std::string_view query, std::size_t k = 5,
                                    const RetrievalScorer& scorer = lexical_score) const;

  /// Serializes back to the header-delimited text format.
  std::string to_text() const;

 private:
  std::vector<MemoryEntry> entries_;
};

/// Parses the `# Memory Entry N:` / `# Hint N:` format. Throws ParseError on
/// a duplicate id, an empty body, mixed families or text before the first header.
MemoryStore load_memories(std::istream& source);
MemoryStore load_memories(std::string_view text);

/// Shipped assets (11 entries each).
const MemoryStore& default_mpc_memories();
const MemoryStore& default_decision_hints();
std::string_view mpc_memories_text();
std::string_view decision_hints_text();

}  // namespace driverl
