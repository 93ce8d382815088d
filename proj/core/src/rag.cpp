#include "driverl/rag.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "driverl/error.hpp"

namespace driverl {

std::string MemoryEntry::header() const {
  return family == MemoryFamily::mpc_memory ? "# Memory Entry " + std::to_string(id) + ":"
                                            : "# Hint " + std::to_string(id) + ":";
}

std::string MemoryEntry::render() const { return header() + "\n" + text; }

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '_') {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

double lexical_score(std::string_view query, const MemoryEntry& entry) {
  const auto qt = tokenize(query);
  const auto et = tokenize(entry.text);
  const std::set<std::string> q(qt.begin(), qt.end());
  const std::set<std::string> e(et.begin(), et.end());
  if (e.empty()) return 0.0;
  std::size_t overlap = 0;
  for (const auto& t : q) overlap += e.count(t);
  return static_cast<double>(overlap) / std::sqrt(static_cast<double>(e.size()));
}

MemoryStore::MemoryStore(std::vector<MemoryEntry> entries) : entries_(std::move(entries)) {}

std::vector<MemoryEntry> MemoryStore::retrieve(std::string_view query, std::size_t k,
                                               const RetrievalScorer& scorer) const {
  if (entries_.empty()) throw Error("memory store is empty");
  if (k < 1) throw Error("k must be at least 1");
  std::vector<std::pair<double, const MemoryEntry*>> scored;
  scored.reserve(entries_.size());
  for (const auto& e : entries_) scored.emplace_back(scorer(query, e), &e);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->id < b.second->id;
  });
  std::vector<MemoryEntry> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(*scored[i].second);
  return out;
}

std::string MemoryStore::to_text() const {
  std::string out;
  for (const auto& e : entries_) {
    if (!out.empty()) out += "\n";
    out += e.render() + "\n";
  }
  return out;
}

namespace {

std::string trim_lines(const std::vector<std::string>& lines) {
  std::size_t b = 0, e = lines.size();
  auto blank = [](const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  };
  while (b < e && blank(lines[b])) ++b;
  while (e > b && blank(lines[e - 1])) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    std::string l = lines[i];
    while (!l.empty() && (l.back() == '\r' || l.back() == ' ' || l.back() == '\t')) l.pop_back();
    out += l;
    if (i + 1 < e) out += "\n";
  }
  return out;
}

}  // namespace

MemoryStore load_memories(std::istream& source) {
  static const std::regex header(R"(^# (Memory Entry|Hint) ([0-9]+):\s*$)");
  std::vector<MemoryEntry> entries;
  std::set<int> ids;
  std::vector<std::string> body;
  std::size_t header_line = 0;
  bool have_entry = false;
  std::optional<MemoryFamily> family;

  auto flush = [&]() {
    if (!have_entry) return;
    entries.back().text = trim_lines(body);
    if (entries.back().text.empty()) throw ParseError("empty body for " + entries.back().header(), header_line);
    body.clear();
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    std::string stripped = line;
    while (!stripped.empty() && stripped.back() == '\r') stripped.pop_back();
    std::smatch m;
    if (std::regex_match(stripped, m, header)) {
      flush();
      const MemoryFamily fam = m[1] == "Hint" ? MemoryFamily::decision_hint : MemoryFamily::mpc_memory;
      if (family && *family != fam) throw ParseError("mixed memory and hint headers", line_no);
      family = fam;
      const int id = std::stoi(m[2]);
      if (!ids.insert(id).second) throw ParseError("duplicate id " + std::to_string(id), line_no);
      entries.push_back({id, fam, {}});
      header_line = line_no;
      have_entry = true;
      continue;
    }
    if (!have_entry) {
      if (std::all_of(stripped.begin(), stripped.end(), [](unsigned char c) { return std::isspace(c); })) continue;
      throw ParseError("text before the first header", line_no);
    }
    body.push_back(stripped);
  }
  flush();
  if (entries.empty()) throw ParseError("no entries found");
  return MemoryStore(std::move(entries));
}

MemoryStore load_memories(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_memories(in);
}

const MemoryStore& default_mpc_memories() {
  static const MemoryStore store = load_memories(mpc_memories_text());
  return store;
}

const MemoryStore& default_decision_hints() {
  static const MemoryStore store = load_memories(decision_hints_text());
  return store;
}

}  // namespace driverl
