#include "cekab/symbol.hpp"

#include <array>
#include <cctype>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace cekab {

namespace {

struct Entry {
  std::string text;
  std::string key;
};

constexpr std::size_t kChunkBits = 12;
constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;
constexpr std::size_t kMaxChunks = 1024;

// Entries live in fixed chunks so that readers never race with growth.
struct Table {
  std::mutex mu;
  std::array<std::unique_ptr<Entry[]>, kMaxChunks> chunks;
  std::uint32_t size = 1;
  std::unordered_map<std::string, std::uint32_t> index;

  Table() { chunks[0] = std::make_unique<Entry[]>(kChunkSize); }

  const Entry& at(std::uint32_t id) const { return chunks[id >> kChunkBits][id & (kChunkSize - 1)]; }
};

Table& table() {
  static Table t;
  return t;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

bool iends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && iequals(s.substr(s.size() - suffix.size()), suffix);
}

Sym::Sym(std::string_view text) {
  if (text.empty()) return;
  std::string key = to_lower(text);
  Table& t = table();
  std::lock_guard lock(t.mu);
  auto it = t.index.find(key);
  if (it != t.index.end()) {
    id_ = it->second;
    return;
  }
  std::uint32_t id = t.size;
  std::size_t chunk = id >> kChunkBits;
  if (chunk >= kMaxChunks) throw std::length_error("symbol table exhausted");
  if (!t.chunks[chunk]) t.chunks[chunk] = std::make_unique<Entry[]>(kChunkSize);
  Entry& e = t.chunks[chunk][id & (kChunkSize - 1)];
  e.text = std::string(text);
  e.key = key;
  t.index.emplace(std::move(key), id);
  t.size = id + 1;
  id_ = id;
}

const std::string& Sym::str() const { return table().at(id_).text; }

const std::string& Sym::key() const { return table().at(id_).key; }

}  // namespace cekab
