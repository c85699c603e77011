#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace cekab {

/// Interned identifier. Spelling is preserved from the first occurrence,
/// equality and ordering use the lowercase form.
class Sym {
 public:
  Sym() = default;
  explicit Sym(std::string_view text);
  Sym(const char* text) : Sym(std::string_view(text)) {}
  Sym(const std::string& text) : Sym(std::string_view(text)) {}

  const std::string& str() const;
  const std::string& key() const;
  std::uint32_t id() const { return id_; }
  bool empty() const { return id_ == 0; }

  friend bool operator==(Sym a, Sym b) { return a.id_ == b.id_; }
  friend std::strong_ordering operator<=>(Sym a, Sym b) {
    if (a.id_ == b.id_) return std::strong_ordering::equal;
    int c = a.key().compare(b.key());
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }

 private:
  std::uint32_t id_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Sym s) { return os << s.str(); }

std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);
bool iends_with(std::string_view s, std::string_view suffix);

}  // namespace cekab

template <>
struct std::hash<cekab::Sym> {
  std::size_t operator()(cekab::Sym s) const noexcept { return s.id(); }
};
