#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace edgar::store {

class RideStore;

/// (category, group, name)
using TagKey = std::tuple<std::string, std::string, std::string>;

class TagQueryError : public std::runtime_error {
 public:
  TagQueryError(const std::string& msg, std::size_t position);
  std::size_t position() const { return position_; }  // zero-based character offset

 private:
  std::size_t position_;
};

/// Grammar, loosest binding first:
///   or      := and ("OR" and)*
///   and     := unary ("AND" unary)*
///   unary   := "NOT" unary | "(" or ")" | literal
///   literal := ident "." ident "." ident      ident := [A-Za-z0-9_-]+
/// Keywords are case-insensitive. Literals match exactly.
class TagQuery {
 public:
  static TagQuery parse(std::string_view text);  // throws TagQueryError

  bool matches(const std::set<TagKey>& tags) const;
  /// Fully parenthesized canonical form.
  std::string to_string() const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};

/// Scene ids whose tag set satisfies the query, ordered by (ride id, scene start, scene id).
std::vector<std::string> query_scenes(const RideStore& store, const TagQuery& query);
std::vector<std::string> query_scenes(const RideStore& store, std::string_view expression);

}  // namespace edgar::store
