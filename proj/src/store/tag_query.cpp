#include "edgar/store/tag_query.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "edgar/store/ride_store.hpp"

namespace edgar::store {

TagQueryError::TagQueryError(const std::string& msg, std::size_t position)
    : std::runtime_error(msg + " at position " + std::to_string(position)), position_(position) {}

struct TagQuery::Node {
  enum class Op { literal, and_, or_, not_ } op = Op::literal;
  TagKey key;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = TagQuery::Node;
using NodePtr = std::shared_ptr<const Node>;

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

struct Token {
  enum class Kind { ident, dot, lparen, rparen, and_, or_, not_, end } kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '.') {
      out.push_back({Token::Kind::dot, ".", i++});
    } else if (c == '(') {
      out.push_back({Token::Kind::lparen, "(", i++});
    } else if (c == ')') {
      out.push_back({Token::Kind::rparen, ")", i++});
    } else if (ident_char(c)) {
      const std::size_t b = i;
      while (i < s.size() && ident_char(s[i])) ++i;
      std::string word(s.substr(b, i - b));
      std::string upper = word;
      std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char ch) { return std::toupper(ch); });
      // A keyword next to a '.' is part of a literal.
      std::size_t j = i;
      while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      const bool dotted = (j < s.size() && s[j] == '.') || (!out.empty() && out.back().kind == Token::Kind::dot);
      Token::Kind k = Token::Kind::ident;
      if (!dotted && upper == "AND") k = Token::Kind::and_;
      if (!dotted && upper == "OR") k = Token::Kind::or_;
      if (!dotted && upper == "NOT") k = Token::Kind::not_;
      out.push_back({k, std::move(word), b});
    } else {
      throw TagQueryError(std::string("unexpected character '") + c + "'", i);
    }
  }
  out.push_back({Token::Kind::end, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  NodePtr parse() {
    if (t_.front().kind == Token::Kind::end) throw TagQueryError("empty expression", 0);
    auto n = parse_or();
    if (peek().kind != Token::Kind::end) throw TagQueryError("unexpected '" + peek().text + "'", peek().pos);
    return n;
  }

 private:
  const Token& peek() const { return t_[i_]; }
  const Token& next() { return t_[i_++]; }

  static NodePtr binary(Node::Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr parse_or() {
    auto lhs = parse_and();
    while (peek().kind == Token::Kind::or_) {
      next();
      lhs = binary(Node::Op::or_, lhs, parse_and());
    }
    return lhs;
  }

  NodePtr parse_and() {
    auto lhs = parse_unary();
    while (peek().kind == Token::Kind::and_) {
      next();
      lhs = binary(Node::Op::and_, lhs, parse_unary());
    }
    return lhs;
  }

  NodePtr parse_unary() {
    const Token& tk = peek();
    switch (tk.kind) {
      case Token::Kind::not_: {
        next();
        auto n = std::make_shared<Node>();
        n->op = Node::Op::not_;
        n->lhs = parse_unary();
        return n;
      }
      case Token::Kind::lparen: {
        next();
        auto inner = parse_or();
        if (peek().kind != Token::Kind::rparen) throw TagQueryError("expected ')'", peek().pos);
        next();
        return inner;
      }
      case Token::Kind::ident: return parse_literal();
      case Token::Kind::end: throw TagQueryError("unexpected end of expression", tk.pos);
      default: throw TagQueryError("expected a tag literal, 'NOT' or '(' but found '" + tk.text + "'", tk.pos);
    }
  }

  NodePtr parse_literal() {
    std::string parts[3];
    for (int k = 0; k < 3; ++k) {
      if (k > 0) {
        if (peek().kind != Token::Kind::dot) {
          throw TagQueryError("expected '.' in literal category.group.name", peek().pos);
        }
        next();
      }
      if (peek().kind != Token::Kind::ident) {
        throw TagQueryError("expected identifier in literal category.group.name", peek().pos);
      }
      parts[k] = next().text;
    }
    auto n = std::make_shared<Node>();
    n->key = {parts[0], parts[1], parts[2]};
    return n;
  }

  std::vector<Token> t_;
  std::size_t i_ = 0;
};

bool eval(const Node& n, const std::set<TagKey>& tags) {
  switch (n.op) {
    case Node::Op::literal: return tags.count(n.key) > 0;
    case Node::Op::and_: return eval(*n.lhs, tags) && eval(*n.rhs, tags);
    case Node::Op::or_: return eval(*n.lhs, tags) || eval(*n.rhs, tags);
    case Node::Op::not_: return !eval(*n.lhs, tags);
  }
  return false;
}

std::string render(const Node& n) {
  switch (n.op) {
    case Node::Op::literal: return std::get<0>(n.key) + "." + std::get<1>(n.key) + "." + std::get<2>(n.key);
    case Node::Op::and_: return "(" + render(*n.lhs) + " AND " + render(*n.rhs) + ")";
    case Node::Op::or_: return "(" + render(*n.lhs) + " OR " + render(*n.rhs) + ")";
    case Node::Op::not_: return "NOT " + render(*n.lhs);
  }
  return "";
}

}  // namespace

TagQuery TagQuery::parse(std::string_view text) {
  TagQuery q;
  q.root_ = Parser(tokenize(text)).parse();
  return q;
}

bool TagQuery::matches(const std::set<TagKey>& tags) const { return eval(*root_, tags); }

std::string TagQuery::to_string() const { return render(*root_); }

std::vector<std::string> query_scenes(const RideStore& store, const TagQuery& query) {
  std::map<std::string, std::set<TagKey>, std::less<>> by_scene;
  for (const auto& t : store.tables().tags) by_scene[t.scene_id].insert({t.category, t.group, t.name});
  struct Hit {
    std::string ride, id;
    double start;
  };
  std::vector<Hit> hits;
  static const std::set<TagKey> none;
  for (const auto& s : store.tables().scenes) {
    const auto it = by_scene.find(s.id);
    if (query.matches(it == by_scene.end() ? none : it->second)) hits.push_back({s.ride_id, s.id, s.start});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return std::tie(a.ride, a.start, a.id) < std::tie(b.ride, b.start, b.id);
  });
  std::vector<std::string> out;
  out.reserve(hits.size());
  for (auto& h : hits) out.push_back(std::move(h.id));
  return out;
}

std::vector<std::string> query_scenes(const RideStore& store, std::string_view expression) {
  return query_scenes(store, TagQuery::parse(expression));
}

}  // namespace edgar::store
