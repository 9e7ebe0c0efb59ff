#include "support/dot_grammar.hpp"

#include <cctype>
#include <stdexcept>

namespace histlab::testing {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  DotGraph graph() {
    DotGraph g;
    expect_word("digraph");
    g.name = id();
    expect('{');
    while (!peek('}')) statement(g, nullptr);
    expect('}');
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return g;
  }

 private:
  void statement(DotGraph& g, DotSubgraph* sub) {
    const std::string first = id();
    if (first == "subgraph") {
      if (sub) fail("nested subgraph");
      DotSubgraph sg;
      sg.name = id();
      expect('{');
      while (!peek('}')) statement(g, &sg);
      expect('}');
      g.subgraphs.push_back(std::move(sg));
      return;
    }
    if (first == "node" || first == "edge") {
      attrs();
      expect(';');
      return;
    }
    if (peek('=')) {
      expect('=');
      (sub ? sub->settings : g.settings)[first] = id();
      expect(';');
      return;
    }
    if (peek('-')) {
      expect('-');
      expect('>');
      DotEdge e{first, id(), {}};
      if (peek('[')) e.attrs = attrs();
      expect(';');
      g.edges.push_back(std::move(e));
      return;
    }
    DotAttrs a;
    if (peek('[')) a = attrs();
    expect(';');
    if (g.nodes.count(first)) fail("duplicate node " + first);
    g.nodes[first] = std::move(a);
    if (sub) sub->nodes.push_back(first);
  }

  DotAttrs attrs() {
    DotAttrs out;
    expect('[');
    while (!peek(']')) {
      const std::string k = id();
      expect('=');
      out[k] = id();
      if (peek(',')) expect(',');
    }
    expect(']');
    return out;
  }

  std::string id() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (s_[pos_] == '"') {
      std::string out;
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
        out += s_[pos_++];
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      ++pos_;
      return out;
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                s_[pos_] == '.')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return s_.substr(start, pos_ - start);
  }

  void expect_word(const std::string& w) {
    if (id() != w) fail("expected " + w);
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("dot parse error at " + std::to_string(pos_) + ": " + what);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

DotGraph parse_dot(const std::string& text) { return Parser(text).graph(); }

}  // namespace histlab::testing
