#include "retronlu/topformat.hpp"

#include <algorithm>
#include <cctype>

namespace retronlu {

namespace {

struct Token {
  enum Kind { Open, Close, Word } kind;
  std::string text;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) {
      out.push_back({Token::Word, word});
      word.clear();
    }
  };
  for (char c : s) {
    if (c == '[') {
      flush();
      out.push_back({Token::Open, "["});
    } else if (c == ']') {
      flush();
      out.push_back({Token::Close, "]"});
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      word.push_back(c);
    }
  }
  flush();
  return out;
}

bool has_prefix(const std::string& s, const char* p) { return s.rfind(p, 0) == 0; }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ParseTree parse_root() {
    if (toks_.empty())
      throw Error(Errc::UnbalancedBrackets, "empty input");
    if (toks_[0].kind != Token::Open)
      throw Error(Errc::TrailingGarbage, "tokens before root bracket: '" + toks_[0].text + "'");
    Node root = parse_node(/*at_root=*/true);
    if (pos_ != toks_.size())
      throw Error(Errc::TrailingGarbage, "tokens after root bracket: '" + toks_[pos_].text + "'");
    return ParseTree{std::move(root)};
  }

 private:
  Node parse_node(bool at_root) {
    ++pos_;  // consume '['
    if (pos_ >= toks_.size())
      throw Error(Errc::UnbalancedBrackets, "input ends after '['");
    if (toks_[pos_].kind == Token::Close)
      throw Error(Errc::EmptyNode, "'[' immediately followed by ']'");
    if (toks_[pos_].kind == Token::Open)
      throw Error(Errc::EmptyNode, "'[' immediately followed by '['");

    Node node;
    node.label = toks_[pos_++].text;
    if (has_prefix(node.label, "in:")) {
      node.kind = NodeKind::Intent;
    } else if (has_prefix(node.label, "sl:")) {
      node.kind = NodeKind::Slot;
      if (at_root)
        throw Error(Errc::RootNotIntent, "root label '" + node.label + "'");
    } else {
      if (at_root)
        throw Error(Errc::RootNotIntent, "root label '" + node.label + "'");
      throw Error(Errc::InvalidChild, "label '" + node.label + "' lacks in:/sl: prefix");
    }
    if (at_root && node.kind != NodeKind::Intent)
      throw Error(Errc::RootNotIntent, "root label '" + node.label + "'");

    while (true) {
      if (pos_ >= toks_.size())
        throw Error(Errc::UnbalancedBrackets, "missing ']' for '" + node.label + "'");
      if (toks_[pos_].kind == Token::Close) {
        ++pos_;
        break;
      }
      if (toks_[pos_].kind == Token::Open) {
        Node child = parse_node(/*at_root=*/false);
        if (node.kind == NodeKind::Intent && child.kind == NodeKind::Intent)
          throw Error(Errc::InvalidChild, "intent '" + child.label + "' directly under intent '" + node.label + "'");
        if (node.kind == NodeKind::Slot && child.kind == NodeKind::Slot)
          throw Error(Errc::InvalidChild, "slot '" + child.label + "' directly under slot '" + node.label + "'");
        node.children.push_back(std::move(child));
      } else {
        node.children.push_back(Node{NodeKind::Text, toks_[pos_].text, {}});
        ++pos_;
      }
    }

    if (node.kind == NodeKind::Slot) validate_slot(node);
    return node;
  }

  static void validate_slot(const Node& slot) {
    int intents = 0, texts = 0;
    for (const Node& c : slot.children) {
      if (c.kind == NodeKind::Intent) ++intents;
      else ++texts;
    }
    if (intents > 0 && (texts > 0 || intents > 1))
      throw Error(Errc::MixedSlotChildren, "slot '" + slot.label + "' mixes text and nested intents");
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

void serialize_node(const Node& n, std::string& out) {
  if (n.is_text()) {
    out += n.label;
    return;
  }
  out += '[';
  out += n.label;
  out += ' ';
  for (const Node& c : n.children) {
    serialize_node(c, out);
    out += ' ';
  }
  out += ']';
}

Node decouple_node(const Node& n) {
  Node out{n.kind, n.label, {}};
  for (const Node& c : n.children) {
    if (n.kind == NodeKind::Intent && c.kind == NodeKind::Text) continue;
    out.children.push_back(c.is_text() ? c : decouple_node(c));
  }
  return out;
}

Node canonicalize_node(const Node& n) {
  Node out{n.kind, n.label, {}};
  for (const Node& c : n.children) {
    if (n.kind == NodeKind::Intent && c.kind == NodeKind::Text) continue;
    out.children.push_back(c.is_text() ? c : canonicalize_node(c));
  }
  if (n.kind == NodeKind::Intent) {
    std::stable_sort(out.children.begin(), out.children.end(),
                     [](const Node& a, const Node& b) {
                       if (a.label != b.label) return a.label < b.label;
                       std::string sa, sb;
                       serialize_node(a, sa);
                       serialize_node(b, sb);
                       return sa < sb;
                     });
  }
  return out;
}

Node strip_text(const Node& n) {
  Node out{n.kind, n.label, {}};
  for (const Node& c : n.children) {
    if (c.is_text()) continue;
    out.children.push_back(strip_text(c));
  }
  return out;
}

int intent_depth(const Node& n) {
  int best = 0;
  for (const Node& c : n.children) best = std::max(best, intent_depth(c));
  return best + (n.kind == NodeKind::Intent ? 1 : 0);
}

bool node_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.label != b.label || a.children.size() != b.children.size())
    return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!node_equal(a.children[i], b.children[i])) return false;
  return true;
}

}  // namespace

ParseTree parse_top(const std::string& s) {
  return Parser(lex(s)).parse_root();
}

std::string serialize(const Node& n) {
  std::string out;
  serialize_node(n, out);
  return out;
}

std::string serialize(const ParseTree& t) { return serialize(t.root); }

ParseTree decouple(const ParseTree& t) { return ParseTree{decouple_node(t.root)}; }

ParseTree canonicalize(const ParseTree& t) { return ParseTree{canonicalize_node(t.root)}; }

std::string skeleton(const ParseTree& t) {
  return serialize(strip_text(canonicalize_node(t.root)));
}

int depth(const ParseTree& t) { return intent_depth(t.root); }

bool structurally_equal(const ParseTree& a, const ParseTree& b) {
  return node_equal(a.root, b.root);
}

}  // namespace retronlu
