#pragma once

#include <string>
#include <vector>

#include "retronlu/error.hpp"

namespace retronlu {

// TOP seqlogical frames: bracketed intent/slot trees interleaved with
// plain text tokens, e.g.
//   [in:add_time_timer add [sl:date_time ten minutes ] to the
//    [sl:timer_name oven ] [sl:method_timer timer ] ]
//
// Intents carry the `in:` prefix, slots the `sl:` prefix. Slot children are
// either all text tokens (the slot value) or exactly one nested intent.

enum class NodeKind { Intent, Slot, Text };

struct Node {
  NodeKind kind = NodeKind::Text;
  // Intent/slot label (with prefix), or the token text for Text nodes.
  std::string label;
  std::vector<Node> children;

  bool is_intent() const { return kind == NodeKind::Intent; }
  bool is_slot() const { return kind == NodeKind::Slot; }
  bool is_text() const { return kind == NodeKind::Text; }
};

struct ParseTree {
  Node root;  // always an intent
};

// Parses a seqlogical frame string. Whitespace runs collapse; brackets may
// abut labels/tokens ("...carey]" is fine). Throws Error with one of
// UnbalancedBrackets, EmptyNode, RootNotIntent, MixedSlotChildren,
// TrailingGarbage, InvalidChild.
ParseTree parse_top(const std::string& s);

// Deterministic single-space-separated bracketed form. parse_top(serialize(t))
// is structurally equal to t.
std::string serialize(const ParseTree& t);
std::string serialize(const Node& n);

// Drops text tokens that are direct children of intent nodes; slot values
// are kept. Idempotent.
ParseTree decouple(const ParseTree& t);

// Decouples, then stably sorts each intent's slot children ascending by
// (slot label, serialized slot). Idempotent; fixed point of itself.
ParseTree canonicalize(const ParseTree& t);

// Canonical form with all text tokens (slot values included) removed,
// serialized. Identifies the frame structure independent of slot contents.
std::string skeleton(const ParseTree& t);

// Maximum number of intent nodes on any root-to-leaf path; 1 for flat
// frames, >=2 for compositional ones.
int depth(const ParseTree& t);

bool structurally_equal(const ParseTree& a, const ParseTree& b);

}  // namespace retronlu
