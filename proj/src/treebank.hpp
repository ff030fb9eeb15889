#ifndef CONCSE_TREEBANK_HPP
#define CONCSE_TREEBANK_HPP

#include <string>
#include <variant>
#include <vector>

#include "util.hpp"

namespace concse {

// Thrown by the bracketed-tree reader; callers that process batches catch it
// per record and count the record as rejected.
class MalformedTreeError : public Error {
  public:
    explicit MalformedTreeError(const std::string& message) : Error(2, message) {}
};

// A node is internal (>= 1 child, no token) xor a leaf (token, no children).
// Leaf labels are POS tags, internal labels are phrase tags.
struct ParseNode {
    std::string label;
    std::vector<ParseNode> children;
    std::string token;

    bool is_leaf() const { return children.empty(); }
};

struct ParseTree {
    ParseNode root;
    std::size_t token_count = 0;
};

// Penn-Treebank-style bracketed text: "(LABEL child ...)" with leaves
// written "(POS token)". One tree per line in batch files.
ParseTree parse_bracketed(const std::string& text);

// Left-to-right leaf tokens.
std::vector<std::string> fringe(const ParseTree& tree);
std::vector<std::string> fringe(const ParseNode& node);

// One switchable noun-phrase span. Token indices are [start, end) over the
// fringe; node_path is the child-index path from the root to the NP node.
struct SwitchSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string phrase;
    std::vector<std::size_t> node_path;
};

struct SwitchPlan {
    std::vector<SwitchSpan> spans;
};

enum class RejectReason {
    WholeSentenceNP,
    NoEligibleSpan,
    PronounOnlyExhausted,
    MalformedTree,
};

const char* to_string(RejectReason reason);

struct Rejection {
    RejectReason reason;
};

struct SelectionPolicy {
    // Caps the number of collected spans; -1 means unlimited. A cap of 0
    // yields an empty plan (the sentence passes through unswitched).
    int max_spans = -1;
};

// Collects maximal NP spans top-down:
//   - an NP whose span covers the whole sentence is skipped (descending into
//     it) and the sentence is rejected with WholeSentenceNP only if no other
//     NP candidate exists;
//   - an NP whose leaves are all pronoun tags (PRP, PRP$, WP, WP$) is skipped
//     and the descent continues to later NPs;
//   - any other NP is collected and its subtree is not descended into.
// If the descent exhausts the tree with nothing collected, the sentence is
// rejected (PronounOnlyExhausted if a pronoun-only NP was skipped, otherwise
// WholeSentenceNP or NoEligibleSpan).
std::variant<SwitchPlan, Rejection> select_switch_spans(
    const ParseTree& tree, const SelectionPolicy& policy = {});

// Follows a child-index path from the root; throws InternalError if the path
// does not resolve.
const ParseNode* resolve_path(const ParseTree& tree,
                              const std::vector<std::size_t>& path);

}  // namespace concse

#endif  // CONCSE_TREEBANK_HPP
