#include "treebank.hpp"

#include <array>

namespace concse {

namespace {

struct Reader {
    const std::string& text;
    std::size_t pos = 0;

    explicit Reader(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() &&
               std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
    }

    bool done() const { return pos >= text.size(); }

    char peek() const { return text[pos]; }

    // A bare atom: label or token, delimited by whitespace and parentheses.
    std::string read_atom() {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != '(' && text[pos] != ')' &&
               !std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        return text.substr(start, pos - start);
    }

    ParseNode read_node() {
        skip_ws();
        if (done() || peek() != '(') {
            throw MalformedTreeError("expected '(' at position " + std::to_string(pos));
        }
        ++pos;  // consume '('
        skip_ws();
        ParseNode node;
        node.label = read_atom();
        if (node.label.empty()) {
            throw MalformedTreeError("empty node label at position " + std::to_string(pos));
        }
        skip_ws();
        if (done()) throw MalformedTreeError("unbalanced brackets: unexpected end of input");
        if (peek() == ')') {
            throw MalformedTreeError("empty node '(" + node.label + ")' has neither token nor children");
        }
        if (peek() == '(') {
            while (!done() && peek() == '(') {
                node.children.push_back(read_node());
                skip_ws();
            }
        } else {
            node.token = read_atom();
            skip_ws();
            if (!done() && peek() == '(') {
                throw MalformedTreeError("leaf '(" + node.label + " " + node.token +
                                         ")' followed by a child node");
            }
            if (!done() && peek() != ')') {
                throw MalformedTreeError("unexpected second token under leaf '(" +
                                         node.label + " " + node.token + ")'");
            }
        }
        skip_ws();
        if (done() || peek() != ')') {
            throw MalformedTreeError("unbalanced brackets: missing ')' for node '" +
                                     node.label + "'");
        }
        ++pos;  // consume ')'
        return node;
    }
};

void collect_fringe(const ParseNode& node, std::vector<std::string>* out) {
    if (node.is_leaf()) {
        out->push_back(node.token);
        return;
    }
    for (const ParseNode& child : node.children) collect_fringe(child, out);
}

std::size_t count_leaves(const ParseNode& node) {
    if (node.is_leaf()) return 1;
    std::size_t n = 0;
    for (const ParseNode& child : node.children) n += count_leaves(child);
    return n;
}

bool is_pronoun_tag(const std::string& label) {
    static const std::array<const char*, 4> kPronounTags = {"PRP", "PRP$", "WP", "WP$"};
    for (const char* tag : kPronounTags) {
        if (label == tag) return true;
    }
    return false;
}

bool all_leaves_pronoun(const ParseNode& node) {
    if (node.is_leaf()) return is_pronoun_tag(node.label);
    for (const ParseNode& child : node.children) {
        if (!all_leaves_pronoun(child)) return false;
    }
    return true;
}

struct SelectionState {
    std::size_t token_count = 0;
    std::vector<SwitchSpan> spans;
    bool saw_whole_sentence_np = false;
    bool saw_pronoun_only_np = false;
};

// Pre-order walk tracking the token offset of each node. Collected NPs are
// not descended into, so collected spans never nest; skipped NPs keep their
// descendants eligible.
void walk(const ParseNode& node, std::size_t offset,
          std::vector<std::size_t>* path, SelectionState* state) {
    std::size_t width = count_leaves(node);
    if (node.label == "NP") {
        bool whole = offset == 0 && width == state->token_count;
        if (whole) {
            state->saw_whole_sentence_np = true;
        } else if (all_leaves_pronoun(node)) {
            state->saw_pronoun_only_np = true;
        } else {
            SwitchSpan span;
            span.start = offset;
            span.end = offset + width;
            span.phrase = join(fringe(node), " ");
            span.node_path = *path;
            state->spans.push_back(span);
            return;
        }
    }
    std::size_t child_offset = offset;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        path->push_back(i);
        walk(node.children[i], child_offset, path, state);
        path->pop_back();
        child_offset += count_leaves(node.children[i]);
    }
}

}  // namespace

ParseTree parse_bracketed(const std::string& text) {
    Reader reader(text);
    ParseTree tree;
    tree.root = reader.read_node();
    reader.skip_ws();
    if (!reader.done()) {
        throw MalformedTreeError("trailing content after tree at position " +
                                 std::to_string(reader.pos));
    }
    tree.token_count = count_leaves(tree.root);
    return tree;
}

std::vector<std::string> fringe(const ParseNode& node) {
    std::vector<std::string> tokens;
    collect_fringe(node, &tokens);
    return tokens;
}

std::vector<std::string> fringe(const ParseTree& tree) {
    return fringe(tree.root);
}

const char* to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::WholeSentenceNP: return "WholeSentenceNP";
        case RejectReason::NoEligibleSpan: return "NoEligibleSpan";
        case RejectReason::PronounOnlyExhausted: return "PronounOnlyExhausted";
        case RejectReason::MalformedTree: return "MalformedTree";
    }
    return "Unknown";
}

std::variant<SwitchPlan, Rejection> select_switch_spans(
    const ParseTree& tree, const SelectionPolicy& policy) {
    CONCSE_CHECK(tree.token_count >= 1, "select_switch_spans on empty tree");
    SelectionState state;
    state.token_count = tree.token_count;
    std::vector<std::size_t> path;
    walk(tree.root, 0, &path, &state);

    if (state.spans.empty()) {
        if (state.saw_pronoun_only_np) {
            return Rejection{RejectReason::PronounOnlyExhausted};
        }
        if (state.saw_whole_sentence_np) {
            return Rejection{RejectReason::WholeSentenceNP};
        }
        return Rejection{RejectReason::NoEligibleSpan};
    }

    SwitchPlan plan;
    plan.spans = std::move(state.spans);
    if (policy.max_spans >= 0 &&
        plan.spans.size() > static_cast<std::size_t>(policy.max_spans)) {
        plan.spans.resize(static_cast<std::size_t>(policy.max_spans));
    }
    return plan;
}

const ParseNode* resolve_path(const ParseTree& tree,
                              const std::vector<std::size_t>& path) {
    const ParseNode* node = &tree.root;
    for (std::size_t index : path) {
        CONCSE_CHECK(index < node->children.size(), "node path does not resolve");
        node = &node->children[index];
    }
    return node;
}

}  // namespace concse
