#include "treebank.hpp"

#include <set>

#include "doctest.h"
#include "util.hpp"

using namespace concse;

namespace {

const char* kFig1Tree =
    "(S (NP (DT The) (NN movie)) (VP (VBD was) (ADJP (RB very) (JJ dull))))";

SwitchPlan expect_plan(const std::variant<SwitchPlan, Rejection>& outcome) {
    REQUIRE(std::holds_alternative<SwitchPlan>(outcome));
    return std::get<SwitchPlan>(outcome);
}

Rejection expect_rejection(const std::variant<SwitchPlan, Rejection>& outcome) {
    REQUIRE(std::holds_alternative<Rejection>(outcome));
    return std::get<Rejection>(outcome);
}

}  // namespace

TEST_CASE("parse_bracketed reads the example tree") {
    ParseTree tree = parse_bracketed(kFig1Tree);
    CHECK(tree.token_count == 5);
    CHECK(fringe(tree) == std::vector<std::string>{"The", "movie", "was", "very", "dull"});
    CHECK(tree.root.label == "S");
    REQUIRE(tree.root.children.size() == 2);
    CHECK(tree.root.children[0].label == "NP");
}

TEST_CASE("parse_bracketed handles a single-NP tree") {
    ParseTree tree = parse_bracketed("(NP (NN dog))");
    CHECK(tree.token_count == 1);
    CHECK(fringe(tree) == std::vector<std::string>{"dog"});
}

TEST_CASE("parse_bracketed rejects malformed input") {
    CHECK_THROWS_AS(parse_bracketed("(S (NP (DT The)"), MalformedTreeError);
    CHECK_THROWS_AS(parse_bracketed("(S)"), MalformedTreeError);
    CHECK_THROWS_AS(parse_bracketed("()"), MalformedTreeError);
    CHECK_THROWS_AS(parse_bracketed(""), MalformedTreeError);
    CHECK_THROWS_AS(parse_bracketed("(S (NN dog)) extra"), MalformedTreeError);
    CHECK_THROWS_AS(parse_bracketed("(NN dog (NP (NN cat)))"), MalformedTreeError);
}

TEST_CASE("parse_bracketed round-trips UTF-8 tokens") {
    ParseTree tree = parse_bracketed("(S (NP (NN \xec\x98\x81\xed\x99\x94)) (VP (VBD was)))");
    CHECK(fringe(tree)[0] == "\xec\x98\x81\xed\x99\x94");
}

TEST_CASE("fringe length equals token_count on a generated comb tree") {
    std::string text = "(S";
    for (int i = 0; i < 17; ++i) text += " (NN t" + std::to_string(i) + ")";
    text += ")";
    ParseTree tree = parse_bracketed(text);
    CHECK(tree.token_count == 17);
    CHECK(fringe(tree).size() == 17);
}

TEST_CASE("select_switch_spans picks the example NP") {
    ParseTree tree = parse_bracketed(kFig1Tree);
    SwitchPlan plan = expect_plan(select_switch_spans(tree));
    REQUIRE(plan.spans.size() == 1);
    CHECK(plan.spans[0].start == 0);
    CHECK(plan.spans[0].end == 2);
    CHECK(plan.spans[0].phrase == "The movie");
    const ParseNode* node = resolve_path(tree, plan.spans[0].node_path);
    CHECK(node->label == "NP");
    CHECK(join(fringe(*node), " ") == "The movie");
}

TEST_CASE("whole-sentence NP is rejected when it is the only candidate") {
    ParseTree tree = parse_bracketed("(NP (DT The) (NN movie))");
    Rejection rejection = expect_rejection(select_switch_spans(tree));
    CHECK(rejection.reason == RejectReason::WholeSentenceNP);
}

TEST_CASE("nested whole-sentence NPs still reject") {
    ParseTree tree = parse_bracketed("(NP (NP (DT The) (NN movie)))");
    Rejection rejection = expect_rejection(select_switch_spans(tree));
    CHECK(rejection.reason == RejectReason::WholeSentenceNP);
}

TEST_CASE("pronoun-only NP is skipped and the descent finds the next NP") {
    // hand-traced: NP(PRP It) is pronoun-only, the next NP spans tokens 2..5
    ParseTree tree =
        parse_bracketed("(S (NP (PRP It)) (VP (VBZ is) (NP (DT a) (JJ good) (NN movie))))");
    SwitchPlan plan = expect_plan(select_switch_spans(tree));
    REQUIRE(plan.spans.size() == 1);
    CHECK(plan.spans[0].start == 2);
    CHECK(plan.spans[0].end == 5);
    CHECK(plan.spans[0].phrase == "a good movie");
}

TEST_CASE("tree without any NP is rejected with NoEligibleSpan") {
    ParseTree tree = parse_bracketed("(S (VP (VB Run)))");
    Rejection rejection = expect_rejection(select_switch_spans(tree));
    CHECK(rejection.reason == RejectReason::NoEligibleSpan);
}

TEST_CASE("tree whose only NPs are pronoun-only is always rejected") {
    ParseTree tree = parse_bracketed("(S (NP (PRP It)) (VP (VBZ works)))");
    Rejection rejection = expect_rejection(select_switch_spans(tree));
    CHECK(rejection.reason == RejectReason::PronounOnlyExhausted);

    // all four pronoun tags
    for (const char* tag : {"PRP", "PRP$", "WP", "WP$"}) {
        ParseTree t = parse_bracketed(std::string("(S (NP (") + tag + " it)) (VP (VBZ runs)))");
        CHECK(expect_rejection(select_switch_spans(t)).reason ==
              RejectReason::PronounOnlyExhausted);
    }
}

TEST_CASE("whole-sentence NP with switchable inner NPs yields their spans") {
    ParseTree tree = parse_bracketed(
        "(NP (NP (DT The) (NN dog)) (CC and) (NP (DT the) (NN cat)))");
    SwitchPlan plan = expect_plan(select_switch_spans(tree));
    REQUIRE(plan.spans.size() == 2);
    CHECK(plan.spans[0].phrase == "The dog");
    CHECK(plan.spans[1].phrase == "the cat");
    CHECK(plan.spans[0].start == 0);
    CHECK(plan.spans[0].end == 2);
    CHECK(plan.spans[1].start == 3);
    CHECK(plan.spans[1].end == 5);
}

TEST_CASE("nested NP under a collected NP is not collected twice") {
    ParseTree tree = parse_bracketed(
        "(S (NP (NP (DT the) (NN king)) (PP (IN of) (NP (NN spain)))) (VP (VBD spoke)))");
    SwitchPlan plan = expect_plan(select_switch_spans(tree));
    REQUIRE(plan.spans.size() == 1);
    CHECK(plan.spans[0].phrase == "the king of spain");
}

TEST_CASE("max_spans caps the plan and zero gives an empty plan") {
    ParseTree tree = parse_bracketed(
        "(S (NP (DT the) (NN dog)) (VP (VBD saw) (NP (DT the) (NN cat))))");
    SwitchPlan unlimited = expect_plan(select_switch_spans(tree));
    CHECK(unlimited.spans.size() == 2);

    SelectionPolicy one;
    one.max_spans = 1;
    SwitchPlan capped = expect_plan(select_switch_spans(tree, one));
    REQUIRE(capped.spans.size() == 1);
    CHECK(capped.spans[0].phrase == "the dog");

    SelectionPolicy zero;
    zero.max_spans = 0;
    CHECK(expect_plan(select_switch_spans(tree, zero)).spans.empty());
}

TEST_CASE("selection is deterministic and spans are sorted, non-overlapping, proper") {
    std::vector<std::string> corpus = {
        kFig1Tree,
        "(S (NP (DT the) (NN dog)) (VP (VBD saw) (NP (DT the) (NN cat))))",
        "(S (NP (NP (NNP John)) (CC and) (NP (NNP Mary))) (VP (VBD left)))",
        "(S (NP (PRP It)) (VP (VBZ is) (NP (DT a) (NN test))))",
    };
    for (const std::string& text : corpus) {
        ParseTree tree = parse_bracketed(text);
        auto first = select_switch_spans(tree);
        auto second = select_switch_spans(tree);
        REQUIRE(std::holds_alternative<SwitchPlan>(first));
        SwitchPlan plan_a = std::get<SwitchPlan>(first);
        SwitchPlan plan_b = std::get<SwitchPlan>(second);
        REQUIRE(plan_a.spans.size() == plan_b.spans.size());

        std::size_t previous_end = 0;
        for (std::size_t i = 0; i < plan_a.spans.size(); ++i) {
            const SwitchSpan& span = plan_a.spans[i];
            CHECK(span.start == plan_b.spans[i].start);
            CHECK(span.end == plan_b.spans[i].end);
            CHECK(span.start >= previous_end);  // sorted and non-overlapping
            previous_end = span.end;
            CHECK_FALSE((span.start == 0 && span.end == tree.token_count));
            const ParseNode* node = resolve_path(tree, span.node_path);
            CHECK(node->label == "NP");
            CHECK(join(fringe(*node), " ") == span.phrase);
        }
    }
}
