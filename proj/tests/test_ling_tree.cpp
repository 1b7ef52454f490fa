#include <doctest.h>

#include "hero/ling_tree.hpp"
#include "hero/synth.hpp"

using namespace hero;

namespace {

TreeError::Kind error_kind(const std::string& text) {
  try {
    parse_sexpr(text);
  } catch (const TreeError& e) {
    return e.kind();
  }
  FAIL("no TreeError for: " << text);
  return TreeError::Kind::EmptyNode;
}

}  // namespace

TEST_CASE("single EDU document") {
  LingTree t = parse_sexpr("(EDU (S (NP (NNP Obama)) (VP (VBD spoke))))", "d1");
  CHECK(t.doc_id == "d1");
  CHECK(t.root.kind == NodeKind::EDU);
  REQUIRE(t.root.children.size() == 1);
  const TreeNode& s = t.root.children[0];
  CHECK(s.kind == NodeKind::SYNTAX);
  CHECK(count_kind(s, NodeKind::SYNTAX) == 5);
  CHECK(count_kind(s, NodeKind::WORD) == 2);
  CHECK(leaf_words(t) == std::vector<std::string>{"Obama", "spoke"});
  CHECK(t.root.level() == Level::DISCOURSE);
  CHECK(s.level() == Level::SYNTAX);
}

TEST_CASE("relation over two EDUs") {
  LingTree t = parse_sexpr("(NS-elaboration (EDU (NP (NNP X))) (EDU (NP (NNP Y))))");
  CHECK(t.root.kind == NodeKind::RR);
  CHECK(t.root.label == "NS-elaboration");
  REQUIRE(t.root.children.size() == 2);
  CHECK(t.root.children[0].kind == NodeKind::EDU);
  CHECK(t.root.children[1].kind == NodeKind::EDU);

  auto [disc, syn] = derive_views(t);
  CHECK(count_nodes(disc.root) == 3);
  CHECK(disc.root.children[0].is_leaf());
  REQUIRE(syn.trees.size() == 2);
  CHECK(serialize_sexpr(syn.trees[0]) == "(NP (NNP X))");
  CHECK(serialize_sexpr(syn.trees[1]) == "(NP (NNP Y))");
}

TEST_CASE("label classification") {
  CHECK(classify_label("EDU") == NodeKind::EDU);
  CHECK(classify_label("NN-joint") == NodeKind::RR);
  CHECK(classify_label("SN-attribution") == NodeKind::RR);
  CHECK(classify_label("NP") == NodeKind::SYNTAX);
  CHECK(classify_label("NN") == NodeKind::SYNTAX);
  CHECK(has_nuclearity_prefix("NS-x"));
  CHECK_FALSE(has_nuclearity_prefix("SS-x"));
  CHECK_FALSE(has_nuclearity_prefix("NS-"));
}

TEST_CASE("canonical round trip of a minimal tree") {
  const std::string text = "(EDU (NNP Obama))";
  CHECK(serialize_sexpr(parse_sexpr(text)) == text);
  CHECK(serialize_sexpr(parse_sexpr("  ( EDU\n\t(NNP   Obama ) )  ")) == text);
}

TEST_CASE("parse errors") {
  CHECK(error_kind("(EDU (NNP Obama)") == TreeError::Kind::UnbalancedParens);
  CHECK(error_kind("(EDU (NNP Obama)))") == TreeError::Kind::UnbalancedParens);
  CHECK(error_kind("EDU") == TreeError::Kind::UnbalancedParens);
  CHECK(error_kind("") == TreeError::Kind::EmptyNode);
  CHECK(error_kind("()") == TreeError::Kind::EmptyNode);
  CHECK(error_kind("(EDU)") == TreeError::Kind::EmptyNode);
  CHECK(error_kind("(XY-elaboration (EDU (NNP a)) (EDU (NNP b)))") == TreeError::Kind::UnknownRRPrefix);
  // a word directly under an EDU
  CHECK(error_kind("(EDU Obama)") == TreeError::Kind::KindViolation);
  // an EDU inside syntax
  CHECK(error_kind("(EDU (S (EDU (NNP a))))") == TreeError::Kind::KindViolation);
  // a syntax node directly under a relation
  CHECK(error_kind("(NN-joint (EDU (NNP a)) (NP (NNP b)))") == TreeError::Kind::KindViolation);
  // a token mixed with phrases
  CHECK(error_kind("(EDU (S word (NP (NNP a))))") == TreeError::Kind::KindViolation);
  // a bare syntax tree is not a document
  CHECK(error_kind("(S (NP (NNP a)))") == TreeError::Kind::KindViolation);
}

TEST_CASE("error offsets point into the text") {
  try {
    parse_sexpr("(EDU (NNP a) ())");
    FAIL("expected an error");
  } catch (const TreeError& e) {
    CHECK(e.kind() == TreeError::Kind::EmptyNode);
    CHECK(e.offset() == 13);
  }
}

TEST_CASE("escaped parentheses in tokens") {
  CHECK(escape_token("a(b)") == "a-LRB-b-RRB-");
  CHECK(unescape_token("-LRB-x-RRB-") == "(x)");
  LingTree t = parse_sexpr("(EDU (NP (-LRB- -LRB-) (NN x) (-RRB- -RRB-)))");
  CHECK(leaf_words(t) == std::vector<std::string>{"-LRB-", "x", "-RRB-"});
  CHECK(serialize_sexpr(parse_sexpr(serialize_sexpr(t))) == serialize_sexpr(t));
}

TEST_CASE("validate on hand-built trees") {
  LingTree ok = parse_sexpr("(EDU (NNP a))");
  CHECK_NOTHROW(validate(ok));

  LingTree two_roots = ok;
  two_roots.root.children.push_back(two_roots.root.children[0]);
  CHECK_THROWS_AS(validate(two_roots), TreeError);

  LingTree empty = ok;
  empty.root.children[0].children.clear();
  CHECK_THROWS_AS(validate(empty), TreeError);
}

TEST_CASE("random trees round trip and validate") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    synth::TreeShape shape;
    shape.num_edus = 1 + static_cast<int>(rng.below(5));
    LingTree t = synth::random_tree(rng, shape);
    CHECK_NOTHROW(validate(t));
    CHECK(count_kind(t.root, NodeKind::EDU) == static_cast<std::size_t>(shape.num_edus));
    LingTree back = parse_sexpr(serialize_sexpr(t));
    CHECK(back.root == t.root);
    auto [disc, syn] = derive_views(t);
    CHECK(syn.trees.size() == static_cast<std::size_t>(shape.num_edus));
    std::size_t words = 0;
    for (const auto& s : syn.trees) words += count_kind(s, NodeKind::WORD);
    CHECK(words == leaf_words(t).size());
  }
}
