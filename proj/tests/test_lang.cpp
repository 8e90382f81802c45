#include <gtest/gtest.h>

#include "sceneforge/lang.hpp"
#include "sceneforge/synth.hpp"
#include "support.hpp"

using namespace sceneforge;

namespace {

const Taxonomy* tax() { return &sftest::catalog().taxonomy(); }

SceneOperation one_op(const std::string& text) {
  const auto ops = parse_command(text, tax());
  EXPECT_EQ(ops.size(), 1u) << text;
  return ops.empty() ? SceneOperation{} : ops[0];
}

ErrorCode error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::io;
}

}  // namespace

TEST(Lang, SelectWithSpatialQualifier) {
  const SceneOperation op = one_op("select the chair on the right of the table");
  EXPECT_EQ(op.kind, OperationKind::Select);
  EXPECT_EQ(op.target.category, "chair");
  EXPECT_TRUE(op.target.definite);
  ASSERT_TRUE(op.target.spatialQualifier);
  EXPECT_EQ(op.target.spatialQualifier->predicate, Predicate::right_of);
  EXPECT_EQ(op.target.spatialQualifier->referentCategory, "table");
  EXPECT_TRUE(op.target.spatialQualifier->referentDefinite);
  EXPECT_TRUE(op.constraints.empty());
}

TEST(Lang, LookAtWithAndWithoutPreposition) {
  for (const char* text : {"look at the lamp", "look the lamp"}) {
    const SceneOperation op = one_op(text);
    EXPECT_EQ(op.kind, OperationKind::LookAt) << text;
    EXPECT_EQ(op.target.category, "lamp");
    EXPECT_TRUE(op.target.definite);
  }
}

TEST(Lang, InsertSynonyms) {
  for (const char* text : {"add a lamp to the table", "insert a lamp on the table", "place a lamp on the table",
                           "put a lamp on the table"}) {
    const SceneOperation op = one_op(text);
    EXPECT_EQ(op.kind, OperationKind::Insert) << text;
    EXPECT_EQ(op.target.category, "lamp");
    EXPECT_FALSE(op.target.definite);
    ASSERT_TRUE(op.secondary);
    EXPECT_EQ(op.secondary->category, "table");
    EXPECT_TRUE(op.secondary->definite);
    ASSERT_EQ(op.constraints.size(), 1u);
    EXPECT_EQ(op.constraints[0], (RelationConstraint{Predicate::on, 0, 1}));
  }
}

TEST(Lang, RemoveSynonyms) {
  for (const char* text : {"delete the lamp", "remove the lamp"}) {
    const SceneOperation op = one_op(text);
    EXPECT_EQ(op.kind, OperationKind::Remove);
    EXPECT_EQ(op.target.category, "lamp");
    EXPECT_TRUE(op.target.definite);
  }
}

TEST(Lang, Replace) {
  const SceneOperation op = one_op("replace the lamp with a vase");
  EXPECT_EQ(op.kind, OperationKind::Replace);
  EXPECT_EQ(op.target.category, "lamp");
  EXPECT_TRUE(op.target.definite);
  ASSERT_TRUE(op.secondary);
  EXPECT_EQ(op.secondary->category, "vase");
  EXPECT_FALSE(op.secondary->definite);
}

TEST(Lang, MoveRelativeToViewerAndObject) {
  SceneOperation op = one_op("move the chair to the left");
  EXPECT_EQ(op.kind, OperationKind::Move);
  ASSERT_EQ(op.constraints.size(), 1u);
  EXPECT_EQ(op.constraints[0], (RelationConstraint{Predicate::left_of, 0, kViewer}));
  for (const char* text : {"place the chair near the desk", "put the chair near the desk"}) {
    op = one_op(text);
    EXPECT_EQ(op.kind, OperationKind::Move) << text;
    ASSERT_TRUE(op.secondary);
    EXPECT_EQ(op.secondary->category, "desk");
    ASSERT_EQ(op.constraints.size(), 1u);
    EXPECT_EQ(op.constraints[0], (RelationConstraint{Predicate::near, 0, 1}));
  }
}

TEST(Lang, ScaleFactors) {
  EXPECT_EQ(one_op("enlarge the lamp").scalar, 1.5);
  EXPECT_EQ(one_op("shrink the lamp").scalar, 1.0 / 1.5);
  EXPECT_EQ(one_op("shrink the lamp").kind, OperationKind::Scale);
}

TEST(Lang, SupportSentence) {
  const SceneTemplate t = parse_description("There is a sandwich on a plate.", tax());
  EXPECT_EQ(t.sceneType, "room");
  ASSERT_EQ(t.objects.size(), 2u);
  EXPECT_EQ(t.objects[0].category, "sandwich");
  EXPECT_EQ(t.objects[1].category, "plate");
  ASSERT_EQ(t.constraints.size(), 1u);
  EXPECT_EQ(t.constraints[0], (RelationConstraint{Predicate::on, 0, 1}));
}

TEST(Lang, MultiSentenceWithAttributesAndBackReference) {
  const SceneTemplate t =
      parse_description("There is a room with a desk and a red chair. The chair is to the left of the desk.", tax());
  ASSERT_EQ(t.objects.size(), 3u);
  EXPECT_EQ(t.objects[0].category, "room");
  EXPECT_EQ(t.objects[1].category, "desk");
  EXPECT_EQ(t.objects[2].category, "chair");
  EXPECT_EQ(t.objects[2].attributes, (AttributeSet{{AttributeKind::color, "red"}}));
  const std::vector<RelationConstraint> want{{Predicate::in, 1, 0}, {Predicate::in, 2, 0}, {Predicate::left_of, 2, 1}};
  EXPECT_EQ(t.constraints, want);
}

TEST(Lang, CountsAndSceneType) {
  const SceneTemplate t = parse_description("There are two red chairs and a table in the kitchen.", tax());
  EXPECT_EQ(t.sceneType, "kitchen");
  ASSERT_EQ(t.objects.size(), 3u);
  EXPECT_EQ(t.objects[0].count, 2);
  EXPECT_EQ(t.objects[2].category, "room");
}

TEST(Lang, Errors) {
  EXPECT_EQ(error_of([] { parse_description("", tax()); }), ErrorCode::empty_input);
  EXPECT_EQ(error_of([] { parse_command("   ", tax()); }), ErrorCode::empty_input);
  EXPECT_EQ(error_of([] { parse_command("frobnicate the lamp", tax()); }), ErrorCode::unknown_verb);
  try {
    parse_command("frobnicate the lamp", tax());
  } catch (const Error& e) {
    ASSERT_TRUE(e.span());
    EXPECT_EQ(e.span()->begin, 0u);
    EXPECT_EQ(e.span()->end, 10u);
  }
}

TEST(Lang, UnknownWordsWarnAndPassThrough) {
  const DescriptionParse p = parse_description_ex("There is a gleaming chair.", tax());
  ASSERT_EQ(p.tmpl.objects.size(), 1u);
  EXPECT_EQ(p.tmpl.objects[0].category, "chair");
  ASSERT_EQ(p.warnings.size(), 1u);
  EXPECT_NE(p.warnings[0].message.find("gleaming"), std::string::npos);
  EXPECT_EQ(one_op("insert a zorgblat on the table").target.category, "zorgblat");
}

TEST(Lang, NormalizeCategory) {
  EXPECT_EQ(normalize_category("Chairs", tax()), "chair");
  EXPECT_EQ(normalize_category("TVs", tax()), "television");
  EXPECT_EQ(normalize_category("coffee tables", tax()), "coffee_table");
  EXPECT_EQ(normalize_category("zorgblat", tax()), "zorgblat");
  EXPECT_EQ(normalize_category("shelves", tax()), "shelf");
}

TEST(Lang, CommandClassification) {
  EXPECT_FALSE(is_command("There is a lamp.", default_lexicon(), tax()));
  EXPECT_FALSE(is_command("A lamp is on the table.", default_lexicon(), tax()));
  EXPECT_FALSE(is_command("two chairs in a kitchen", default_lexicon(), tax()));
  EXPECT_TRUE(is_command("move the chair to the left", default_lexicon(), tax()));
  EXPECT_TRUE(is_command("frobnicate the lamp", default_lexicon(), tax()));
}

TEST(Lang, RenderedTemplatesParseBack) {
  // canonical text of every synthetic scene's support structure
  const Catalog& c = sftest::catalog();
  const SceneCorpus corpus = synthesize_corpus(c, {4, 2, {"kitchen", "office", "living_room", "bedroom"}});
  int checked = 0;
  for (const auto& cs : corpus.scenes) {
    SceneTemplate t;
    t.sceneType = cs.sceneType;
    std::map<std::string, int> index;
    std::set<std::string> used;
    for (const auto& inst : cs.scene.instances) {
      if (!used.insert(inst.category).second) continue;  // one object per category
      index[inst.id] = t.add_object(inst.category);
    }
    for (const auto& inst : cs.scene.instances) {
      if (!index.count(inst.id) || !inst.placement.supportParent || !index.count(*inst.placement.supportParent)) continue;
      const int a = index[inst.id], b = index[*inst.placement.supportParent];
      t.constraints.push_back({t.objects[b].category == "room" ? Predicate::in : Predicate::on, a, b});
    }
    const std::string text = render_template(t);
    const SceneTemplate back = parse_description(text, tax());
    EXPECT_EQ(to_json(back).dump(), to_json(t).dump()) << text;
    ++checked;
  }
  EXPECT_EQ(checked, 8);
}
